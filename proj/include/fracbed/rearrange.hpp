#pragma once

// Rearrangements on grids: radial decreasing rearrangement, two-point
// symmetrization (polarization) and numeric checks of the lemmas built on it.
//
// Coordinate-aligned polarizations act on the periodic grid: reflection in a
// mid-cell plane x_a = c is then an exact cell bijection and an isometry of
// the torus metric, and the half-torus containing the origin plays the role
// of the positive side.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracbed/besov.hpp"
#include "fracbed/grid.hpp"

namespace fracbed {

// ---------------------------------------------------------------------------
// Decreasing rearrangement

namespace detail {

inline std::array<long, 3> centred_offsets(const GridShape& s, std::size_t i) {
  auto k = s.unflatten(i);
  std::array<long, 3> m{0, 0, 0};
  for (int a = 0; a < s.n; ++a) m[a] = static_cast<long>(k[a]) - static_cast<long>(s.N / 2);
  return m;
}

inline long offset_norm2(const std::array<long, 3>& m) { return m[0] * m[0] + m[1] * m[1] + m[2] * m[2]; }

/// Cells sorted by centre distance from the origin, ties by flat (row-major) index.
inline std::vector<std::size_t> rearrangement_order(const GridShape& s) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<long> d(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) d[i] = offset_norm2(centred_offsets(s, i));
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  return idx;
}

}  // namespace detail

/// |values| reassigned to cells in order of distance from the origin. The shape
/// is not validated so that tiny examples can be run.
inline std::vector<double> decreasing_rearrangement(const std::vector<double>& values, const GridShape& s) {
  if (values.size() != s.size()) throw std::invalid_argument("decreasing_rearrangement: size mismatch");
  std::vector<double> v(values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(values[i]);
  std::sort(v.begin(), v.end(), std::greater<>());
  auto order = detail::rearrangement_order(s);
  std::vector<double> out(v.size());
  for (std::size_t r = 0; r < order.size(); ++r) out[order[r]] = v[r];
  return out;
}

inline GridFunction decreasing_rearrangement(const GridFunction& f) {
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(std::abs(f.values[i]))) throw std::domain_error("decreasing_rearrangement: non-finite value");
    a[i] = std::abs(f.values[i]);
  }
  auto r = decreasing_rearrangement(a, f.shape);
  GridFunction g(f.shape);
  for (std::size_t i = 0; i < r.size(); ++i) g.values[i] = r[i];
  return g;
}

/// L1 distance to the rearrangement up to the order inside each distance
/// shell: values on a shell are compared after sorting.
inline double shell_l1_distance(const GridFunction& f, const GridFunction& fstar) {
  const auto& s = f.shape;
  std::map<long, std::pair<std::vector<double>, std::vector<double>>> shells;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto& sh = shells[detail::offset_norm2(detail::centred_offsets(s, i))];
    sh.first.push_back(f.values[i].real());
    sh.second.push_back(fstar.values[i].real());
  }
  double d = 0.0;
  for (auto& [k, v] : shells) {
    std::sort(v.first.begin(), v.first.end());
    std::sort(v.second.begin(), v.second.end());
    for (std::size_t i = 0; i < v.first.size(); ++i) d += std::abs(v.first[i] - v.second[i]);
  }
  return d * s.cell();
}

// ---------------------------------------------------------------------------
// Hyperplanes and polarization

struct Hyperplane {
  int n = 1;
  std::array<double, 3> normal{1.0, 0.0, 0.0};
  double offset = 0.0;        // plane {x . normal = offset}
  bool positiveSide = true;   // true: the half-space containing the origin is M+
  int axis = -1;              // >= 0 for coordinate-aligned mid-cell planes
  std::size_t cell = 0;       // plane between cells `cell` and `cell + 1` on `axis`
  bool approximate = false;   // nearest-cell pairing

  /// Mid-cell plane between cells k and k+1 along axis a.
  static Hyperplane mid_cell(const GridShape& s, int a, std::size_t k) {
    if (a < 0 || a >= s.n) throw std::invalid_argument("Hyperplane: axis out of range");
    if (k >= s.N) throw std::invalid_argument("Hyperplane: cell out of range");
    Hyperplane h;
    h.n = s.n;
    h.normal = {0.0, 0.0, 0.0};
    h.normal[a] = 1.0;
    h.offset = s.coord(k) + 0.5 * s.h();
    h.axis = a;
    h.cell = k;
    return h;
  }

  /// Arbitrary plane; polarization pairs each cell with the cell nearest its mirror.
  static Hyperplane general(int n, std::array<double, 3> normal, double offset) {
    double m = 0.0;
    for (int a = 0; a < n; ++a) m += normal[a] * normal[a];
    m = std::sqrt(m);
    if (!(m > 0.0)) throw std::invalid_argument("Hyperplane: zero normal");
    for (int a = 0; a < 3; ++a) normal[a] = a < n ? normal[a] / m : 0.0;
    if (offset == 0.0) throw std::invalid_argument("Hyperplane: the plane must not pass through the origin");
    Hyperplane h;
    h.n = n;
    h.normal = normal;
    h.offset = offset;
    h.approximate = true;
    return h;
  }
};

namespace detail {

/// Index along the plane's axis paired with j (torus reflection).
inline std::size_t mirror_index(const GridShape& s, const Hyperplane& H, std::size_t j) {
  return (2 * H.cell + 1 + s.N - j % s.N) % s.N;
}

/// Whether axis index j lies on the half-torus containing the origin.
inline bool on_origin_side(const GridShape& s, const Hyperplane& H, std::size_t j) {
  const long N = static_cast<long>(s.N);
  const long o = N / 2;
  // plane sits at k + 1/2; work in doubled units to stay on integers
  auto wrapped = [&](long idx) {
    long t = (2 * idx - (2 * static_cast<long>(H.cell) + 1)) % (2 * N);
    if (t <= -N) t += 2 * N;
    if (t > N) t -= 2 * N;
    return t;
  };
  return (wrapped(static_cast<long>(j)) > 0) == (wrapped(o) > 0);
}

/// Pairs (positive-side cell, mirror cell).
inline std::vector<std::pair<std::size_t, std::size_t>> polarization_pairs(const GridShape& s, const Hyperplane& H) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (!H.approximate) {
    if (H.axis < 0 || H.n != s.n) throw std::invalid_argument("polarize: plane does not match the grid");
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto k = s.unflatten(i);
      if (!on_origin_side(s, H, k[H.axis])) continue;
      auto km = k;
      km[H.axis] = mirror_index(s, H, k[H.axis]);
      pairs.emplace_back(i, s.flatten(km));
    }
    return pairs;
  }
  // nearest-cell pairing in the plane (non-periodic)
  std::vector<int> used(s.size(), 0);
  const double sideOrigin = -H.offset;  // origin . normal - offset
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto k = s.unflatten(i);
    std::array<double, 3> x{0, 0, 0};
    double t = -H.offset;
    for (int a = 0; a < s.n; ++a) {
      x[a] = s.coord(k[a]);
      t += x[a] * H.normal[a];
    }
    if (t == 0.0 || (t > 0.0) != (sideOrigin > 0.0)) continue;
    std::array<std::size_t, 3> km{0, 0, 0};
    bool inside = true;
    for (int a = 0; a < s.n; ++a) {
      const double y = x[a] - 2.0 * t * H.normal[a];
      const long j = std::lround((y + s.L) / s.h());
      if (j < 0 || j >= static_cast<long>(s.N)) inside = false;
      km[a] = static_cast<std::size_t>(std::max(0L, j));
    }
    if (!inside) continue;
    const std::size_t m = s.flatten(km);
    if (m == i) throw std::domain_error("polarize: a cell off the plane maps to itself");
    if (used[m] || used[i]) continue;  // collision: leave both cells fixed
    used[m] = used[i] = 1;
    pairs.emplace_back(i, m);
  }
  return pairs;
}

}  // namespace detail

/// max on the origin side, min on the mirror side; unpaired cells are kept.
inline GridFunction polarize(const GridFunction& f, const Hyperplane& H) {
  if (!f.is_real(0.0)) throw std::domain_error("polarize: real-valued data expected");
  GridFunction g = f;
  for (const auto& [x, y] : detail::polarization_pairs(f.shape, H)) {
    const double a = f.values[x].real(), b = f.values[y].real();
    g.values[x] = std::max(a, b);
    g.values[y] = std::min(a, b);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Gauges, kernels and the two-point energy

/// Convex gauge phi with phi(0) = 0. Catalog entries are t^p (p >= 1) and
/// cosh(t) - 1; custom gauges are spot-checked.
struct Gauge {
  enum class Kind { Power, CoshMinusOne, Custom };
  Kind kind = Kind::Power;
  double p = 2.0;
  std::function<double(double)> fn;
  std::string name = "t^2";

  double operator()(double t) const {
    switch (kind) {
      case Kind::Power: return p == 2.0 ? t * t : std::pow(t, p);
      case Kind::CoshMinusOne: {
        const double h = std::sinh(0.5 * t);
        return 2.0 * h * h;
      }
      case Kind::Custom: return fn(t);
    }
    return 0.0;
  }

  static Gauge power(double p) {
    if (!(p >= 1.0)) throw AdmissibilityError("gauge t^p needs p >= 1");
    Gauge g;
    g.p = p;
    g.name = "t^" + std::to_string(p);
    return g;
  }
  static Gauge cosh_minus_one() {
    Gauge g;
    g.kind = Kind::CoshMinusOne;
    g.name = "cosh(t)-1";
    return g;
  }
  /// Checks phi(0) = 0, monotone, convex and t phi'(t) convex at 64 points of [0, tMax].
  static Gauge custom(std::function<double(double)> fn, double tMax = 4.0, std::string name = "custom") {
    Gauge g;
    g.kind = Kind::Custom;
    g.fn = std::move(fn);
    g.name = std::move(name);
    const double h = tMax / 64.0;
    auto tp = [&](double t) {  // t phi'(t) by central differences
      const double e = 1e-4 * std::max(t, h);
      return t * (g.fn(t + e) - g.fn(std::max(0.0, t - e))) / (t + e - std::max(0.0, t - e));
    };
    if (std::abs(g.fn(0.0)) > 1e-12) throw AdmissibilityError("gauge: phi(0) must be 0");
    const double tol = 1e-9;
    for (int i = 1; i < 64; ++i) {
      const double t = i * h;
      const double a = g.fn(t - h), b = g.fn(t), c = g.fn(t + h);
      if (b < a - tol) throw AdmissibilityError("gauge: phi must be increasing");
      if (a - 2.0 * b + c < -tol * std::max(1.0, std::abs(b))) throw AdmissibilityError("gauge: phi must be convex");
      const double ta = tp(std::max(t - h, 0.5 * h)), tb = tp(t), tc = tp(t + h);
      if (ta - 2.0 * tb + tc < -1e-6 * std::max(1.0, std::abs(tb)))
        throw AdmissibilityError("gauge: t phi'(t) must be convex");
    }
    return g;
  }
};

using RadialFn = std::function<double(double)>;

/// e^{-r^2/s^2}
inline RadialFn gaussian_kernel(double s = 1.0) {
  return [s](double r) { return std::exp(-r * r / (s * s)); };
}
/// max(r, r0)^{-n-p beta}
inline RadialFn truncated_power_kernel(int n, double p, double beta, double r0) {
  const double e = -(n + p * beta);
  return [e, r0](double r) { return std::pow(std::max(r, r0), e); };
}
inline RadialFn unit_weight() {
  return [](double) { return 1.0; };
}

namespace detail {

/// Torus distance between two cells.
inline double torus_distance(const GridShape& s, std::size_t i, std::size_t j) {
  auto a = s.unflatten(i), b = s.unflatten(j);
  double d2 = 0.0;
  for (int k = 0; k < s.n; ++k) {
    const std::size_t m = a[k] > b[k] ? a[k] - b[k] : b[k] - a[k];
    const double d = static_cast<double>(std::min(m, s.N - m)) * s.h();
    d2 += d * d;
  }
  return std::sqrt(d2);
}

}  // namespace detail

/// sum_{x,y} K(d(x,y)) phi(|f(x) - g(y)| / rho(d(x,y))) h^{2n}, torus distance d.
inline double two_point_energy(const GridFunction& f, const GridFunction& g, const RadialFn& K, const Gauge& phi,
                               const RadialFn& rho) {
  if (!(f.shape == g.shape)) throw std::invalid_argument("two_point_energy: grids differ");
  const auto& s = f.shape;
  double e = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double d = detail::torus_distance(s, i, j);
      const double k = K(d);
      if (k == 0.0) continue;
      const double diff = std::abs(f.values[i].real() - g.values[j].real());
      if (diff == 0.0) continue;
      e += k * phi(diff / rho(d));
    }
  return e * s.cell() * s.cell();
}

struct TwoPointCheck {
  double before = 0.0;
  double after = 0.0;
  bool holds(double scale) const { return after <= before + 1e-12 * scale; }
};

inline TwoPointCheck two_point_energy_check(const GridFunction& f, const GridFunction& g, const RadialFn& K,
                                            const Gauge& phi, const RadialFn& rho, const Hyperplane& H) {
  TwoPointCheck c;
  c.before = two_point_energy(f, g, K, phi, rho);
  c.after = two_point_energy(polarize(f, H), polarize(g, H), K, phi, rho);
  return c;
}

// ---------------------------------------------------------------------------
// Random polarization schedules

struct PolarizationStep {
  int axis = 0;
  double offset = 0.0;
  double energyBefore = 0.0;
  double energyAfter = 0.0;
  double l1Distance = 0.0;
  bool changed = false;
};

struct PolarizationTrace {
  std::vector<PolarizationStep> steps;
  double initialL1 = 0.0;
  double energyScale = 0.0;  // energy of the input, for relative tolerances
  GridFunction final;

  bool monotone(double relTol = 1e-12) const {
    for (const auto& s : steps)
      if (s.energyAfter > s.energyBefore + relTol * energyScale) return false;
    return true;
  }
  double final_l1() const { return steps.empty() ? initialL1 : steps.back().l1Distance; }
  /// First step after which the L1 distance stays below tol (steps.size() if never).
  std::size_t steps_to(double tol) const {
    if (initialL1 <= tol) return 0;
    for (std::size_t i = 0; i < steps.size(); ++i)
      if (steps[i].l1Distance <= tol) return i + 1;
    return steps.size() + 1;
  }

  void write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "step,axis,offset,energyBefore,energyAfter,l1dist\n";
    os.precision(17);
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const auto& s = steps[i];
      os << i + 1 << ',' << s.axis << ',' << s.offset << ',' << s.energyBefore << ',' << s.energyAfter << ','
         << s.l1Distance << '\n';
    }
  }
};

struct ScheduleOptions {
  double p = 2.0;
  double beta = 0.5;
};

/// Random coordinate-aligned polarizations: axis uniform, plane uniform over
/// the N mid-cell planes of that axis (none passes through the origin cell
/// centre). Records the discrete Besov energy
/// sum_{x != y} |f(x)-f(y)|^p d(x,y)^{-n-p beta} h^{2n} at every step.
inline PolarizationTrace polarization_schedule(const GridFunction& f, std::size_t steps, std::uint64_t seed,
                                               const ScheduleOptions& opt = {}) {
  if (steps < 1) throw std::invalid_argument("polarization_schedule: steps >= 1");
  const auto& s = f.shape;
  const std::size_t M = s.size();
  std::vector<double> K(M * M, 0.0);
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j)
      if (i != j) K[i * M + j] = std::pow(detail::torus_distance(s, i, j), -(s.n + opt.p * opt.beta));
  const Gauge phi = Gauge::power(opt.p);
  auto energy = [&](const std::vector<double>& v) {
    double e = 0.0;
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t j = 0; j < M; ++j)
        if (i != j) e += K[i * M + j] * phi(std::abs(v[i] - v[j]));
    return e * s.cell() * s.cell();
  };
  auto fstar = decreasing_rearrangement(f);
  std::vector<double> cur(M);
  for (std::size_t i = 0; i < M; ++i) cur[i] = f.values[i].real();
  GridFunction tmp(s);
  auto l1 = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i < M; ++i) tmp.values[i] = v[i];
    return shell_l1_distance(tmp, fstar);
  };

  PolarizationTrace tr;
  tr.energyScale = energy(cur);
  tr.initialL1 = l1(cur);
  double e = tr.energyScale, dist = tr.initialL1;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> axisDist(0, s.n - 1);
  std::uniform_int_distribution<std::size_t> cellDist(0, s.N - 1);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pairCache(s.n * s.N);
  for (std::size_t k = 0; k < steps; ++k) {
    const int a = axisDist(rng);
    const std::size_t c = cellDist(rng);
    auto& pairs = pairCache[a * s.N + c];
    const auto H = Hyperplane::mid_cell(s, a, c);
    if (pairs.empty()) pairs = detail::polarization_pairs(s, H);
    bool changed = false;
    for (const auto& [x, y] : pairs)
      if (cur[y] > cur[x]) {
        std::swap(cur[x], cur[y]);
        changed = true;
      }
    PolarizationStep st;
    st.axis = a;
    st.offset = H.offset;
    st.energyBefore = e;
    if (changed) {
      e = energy(cur);
      dist = l1(cur);
    }
    st.energyAfter = e;
    st.l1Distance = dist;
    st.changed = changed;
    tr.steps.push_back(st);
  }
  tr.final = GridFunction(s);
  for (std::size_t i = 0; i < M; ++i) tr.final.values[i] = cur[i];
  return tr;
}

// ---------------------------------------------------------------------------
// Lemma checks on numbers

/// phi(|a1-b1|) + phi(|a2-b2|) - phi(|a1*-b1*|) - phi(|a2*-b2*|) at scale lambda,
/// where (a1*, a2*) = (max, min).
inline double two_point_gap(const Gauge& phi, double a1, double a2, double b1, double b2, double lambda = 1.0) {
  const double A1 = std::max(a1, a2), A2 = std::min(a1, a2), B1 = std::max(b1, b2), B2 = std::min(b1, b2);
  return phi(lambda * std::abs(a1 - b1)) + phi(lambda * std::abs(a2 - b2)) - phi(lambda * std::abs(A1 - B1)) -
         phi(lambda * std::abs(A2 - B2));
}

// ---------------------------------------------------------------------------
// Symmetrization inequality

struct SymmetrizationCheck {
  QuadratureResult lhs;  // seminorm of f
  QuadratureResult rhs;  // seminorm of the rearrangement
  double errorBudget() const { return lhs.absError + rhs.absError; }
  bool holds() const { return lhs.value >= rhs.value - errorBudget(); }
};

inline SymmetrizationCheck symmetrization_inequality_check(const GridFunction& f, double p, double beta,
                                                           int angularNodes = 16, double radialTol = 1e-5) {
  SymmetrizationCheck c;
  c.lhs = besov_seminorm(f, p, beta, angularNodes, radialTol);
  c.rhs = besov_seminorm(decreasing_rearrangement(f), p, beta, angularNodes, radialTol);
  return c;
}

// ---------------------------------------------------------------------------
// Triangle and Reduction lemmas (zero extension outside the grid)

using VectorFn = std::function<double(const std::array<double, 3>&)>;

struct LemmaSides {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds(double rel = 1e-12) const { return lhs >= rhs - rel * std::max(std::abs(lhs), std::abs(rhs)); }
};

namespace detail {

// Visits every displacement z = m h with |m_a| < N and every x in the union of
// the grid and its z-translate: fn(z, iX or -1, iXplusZ or -1).
template <class Fn>
void for_each_displacement(const GridShape& s, Fn&& fn) {
  const long N = static_cast<long>(s.N);
  std::array<long, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < s.n; ++a) {
    lo[a] = -(N - 1);
    hi[a] = N - 1;
  }
  auto index = [&](const std::array<long, 3>& k) -> long {
    std::array<std::size_t, 3> u{0, 0, 0};
    for (int a = 0; a < s.n; ++a) {
      if (k[a] < 0 || k[a] >= N) return -1;
      u[a] = static_cast<std::size_t>(k[a]);
    }
    return static_cast<long>(s.flatten(u));
  };
  std::array<long, 3> m{0, 0, 0};
  for (m[0] = lo[0]; m[0] <= hi[0]; ++m[0])
    for (m[1] = lo[1]; m[1] <= hi[1]; ++m[1])
      for (m[2] = lo[2]; m[2] <= hi[2]; ++m[2]) {
        std::array<double, 3> z{0, 0, 0};
        for (int a = 0; a < s.n; ++a) z[a] = m[a] * s.h();
        fn.begin(z);
        // x ranges over [min(0, -m), max(N, N - m)) on each axis
        std::array<long, 3> xl{0, 0, 0}, xh{1, 1, 1};
        for (int a = 0; a < s.n; ++a) {
          xl[a] = std::min(0L, -m[a]);
          xh[a] = std::max(N, N - m[a]);
        }
        std::array<long, 3> x{0, 0, 0};
        for (x[0] = xl[0]; x[0] < xh[0]; ++x[0])
          for (x[1] = xl[1]; x[1] < xh[1]; ++x[1])
            for (x[2] = xl[2]; x[2] < xh[2]; ++x[2]) {
              std::array<long, 3> y{x[0] + m[0], x[1] + m[1], x[2] + m[2]};
              fn.term(index(x), index(y));
            }
        fn.end();
      }
}

}  // namespace detail

/// lhs = sum_{x,y} |g(y-x) f(x) - h(x-y) f(y)|^p, rhs = sum_z ||g(z)| - |h(-z)||^p * sum |f|^p,
/// with f extended by zero and the cell measure h^{2m}.
inline LemmaSides triangle_lemma_check(const GridFunction& f, const VectorFn& g, const VectorFn& hk, double p) {
  const auto& s = f.shape;
  double normp = 0.0;
  for (const auto& v : f.values) normp += std::pow(std::abs(v), p);
  struct Acc {
    const GridFunction& f;
    const VectorFn& g;
    const VectorFn& hk;
    double p, normp;
    double gz = 0, hz = 0, lhs = 0, rhs = 0;
    void begin(const std::array<double, 3>& z) {
      gz = g(z);
      hz = hk({-z[0], -z[1], -z[2]});
      rhs += std::pow(std::abs(std::abs(gz) - std::abs(hz)), p) * normp;
    }
    // y = x + z: g(y - x) f(x) - h(x - y) f(y)
    void term(long ix, long iy) {
      const cplx fx = ix >= 0 ? f.values[ix] : cplx(0.0);
      const cplx fy = iy >= 0 ? f.values[iy] : cplx(0.0);
      lhs += std::pow(std::abs(gz * fx - hz * fy), p);
    }
    void end() {}
  } acc{f, g, hk, p, normp};
  detail::for_each_displacement(s, acc);
  LemmaSides r;
  r.lhs = acc.lhs * s.cell() * s.cell();
  r.rhs = acc.rhs * s.cell() * s.cell();
  return r;
}

/// lhs = sum_{u,v} K(u-v) |f(u) - g(v)|^p, rhs = sum_z K(z) |(||f||_p - ||g||_p)|^p.
inline LemmaSides reduction_lemma_check(const GridFunction& f, const GridFunction& g, const VectorFn& K, double p) {
  if (!(f.shape == g.shape)) throw std::invalid_argument("reduction_lemma_check: grids differ");
  const auto& s = f.shape;
  double nf = 0.0, ng = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    nf += std::pow(std::abs(f.values[i]), p);
    ng += std::pow(std::abs(g.values[i]), p);
  }
  const double gap = std::pow(std::abs(std::pow(nf, 1.0 / p) - std::pow(ng, 1.0 / p)), p);
  struct Acc {
    const GridFunction& f;
    const GridFunction& g;
    const VectorFn& K;
    double p, gap;
    double kz = 0, lhs = 0, rhs = 0;
    void begin(const std::array<double, 3>& z) {
      kz = K(z);
      rhs += kz * gap;
    }
    // u = x + z, v = x: K(u - v) |f(u) - g(v)|^p
    void term(long iv, long iu) {
      if (kz == 0.0) return;
      const cplx fu = iu >= 0 ? f.values[iu] : cplx(0.0);
      const cplx gv = iv >= 0 ? g.values[iv] : cplx(0.0);
      lhs += kz * std::pow(std::abs(fu - gv), p);
    }
    void end() {}
  } acc{f, g, K, p, gap};
  detail::for_each_displacement(s, acc);
  LemmaSides r;
  r.lhs = acc.lhs * s.cell() * s.cell();
  r.rhs = acc.rhs * s.cell() * s.cell();
  return r;
}

// ---------------------------------------------------------------------------
// Spherical L^p reduction

struct RadialProfile {
  int n = 2;
  double p = 2.0;
  std::vector<double> r;
  std::vector<double> F;  // [int_{S^{n-1}} |f(r xi)|^p dxi]^{1/p}

  /// Cubic Lagrange interpolation on the uniform radial grid.
  double operator()(double x) const {
    const double dr = r[1] - r[0];
    if (x <= 0.0) return F[0];
    const double t = x / dr;
    long i = static_cast<long>(std::floor(t)) - 1;
    i = std::clamp(i, 0L, static_cast<long>(r.size()) - 4);
    double s = 0.0;
    for (int a = 0; a < 4; ++a) {
      double w = 1.0;
      for (int b = 0; b < 4; ++b)
        if (b != a) w *= (t - (i + b)) / static_cast<double>(a - b);
      s += w * F[i + a];
    }
    return s;
  }

  /// int_0^inf F(r)^p r^{n-1} dr: trapezoid rule with endpoint corrections at
  /// r = 0, where F^p is even and r^{n-1} F^p has odd derivatives for even n.
  double lp_norm_p() const {
    const double d = r[1] - r[0];
    double s = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) {
      const double a = std::pow(F[i - 1], p) * std::pow(r[i - 1], n - 1),
                   b = std::pow(F[i], p) * std::pow(r[i], n - 1);
      s += 0.5 * (a + b) * d;
    }
    if (n % 2 == 0) {
      const double E0 = std::pow(F[0], p), E1 = std::pow(F[1], p), E2 = std::pow(F[2], p);
      const double c2 = (16.0 * E1 - E2 - 15.0 * E0) / (12.0 * d * d);  // E = E0 + c2 r^2 + ...
      // first and third derivatives of r^{n-1} E at 0
      const double g1 = n == 2 ? E0 : 0.0;
      const double g3 = n == 2 ? 6.0 * c2 : (n == 4 ? 6.0 * E0 : 0.0);
      s += d * d / 12.0 * g1 - std::pow(d, 4) / 720.0 * g3;
    }
    return s;
  }
};

namespace detail {

/// Band-limited interpolant of a grid function at arbitrary points.
class SpectralInterpolant {
 public:
  explicit SpectralInterpolant(const GridFunction& f) : s_(f.shape), F_(fourier(f).values) {
    const double scale = std::pow(s_.dxi(), s_.n);
    for (std::size_t i = 0; i < F_.size(); ++i) {
      auto j = s_.unflatten(i);
      double w = scale;
      for (int a = 0; a < s_.n; ++a)
        if (s_.freq_index(j[a]) == -static_cast<long>(s_.N / 2)) w *= 0.5;  // Nyquist split
      F_[i] *= w;
    }
  }

  cplx operator()(const std::array<double, 3>& x) const {
    const std::size_t N = s_.N;
    std::array<std::vector<cplx>, 3> ph;
    for (int a = 0; a < s_.n; ++a) {
      ph[a].resize(N);
      for (std::size_t j = 0; j < N; ++j) {
        const long m = s_.freq_index(j);
        const double xi = s_.freq(j);
        // Nyquist as a cosine so real data interpolate to real values
        ph[a][j] = m == -static_cast<long>(N / 2) ? cplx(2.0 * std::cos(2.0 * kPi * xi * x[a]), 0.0)
                                                 : std::polar(1.0, 2.0 * kPi * xi * x[a]);
      }
    }
    cplx s = 0.0;
    std::size_t i = 0;
    if (s_.n == 1) {
      for (std::size_t j = 0; j < N; ++j) s += F_[i++] * ph[0][j];
    } else if (s_.n == 2) {
      for (std::size_t j0 = 0; j0 < N; ++j0) {
        cplx row = 0.0;
        for (std::size_t j1 = 0; j1 < N; ++j1) row += F_[i++] * ph[1][j1];
        s += row * ph[0][j0];
      }
    } else {
      for (std::size_t j0 = 0; j0 < N; ++j0) {
        cplx a0 = 0.0;
        for (std::size_t j1 = 0; j1 < N; ++j1) {
          cplx a1 = 0.0;
          for (std::size_t j2 = 0; j2 < N; ++j2) a1 += F_[i++] * ph[2][j2];
          a0 += a1 * ph[1][j1];
        }
        s += a0 * ph[0][j0];
      }
    }
    return s;
  }

 private:
  GridShape s_;
  std::vector<cplx> F_;
};

}  // namespace detail

/// F(r) = [int_{S^{n-1}} |f(r xi)|^p dxi]^{1/p} on r = 0, h/2, ..., L sqrt(n).
inline RadialProfile spherical_lp_reduction(const GridFunction& f, double p, int angularNodes = 0) {
  const int n = f.n();
  if (n < 2) throw AdmissibilityError("spherical_lp_reduction needs n >= 2");
  if (!(p >= 1.0)) throw AdmissibilityError("p >= 1");
  detail::SpectralInterpolant I(f);
  const double dr = 0.5 * f.h();
  const std::size_t nr = static_cast<std::size_t>(std::ceil(f.L() * std::sqrt(double(n)) / dr)) + 4;
  // full-sphere rule (the integrand need not be even)
  std::vector<std::array<double, 3>> dirs;
  std::vector<double> wts;
  const int M = angularNodes > 0 ? angularNodes : static_cast<int>(f.N());
  if (n == 2) {
    for (int j = 0; j < 2 * M; ++j) {
      const double th = kPi * j / M;
      dirs.push_back({std::cos(th), std::sin(th), 0.0});
      wts.push_back(kPi / M);
    }
  } else {
    std::vector<double> cx, cw;
    detail::gauss_legendre(M, -1.0, 1.0, cx, cw);
    for (int i = 0; i < M; ++i) {
      const double sn = std::sqrt(std::max(0.0, 1.0 - cx[i] * cx[i]));
      for (int j = 0; j < 2 * M; ++j) {
        const double ph = kPi * j / M;
        dirs.push_back({sn * std::cos(ph), sn * std::sin(ph), cx[i]});
        wts.push_back(cw[i] * kPi / M);
      }
    }
  }
  RadialProfile prof;
  prof.n = n;
  prof.p = p;
  for (std::size_t k = 0; k < nr; ++k) {
    const double r = k * dr;
    double s = 0.0;
    if (r == 0.0) {
      s = sphere_area(n) * std::pow(std::abs(I({0.0, 0.0, 0.0})), p);
    } else {
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        std::array<double, 3> x{r * dirs[d][0], r * dirs[d][1], r * dirs[d][2]};
        bool inside = true;
        for (int a = 0; a < n; ++a) inside = inside && std::abs(x[a]) <= f.L();
        if (inside) s += wts[d] * std::pow(std::abs(I(x)), p);
      }
    }
    prof.r.push_back(r);
    prof.F.push_back(std::pow(s, 1.0 / p));
  }
  return prof;
}

/// The radial function with the normalised angular L^p mean of f, F / sigma^{1/p}.
inline GridFunction radial_from_profile(const RadialProfile& prof, const GridShape& s) {
  GridFunction g(s);
  const double norm = std::pow(sphere_area(prof.n), -1.0 / prof.p);
  for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = norm * prof(g.radius(i));
  return g;
}

}  // namespace fracbed
