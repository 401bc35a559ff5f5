#pragma once

// Adaptive Gauss-Kronrod integration plus the singular kernel integrals built
// on it: sphere slices, psi kernels, the D_{p,beta} family, sine-power kernels
// and the complex-sphere average psi_lambda(rho).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "fracbed/specfun.hpp"

namespace fracbed {

struct QuadratureResult {
  double value = 0.0;
  double absError = 0.0;
  std::size_t panels = 0;
  bool converged = false;
  std::size_t evaluations = 0;
  std::string note;

  QuadratureResult& operator+=(const QuadratureResult& o) {
    value += o.value;
    absError += o.absError;
    panels += o.panels;
    evaluations += o.evaluations;
    converged = converged && o.converged;
    if (!o.note.empty()) note += (note.empty() ? "" : "; ") + o.note;
    return *this;
  }
  QuadratureResult& operator*=(double s) {
    value *= s;
    absError *= std::abs(s);
    return *this;
  }
  double relative_error() const {
    return value != 0.0 ? absError / std::abs(value) : absError;
  }
};

inline QuadratureResult operator*(double s, QuadratureResult r) {
  r *= s;
  return r;
}

struct QuadratureOptions {
  double relTol = 1e-8;
  double absTol = 0.0;
  std::size_t maxEvaluations = std::size_t{1} << 20;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair (QUADPACK qk15 abscissae and weights).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error, absValue;
  int segment;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gauss_kronrod15(F&& f, double a, double b, int segment) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    f1[j] = f(c - dx);
    f2[j] = f(c + dx);
    resk += kWgk[j] * (f1[j] + f2[j]);
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  resk *= h;
  resg *= h;
  resabs *= std::abs(h);
  resasc *= std::abs(h);
  double err = std::abs(resk - resg);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  if (floor > err) err = floor;
  if (!std::isfinite(resk)) err = kInf;
  return {a, b, resk, err, resabs, segment};
}

// One piece of the integration range in its own parameter u. Finite pieces use
// u = x; a piece running to +inf (-inf) from `anchor` uses x = anchor +/- u/(1-u)
// with u in [0, 1).
struct Segment {
  double a, b;
  int map;
  double anchor;
};

inline std::vector<Segment> segments_from_breaks(const std::vector<double>& breaks) {
  std::vector<Segment> out;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double lo = breaks[i], hi = breaks[i + 1];
    if (lo == hi) continue;
    const bool infLo = std::isinf(lo), infHi = std::isinf(hi);
    if (infLo && infHi) {
      out.push_back({0.0, 1.0, -1, 0.0});
      out.push_back({0.0, 1.0, +1, 0.0});
    } else if (infHi) {
      out.push_back({0.0, 1.0, +1, lo});
    } else if (infLo) {
      out.push_back({0.0, 1.0, -1, hi});
    } else {
      out.push_back({lo, hi, 0, 0.0});
    }
  }
  return out;
}

// Globally adaptive bisection: every piece shares one heap, so the error target
// applies to the total.
template <class F>
QuadratureResult adapt_segments(F& f, const std::vector<Segment>& segs, const QuadratureOptions& opt) {
  QuadratureResult out;
  if (segs.empty()) {
    out.converged = true;
    return out;
  }
  auto panel = [&](int k, double a, double b) {
    const Segment& sg = segs[k];
    if (sg.map == 0) return gauss_kronrod15(f, a, b, k);
    auto g = [&](double u) {
      const double w = 1.0 - u;
      if (w <= 0.0) return 0.0;
      return f(sg.anchor + sg.map * (u / w)) / (w * w);
    };
    return gauss_kronrod15(g, a, b, k);
  };
  std::priority_queue<Panel> heap;
  double total = 0.0, err = 0.0, absTotal = 0.0;
  std::size_t evals = 0;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    Panel p = panel(static_cast<int>(k), segs[k].a, segs[k].b);
    total += p.value;
    err += p.error;
    absTotal += p.absValue;
    evals += 15;
    heap.push(p);
  }
  double frozenErr = 0.0;
  std::vector<Panel> frozen;
  bool ok = false;
  while (true) {
    // Round-off floor: a cancelling integral (e.g. zero by symmetry) cannot beat it.
    const double noise = 100.0 * std::numeric_limits<double>::epsilon() * absTotal;
    const double target = std::max({opt.absTol, opt.relTol * std::abs(total), noise});
    if (err + frozenErr <= target) {
      ok = true;
      break;
    }
    if (heap.empty() || evals + 30 > opt.maxEvaluations) break;
    Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {
      // Panel too narrow to split: its error can no longer shrink.
      frozenErr += p.error;
      err -= p.error;
      frozen.push_back(p);
      continue;
    }
    Panel l = panel(p.segment, p.a, m);
    Panel r = panel(p.segment, m, p.b);
    evals += 30;
    total += l.value + r.value - p.value;
    err += l.error + r.error - p.error;
    absTotal += l.absValue + r.absValue - p.absValue;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum from the panels to drop accumulated update round-off.
  double sum = 0.0, esum = 0.0;
  for (const auto& p : frozen) {
    sum += p.value;
    esum += p.error;
  }
  std::size_t panels = frozen.size();
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
    ++panels;
  }
  out.value = sum;
  out.absError = esum;
  out.panels = panels;
  out.evaluations = evals;
  out.converged = ok && std::isfinite(sum);
  if (!out.converged) out.note = "panel budget exhausted before tolerance";
  return out;
}

}  // namespace detail

/// Integrates f over [a, b]; either endpoint may be infinite. Infinite ends are
/// mapped onto a finite parameter u with x = a + u/(1-u).
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b,
                                    const QuadratureOptions& opt = {}) {
  if (a > b) {
    auto r = integrate_adaptive(f, b, a, opt);
    r.value = -r.value;
    return r;
  }
  return detail::adapt_segments(f, detail::segments_from_breaks({a, b}), opt);
}

/// Integrates over consecutive pieces [b0,b1], [b1,b2], ... (increasing);
/// breakpoints are the declared singular locations and may include +-inf.
/// One error budget covers the whole range.
template <class F>
QuadratureResult integrate_pieces(F&& f, const std::vector<double>& breaks,
                                  const QuadratureOptions& opt = {}) {
  return detail::adapt_segments(f, detail::segments_from_breaks(breaks), opt);
}

/// Hurwitz zeta sum_{k>=0} (k+a)^{-s}, s > 1, a > 0, by Euler-Maclaurin.
inline double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0) || !(a > 0.0)) throw std::domain_error("hurwitz_zeta: need s > 1, a > 0");
  constexpr int kDirect = 12;
  double sum = 0.0;
  for (int k = 0; k < kDirect; ++k) sum += std::pow(a + k, -s);
  const double x = a + kDirect;
  sum += std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  // B_{2j}/(2j)!
  static constexpr std::array<double, 8> kB = {
      1.0 / 12.0,          -1.0 / 720.0,          1.0 / 30240.0,
      -1.0 / 1209600.0,    1.0 / 47900160.0,      -691.0 / 1307674368000.0,
      1.0 / 74724249600.0, -3617.0 / 10670622842880000.0};
  double rising = s;  // s (s+1) ... (s+2j-2)
  double xpow = std::pow(x, -s - 1.0);
  for (std::size_t j = 0; j < kB.size(); ++j) {
    sum += kB[j] * rising * xpow;
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    xpow /= x * x;
  }
  return sum;
}

/// scale, 4 scale, 16 scale, ... below `upper`: breakpoints that resolve a peak of
/// width `scale` sitting next to an endpoint.
inline std::vector<double> geometric_breaks(double scale, double upper, double start = 0.0) {
  std::vector<double> out;
  if (!(scale > 0.0)) return out;
  for (double x = scale; x < upper - start; x *= 4.0) out.push_back(start + x);
  return out;
}

// ---------------------------------------------------------------------------
// Sphere slicing

/// Integral over S^{n-1} (standard surface measure) of a function that depends
/// only on the polar angle theta in [0, pi] measured from a fixed axis. The
/// integrand receives (theta, pi - theta) so callers can form 1 -/+ cos theta
/// without cancellation. Breakpoints in theta may be supplied.
template <class G>
QuadratureResult sphere_angle_integral(int n, G&& g, const QuadratureOptions& opt = {},
                                       std::vector<double> thetaBreaks = {}) {
  if (n < 1) throw AdmissibilityError("n >= 1");
  if (n == 1) {
    QuadratureResult r;
    r.value = g(0.0, kPi) + g(kPi, 0.0);
    r.converged = std::isfinite(r.value);
    r.panels = 1;
    r.evaluations = 2;
    return r;
  }
  const double area = sphere_area(n - 1);
  // Lower half integrated in theta, upper half in phi = pi - theta so both
  // poles sit at an exact zero of the integration variable.
  std::vector<double> lo{0.0}, hi{0.0};
  for (double t : thetaBreaks) {
    if (t > 0.0 && t < 0.5 * kPi) lo.push_back(t);
    if (t > 0.5 * kPi && t < kPi) hi.push_back(kPi - t);
  }
  std::sort(lo.begin(), lo.end());
  std::sort(hi.begin(), hi.end());
  lo.push_back(0.5 * kPi);
  hi.push_back(0.5 * kPi);
  const int k = n - 2;
  auto lower = [&](double th) {
    return g(th, kPi - th) * (k == 0 ? 1.0 : std::pow(std::sin(th), k));
  };
  auto upper = [&](double ph) {
    return g(kPi - ph, ph) * (k == 0 ? 1.0 : std::pow(std::sin(ph), k));
  };
  QuadratureOptions half = opt;
  half.maxEvaluations = opt.maxEvaluations / 2;
  auto r = integrate_pieces(lower, lo, half);
  r += integrate_pieces(upper, hi, half);
  r *= area;
  return r;
}

/// int_{S^{n-1}} g(xi_1) dxi.
template <class G>
QuadratureResult sphere_slice_integral(int n, G&& g, const QuadratureOptions& opt = {}) {
  return sphere_angle_integral(
      n, [&](double th, double) { return g(std::cos(th)); }, opt);
}

// ---------------------------------------------------------------------------
// psi kernel and D_{p,beta}

namespace detail {

// psi on the multiplicative group in the log variable s = ln t:
//   t + 1/t - 2 cos theta = 4 sinh^2(s/2) + 4 sin^2(theta/2).
inline QuadratureResult psi_log(int n, double exponent, double s, const QuadratureOptions& opt) {
  const double sh = 2.0 * std::sinh(0.5 * std::abs(s));
  const double sh2 = sh * sh;
  if (n == 1) {
    QuadratureResult r;
    r.value = std::pow(sh2, -exponent) + std::pow(sh2 + 4.0, -exponent);
    r.converged = std::isfinite(r.value);
    r.panels = 1;
    return r;
  }
  if (s == 0.0) {
    QuadratureResult r;
    r.value = kInf;
    r.absError = kInf;
    r.converged = false;
    r.note = "psi diverges at t = 1";
    return r;
  }
  auto g = [&](double th, double ph) {
    double s2 = th < ph ? std::sin(0.5 * th) : std::cos(0.5 * ph);
    return std::pow(sh2 + 4.0 * s2 * s2, -exponent);
  };
  return sphere_angle_integral(n, g, opt, geometric_breaks(sh, 0.5 * kPi));
}

}  // namespace detail

/// psi(t) = int_{S^{n-1}} [t + 1/t - 2 xi_1]^{-(n+p beta)/2} dxi. Inversion symmetric.
inline QuadratureResult psi_kernel(int n, double p, double beta, double t,
                                   const QuadratureOptions& opt = {}) {
  if (!(t > 0.0)) throw std::domain_error("psi_kernel: t must be positive");
  return detail::psi_log(n, 0.5 * (n + p * beta), std::log(t), opt);
}

/// D_{p,beta} through the multiplicative-group form
///   int_{R+} |t^{lambda/2} - t^{-lambda/2}|^p psi(t) dt/t,
/// evaluated as twice the t < 1 half in the variable s = -ln t. `halfOnly`
/// returns one half (t in (0,1) or, equivalently by inversion, t > 1).
inline QuadratureResult D_pbeta_mellin(int n, double p, double beta,
                                       const QuadratureOptions& opt = {},
                                       bool halfOnly = false, bool upperHalf = false) {
  auto P = Params::lemma1(n, p, beta);
  const double lam = P.lambda;
  const double expo = 0.5 * (n + p * beta);
  QuadratureOptions inner = opt;
  inner.relTol = opt.relTol * 0.05;
  inner.maxEvaluations = 1 << 16;
  bool innerOk = true;
  auto f = [&](double s) {
    if (s == 0.0) return 0.0;
    const double sg = upperHalf ? -s : s;  // t = e^{-sg}
    auto ps = detail::psi_log(n, expo, sg, inner);
    innerOk = innerOk && ps.converged;
    if (!(ps.value > 0.0)) return 0.0;
    // |2 sinh(lambda s/2)|^p in log form so the far tail cannot overflow
    const double logFactor = p * (0.5 * lam * s + std::log(-std::expm1(-lam * s)));
    return std::exp(logFactor + std::log(ps.value));
  };
  auto r = integrate_pieces(f, {0.0, 0.25, 1.0, 4.0, kInf}, opt);
  if (!innerOk) {
    r.converged = false;
    r.note += "inner psi quadrature did not converge";
  }
  if (!halfOnly) r *= 2.0;
  return r;
}

namespace detail {

// |1 - |x|^{-lambda}|^p where |x|^2 = 1 + d and d = |x|^2 - 1, with the exact
// small-|x| form xsq supplied for the region near the origin.
inline double hardy_factor(double lam, double p, double d, double xsq) {
  double logx2 = d > -0.5 ? std::log1p(d) : std::log(xsq);
  return std::pow(std::abs(std::expm1(-0.5 * lam * logx2)), p);
}

}  // namespace detail

/// D_{p,beta} = int_{R^n} |1 - |x|^{-lambda}|^p |x - eta|^{-n-p beta} dx evaluated in
/// polar coordinates centred at eta (x = eta + rho*omega). Shares no kernel code
/// with the multiplicative-group path.
inline QuadratureResult D_pbeta_direct(int n, double p, double beta,
                                       const QuadratureOptions& opt = {}) {
  auto P = Params::lemma1(n, p, beta);
  const double lam = P.lambda;
  QuadratureOptions inner = opt;
  inner.relTol = opt.relTol * 0.05;
  inner.maxEvaluations = 1 << 16;
  bool innerOk = true;
  // Omega(rho) = int_{S^{n-1}} |1 - |eta + rho omega|^{-lambda}|^p d omega, v = |1 - rho|.
  auto omega = [&](double rho, double v) {
    auto g = [&](double th, double ph) {
      // cos(theta) = -cos(phi); |x|^2 - 1 = rho (rho + 2 cos theta)
      const double c = th < ph ? std::cos(th) : -std::cos(ph);
      const double d = rho * (rho + 2.0 * c);
      const double sh = th < ph ? std::cos(0.5 * th) : std::sin(0.5 * ph);  // cos(theta/2)
      const double xsq = v * v + 4.0 * rho * sh * sh;
      return detail::hardy_factor(lam, p, d, xsq);
    };
    // |x| = 1 on the cone cos(theta) = -rho/2, where |.|^p has a kink for small p
    std::vector<double> br;
    for (double x : geometric_breaks(v, 0.5 * kPi)) br.push_back(kPi - x);
    if (rho < 2.0) br.push_back(std::acos(-0.5 * rho));
    auto r = sphere_angle_integral(n, g, inner, br);
    innerOk = innerOk && r.converged;
    return r.value;
  };
  const double e = -1.0 - p * beta;
  auto near0 = [&](double rho) { return rho == 0.0 ? 0.0 : std::pow(rho, e) * omega(rho, 1.0 - rho); };
  auto below1 = [&](double v) { return std::pow(1.0 - v, e) * omega(1.0 - v, v); };
  auto above1 = [&](double v) { return std::pow(1.0 + v, e) * omega(1.0 + v, v); };
  auto far = [&](double rho) { return std::pow(rho, e) * omega(rho, rho - 1.0); };
  QuadratureOptions quarter = opt;
  quarter.maxEvaluations = opt.maxEvaluations / 4;
  auto r = integrate_pieces(near0, {0.0, 0.05, 0.5}, quarter);
  r += integrate_pieces(below1, {0.0, 0.05, 0.5}, quarter);
  r += integrate_pieces(above1, {0.0, 0.05, 1.0}, quarter);
  // rho = 2 e^x turns the algebraic tail into an exponentially decaying one
  r += integrate_adaptive([&](double x) {
        if (x > 300.0) return 0.0;
        const double rho = 2.0 * std::exp(x);
        return rho * far(rho);
      },
                          0.0, kInf, quarter);
  if (!innerOk) {
    r.converged = false;
    r.note += "inner angular quadrature did not converge";
  }
  return r;
}

/// Arguments handed to a rotation-invariant two-point kernel K(x, y).
struct KernelArgs {
  double rx;        // |x|
  double ry;        // |y|
  double cosAngle;  // x.y / (|x||y|)
  double distSq;    // |x - y|^2, formed without cancellation
};

/// Stein-Weiss constant D_{p,gamma} = int |1 - |x|^{-lambda}|^p K(x, eta) dx, lambda = (n-gamma)/p,
/// for a symmetric, rotation-invariant kernel homogeneous of degree -n-gamma.
/// Throws AdmissibilityError when the homogeneity spot-check fails; divergence is
/// reported through `converged`.
template <class K>
QuadratureResult sw_constant(K&& kernel, int n, double p, double gamma,
                             const QuadratureOptions& opt = {}) {
  auto P = Params::stein_weiss(n, p, gamma);
  const double lam = P.lambda;
  // Homogeneity spot-check at a few generic points.
  const std::array<std::array<double, 3>, 3> pts = {{{0.7, 1.3, 0.2}, {2.0, 0.5, -0.6}, {1.1, 0.9, 0.95}}};
  for (const auto& pt : pts) {
    for (double dil : {0.5, 3.0}) {
      auto args = [&](double a, double b, double c) {
        return KernelArgs{a, b, c, (a - b) * (a - b) + 2.0 * a * b * (1.0 - c)};
      };
      const double k1 = kernel(args(pt[0], pt[1], pt[2]));
      const double k2 = kernel(args(dil * pt[0], dil * pt[1], pt[2]));
      const double want = std::pow(dil, -n - gamma) * k1;
      if (!(std::abs(k2 - want) <= 1e-9 * std::abs(want)))
        throw AdmissibilityError("kernel homogeneous of degree -n-gamma");
    }
  }
  QuadratureOptions inner = opt;
  inner.relTol = opt.relTol * 0.05;
  inner.maxEvaluations = 1 << 16;
  bool innerOk = true;
  // x = r xi, eta on the axis; |x - eta|^2 = v^2 + 4 r sin^2(theta/2), v = |r - 1|.
  auto radial = [&](double r, double v) {
    if (r == 0.0) return 0.0;
    auto g = [&](double th, double ph) {
      const double c = th < ph ? std::cos(th) : -std::cos(ph);
      const double s = th < ph ? std::sin(0.5 * th) : std::cos(0.5 * ph);
      return kernel(KernelArgs{r, 1.0, c, v * v + 4.0 * r * s * s});
    };
    auto ang = sphere_angle_integral(n, g, inner, geometric_breaks(v, 0.5 * kPi));
    innerOk = innerOk && ang.converged;
    const double hardy = std::pow(std::abs(std::expm1(-lam * std::log(r))), p);
    return std::pow(r, n - 1) * hardy * ang.value;
  };
  QuadratureOptions quarter = opt;
  quarter.maxEvaluations = opt.maxEvaluations / 4;
  auto res = integrate_pieces([&](double r) { return radial(r, 1.0 - r); }, {0.0, 0.05, 0.5}, quarter);
  res += integrate_pieces([&](double v) { return radial(1.0 - v, v); }, {0.0, 0.05, 0.5}, quarter);
  res += integrate_pieces([&](double v) { return radial(1.0 + v, v); }, {0.0, 0.05, 1.0}, quarter);
  res += integrate_adaptive([&](double x) {
        if (x > 300.0) return 0.0;
        const double r = 2.0 * std::exp(x);
        return r * radial(r, r - 1.0);
      },
                            0.0, kInf, quarter);
  if (!innerOk) {
    res.converged = false;
    res.note += "inner angular quadrature did not converge";
  }
  return res;
}

// ---------------------------------------------------------------------------
// Sine-power kernels

namespace detail {

// int_{R^n} |2 sin(pi w.eta)|^q |w|^{-n-a} dw for 0 < a < q. Slicing
// orthogonally to eta leaves C_n int_R |2 sin(pi s)|^q |s|^{-1-a} ds with
// C_n = pi^{(n-1)/2} Gamma((1+a)/2)/Gamma((n+a)/2); the line integral is folded
// onto one period with the Hurwitz zeta function.
inline QuadratureResult sine_power_kernel(int n, double q, double a, const QuadratureOptions& opt) {
  if (n < 1) throw AdmissibilityError("n >= 1");
  QuadratureResult bad;
  if (!(a > 0.0 && a < q)) {
    bad.value = kInf;
    bad.absError = kInf;
    bad.converged = false;
    bad.note = "kernel integral diverges unless 0 < exponent < q";
    return bad;
  }
  const double logC = 0.5 * (n - 1) * std::log(kPi) + log_gamma(0.5 * (1.0 + a)) -
                      log_gamma(0.5 * (n + a));
  auto f = [&](double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double s = std::abs(2.0 * std::sin(kPi * u));
    return std::pow(s, q) * hurwitz_zeta(1.0 + a, u);
  };
  auto r = integrate_pieces(f, {0.0, 0.5, 1.0}, opt);
  r *= 2.0 * std::exp(logC);
  return r;
}

}  // namespace detail

/// int_{R^n} |e^{2 pi i w.eta} - 1|^{p'} |w|^{-n-p' beta} dw.
inline QuadratureResult pitt_numerator(int n, double pPrime, double beta,
                                       const QuadratureOptions& opt = {}) {
  if (!(beta > 0.0 && beta < 1.0)) throw AdmissibilityError("beta in (0,1)");
  if (!(pPrime >= 1.0)) throw AdmissibilityError("p' >= 1");
  return detail::sine_power_kernel(n, pPrime, pPrime * beta, opt);
}

/// c = int_{R^n} |x|^{-n-lambda} |Delta(x.eta)|^q dx with Delta(s) = e^{i pi s} - e^{-i pi s}.
inline QuadratureResult delta_kernel_constant(int n, double q, double lambda,
                                              const QuadratureOptions& opt = {}) {
  return detail::sine_power_kernel(n, q, lambda, opt);
}

// ---------------------------------------------------------------------------
// Complex-sphere average

/// psi_lambda(rho) = int_{dB_n} |rho - zeta_1|^{-lambda} dzeta, normalised measure on
/// the unit sphere of C^n. Divergent at rho = 1 when lambda >= n.
inline QuadratureResult psi_lambda_rho(int n, double lambda, double rho,
                                       const QuadratureOptions& opt = {}) {
  if (n < 1) throw AdmissibilityError("n >= 1");
  if (!(rho >= 1.0)) throw AdmissibilityError("rho >= 1");
  if (rho == 1.0 && lambda >= n) {
    QuadratureResult r;
    r.value = kInf;
    r.absError = kInf;
    r.converged = false;
    r.note = "psi_lambda(1) diverges for lambda >= n";
    return r;
  }
  QuadratureOptions inner = opt;
  inner.relTol = opt.relTol * 0.05;
  inner.maxEvaluations = 1 << 16;
  bool innerOk = true;
  // Circle average of |rho - r e^{i phi}|^{-lambda}; v = rho - r >= 0.
  auto circle = [&](double r, double v) {
    auto g = [&](double ph) {
      const double s = std::sin(0.5 * ph);
      return std::pow(v * v + 4.0 * rho * r * s * s, -0.5 * lambda);
    };
    std::vector<double> br{0.0};
    for (double x : geometric_breaks(v, kPi)) br.push_back(x);
    br.push_back(kPi);
    auto res = integrate_pieces(g, br, inner);
    innerOk = innerOk && res.converged;
    return res.value / kPi;
  };
  if (n == 1) {
    auto r = QuadratureResult{};
    r.value = circle(1.0, rho - 1.0);
    r.converged = innerOk;
    r.panels = 1;
    return r;
  }
  // zeta_1 has density 2(n-1) r (1 - r^2)^{n-2} dr x uniform angle on the disc.
  auto f = [&](double w) {  // w = 1 - r
    const double r = 1.0 - w;
    const double dens = 2.0 * (n - 1) * r * std::pow(w * (2.0 - w), n - 2);
    return dens * circle(r, (rho - 1.0) + w);
  };
  auto res = integrate_pieces(f, {0.0, 0.05, 0.5, 1.0}, opt);
  if (!innerOk) {
    res.converged = false;
    res.note += "inner circle quadrature did not converge";
  }
  return res;
}

}  // namespace fracbed
