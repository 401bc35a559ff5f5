#pragma once

// Besov-type double integrals computed through the difference variable w:
//   int int K(x - y) G(x, y) dx dy = int |w|^{-n-kappa} Phi(w) dw,
// with Phi(w) an x-integral of grid values shifted spectrally by w. The radial
// part runs in s = ln|w| by adaptive quadrature, the angular part on a fixed
// rule, and both ends are closed analytically.

#include <algorithm>
#include <atomic>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <thread>
#include <vector>

#include "fracbed/grid.hpp"
#include "fracbed/quadrature.hpp"
#include "fracbed/specfun.hpp"

namespace fracbed {

namespace detail {

/// Gauss-Legendre nodes and weights on [a, b] (Newton on P_m).
inline void gauss_legendre(int m, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  x.assign(m, 0.0);
  w.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = 0.5 * (a + b) - 0.5 * (b - a) * z;
    w[i] = (b - a) / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace detail

/// Unit directions covering S^{n-1} modulo w -> -w, with weights summing to
/// the full sphere area (the integrands used here are even in w).
struct AngularRule {
  std::vector<std::array<double, 3>> dirs;
  std::vector<double> weights;

  static AngularRule half_sphere(int n, int nodes) {
    AngularRule r;
    if (n == 1) {
      r.dirs.push_back({1.0, 0.0, 0.0});
      r.weights.push_back(2.0);
      return r;
    }
    nodes = std::max(nodes, 1);
    if (n == 2) {
      for (int j = 0; j < nodes; ++j) {
        const double th = kPi * (j + 0.5) / nodes;
        r.dirs.push_back({std::cos(th), std::sin(th), 0.0});
        r.weights.push_back(2.0 * kPi / nodes);
      }
      return r;
    }
    // n = 3: upper hemisphere, Gauss-Legendre in cos(theta) times uniform azimuth
    std::vector<double> cx, cw;
    detail::gauss_legendre(nodes, 0.0, 1.0, cx, cw);
    const int az = 2 * nodes;
    for (int i = 0; i < nodes; ++i) {
      const double c = cx[i], s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int j = 0; j < az; ++j) {
        const double ph = 2.0 * kPi * (j + 0.5) / az;
        r.dirs.push_back({s * std::cos(ph), s * std::sin(ph), c});
        r.weights.push_back(2.0 * cw[i] * 2.0 * kPi / az);
      }
    }
    return r;
  }
};

/// Band-limited shifts of one or more grid functions sharing a shape.
class ShiftEngine {
 public:
  explicit ShiftEngine(const std::vector<const GridFunction*>& fs) : shape_(fs.at(0)->shape) {
    for (const auto* f : fs) {
      if (!(f->shape == shape_)) throw std::invalid_argument("ShiftEngine: grids differ");
      spectra_.push_back(fourier(*f).values);
      spatial_.push_back(f->values);
    }
    xi_.resize(shape_.N);
    for (std::size_t j = 0; j < shape_.N; ++j) {
      // The Nyquist bin is treated as frequency 0 so real data stay real under shifts.
      xi_[j] = shape_.freq_index(j) == -static_cast<long>(shape_.N / 2) ? 0.0 : shape_.freq(j);
    }
  }

  const GridShape& shape() const { return shape_; }
  const std::vector<cplx>& values(int c) const { return spatial_[c]; }

  /// f_c(x + w) - f_c(x) on the grid, using e^{i t} - 1 = 2 i sin(t/2) e^{i t/2}.
  void difference(int c, const std::array<double, 3>& w, std::vector<cplx>& out) const {
    transform(c, w, out, true);
  }
  /// f_c(x + w) on the grid.
  void shifted(int c, const std::array<double, 3>& w, std::vector<cplx>& out) const {
    transform(c, w, out, false);
  }

 private:
  void transform(int c, const std::array<double, 3>& w, std::vector<cplx>& out, bool diff) const {
    const auto& F = spectra_[c];
    out.resize(F.size());
    const std::size_t N = shape_.N;
    const int n = shape_.n;
    // per-axis factors e_a = e^{2 pi i w_a xi} and d_a = e_a - 1 (cancellation-free)
    std::array<std::vector<cplx>, 3> e, d;
    for (int a = 0; a < n; ++a) {
      e[a].resize(N);
      d[a].resize(N);
      for (std::size_t j = 0; j < N; ++j) {
        const double half = kPi * w[a] * xi_[j];
        const cplx rot = std::polar(1.0, half);
        d[a][j] = cplx(0.0, 2.0 * std::sin(half)) * rot;
        e[a][j] = rot * rot;
      }
    }
    const double cell = shape_.spectral_cell();
    auto sign = [](std::size_t j) { return (j & 1u) ? -1.0 : 1.0; };
    std::size_t i = 0;
    if (n == 1) {
      for (std::size_t j = 0; j < N; ++j, ++i) out[i] = F[i] * (diff ? d[0][j] : e[0][j]) * (cell * sign(j));
    } else if (n == 2) {
      for (std::size_t j0 = 0; j0 < N; ++j0)
        for (std::size_t j1 = 0; j1 < N; ++j1, ++i) {
          // e0 e1 - 1 = d0 + d1 + d0 d1
          const cplx m = diff ? d[0][j0] + d[1][j1] + d[0][j0] * d[1][j1] : e[0][j0] * e[1][j1];
          out[i] = F[i] * m * (cell * sign(j0 + j1));
        }
    } else {
      for (std::size_t j0 = 0; j0 < N; ++j0)
        for (std::size_t j1 = 0; j1 < N; ++j1) {
          const cplx d01 = d[0][j0] + d[1][j1] + d[0][j0] * d[1][j1];
          const cplx e01 = e[0][j0] * e[1][j1];
          for (std::size_t j2 = 0; j2 < N; ++j2, ++i) {
            // e01 e2 - 1 = d01 + d2 + d01 d2
            const cplx m = diff ? d01 + d[2][j2] + d01 * d[2][j2] : e01 * e[2][j2];
            out[i] = F[i] * m * (cell * sign(j0 + j1 + j2));
          }
        }
    }
    detail::fft_inplace(shape_, out, FFTW_BACKWARD);
  }

  GridShape shape_;
  std::vector<std::vector<cplx>> spectra_;
  std::vector<std::vector<cplx>> spatial_;
  std::vector<double> xi_;
};

/// Threads used for angular nodes (0 or less: hardware concurrency).
inline std::atomic<int>& worker_setting() {
  static std::atomic<int> v{0};
  return v;
}
inline int worker_count() {
  const int v = worker_setting().load();
  if (v > 0) return v;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

struct ShellOptions {
  int angularNodes = 16;
  double radialTol = 1e-5;
  double rMin = 0.0;  // 0: h/64
  double rMax = 0.0;  // 0: L
};

/// Breakdown of a shell-decomposed integral int_0^inf r^{-1-kappa} PhiAvg(r) dr.
struct ShellIntegral {
  QuadratureResult total;
  double inner = 0.0;      // int_0^{rMin}, power-law model
  double middle = 0.0;     // adaptive part
  double outer = 0.0;      // int_{rMax}^inf with PhiAvg = tailValue
  double fittedPower = 0.0;  // local exponent of PhiAvg at rMin
  std::size_t phiEvaluations = 0;
};

/// int_0^inf r^{-1-kappa} PhiAvg(r) dr, where PhiAvg(r) integrates the even
/// function Phi(w) over |w| = r (sphere area included). Below rMin PhiAvg is
/// modelled as C r^a with a fitted on rMin/2 and rMin; above rMax it is held
/// at PhiAvg(rMax), whose distance from the expected limit tailValue is
/// charged to the error.
///
/// makePhi() returns an independent callable w -> Phi(w); one is made per
/// worker thread and directions are reduced in a fixed order. The general form
/// takes the angular rule and the map (direction, r) -> w, so non-isotropic
/// dilations can use it; h and L set the default rMin and rMax.
template <class MakePhi, class MapPoint>
ShellIntegral shell_integral(MakePhi&& makePhi, const AngularRule& rule, MapPoint&& mapPoint, double h, double L,
                             double kappa, double tailValue, const ShellOptions& opt) {
  const std::size_t nd = rule.dirs.size();
  const std::size_t jobs = std::min<std::size_t>(nd, static_cast<std::size_t>(std::max(1, worker_count())));
  using PhiT = decltype(makePhi());
  std::vector<PhiT> phis;
  for (std::size_t j = 0; j < jobs; ++j) phis.push_back(makePhi());
  std::vector<double> vals(nd);
  ShellIntegral out;
  auto avg = [&](double r) {
    auto run = [&](std::size_t j) {
      for (std::size_t d = j; d < nd; d += jobs) {
        vals[d] = phis[j](mapPoint(rule.dirs[d], r));
      }
    };
    if (jobs == 1) {
      run(0);
    } else {
      std::vector<std::thread> th;
      for (std::size_t j = 1; j < jobs; ++j) th.emplace_back(run, j);
      run(0);
      for (auto& t : th) t.join();
    }
    double s = 0.0;
    for (std::size_t d = 0; d < nd; ++d) s += rule.weights[d] * vals[d];
    ++out.phiEvaluations;
    return s;
  };
  const double rMin = opt.rMin > 0.0 ? opt.rMin : h / 64.0;
  const double rMax = opt.rMax > 0.0 ? opt.rMax : L;

  const double p0 = avg(rMin), pHalf = avg(0.5 * rMin);
  double a = (p0 > 0.0 && pHalf > 0.0) ? std::log2(p0 / pHalf) : 0.0;
  out.fittedPower = a;
  double innerErr = 0.0;
  if (p0 > 0.0) {
    if (!(a > kappa)) {
      out.inner = kInf;
      innerErr = kInf;
    } else {
      out.inner = p0 * std::pow(rMin, -kappa) / (a - kappa);
      // sensitivity to the fitted exponent: one shell further in changes a
      const double pQ = avg(0.25 * rMin);
      const double a2 = (pHalf > 0.0 && pQ > 0.0) ? std::log2(pHalf / pQ) : a;
      innerErr = std::abs(out.inner - p0 * std::pow(rMin, -kappa) / (std::max(a2, kappa + 1e-3) - kappa));
    }
  }

  auto f = [&](double s) {
    const double r = std::exp(s);
    return std::exp(-kappa * s) * avg(r);
  };
  std::vector<double> br{std::log(rMin)};
  for (double b : {std::log(h), 0.0, std::log(0.25 * rMax)})
    if (b > br.back() && b < std::log(rMax)) br.push_back(b);
  br.push_back(std::log(rMax));
  QuadratureOptions qo{opt.radialTol, 0.0, std::size_t{1} << 14};
  auto mid = integrate_pieces(f, br, qo);
  out.middle = mid.value;

  // beyond rMax PhiAvg is held at its measured value; the expected limit
  // (tailValue) only enters the error estimate
  const double pMax = avg(rMax);
  out.outer = pMax * std::pow(rMax, -kappa) / kappa;
  const double outerErr = std::abs(pMax - tailValue) * std::pow(rMax, -kappa) / kappa;

  out.total = mid;
  out.total.value = out.inner + out.middle + out.outer;
  out.total.absError = mid.absError + innerErr + outerErr;
  out.total.converged = mid.converged && std::isfinite(out.total.value);
  if (!std::isfinite(out.inner)) out.total.note = "small-|w| model not integrable";
  return out;
}

template <class MakePhi>
ShellIntegral shell_integral(MakePhi&& makePhi, const GridShape& shape, double kappa, double tailValue,
                             const ShellOptions& opt) {
  const AngularRule rule = AngularRule::half_sphere(shape.n, opt.angularNodes);
  auto linear = [](const std::array<double, 3>& d, double r) {
    return std::array<double, 3>{r * d[0], r * d[1], r * d[2]};
  };
  return shell_integral(std::forward<MakePhi>(makePhi), rule, linear, shape.h(), shape.L, kappa, tailValue, opt);
}

// ---------------------------------------------------------------------------
// Besov seminorm and its spectral form

/// int int |f(x)-f(y)|^p / |x-y|^{n+p beta} dx dy.
inline QuadratureResult besov_seminorm(const GridFunction& f, double p, double beta, int angularNodes = 16,
                                       double radialTol = 1e-5, ShellIntegral* detailOut = nullptr) {
  Params::besov(f.n(), p, beta);
  ShiftEngine eng({&f});
  const double cell = f.shape.cell();
  auto phi = [&]() {
    return [&, buf = std::vector<cplx>()](const std::array<double, 3>& w) mutable {
      eng.difference(0, w, buf);
      double s = 0.0;
      if (p == 2.0)
        for (const auto& v : buf) s += std::norm(v);
      else
        for (const auto& v : buf) s += std::pow(std::abs(v), p);
      return s * cell;
    };
  };
  const double tail = sphere_area(f.n()) * 2.0 * std::pow(lp_norm(f, p), p);
  ShellOptions opt;
  opt.angularNodes = angularNodes;
  opt.radialTol = radialTol;
  auto res = shell_integral(phi, f.shape, p * beta, tail, opt);
  if (detailOut) *detailOut = res;
  return res.total;
}

/// Vector-valued variant: |F(x)-F(y)| is the Euclidean norm over components.
inline QuadratureResult besov_seminorm_vector(const std::vector<const GridFunction*>& comps, double p,
                                              double beta, int angularNodes = 16, double radialTol = 1e-5) {
  const GridShape& sh = comps.at(0)->shape;
  Params::besov(sh.n, p, beta);
  ShiftEngine eng(comps);
  auto phi = [&]() {
    return [&, buf = std::vector<cplx>(), acc = std::vector<double>(sh.size())](
               const std::array<double, 3>& w) mutable {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t c = 0; c < comps.size(); ++c) {
        eng.difference(static_cast<int>(c), w, buf);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += std::norm(buf[i]);
      }
      double s = 0.0;
      for (double v : acc) s += p == 2.0 ? v : std::pow(v, 0.5 * p);
      return s * sh.cell();
    };
  };
  double normp = 0.0;
  {
    std::vector<double> m(sh.size(), 0.0);
    for (const auto* c : comps)
      for (std::size_t i = 0; i < m.size(); ++i) m[i] += std::norm(c->values[i]);
    for (double v : m) normp += std::pow(v, 0.5 * p);
    normp *= sh.cell();
  }
  ShellOptions opt;
  opt.angularNodes = angularNodes;
  opt.radialTol = radialTol;
  return shell_integral(phi, sh, p * beta, sphere_area(sh.n) * 2.0 * normp, opt).total;
}

namespace detail {

// int |xi|^{e} v(|F^(xi)|) dxi over the spectral grid, with the lattice rule
// corrected for the kink of |xi|^e at the origin. The zero mode itself is
// not trusted (it carries the mean of non-decaying data).
template <class V>
double spectral_moment(const SpectralFunction& F, double e, V&& v) {
  const auto& sh = F.shape;
  GridShape c{sh.n, sh.N, 0.5 * static_cast<double>(sh.N) * sh.dxi()};  // centred lattice, spacing dxi
  auto val = [&](std::size_t i) {
    auto k = c.unflatten(i);
    for (int a = 0; a < sh.n; ++a) k[a] = (k[a] + sh.N / 2) % sh.N;
    return v(std::abs(F.values[sh.flatten(k)]));
  };
  return singular_weighted_sum(c, val, -e, 1, true);
}

}  // namespace detail

/// D_beta int |xi|^{2 beta} |f^(xi)|^2 dxi on the spectral grid.
inline double besov_spectral(const GridFunction& f, double beta) {
  Params::besov(f.n(), 2.0, beta);
  const double D = aronszajn_smith_Dbeta(f.n(), beta).value;
  return D * detail::spectral_moment(fourier(f), 2.0 * beta, [](double a) { return a * a; });
}

// ---------------------------------------------------------------------------
// Hausdorff-Young form

struct HausdorffYoungForm {
  QuadratureResult lhs;       // Besov seminorm
  double rhs = 0.0;           // c [int (|xi|^beta |f^|)^{p'}]^{p/p'}, kernel exponent p
  double rhsDualKernel = 0.0; // same with kernel exponent p' (reported only)
  double constant = 0.0;      // c_hy^p * K_p
  double ratio = 0.0;         // lhs / rhs
  bool dualKernelFinite = true;
};

inline HausdorffYoungForm hausdorff_young_form(const GridFunction& f, double p, double beta, int angularNodes = 16,
                                               double radialTol = 1e-5) {
  auto P = Params::hausdorff_young(f.n(), p, beta);
  const int n = f.n();
  const double pp = P.pPrime;
  HausdorffYoungForm r;
  r.lhs = besov_seminorm(f, p, beta, angularNodes, radialTol);
  const double chy = hausdorff_young_constant(n, p).value;
  auto Kp = pitt_numerator(n, p, beta, {1e-12, 0.0, 1u << 20});
  r.constant = std::pow(chy, p) * Kp.value;
  const double m = detail::spectral_moment(fourier(f), beta * pp, [pp](double a) { return std::pow(a, pp); });
  const double moment = std::pow(m, p / pp);
  r.rhs = r.constant * moment;
  auto Kpp = delta_kernel_constant(n, pp, p * beta, {1e-12, 0.0, 1u << 20});
  r.dualKernelFinite = Kpp.converged;
  r.rhsDualKernel = Kpp.converged ? std::pow(chy, p) * Kpp.value * moment : kInf;
  r.ratio = r.lhs.value / r.rhs;
  return r;
}

// ---------------------------------------------------------------------------
// Autocorrelation and bilinear forms

/// (f * f~)(x) with f~(x) = f(-x), via |f^|^2.
inline GridFunction autocorrelation(const GridFunction& f) {
  auto F = fourier(f);
  for (auto& v : F.values) v = std::norm(v);
  return inverse_fourier(F);
}

struct BilinearForm {
  QuadratureResult lhs;
  QuadratureResult rhs;
  double constant = 0.0;
  double imagPart = 0.0;  // Thm 6 only: imaginary part of the spectral sum
};

/// lhs = int int |x-y|^{-n-lambda} |f(x) grad f(y) - f(y) grad f(x)| dx dy,
/// rhs = 2 int |x|^{-n-lambda} |grad (f * f~)(x)| dx.
inline BilinearForm bilinear_thm4(const GridFunction& f, double lambda, int angularNodes = 16,
                                  double radialTol = 1e-5) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw AdmissibilityError("lambda in (0,1)");
  if (!f.is_real(1e-12)) throw AdmissibilityError("f real-valued");
  const int n = f.n();
  std::vector<GridFunction> grads;
  for (int a = 0; a < n; ++a) grads.push_back(partial_derivative(f, a));
  std::vector<const GridFunction*> comps{&f};
  for (const auto& g : grads) comps.push_back(&g);
  ShiftEngine eng(comps);
  const double cell = f.shape.cell();
  auto phi = [&]() {
    return [&, df = std::vector<cplx>(), dg = std::vector<std::vector<cplx>>(n)](
               const std::array<double, 3>& w) mutable {
      eng.difference(0, w, df);
      for (int a = 0; a < n; ++a) eng.difference(a + 1, w, dg[a]);
      const auto& f0 = eng.values(0);
      double s = 0.0;
      for (std::size_t i = 0; i < df.size(); ++i) {
        // f(x) grad f(x+w) - f(x+w) grad f(x) = f(x) D grad f - D f grad f(x)
        double m2 = 0.0;
        for (int a = 0; a < n; ++a) {
          const double v = f0[i].real() * dg[a][i].real() - df[i].real() * eng.values(a + 1)[i].real();
          m2 += v * v;
        }
        s += std::sqrt(m2);
      }
      return s * cell;
    };
  };
  ShellOptions opt;
  opt.angularNodes = angularNodes;
  opt.radialTol = radialTol;
  BilinearForm out;
  out.lhs = shell_integral(phi, f.shape, lambda, 0.0, opt).total;
  out.constant = 2.0;

  // rhs: |grad g|(x) = |x| q(x) with q smooth; weight |x|^{-n-lambda+1}
  auto g = autocorrelation(f);
  GridFunction q(f.shape);
  std::vector<GridFunction> gg;
  for (int a = 0; a < n; ++a) gg.push_back(partial_derivative(g, a));
  const std::size_t o = f.shape.origin_index();
  for (std::size_t i = 0; i < q.size(); ++i) {
    double m2 = 0.0;
    for (int a = 0; a < n; ++a) m2 += std::norm(gg[a].values[i]);
    const double r = q.radius(i);
    q.values[i] = r > 0.0 ? std::sqrt(m2) / r : 0.0;
  }
  // q(0) = |Hessian| along a direction: for the (radially symmetric to leading
  // order) autocorrelation use the second derivative along axis 0.
  {
    auto g00 = partial_derivative(gg[0], 0);
    q.values[o] = std::abs(g00.values[o].real());
  }
  auto qv = [&](std::size_t i) { return q.values[i].real(); };
  const double fine = detail::singular_weighted_sum(q.shape, qv, n + lambda - 1.0, 1);
  out.rhs.value = 2.0 * fine;
  out.rhs.absError = 2.0 * std::abs(detail::singular_weighted_sum(q.shape, qv, n + lambda - 1.0, 2) - fine);
  out.rhs.converged = true;
  return out;
}

/// lhs = int int |x-y|^{-n-lambda} |f(x) g(y) - f(y) g(x)|^q dx dy.
inline QuadratureResult antisymmetric_form(const GridFunction& f, const GridFunction& g, double q, double lambda,
                                           int angularNodes = 16, double radialTol = 1e-5) {
  ShiftEngine eng({&f, &g});
  const double cell = f.shape.cell();
  auto phi = [&]() {
    return [&, df = std::vector<cplx>(), dg = std::vector<cplx>()](const std::array<double, 3>& w) mutable {
      eng.difference(0, w, df);
      eng.difference(1, w, dg);
      const auto& f0 = eng.values(0);
      const auto& g0 = eng.values(1);
      double s = 0.0;
      for (std::size_t i = 0; i < df.size(); ++i) {
        // f(x) g(x+w) - f(x+w) g(x) = f(x) Dg - Df g(x)
        const double v = std::abs(f0[i] * dg[i] - df[i] * g0[i]);
        s += q == 2.0 ? v * v : std::pow(v, q);
      }
      return s * cell;
    };
  };
  ShellOptions opt;
  opt.angularNodes = angularNodes;
  opt.radialTol = radialTol;
  return shell_integral(phi, f.shape, lambda, 0.0, opt).total;
}

/// lhs as above with q = p'; rhs = c [int |H_{lambda/q}(u)|^p du]^{q/p},
/// H(u) = int |v|^{lambda/q} |f^((u+v)/2) g^((u-v)/2)| dv, c = (c_hy 2^{-n})^q * delta-kernel constant.
inline BilinearForm bilinear_thm5(const GridFunction& f, const GridFunction& g, double p, double lambda,
                                  int angularNodes = 16, double radialTol = 1e-5) {
  if (!(p > 1.0 && p <= 2.0)) throw AdmissibilityError("1 < p <= 2");
  const double q = dual_exponent(p);
  if (!(lambda > 0.0 && lambda < q)) throw AdmissibilityError("0 < lambda < q");
  if (!(f.shape == g.shape)) throw std::invalid_argument("bilinear_thm5: grids differ");
  const int n = f.n();
  BilinearForm out;
  out.lhs = antisymmetric_form(f, g, q, lambda, angularNodes, radialTol);

  auto F = fourier(f), G = fourier(g);
  const auto& sh = f.shape;
  const long N = static_cast<long>(sh.N);
  const double dxi = sh.dxi();
  // Frequencies as signed integer multi-indices; u = xi + eta spans [-N, N-2]^n.
  std::vector<std::array<long, 3>> m(F.values.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto j = sh.unflatten(i);
    for (int a = 0; a < 3; ++a) m[i][a] = a < n ? sh.freq_index(j[a]) : 0;
  }
  const long U = 2 * N;  // u index range [-N, N)
  std::size_t usize = 1;
  for (int a = 0; a < n; ++a) usize *= static_cast<std::size_t>(U);
  std::vector<double> H(usize, 0.0);
  std::vector<double> af(F.values.size()), ag(G.values.size());
  for (std::size_t i = 0; i < af.size(); ++i) {
    af[i] = std::abs(F.values[i]);
    ag[i] = std::abs(G.values[i]);
  }
  const double e = lambda / q;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (af[i] == 0.0) continue;
    for (std::size_t k = 0; k < m.size(); ++k) {
      std::size_t ui = 0;
      double v2 = 0.0;
      for (int a = 0; a < n; ++a) {
        const long u = m[i][a] + m[k][a];
        ui = ui * static_cast<std::size_t>(U) + static_cast<std::size_t>(u + N);
        const double v = (m[i][a] - m[k][a]) * dxi;
        v2 += v * v;
      }
      H[ui] += std::pow(v2, 0.5 * e) * af[i] * ag[k];
    }
  }
  // dv = 2^n dxi^n at fixed u
  const double jac = std::pow(2.0, n) * std::pow(dxi, n);
  double integral = 0.0;
  for (double v : H) integral += std::pow(v * jac, p);
  integral *= std::pow(dxi, n);
  const double chy = hausdorff_young_constant(n, p).value;
  auto dk = delta_kernel_constant(n, q, lambda, {1e-12, 0.0, 1u << 20});
  out.constant = std::pow(chy * std::pow(2.0, -n), q) * dk.value;
  out.rhs.value = out.constant * std::pow(integral, q / p);
  out.rhs.absError = dk.absError / std::max(dk.value, 1e-300) * out.rhs.value;
  out.rhs.converged = dk.converged;
  return out;
}

/// q = 2 identity: lhs as in bilinear_thm5; rhs is the antisymmetrised spectral
/// triple sum weighted by |v1 + v2|^lambda.
inline BilinearForm bilinear_thm6(const GridFunction& f, const GridFunction& g, double lambda,
                                  int angularNodes = 16, double radialTol = 1e-5) {
  if (!(lambda > 0.0 && lambda < 2.0)) throw AdmissibilityError("lambda in (0,2)");
  if (f.n() != 1) throw AdmissibilityError("bilinear_thm6 is evaluated for n = 1 only");
  if (f.N() > 128) throw AdmissibilityError("N <= 128 for the spectral triple sum");
  if (!(f.shape == g.shape)) throw std::invalid_argument("bilinear_thm6: grids differ");
  const int n = 1;
  BilinearForm out;
  out.lhs = antisymmetric_form(f, g, 2.0, lambda, angularNodes, radialTol);
  auto F = fourier(f), G = fourier(g);
  const auto& sh = f.shape;
  const long N = static_cast<long>(sh.N);
  const double dxi = sh.dxi();
  auto slot = [&](long m) -> long {  // FFT slot of signed index m, or -1 if off-grid
    if (m < -N / 2 || m >= N / 2) return -1;
    return m < 0 ? m + N : m;
  };
  // For fixed (xi1, eta1) the xi2 sum is a lattice rule for a weight with a
  // kink at xi2 = eta1; the origin of that line gets the zeta correction.
  const double z0 = detail::epstein_zeta(1, -lambda), z2 = detail::epstein_zeta(1, -lambda - 2.0);
  const double kinkScale = std::pow(2.0 * dxi, lambda);
  cplx sum = 0.0;
  for (long x1 = -N / 2; x1 < N / 2; ++x1)
    for (long e1 = -N / 2; e1 < N / 2; ++e1) {
      const cplx A = F.values[slot(x1)] * G.values[slot(e1)];
      if (A == 0.0) continue;
      auto term = [&](long x2) -> cplx {
        const long s1 = slot(x2), s2 = slot(x1 + e1 - x2);
        if (s1 < 0 || s2 < 0) return 0.0;
        return A * (std::conj(F.values[s1] * G.values[s2]) - std::conj(F.values[s2] * G.values[s1]));
      };
      for (long x2 = -N / 2; x2 < N / 2; ++x2) {
        if (x2 == e1) continue;
        sum += std::pow(std::abs(2.0 * (x2 - e1) * dxi), lambda) * term(x2);
      }
      const cplx v0 = term(e1);
      sum -= kinkScale * (z0 * v0 + 0.5 * z2 * (term(e1 + 1) - 2.0 * v0 + term(e1 - 1)));
    }
  sum *= std::pow(4.0, n) * std::pow(dxi, 3 * n);
  // c = 2^{1-2n} pi^lambda int |w|^{-n-lambda} (1 - cos w.eta) dw
  out.constant = std::pow(2.0, 1 - 2 * n) * std::pow(kPi, lambda) * cosine_kernel_integral(n, lambda).value;
  out.rhs.value = out.constant * sum.real();
  out.imagPart = out.constant * sum.imag();
  out.rhs.converged = true;
  return out;
}

struct ProductForm {
  QuadratureResult lhs;
  double rhsFG = 0.0;  // c (||f||_p ||g||_q)^p
  double rhsGF = 0.0;  // c (||g||_p ||f||_q)^p
  double constant = 0.0;
  bool sharpConstant = false;  // p = 2 uses the sharp constant
};

/// Besov seminorm of f(x) g(y) on R^{2n} against the product-norm bounds.
inline ProductForm product_form_thm7(const GridFunction& f, const GridFunction& g, double p, double beta,
                                     int angularNodes = 16, double radialTol = 1e-5,
                                     double genericConstant = 0.0) {
  const int n = f.n();
  if (n != 1) throw AdmissibilityError("product_form_thm7 is evaluated for n = 1 only");
  auto P = Params::lemma1(n, p, beta);
  if (!(f.shape == g.shape)) throw std::invalid_argument("product_form_thm7: grids differ");
  GridShape s2{2, f.N(), f.L()};
  GridFunction prod(s2);
  for (std::size_t i = 0; i < f.N(); ++i)
    for (std::size_t j = 0; j < f.N(); ++j) prod.values[i * f.N() + j] = f.values[i] * g.values[j];
  ProductForm out;
  out.lhs = besov_seminorm(prod, p, beta, angularNodes, radialTol);
  if (p == 2.0) {
    out.constant = thm7_constant(n, beta).value;
    out.sharpConstant = true;
  } else {
    out.constant = genericConstant;
  }
  const double q = P.q;
  out.rhsFG = out.constant * std::pow(lp_norm(f, p) * lp_norm(g, q), p);
  out.rhsGF = out.constant * std::pow(lp_norm(g, p) * lp_norm(f, q), p);
  return out;
}

}  // namespace fracbed
