#pragma once

// Uniform grids on [-L, L)^n, their discrete Fourier duals in the
// f^(xi) = int f(x) e^{-2 pi i x.xi} dx convention, test families, spectral
// multipliers and (weighted) Lebesgue norms.

#include <fftw3.h>

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "fracbed/quadrature.hpp"
#include "fracbed/specfun.hpp"

namespace fracbed {

using cplx = std::complex<double>;

/// Common geometry of a grid and of its spectral dual.
struct GridShape {
  int n = 1;
  std::size_t N = 64;
  double L = 10.0;

  double h() const { return 2.0 * L / static_cast<double>(N); }
  double dxi() const { return 1.0 / (2.0 * L); }
  double cell() const { return std::pow(h(), n); }
  double spectral_cell() const { return std::pow(dxi(), n); }
  std::size_t size() const {
    std::size_t s = 1;
    for (int i = 0; i < n; ++i) s *= N;
    return s;
  }
  /// Multi-index of a flat row-major index (axis 0 slowest).
  std::array<std::size_t, 3> unflatten(std::size_t idx) const {
    std::array<std::size_t, 3> k{0, 0, 0};
    for (int a = n - 1; a >= 0; --a) {
      k[a] = idx % N;
      idx /= N;
    }
    return k;
  }
  std::size_t flatten(const std::array<std::size_t, 3>& k) const {
    std::size_t idx = 0;
    for (int a = 0; a < n; ++a) idx = idx * N + k[a];
    return idx;
  }
  double coord(std::size_t k) const { return -L + static_cast<double>(k) * h(); }
  /// Signed frequency index m in [-N/2, N/2) of FFT slot j.
  long freq_index(std::size_t j) const {
    return j < N / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(N);
  }
  double freq(std::size_t j) const { return static_cast<double>(freq_index(j)) * dxi(); }
  std::size_t origin_index() const {
    std::array<std::size_t, 3> k{N / 2, N / 2, N / 2};
    return flatten(k);
  }

  void validate() const {
    if (n < 1 || n > 3) throw AdmissibilityError("grid dimension n in {1,2,3}");
    if (N < 8 || (N & (N - 1)) != 0) throw AdmissibilityError("N a power of two, N >= 8");
    if (!(L > 0.0) || !std::isfinite(L)) throw AdmissibilityError("L > 0");
  }
  bool operator==(const GridShape& o) const { return n == o.n && N == o.N && L == o.L; }
};

struct GridFunction {
  GridShape shape;
  std::vector<cplx> values;

  GridFunction() = default;
  explicit GridFunction(const GridShape& s) : shape(s), values(s.size()) { s.validate(); }

  int n() const { return shape.n; }
  std::size_t N() const { return shape.N; }
  double L() const { return shape.L; }
  double h() const { return shape.h(); }
  std::size_t size() const { return values.size(); }

  /// Point x_k as a 3-vector (unused trailing components are 0).
  std::array<double, 3> point(std::size_t idx) const {
    auto k = shape.unflatten(idx);
    std::array<double, 3> x{0, 0, 0};
    for (int a = 0; a < shape.n; ++a) x[a] = shape.coord(k[a]);
    return x;
  }
  double radius(std::size_t idx) const {
    auto x = point(idx);
    return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  }
  /// h^n sum |f|.
  double mass() const {
    double s = 0.0;
    for (const auto& v : values) s += std::abs(v);
    return s * shape.cell();
  }
  /// max |f| on the boundary faces of the cube divided by max |f|.
  double periodization_error() const {
    double edge = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double a = std::abs(values[i]);
      peak = std::max(peak, a);
      auto k = shape.unflatten(i);
      for (int ax = 0; ax < shape.n; ++ax)
        if (k[ax] == 0 || k[ax] == shape.N - 1) edge = std::max(edge, a);
    }
    return peak > 0.0 ? edge / peak : 0.0;
  }
  bool is_real(double tol = 0.0) const {
    for (const auto& v : values)
      if (std::abs(v.imag()) > tol) return false;
    return true;
  }
};

/// Spectral samples f^(xi_m), stored in FFT order (slot j holds m = freq_index(j)).
struct SpectralFunction {
  GridShape shape;
  std::vector<cplx> values;

  SpectralFunction() = default;
  explicit SpectralFunction(const GridShape& s) : shape(s), values(s.size()) { s.validate(); }

  std::array<double, 3> frequency(std::size_t idx) const {
    auto j = shape.unflatten(idx);
    std::array<double, 3> xi{0, 0, 0};
    for (int a = 0; a < shape.n; ++a) xi[a] = shape.freq(j[a]);
    return xi;
  }
  double abs_frequency(std::size_t idx) const {
    auto xi = frequency(idx);
    return std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
  }
};

// ---------------------------------------------------------------------------
// FFT

namespace detail {

// FFTW planning is not thread-safe; plans are created once per (n, N, sign)
// under a lock and executed on caller arrays through the new-array interface.
class FftCache {
 public:
  static FftCache& instance() {
    static FftCache c;
    return c;
  }
  fftw_plan plan(int n, std::size_t N, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_tuple(n, N, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<int> dims(n, static_cast<int>(N));
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= N;
    auto* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(n, dims.data(), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans_[key] = p;
    return p;
  }
  ~FftCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans_;
};

inline void fft_inplace(const GridShape& s, std::vector<cplx>& data, int sign) {
  fftw_plan p = FftCache::instance().plan(s.n, s.N, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, ptr, ptr);
}

// (-1)^{j_0 + ... + j_{n-1}}: the phase from the -L offset of the grid.
inline double checker_sign(const GridShape& s, std::size_t idx) {
  auto j = s.unflatten(idx);
  std::size_t t = 0;
  for (int a = 0; a < s.n; ++a) t += j[a];
  return (t & 1u) ? -1.0 : 1.0;
}

}  // namespace detail

inline SpectralFunction fourier(const GridFunction& f) {
  SpectralFunction F(f.shape);
  F.values = f.values;
  detail::fft_inplace(f.shape, F.values, FFTW_FORWARD);
  const double c = f.shape.cell();
  for (std::size_t i = 0; i < F.values.size(); ++i) F.values[i] *= c * detail::checker_sign(f.shape, i);
  return F;
}

inline GridFunction inverse_fourier(const SpectralFunction& F) {
  GridFunction f(F.shape);
  f.values.resize(F.values.size());
  const double c = F.shape.spectral_cell();
  for (std::size_t i = 0; i < F.values.size(); ++i)
    f.values[i] = F.values[i] * (c * detail::checker_sign(F.shape, i));
  detail::fft_inplace(F.shape, f.values, FFTW_BACKWARD);
  return f;
}

// ---------------------------------------------------------------------------
// Test families

enum class FamilyId { Gaussian, HlsOptimizer, Bump, ModulatedGaussian, Custom };

inline std::string_view to_string(FamilyId id) {
  switch (id) {
    case FamilyId::Gaussian: return "gaussian";
    case FamilyId::HlsOptimizer: return "hlsOptimizer";
    case FamilyId::Bump: return "bump";
    case FamilyId::ModulatedGaussian: return "modulatedGaussian";
    case FamilyId::Custom: return "custom";
  }
  return "unknown";
}

struct TestFamily {
  FamilyId id = FamilyId::Gaussian;
  double a = kPi;      // gaussian exponent e^{-a|x|^2}
  double s = 0.5;      // hls optimizer order
  double k0 = 3.0;     // modulation frequency
  double radius = 1.0; // bump support radius
  double width = 1.0;  // dilation of the hls optimizer (1+|x/width|^2)^{...}
  double taper = 0.0;  // hls optimizer only: extra factor e^{-|x|^2/taper^2} when > 0

  static TestFamily gaussian(double a = kPi) {
    if (!(a > 0.0)) throw AdmissibilityError("gaussian a > 0");
    TestFamily t;
    t.id = FamilyId::Gaussian;
    t.a = a;
    return t;
  }
  static TestFamily hls_optimizer(double s, double width = 1.0, double taper = 0.0) {
    if (!(s > 0.0)) throw AdmissibilityError("hlsOptimizer s > 0");
    if (!(width > 0.0)) throw AdmissibilityError("hlsOptimizer width > 0");
    if (!(taper >= 0.0)) throw AdmissibilityError("hlsOptimizer taper >= 0");
    TestFamily t;
    t.id = FamilyId::HlsOptimizer;
    t.s = s;
    t.width = width;
    t.taper = taper;
    return t;
  }
  static TestFamily bump(double radius = 1.0) {
    if (!(radius > 0.0)) throw AdmissibilityError("bump radius > 0");
    TestFamily t;
    t.id = FamilyId::Bump;
    t.radius = radius;
    return t;
  }
  static TestFamily modulated_gaussian(double k0 = 3.0) {
    TestFamily t;
    t.id = FamilyId::ModulatedGaussian;
    t.k0 = k0;
    return t;
  }

  /// Admissibility that depends on the dimension.
  void check(int n) const {
    if (id == FamilyId::HlsOptimizer && !(s < 0.5 * n))
      throw AdmissibilityError("hlsOptimizer needs 0 < s < n/2");
  }

  cplx operator()(const std::array<double, 3>& x, int n) const {
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
    switch (id) {
      case FamilyId::Gaussian: return std::exp(-a * r2);
      case FamilyId::HlsOptimizer: {
        const double v = std::pow(1.0 + r2 / (width * width), -0.5 * (n - 2.0 * s));
        return taper > 0.0 ? v * std::exp(-r2 / (taper * taper)) : v;
      }
      case FamilyId::Bump: {
        const double u = r2 / (radius * radius);
        if (u >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - u));
      }
      case FamilyId::ModulatedGaussian:
        return std::exp(-kPi * r2) * std::polar(1.0, 2.0 * kPi * k0 * x[0]);
      case FamilyId::Custom: break;
    }
    return 0.0;
  }

  std::string describe() const {
    switch (id) {
      case FamilyId::Gaussian: return "gaussian(a=" + std::to_string(a) + ")";
      case FamilyId::HlsOptimizer:
        return "hlsOptimizer(s=" + std::to_string(s) + ",width=" + std::to_string(width) +
               (taper > 0.0 ? ",taper=" + std::to_string(taper) : std::string()) + ")";
      case FamilyId::Bump: return "bump(R=" + std::to_string(radius) + ")";
      case FamilyId::ModulatedGaussian: return "modulatedGaussian(k0=" + std::to_string(k0) + ")";
      case FamilyId::Custom: return "custom";
    }
    return "unknown";
  }
};

struct SampledFunction {
  GridFunction f;
  TestFamily family;
  double periodizationError = 0.0;
};

inline SampledFunction sample(const TestFamily& fam, int n, std::size_t N, double L) {
  GridShape s{n, N, L};
  s.validate();
  fam.check(n);
  if (fam.id == FamilyId::Bump && !(fam.radius <= 0.5 * L))
    throw AdmissibilityError("bump support must lie inside [-L/2, L/2]^n");
  GridFunction f(s);
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = fam(f.point(i), n);
  return {f, fam, f.periodization_error()};
}

/// Samples an arbitrary callable x -> value.
template <class G>
GridFunction sample_callable(G&& g, int n, std::size_t N, double L) {
  GridShape s{n, N, L};
  s.validate();
  GridFunction f(s);
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = g(f.point(i));
  return f;
}

// ---------------------------------------------------------------------------
// Spectral multipliers

template <class M>
GridFunction apply_multiplier(const GridFunction& f, M&& mult) {
  auto F = fourier(f);
  for (std::size_t i = 0; i < F.values.size(); ++i) F.values[i] *= mult(F.abs_frequency(i), i);
  return inverse_fourier(F);
}

/// Lambda_alpha = (-Delta/4 pi^2)^{alpha/2}: multiplier |xi|^alpha.
inline GridFunction frac_laplacian(const GridFunction& f, double alpha) {
  if (!(alpha >= 0.0)) throw std::domain_error("frac_laplacian: alpha must be >= 0");
  if (alpha == 0.0) return f;
  return apply_multiplier(f, [alpha](double r, std::size_t) { return r == 0.0 ? 0.0 : std::pow(r, alpha); });
}

struct RieszResult {
  GridFunction u;
  /// |f^(0)| / max|f^|: weight of the discarded DC bin.
  double dcTruncation = 0.0;
};

/// Inverse of frac_laplacian on the grid: multiplier |xi|^{-alpha}, DC bin set to 0.
inline RieszResult riesz_potential(const GridFunction& f, double alpha) {
  if (!(alpha > 0.0 && alpha < f.n())) throw std::domain_error("riesz_potential: need 0 < alpha < n");
  auto F = fourier(f);
  double peak = 0.0;
  for (const auto& v : F.values) peak = std::max(peak, std::abs(v));
  RieszResult r;
  r.dcTruncation = peak > 0.0 ? std::abs(F.values[0]) / peak : 0.0;
  for (std::size_t i = 0; i < F.values.size(); ++i) {
    const double k = F.abs_frequency(i);
    F.values[i] = k == 0.0 ? 0.0 : F.values[i] * std::pow(k, -alpha);
  }
  r.u = inverse_fourier(F);
  return r;
}

/// Spectral derivative d/dx_axis (multiplier 2 pi i xi_axis).
inline GridFunction partial_derivative(const GridFunction& f, int axis) {
  auto F = fourier(f);
  for (std::size_t i = 0; i < F.values.size(); ++i) {
    auto j = F.shape.unflatten(i);
    double xi = F.shape.freq(j[axis]);
    if (F.shape.freq_index(j[axis]) == -static_cast<long>(F.shape.N / 2)) xi = 0.0;  // Nyquist
    F.values[i] *= cplx(0.0, 2.0 * kPi * xi);
  }
  return inverse_fourier(F);
}

/// Trigonometric interpolation onto the grid with m times as many points per
/// axis (same box). The Nyquist coefficient is split between +-N/2 so real
/// data stay real.
inline GridFunction spectral_upsample(const GridFunction& f, std::size_t m) {
  if (m == 0 || (m & (m - 1)) != 0) throw std::invalid_argument("spectral_upsample: factor a power of two");
  const GridShape& a = f.shape;
  GridShape b{a.n, a.N * m, a.L};
  std::vector<cplx> F = f.values;
  detail::fft_inplace(a, F, FFTW_FORWARD);
  GridFunction g(b);
  const long N = static_cast<long>(a.N), M = static_cast<long>(b.N);
  for (std::size_t i = 0; i < F.size(); ++i) {
    auto j = a.unflatten(i);
    // every source index maps to one or (at Nyquist) two target indices per axis
    std::array<std::array<long, 2>, 3> tgt{};
    std::array<int, 3> cnt{1, 1, 1};
    double w = 1.0;
    for (int ax = 0; ax < a.n; ++ax) {
      const long k = a.freq_index(j[ax]);
      if (k == -N / 2) {
        tgt[ax] = {M - N / 2, N / 2};
        cnt[ax] = 2;
        w *= 0.5;
      } else {
        tgt[ax] = {k < 0 ? k + M : k, 0};
      }
    }
    for (int u = 0; u < cnt[0]; ++u)
      for (int v = 0; v < (a.n > 1 ? cnt[1] : 1); ++v)
        for (int q = 0; q < (a.n > 2 ? cnt[2] : 1); ++q) {
          std::array<std::size_t, 3> k{static_cast<std::size_t>(tgt[0][u]), static_cast<std::size_t>(tgt[1][v]),
                                       static_cast<std::size_t>(tgt[2][q])};
          g.values[b.flatten(k)] += F[i] * w;
        }
  }
  detail::fft_inplace(b, g.values, FFTW_BACKWARD);
  const double inv = 1.0 / static_cast<double>(a.size());
  for (auto& v : g.values) v *= inv;
  return g;
}

// ---------------------------------------------------------------------------
// Norms

inline double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw std::domain_error("lp_norm: p >= 1");
  double s = 0.0;
  if (std::isinf(p)) {
    for (const auto& v : f.values) s = std::max(s, std::abs(v));
    return s;
  }
  for (const auto& v : f.values) s += std::pow(std::abs(v), p);
  return std::pow(s * f.shape.cell(), 1.0 / p);
}

/// (int |f^|^p dxi)^{1/p} over the spectral grid.
inline double spectral_lp_norm(const SpectralFunction& F, double p) {
  if (!(p >= 1.0)) throw std::domain_error("spectral_lp_norm: p >= 1");
  double s = 0.0;
  if (std::isinf(p)) {
    for (const auto& v : F.values) s = std::max(s, std::abs(v));
    return s;
  }
  for (const auto& v : F.values) s += std::pow(std::abs(v), p);
  return std::pow(s * F.shape.spectral_cell(), 1.0 / p);
}

namespace detail {

// Analytic continuation of sum_{k in Z^n, k != 0} |k|^{-gamma} (Epstein zeta of
// the cubic lattice) for gamma < n, by the Ewald split with the
// self-dual theta function.
inline double epstein_zeta(int n, double gamma) {
  const double s = 0.5 * gamma, m = 0.5 * n - s;
  if (!(m > 0.0)) throw std::domain_error("epstein_zeta: need gamma < n");
  if (s == 0.0) return -1.0;
  if (s < 0.0 && s == std::floor(s)) return 0.0;  // trivial zeros
  // upper incomplete gamma, recurring downward for negative order
  std::function<double(double, double)> uig = [&](double a, double x) -> double {
    if (a > 0.0) return boost::math::tgamma(a, x);
    return (uig(a + 1.0, x) - std::pow(x, a) * std::exp(-x)) / a;
  };
  double sum = -1.0 / s - 1.0 / m;
  const int K = 6;
  std::array<int, 3> k{0, 0, 0};
  for (k[0] = -K; k[0] <= K; ++k[0])
    for (k[1] = (n > 1 ? -K : 0); k[1] <= (n > 1 ? K : 0); ++k[1])
      for (k[2] = (n > 2 ? -K : 0); k[2] <= (n > 2 ? K : 0); ++k[2]) {
        const double r2 = double(k[0]) * k[0] + double(k[1]) * k[1] + double(k[2]) * k[2];
        if (r2 == 0.0) continue;
        const double x = kPi * r2;
        sum += uig(s, x) * std::pow(x, -s) + uig(m, x) * std::pow(x, -m);
      }
  return std::pow(kPi, s) / std::tgamma(s) * sum;
}

// int |x|^{-gamma} v(x) dx over the grid restricted to every stride-th point
// about the origin. The punctured lattice sum is corrected at the origin with
// -h^{n-gamma} Z(gamma) v(0) - h^{n-gamma+2} Z(gamma-2) Lap v(0) / (2n),
// leaving an O(h^{n-gamma+4}) error for smooth v.
//
// With smoothOrigin the origin value is replaced by its even quartic
// extrapolation from the first three neighbours on each axis, for data whose
// origin sample is not part of the smooth profile (the zero mode of a
// periodised transform).
template <class V>
double singular_weighted_sum(const GridShape& s, V&& v, double gamma, std::size_t stride,
                             bool smoothOrigin = false) {
  const double h = s.h() * static_cast<double>(stride);
  const std::size_t o = s.origin_index();
  const long half = static_cast<long>(s.N / 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto k = s.unflatten(i);
    bool keep = true;
    for (int a = 0; a < s.n; ++a) keep = keep && ((static_cast<long>(k[a]) - half) % static_cast<long>(stride) == 0);
    if (!keep || i == o) continue;
    double r2 = 0.0;
    for (int a = 0; a < s.n; ++a) {
      const double x = s.coord(k[a]);
      r2 += x * x;
    }
    sum += v(i) * std::pow(r2, -0.5 * gamma);
  }
  sum *= std::pow(h, s.n);
  auto at = [&](int a, long off) {
    auto k = s.unflatten(o);
    k[a] = static_cast<std::size_t>(static_cast<long>(k[a]) + off * static_cast<long>(stride));
    return v(s.flatten(k));
  };
  double v0 = v(o);
  if (smoothOrigin) {
    v0 = 0.0;
    for (int a = 0; a < s.n; ++a) {
      const double m1 = 0.5 * (at(a, 1) + at(a, -1)), m2 = 0.5 * (at(a, 2) + at(a, -2)),
                   m3 = 0.5 * (at(a, 3) + at(a, -3));
      v0 += (15.0 * m1 - 6.0 * m2 + m3) / 10.0;
    }
    v0 /= s.n;
  }
  double lap = 0.0;
  for (int a = 0; a < s.n; ++a) {
    lap += (at(a, 1) - 2.0 * v0 + at(a, -1)) / (h * h);
  }
  const double w0 = gamma == 0.0 ? std::pow(h, s.n) : -std::pow(h, s.n - gamma) * epstein_zeta(s.n, gamma);
  const double w2 = -std::pow(h, s.n - gamma + 2.0) * epstein_zeta(s.n, gamma - 2.0) / (2.0 * s.n);
  return sum + v0 * w0 + lap * w2;
}

inline double weighted_sum(const GridFunction& f, double p, double gamma, std::size_t stride) {
  return singular_weighted_sum(
      f.shape, [&](std::size_t i) { return std::pow(std::abs(f.values[i]), p); }, gamma, stride);
}

}  // namespace detail

struct WeightedNormResult {
  double value = 0.0;   // int |x|^{-gamma} |f|^p dx
  double absError = 0.0;  // |fine - coarse| with the coarse grid at spacing 2h
};

/// int |x|^{-gamma} |f(x)|^p dx (no p-th root), lattice sum with a
/// zeta-corrected origin weight.
inline WeightedNormResult weighted_lp(const GridFunction& f, double p, double gamma) {
  if (!(p >= 1.0)) throw std::domain_error("weighted_lp: p >= 1");
  if (!(gamma < f.n())) throw std::domain_error("weighted_lp: gamma >= n makes the weight non-integrable");
  WeightedNormResult r;
  r.value = detail::weighted_sum(f, p, gamma, 1);
  r.absError = std::abs(r.value - detail::weighted_sum(f, p, gamma, 2));
  return r;
}

// ---------------------------------------------------------------------------
// Serialization: 64-byte header then row-major complex128 values.
//   0..7 magic "FBGRID01" | 8..11 u32 version | 12..15 u32 n | 16..23 u64 N
//   24..31 f64 L | 32..35 u32 value tag (1 = complex128) | 36..63 zero

inline constexpr char kGridMagic[8] = {'F', 'B', 'G', 'R', 'I', 'D', '0', '1'};

inline void write_grid(const GridFunction& f, const std::string& path) {
  std::array<unsigned char, 64> hdr{};
  std::memcpy(hdr.data(), kGridMagic, 8);
  const std::uint32_t version = 1, n = static_cast<std::uint32_t>(f.n()), tag = 1;
  const std::uint64_t N = f.N();
  const double L = f.L();
  std::memcpy(hdr.data() + 8, &version, 4);
  std::memcpy(hdr.data() + 12, &n, 4);
  std::memcpy(hdr.data() + 16, &N, 8);
  std::memcpy(hdr.data() + 24, &L, 8);
  std::memcpy(hdr.data() + 32, &tag, 4);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(reinterpret_cast<const char*>(hdr.data()), 64);
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
}

inline GridFunction read_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::array<unsigned char, 64> hdr{};
  in.read(reinterpret_cast<char*>(hdr.data()), 64);
  if (!in || std::memcmp(hdr.data(), kGridMagic, 8) != 0) throw std::runtime_error("not a grid file: " + path);
  std::uint32_t version, n, tag;
  std::uint64_t N;
  double L;
  std::memcpy(&version, hdr.data() + 8, 4);
  std::memcpy(&n, hdr.data() + 12, 4);
  std::memcpy(&N, hdr.data() + 16, 8);
  std::memcpy(&L, hdr.data() + 24, 8);
  std::memcpy(&tag, hdr.data() + 32, 4);
  if (version != 1 || tag != 1) throw std::runtime_error("unsupported grid file version or value type");
  GridFunction f(GridShape{static_cast<int>(n), static_cast<std::size_t>(N), L});
  in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
  if (!in) throw std::runtime_error("truncated grid file: " + path);
  return f;
}

}  // namespace fracbed
