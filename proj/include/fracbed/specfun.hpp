#pragma once

// Closed-form sharp constants. Every constant is assembled as a sum of
// logarithms and exponentiated once at the end.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fracbed {

/// Raised when a parameter tuple violates a theorem's admissibility range.
/// `constraint()` names the violated condition in plain text.
class AdmissibilityError : public std::domain_error {
 public:
  explicit AdmissibilityError(std::string constraint)
      : std::domain_error("inadmissible parameters: " + constraint),
        constraint_(std::move(constraint)) {}
  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dual exponent p/(p-1); p == 1 maps to +inf.
inline double dual_exponent(double p) {
  if (!(p >= 1.0)) throw AdmissibilityError("p >= 1");
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

/// Exponent and index record shared by every theorem context. Construct it
/// through one of the named factories; each enforces its theorem's ranges.
struct Params {
  int n = 1;
  double p = 2.0;
  double pPrime = 2.0;
  double q = 0.0;       // pn/(n - p beta), 0 when not defined
  double qStar = 0.0;   // pn/(n - p(alpha+beta)), 0 when not defined
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  double sigma = 0.0;

  static Params with_exponent(int n, double p) {
    if (n < 1) throw AdmissibilityError("n >= 1");
    Params r;
    r.n = n;
    r.p = p;
    r.pPrime = dual_exponent(p);
    return r;
  }

  /// Besov seminorm of smoothness beta in L^p.
  static Params besov(int n, double p, double beta) {
    auto r = with_exponent(n, p);
    if (!(beta > 0.0 && beta < 1.0)) throw AdmissibilityError("beta in (0,1)");
    r.beta = beta;
    if (n > p * beta) {
      r.q = p * n / (n - p * beta);
      r.lambda = (n - p * beta) / p;
    }
    return r;
  }

  /// Hardy-type context: 1 <= p < n/beta, lambda = (n - p beta)/p.
  static Params lemma1(int n, double p, double beta) {
    auto r = besov(n, p, beta);
    if (!(p * beta < n)) throw AdmissibilityError("p < n/beta");
    return r;
  }

  /// Fractional-Laplacian embedding: 1 <= p < n/(alpha+beta).
  static Params theorem1(int n, double p, double alpha, double beta) {
    auto r = besov(n, p, beta);
    if (!(alpha >= 0.0)) throw AdmissibilityError("alpha >= 0");
    if (!(p * (alpha + beta) < n)) throw AdmissibilityError("p < n/(alpha+beta)");
    r.alpha = alpha;
    r.qStar = p * n / (n - p * (alpha + beta));
    return r;
  }

  /// Sharp p = 2 case: 2 < n/(alpha+beta).
  static Params theorem2(int n, double alpha, double beta) {
    auto r = theorem1(n, 2.0, alpha, beta);
    return r;
  }

  /// Hausdorff-Young branch: 1 < p < inf.
  static Params hausdorff_young(int n, double p, double beta) {
    if (!(p > 1.0 && std::isfinite(p))) throw AdmissibilityError("1 < p < inf");
    return besov(n, p, beta);
  }

  /// Pitt on the line of duality: 1 < p <= 2, beta < min(1, n/p').
  static Params pitt(int n, double p, double beta) {
    if (!(p > 1.0 && p <= 2.0)) throw AdmissibilityError("1 < p <= 2");
    auto r = besov(n, p, beta);
    if (!(beta * r.pPrime < n)) throw AdmissibilityError("beta < n/p'");
    r.lambda = (n - r.pPrime * beta) / r.pPrime;
    return r;
  }

  /// Stein-Weiss kernel degree: 0 < gamma < min(n, p).
  static Params stein_weiss(int n, double p, double gamma) {
    auto r = with_exponent(n, p);
    if (!(gamma > 0.0 && gamma < std::min<double>(n, p)))
      throw AdmissibilityError("0 < gamma < min(n,p)");
    r.gamma = gamma;
    r.lambda = (n - gamma) / p;
    return r;
  }

  /// Heisenberg Besov form on H_n: 1 <= p < 2n/beta.
  static Params theorem8(int n, double p, double beta) {
    auto r = besov(n, p, beta);
    if (!(p * beta < 2.0 * n)) throw AdmissibilityError("p < 2n/beta");
    r.lambda = (2.0 * n - p * beta) / p;
    return r;
  }

  /// Heisenberg Stein-Weiss: lambda = 2n+2-alpha-beta in (2, 2n+2).
  static Params theorem9(int n, double p, double alpha, double beta) {
    if (!(p > 1.0 && std::isfinite(p))) throw AdmissibilityError("1 < p < inf");
    auto r = with_exponent(n, p);
    if (!(alpha < 2.0 * n / p)) throw AdmissibilityError("alpha < 2n/p");
    if (!(beta < 2.0 * n / r.pPrime)) throw AdmissibilityError("beta < 2n/p'");
    if (!(alpha + beta > 0.0)) throw AdmissibilityError("alpha + beta > 0");
    r.alpha = alpha;
    r.beta = beta;
    r.lambda = 2.0 * n + 2.0 - alpha - beta;
    if (!(r.lambda > 2.0 && r.lambda < 2.0 * n + 2.0))
      throw AdmissibilityError("lambda = 2n+2-alpha-beta in (2, 2n+2)");
    return r;
  }

  /// Extended uncertainty: 0 < alpha < n.
  static Params uncertainty(int n, double alpha) {
    auto r = with_exponent(n, 2.0);
    if (!(alpha > 0.0 && alpha < n)) throw AdmissibilityError("alpha in (0,n)");
    r.alpha = alpha;
    return r;
  }
};

enum class FormulaId {
  SphereArea,
  AronszajnSmithD,
  BbmSharp,
  Theorem2,
  HausdorffYoung,
  CosineKernel,
  Theorem6,
  Theorem7,
  Theorem8Prefactor,
  Theorem9,
  Theorem9Reduction,
  BetaLine,
  PittUncertainty,
  LiebDualHls,
  LiebDualHlsAsPrinted,
  SteinWeiss,
};

inline std::string_view to_string(FormulaId id) {
  switch (id) {
    case FormulaId::SphereArea: return "sphere_area";
    case FormulaId::AronszajnSmithD: return "D_beta";
    case FormulaId::BbmSharp: return "bbm";
    case FormulaId::Theorem2: return "thm2";
    case FormulaId::HausdorffYoung: return "hy";
    case FormulaId::CosineKernel: return "cosine_kernel";
    case FormulaId::Theorem6: return "thm6";
    case FormulaId::Theorem7: return "thm7";
    case FormulaId::Theorem8Prefactor: return "thm8";
    case FormulaId::Theorem9: return "thm9";
    case FormulaId::Theorem9Reduction: return "thm9_reduction";
    case FormulaId::BetaLine: return "beta_line";
    case FormulaId::PittUncertainty: return "pitt";
    case FormulaId::LiebDualHls: return "lieb_repaired";
    case FormulaId::LiebDualHlsAsPrinted: return "lieb_as_printed";
    case FormulaId::SteinWeiss: return "stein_weiss";
  }
  return "unknown";
}

struct ConstantValue {
  FormulaId formulaId;
  Params params;
  double value;
  double logValue;
};

/// ln Gamma(x) for x > 0.
inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("log_gamma: argument must be positive and finite");
  return std::lgamma(x);
}

namespace detail {

inline ConstantValue make_constant(FormulaId id, const Params& params, double logValue) {
  return {id, params, std::exp(logValue), logValue};
}

inline double log_gamma_ratio_n(int n) {
  // ln[Gamma(n/2)/Gamma(n)]
  return log_gamma(0.5 * n) - log_gamma(static_cast<double>(n));
}

inline void require_dimension(int n) {
  if (n < 1) throw AdmissibilityError("n >= 1");
}

}  // namespace detail

/// Surface area of the unit sphere S^{n-1} in R^n.
inline double sphere_area(int n) {
  detail::require_dimension(n);
  return 2.0 * std::pow(kPi, 0.5 * n) / std::exp(log_gamma(0.5 * n));
}

/// Aronszajn-Smith constant D_beta for the p = 2 Besov seminorm.
inline ConstantValue aronszajn_smith_Dbeta(int n, double beta) {
  auto P = Params::besov(n, 2.0, beta);
  double lv = std::log(2.0 / beta) + (0.5 * n + 2.0 * beta) * std::log(kPi) +
              log_gamma(1.0 - beta) - log_gamma(0.5 * n + beta);
  return detail::make_constant(FormulaId::AronszajnSmithD, P, lv);
}

inline ConstantValue bbm_sharp_constant(int n, double beta) {
  auto P = Params::besov(n, 2.0, beta);
  if (!(n > 2.0 * beta)) throw AdmissibilityError("n > 2 beta");
  double lv = std::log((n - 2.0 * beta) / (beta * (1.0 - beta))) +
              (beta + 0.5 * n) * std::log(kPi) + log_gamma(2.0 - beta) -
              log_gamma(0.5 * n + 1.0 - beta) +
              (2.0 * beta / n) * detail::log_gamma_ratio_n(n);
  return detail::make_constant(FormulaId::BbmSharp, P, lv);
}

/// Sharp constant for the p = 2 fractional-Laplacian embedding.
inline ConstantValue thm2_constant(int n, double alpha, double beta) {
  auto P = Params::theorem2(n, alpha, beta);
  const double s = alpha + beta;
  double lv = std::log(2.0 / (beta * (1.0 - beta))) +
              (beta - alpha + 0.5 * n) * std::log(kPi) + log_gamma(2.0 - beta) -
              log_gamma(0.5 * n + beta) + log_gamma(0.5 * n + s) -
              log_gamma(0.5 * n - s) + (2.0 * s / n) * detail::log_gamma_ratio_n(n);
  return detail::make_constant(FormulaId::Theorem2, P, lv);
}

/// c_{h-y} = [p^{1/p} / p'^{1/p'}]^{-n/2}, the reciprocal of the sharp
/// Hausdorff-Young norm; >= 1 for every p.
inline ConstantValue hausdorff_young_constant(int n, double p) {
  detail::require_dimension(n);
  if (!(p > 1.0 && std::isfinite(p))) throw AdmissibilityError("1 < p < inf");
  auto P = Params::with_exponent(n, p);
  const double pp = P.pPrime;
  double lv = -0.5 * n * (std::log(p) / p - std::log(pp) / pp);
  return detail::make_constant(FormulaId::HausdorffYoung, P, lv);
}

/// Closed form of int_{R^n} |w|^{-n-lambda} (1 - cos w.eta) dw.
inline ConstantValue cosine_kernel_integral(int n, double lambda) {
  detail::require_dimension(n);
  if (!(lambda > 0.0 && lambda < 2.0)) throw AdmissibilityError("lambda in (0,2)");
  auto P = Params::with_exponent(n, 2.0);
  P.lambda = lambda;
  double lv = (1.0 - lambda) * std::log(2.0) + 0.5 * n * std::log(kPi) - std::log(lambda) +
              log_gamma(1.0 - 0.5 * lambda) - log_gamma(0.5 * (n + lambda));
  return detail::make_constant(FormulaId::CosineKernel, P, lv);
}

inline ConstantValue thm6_constant(int n, double lambda) {
  detail::require_dimension(n);
  if (!(lambda > 0.0 && lambda < 2.0)) throw AdmissibilityError("lambda in (0,2)");
  auto P = Params::with_exponent(n, 2.0);
  P.lambda = lambda;
  double lv = lambda * std::log(0.5 * kPi) + 0.5 * n * std::log(kPi) - std::log(lambda) +
              log_gamma(1.0 - 0.5 * lambda) - log_gamma(0.5 * (n + lambda));
  return detail::make_constant(FormulaId::Theorem6, P, lv);
}

/// Sharp p = 2 constant of the product-function embedding on R^{2n}.
inline ConstantValue thm7_constant(int n, double beta) {
  auto P = Params::besov(n, 2.0, beta);
  if (!(n > 2.0 * beta)) throw AdmissibilityError("n > 2 beta");
  double lv = std::log(2.0 / beta) + (beta + n) * std::log(kPi) + log_gamma(1.0 - beta) -
              log_gamma(0.5 * n - beta) + log_gamma(0.5 * n + beta) - log_gamma(n + beta) +
              (2.0 * beta / n) * detail::log_gamma_ratio_n(n);
  return detail::make_constant(FormulaId::Theorem7, P, lv);
}

/// 4^n sqrt(pi) Gamma((2n+p beta)/4) / Gamma((2n+2+p beta)/4).
inline ConstantValue thm8_prefactor(int n, double p, double beta) {
  auto P = Params::theorem8(n, p, beta);
  double lv = n * std::log(4.0) + 0.5 * std::log(kPi) + log_gamma((2.0 * n + p * beta) / 4.0) -
              log_gamma((2.0 * n + 2.0 + p * beta) / 4.0);
  return detail::make_constant(FormulaId::Theorem8Prefactor, P, lv);
}

inline ConstantValue thm9_constant(int n, double p, double alpha, double beta) {
  auto P = Params::theorem9(n, p, alpha, beta);
  const double pp = P.pPrime;
  const double s = alpha + beta;
  double lv = n * std::log(4.0 * kPi * kPi) + 0.5 * std::log(kPi) +
              log_gamma((2.0 * n - s) / 4.0) + log_gamma(0.5 * s) +
              log_gamma(n / p - 0.5 * alpha) + log_gamma(n / pp - 0.5 * beta) -
              log_gamma((2.0 * n + 2.0 - s) / 4.0) - log_gamma((2.0 * n - s) / 2.0) -
              log_gamma(n / pp + 0.5 * alpha) - log_gamma(n / p + 0.5 * beta);
  return detail::make_constant(FormulaId::Theorem9, P, lv);
}

/// Sharp Stein-Weiss constant on R^N for |x|^{-alpha} (|x|^{-(N-alpha-beta)} * |x|^{-beta} h)
/// as a map L^p -> L^p.
inline ConstantValue stein_weiss_constant(int N, double p, double alpha, double beta) {
  detail::require_dimension(N);
  if (!(p > 1.0 && std::isfinite(p))) throw AdmissibilityError("1 < p < inf");
  auto P = Params::with_exponent(N, p);
  const double pp = P.pPrime;
  if (!(alpha < N / p)) throw AdmissibilityError("alpha < N/p");
  if (!(beta < N / pp)) throw AdmissibilityError("beta < N/p'");
  if (!(alpha + beta > 0.0)) throw AdmissibilityError("alpha + beta > 0");
  P.alpha = alpha;
  P.beta = beta;
  const double lam = N - alpha - beta;
  P.lambda = lam;
  double lv = 0.5 * N * std::log(kPi) + log_gamma(0.5 * (N - lam)) - log_gamma(0.5 * lam) +
              log_gamma(0.5 * (N / p - alpha)) + log_gamma(0.5 * (N / pp - beta)) -
              log_gamma(0.5 * (N / pp + alpha)) - log_gamma(0.5 * (N / p + beta));
  return detail::make_constant(FormulaId::SteinWeiss, P, lv);
}

/// Constant obtained by composing the t-line integral with the sharp Stein-Weiss
/// constant on R^{2n} under the Haar normalisation dw = 4^n dx dy dt. It differs
/// from `thm9_constant` by a factor pi^n.
inline ConstantValue thm9_reduction_constant(int n, double p, double alpha, double beta) {
  auto P = Params::theorem9(n, p, alpha, beta);
  const double s = alpha + beta;
  auto sw = stein_weiss_constant(2 * n, p, alpha, beta);
  double lv = n * std::log(4.0) + 0.5 * std::log(kPi) + log_gamma((2.0 * n - s) / 4.0) -
              log_gamma((2.0 * n + 2.0 - s) / 4.0) + sw.logValue;
  return detail::make_constant(FormulaId::Theorem9Reduction, P, lv);
}

/// int_R (1+t^2)^{-lambda/4} dt = sqrt(pi) Gamma(lambda/4 - 1/2) / Gamma(lambda/4).
inline ConstantValue beta_line_integral(double lambda) {
  if (!(lambda > 2.0)) throw AdmissibilityError("lambda > 2");
  auto P = Params::with_exponent(1, 2.0);
  P.lambda = lambda;
  double lv = 0.5 * std::log(kPi) + log_gamma(0.25 * lambda - 0.5) - log_gamma(0.25 * lambda);
  return detail::make_constant(FormulaId::BetaLine, P, lv);
}

/// B_alpha = pi^alpha [Gamma((n-alpha)/4) / Gamma((n+alpha)/4)]^2.
inline ConstantValue pitt_uncertainty_constant(int n, double alpha) {
  auto P = Params::uncertainty(n, alpha);
  double lv = alpha * std::log(kPi) +
              2.0 * (log_gamma(0.25 * (n - alpha)) - log_gamma(0.25 * (n + alpha)));
  return detail::make_constant(FormulaId::PittUncertainty, P, lv);
}

enum class LiebVariant { Repaired, AsPrinted };

/// Dual HLS constant c_s with int |xi|^{2s} |f^|^2 >= c_s ||f||_{2n/(n-2s)}^2, s = alpha+beta.
/// `AsPrinted` reproduces the damaged display verbatim (no Gamma in the numerator and
/// Gamma(n/2 - alpha + beta) in the denominator); `Repaired` is the sharp constant.
inline ConstantValue lieb_dual_hls_constant(int n, double alpha, double beta,
                                            LiebVariant variant = LiebVariant::Repaired) {
  detail::require_dimension(n);
  const double s = alpha + beta;
  if (!(s > 0.0 && s < 0.5 * n)) throw AdmissibilityError("s = alpha+beta in (0, n/2)");
  auto P = Params::with_exponent(n, 2.0);
  P.alpha = alpha;
  P.beta = beta;
  double tail = (2.0 * s / n) * detail::log_gamma_ratio_n(n) - s * std::log(kPi);
  if (variant == LiebVariant::Repaired) {
    double lv = tail + log_gamma(0.5 * n + s) - log_gamma(0.5 * n - s);
    return detail::make_constant(FormulaId::LiebDualHls, P, lv);
  }
  double lv = tail + std::log(0.5 * n + s) - log_gamma(0.5 * n - alpha + beta);
  return detail::make_constant(FormulaId::LiebDualHlsAsPrinted, P, lv);
}

inline ConstantValue lieb_dual_hls_constant(int n, double s) {
  return lieb_dual_hls_constant(n, s, 0.0, LiebVariant::Repaired);
}

}  // namespace fracbed
