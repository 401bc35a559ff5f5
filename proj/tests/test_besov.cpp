#include <gtest/gtest.h>

#include <cmath>

#include "fracbed/besov.hpp"

using namespace fracbed;

namespace {

// e^{-pi x^2 / w^2}
TestFamily width(double w) { return TestFamily::gaussian(kPi / (w * w)); }

// D_beta int |xi|^{2 beta} e^{-2 pi |xi|^2} dxi for f = e^{-pi|x|^2}
double gaussian_besov_exact(int n, double beta) {
  const double D = aronszajn_smith_Dbeta(n, beta).value;
  const double m = 0.5 * sphere_area(n) * std::tgamma(beta + 0.5 * n) * std::pow(2.0 * kPi, -beta - 0.5 * n);
  return D * m;
}

}  // namespace

TEST(Besov, GaussLegendreRule) {
  std::vector<double> x, w;
  detail::gauss_legendre(6, 0.0, 1.0, x, w);
  double s = 0.0, m10 = 0.0;
  for (int i = 0; i < 6; ++i) {
    s += w[i];
    m10 += w[i] * std::pow(x[i], 10);
  }
  EXPECT_NEAR(s, 1.0, 1e-14);
  EXPECT_NEAR(m10, 1.0 / 11.0, 1e-14);
}

TEST(Besov, AngularRuleWeights) {
  for (int n = 1; n <= 3; ++n) {
    auto r = AngularRule::half_sphere(n, 5);
    double s = 0.0;
    for (double w : r.weights) s += w;
    EXPECT_NEAR(s, sphere_area(n), 1e-12) << n;
  }
}

TEST(Besov, ShiftEngineMatchesGridShift) {
  auto f = sample(TestFamily::modulated_gaussian(1.0), 2, 128, 6.0).f;
  ShiftEngine eng({&f});
  std::vector<cplx> out, diff;
  const double h = f.h();
  eng.shifted(0, {3 * h, -2 * h, 0.0}, out);
  eng.difference(0, {3 * h, -2 * h, 0.0}, diff);
  double err = 0.0, errd = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto k = f.shape.unflatten(i);
    k[0] = (k[0] + 3) % f.N();
    k[1] = (k[1] + f.N() - 2) % f.N();
    const cplx ref = f.values[f.shape.flatten(k)];
    err = std::max(err, std::abs(out[i] - ref));
    errd = std::max(errd, std::abs(diff[i] - (ref - f.values[i])));
  }
  EXPECT_LT(err, 1e-12);
  EXPECT_LT(errd, 1e-12);
}

TEST(Besov, SeminormMatchesGaussianClosedForm) {
  // n = 1 at N = 2048 as in the reference configuration
  for (double beta : {0.25, 0.5, 0.75}) {
    auto f = sample(TestFamily::gaussian(), 1, 2048, 16.0).f;
    auto r = besov_seminorm(f, 2.0, beta);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value / gaussian_besov_exact(1, beta), 1.0, 1e-8) << beta;
    EXPECT_NEAR(besov_spectral(f, beta) / gaussian_besov_exact(1, beta), 1.0, 1e-7) << beta;
  }
}

TEST(Besov, AronszajnSmithIdentityOneDimension) {
  for (const auto& fam : {TestFamily::gaussian(), TestFamily::bump(2.0)})
    for (double beta : {0.25, 0.5, 0.75}) {
      auto f = sample(fam, 1, 2048, 16.0).f;
      const double a = besov_seminorm(f, 2.0, beta).value, b = besov_spectral(f, beta);
      EXPECT_NEAR(a / b, 1.0, 0.01) << fam.describe() << " " << beta;
      EXPECT_NEAR(a / b, 1.0, 1e-5) << fam.describe() << " " << beta;
    }
}

TEST(Besov, AronszajnSmithIdentityTwoDimensions) {
  for (const auto& fam : {TestFamily::gaussian(), TestFamily::bump(2.0)}) {
    auto f = sample(fam, 2, 256, 8.0).f;
    const double a = besov_seminorm(f, 2.0, 0.5, 8).value, b = besov_spectral(f, 0.5);
    EXPECT_NEAR(a / b, 1.0, 0.01) << fam.describe();
  }
  auto g = sample(TestFamily::gaussian(), 2, 256, 8.0).f;
  EXPECT_NEAR(besov_seminorm(g, 2.0, 0.5, 8).value / gaussian_besov_exact(2, 0.5), 1.0, 1e-6);
}

TEST(Besov, ConstantFunctionHasZeroSeminorm) {
  auto f = sample_callable([](const std::array<double, 3>&) { return cplx(1.0); }, 1, 256, 8.0);
  auto r = besov_seminorm(f, 2.0, 0.5);
  EXPECT_LT(std::abs(r.value), 1e-20);
  EXPECT_LT(besov_spectral(f, 0.5), 1e-20);
}

TEST(Besov, DilationCovariance) {
  // f(x/2) = e^{-pi x^2 / 4}: seminorm scales by 2^{n - p beta}
  for (int n = 1; n <= 2; ++n)
    for (double p : {1.5, 3.0}) {
      const double beta = 0.4;
      const std::size_t N = n == 1 ? 2048 : 256;
      const double L = n == 1 ? 24.0 : 12.0;
      auto f = sample(width(1.0), n, N, L).f;
      auto g = sample(width(2.0), n, N, L).f;
      const double a = besov_seminorm(f, p, beta, 8).value, b = besov_seminorm(g, p, beta, 8).value;
      EXPECT_NEAR(b / a / std::pow(2.0, n - p * beta), 1.0, 0.01) << n << " " << p;
    }
}

TEST(Besov, RotationAverageIsStableInThreeDimensions) {
  auto f = sample(TestFamily::gaussian(), 3, 32, 4.0).f;
  const double a = besov_seminorm(f, 2.0, 0.5, 4, 1e-5).value;
  EXPECT_NEAR(a / besov_spectral(f, 0.5), 1.0, 0.01);
}

TEST(Besov, SpectralMomentOracle) {
  // n = 1, beta = 1/2: D_{1/2} int |xi| e^{-2 pi xi^2} dxi by adaptive quadrature
  auto f = sample(TestFamily::gaussian(), 1, 1024, 12.0).f;
  auto q = integrate_pieces([](double x) { return std::abs(x) * std::exp(-2.0 * kPi * x * x); },
                            {-10.0, 0.0, 10.0}, {1e-13, 0.0, 1u << 20});
  EXPECT_NEAR(besov_spectral(f, 0.5) / (aronszajn_smith_Dbeta(1, 0.5).value * q.value), 1.0, 1e-7);
}

TEST(Besov, SpectralSmallBetaRate) {
  // D_beta int |xi|^{2 beta} |f^|^2 ~ (2/beta) pi^{n/2} ||f||_2^2 / Gamma(n/2)
  for (int n = 1; n <= 2; ++n) {
    auto f = sample(TestFamily::gaussian(), n, n == 1 ? 1024 : 128, 8.0).f;
    const double norm2 = std::pow(lp_norm(f, 2.0), 2);
    auto rel = [&](double beta) {
      return besov_spectral(f, beta) * beta / (2.0 * std::pow(kPi, 0.5 * n) * norm2 / std::tgamma(0.5 * n)) - 1.0;
    };
    const double e2 = std::abs(rel(1e-2)), e3 = std::abs(rel(1e-3));
    EXPECT_LT(e3, 0.01) << n;
    EXPECT_NEAR(e2 / e3, 10.0, 1.0) << n;  // first-order in beta
  }
}

TEST(Besov, SpectralOfZeroIsZero) {
  GridFunction z(GridShape{1, 64, 4.0});
  EXPECT_EQ(besov_spectral(z, 0.3), 0.0);
}

TEST(Besov, CorollaryGradientAgainstLambdaOne) {
  // |grad f/(2 pi)|-seminorm equals the Lambda_1 f seminorm at p = 2
  for (int n = 1; n <= 2; ++n) {
    auto f = sample(TestFamily::gaussian(), n, n == 1 ? 1024 : 128, 8.0).f;
    std::vector<GridFunction> g;
    for (int a = 0; a < n; ++a) {
      g.push_back(partial_derivative(f, a));
      for (auto& v : g.back().values) v /= 2.0 * kPi;
    }
    std::vector<const GridFunction*> comps;
    for (const auto& c : g) comps.push_back(&c);
    const double a = besov_seminorm_vector(comps, 2.0, 0.5, 8).value;
    const double b = besov_seminorm(frac_laplacian(f, 1.0), 2.0, 0.5, 8).value;
    EXPECT_NEAR(a / b, 1.0, 0.01) << n;
  }
}

TEST(Besov, HausdorffYoungIdentityAtTwo) {
  auto f = sample(TestFamily::gaussian(), 1, 1024, 16.0).f;
  auto r = hausdorff_young_form(f, 2.0, 0.5);
  EXPECT_NEAR(r.ratio, 1.0, 0.01);
  EXPECT_NEAR(r.ratio, 1.0, 1e-6);
}

TEST(Besov, HausdorffYoungBranches) {
  auto f = sample(TestFamily::gaussian(), 1, 1024, 16.0).f;
  auto lo = hausdorff_young_form(f, 1.5, 0.5);
  EXPECT_GE(lo.ratio, 1.0);
  // the kernel with exponent p' breaks the lower bound here
  EXPECT_LT(lo.lhs.value / lo.rhsDualKernel, 1.0);
  auto hi = hausdorff_young_form(f, 3.0, 0.5);
  EXPECT_LE(hi.ratio, 1.0);
  EXPECT_FALSE(hi.dualKernelFinite);  // p beta = p' makes the p' kernel diverge
  auto hi2 = hausdorff_young_form(f, 3.0, 0.3);
  EXPECT_LE(hi2.ratio, 1.0);
  EXPECT_TRUE(hi2.dualKernelFinite);
}

TEST(Besov, Autocorrelation) {
  auto f = sample(width(1.3), 1, 512, 10.0).f;
  auto g = autocorrelation(f);
  const auto& s = g.shape;
  const std::size_t o = s.origin_index();
  EXPECT_NEAR(g.values[o].real(), std::pow(lp_norm(f, 2.0), 2), 1e-12);
  double odd = 0.0, peak = 0.0;
  for (std::size_t k = 1; k < s.N / 2; ++k) {
    odd = std::max(odd, std::abs(g.values[o + k] - g.values[o - k]));
    peak = std::max(peak, g.values[o + k].real());
  }
  EXPECT_LT(odd, 1e-12);
  EXPECT_LT(peak, g.values[o].real());
  EXPECT_LT(std::abs(partial_derivative(g, 0).values[o]), 1e-8);

  auto f2 = sample(TestFamily::bump(1.0), 2, 64, 4.0).f;
  auto g2 = autocorrelation(f2);
  const std::size_t o2 = g2.shape.origin_index();
  for (int a = 0; a < 2; ++a) EXPECT_LT(std::abs(partial_derivative(g2, a).values[o2]), 1e-8);
}

TEST(Besov, Thm4GaussianIsAnEquality) {
  // The integrand f(x) f'(y) - f(y) f'(x) has one sign on each side of the
  // diagonal for a Gaussian, so the two sides coincide.
  auto f = sample(TestFamily::gaussian(), 1, 2048, 16.0).f;
  auto r = bilinear_thm4(f, 0.5);
  EXPECT_TRUE(std::isfinite(r.lhs.value) && std::isfinite(r.rhs.value));
  const double err = r.lhs.absError + r.rhs.absError;
  EXPECT_GE(r.lhs.value, r.rhs.value - err);
  EXPECT_NEAR(r.lhs.value / r.rhs.value, 1.0, 1e-7);
}

TEST(Besov, Thm4StrictForTwoBumps) {
  // a sum of two separated Gaussians changes the sign pattern
  auto f = sample_callable(
      [](const std::array<double, 3>& x) {
        return cplx(std::exp(-kPi * (x[0] - 1.0) * (x[0] - 1.0)) + 0.5 * std::exp(-kPi * (x[0] + 1.2) * (x[0] + 1.2)));
      },
      1, 2048, 16.0);
  auto r = bilinear_thm4(f, 0.5);
  EXPECT_GT(r.lhs.value - r.rhs.value, 10.0 * (r.lhs.absError + r.rhs.absError));
}

TEST(Besov, Thm4QuadraticScaling) {
  auto f = sample(TestFamily::gaussian(), 1, 1024, 16.0).f;
  GridFunction g = f;
  for (auto& v : g.values) v *= 3.0;
  auto a = bilinear_thm4(f, 0.3), b = bilinear_thm4(g, 0.3);
  EXPECT_NEAR(b.lhs.value / a.lhs.value, 9.0, 1e-8);
  EXPECT_NEAR(b.rhs.value / a.rhs.value, 9.0, 1e-10);
  EXPECT_THROW(bilinear_thm4(f, 1.0), AdmissibilityError);
}

TEST(Besov, Thm4TwoDimensions) {
  auto f = sample(TestFamily::gaussian(), 2, 128, 6.0).f;
  auto r = bilinear_thm4(f, 0.5, 8);
  EXPECT_NEAR(r.lhs.value / r.rhs.value, 1.0, 1e-3);
}

TEST(Besov, Thm5) {
  auto a = sample(width(1.0), 1, 64, 8.0).f, b = sample(width(2.0), 1, 64, 8.0).f;
  auto same = bilinear_thm5(a, a, 2.0, 0.5);
  EXPECT_LT(same.lhs.value, 1e-20);
  EXPECT_GT(same.rhs.value, 0.0);
  for (double p : {2.0, 1.5}) {
    auto r = bilinear_thm5(a, b, p, 0.5);
    EXPECT_LT(r.lhs.value + r.lhs.absError, r.rhs.value - r.rhs.absError) << p;
    auto s = bilinear_thm5(b, a, p, 0.5);
    EXPECT_NEAR(s.lhs.value / r.lhs.value, 1.0, 1e-12) << p;
    EXPECT_NEAR(s.rhs.value / r.rhs.value, 1.0, 1e-12) << p;
  }
  EXPECT_THROW(bilinear_thm5(a, b, 2.5, 0.5), AdmissibilityError);
  EXPECT_THROW(bilinear_thm5(a, b, 2.0, 2.0), AdmissibilityError);
}

TEST(Besov, Thm6Identity) {
  auto a = sample(width(1.0), 1, 64, 8.0).f, b = sample(width(2.0), 1, 64, 8.0).f;
  auto r = bilinear_thm6(a, b, 0.5);
  EXPECT_NEAR(r.rhs.value / r.lhs.value, 1.0, 0.05);
  EXPECT_NEAR(r.rhs.value / r.lhs.value, 1.0, 1e-4);
  EXPECT_LE(std::abs(r.imagPart), 1e-8 * std::abs(r.rhs.value));
  for (double lambda : {0.3, 1.2, 1.8}) {
    auto t = bilinear_thm6(a, b, lambda);
    EXPECT_NEAR(t.rhs.value / t.lhs.value, 1.0, 1e-3) << lambda;
  }
  auto same = bilinear_thm6(a, a, 0.5);
  EXPECT_LT(std::abs(same.lhs.value), 1e-20);
  EXPECT_LT(std::abs(same.rhs.value), 1e-12);
  auto big = sample(width(1.0), 1, 256, 8.0).f;
  EXPECT_THROW(bilinear_thm6(big, big, 0.5), AdmissibilityError);
}

TEST(Besov, Thm7ProductForm) {
  auto a = sample(width(1.0), 1, 128, 8.0).f, b = sample(width(2.0), 1, 128, 8.0).f;
  auto r = product_form_thm7(a, b, 2.0, 0.25, 8);
  EXPECT_TRUE(r.sharpConstant);
  EXPECT_GT(r.lhs.value - r.lhs.absError, std::max(r.rhsFG, r.rhsGF));
  auto s = product_form_thm7(b, a, 2.0, 0.25, 8);
  EXPECT_NEAR(s.lhs.value / r.lhs.value, 1.0, 1e-10);
  EXPECT_NEAR(s.rhsFG, r.rhsGF, 1e-12 * r.rhsGF);

  // f = g: the Besov seminorm of f(x) f(y) on the plane; for the Gaussian that
  // is e^{-pi |z|^2} in two dimensions
  auto t = product_form_thm7(a, a, 2.0, 0.25, 8);
  EXPECT_NEAR(t.lhs.value / gaussian_besov_exact(2, 0.25), 1.0, 1e-5);
}
