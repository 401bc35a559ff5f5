#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "fracbed/cli.hpp"

using namespace fracbed;
using namespace fracbed::cli;

int main(int argc, char** argv) {
  CLI::App app{"fracbed: constants, inequality checks and sweeps"};
  app.require_subcommand(1);

  ConstantsRequest creq;
  double cAlpha = 0, cP = 0, cLambda = 0;
  auto* constants = app.add_subcommand("constants", "print closed-form and quadrature constants");
  constants->add_option("--n", creq.n, "dimension")->required();
  constants->add_option("--beta", creq.beta, "smoothness beta")->required();
  auto* oAlpha = constants->add_option("--alpha", cAlpha, "fractional order alpha");
  auto* oP = constants->add_option("--p", cP, "integrability exponent p");
  auto* oLambda = constants->add_option("--lambda", cLambda, "kernel exponent lambda (default beta)");
  constants->add_option("--which", creq.which)
      ->check(CLI::IsMember({"Dbeta", "bbm", "thm2", "thm6", "thm7", "thm8", "thm9", "hy", "pitt", "all"}));
  constants->add_option("--format", creq.format)->check(CLI::IsMember({"json", "csv", "text"}));

  VerifyRequest vreq;
  std::string theorem, tierName, outPath, gridPath;
  double vLambda = 0, vGamma = 0;
  auto* verifyCmd = app.add_subcommand("verify", "evaluate one inequality and write its report");
  verifyCmd->add_option("--theorem", theorem, "theorem id (BBM, T1..T9, Pitt, Uncertainty, Lemma1, SW, ...)")
      ->required();
  verifyCmd->add_option("--n", vreq.n)->required();
  verifyCmd->add_option("--p", vreq.p);
  verifyCmd->add_option("--beta", vreq.beta);
  verifyCmd->add_option("--alpha", vreq.alpha);
  auto* oVLambda = verifyCmd->add_option("--lambda", vLambda, "default beta");
  auto* oVGamma = verifyCmd->add_option("--gamma", vGamma, "Stein-Weiss exponent, default p*beta");
  verifyCmd->add_option("--family", vreq.family, "gaussian|hls|bump|modulated");
  auto* oGrid = verifyCmd->add_option("--grid", gridPath, "JSON grid function instead of a family");
  verifyCmd->add_option("--tier", tierName, "quick|standard|thorough (default $FRACBED_TIER)");
  verifyCmd->add_option("--seed", vreq.seed);
  verifyCmd->add_option("--out", outPath, "report path (stdout when absent)");
  verifyCmd->add_flag("--with-runtime", vreq.withRuntime, "include runtimeMs in the report body");

  std::string manifestPath, sweepOut;
  int jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "run a key=value manifest");
  sweep->add_option("manifest", manifestPath)->required();
  sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweepOut, "output directory (overrides the manifest)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*constants) {
      if (*oAlpha) creq.alpha = cAlpha;
      if (*oP) creq.p = cP;
      if (*oLambda) creq.lambda = cLambda;
      return cmd_constants(creq, std::cout, std::cerr);
    }
    if (*verifyCmd) {
      try {
        vreq.theorem = theorem_from_string(theorem);
        vreq.tier = tierName.empty() ? default_tier() : tier_from_string(tierName);
      } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
      }
      if (*oVLambda) vreq.lambda = vLambda;
      if (*oVGamma) vreq.gamma = vGamma;
      if (*oGrid) vreq.gridPath = gridPath;
      return cmd_verify(vreq, outPath, std::cout, std::cerr);
    }
    if (*sweep) {
      std::ifstream in(manifestPath);
      if (!in) {
        std::cerr << "cannot read " << manifestPath << "\n";
        return kUsage;
      }
      SweepManifest m;
      try {
        m = parse_manifest(in);
      } catch (const ManifestError& e) {
        std::cerr << manifestPath << ": " << e.what() << "\n";
        return kUsage;
      } catch (const std::invalid_argument& e) {  // bad FRACBED_TIER
        std::cerr << e.what() << "\n";
        return kUsage;
      }
      if (!sweepOut.empty()) m.out = sweepOut;
      return cmd_sweep(m, jobs, std::cerr);
    }
  } catch (const AdmissibilityError& e) {
    std::cerr << "inadmissible: " << e.what() << "\n";
    return kInadmissible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
