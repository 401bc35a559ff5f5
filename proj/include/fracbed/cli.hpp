#pragma once

// Batch front-end logic behind the fracbed executable: constants tables,
// single verifications and manifest-driven sweeps. Argument parsing lives in
// tools/fracbed.cpp; everything here takes plain structs so it can be tested.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fracbed/inequalities.hpp"

namespace fracbed::cli {

enum ExitCode : int { kOk = 0, kViolated = 1, kUsage = 2, kInadmissible = 3, kDivergent = 4 };

// ---------------------------------------------------------------------------
// Tiers

enum class Tier { Quick, Standard, Thorough };

inline Tier tier_from_string(const std::string& s) {
  if (s == "quick") return Tier::Quick;
  if (s == "standard") return Tier::Standard;
  if (s == "thorough") return Tier::Thorough;
  throw std::invalid_argument("unknown tier: " + s + " (quick|standard|thorough)");
}

inline std::string to_string(Tier t) {
  return t == Tier::Quick ? "quick" : t == Tier::Standard ? "standard" : "thorough";
}

/// The FRACBED_TIER environment variable, else standard.
inline Tier default_tier() {
  const char* e = std::getenv("FRACBED_TIER");
  return e && *e ? tier_from_string(e) : Tier::Standard;
}

/// Tier -> (grid points per axis, angular nodes, radial tolerance). The grid
/// is the theorem's default scaled by 1/2, 1 or 2; the Heisenberg checks keep
/// their own budgets.
inline VerifyOptions tier_options(Tier t, TheoremId id, int n) {
  VerifyOptions o;
  auto g = default_grid(id, n);
  const bool fixed = id == TheoremId::T8 || id == TheoremId::T9 || id == TheoremId::T6;
  switch (t) {
    case Tier::Quick:
      o.N = fixed ? g.N : std::max<std::size_t>(8, g.N / 2);
      o.angularNodes = 4;
      o.radialTol = 1e-3;
      break;
    case Tier::Standard:
      o.N = g.N;
      o.angularNodes = 8;
      o.radialTol = 1e-5;
      break;
    case Tier::Thorough:
      o.N = fixed ? g.N : 2 * g.N;
      o.angularNodes = 16;
      o.radialTol = 1e-6;
      break;
  }
  o.L = g.L;
  return o;
}

// ---------------------------------------------------------------------------
// Constants

struct ConstantsRequest {
  int n = 1;
  double beta = 0.25;
  std::optional<double> alpha, p, lambda;
  std::string which = "all";
  std::string format = "text";
};

inline const std::vector<std::string>& constant_names() {
  static const std::vector<std::string> names{"Dbeta", "bbm", "thm2", "thm6", "thm7", "thm8", "thm9", "hy", "pitt"};
  return names;
}

struct ConstantRow {
  std::string name;
  std::string formulaId;
  Params params;
  double value = 0.0;
  double logValue = 0.0;
  std::string error;
};

inline ConstantRow compute_constant(const std::string& name, const ConstantsRequest& r) {
  const double alpha = r.alpha.value_or(0.0), p = r.p.value_or(2.0), lambda = r.lambda.value_or(r.beta);
  auto wrap = [&](const ConstantValue& c) {
    return ConstantRow{name, std::string(to_string(c.formulaId)), c.params, c.value, c.logValue, {}};
  };
  if (name == "Dbeta") return wrap(aronszajn_smith_Dbeta(r.n, r.beta));
  if (name == "bbm") return wrap(bbm_sharp_constant(r.n, r.beta));
  if (name == "thm2") return wrap(thm2_constant(r.n, alpha, r.beta));
  if (name == "thm6") return wrap(thm6_constant(r.n, lambda));
  if (name == "thm7") return wrap(thm7_constant(r.n, r.beta));
  if (name == "thm8") return wrap(thm8_prefactor(r.n, p, r.beta));
  if (name == "thm9") return wrap(thm9_constant(r.n, p, alpha, r.beta));
  if (name == "hy") return wrap(hausdorff_young_constant(r.n, p));
  if (name == "pitt") {
    auto c = pitt_constant(r.n, p, r.beta);
    if (!c.finite) throw AdmissibilityError("Pitt constant diverges");
    return {name, "pitt_weighted", Params::pitt(r.n, p, r.beta), c.value, std::log(c.value), {}};
  }
  throw std::invalid_argument("unknown constant: " + name);
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline nlohmann::json to_json(const ConstantRow& c) {
  if (!c.error.empty()) return {{"error", c.error}};
  return {{"formulaId", c.formulaId},
          {"params", fracbed::to_json(c.params)},
          {"value", detail::num(c.value)},
          {"logValue", detail::num(c.logValue)}};
}

/// Exit 3 when a single requested constant is inadmissible; with "all" such
/// entries carry an error string instead.
inline int cmd_constants(const ConstantsRequest& req, std::ostream& out, std::ostream& err) {
  std::vector<std::string> names;
  if (req.which == "all")
    names = constant_names();
  else
    names = {req.which};
  std::vector<ConstantRow> rows;
  for (const auto& nm : names) {
    try {
      rows.push_back(compute_constant(nm, req));
    } catch (const AdmissibilityError& e) {
      if (req.which != "all") {
        err << "inadmissible: " << e.what() << "\n";
        return kInadmissible;
      }
      ConstantRow r;
      r.name = nm;
      r.error = e.what();
      rows.push_back(r);
    }
  }
  if (req.format == "json") {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& r : rows) j[r.name] = to_json(r);
    out << j.dump(2) << "\n";
  } else if (req.format == "csv") {
    out << "name,formulaId,n,p,alpha,beta,lambda,value,logValue\n";
    for (const auto& r : rows) {
      if (!r.error.empty()) {
        out << r.name << ",,,,,,,," << "\n";
        continue;
      }
      out << r.name << "," << r.formulaId << "," << r.params.n << "," << fmt(r.params.p) << "," << fmt(r.params.alpha)
          << "," << fmt(r.params.beta) << "," << fmt(r.params.lambda) << "," << fmt(r.value) << ","
          << fmt(r.logValue) << "\n";
    }
  } else {
    for (const auto& r : rows) {
      if (!r.error.empty())
        out << r.name << ": inadmissible (" << r.error << ")\n";
      else
        out << r.formulaId << " = " << fmt(r.value) << "\n";
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// Single verification

struct VerifyRequest {
  TheoremId theorem = TheoremId::BBM;
  int n = 1;
  double p = 2.0;
  double beta = 0.25;
  double alpha = 0.0;
  std::optional<double> lambda, gamma;
  std::string family = "gaussian";
  std::optional<std::string> gridPath;  // JSON grid function instead of a family
  Tier tier = Tier::Standard;
  std::uint64_t seed = 0;
  bool withRuntime = false;
};

/// Family by name. The hls optimizer takes order s = alpha + beta (beta when
/// alpha = 0), width 1/2 and taper 2.
inline TestFamily family_from_name(const std::string& name, double alpha, double beta) {
  if (name == "gaussian") return TestFamily::gaussian(kPi);
  if (name == "hls" || name == "hlsOptimizer") return TestFamily::hls_optimizer(alpha + beta, 0.5, 2.0);
  if (name == "bump") return TestFamily::bump(1.0);
  if (name == "modulated" || name == "modulatedGaussian") return TestFamily::modulated_gaussian(3.0);
  throw std::invalid_argument("unknown family: " + name + " (gaussian|hls|bump|modulated)");
}

inline Params params_from_request(const VerifyRequest& r) {
  Params P;
  P.n = r.theorem == TheoremId::T8 || r.theorem == TheoremId::T9 ? 1 : r.n;
  P.p = r.theorem == TheoremId::Uncertainty ? 2.0 : r.p;
  P.pPrime = r.p > 1.0 ? r.p / (r.p - 1.0) : kInf;
  P.alpha = r.alpha;
  P.beta = r.beta;
  P.lambda = r.lambda.value_or(r.beta);
  P.gamma = r.gamma.value_or(r.p * r.beta);
  return P;
}

/// {"n":1,"N":64,"L":8,"id":"name","re":[...],"im":[...]} (im optional),
/// values in row-major order of the grid x_k = -L + k h.
inline GridFunction grid_from_json(const nlohmann::json& j, std::string* id = nullptr) {
  GridShape s{j.at("n").get<int>(), j.at("N").get<std::size_t>(), j.at("L").get<double>()};
  s.validate();
  GridFunction f(s);
  auto re = j.at("re").get<std::vector<double>>();
  if (re.size() != f.size()) throw std::invalid_argument("grid file: re has wrong length");
  std::vector<double> im(re.size(), 0.0);
  if (j.contains("im")) im = j.at("im").get<std::vector<double>>();
  if (im.size() != f.size()) throw std::invalid_argument("grid file: im has wrong length");
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = cplx(re[i], im[i]);
  if (id) *id = j.value("id", std::string("grid"));
  return f;
}

inline InequalityReport run_verify(const VerifyRequest& r) {
  const Params P = params_from_request(r);
  auto opt = tier_options(r.tier, r.theorem, P.n);
  if (r.gridPath) {
    std::ifstream in(*r.gridPath);
    if (!in) throw std::runtime_error("cannot read grid file " + *r.gridPath);
    std::string id;
    auto f = grid_from_json(nlohmann::json::parse(in), &id);
    std::vector<GridFunction> fns{f};
    std::vector<std::string> ids{id};
    const bool pair = r.theorem == TheoremId::T5 || r.theorem == TheoremId::T6 || r.theorem == TheoremId::T7 ||
                      r.theorem == TheoremId::Reduction;
    if (pair) {
      fns.push_back(sample(TestFamily::gaussian(kPi / 4.0), f.n(), f.N(), f.L()).f);
      ids.push_back(TestFamily::gaussian(kPi / 4.0).describe());
    }
    return verify(r.theorem, P, fns, ids, opt);
  }
  auto fam = family_from_name(r.family, P.alpha, P.beta);
  if (r.theorem == TheoremId::Pitt) return pitt_verify(P.n, P.p, P.beta, fam, opt);
  if (r.theorem == TheoremId::Uncertainty) return uncertainty_verify(P.n, P.alpha, fam, opt);
  return verify(r.theorem, P, std::vector<TestFamily>{fam}, opt);
}

inline int exit_code(const InequalityReport& r) {
  switch (r.verdict) {
    case Verdict::Holds:
    case Verdict::HoldsWithinError: return kOk;
    case Verdict::Violated: return kViolated;
    case Verdict::Divergent: return kDivergent;
  }
  return kViolated;
}

/// Writes the report (without the runtime unless asked, so reruns are
/// byte-identical) to `outPath`, or to `out` when the path is empty.
inline int cmd_verify(const VerifyRequest& req, const std::string& outPath, std::ostream& out, std::ostream& err) {
  InequalityReport r;
  try {
    r = run_verify(req);
  } catch (const AdmissibilityError& e) {
    err << "inadmissible: " << e.what() << "\n";
    return kInadmissible;
  }
  const std::string body = to_json(r, req.withRuntime).dump(2) + "\n";
  if (outPath.empty()) {
    out << body;
  } else {
    std::ofstream f(outPath, std::ios::binary);
    if (!f) {
      err << "cannot write " << outPath << "\n";
      return kUsage;
    }
    f << body;
  }
  err << to_string(r.theoremId) << ": " << to_string(r.verdict) << " (ratio " << fmt(r.ratio) << ", "
      << fmt(r.runtimeMs) << " ms)\n";
  return exit_code(r);
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepManifest {
  std::vector<TheoremId> theorems;
  std::vector<int> n{1};
  std::vector<double> p{2.0};
  std::vector<double> alpha{0.0};
  std::vector<double> beta{0.25};
  std::vector<double> lambda;  // empty: follow beta
  std::vector<double> gamma;   // empty: p * beta
  std::vector<std::string> families{"gaussian"};
  Tier tier = Tier::Standard;
  std::uint64_t seed = 0;
  std::string out = "sweep_out";
};

struct ManifestError : std::runtime_error {
  int line;
  ManifestError(int l, const std::string& m) : std::runtime_error("line " + std::to_string(l) + ": " + m), line(l) {}
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char c) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, c)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double to_double(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ManifestError(line, "not a number: " + s);
  }
}

// "0.25, 0.5" or "start:stop:step" (inclusive) or a mix.
inline std::vector<double> numbers(const std::string& v, int line) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) {
    auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(to_double(parts[0], line));
    } else if (parts.size() == 3) {
      const double a = to_double(parts[0], line), b = to_double(parts[1], line), h = to_double(parts[2], line);
      if (!(h > 0.0) || b < a) throw ManifestError(line, "bad range " + item);
      const long m = std::lround(std::floor((b - a) / h + 1e-9));
      for (long k = 0; k <= m; ++k) out.push_back(a + k * h);
    } else {
      throw ManifestError(line, "bad list item " + item);
    }
  }
  return out;
}

}  // namespace detail

inline SweepManifest parse_manifest(std::istream& in, Tier defaultTier = default_tier()) {
  SweepManifest m;
  m.tier = defaultTier;
  bool haveTheorems = false;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ManifestError(line, "expected key=value");
    const std::string key = detail::trim(s.substr(0, eq)), val = detail::trim(s.substr(eq + 1));
    if (key == "theorems" || key == "theorem") {
      haveTheorems = true;
      m.theorems.clear();
      for (const auto& t : detail::split(val, ',')) {
        try {
          m.theorems.push_back(theorem_from_string(t));
        } catch (const std::invalid_argument&) {
          throw ManifestError(line, "unknown theorem " + t);
        }
      }
    } else if (key == "n") {
      m.n.clear();
      for (double v : detail::numbers(val, line)) {
        if (v != std::floor(v) || v < 1) throw ManifestError(line, "n must be a positive integer");
        m.n.push_back(static_cast<int>(v));
      }
    } else if (key == "p") {
      m.p = detail::numbers(val, line);
    } else if (key == "alpha") {
      m.alpha = detail::numbers(val, line);
    } else if (key == "beta") {
      m.beta = detail::numbers(val, line);
    } else if (key == "lambda") {
      m.lambda = detail::numbers(val, line);
    } else if (key == "gamma") {
      m.gamma = detail::numbers(val, line);
    } else if (key == "families" || key == "family") {
      m.families = detail::split(val, ',');
      for (const auto& f : m.families) {
        try {
          family_from_name(f, 0.0, 0.25);
        } catch (const std::invalid_argument& e) {
          throw ManifestError(line, e.what());
        }
      }
    } else if (key == "tier") {
      try {
        m.tier = tier_from_string(val);
      } catch (const std::invalid_argument& e) {
        throw ManifestError(line, e.what());
      }
    } else if (key == "seed") {
      m.seed = static_cast<std::uint64_t>(detail::to_double(val, line));
    } else if (key == "out") {
      m.out = val;
    } else {
      throw ManifestError(line, "unknown key " + key);
    }
    if (key != "out" && key != "tier" && key != "seed" && val.empty()) throw ManifestError(line, "empty value");
  }
  if (!haveTheorems || m.theorems.empty()) throw ManifestError(line, "empty theorem list");
  return m;
}

struct SweepPoint {
  std::size_t index = 0;
  VerifyRequest request;
};

/// Cartesian product in manifest order (theorem, n, p, alpha, beta, lambda,
/// gamma, family).
inline std::vector<SweepPoint> expand(const SweepManifest& m) {
  std::vector<SweepPoint> pts;
  const std::vector<std::optional<double>> lambdas = [&] {
    std::vector<std::optional<double>> v;
    if (m.lambda.empty()) v.push_back(std::nullopt);
    for (double x : m.lambda) v.push_back(x);
    return v;
  }();
  const std::vector<std::optional<double>> gammas = [&] {
    std::vector<std::optional<double>> v;
    if (m.gamma.empty()) v.push_back(std::nullopt);
    for (double x : m.gamma) v.push_back(x);
    return v;
  }();
  for (auto t : m.theorems)
    for (int n : m.n)
      for (double p : m.p)
        for (double a : m.alpha)
          for (double b : m.beta)
            for (const auto& l : lambdas)
              for (const auto& g : gammas)
                for (const auto& fam : m.families) {
                  VerifyRequest r;
                  r.theorem = t;
                  r.n = n;
                  r.p = p;
                  r.alpha = a;
                  r.beta = b;
                  r.lambda = l;
                  r.gamma = g;
                  r.family = fam;
                  r.tier = m.tier;
                  r.seed = m.seed;
                  pts.push_back({pts.size(), r});
                }
  return pts;
}

struct SweepOutcome {
  std::optional<InequalityReport> report;
  std::string skipReason;
};

inline const char* kSummaryHeader = "theorem,n,p,alpha,beta,lambda,family,lhs,rhs,constant,ratio,verdict,runtime_ms";

inline std::string summary_row(const SweepPoint& pt, const SweepOutcome& o) {
  const auto P = params_from_request(pt.request);
  std::ostringstream s;
  s << to_string(pt.request.theorem) << "," << P.n << "," << fmt(P.p) << "," << fmt(P.alpha) << "," << fmt(P.beta)
    << "," << fmt(P.lambda) << "," << pt.request.family << ",";
  if (o.report) {
    const auto& r = *o.report;
    s << fmt(r.lhs) << "," << fmt(r.rhs) << "," << fmt(r.constant) << "," << fmt(r.ratio) << ","
      << to_string(r.verdict) << "," << fmt(r.runtimeMs);
  } else {
    s << ",,,,skipped,";
  }
  return s.str();
}

/// Runs every point with `jobs` workers; reports and summary are written in
/// manifest order after all points finish. Exit 0 iff nothing is violated.
inline int cmd_sweep(const SweepManifest& m, int jobs, std::ostream& log) {
  namespace fs = std::filesystem;
  const auto pts = expand(m);
  std::vector<SweepOutcome> res(pts.size());
  std::atomic<std::size_t> next{0};
  std::mutex logMu;
  auto work = [&] {
    for (std::size_t i = next++; i < pts.size(); i = next++) {
      try {
        res[i].report = run_verify(pts[i].request);
      } catch (const AdmissibilityError& e) {
        res[i].skipReason = std::string("inadmissible: ") + e.what();
      } catch (const std::exception& e) {
        res[i].skipReason = std::string("error: ") + e.what();
      }
      std::lock_guard<std::mutex> lk(logMu);
      log << "[" << i + 1 << "/" << pts.size() << "] " << to_string(pts[i].request.theorem) << " "
          << (res[i].report ? std::string(to_string(res[i].report->verdict)) : res[i].skipReason) << "\n";
    }
  };
  jobs = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  const fs::path dir(m.out);
  fs::create_directories(dir / "reports");
  std::ofstream summary(dir / "summary.csv", std::ios::binary);
  std::ofstream skips(dir / "skips.log", std::ios::binary);
  summary << kSummaryHeader << "\n";
  bool violated = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    summary << summary_row(pts[i], res[i]) << "\n";
    if (res[i].report) {
      char name[64];
      std::snprintf(name, sizeof name, "%04zu_%s.json", i, std::string(to_string(pts[i].request.theorem)).c_str());
      std::ofstream(dir / "reports" / name, std::ios::binary) << to_json(*res[i].report, false).dump(2) << "\n";
      violated = violated || res[i].report->verdict == Verdict::Violated;
    } else {
      skips << i << "," << summary_row(pts[i], res[i]) << ","
            << res[i].skipReason << "\n";
    }
  }
  return violated ? kViolated : kOk;
}

}  // namespace fracbed::cli
