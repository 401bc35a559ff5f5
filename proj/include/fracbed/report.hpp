#pragma once

// Inequality reports: both sides of a claimed inequality, their error
// estimates, the constant used and a three-valued verdict.

#include <array>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "fracbed/specfun.hpp"

namespace fracbed {

enum class TheoremId { BBM, T1, T2, T3, T4, T5, T6, T7, T8, T9, Pitt, Uncertainty, Lemma1, SW, Triangle, Reduction, HLS };

inline constexpr std::array<std::pair<TheoremId, std::string_view>, 17> kTheoremNames{{
    {TheoremId::BBM, "BBM"},       {TheoremId::T1, "T1"},
    {TheoremId::T2, "T2"},         {TheoremId::T3, "T3"},
    {TheoremId::T4, "T4"},         {TheoremId::T5, "T5"},
    {TheoremId::T6, "T6"},         {TheoremId::T7, "T7"},
    {TheoremId::T8, "T8"},         {TheoremId::T9, "T9"},
    {TheoremId::Pitt, "Pitt"},     {TheoremId::Uncertainty, "Uncertainty"},
    {TheoremId::Lemma1, "Lemma1"}, {TheoremId::SW, "SW"},
    {TheoremId::Triangle, "Triangle"}, {TheoremId::Reduction, "Reduction"},
    {TheoremId::HLS, "HLS"},
}};

inline std::string_view to_string(TheoremId id) {
  for (const auto& [k, v] : kTheoremNames)
    if (k == id) return v;
  return "?";
}

inline TheoremId theorem_from_string(std::string_view s) {
  for (const auto& [k, v] : kTheoremNames)
    if (v == s) return k;
  throw std::invalid_argument("unknown theorem id: " + std::string(s));
}

enum class Verdict { Holds, HoldsWithinError, Violated, Divergent };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::HoldsWithinError: return "holds-within-error";
    case Verdict::Violated: return "violated";
    case Verdict::Divergent: return "divergent";
  }
  return "?";
}

inline Verdict verdict_from_string(std::string_view s) {
  for (auto v : {Verdict::Holds, Verdict::HoldsWithinError, Verdict::Violated, Verdict::Divergent})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown verdict: " + std::string(s));
}

/// Direction of the claim: lhs >= rhs, lhs <= rhs, or an identity lhs == rhs.
enum class Claim { GreaterEqual, LessEqual, Equal };

inline std::string_view to_string(Claim c) {
  switch (c) {
    case Claim::GreaterEqual: return ">=";
    case Claim::LessEqual: return "<=";
    case Claim::Equal: return "==";
  }
  return "?";
}

inline Claim claim_from_string(std::string_view s) {
  for (auto c : {Claim::GreaterEqual, Claim::LessEqual, Claim::Equal})
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown claim: " + std::string(s));
}

struct InequalityReport {
  TheoremId theoremId = TheoremId::BBM;
  Params params;
  std::vector<std::string> functionIds;
  Claim claim = Claim::GreaterEqual;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  std::string constantKind = "sharp";  // or "proof-chain, not claimed sharp"
  double ratio = 0.0;
  double lhsError = 0.0;
  double rhsError = 0.0;
  double tolerance = 0.0;  // extra relative slack granted to the verdict
  Verdict verdict = Verdict::Holds;
  double runtimeMs = 0.0;
  std::vector<std::string> notes;
  std::map<std::string, double> diagnostics;

  /// Sets ratio and verdict from the two sides and their errors.
  void finalize(bool divergent = false) {
    ratio = rhs != 0.0 ? lhs / rhs : (lhs == 0.0 ? 1.0 : kInf);
    if (divergent || !std::isfinite(lhs) || !std::isfinite(rhs)) {
      verdict = Verdict::Divergent;
      return;
    }
    const double budget = lhsError + rhsError + tolerance * std::abs(rhs);
    const double gap = claim == Claim::GreaterEqual ? lhs - rhs
                       : claim == Claim::LessEqual  ? rhs - lhs
                                                    : -std::abs(lhs - rhs);
    if (gap >= 0.0)
      verdict = Verdict::Holds;
    else if (gap >= -budget)
      verdict = Verdict::HoldsWithinError;
    else
      verdict = Verdict::Violated;
  }

  bool ok() const { return verdict == Verdict::Holds || verdict == Verdict::HoldsWithinError; }
};

inline nlohmann::json to_json(const Params& p) {
  return {{"n", p.n},         {"p", p.p},         {"pPrime", p.pPrime}, {"q", p.q},
          {"qStar", p.qStar}, {"alpha", p.alpha}, {"beta", p.beta},     {"lambda", p.lambda},
          {"gamma", p.gamma}, {"sigma", p.sigma}};
}

inline Params params_from_json(const nlohmann::json& j) {
  Params p;
  p.n = j.at("n").get<int>();
  for (auto [key, ptr] : std::initializer_list<std::pair<const char*, double Params::*>>{
           {"p", &Params::p},
           {"pPrime", &Params::pPrime},
           {"q", &Params::q},
           {"qStar", &Params::qStar},
           {"alpha", &Params::alpha},
           {"beta", &Params::beta},
           {"lambda", &Params::lambda},
           {"gamma", &Params::gamma},
           {"sigma", &Params::sigma}})
    p.*ptr = j.at(key).get<double>();
  return p;
}

namespace detail {

// JSON has no infinities; encode them as strings.
inline nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double denum(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  return std::nan("");
}

}  // namespace detail

/// Report as JSON. The runtime is left out when `withRuntime` is false so the
/// body is reproducible.
inline nlohmann::json to_json(const InequalityReport& r, bool withRuntime = true) {
  nlohmann::json d = nlohmann::json::object();
  for (const auto& [k, v] : r.diagnostics) d[k] = detail::num(v);
  nlohmann::json j{{"theoremId", to_string(r.theoremId)},
                   {"params", to_json(r.params)},
                   {"functionIds", r.functionIds},
                   {"claim", to_string(r.claim)},
                   {"lhs", detail::num(r.lhs)},
                   {"rhs", detail::num(r.rhs)},
                   {"constant", detail::num(r.constant)},
                   {"constantKind", r.constantKind},
                   {"ratio", detail::num(r.ratio)},
                   {"lhsError", detail::num(r.lhsError)},
                   {"rhsError", detail::num(r.rhsError)},
                   {"tolerance", r.tolerance},
                   {"verdict", to_string(r.verdict)},
                   {"notes", r.notes},
                   {"diagnostics", d}};
  if (withRuntime) j["runtimeMs"] = r.runtimeMs;
  return j;
}

inline InequalityReport report_from_json(const nlohmann::json& j) {
  InequalityReport r;
  r.theoremId = theorem_from_string(j.at("theoremId").get<std::string>());
  r.params = params_from_json(j.at("params"));
  r.functionIds = j.at("functionIds").get<std::vector<std::string>>();
  r.claim = claim_from_string(j.at("claim").get<std::string>());
  r.lhs = detail::denum(j.at("lhs"));
  r.rhs = detail::denum(j.at("rhs"));
  r.constant = detail::denum(j.at("constant"));
  r.constantKind = j.at("constantKind").get<std::string>();
  r.ratio = detail::denum(j.at("ratio"));
  r.lhsError = detail::denum(j.at("lhsError"));
  r.rhsError = detail::denum(j.at("rhsError"));
  r.tolerance = j.at("tolerance").get<double>();
  r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  r.notes = j.at("notes").get<std::vector<std::string>>();
  for (const auto& [k, v] : j.at("diagnostics").items()) r.diagnostics[k] = detail::denum(v);
  if (j.contains("runtimeMs")) r.runtimeMs = j.at("runtimeMs").get<double>();
  return r;
}

/// Wall-clock helper for runtimeMs.
class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace fracbed
