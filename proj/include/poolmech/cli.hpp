// Copyright 2026 The poolmech Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POOLMECH_CLI_HPP
#define POOLMECH_CLI_HPP

// Command layer behind the poolmech executable. Each command returns a
// RunReport; rendering to text or JSON and exit-code policy live here too, so
// the executable is a thin argument parser.
//
// Exit codes: 0 success (including INCONCLUSIVE searches), 1 a property check
// failed under --strict or a solver could not certify its result, 2 bad input.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "poolmech/centralized.hpp"
#include "poolmech/equilibrium.hpp"
#include "poolmech/error.hpp"
#include "poolmech/io.hpp"
#include "poolmech/mechanism.hpp"
#include "poolmech/model.hpp"
#include "poolmech/scenarios.hpp"

namespace poolmech::cli {

enum class Format { kHuman, kMachine };

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInputError = 2;

struct CommandOptions {
  double tol = 1e-9;
  double epsilon = kDefaultEpsilon;
  bool strict = false;
  SearchParams search;
};

struct RunReport {
  std::string command;
  std::string scenario_digest;
  Json inputs = Json::object();
  Json outputs = Json::object();
  std::vector<PropertyCheck> checks;
  std::vector<std::string> markers;
  std::string body;
  std::string error;
  double elapsed_ms = 0.0;
  int exit_code = kExitOk;
};

struct ConstructMode {};
struct VerifyMode {
  MessageProfile profile;
};
struct DynamicsMode {
  MessageProfile init;
  int iterations = 10;
  double damping = 0.5;
};
using EquilibriumMode = std::variant<ConstructMode, VerifyMode, DynamicsMode>;

// ---------------------------------------------------------------------------
// JSON views of library results
// ---------------------------------------------------------------------------

namespace detail {

inline Json options_json(const CommandOptions& o) {
  const auto& s = o.search;
  return Json{{"tol", o.tol},
              {"epsilon", o.epsilon},
              {"strict", o.strict},
              {"search",
               {{"grid", s.grid},
                {"top_starts", s.top_starts},
                {"random_starts", s.random_starts},
                {"seed", s.seed},
                {"max_evaluations", s.max_evaluations},
                {"x_tol", s.x_tol},
                {"f_tol", s.f_tol}}}};
}

inline CommandOptions options_from_json(const Json& j) {
  CommandOptions o;
  o.tol = j.at("tol").get<double>();
  o.epsilon = j.at("epsilon").get<double>();
  o.strict = j.at("strict").get<bool>();
  const Json& s = j.at("search");
  o.search.grid = s.at("grid").get<int>();
  o.search.top_starts = s.at("top_starts").get<int>();
  o.search.random_starts = s.at("random_starts").get<int>();
  o.search.seed = s.at("seed").get<std::uint64_t>();
  o.search.max_evaluations = s.at("max_evaluations").get<int>();
  o.search.x_tol = s.at("x_tol").get<double>();
  o.search.f_tol = s.at("f_tol").get<double>();
  return o;
}

inline Json bounds_json(const std::vector<BoundState>& b) {
  Json arr = Json::array();
  for (auto v : b) arr.push_back(to_string(v));
  return arr;
}

inline Json certificate_json(const KKTCertificate& c) {
  return Json{{"passed", c.passed},
              {"tol", c.tol},
              {"max_residual", c.max_residual},
              {"marginal_utility", c.marginal_utility},
              {"bounds", bounds_json(c.bounds)},
              {"mu", c.mu},
              {"nu", c.nu},
              {"stationarity_residuals", c.stationarity_residuals},
              {"complementarity_residuals", c.complementarity_residuals},
              {"failures", c.failures}};
}

inline Json solution_json(const CentralizedSolution& s) {
  return Json{{"production", s.production},
              {"shadow_price", s.shadow_price},
              {"welfare", s.welfare},
              {"iterations", s.iterations},
              {"kkt", certificate_json(s.kkt)}};
}

inline Json allocation_json(const MarketScenario& s, const AllocationProfile& a) {
  Json breakdown = Json::array();
  Json utilities = Json::array();
  for (std::size_t i = 0; i < a.breakdown.size(); ++i) {
    const auto& b = a.breakdown[i];
    breakdown.push_back({{"revenue", b.revenue}, {"penalty", b.penalty}, {"rebate", b.rebate}});
    utilities.push_back(-cost_eval(s.producers[i].cost, a.production[i]) + a.taxes[i]);
  }
  return Json{{"production", a.production},
              {"taxes", a.taxes},
              {"breakdown", std::move(breakdown)},
              {"mean_price", a.mean_price},
              {"demand_at_mean", a.demand_at_mean},
              {"zeta", a.zeta},
              {"phi", a.phi},
              {"producer_utilities", std::move(utilities)},
              {"consumer_utility", consumer_utility(s, a)},
              {"budget_audit", budget_audit(a)},
              {"redistribution_total", redistribution_total(a)}};
}

inline Json properties_json(const PropertyReport& r) {
  return Json{{"price_spread", r.price_spread},
              {"mean_price", r.mean_price},
              {"zeta", r.zeta},
              {"marginal_utility", r.marginal_utility},
              {"tax_identity_residual", r.tax_identity_residual},
              {"producer_utility", r.producer_utility},
              {"consumer_utility", r.consumer_utility},
              {"bounds", bounds_json(r.bounds)},
              {"price_efficiency", r.price_efficiency},
              {"budget_audit", r.budget_audit}};
}

inline Json equilibrium_json(const EquilibriumReport& r) {
  Json responses = Json::array();
  for (const auto& br : r.responses) {
    responses.push_back({{"producer", br.producer},
                         {"argmax", {{"quantity", br.argmax.quantity}, {"price", br.argmax.price}}},
                         {"utility", br.utility},
                         {"incumbent_utility", br.incumbent_utility},
                         {"gap", br.gap},
                         {"quantity_hi", br.quantity_hi},
                         {"price_hi", br.price_hi},
                         {"grid", br.grid},
                         {"refinement_starts", br.refinement_starts},
                         {"evaluations", br.evaluations},
                         {"converged", br.converged},
                         {"kkt",
                          {{"d_quantity", br.kkt.d_quantity},
                           {"d_price", br.kkt.d_price},
                           {"mu_hat", br.kkt.mu_hat},
                           {"nu_hat", br.kkt.nu_hat},
                           {"theta_hat", br.kkt.theta_hat},
                           {"stationarity_residual", br.kkt.stationarity_residual}}}});
  }
  return Json{{"verdict", to_string(r.verdict)},
              {"epsilon", r.epsilon},
              {"threshold", r.threshold},
              {"inconclusive", r.inconclusive},
              {"responses", std::move(responses)},
              {"properties", properties_json(r.properties)}};
}

inline Json checks_json(const std::vector<PropertyCheck>& checks) {
  Json arr = Json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name}, {"value", c.value}, {"tol", c.tol}, {"passed", c.passed}});
  }
  return arr;
}

inline std::string num(double v, int precision = 8) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

inline std::string vec(const std::vector<double>& v, int precision = 8) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << num(v[i], precision);
  os << ")";
  return os.str();
}

inline void finish(RunReport& r, const CommandOptions& o,
                   std::chrono::steady_clock::time_point started) {
  r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  const bool failed = std::any_of(r.checks.begin(), r.checks.end(), [](const auto& c) { return !c.passed; });
  r.exit_code = (o.strict && failed) ? kExitCheckFailed : kExitOk;
}

inline bool reject_invalid(RunReport& r, const MarketScenario& s) {
  const auto v = validate_scenario(s);
  if (v.ok()) return false;
  std::ostringstream os;
  os << "scenario violates model assumptions:\n";
  Json items = Json::array();
  for (const auto& x : v.violations) {
    os << "  [" << x.rule << "] " << x.detail << "\n";
    items.push_back({{"rule", x.rule}, {"detail", x.detail}});
  }
  r.error = os.str();
  r.outputs["violations"] = std::move(items);
  r.exit_code = kExitInputError;
  return true;
}

inline RunReport start(std::string command, const MarketScenario& s, const CommandOptions& o) {
  RunReport r;
  r.command = std::move(command);
  r.scenario_digest = scenario_digest(s);
  r.inputs["command"] = r.command;
  r.inputs["scenario"] = scenario_to_json(s);
  r.inputs["options"] = options_json(o);
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline RunReport cmd_solve(const MarketScenario& s, const CommandOptions& o = {}) {
  const auto started = std::chrono::steady_clock::now();
  RunReport r = detail::start("solve", s, o);
  if (detail::reject_invalid(r, s)) return r;

  SolveOptions so;
  so.tol = o.tol;
  const auto sol = solve_max1(s, so);
  r.outputs["solution"] = detail::solution_json(sol);
  r.checks.push_back({"KKT certificate (max residual)", sol.kkt.max_residual, sol.kkt.tol, sol.kkt.passed});

  std::ostringstream os;
  os << "optimal production e* = " << detail::vec(sol.production) << "\n"
     << "shadow price p*       = " << detail::num(sol.shadow_price) << "\n"
     << "welfare W*            = " << detail::num(sol.welfare) << "\n"
     << "bisection iterations  = " << sol.iterations << "\n"
     << "KKT certificate       : " << (sol.kkt.passed ? "pass" : "FAIL") << " (max residual "
     << detail::num(sol.kkt.max_residual, 3) << ", tol " << sol.kkt.tol << ")\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    os << "  producer " << i + 1 << ": " << to_string(sol.kkt.bounds[i]) << ", mu = " << detail::num(sol.kkt.mu[i], 6)
       << ", nu = " << detail::num(sol.kkt.nu[i], 6) << "\n";
  }
  r.body = os.str();
  detail::finish(r, o, started);
  return r;
}

inline RunReport cmd_evaluate(const MarketScenario& s, const MessageProfile& m, const CommandOptions& o = {}) {
  const auto started = std::chrono::steady_clock::now();
  RunReport r = detail::start("evaluate", s, o);
  r.inputs["messages"] = messages_to_json(m);
  if (detail::reject_invalid(r, s)) return r;

  const auto a = outcome(s, m);
  r.outputs["allocation"] = detail::allocation_json(s, a);
  const double audit = budget_audit(a);
  double magnitude = 0.0;
  for (double t : a.taxes) magnitude += std::abs(t);
  const double audit_tol = 1e-9 * (1.0 + magnitude);
  r.checks.push_back({"budget balance (audit)", audit, audit_tol, std::abs(audit) <= audit_tol});

  std::ostringstream os;
  os << "mean price " << detail::num(a.mean_price) << ", D(mean price) " << detail::num(a.demand_at_mean)
     << ", zeta " << detail::num(a.zeta) << "\n";
  os << std::left << std::setw(4) << "i" << std::setw(14) << "quantity" << std::setw(14) << "price" << std::setw(16)
     << "revenue" << std::setw(16) << "penalty" << std::setw(14) << "rebate" << std::setw(16) << "tax"
     << "utility\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& b = a.breakdown[i];
    os << std::left << std::setw(4) << i + 1 << std::setw(14) << detail::num(m[i].quantity) << std::setw(14)
       << detail::num(m[i].price) << std::setw(16) << detail::num(b.revenue) << std::setw(16)
       << detail::num(b.penalty) << std::setw(14) << detail::num(b.rebate) << std::setw(16)
       << detail::num(a.taxes[i]) << detail::num(-cost_eval(s.producers[i].cost, a.production[i]) + a.taxes[i])
       << "\n";
  }
  os << "consumer utility " << detail::num(consumer_utility(s, a)) << ", budget audit " << detail::num(audit, 3)
     << "\n";
  r.body = os.str();
  detail::finish(r, o, started);
  return r;
}

namespace detail {

inline void describe_equilibrium(std::ostringstream& os, const EquilibriumReport& rep) {
  os << "verdict: " << to_string(rep.verdict) << " (max best-response gap " << num(rep.epsilon, 4) << ", epsilon "
     << rep.threshold << ")\n";
  os << "search: grid " << rep.search.grid << "x" << rep.search.grid << ", " << rep.search.top_starts
     << " grid starts + incumbent + " << rep.search.random_starts << " seeded starts (seed " << rep.search.seed
     << "), " << rep.search.max_evaluations << " evaluations per refinement\n";
  for (const auto& br : rep.responses) {
    os << "  producer " << br.producer + 1 << ": gap " << num(br.gap, 4) << ", best response ("
       << num(br.argmax.quantity) << ", " << num(br.argmax.price) << ")" << (br.converged ? "" : " [budget exhausted]")
       << "\n";
  }
  if (rep.inconclusive) os << "INCONCLUSIVE: a local refinement exhausted its evaluation budget\n";
}

inline void attach_equilibrium(RunReport& r, const EquilibriumReport& rep) {
  r.checks.insert(r.checks.end(), rep.checks.begin(), rep.checks.end());
  if (rep.inconclusive) r.markers.push_back("INCONCLUSIVE");
}

}  // namespace detail

inline RunReport cmd_equilibrium(const MarketScenario& s, const EquilibriumMode& mode, const CommandOptions& o = {}) {
  const auto started = std::chrono::steady_clock::now();
  RunReport r = detail::start("equilibrium", s, o);
  if (detail::reject_invalid(r, s)) return r;
  std::ostringstream os;

  if (std::holds_alternative<ConstructMode>(mode)) {
    r.inputs["mode"] = "construct";
    SolveOptions so;
    so.tol = o.tol;
    const auto sol = solve_max1(s, so);
    const auto m = construct_ne(s, sol);
    const auto rep = verify_ne(s, m, o.epsilon, o.search);
    Json slopes = Json::array();
    for (std::size_t i = 0; i < s.size(); ++i) slopes.push_back(tax_quantity_slope(s, m, i));
    r.outputs["solution"] = detail::solution_json(sol);
    r.outputs["profile"] = messages_to_json(m);
    r.outputs["tax_quantity_slopes"] = std::move(slopes);
    r.outputs["report"] = detail::equilibrium_json(rep);
    os << "constructed profile from e* = " << detail::vec(sol.production) << "\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
      os << "  m_" << i + 1 << " = (" << detail::num(m[i].quantity) << ", " << detail::num(m[i].price) << ")\n";
    }
    detail::describe_equilibrium(os, rep);
    detail::attach_equilibrium(r, rep);
  } else if (const auto* v = std::get_if<VerifyMode>(&mode)) {
    r.inputs["mode"] = "verify";
    r.inputs["messages"] = messages_to_json(v->profile);
    const auto rep = verify_ne(s, v->profile, o.epsilon, o.search);
    r.outputs["report"] = detail::equilibrium_json(rep);
    detail::describe_equilibrium(os, rep);
    detail::attach_equilibrium(r, rep);
  } else {
    const auto& d = std::get<DynamicsMode>(mode);
    r.inputs["mode"] = "dynamics";
    r.inputs["messages"] = messages_to_json(d.init);
    r.inputs["iterations"] = d.iterations;
    r.inputs["damping"] = d.damping;
    const auto trace = best_response_dynamics(s, d.init, d.iterations, d.damping, o.search);
    const auto rep = verify_ne(s, trace.profiles.back(), o.epsilon, o.search);
    Json profiles = Json::array();
    for (const auto& p : trace.profiles) profiles.push_back(messages_to_json(p)["messages"]);
    r.outputs["trace"] = {{"profiles", std::move(profiles)},
                          {"round_changes", trace.round_changes},
                          {"settled", trace.settled}};
    r.outputs["terminal_report"] = detail::equilibrium_json(rep);
    os << "damped best-response iteration (heuristic, no convergence guarantee): " << trace.round_changes.size()
       << " rounds, damping " << d.damping << (trace.settled ? ", settled" : ", not settled") << "\n";
    for (std::size_t k = 0; k < trace.round_changes.size(); ++k) {
      os << "  round " << k + 1 << ": max change " << detail::num(trace.round_changes[k], 4) << "\n";
    }
    os << "terminal profile:\n";
    for (const auto& msg : trace.profiles.back()) {
      os << "  (" << detail::num(msg.quantity) << ", " << detail::num(msg.price) << ")\n";
    }
    detail::describe_equilibrium(os, rep);
    detail::attach_equilibrium(r, rep);
  }
  r.body = os.str();
  detail::finish(r, o, started);
  return r;
}

// ---------------------------------------------------------------------------
// Reference-market reproduction
// ---------------------------------------------------------------------------

struct ComparisonRow {
  std::string market;
  std::string quantity;
  std::string published;  // verbatim
  std::string derived;
  std::optional<double> derived_value;
  bool discrepancy = false;
};

namespace detail {

inline bool differs(const std::string& published, double derived) {
  const double p = std::stod(published);
  return std::abs(p - derived) > std::max(0.05, 0.01 * std::abs(p));
}

inline ComparisonRow numeric_row(std::string market, std::string quantity, std::string published, double derived) {
  ComparisonRow row{std::move(market), std::move(quantity), std::move(published), num(derived, 6), derived, false};
  row.discrepancy = differs(row.published, derived);
  return row;
}

}  // namespace detail

inline RunReport cmd_reproduce_examples(const CommandOptions& o = {}) {
  const auto started = std::chrono::steady_clock::now();
  RunReport r;
  r.command = "reproduce-examples";
  r.inputs["command"] = r.command;
  r.inputs["options"] = detail::options_json(o);
  std::vector<ComparisonRow> rows;
  SolveOptions so;
  so.tol = o.tol;

  // Square-root demand market.
  {
    const std::string mk = "sqrt-demand";
    const auto s = scenarios::sqrt_demand_market();
    r.scenario_digest = scenario_digest(s);
    const auto sol = solve_max1(s, so);
    const auto m = construct_ne(s, sol);
    const auto a = outcome(s, m);
    const auto rep = verify_ne(s, m, o.epsilon, o.search);
    const auto oracle = brute_force_max1(s, 0.01);

    const char* e_pub[] = {"2", "1.5", "1.1", "0"};
    for (std::size_t i = 0; i < 4; ++i) {
      rows.push_back(detail::numeric_row(mk, "e_" + std::to_string(i + 1) + "*", e_pub[i], sol.production[i]));
    }
    for (std::size_t i = 0; i < 4; ++i) {
      rows.push_back(detail::numeric_row(mk, "e_" + std::to_string(i + 1) + "* (grid oracle, step 0.01)", e_pub[i],
                                         oracle[i]));
    }
    rows.push_back(detail::numeric_row(mk, "p*", "9.35", sol.shadow_price));
    rows.push_back({mk, "D(p) formula", "p^2/1600", "(20/p)^2", std::nullopt, true});
    const char* t_pub[] = {"18.7", "13.6", "10.3", "0"};
    for (std::size_t i = 0; i < 4; ++i) {
      rows.push_back(detail::numeric_row(mk, "t_" + std::to_string(i + 1), t_pub[i], a.taxes[i]));
    }
    const char* u_pub[] = {"10.7", "6.2", "4.45", "0"};
    for (std::size_t i = 0; i < 4; ++i) {
      rows.push_back(detail::numeric_row(mk, "u_" + std::to_string(i + 1), u_pub[i],
                                         -cost_eval(s.producers[i].cost, a.production[i]) + a.taxes[i]));
    }
    rows.push_back(detail::numeric_row(mk, "consumer utility", "43.2", consumer_utility(s, a)));

    const ProductionVector published{2.0, 1.5, 1.1, 0.0};
    const auto cert = kkt_check(s, published, 1e-6);
    rows.push_back({mk, "KKT at published e*", "optimal",
                    cert.passed ? "pass" : "fails, nu_4 = " + detail::num(cert.nu[3], 6), cert.nu[3], !cert.passed});
    const double w_published = welfare(s, published);
    rows.push_back({mk, "welfare at published e*", "optimal",
                    detail::num(w_published, 6) + " < W* = " + detail::num(sol.welfare, 6), w_published,
                    w_published < sol.welfare - 1e-6});
    rows.push_back({mk, "constructed profile", "non-trivial NE", to_string(rep.verdict), std::nullopt,
                    rep.verdict != Verdict::kNonTrivialNE});

    r.checks.push_back({"sqrt-demand: solver KKT certificate", sol.kkt.max_residual, sol.kkt.tol, sol.kkt.passed});
    r.checks.push_back({"sqrt-demand: constructed profile is non-trivial eps-NE", rep.epsilon, o.epsilon,
                        rep.verdict == Verdict::kNonTrivialNE});
    r.outputs["sqrt_demand"] = {{"solution", detail::solution_json(sol)},
                                {"oracle_production", oracle},
                                {"profile", messages_to_json(m)},
                                {"allocation", detail::allocation_json(s, a)},
                                {"published_profile_kkt", detail::certificate_json(cert)},
                                {"report", detail::equilibrium_json(rep)}};
  }

  // Saturating demand market.
  {
    const std::string mk = "saturating-demand";
    const auto s = scenarios::saturating_demand_market();
    const auto sol = solve_max1(s, so);
    Energy total = 0.0;
    for (Energy e : sol.production) total += e;
    const auto m = construct_ne(s, sol);
    const auto rep = verify_ne(s, m, o.epsilon, o.search);
    const auto zero = verify_ne(s, MessageProfile(s.size()), o.epsilon, o.search);

    rows.push_back(detail::numeric_row(mk, "total optimal production", "0", total));
    rows.push_back(detail::numeric_row(mk, "p*", "0", sol.shadow_price));
    rows.push_back({mk, "equilibria", "trivial NE only",
                    std::string("trivial NE and ") + to_string(rep.verdict) + " at e*", std::nullopt,
                    rep.verdict == Verdict::kNonTrivialNE});
    rows.push_back({mk, "all-zero profile", "trivial NE", to_string(zero.verdict), std::nullopt,
                    zero.verdict != Verdict::kTrivialNE});

    r.checks.push_back({"saturating-demand: solver KKT certificate", sol.kkt.max_residual, sol.kkt.tol, sol.kkt.passed});
    r.checks.push_back({"saturating-demand: all-zero profile is trivial NE", zero.epsilon, o.epsilon,
                        zero.verdict == Verdict::kTrivialNE});
    r.outputs["saturating_demand"] = {{"solution", detail::solution_json(sol)},
                                      {"profile", messages_to_json(m)},
                                      {"report", detail::equilibrium_json(rep)},
                                      {"zero_profile_report", detail::equilibrium_json(zero)}};
  }

  Json table = Json::array();
  std::ostringstream os;
  os << std::left << std::setw(19) << "market" << std::setw(40) << "quantity" << std::setw(18) << "paper"
     << std::setw(44) << "derived"
     << "status\n";
  std::size_t discrepancies = 0;
  for (const auto& row : rows) {
    discrepancies += row.discrepancy ? 1 : 0;
    os << std::left << std::setw(19) << row.market << std::setw(40) << row.quantity << std::setw(18) << row.published
       << std::setw(44) << row.derived << (row.discrepancy ? "DISCREPANCY" : "match") << "\n";
    Json jr{{"market", row.market},
            {"quantity", row.quantity},
            {"paper", row.published},
            {"derived", row.derived},
            {"status", row.discrepancy ? "DISCREPANCY" : "match"}};
    if (row.derived_value) jr["derived_value"] = *row.derived_value;
    table.push_back(std::move(jr));
  }
  os << discrepancies << " DISCREPANCY rows\n";
  r.outputs["table"] = std::move(table);
  r.outputs["discrepancies"] = discrepancies;
  r.body = os.str();
  detail::finish(r, o, started);
  return r;
}

// Re-runs a command from the inputs echo of an earlier report.
inline RunReport replay(const Json& inputs) {
  const auto command = inputs.at("command").get<std::string>();
  const CommandOptions o = detail::options_from_json(inputs.at("options"));
  if (command == "reproduce-examples") return cmd_reproduce_examples(o);
  const auto s = scenario_from_json(inputs.at("scenario"));
  if (command == "solve") return cmd_solve(s, o);
  if (command == "evaluate") return cmd_evaluate(s, messages_from_json(inputs.at("messages")), o);
  if (command == "equilibrium") {
    const auto mode = inputs.at("mode").get<std::string>();
    if (mode == "construct") return cmd_equilibrium(s, ConstructMode{}, o);
    if (mode == "verify") return cmd_equilibrium(s, VerifyMode{messages_from_json(inputs.at("messages"))}, o);
    return cmd_equilibrium(s,
                           DynamicsMode{messages_from_json(inputs.at("messages")), inputs.at("iterations").get<int>(),
                                        inputs.at("damping").get<double>()},
                           o);
  }
  throw InputError("replay: unknown command \"" + command + "\"");
}

// Runs `body` and converts library exceptions into exit codes.
template <class F>
RunReport guarded(const std::string& command, F&& body) {
  const auto fail = [&](int code, const std::string& msg) {
    RunReport r;
    r.command = command;
    r.error = msg;
    r.exit_code = code;
    return r;
  };
  try {
    return body();
  } catch (const InputError& e) {
    return fail(kExitInputError, e.what());
  } catch (const DomainError& e) {
    return fail(kExitInputError, e.what());
  } catch (const SolverError& e) {
    return fail(kExitCheckFailed, e.what());
  }
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

inline Json to_json(const RunReport& r) {
  Json j{{"command", r.command},       {"scenario_digest", r.scenario_digest}, {"inputs", r.inputs},
         {"outputs", r.outputs},       {"checks", detail::checks_json(r.checks)},
         {"markers", r.markers},       {"elapsed_ms", r.elapsed_ms},           {"exit_code", r.exit_code}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline std::string render(const RunReport& r, Format f) {
  if (f == Format::kMachine) return to_json(r).dump(2) + "\n";
  std::ostringstream os;
  os << "poolmech " << r.command;
  if (!r.scenario_digest.empty()) os << "  [scenario " << r.scenario_digest << "]";
  os << "\n";
  if (!r.error.empty()) os << "error: " << r.error << (r.error.back() == '\n' ? "" : "\n");
  os << r.body;
  if (!r.checks.empty()) {
    os << "property checks:\n";
    for (const auto& c : r.checks) {
      os << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << std::left << std::setw(44) << c.name << " value "
         << detail::num(c.value, 4) << "  tol " << detail::num(c.tol, 3) << "\n";
    }
  }
  for (const auto& m : r.markers) os << m << "\n";
  os << "elapsed " << detail::num(r.elapsed_ms, 4) << " ms, exit code " << r.exit_code << "\n";
  return os.str();
}

}  // namespace poolmech::cli

#endif  // POOLMECH_CLI_HPP
