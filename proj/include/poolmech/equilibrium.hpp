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

#ifndef POOLMECH_EQUILIBRIUM_HPP
#define POOLMECH_EQUILIBRIUM_HPP

// Equilibria of the game induced by the mechanism: construction from the
// centralized optimum, epsilon-Nash verification by numerical best-response
// search, and a damped best-response iteration.
//
// The best-response iteration is a heuristic. It carries no convergence
// guarantee and may cycle or stall on profiles far from equilibrium.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "poolmech/centralized.hpp"
#include "poolmech/error.hpp"
#include "poolmech/mechanism.hpp"
#include "poolmech/model.hpp"

namespace poolmech {

inline constexpr double kDefaultEpsilon = 1e-4;

// Budget and shape of the numerical best-response search. The verdicts of
// verify_ne are only as strong as this search; reports always echo it.
struct SearchParams {
  int grid = 64;                 // coarse grid points per axis
  int top_starts = 3;            // best grid points refined locally
  int random_starts = 4;         // extra seeded starting points
  std::uint64_t seed = 0;
  int max_evaluations = 3000;    // per local refinement
  double x_tol = 1e-10;          // simplex diameter, box-normalized
  double f_tol = 1e-14;          // simplex value spread
};

// Multipliers of producer i's own profit problem, evaluated at a message by
// finite differences.
struct ProducerKKT {
  double d_quantity = 0.0;  // d u_i / d quantity
  double d_price = 0.0;     // d u_i / d price
  double mu_hat = 0.0;      // capacity
  double nu_hat = 0.0;      // quantity >= 0
  double theta_hat = 0.0;   // price >= 0
  double stationarity_residual = 0.0;
};

struct BestResponseResult {
  std::size_t producer = 0;
  Message argmax;
  Utility utility = 0.0;
  Utility incumbent_utility = 0.0;
  Utility gap = 0.0;
  Energy quantity_hi = 0.0;
  Price price_hi = 0.0;
  int grid = 0;
  int refinement_starts = 0;
  int evaluations = 0;
  bool converged = true;  // false: some refinement ran out of budget
  ProducerKKT kkt;
};

enum class Verdict { kTrivialNE, kNonTrivialNE, kNotNE };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kTrivialNE: return "trivial-NE";
    case Verdict::kNonTrivialNE: return "non-trivial-eps-NE";
    case Verdict::kNotNE: return "not-NE";
  }
  return "?";
}

struct PropertyReport {
  Price price_spread = 0.0;
  Price mean_price = 0.0;
  Energy zeta = 0.0;
  Price marginal_utility = 0.0;  // u'(sum e), zero-demand surrogate at 0
  std::vector<Money> tax_identity_residual;  // |t_i - mean price * e_i|
  std::vector<Utility> producer_utility;
  Utility consumer_utility = 0.0;
  std::vector<BoundState> bounds;
  // |u'(sum e) - C_i'(e_i)| for interior producers, C_i'(x_i) - u'(sum e) at
  // capacity, C_i'(0) - u'(sum e) at zero (informational).
  std::vector<double> price_efficiency;
  Money budget_audit = 0.0;
  Money tax_magnitude = 0.0;  // sum |t_i|
};

struct PropertyCheck {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool passed = true;
};

struct EquilibriumReport {
  std::vector<BestResponseResult> responses;
  double epsilon = 0.0;      // max best-response gap
  double threshold = 0.0;    // epsilon the verdict was judged against
  Verdict verdict = Verdict::kNotNE;
  bool inconclusive = false;
  SearchParams search;
  PropertyReport properties;
  std::vector<PropertyCheck> checks;

  bool all_checks_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
};

// ---------------------------------------------------------------------------

inline MessageProfile construct_ne(const MarketScenario& s, const CentralizedSolution& c) {
  if (!c.kkt.passed) throw DomainError("construct_ne: centralized solution is not KKT-certified");
  if (c.production.size() != s.size()) throw DomainError("construct_ne: solution size mismatch");
  Energy total = 0.0;
  for (Energy e : c.production) total += e;
  MessageProfile m(s.size());
  if (total <= 0.0) return m;
  const Price price = demand_marginal(s.demand, total);
  for (std::size_t i = 0; i < s.size(); ++i) m[i] = {c.production[i], price};
  return m;
}

// Producer i's profit -C_i(q) + t_i as a function of its own message, the
// rest of the profile held fixed.
class ProducerObjective {
 public:
  ProducerObjective(const MarketScenario& s, MessageProfile m, std::size_t i)
      : scenario_(&s), profile_(std::move(m)), index_(i) {}

  Utility operator()(Energy q, Price p) const {
    ++evaluations_;
    profile_[index_] = {q, p};
    const auto a = detail::allocate(*scenario_, profile_);
    return -cost_eval(scenario_->producers[index_].cost, q) + a.taxes[index_];
  }

  // Tax alone; quantities slightly outside [0, x_i] are allowed.
  Money tax(Energy q, Price p) const {
    profile_[index_] = {q, p};
    return detail::allocate(*scenario_, profile_).taxes[index_];
  }

  int evaluations() const { return evaluations_; }

 private:
  const MarketScenario* scenario_;
  mutable MessageProfile profile_;
  std::size_t index_;
  mutable int evaluations_ = 0;
};

namespace detail {

struct Probe {
  double q = 0.0;
  double p = 0.0;
  double value = -std::numeric_limits<double>::infinity();
};

// Higher value wins; ties go to smaller quantity, then smaller price.
inline bool better(const Probe& a, const Probe& b) {
  if (a.value != b.value) return a.value > b.value;
  if (a.q != b.q) return a.q < b.q;
  return a.p < b.p;
}

// Nelder-Mead on the unit square, vertices projected onto the box. Every
// evaluated point is offered to `best`.
template <class F>
bool nelder_mead_box(const F& f, std::array<double, 2> start, double init_step, const SearchParams& sp,
                     Probe& best, int& evals) {
  using Pt = std::array<double, 2>;
  const auto clamp01 = [](Pt x) {
    for (auto& v : x) v = std::clamp(v, 0.0, 1.0);
    return x;
  };
  struct Vertex {
    Pt x;
    double fx;
  };
  const auto eval = [&](Pt x) {
    x = clamp01(x);
    const Probe probe = f(x[0], x[1]);
    ++evals;
    if (better(probe, best)) best = probe;
    return Vertex{x, probe.value};
  };

  std::array<Vertex, 3> simplex{
      eval(start),
      eval(Pt{start[0] + (start[0] + init_step <= 1.0 ? init_step : -init_step), start[1]}),
      eval(Pt{start[0], start[1] + (start[1] + init_step <= 1.0 ? init_step : -init_step)})};

  int used = 3;
  while (used < sp.max_evaluations) {
    std::sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.fx > b.fx; });
    double diameter = 0.0;
    for (int k = 1; k < 3; ++k) {
      diameter = std::max({diameter, std::abs(simplex[k].x[0] - simplex[0].x[0]),
                           std::abs(simplex[k].x[1] - simplex[0].x[1])});
    }
    if (diameter <= sp.x_tol || std::abs(simplex[0].fx - simplex[2].fx) <= sp.f_tol) return true;

    const Pt centroid{0.5 * (simplex[0].x[0] + simplex[1].x[0]), 0.5 * (simplex[0].x[1] + simplex[1].x[1])};
    const auto along = [&](double t) {
      return Pt{centroid[0] + t * (simplex[2].x[0] - centroid[0]), centroid[1] + t * (simplex[2].x[1] - centroid[1])};
    };
    const Vertex reflected = eval(along(-1.0));
    ++used;
    if (reflected.fx > simplex[0].fx) {
      const Vertex expanded = eval(along(-2.0));
      ++used;
      simplex[2] = expanded.fx > reflected.fx ? expanded : reflected;
    } else if (reflected.fx > simplex[1].fx) {
      simplex[2] = reflected;
    } else {
      const Vertex contracted = reflected.fx > simplex[2].fx ? eval(along(-0.5)) : eval(along(0.5));
      ++used;
      if (contracted.fx > std::max(reflected.fx, simplex[2].fx)) {
        simplex[2] = contracted;
      } else {
        for (int k = 1; k < 3; ++k) {
          simplex[k] = eval(Pt{0.5 * (simplex[0].x[0] + simplex[k].x[0]), 0.5 * (simplex[0].x[1] + simplex[k].x[1])});
          ++used;
        }
      }
    }
  }
  return false;
}

inline ProducerKKT producer_kkt(const ProducerObjective& f, const Message& at, Energy cap, Price p_hi) {
  ProducerKKT k;
  const double hq = 1e-6 * std::max(1.0, cap);
  const double hp = 1e-6 * std::max(1.0, p_hi);
  const auto diff = [](double fwd, double bwd, double step) { return (fwd - bwd) / step; };
  {
    const double lo = std::max(0.0, at.quantity - hq);
    const double hi = std::min(cap, at.quantity + hq);
    k.d_quantity = diff(f(hi, at.price), f(lo, at.price), hi - lo);
  }
  {
    const double lo = std::max(0.0, at.price - hp);
    const double hi = at.price + hp;
    k.d_price = diff(f(at.quantity, hi), f(at.quantity, lo), hi - lo);
  }
  double residual_q = k.d_quantity;
  if (at.quantity >= cap) {
    k.mu_hat = std::max(0.0, k.d_quantity);
    residual_q -= k.mu_hat;
  } else if (at.quantity <= 0.0) {
    k.nu_hat = std::max(0.0, -k.d_quantity);
    residual_q += k.nu_hat;
  }
  double residual_p = k.d_price;
  if (at.price <= 0.0) {
    k.theta_hat = std::max(0.0, -k.d_price);
    residual_p += k.theta_hat;
  }
  k.stationarity_residual = std::max(std::abs(residual_q), std::abs(residual_p));
  return k;
}

}  // namespace detail

inline Price best_response_price_bound(const MarketScenario& s, const MessageProfile& m) {
  Price p_cap = 0.0;
  for (const auto& prod : s.producers) p_cap = std::max(p_cap, cost_marginal(prod.cost, prod.capacity));
  p_cap *= 4.0;
  Price hi = std::max(std::min(demand_marginal_at_zero(s.demand), p_cap), 1.0);
  for (const auto& msg : m) hi = std::max(hi, msg.price);
  return 2.0 * hi;
}

// Maximizes producer i's profit over [0, x_i] x [0, price bound] by a coarse
// grid followed by box-confined Nelder-Mead from the best grid points, the
// incumbent and a few seeded random points. The incumbent is always probed,
// so the gap is never negative.
inline BestResponseResult best_response(const MarketScenario& s, const MessageProfile& m, std::size_t i,
                                        const SearchParams& sp = {}) {
  require_valid_profile(s, m);
  if (i >= s.size()) throw DomainError("best_response: producer index out of range");
  if (sp.grid < 2) throw DomainError("best_response: grid must have at least 2 points per axis");

  BestResponseResult r;
  r.producer = i;
  r.grid = sp.grid;
  r.quantity_hi = s.producers[i].capacity;
  r.price_hi = best_response_price_bound(s, m);

  const ProducerObjective objective(s, m, i);
  const double q_hi = r.quantity_hi;
  const double p_hi = r.price_hi;
  const auto probe_at = [&](double q, double p) { return detail::Probe{q, p, objective(q, p)}; };
  const auto probe_unit = [&](double uq, double up) { return probe_at(uq * q_hi, up * p_hi); };

  const detail::Probe incumbent = probe_at(m[i].quantity, m[i].price);
  detail::Probe best = incumbent;

  std::vector<detail::Probe> grid_probes;
  grid_probes.reserve(static_cast<std::size_t>(sp.grid) * static_cast<std::size_t>(sp.grid));
  const double denom = static_cast<double>(sp.grid - 1);
  for (int a = 0; a < sp.grid; ++a) {
    for (int b = 0; b < sp.grid; ++b) {
      grid_probes.push_back(probe_unit(a / denom, b / denom));
      if (detail::better(grid_probes.back(), best)) best = grid_probes.back();
    }
  }
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(std::max(sp.top_starts, 0)), grid_probes.size());
  std::partial_sort(grid_probes.begin(), grid_probes.begin() + static_cast<std::ptrdiff_t>(keep), grid_probes.end(),
                    detail::better);

  std::vector<std::array<double, 2>> starts;
  starts.push_back({incumbent.q / q_hi, incumbent.p / p_hi});
  for (std::size_t k = 0; k < keep; ++k) starts.push_back({grid_probes[k].q / q_hi, grid_probes[k].p / p_hi});
  std::mt19937_64 rng(sp.seed + 0x9e3779b97f4a7c15ULL * (i + 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < sp.random_starts; ++k) starts.push_back({unit(rng), unit(rng)});

  int evals = 0;
  for (const auto& start : starts) {
    const bool ok = detail::nelder_mead_box(probe_unit, start, 1.0 / denom, sp, best, evals);
    r.converged = r.converged && ok;
  }
  r.refinement_starts = static_cast<int>(starts.size());
  r.evaluations = objective.evaluations();

  r.argmax = {best.q, best.p};
  r.utility = best.value;
  r.incumbent_utility = incumbent.value;
  r.gap = best.value - incumbent.value;
  r.kkt = detail::producer_kkt(objective, r.argmax, q_hi, p_hi);
  return r;
}

// Central finite difference of t_i in producer i's own quantity.
inline double tax_quantity_slope(const MarketScenario& s, const MessageProfile& m, std::size_t i,
                                 double step = 1e-5) {
  require_valid_profile(s, m);
  const ProducerObjective objective(s, m, i);
  const double q = m[i].quantity;
  return (objective.tax(q + step, m[i].price) - objective.tax(q - step, m[i].price)) / (2.0 * step);
}

inline PropertyReport equilibrium_properties(const MarketScenario& s, const MessageProfile& m) {
  require_valid_profile(s, m);
  const auto a = outcome(s, m);
  const std::size_t n = s.size();
  PropertyReport r;
  r.mean_price = a.mean_price;
  r.zeta = a.zeta;

  Price lo = std::numeric_limits<double>::infinity();
  Price hi = -lo;
  Energy total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lo = std::min(lo, m[i].price);
    hi = std::max(hi, m[i].price);
    total += a.production[i];
  }
  r.price_spread = hi - lo;
  r.marginal_utility = total > 0.0 ? demand_marginal(s.demand, total) : demand_marginal_at_zero(s.demand);

  r.tax_identity_residual.resize(n);
  r.producer_utility.resize(n);
  r.bounds.resize(n);
  r.price_efficiency.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& prod = s.producers[i];
    const Energy e = a.production[i];
    r.tax_identity_residual[i] = std::abs(a.taxes[i] - a.mean_price * e);
    r.producer_utility[i] = -cost_eval(prod.cost, e) + a.taxes[i];
    const Price mc = cost_marginal(prod.cost, e);
    if (e <= 0.0) {
      r.bounds[i] = BoundState::kAtZero;
      r.price_efficiency[i] = mc - r.marginal_utility;
    } else if (e >= prod.capacity) {
      r.bounds[i] = BoundState::kAtCapacity;
      r.price_efficiency[i] = mc - r.marginal_utility;
    } else {
      r.bounds[i] = BoundState::kInterior;
      r.price_efficiency[i] = std::abs(r.marginal_utility - mc);
    }
    r.tax_magnitude += std::abs(a.taxes[i]);
  }
  r.consumer_utility = consumer_utility(s, a);
  r.budget_audit = budget_audit(a);
  return r;
}

namespace detail {

inline std::vector<PropertyCheck> property_checks(const PropertyReport& r, double tol) {
  std::vector<PropertyCheck> out;
  const auto add = [&](std::string name, double value, double t, bool passed) {
    out.push_back({std::move(name), value, t, passed});
  };
  add("feasibility (zeta)", r.zeta, tol, r.zeta <= tol);
  add("equal prices (spread)", r.price_spread, tol, r.price_spread <= tol);

  double tax_id = 0.0;
  for (double v : r.tax_identity_residual) tax_id = std::max(tax_id, v);
  add("tax identity (max |t_i - p e_i|)", tax_id, tol, tax_id <= tol);

  double min_u = std::numeric_limits<double>::infinity();
  for (double v : r.producer_utility) min_u = std::min(min_u, v);
  if (r.producer_utility.empty()) min_u = 0.0;
  add("individual rationality (min u_i)", min_u, tol, min_u >= -tol);

  double eff = 0.0;
  for (std::size_t i = 0; i < r.bounds.size(); ++i) {
    if (r.bounds[i] == BoundState::kInterior) eff = std::max(eff, r.price_efficiency[i]);
    if (r.bounds[i] == BoundState::kAtCapacity) eff = std::max(eff, r.price_efficiency[i]);
  }
  add("price efficiency (max |u' - C_i'|)", eff, tol, eff <= tol);

  const double budget_tol = 1e-9 * (1.0 + r.tax_magnitude);
  add("budget balance (audit)", r.budget_audit, budget_tol, std::abs(r.budget_audit) <= budget_tol);
  return out;
}

inline bool all_zero(const MessageProfile& m) {
  return std::all_of(m.begin(), m.end(), [](const Message& x) { return x.quantity == 0.0 && x.price == 0.0; });
}

}  // namespace detail

// Runs a best-response search for every producer and classifies the profile.
// A profile within `epsilon` is trivial-NE when every message is (0, 0) and
// non-trivial otherwise.
inline EquilibriumReport verify_ne(const MarketScenario& s, const MessageProfile& m, double epsilon = kDefaultEpsilon,
                                   const SearchParams& sp = {}, double property_tol = 1e-6) {
  require_valid_profile(s, m);
  EquilibriumReport rep;
  rep.search = sp;
  rep.threshold = epsilon;
  for (std::size_t i = 0; i < s.size(); ++i) {
    rep.responses.push_back(best_response(s, m, i, sp));
    rep.epsilon = std::max(rep.epsilon, rep.responses.back().gap);
    rep.inconclusive = rep.inconclusive || !rep.responses.back().converged;
  }
  if (rep.epsilon > epsilon) {
    rep.verdict = Verdict::kNotNE;
  } else {
    rep.verdict = detail::all_zero(m) ? Verdict::kTrivialNE : Verdict::kNonTrivialNE;
  }
  rep.properties = equilibrium_properties(s, m);
  rep.checks = detail::property_checks(rep.properties, property_tol);
  return rep;
}

struct DynamicsTrace {
  std::vector<MessageProfile> profiles;  // profiles[0] is the initial profile
  std::vector<double> round_changes;     // max message change per round
  bool settled = false;                  // last round moved <= 1e-6
};

// Gauss-Seidel damped best-response iteration. Heuristic only: the trace is
// deterministic for fixed inputs, but no limit point is promised.
inline DynamicsTrace best_response_dynamics(const MarketScenario& s, const MessageProfile& init, int max_iter,
                                            double damping = 0.5, const SearchParams& sp = {}) {
  require_valid_profile(s, init);
  if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("damping must lie in (0, 1]");
  DynamicsTrace trace;
  trace.profiles.push_back(init);
  MessageProfile current = init;
  for (int round = 0; round < max_iter; ++round) {
    double change = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto br = best_response(s, current, i, sp);
      const Message old = current[i];
      Message next{(1.0 - damping) * old.quantity + damping * br.argmax.quantity,
                   (1.0 - damping) * old.price + damping * br.argmax.price};
      next.quantity = std::clamp(next.quantity, 0.0, s.producers[i].capacity);
      next.price = std::max(0.0, next.price);
      change = std::max({change, std::abs(next.quantity - old.quantity), std::abs(next.price - old.price)});
      current[i] = next;
    }
    trace.profiles.push_back(current);
    trace.round_changes.push_back(change);
    if (change <= 1e-6) {
      trace.settled = true;
      break;
    }
  }
  return trace;
}

}  // namespace poolmech

#endif  // POOLMECH_EQUILIBRIUM_HPP
