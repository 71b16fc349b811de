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

#ifndef POOLMECH_CENTRALIZED_HPP
#define POOLMECH_CENTRALIZED_HPP

// The operator's full-information welfare problem
//
//   max_e  u(sum_i e_i) - sum_i C_i(e_i)   s.t.  0 <= e_i <= x_i
//
// solved by bisection on the shadow price, plus a KKT certificate and a
// grid-search oracle used to cross-check the solver.

#include <algorithm>
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

#include "poolmech/error.hpp"
#include "poolmech/model.hpp"

namespace poolmech {

using ProductionVector = std::vector<Energy>;

enum class BoundState { kInterior, kAtZero, kAtCapacity };

inline const char* to_string(BoundState b) {
  switch (b) {
    case BoundState::kInterior: return "interior";
    case BoundState::kAtZero: return "zero";
    case BoundState::kAtCapacity: return "capacity";
  }
  return "?";
}

struct KKTCertificate {
  std::vector<BoundState> bounds;
  std::vector<double> mu;  // capacity multipliers
  std::vector<double> nu;  // nonnegativity multipliers
  std::vector<double> stationarity_residuals;
  std::vector<double> complementarity_residuals;
  Price marginal_utility = 0.0;  // u'(sum e), or its zero-demand surrogate
  double max_residual = 0.0;
  double tol = 0.0;
  bool passed = false;
  std::vector<std::string> failures;
};

struct CentralizedSolution {
  ProductionVector production;
  Price shadow_price = 0.0;
  Utility welfare = 0.0;
  KKTCertificate kkt;
  int iterations = 0;
};

inline void require_feasible(const MarketScenario& s, const ProductionVector& e) {
  if (e.size() != s.size()) {
    std::ostringstream os;
    os << "production vector has " << e.size() << " entries, scenario has " << s.size() << " producers";
    throw DomainError(os.str());
  }
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!(e[i] >= 0.0 && e[i] <= s.producers[i].capacity)) {
      std::ostringstream os;
      os << "production e[" << i << "] = " << e[i] << " outside [0, " << s.producers[i].capacity << "]";
      throw DomainError(os.str());
    }
  }
}

inline Utility welfare(const MarketScenario& s, const ProductionVector& e) {
  require_feasible(s, e);
  Energy total = 0.0;
  Money cost = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    total += e[i];
    cost += cost_eval(s.producers[i].cost, e[i]);
  }
  return demand_utility_eval(s.demand, total) - cost;
}

// Builds the multipliers implied by e and checks stationarity, sign and
// complementary slackness. A coordinate within `tol` of a bound is treated
// as sitting on that bound.
inline KKTCertificate kkt_check(const MarketScenario& s, const ProductionVector& e, double tol) {
  require_feasible(s, e);
  const std::size_t n = s.size();
  KKTCertificate cert;
  cert.tol = tol;
  cert.bounds.resize(n);
  cert.mu.assign(n, 0.0);
  cert.nu.assign(n, 0.0);
  cert.stationarity_residuals.assign(n, 0.0);
  cert.complementarity_residuals.assign(n, 0.0);

  Energy total = 0.0;
  for (Energy v : e) total += v;
  cert.marginal_utility = total > 0.0 ? demand_marginal(s.demand, total) : demand_marginal_at_zero(s.demand);
  const Price mu_d = cert.marginal_utility;

  for (std::size_t i = 0; i < n; ++i) {
    const auto& prod = s.producers[i];
    const Price mc = cost_marginal(prod.cost, e[i]);
    std::ostringstream os;
    if (e[i] <= tol) {
      cert.bounds[i] = BoundState::kAtZero;
      cert.nu[i] = mc - mu_d;
      cert.complementarity_residuals[i] = cert.nu[i] * e[i];
      if (cert.nu[i] < -tol) os << "producer " << i << ": nu = " << cert.nu[i] << " < 0";
    } else if (e[i] >= prod.capacity - tol) {
      cert.bounds[i] = BoundState::kAtCapacity;
      cert.mu[i] = mu_d - mc;
      cert.complementarity_residuals[i] = cert.mu[i] * (prod.capacity - e[i]);
      if (cert.mu[i] < -tol) os << "producer " << i << ": mu = " << cert.mu[i] << " < 0";
    } else {
      cert.bounds[i] = BoundState::kInterior;
      cert.stationarity_residuals[i] = mu_d - mc;
      if (std::abs(cert.stationarity_residuals[i]) > tol) {
        os << "producer " << i << ": stationarity residual " << cert.stationarity_residuals[i];
      }
    }
    if (std::abs(cert.complementarity_residuals[i]) > tol) {
      if (!os.str().empty()) os << "; ";
      os << "producer " << i << ": complementarity residual " << cert.complementarity_residuals[i];
    }
    if (!os.str().empty()) cert.failures.push_back(os.str());

    cert.max_residual = std::max({cert.max_residual, std::abs(cert.stationarity_residuals[i]),
                                  std::abs(cert.complementarity_residuals[i]), -cert.mu[i], -cert.nu[i]});
  }
  cert.passed = cert.failures.empty();
  return cert;
}

struct SolveOptions {
  double tol = 1e-9;       // bisection tolerance (price and excess demand)
  double kkt_tol = 1e-6;   // certificate tolerance
  // When set, the initial bracket and split points are randomized; the
  // optimum must not depend on them.
  std::optional<std::uint64_t> seed;
};

namespace detail {

inline Energy supply_at(const Producer& p, Price price) {
  return std::clamp(cost_marginal_inverse(p.cost, price), 0.0, p.capacity);
}

inline double excess_demand(const MarketScenario& s, Price price, Energy cap) {
  Energy supply = 0.0;
  for (const auto& p : s.producers) supply += supply_at(p, price);
  return optimal_demand(s.demand, price, cap) - supply;
}

}  // namespace detail

inline CentralizedSolution solve_max1(const MarketScenario& s, const SolveOptions& opts = {}) {
  require_valid(s);
  const std::size_t n = s.size();
  const Energy cap = s.effective_demand_cap();
  const Price marginal_at_zero = demand_marginal_at_zero(s.demand);

  CentralizedSolution sol;
  Price min_mc0 = std::numeric_limits<double>::infinity();
  Price max_mc_cap = 0.0;
  for (const auto& p : s.producers) {
    min_mc0 = std::min(min_mc0, cost_marginal(p.cost, 0.0));
    max_mc_cap = std::max(max_mc_cap, cost_marginal(p.cost, p.capacity));
  }

  if (marginal_at_zero <= min_mc0) {
    sol.production.assign(n, 0.0);
    sol.shadow_price = marginal_at_zero;
    sol.welfare = 0.0;
    sol.kkt = kkt_check(s, sol.production, opts.kkt_tol);
    return sol;
  }

  Price lo = 1e-9;
  Price hi = std::max(marginal_at_zero, max_mc_cap) + 1.0;
  std::optional<std::mt19937_64> rng;
  std::uniform_real_distribution<double> split(0.25, 0.75);
  if (opts.seed) {
    rng.emplace(*opts.seed);
    lo *= std::uniform_real_distribution<double>(0.1, 1.0)(*rng);
    hi *= std::uniform_real_distribution<double>(1.0, 3.0)(*rng);
  }

  const double g_lo = detail::excess_demand(s, lo, cap);
  const double g_hi = detail::excess_demand(s, hi, cap);
  if (!(g_lo > 0.0) || !(g_hi <= 0.0)) {
    std::ostringstream os;
    os << "solve_max1: bracket does not change sign: g(" << lo << ") = " << g_lo << ", g(" << hi
       << ") = " << g_hi;
    throw SolverError(os.str());
  }

  Price price = 0.5 * (lo + hi);
  int iter = 0;
  for (; iter < 2000 && hi - lo >= opts.tol; ++iter) {
    const double w = rng ? split(*rng) : 0.5;
    price = lo + w * (hi - lo);
    const double g = detail::excess_demand(s, price, cap);
    if (std::abs(g) <= opts.tol) break;
    (g > 0.0 ? lo : hi) = price;
    price = 0.5 * (lo + hi);
  }
  sol.iterations = iter;

  sol.production.resize(n);
  Energy total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sol.production[i] = detail::supply_at(s.producers[i], price);
    total += sol.production[i];
  }
  sol.shadow_price = total > 0.0 ? demand_marginal(s.demand, total) : marginal_at_zero;
  sol.welfare = welfare(s, sol.production);
  sol.kkt = kkt_check(s, sol.production, opts.kkt_tol);
  if (!sol.kkt.passed) {
    std::ostringstream os;
    os << "solve_max1: solution failed KKT certification (max residual " << sol.kkt.max_residual
       << ", price " << price << ")";
    throw SolverError(os.str());
  }
  return sol;
}

// Grid oracle: coordinate ascent on the lattice {0, step, 2 step, ...} (plus
// each capacity), polished with pairwise +-step moves until no single or
// pairwise move improves welfare. Lowest index wins ties.
inline ProductionVector brute_force_max1(const MarketScenario& s, Energy step) {
  if (!(step > 0.0)) throw DomainError("grid step must be > 0");
  const std::size_t n = s.size();

  std::vector<std::vector<Energy>> grid(n);
  std::vector<std::vector<Money>> grid_cost(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Energy x = s.producers[i].capacity;
    const auto count = static_cast<std::size_t>(std::floor(x / step + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) grid[i].push_back(std::min(x, static_cast<double>(k) * step));
    if (grid[i].back() < x - 1e-12) grid[i].push_back(x);
    for (Energy v : grid[i]) grid_cost[i].push_back(cost_eval(s.producers[i].cost, v));
  }

  std::vector<std::size_t> idx(n, 0);
  const auto total_of = [&]() {
    Energy t = 0.0;
    for (std::size_t i = 0; i < n; ++i) t += grid[i][idx[i]];
    return t;
  };
  const auto value_of = [&]() {
    Money c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += grid_cost[i][idx[i]];
    return demand_utility_eval(s.demand, total_of()) - c;
  };
  constexpr double kImprove = 1e-13;

  for (int round = 0; round < 100000; ++round) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const Energy others = total_of() - grid[i][idx[i]];
      std::size_t best = 0;
      double best_val = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < grid[i].size(); ++k) {
        const double v = demand_utility_eval(s.demand, others + grid[i][k]) - grid_cost[i][k];
        if (v > best_val + kImprove) {
          best_val = v;
          best = k;
        }
      }
      const double current = demand_utility_eval(s.demand, total_of()) - grid_cost[i][idx[i]];
      if (best != idx[i] && best_val > current + kImprove) {
        idx[i] = best;
        moved = true;
      }
    }
    if (moved) continue;

    const double base = value_of();
    double best_gain = kImprove;
    std::optional<std::pair<std::size_t, std::size_t>> best_pair;
    std::pair<int, int> best_dir{0, 0};
    const auto shift_ok = [&](std::size_t i, int d) {
      return d > 0 ? idx[i] + 1 < grid[i].size() : idx[i] > 0;
    };
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (int di : {1, -1}) {
          for (int dj : {1, -1}) {
            if (!shift_ok(i, di) || !shift_ok(j, dj)) continue;
            idx[i] += di;
            idx[j] += dj;
            const double gain = value_of() - base;
            idx[i] -= di;
            idx[j] -= dj;
            if (gain > best_gain) {
              best_gain = gain;
              best_pair = {i, j};
              best_dir = {di, dj};
            }
          }
        }
      }
    }
    if (!best_pair) break;
    idx[best_pair->first] += best_dir.first;
    idx[best_pair->second] += best_dir.second;
  }

  ProductionVector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = grid[i][idx[i]];
  return out;
}

}  // namespace poolmech

#endif  // POOLMECH_CENTRALIZED_HPP
