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

#ifndef POOLMECH_SCENARIOS_HPP
#define POOLMECH_SCENARIOS_HPP

// Built-in reference markets. Both share four producers with capacity 2 and
//   C_1 = 2e + e^2,  C_2 = 3e + e^3,  C_3 = 4e + e^4,  C_4 = 5e + e^2.

#include "poolmech/model.hpp"

namespace poolmech::scenarios {

inline std::vector<Producer> four_producer_network() {
  return {
      {CostFunction({{2.0, 1}, {1.0, 2}}), 2.0},
      {CostFunction({{3.0, 1}, {1.0, 3}}), 2.0},
      {CostFunction({{4.0, 1}, {1.0, 4}}), 2.0},
      {CostFunction({{5.0, 1}, {1.0, 2}}), 2.0},
  };
}

// Square-root demand, u(d) = 40 sqrt(d).
inline MarketScenario sqrt_demand_market() { return {four_producer_network(), PowerUtility{40.0, 0.5}, {}}; }

// Saturating demand, u(d) = 100 - (d - 10)^2 up to d = 10.
inline MarketScenario saturating_demand_market() {
  return {four_producer_network(), CappedQuadraticUtility{100.0, 10.0}, {}};
}

// The saturating market with 100 added to every linear cost coefficient.
// Marginal utility never exceeds 20, so nothing is worth producing.
inline MarketScenario prohibitive_cost_market() {
  auto producers = four_producer_network();
  for (auto& p : producers) {
    auto terms = p.cost.terms();
    terms.front().coefficient += 100.0;
    p.cost = CostFunction(std::move(terms));
  }
  return {std::move(producers), CappedQuadraticUtility{100.0, 10.0}, {}};
}

// Four identical producers with C(e) = e + e^2.
inline MarketScenario symmetric_market() {
  std::vector<Producer> producers(4, Producer{CostFunction({{1.0, 1}, {1.0, 2}}), 2.0});
  return {std::move(producers), PowerUtility{40.0, 0.5}, {}};
}

}  // namespace poolmech::scenarios

#endif  // POOLMECH_SCENARIOS_HPP
