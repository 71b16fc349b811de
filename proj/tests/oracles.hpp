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

#ifndef POOLMECH_TESTS_ORACLES_HPP
#define POOLMECH_TESTS_ORACLES_HPP

// Test-only reference values and generators.
//
// The frozen optima below were computed outside the library with 30-digit
// arithmetic: 300 bisection steps on the scalar market-clearing condition
// D(p) = sum_i clamp((C_i')^{-1}(p), 0, x_i), using the closed-form inverses
// of the reference cost functions ((p-2)/2, sqrt((p-3)/3), cbrt((p-4)/4),
// (p-5)/2) and D(p) = (20/p)^2 resp. 10 - p/2.

#include <cstdint>
#include <random>
#include <vector>

#include "poolmech/model.hpp"

namespace poolmech::testing {

// Square-root demand market, u(d) = 40 sqrt(d).
inline constexpr double kSqrtPrice = 8.20736610941966549870;
inline const std::vector<double> kSqrtProduction{2.0, 1.31749334083322, 1.01699020714144, 1.60368305470983};
inline constexpr double kSqrtTotal = 5.93816660268449230234;
inline constexpr double kSqrtWelfare = 67.5061565990778085074;
inline const std::vector<double> kSqrtProducerUtility{8.41473221883933, 4.57378011496068, 3.20913759835392,
                                                      2.57179933996346};
inline constexpr double kSqrtConsumerUtility = 48.7367073269604141908;
// Welfare at the published profile (2, 1.5, 1.1, 0): 40 sqrt(4.6) - 25.7391.
inline constexpr double kSqrtPublishedWelfare = 64.0513423581088659042;

// Saturating demand market, u(d) = 100 - (d - 10)^2 on [0, 10].
inline constexpr double kSatPrice = 8.17270825187842422970;
inline const std::vector<double> kSatProduction{2.0, 1.31310170358563, 1.01419004453595, 1.58635412593921};
inline constexpr double kSatWelfare = 53.5352774947554578602;

// Random markets in the acceptance envelope: N in [4, 8], polynomial costs
// with coefficients in [0.5, 5], capacities in [1, 3], u(d) = a sqrt(d) with
// a in [10, 50].
inline MarketScenario random_scenario(std::mt19937_64& rng, int min_n = 4, int max_n = 8) {
  std::uniform_int_distribution<int> n_dist(min_n, max_n);
  std::uniform_real_distribution<double> coeff(0.5, 5.0);
  std::uniform_real_distribution<double> cap(1.0, 3.0);
  std::uniform_int_distribution<int> degree(2, 4);
  std::uniform_int_distribution<int> extra_terms(1, 2);
  std::uniform_real_distribution<double> scale(10.0, 50.0);

  MarketScenario s;
  const int n = n_dist(rng);
  for (int i = 0; i < n; ++i) {
    std::vector<CostTerm> terms{{coeff(rng), 1}};
    const int extra = extra_terms(rng);
    for (int k = 0; k < extra; ++k) terms.push_back({coeff(rng), degree(rng)});
    s.producers.push_back({CostFunction(std::move(terms)), cap(rng)});
  }
  s.demand = PowerUtility{scale(rng), 0.5};
  return s;
}

}  // namespace poolmech::testing

#endif  // POOLMECH_TESTS_ORACLES_HPP
