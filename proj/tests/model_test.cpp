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

#include "poolmech/model.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "poolmech/scenarios.hpp"

namespace poolmech {
namespace {

const CostFunction kQuadratic({{2.0, 1}, {1.0, 2}});  // 2e + e^2
const CostFunction kCubic({{3.0, 1}, {1.0, 3}});      // 3e + e^3
const CostFunction kQuartic({{4.0, 1}, {1.0, 4}});    // 4e + e^4
const CostFunction kSteep({{5.0, 1}, {1.0, 2}});      // 5e + e^2

TEST(CostFunctionTest, Evaluates) {
  EXPECT_DOUBLE_EQ(cost_eval(kQuadratic, 2.0), 8.0);
  EXPECT_DOUBLE_EQ(cost_eval(kSteep, 1.5), 9.75);
  for (const auto& c : {kQuadratic, kCubic, kQuartic, kSteep}) EXPECT_EQ(cost_eval(c, 0.0), 0.0);
}

TEST(CostFunctionTest, Marginal) {
  EXPECT_NEAR(cost_marginal(kQuartic, 1.1), 9.324, 1e-12);
  EXPECT_DOUBLE_EQ(cost_marginal(kQuadratic, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(cost_marginal(kCubic, 1.5), 9.75);
}

TEST(CostFunctionTest, NegativeEnergyIsDomainError) {
  EXPECT_THROW(cost_eval(kQuadratic, -1e-12), DomainError);
  EXPECT_THROW(cost_marginal(kQuadratic, -1.0), DomainError);
}

TEST(CostFunctionTest, MarginalInverse) {
  EXPECT_NEAR(cost_marginal_inverse(kQuadratic, 9.324), 3.662, 1e-9);
  EXPECT_EQ(cost_marginal_inverse(kCubic, 3.0), 0.0);
  EXPECT_EQ(cost_marginal_inverse(kQuartic, 2.0), 0.0);
  EXPECT_THROW(cost_marginal_inverse(kQuadratic, 0.0), DomainError);
  EXPECT_THROW(cost_marginal_inverse(kQuadratic, -3.0), DomainError);
}

TEST(CostFunctionTest, InverseResidualWithinTolerance) {
  for (double p : {4.5, 9.324, 50.0, 1e4}) {
    const double e = cost_marginal_inverse(kQuartic, p);
    EXPECT_LE(std::abs(cost_marginal(kQuartic, e) - p), 1e-10 * std::max(1.0, p)) << p;
  }
}

TEST(CostFunctionTest, LinearOnlyCostCannotBeInverted) {
  EXPECT_THROW(cost_marginal_inverse(CostFunction({{1.0, 1}}), 2.0), SolverError);
}

// Strict convexity and inverse round trip on random validated polynomials.
TEST(CostFunctionTest, PropertiesOnRandomPolynomials) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coeff(0.1, 5.0);
  std::uniform_int_distribution<int> degree(2, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const CostFunction c({{coeff(rng), 1}, {coeff(rng), degree(rng)}});
    const double cap = 1.0 + 2.0 * unit(rng);
    double e1 = 10.0 * cap * unit(rng);
    double e2 = 10.0 * cap * unit(rng);
    if (e1 > e2) std::swap(e1, e2);
    if (e1 > 0.0 && e1 < e2) {
      EXPECT_LT(cost_marginal(c, e1), cost_marginal(c, e2));
    }

    const double e = 10.0 * cap * (1e-3 + unit(rng));
    if (e > 10.0 * cap) continue;
    const double back = cost_marginal_inverse(c, cost_marginal(c, e));
    EXPECT_NEAR(back, e, 1e-8 * e) << "trial " << trial;
  }
}

TEST(DemandUtilityTest, Evaluates) {
  const DemandUtility sqrt_u = PowerUtility{40.0, 0.5};
  const DemandUtility sat_u = CappedQuadraticUtility{100.0, 10.0};
  EXPECT_NEAR(demand_utility_eval(sqrt_u, 4.6), 85.79044235810886, 1e-12);
  EXPECT_EQ(demand_utility_eval(sqrt_u, 0.0), 0.0);
  EXPECT_EQ(demand_utility_eval(sat_u, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(demand_utility_eval(sat_u, 10.0), 100.0);
  EXPECT_DOUBLE_EQ(demand_utility_eval(sat_u, 25.0), 100.0);
  EXPECT_THROW(demand_utility_eval(sqrt_u, -1.0), DomainError);
}

TEST(DemandUtilityTest, Marginal) {
  const DemandUtility sqrt_u = PowerUtility{40.0, 0.5};
  const DemandUtility sat_u = CappedQuadraticUtility{100.0, 10.0};
  EXPECT_NEAR(demand_marginal(sqrt_u, 4.6), 9.325048082403138, 1e-12);
  EXPECT_DOUBLE_EQ(demand_marginal(sat_u, 0.0), 20.0);
  EXPECT_EQ(demand_marginal(sat_u, 10.0), 0.0);
  EXPECT_EQ(demand_marginal(sat_u, 12.0), 0.0);
  EXPECT_THROW(demand_marginal(sqrt_u, 0.0), DomainError);
  EXPECT_DOUBLE_EQ(demand_marginal_at_zero(sat_u), 20.0);
  EXPECT_NEAR(demand_marginal_at_zero(sqrt_u), 20.0 / std::sqrt(kZeroDemandProbe), 1e-6);
}

TEST(DemandUtilityTest, OptimalDemand) {
  const DemandUtility sqrt_u = PowerUtility{40.0, 0.5};
  const DemandUtility sat_u = CappedQuadraticUtility{100.0, 10.0};
  EXPECT_NEAR(optimal_demand(sqrt_u, 10.0, 100.0), 4.0, 1e-12);
  EXPECT_EQ(optimal_demand(sat_u, 20.0, 100.0), 0.0);
  EXPECT_EQ(optimal_demand(sqrt_u, 0.0, 50.0), 50.0);
  EXPECT_DOUBLE_EQ(optimal_demand(sat_u, 4.0, 100.0), 8.0);
  EXPECT_DOUBLE_EQ(optimal_demand(sat_u, 0.0, 100.0), 10.0);
  EXPECT_DOUBLE_EQ(optimal_demand(sat_u, 4.0, 5.0), 5.0);
  EXPECT_THROW(optimal_demand(sqrt_u, -1.0, 10.0), DomainError);
  EXPECT_THROW(optimal_demand(sqrt_u, 1.0, 0.0), DomainError);
}

TEST(DemandUtilityTest, OptimalDemandInvertsMarginal) {
  const DemandUtility families[] = {PowerUtility{40.0, 0.5}, PowerUtility{12.0, 0.3},
                                    CappedQuadraticUtility{100.0, 10.0}};
  for (const auto& u : families) {
    for (double d : {0.05, 0.5, 1.0, 3.3, 7.9, 9.5}) {
      EXPECT_NEAR(optimal_demand(u, demand_marginal(u, d), 1e12), d, 1e-8 * std::max(1.0, d));
    }
  }
}

TEST(DemandUtilityTest, Concave) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.0, 15.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const DemandUtility families[] = {PowerUtility{40.0, 0.5}, PowerUtility{3.0, 0.9},
                                    CappedQuadraticUtility{100.0, 10.0}};
  for (const auto& u : families) {
    for (int k = 0; k < 1000; ++k) {
      const double a = dist(rng);
      const double b = dist(rng);
      const double l = unit(rng);
      EXPECT_GE(demand_utility_eval(u, l * a + (1 - l) * b),
                l * demand_utility_eval(u, a) + (1 - l) * demand_utility_eval(u, b) - 1e-12);
    }
  }
}

TEST(ValidateScenarioTest, ReferenceMarketsPass) {
  EXPECT_TRUE(validate_scenario(scenarios::sqrt_demand_market()).ok());
  EXPECT_TRUE(validate_scenario(scenarios::saturating_demand_market()).ok());
  EXPECT_TRUE(validate_scenario(scenarios::prohibitive_cost_market()).ok());
}

bool has_rule(const ValidationReport& r, const std::string& prefix) {
  for (const auto& v : r.violations) {
    if (v.rule.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

TEST(ValidateScenarioTest, ThreeProducersFail) {
  auto s = scenarios::sqrt_demand_market();
  s.producers.pop_back();
  const auto r = validate_scenario(s);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_rule(r, "A1"));
}

TEST(ValidateScenarioTest, NegativeCoefficientFails) {
  auto s = scenarios::sqrt_demand_market();
  s.producers[2].cost = CostFunction({{4.0, 1}, {-1.0, 2}});
  const auto r = validate_scenario(s);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_rule(r, "A5/cost-convexity"));
}

TEST(ValidateScenarioTest, ItemizesEveryViolation) {
  MarketScenario s;
  s.producers = {{CostFunction({{1.0, 2}}), 1.0}, {CostFunction({{1.0, 1}}), -2.0}};
  s.demand = CappedQuadraticUtility{50.0, 10.0};
  s.demand_cap = 0.0;
  const auto r = validate_scenario(s);
  EXPECT_TRUE(has_rule(r, "A1"));
  EXPECT_TRUE(has_rule(r, "A3"));
  EXPECT_TRUE(has_rule(r, "A5/cost-increasing"));
  EXPECT_TRUE(has_rule(r, "A5/cost-convexity"));
  EXPECT_TRUE(has_rule(r, "A9/demand-zero"));
  EXPECT_TRUE(has_rule(r, "A7/demand-cap"));
}

TEST(ValidateScenarioTest, PowerExponentOutsideUnitIntervalFails) {
  auto s = scenarios::sqrt_demand_market();
  s.demand = PowerUtility{40.0, 1.0};
  EXPECT_TRUE(has_rule(validate_scenario(s), "A9/demand-concavity"));
  s.demand = PowerUtility{-1.0, 0.5};
  EXPECT_TRUE(has_rule(validate_scenario(s), "A9/demand-increasing"));
}

TEST(ValidateScenarioTest, DefaultDemandCap) {
  const auto s = scenarios::sqrt_demand_market();
  EXPECT_DOUBLE_EQ(s.effective_demand_cap(), 80.0);
}

}  // namespace
}  // namespace poolmech
