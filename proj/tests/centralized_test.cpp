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

#include "poolmech/centralized.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "poolmech/scenarios.hpp"

namespace poolmech {
namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

TEST(WelfareTest, PublishedProfile) {
  const auto s = scenarios::sqrt_demand_market();
  const double w = welfare(s, {2.0, 1.5, 1.1, 0.0});
  EXPECT_NEAR(w, testing::kSqrtPublishedWelfare, 1e-12);
  EXPECT_NEAR(w, 64.05, 5e-3);
}

TEST(WelfareTest, ZeroProductionIsZero) {
  EXPECT_EQ(welfare(scenarios::sqrt_demand_market(), {0, 0, 0, 0}), 0.0);
  EXPECT_EQ(welfare(scenarios::saturating_demand_market(), {0, 0, 0, 0}), 0.0);
}

TEST(WelfareTest, InfeasibleIsDomainError) {
  const auto s = scenarios::sqrt_demand_market();
  EXPECT_THROW(welfare(s, {2.1, 0, 0, 0}), DomainError);
  EXPECT_THROW(welfare(s, {-0.1, 0, 0, 0}), DomainError);
  EXPECT_THROW(welfare(s, {1, 1, 1}), DomainError);
}

TEST(SolveMax1Test, SqrtDemandMatchesFrozenOptimum) {
  const auto s = scenarios::sqrt_demand_market();
  const auto sol = solve_max1(s);
  ASSERT_EQ(sol.production.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(sol.production[i], testing::kSqrtProduction[i], 1e-9) << i;
  EXPECT_NEAR(sol.shadow_price, testing::kSqrtPrice, 1e-9);
  EXPECT_NEAR(sol.welfare, testing::kSqrtWelfare, 1e-9);
  EXPECT_DOUBLE_EQ(sol.shadow_price, demand_marginal(s.demand, sum(sol.production)));
  EXPECT_TRUE(sol.kkt.passed);
  EXPECT_EQ(sol.kkt.bounds[0], BoundState::kAtCapacity);
  for (std::size_t i = 1; i < 4; ++i) {
    EXPECT_EQ(sol.kkt.bounds[i], BoundState::kInterior);
    EXPECT_NEAR(cost_marginal(s.producers[i].cost, sol.production[i]), sol.shadow_price, 1e-8);
  }
}

// The saturating market has marginal utility 20 at zero demand, above every
// C_i'(0), so the optimum is interior rather than zero.
TEST(SolveMax1Test, SaturatingDemandHasInteriorOptimum) {
  const auto s = scenarios::saturating_demand_market();
  const auto sol = solve_max1(s);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(sol.production[i], testing::kSatProduction[i], 1e-9) << i;
  EXPECT_NEAR(sol.shadow_price, testing::kSatPrice, 1e-9);
  EXPECT_NEAR(sol.welfare, testing::kSatWelfare, 1e-9);
  EXPECT_GT(sum(sol.production), 5.0);
}

TEST(SolveMax1Test, ProhibitiveCostGivesCorner) {
  const auto s = scenarios::prohibitive_cost_market();
  const auto sol = solve_max1(s);
  for (double e : sol.production) EXPECT_EQ(e, 0.0);
  EXPECT_EQ(sol.welfare, 0.0);
  EXPECT_TRUE(sol.kkt.passed);
}

TEST(SolveMax1Test, RejectsInvalidScenario) {
  auto s = scenarios::sqrt_demand_market();
  s.producers.pop_back();
  EXPECT_THROW(solve_max1(s), DomainError);
}

TEST(SolveMax1Test, SaturatedEverywhere) {
  // Demand so strong that every producer runs at capacity.
  auto s = scenarios::sqrt_demand_market();
  s.demand = PowerUtility{5000.0, 0.5};
  const auto sol = solve_max1(s);
  for (double e : sol.production) EXPECT_EQ(e, 2.0);
  EXPECT_TRUE(sol.kkt.passed);
  for (double mu : sol.kkt.mu) EXPECT_GT(mu, 0.0);
}

TEST(SolveMax1Test, RandomizedBisectionIsSeedIndependent) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = testing::random_scenario(rng);
    const auto base = solve_max1(s);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      SolveOptions o;
      o.seed = seed;
      const auto other = solve_max1(s, o);
      for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(other.production[i], base.production[i], 1e-6);
    }
  }
}

TEST(SolveMax1Test, BeatsGridOracleOnRandomMarkets) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 6; ++trial) {
    const auto s = testing::random_scenario(rng, 4, 6);
    const auto sol = solve_max1(s);
    const auto grid = brute_force_max1(s, 0.01);
    EXPECT_GE(sol.welfare, welfare(s, grid) - 1e-6) << "trial " << trial;
  }
}

TEST(SolveMax1Test, StrongerDemandNeverLowersOutput) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = testing::random_scenario(rng);
    const double base = sum(solve_max1(s).production);
    auto& u = std::get<PowerUtility>(s.demand);
    u.scale *= 1.5;
    EXPECT_GE(sum(solve_max1(s).production), base - 1e-9);
  }
}

TEST(KKTCheckTest, SolverOutputPasses) {
  const auto s = scenarios::sqrt_demand_market();
  const auto sol = solve_max1(s);
  const auto cert = kkt_check(s, sol.production, 1e-6);
  EXPECT_TRUE(cert.passed);
  EXPECT_LE(cert.max_residual, 1e-6);
}

TEST(KKTCheckTest, PublishedProfileFails) {
  const auto s = scenarios::sqrt_demand_market();
  const auto cert = kkt_check(s, {2.0, 1.5, 1.1, 0.0}, 1e-6);
  EXPECT_FALSE(cert.passed);
  EXPECT_EQ(cert.bounds[3], BoundState::kAtZero);
  // nu_4 = C_4'(0) - u'(4.6) = 5 - 20/sqrt(4.6)
  EXPECT_NEAR(cert.nu[3], 5.0 - 20.0 / std::sqrt(4.6), 1e-12);
  EXPECT_NEAR(cert.nu[3], -4.325, 1e-3);
  EXPECT_GE(cert.max_residual, 4.3);
}

TEST(KKTCheckTest, ZeroProductionOnProhibitiveMarketPasses) {
  const auto s = scenarios::prohibitive_cost_market();
  const auto cert = kkt_check(s, {0, 0, 0, 0}, 1e-6);
  EXPECT_TRUE(cert.passed);
  // nu_i = C_i'(0) - u'(0) = (102, 103, 104, 105) - 20
  EXPECT_DOUBLE_EQ(cert.nu[0], 82.0);
  EXPECT_DOUBLE_EQ(cert.nu[3], 85.0);
}

TEST(KKTCheckTest, ZeroProductionOnSqrtMarketFails) {
  const auto cert = kkt_check(scenarios::sqrt_demand_market(), {0, 0, 0, 0}, 1e-6);
  EXPECT_FALSE(cert.passed);
  for (double nu : cert.nu) EXPECT_LT(nu, 0.0);
}

// Near-optimal points pass at a loose tolerance; clearly suboptimal ones fail.
TEST(KKTCheckTest, CertificateTracksOptimality) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const auto s = testing::random_scenario(rng);
    const auto sol = solve_max1(s);
    for (int k = 0; k < 20; ++k) {
      auto e = sol.production;
      for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = std::clamp(e[i] + 1e-6 * noise(rng), 0.0, s.producers[i].capacity);
      }
      if (welfare(s, e) >= sol.welfare - 1e-9) {
        EXPECT_TRUE(kkt_check(s, e, 1e-4).passed);
      }
    }
    for (int k = 0; k < 20; ++k) {
      ProductionVector e(s.size());
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = s.producers[i].capacity * unit(rng);
      if (welfare(s, e) <= sol.welfare - 0.1) {
        EXPECT_FALSE(kkt_check(s, e, 1e-4).passed);
      }
    }
  }
}

TEST(BruteForceTest, AgreesWithSolverOnSqrtMarket) {
  const auto s = scenarios::sqrt_demand_market();
  const auto grid = brute_force_max1(s, 0.01);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(grid[i], testing::kSqrtProduction[i], 0.02) << i;
}

TEST(BruteForceTest, ProhibitiveCostGivesZero) {
  const auto grid = brute_force_max1(scenarios::prohibitive_cost_market(), 0.01);
  for (double e : grid) EXPECT_EQ(e, 0.0);
}

TEST(BruteForceTest, IdenticalProducersGetIdenticalOutput) {
  MarketScenario s;
  s.producers.assign(4, Producer{CostFunction({{1.0, 2}}), 2.0});
  s.demand = PowerUtility{40.0, 0.5};
  const auto grid = brute_force_max1(s, 0.01);
  for (double e : grid) EXPECT_NEAR(e, grid[0], 1e-12);
  // Symmetric optimum: 2 e = 20 / sqrt(4 e)  =>  e = 25^(1/3).
  EXPECT_NEAR(grid[0], std::min(2.0, std::cbrt(25.0)), 0.01);
}

TEST(BruteForceTest, NonPositiveStepIsDomainError) {
  EXPECT_THROW(brute_force_max1(scenarios::sqrt_demand_market(), 0.0), DomainError);
  EXPECT_THROW(brute_force_max1(scenarios::sqrt_demand_market(), -0.1), DomainError);
}

}  // namespace
}  // namespace poolmech
