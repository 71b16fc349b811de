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

#ifndef POOLMECH_MECHANISM_HPP
#define POOLMECH_MECHANISM_HPP

// The game form. Each producer i reports a message (quantity, price); the
// outcome schedules the reported quantity and pays
//
//   t_i = p_{i+1} e_i                                  revenue
//       - (p_i - p_{i+1})^2 - p_{i+1}^2 zeta^2         penalty
//       + (p_{i+1} - p_{i+2})^2                        rebate
//
// with cyclic indices, zeta = |D(mean price) - sum e| and D the optimal
// demand. The rebate does not depend on producer i's own message.

#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "poolmech/error.hpp"
#include "poolmech/model.hpp"

namespace poolmech {

struct Message {
  Energy quantity = 0.0;
  Price price = 0.0;

  friend bool operator==(const Message&, const Message&) = default;
};

using MessageProfile = std::vector<Message>;

struct TaxBreakdown {
  Money revenue = 0.0;  // neighbour's price times own quantity
  Money penalty = 0.0;  // always <= 0
  Money rebate = 0.0;   // always >= 0

  // Fixed evaluation order so totals are reproducible bit-for-bit.
  Money total() const { return (revenue + penalty) + rebate; }
};

struct AllocationProfile {
  std::vector<Energy> production;
  std::vector<Money> taxes;
  Price mean_price = 0.0;
  Energy zeta = 0.0;
  Energy demand_at_mean = 0.0;
  std::vector<Money> phi;
  std::vector<TaxBreakdown> breakdown;
};

inline void require_valid_profile(const MarketScenario& s, const MessageProfile& m) {
  if (m.size() != s.size()) {
    std::ostringstream os;
    os << "message profile has " << m.size() << " messages, scenario has " << s.size() << " producers";
    throw DomainError(os.str());
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double cap = s.producers[i].capacity;
    if (!(m[i].quantity >= 0.0 && m[i].quantity <= cap)) {
      std::ostringstream os;
      os << "message " << i << ": quantity " << m[i].quantity << " outside [0, " << cap << "]";
      throw DomainError(os.str());
    }
    if (!(m[i].price >= 0.0) || !std::isfinite(m[i].price)) {
      std::ostringstream os;
      os << "message " << i << ": price " << m[i].price << " must be finite and >= 0";
      throw DomainError(os.str());
    }
  }
}

namespace detail {

// Outcome function without message-space checks. Also used to evaluate the
// tax formula just outside the box (finite differences at capacity).
inline AllocationProfile allocate(const MarketScenario& s, const MessageProfile& m) {
  const std::size_t n = m.size();
  AllocationProfile a;
  a.production.resize(n);
  a.taxes.resize(n);
  a.phi.resize(n);
  a.breakdown.resize(n);

  Energy total = 0.0;
  Price price_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a.production[i] = m[i].quantity;
    total += m[i].quantity;
    price_sum += m[i].price;
  }
  a.mean_price = price_sum / static_cast<double>(n);
  a.demand_at_mean = optimal_demand(s.demand, a.mean_price, s.effective_demand_cap());
  a.zeta = std::abs(a.demand_at_mean - total);

  for (std::size_t i = 0; i < n; ++i) {
    const Price own = m[i].price;
    const Price next = m[(i + 1) % n].price;
    const Price next2 = m[(i + 2) % n].price;
    const double deviation = own - next;
    const double rebate_gap = next - next2;
    // 0 * inf convention: a zero neighbour price silences the mismatch term.
    const Money mismatch = next == 0.0 ? 0.0 : next * next * a.zeta * a.zeta;

    TaxBreakdown& b = a.breakdown[i];
    b.revenue = next * a.production[i];
    b.penalty = -(deviation * deviation) - mismatch;
    b.rebate = rebate_gap * rebate_gap;
    a.phi[i] = b.rebate;
    a.taxes[i] = b.total();
  }
  return a;
}

}  // namespace detail

inline AllocationProfile outcome(const MarketScenario& s, const MessageProfile& m) {
  require_valid_profile(s, m);
  return detail::allocate(s, m);
}

inline TaxBreakdown tax_breakdown(const MarketScenario& s, const MessageProfile& m, std::size_t i) {
  if (i >= s.size()) {
    std::ostringstream os;
    os << "producer index " << i << " out of range for " << s.size() << " producers";
    throw DomainError(os.str());
  }
  return outcome(s, m).breakdown[i];
}

inline Utility producer_utility(const MarketScenario& s, const MessageProfile& m, std::size_t i) {
  if (i >= s.size()) throw DomainError("producer index out of range");
  const auto a = outcome(s, m);
  return -cost_eval(s.producers[i].cost, a.production[i]) + a.taxes[i];
}

inline Utility consumer_utility(const MarketScenario& s, const AllocationProfile& a) {
  Energy consumed = 0.0;
  Money paid = 0.0;
  for (std::size_t i = 0; i < a.taxes.size(); ++i) {
    consumed += a.production[i];
    paid += a.taxes[i];
  }
  return demand_utility_eval(s.demand, consumed) - paid;
}

inline Utility consumer_utility(const MarketScenario& s, const MessageProfile& m) {
  return consumer_utility(s, outcome(s, m));
}

// Net money left with the operator: what the consumer pays (aggregated
// component by component) minus what producers receive. Zero up to
// floating-point reassociation for every profile.
inline Money budget_audit(const AllocationProfile& a) {
  Money revenue = 0.0;
  Money penalty = 0.0;
  Money rebate = 0.0;
  Money receipts = 0.0;
  for (std::size_t i = 0; i < a.taxes.size(); ++i) {
    revenue += a.breakdown[i].revenue;
    penalty += a.breakdown[i].penalty;
    rebate += a.breakdown[i].rebate;
    receipts += a.taxes[i];
  }
  const Money consumer_payment = revenue + penalty + rebate;
  return consumer_payment - receipts;
}

// sum_i (penalty_i + rebate_i). Equals -zeta^2 sum_i p_{i+1}^2.
inline Money redistribution_total(const AllocationProfile& a) {
  Money total = 0.0;
  for (const auto& b : a.breakdown) total += b.penalty + b.rebate;
  return total;
}

}  // namespace poolmech

#endif  // POOLMECH_MECHANISM_HPP
