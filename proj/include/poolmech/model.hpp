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

#ifndef POOLMECH_MODEL_HPP
#define POOLMECH_MODEL_HPP

// Market environment: producer cost functions, capacities and the aggregate
// demand utility. Everything here is an immutable value type and every
// operation is a pure function.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "poolmech/error.hpp"

namespace poolmech {

using Energy = double;
using Price = double;
using Money = double;
using Utility = double;

// Probe point used wherever "marginal utility at zero demand" is needed for a
// utility family whose derivative diverges at the origin.
inline constexpr Energy kZeroDemandProbe = 1e-9;

// Default demand cap is this multiple of total installed capacity.
inline constexpr double kDefaultDemandCapFactor = 10.0;

struct CostTerm {
  double coefficient = 0.0;
  int exponent = 1;

  friend bool operator==(const CostTerm&, const CostTerm&) = default;
};

// Production cost C(e) = sum_k coefficient_k * e^exponent_k.
class CostFunction {
 public:
  CostFunction() = default;
  explicit CostFunction(std::vector<CostTerm> terms) : terms_(std::move(terms)) {}

  const std::vector<CostTerm>& terms() const { return terms_; }

  friend bool operator==(const CostFunction&, const CostFunction&) = default;

 private:
  std::vector<CostTerm> terms_;
};

// u(d) = scale * d^exponent with exponent in (0, 1).
struct PowerUtility {
  double scale = 1.0;
  double exponent = 0.5;

  friend bool operator==(const PowerUtility&, const PowerUtility&) = default;
};

// u(d) = peak - (d - saturation)^2 below saturation, peak above it.
struct CappedQuadraticUtility {
  double peak = 1.0;
  double saturation = 1.0;

  friend bool operator==(const CappedQuadraticUtility&,
                         const CappedQuadraticUtility&) = default;
};

using DemandUtility = std::variant<PowerUtility, CappedQuadraticUtility>;

struct Producer {
  CostFunction cost;
  Energy capacity = 0.0;

  friend bool operator==(const Producer&, const Producer&) = default;
};

struct MarketScenario {
  std::vector<Producer> producers;
  DemandUtility demand;
  // Upper bound on optimal demand; defaults to 10x total capacity.
  std::optional<Energy> demand_cap;

  std::size_t size() const { return producers.size(); }

  Energy total_capacity() const {
    Energy total = 0.0;
    for (const auto& p : producers) total += p.capacity;
    return total;
  }

  Energy effective_demand_cap() const {
    return demand_cap.value_or(kDefaultDemandCapFactor * total_capacity());
  }

  friend bool operator==(const MarketScenario&, const MarketScenario&) = default;
};

namespace detail {

inline void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0)) {
    std::ostringstream os;
    os << what << " must be >= 0, got " << v;
    throw DomainError(os.str());
  }
}

inline double ipow(double base, int exponent) {
  double result = 1.0;
  for (int k = 0; k < exponent; ++k) result *= base;
  return result;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace detail

// ---------------------------------------------------------------------------
// Cost functions
// ---------------------------------------------------------------------------

inline Money cost_eval(const CostFunction& c, Energy e) {
  detail::require_nonnegative(e, "energy");
  Money total = 0.0;
  for (const auto& t : c.terms()) total += t.coefficient * detail::ipow(e, t.exponent);
  return total;
}

inline Price cost_marginal(const CostFunction& c, Energy e) {
  detail::require_nonnegative(e, "energy");
  Price total = 0.0;
  for (const auto& t : c.terms()) {
    total += static_cast<double>(t.exponent) * t.coefficient * detail::ipow(e, t.exponent - 1);
  }
  return total;
}

// Unique e >= 0 with C'(e) = p, or 0 when p <= C'(0). Monotone bisection on a
// geometrically grown bracket.
inline Energy cost_marginal_inverse(const CostFunction& c, Price p) {
  if (!(p > 0.0)) {
    std::ostringstream os;
    os << "price must be > 0, got " << p;
    throw DomainError(os.str());
  }
  if (p <= cost_marginal(c, 0.0)) return 0.0;

  Energy lo = 0.0;
  Energy hi = 1.0;
  for (int grow = 0; cost_marginal(c, hi) < p; ++grow) {
    if (grow > 1100 || !std::isfinite(hi)) {
      throw SolverError("cost_marginal_inverse: marginal cost never reaches price");
    }
    lo = hi;
    hi *= 2.0;
  }

  // Run to (near) machine resolution so the inverse also round-trips C'.
  Energy mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 2000; ++iter) {
    mid = 0.5 * (lo + hi);
    const double r = cost_marginal(c, mid) - p;
    if (r == 0.0 || hi - lo <= 1e-15 * mid) break;
    (r < 0.0 ? lo : hi) = mid;
  }
  return mid;
}

// ---------------------------------------------------------------------------
// Demand utility
// ---------------------------------------------------------------------------

inline Utility demand_utility_eval(const DemandUtility& u, Energy d) {
  detail::require_nonnegative(d, "demand");
  return std::visit(
      detail::overloaded{
          [d](const PowerUtility& f) { return d == 0.0 ? 0.0 : f.scale * std::pow(d, f.exponent); },
          [d](const CappedQuadraticUtility& f) {
            if (d >= f.saturation) return f.peak;
            const double gap = d - f.saturation;
            return f.peak - gap * gap;
          }},
      u);
}

inline Price demand_marginal(const DemandUtility& u, Energy d) {
  detail::require_nonnegative(d, "demand");
  return std::visit(
      detail::overloaded{
          [d](const PowerUtility& f) {
            if (d == 0.0) throw DomainError("power utility has unbounded marginal at zero demand");
            return f.scale * f.exponent * std::pow(d, f.exponent - 1.0);
          },
          [d](const CappedQuadraticUtility& f) {
            return d >= f.saturation ? 0.0 : 2.0 * (f.saturation - d);
          }},
      u);
}

// Marginal utility at zero demand: exact where finite, otherwise evaluated at
// kZeroDemandProbe.
inline Price demand_marginal_at_zero(const DemandUtility& u) {
  return std::visit(
      detail::overloaded{[&](const PowerUtility&) { return demand_marginal(u, kZeroDemandProbe); },
                         [&](const CappedQuadraticUtility&) { return demand_marginal(u, 0.0); }},
      u);
}

// argmax_{0 <= d <= cap} u(d) - p d.
inline Energy optimal_demand(const DemandUtility& u, Price p, Energy cap) {
  detail::require_nonnegative(p, "price");
  if (!(cap > 0.0)) throw DomainError("demand cap must be > 0");
  const Energy unconstrained = std::visit(
      detail::overloaded{
          [p, cap](const PowerUtility& f) {
            if (p == 0.0) return cap;
            return std::pow(f.scale * f.exponent / p, 1.0 / (1.0 - f.exponent));
          },
          [p](const CappedQuadraticUtility& f) {
            return std::clamp(f.saturation - 0.5 * p, 0.0, f.saturation);
          }},
      u);
  return std::min(cap, unconstrained);
}

// ---------------------------------------------------------------------------
// Scenario validation
// ---------------------------------------------------------------------------

struct Violation {
  std::string rule;  // e.g. "A1/producer-count"
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

namespace detail {

inline std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int k = 0; k < count; ++k) {
    pts.push_back(std::exp(a + (b - a) * k / (count - 1)));
  }
  return pts;
}

inline void check_cost(const CostFunction& c, std::size_t index, double sample_hi,
                       std::vector<Violation>& out) {
  const auto tag = [&](const std::string& msg) {
    std::ostringstream os;
    os << "producer " << index << ": " << msg;
    return os.str();
  };
  bool has_linear = false;
  bool has_curvature = false;
  bool structurally_ok = true;
  for (const auto& t : c.terms()) {
    if (!std::isfinite(t.coefficient) || t.coefficient < 0.0) {
      std::ostringstream os;
      os << "cost coefficient " << t.coefficient << " on e^" << t.exponent << " is negative";
      out.push_back({"A5/cost-convexity", tag(os.str())});
      structurally_ok = false;
    }
    if (t.exponent < 1) {
      std::ostringstream os;
      os << "cost exponent " << t.exponent << " must be >= 1";
      out.push_back({"A5/cost-zero", tag(os.str())});
      structurally_ok = false;
    }
    if (t.exponent == 1 && t.coefficient > 0.0) has_linear = true;
    if (t.exponent >= 2 && t.coefficient > 0.0) has_curvature = true;
  }
  if (!has_linear) {
    out.push_back({"A5/cost-increasing", tag("no positive linear term, marginal cost vanishes at 0")});
  }
  if (!has_curvature) {
    out.push_back({"A5/cost-convexity", tag("no positive term of degree >= 2, cost is not strictly convex")});
  }
  if (!structurally_ok || !(sample_hi > 0.0)) return;

  if (cost_eval(c, 0.0) != 0.0) out.push_back({"A5/cost-zero", tag("C(0) != 0")});
  Price previous = cost_marginal(c, 0.0);
  for (double e : log_spaced(sample_hi * 1e-6, sample_hi, 64)) {
    const Price m = cost_marginal(c, e);
    if (!(m > 0.0)) {
      out.push_back({"A5/cost-increasing", tag("marginal cost not positive at sample point")});
      return;
    }
    if (has_curvature && m < previous) {
      out.push_back({"A5/cost-convexity", tag("marginal cost not strictly increasing at sample point")});
      return;
    }
    previous = m;
  }
  if (has_curvature && !(previous > cost_marginal(c, 0.0))) {
    out.push_back({"A5/cost-convexity", tag("marginal cost does not increase over the sampled range")});
  }
}

inline void check_demand(const DemandUtility& u, std::vector<Violation>& out) {
  const std::size_t before = out.size();
  std::visit(
      overloaded{
          [&](const PowerUtility& f) {
            if (!(f.scale > 0.0) || !std::isfinite(f.scale)) {
              out.push_back({"A9/demand-increasing", "power utility scale must be > 0"});
            }
            if (!(f.exponent > 0.0 && f.exponent < 1.0)) {
              out.push_back({"A9/demand-concavity", "power utility exponent must lie in (0, 1)"});
            }
          },
          [&](const CappedQuadraticUtility& f) {
            if (!(f.saturation > 0.0) || !std::isfinite(f.saturation)) {
              out.push_back({"A9/demand-increasing", "capped quadratic saturation must be > 0"});
              return;
            }
            const double expected = f.saturation * f.saturation;
            if (std::abs(f.peak - expected) > 1e-12 * expected) {
              std::ostringstream os;
              os << "capped quadratic needs peak == saturation^2 for u(0) = 0 (peak " << f.peak
                 << ", saturation^2 " << expected << ")";
              out.push_back({"A9/demand-zero", os.str()});
            }
          }},
      u);
  if (out.size() != before) return;

  const double hi = std::visit(
      overloaded{[](const PowerUtility&) { return 1e3; },
                 [](const CappedQuadraticUtility& f) { return f.saturation * (1.0 - 1e-9); }},
      u);
  if (demand_utility_eval(u, 0.0) != 0.0) out.push_back({"A9/demand-zero", "u(0) != 0"});
  Price previous = std::numeric_limits<double>::infinity();
  for (double d : log_spaced(hi * 1e-6, hi, 64)) {
    const Price m = demand_marginal(u, d);
    if (!(m > 0.0)) {
      out.push_back({"A9/demand-increasing", "marginal utility not positive at sample point"});
      return;
    }
    if (!(m < previous)) {
      out.push_back({"A9/demand-concavity", "marginal utility not strictly decreasing at sample point"});
      return;
    }
    previous = m;
  }
}

}  // namespace detail

inline ValidationReport validate_scenario(const MarketScenario& s) {
  ValidationReport report;
  auto& out = report.violations;
  if (s.size() <= 3) {
    std::ostringstream os;
    os << "need more than 3 producers, got " << s.size();
    out.push_back({"A1/producer-count", os.str()});
  }
  double max_capacity = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double cap = s.producers[i].capacity;
    if (!(cap > 0.0) || !std::isfinite(cap)) {
      std::ostringstream os;
      os << "producer " << i << ": capacity must be > 0, got " << cap;
      out.push_back({"A3/capacity", os.str()});
    } else {
      max_capacity = std::max(max_capacity, cap);
    }
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    detail::check_cost(s.producers[i].cost, i, 2.0 * max_capacity, out);
  }
  detail::check_demand(s.demand, out);
  if (s.demand_cap) {
    const double cap = *s.demand_cap;
    if (!(cap > 0.0) || !(cap >= s.total_capacity()) || !std::isfinite(cap)) {
      std::ostringstream os;
      os << "demand cap " << cap << " must be positive, finite and >= total capacity " << s.total_capacity();
      out.push_back({"A7/demand-cap", os.str()});
    }
  }
  return report;
}

inline void require_valid(const MarketScenario& s) {
  const auto report = validate_scenario(s);
  if (report.ok()) return;
  std::ostringstream os;
  os << "invalid scenario:";
  for (const auto& v : report.violations) os << "\n  [" << v.rule << "] " << v.detail;
  throw DomainError(os.str());
}

}  // namespace poolmech

#endif  // POOLMECH_MODEL_HPP
