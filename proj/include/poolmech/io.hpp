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

#ifndef POOLMECH_IO_HPP
#define POOLMECH_IO_HPP

// JSON file formats.
//
// Scenario:
//   {"producers": [{"cost": [[coeff, exponent], ...], "capacity": x}, ...],
//    "demand": {"family": "power", "params": {"scale": a, "exponent": b}}
//            | {"family": "capped_quadratic", "params": {"peak": V, "saturation": d}},
//    "demand_cap": D}                                   (demand_cap optional)
//
// Message profile:
//   {"messages": [{"quantity": q, "price": p}, ...]}
//
// Unknown keys are rejected everywhere.

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "poolmech/mechanism.hpp"
#include "poolmech/model.hpp"

namespace poolmech {

using Json = nlohmann::ordered_json;

// Malformed or schema-violating input. line/column are 1-based and set only
// for syntax errors.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

namespace detail {

inline Json parse_json_text(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is the 1-based offset of the offending character.
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    for (std::size_t k = 0; k < stop; ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream os;
    os << what << ": JSON syntax error at line " << line << ", column " << column << ": " << e.what();
    throw InputError(os.str(), line, column);
  }
}

inline void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                                std::string_view where) {
  if (!obj.is_object()) throw InputError(std::string(where) + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || item.key() == a;
    if (!known) throw InputError(std::string(where) + ": unknown key \"" + item.key() + "\"");
  }
}

inline const Json& require_key(const Json& obj, const char* key, std::string_view where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw InputError(std::string(where) + ": missing key \"" + key + "\"");
  return *it;
}

inline double require_number(const Json& v, std::string_view where) {
  if (!v.is_number()) throw InputError(std::string(where) + ": expected a number");
  return v.get<double>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

inline MarketScenario scenario_from_json(const Json& j) {
  detail::reject_unknown_keys(j, {"producers", "demand", "demand_cap"}, "scenario");
  MarketScenario s;

  const Json& producers = detail::require_key(j, "producers", "scenario");
  if (!producers.is_array()) throw InputError("scenario.producers: expected an array");
  for (std::size_t i = 0; i < producers.size(); ++i) {
    const std::string where = "scenario.producers[" + std::to_string(i) + "]";
    const Json& pj = producers[i];
    detail::reject_unknown_keys(pj, {"cost", "capacity"}, where);
    Producer p;
    p.capacity = detail::require_number(detail::require_key(pj, "capacity", where), where + ".capacity");
    const Json& cost = detail::require_key(pj, "cost", where);
    if (!cost.is_array()) throw InputError(where + ".cost: expected an array of [coefficient, exponent]");
    std::vector<CostTerm> terms;
    for (const Json& term : cost) {
      if (!term.is_array() || term.size() != 2) {
        throw InputError(where + ".cost: each term must be [coefficient, exponent]");
      }
      if (!term[1].is_number_integer()) throw InputError(where + ".cost: exponent must be an integer");
      terms.push_back({detail::require_number(term[0], where + ".cost"), term[1].get<int>()});
    }
    p.cost = CostFunction(std::move(terms));
    s.producers.push_back(std::move(p));
  }

  const Json& demand = detail::require_key(j, "demand", "scenario");
  detail::reject_unknown_keys(demand, {"family", "params"}, "scenario.demand");
  const Json& family = detail::require_key(demand, "family", "scenario.demand");
  const Json& params = detail::require_key(demand, "params", "scenario.demand");
  if (!family.is_string()) throw InputError("scenario.demand.family: expected a string");
  const auto fam = family.get<std::string>();
  if (fam == "power") {
    detail::reject_unknown_keys(params, {"scale", "exponent"}, "scenario.demand.params");
    s.demand = PowerUtility{
        detail::require_number(detail::require_key(params, "scale", "scenario.demand.params"), "scale"),
        detail::require_number(detail::require_key(params, "exponent", "scenario.demand.params"), "exponent")};
  } else if (fam == "capped_quadratic") {
    detail::reject_unknown_keys(params, {"peak", "saturation"}, "scenario.demand.params");
    s.demand = CappedQuadraticUtility{
        detail::require_number(detail::require_key(params, "peak", "scenario.demand.params"), "peak"),
        detail::require_number(detail::require_key(params, "saturation", "scenario.demand.params"), "saturation")};
  } else {
    throw InputError("scenario.demand.family: unknown family \"" + fam + "\"");
  }

  if (const auto it = j.find("demand_cap"); it != j.end()) {
    s.demand_cap = detail::require_number(*it, "scenario.demand_cap");
  }
  return s;
}

inline Json scenario_to_json(const MarketScenario& s) {
  Json j;
  Json producers = Json::array();
  for (const auto& p : s.producers) {
    Json cost = Json::array();
    for (const auto& t : p.cost.terms()) cost.push_back(Json::array({t.coefficient, t.exponent}));
    Json pj;
    pj["cost"] = std::move(cost);
    pj["capacity"] = p.capacity;
    producers.push_back(std::move(pj));
  }
  j["producers"] = std::move(producers);
  Json demand;
  std::visit(detail::overloaded{[&](const PowerUtility& f) {
                                  demand["family"] = "power";
                                  demand["params"] = {{"scale", f.scale}, {"exponent", f.exponent}};
                                },
                                [&](const CappedQuadraticUtility& f) {
                                  demand["family"] = "capped_quadratic";
                                  demand["params"] = {{"peak", f.peak}, {"saturation", f.saturation}};
                                }},
             s.demand);
  j["demand"] = std::move(demand);
  if (s.demand_cap) j["demand_cap"] = *s.demand_cap;
  return j;
}

inline MarketScenario parse_scenario(std::string_view text) {
  return scenario_from_json(detail::parse_json_text(text, "scenario"));
}

inline std::string serialize_scenario(const MarketScenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Message profiles
// ---------------------------------------------------------------------------

inline MessageProfile messages_from_json(const Json& j) {
  detail::reject_unknown_keys(j, {"messages"}, "messages");
  const Json& arr = detail::require_key(j, "messages", "messages");
  if (!arr.is_array()) throw InputError("messages.messages: expected an array");
  MessageProfile m;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "messages[" + std::to_string(i) + "]";
    detail::reject_unknown_keys(arr[i], {"quantity", "price"}, where);
    m.push_back({detail::require_number(detail::require_key(arr[i], "quantity", where), where + ".quantity"),
                 detail::require_number(detail::require_key(arr[i], "price", where), where + ".price")});
  }
  return m;
}

inline Json messages_to_json(const MessageProfile& m) {
  Json arr = Json::array();
  for (const auto& msg : m) arr.push_back({{"quantity", msg.quantity}, {"price", msg.price}});
  return Json{{"messages", std::move(arr)}};
}

inline MessageProfile parse_messages(std::string_view text) {
  return messages_from_json(detail::parse_json_text(text, "messages"));
}

inline std::string serialize_messages(const MessageProfile& m) { return messages_to_json(m).dump(2) + "\n"; }

// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// 64-bit FNV-1a of the canonical scenario serialization, as 16 hex digits.
inline std::string scenario_digest(const MarketScenario& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_scenario(s)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace poolmech

#endif  // POOLMECH_IO_HPP
