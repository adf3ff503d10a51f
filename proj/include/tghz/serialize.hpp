// Copyright 2026 The tghz Authors
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

// JSON form of history states. Field names:
//   complex       -> [re, im]
//   matrix        -> [[c, c], [c, c]] (row major)
//   branch        -> {"amplitude": complex, "events": [matrix, ...]}
//   history state -> {"times": n, "branches": [branch, ...],
//                     "bridging": [matrix, ...]}
// Keys are fixed and unknown keys are rejected on input.

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tghz/errors.hpp"
#include "tghz/histories.hpp"

namespace tghz {

// Insertion-ordered documents keep emitted output byte-stable.
using json = nlohmann::ordered_json;

inline json to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const Matrix2& m) {
  return json::array({json::array({to_json(m.m00), to_json(m.m01)}),
                      json::array({to_json(m.m10), to_json(m.m11)})});
}

inline json to_json(const HistoryState& state) {
  json branches = json::array();
  for (const Branch& b : state.branches) {
    json events = json::array();
    for (const Projector2& p : b.events) events.push_back(to_json(p.matrix));
    branches.push_back(
        json{{"amplitude", to_json(b.amplitude)}, {"events", events}});
  }
  json bridging = json::array();
  for (const Matrix2& u : state.bridging) bridging.push_back(to_json(u));
  return json{{"times", state.n_times()},
              {"branches", branches},
              {"bridging", bridging}};
}

namespace detail {

inline cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
      !j[1].is_number()) {
    throw parse_error("complex values are [re, im] number pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Matrix2 matrix_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 ||
      !j[1].is_array() || j[1].size() != 2) {
    throw parse_error("matrices are 2x2 row-major nested lists");
  }
  return Matrix2{complex_from_json(j[0][0]), complex_from_json(j[0][1]),
                 complex_from_json(j[1][0]), complex_from_json(j[1][1])};
}

inline void require_keys(const json& j,
                         const std::vector<std::string>& expected) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const std::string& k : expected) known = known || item.key() == k;
    if (!known) throw parse_error("unknown key '" + item.key() + "'");
  }
  for (const std::string& k : expected) {
    if (!j.contains(k)) throw parse_error("missing key '" + k + "'");
  }
}

}  // namespace detail

inline HistoryState history_from_json(const json& j) {
  if (!j.is_object()) throw parse_error("history state must be an object");
  detail::require_keys(j, {"times", "branches", "bridging"});
  if (!j["times"].is_number_unsigned()) {
    throw parse_error("'times' must be a nonnegative integer");
  }
  const auto n = j["times"].get<std::size_t>();
  if (!j["branches"].is_array() || !j["bridging"].is_array()) {
    throw parse_error("'branches' and 'bridging' must be arrays");
  }

  HistoryState state;
  for (const json& jb : j["branches"]) {
    if (!jb.is_object()) throw parse_error("branches must be objects");
    detail::require_keys(jb, {"amplitude", "events"});
    Branch b;
    b.amplitude = detail::complex_from_json(jb["amplitude"]);
    if (!jb["events"].is_array() || jb["events"].size() != n) {
      throw parse_error("each branch needs one event per time");
    }
    for (const json& je : jb["events"]) {
      b.events.push_back(make_projector(detail::matrix_from_json(je)));
    }
    state.branches.push_back(std::move(b));
  }
  for (const json& ju : j["bridging"]) {
    state.bridging.push_back(detail::matrix_from_json(ju));
  }
  validate(state);
  return state;
}

inline HistoryState history_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("invalid JSON: ") + e.what());
  }
  return history_from_json(j);
}

}  // namespace tghz
