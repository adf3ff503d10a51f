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

#pragma once

#include <stdexcept>
#include <string>

namespace tghz {

// Base class for all library failures.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally invalid value (simplex violation, bad branch shape, ...).
struct validation_error : error {
  using error::error;
};

// Operands that cannot be combined (different time counts or bridging).
struct dimension_mismatch : error {
  using error::error;
};

// Operation requires a state shape it was not given (e.g. a rank-2 event
// where a rank-1 projector is needed).
struct unsupported_state : error {
  using error::error;
};

// Operation requires trivial (identity) bridging evolution.
struct unsupported_evolution : error {
  using error::error;
};

// A quantity that must be strictly positive vanished (zero norm, zero
// total outcome weight).
struct degenerate_state : error {
  using error::error;
};

// Input lies outside the temporal Bell span; carries the norm of the
// unrepresentable remainder.
struct decomposition_residual : error {
  explicit decomposition_residual(const std::string& what, double residual_norm)
      : error(what), residual(residual_norm) {}
  double residual;
};

// Malformed input text (CLI arguments, data files).
struct parse_error : error {
  using error::error;
};

}  // namespace tghz
