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

// Multi-time Pauli correlators and the GHZ functional G on history states.
//
// The operational pairing is
//   amp(s) = sum over branches of amplitude * prod_t <a_t | psi_t>,
// where a_t is the chosen outcome eigenstate at time t and psi_t the
// branch's event state. Outcome probabilities are |amp|^2 / Z with
// Z = sum_s |amp(s)|^2; Z does not depend on the measured bases. A plain
// chain-operator sandwich would vanish on every GHZ setting, so this
// pairing is what gives the correlators their meaning here.
//
// Branch event states are extracted from rank-1 projectors with the phase
// gauge "first nonzero component real positive". Probabilities and
// correlators are gauge-invariant; raw amplitudes are not.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tghz/errors.hpp"
#include "tghz/histories.hpp"

namespace tghz {

// ---------------------------------------------------------------------------
// Axes and axis words.
// ---------------------------------------------------------------------------

enum class Axis { x, y, z };

inline char axis_char(Axis a) {
  switch (a) {
    case Axis::x: return 'X';
    case Axis::y: return 'Y';
    case Axis::z: return 'Z';
  }
  throw validation_error("unknown axis");
}

inline Axis axis_from_char(char c) {
  switch (c) {
    case 'x': case 'X': return Axis::x;
    case 'y': case 'Y': return Axis::y;
    case 'z': case 'Z': return Axis::z;
    default: throw parse_error(std::string("unknown axis letter '") + c + "'");
  }
}

inline Matrix2 axis_operator(Axis a) {
  switch (a) {
    case Axis::x: return sigma_x();
    case Axis::y: return sigma_y();
    case Axis::z: return sigma_z();
  }
  throw validation_error("unknown axis");
}

// (plus, minus) eigenvectors with the standard phases.
inline std::pair<PureQubit, PureQubit> axis_eigenbasis(Axis a) {
  switch (a) {
    case Axis::x: return {x_plus(), x_minus()};
    case Axis::y: return {y_plus(), y_minus()};
    case Axis::z: return {z_plus(), z_minus()};
  }
  throw validation_error("unknown axis");
}

inline PureQubit axis_eigenstate(Axis a, int sign) {
  if (sign != 1 && sign != -1) {
    throw validation_error("eigenstate sign must be +1 or -1");
  }
  const auto [plus, minus] = axis_eigenbasis(a);
  return sign == 1 ? plus : minus;
}

// Ordered measurement axes, index 0 = earliest time. Parses from strings
// like "XYY" whose leftmost letter is the earliest time.
struct AxisWord {
  std::vector<Axis> axes;

  static AxisWord parse(std::string_view text) {
    if (text.empty()) throw parse_error("axis word must not be empty");
    AxisWord w;
    w.axes.reserve(text.size());
    for (char c : text) w.axes.push_back(axis_from_char(c));
    return w;
  }

  std::size_t size() const { return axes.size(); }

  std::string str() const {
    std::string s;
    for (Axis a : axes) s += axis_char(a);
    return s;
  }
};

// The four settings of the GHZ functional, in the reporting order used
// throughout: XXX, YYX, YXY, XYY (leftmost letter = earliest time).
inline const std::array<AxisWord, 4>& ghz_words() {
  static const std::array<AxisWord, 4> words = {
      AxisWord::parse("XXX"), AxisWord::parse("YYX"), AxisWord::parse("YXY"),
      AxisWord::parse("XYY")};
  return words;
}

// ---------------------------------------------------------------------------
// Multi-time amplitudes, outcome tables, expectations.
// ---------------------------------------------------------------------------

namespace detail {

// Gauge-fixed event states of every branch; requires rank-1 events and
// identity bridging.
inline std::vector<std::vector<PureQubit>> branch_states(
    const HistoryState& state) {
  if (!has_identity_bridging(state)) {
    throw unsupported_evolution(
        "multi-time amplitudes require identity bridging");
  }
  std::vector<std::vector<PureQubit>> out;
  out.reserve(state.branches.size());
  for (const Branch& b : state.branches) {
    std::vector<PureQubit> states;
    states.reserve(b.events.size());
    for (const Projector2& p : b.events) {
      if (p.rank != 1) {
        throw unsupported_state(
            "multi-time amplitudes require rank-1 events");
      }
      states.push_back(state_from_projector(p));
    }
    out.push_back(std::move(states));
  }
  return out;
}

}  // namespace detail

inline cplx multi_time_amplitude(const HistoryState& state,
                                 const std::vector<PureQubit>& outcomes) {
  validate(state);
  if (outcomes.size() != state.n_times()) {
    throw dimension_mismatch("outcome count must match the time count");
  }
  const auto states = detail::branch_states(state);
  cplx amp = 0.0;
  for (std::size_t b = 0; b < state.branches.size(); ++b) {
    cplx w = state.branches[b].amplitude;
    for (std::size_t t = 0; t < outcomes.size(); ++t) {
      w *= inner(outcomes[t], states[b][t]);
    }
    amp += w;
  }
  return amp;
}

struct OutcomeRow {
  std::vector<int> signs;  // one per time, earliest first
  cplx amplitude;
  double probability;
};

struct OutcomeTable {
  AxisWord word;
  std::vector<OutcomeRow> rows;  // 2^n rows; bit t of the row index set
                                 // means minus at time t+1
  double total_weight;           // Z, before normalization
};

inline OutcomeTable outcome_table(const HistoryState& state,
                                  const AxisWord& word) {
  validate(state);
  const std::size_t n = state.n_times();
  if (word.size() != n) {
    throw dimension_mismatch("axis word length must match the time count");
  }
  const auto states = detail::branch_states(state);

  std::vector<std::array<PureQubit, 2>> eigen(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto [plus, minus] = axis_eigenbasis(word.axes[t]);
    eigen[t] = {plus, minus};
  }

  OutcomeTable table{word, {}, 0.0};
  table.rows.resize(std::size_t{1} << n);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    OutcomeRow& row = table.rows[r];
    row.signs.resize(n);
    cplx amp = 0.0;
    for (std::size_t b = 0; b < states.size(); ++b) {
      cplx w = state.branches[b].amplitude;
      for (std::size_t t = 0; t < n; ++t) {
        const bool minus = (r >> t) & 1U;
        w *= inner(eigen[t][minus ? 1 : 0], states[b][t]);
      }
      amp += w;
    }
    for (std::size_t t = 0; t < n; ++t) {
      row.signs[t] = ((r >> t) & 1U) ? -1 : 1;
    }
    row.amplitude = amp;
    table.total_weight += std::norm(amp);
  }
  if (table.total_weight < kTol) {
    throw degenerate_state("total outcome weight vanishes");
  }
  for (OutcomeRow& row : table.rows) {
    row.probability = std::norm(row.amplitude) / table.total_weight;
  }
  return table;
}

// Z alone; basis-independent (any word of the right length gives the same
// value).
inline double measurement_weight(const HistoryState& state,
                                 const AxisWord& word) {
  return outcome_table(state, word).total_weight;
}

// <word> = sum over sign tuples of (prod_t s_t) * probability.
inline double expectation(const HistoryState& state, const AxisWord& word) {
  const OutcomeTable table = outcome_table(state, word);
  double e = 0.0;
  for (const OutcomeRow& row : table.rows) {
    int parity = 1;
    for (int s : row.signs) parity *= s;
    e += parity * row.probability;
  }
  return e;
}

// ---------------------------------------------------------------------------
// GHZ functional.
// ---------------------------------------------------------------------------

struct GhzReport {
  std::array<double, 4> correlators;  // <XXX>, <YYX>, <YXY>, <XYY>
  double value;                       // G = -(product of the four)
};

inline GhzReport ghz_report(const HistoryState& state) {
  if (state.n_times() != 3) {
    throw dimension_mismatch("the GHZ functional needs a three-time state");
  }
  GhzReport report{};
  double product = 1.0;
  for (std::size_t i = 0; i < 4; ++i) {
    report.correlators[i] = expectation(state, ghz_words()[i]);
    product *= report.correlators[i];
  }
  report.value = -product;
  if (report.value == 0.0) report.value = 0.0;  // avoid a signed zero
  return report;
}

inline double ghz_functional(const HistoryState& state) {
  return ghz_report(state).value;
}

// G of a product history, in closed form:
// -(1/64) prod_t sin^4(2 theta_t) sin^2(2 phi_t). Never positive.
inline double g_separable_closed_form(double theta1, double phi1,
                                      double theta2, double phi2,
                                      double theta3, double phi3) {
  const double f1 = std::pow(std::sin(2.0 * theta1), 4) *
                    std::pow(std::sin(2.0 * phi1), 2);
  const double f2 = std::pow(std::sin(2.0 * theta2), 4) *
                    std::pow(std::sin(2.0 * phi2), 2);
  const double f3 = std::pow(std::sin(2.0 * theta3), 4) *
                    std::pow(std::sin(2.0 * phi3), 2);
  return -(1.0 / 64.0) * f1 * f2 * f3;
}

// ---------------------------------------------------------------------------
// Temporal Bell decomposition of two-time states.
// ---------------------------------------------------------------------------

// Coefficients of a two-time state in the temporal Bell basis:
// a phi+, b phi-, c psi+, d psi- (see temporal_bell for the conventions).
struct BellCoefficients {
  cplx a{}, b{}, c{}, d{};
};

struct BellDecomposition {
  BellCoefficients coefficients;
  double residual;  // norm of the component outside the Bell span
};

// Orthogonal projection in the Hilbert-Schmidt sense: the four diagonal
// patterns [z s] (x) [z s'] are orthonormal under <A,B> = Tr(A'B) per time
// slot, so their coefficients and the leftover norm follow from traces.
inline BellDecomposition bell_project(const HistoryState& state) {
  validate(state);
  if (state.n_times() != 2) {
    throw dimension_mismatch("Bell decomposition needs a two-time state");
  }
  if (!has_identity_bridging(state)) {
    throw unsupported_evolution("Bell decomposition requires identity bridging");
  }
  const Matrix2 zp = outer(z_plus());
  const Matrix2 zm = outer(z_minus());

  // c_pattern[i][j]: coefficient of [z_i] at t1 (x) [z_j] at t2,
  // with index 0 = plus.
  cplx c_pattern[2][2] = {};
  const Matrix2 zs[2] = {zp, zm};
  for (const Branch& b : state.branches) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        c_pattern[i][j] += b.amplitude * trace(zs[i] * b.events[0].matrix) *
                           trace(zs[j] * b.events[1].matrix);
      }
    }
  }

  // Leftover outside the span, accumulated component-wise over the
  // off-pattern matrix units; subtracting squared norms instead would
  // turn rounding noise into a sqrt-amplified residual.
  const auto entry = [](const Matrix2& m, int row, int col) {
    return row == 0 ? (col == 0 ? m.m00 : m.m01)
                    : (col == 0 ? m.m10 : m.m11);
  };
  double residual2 = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
          if (i == j && k == l) continue;  // the diagonal span
          cplx comp = 0.0;
          for (const Branch& b : state.branches) {
            comp += b.amplitude * entry(b.events[0].matrix, i, j) *
                    entry(b.events[1].matrix, k, l);
          }
          residual2 += std::norm(comp);
        }
      }
    }
  }

  const double r = 1.0 / std::sqrt(2.0);
  BellDecomposition out{};
  out.coefficients.a = r * (c_pattern[0][0] + c_pattern[1][1]);
  out.coefficients.b = r * (c_pattern[0][0] - c_pattern[1][1]);
  out.coefficients.c = r * (c_pattern[1][0] + c_pattern[0][1]);
  out.coefficients.d = r * (c_pattern[1][0] - c_pattern[0][1]);
  out.residual = std::sqrt(residual2);
  return out;
}

// Like bell_project but refuses inputs that leave the Bell span.
inline BellCoefficients bell_decompose(const HistoryState& state,
                                       double tol = 1e-10) {
  BellDecomposition d = bell_project(state);
  if (d.residual > tol) {
    throw decomposition_residual(
        "state lies outside the temporal Bell span (residual " +
            std::to_string(d.residual) + ")",
        d.residual);
  }
  return d.coefficients;
}

// The two-time state a phi+ + b phi- + c psi+ + d psi-, expanded into the
// four diagonal patterns.
inline HistoryState bell_recompose(const BellCoefficients& k) {
  const Projector2 zp = projector_from_state(z_plus());
  const Projector2 zm = projector_from_state(z_minus());
  const double r = 1.0 / std::sqrt(2.0);
  return make_history({{r * (k.a + k.b), {zp, zp}},
                       {r * (k.a - k.b), {zm, zm}},
                       {r * (k.c + k.d), {zm, zp}},
                       {r * (k.c - k.d), {zp, zm}}});
}

// G of a two-time state with a product tail P(theta,phi), in closed form.
// Expects normalized coefficients (|a|^2+|b|^2+|c|^2+|d|^2 = 1).
inline double g_two_time_closed_form(const BellCoefficients& k, double theta,
                                     double phi) {
  const double a2 = std::norm(k.a);
  const double b2 = std::norm(k.b);
  const double c2 = std::norm(k.c);
  const double d2 = std::norm(k.d);
  const double phi_ab = std::arg(std::conj(k.a) * k.b);
  const double phi_cd = std::arg(std::conj(k.c) * k.d);
  const double ab = std::sqrt(a2 * b2) * std::sin(phi_ab);
  const double cd = std::sqrt(c2 * d2) * std::sin(phi_cd);
  const double s2t = std::sin(2.0 * theta);
  const double s2p = std::sin(2.0 * phi);
  return -(s2t * s2t * s2t * s2t) * (s2p * s2p) *
         ((c2 - d2) * (c2 - d2) - (a2 - b2) * (a2 - b2)) *
         (ab * ab - cd * cd);
}

}  // namespace tghz
