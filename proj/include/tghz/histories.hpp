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

// Algebra of single-qubit history states: branches of time-indexed
// projectors, chain operators, the trace inner product, and the named
// states used throughout the library (GHZ, W, separable, temporal Bell).
//
// Conventions:
//  - Branch events are stored earliest-first: events[0] belongs to t1.
//    Display notation is the reverse (latest time leftmost); only
//    to_display_string performs that reversal.
//  - A history state is not automatically normalized. Zero chain norm is
//    legal (the W state has it) and normalization is an explicit call.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "tghz/errors.hpp"

namespace tghz {

using cplx = std::complex<double>;

// Tolerance for structural checks (hermiticity, idempotence, unitarity,
// norms). All double precision work in the library shares it.
inline constexpr double kTol = 1e-12;

// ---------------------------------------------------------------------------
// Matrix2: dense 2x2 complex matrix, row-major entries.
// ---------------------------------------------------------------------------

struct Matrix2 {
  cplx m00{}, m01{}, m10{}, m11{};

  static Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Matrix2 zero() { return {}; }
};

inline Matrix2 operator+(const Matrix2& a, const Matrix2& b) {
  return {a.m00 + b.m00, a.m01 + b.m01, a.m10 + b.m10, a.m11 + b.m11};
}

inline Matrix2 operator-(const Matrix2& a, const Matrix2& b) {
  return {a.m00 - b.m00, a.m01 - b.m01, a.m10 - b.m10, a.m11 - b.m11};
}

inline Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
  return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
          a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}

inline Matrix2 operator*(const cplx& s, const Matrix2& m) {
  return {s * m.m00, s * m.m01, s * m.m10, s * m.m11};
}

inline Matrix2 operator*(const Matrix2& m, const cplx& s) { return s * m; }

inline Matrix2 adjoint(const Matrix2& m) {
  return {std::conj(m.m00), std::conj(m.m10), std::conj(m.m01),
          std::conj(m.m11)};
}

inline cplx trace(const Matrix2& m) { return m.m00 + m.m11; }

inline double frobenius_norm(const Matrix2& m) {
  return std::sqrt(std::norm(m.m00) + std::norm(m.m01) + std::norm(m.m10) +
                   std::norm(m.m11));
}

inline double max_abs_diff(const Matrix2& a, const Matrix2& b) {
  return std::max(std::max(std::abs(a.m00 - b.m00), std::abs(a.m01 - b.m01)),
                  std::max(std::abs(a.m10 - b.m10), std::abs(a.m11 - b.m11)));
}

inline bool is_hermitian(const Matrix2& m, double tol = kTol) {
  return max_abs_diff(m, adjoint(m)) <= tol;
}

inline bool is_unitary(const Matrix2& m, double tol = kTol) {
  return max_abs_diff(adjoint(m) * m, Matrix2::identity()) <= tol;
}

inline Matrix2 sigma_x() { return {0.0, 1.0, 1.0, 0.0}; }
inline Matrix2 sigma_y() { return {0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0}; }
inline Matrix2 sigma_z() { return {1.0, 0.0, 0.0, -1.0}; }

// ---------------------------------------------------------------------------
// PureQubit: 2-dim complex state vector. Callers that require
// normalization say so explicitly (normalized / projector_from_state).
// ---------------------------------------------------------------------------

struct PureQubit {
  cplx c0{}, c1{};
};

// <x|y> with the conjugate on the left argument.
inline cplx inner(const PureQubit& x, const PureQubit& y) {
  return std::conj(x.c0) * y.c0 + std::conj(x.c1) * y.c1;
}

inline double norm(const PureQubit& v) {
  return std::sqrt(std::norm(v.c0) + std::norm(v.c1));
}

inline PureQubit operator*(const cplx& s, const PureQubit& v) {
  return {s * v.c0, s * v.c1};
}

inline PureQubit apply(const Matrix2& m, const PureQubit& v) {
  return {m.m00 * v.c0 + m.m01 * v.c1, m.m10 * v.c0 + m.m11 * v.c1};
}

inline PureQubit normalized(const PureQubit& v) {
  const double n = norm(v);
  if (n < kTol) {
    throw degenerate_state("cannot normalize a (near-)zero qubit vector");
  }
  return {v.c0 / n, v.c1 / n};
}

/// Phase gauge: multiply by the phase that makes the first component of
// magnitude above tol real and positive.
inline PureQubit gauge_fixed(const PureQubit& v, double tol = kTol) {
  const cplx lead = std::abs(v.c0) > tol ? v.c0 : v.c1;
  const double mag = std::abs(lead);
  if (mag < tol) {
    throw degenerate_state("cannot gauge-fix the zero vector");
  }
  const cplx phase = std::conj(lead) / mag;
  return {phase * v.c0, phase * v.c1};
}

// |v><v| for a normalized v.
inline Matrix2 outer(const PureQubit& v) {
  return {v.c0 * std::conj(v.c0), v.c0 * std::conj(v.c1),
          v.c1 * std::conj(v.c0), v.c1 * std::conj(v.c1)};
}

// The six canonical axis eigenstates, with the standard phase choices
// (|y+> carries +i on its second component).
inline PureQubit z_plus() { return {1.0, 0.0}; }
inline PureQubit z_minus() { return {0.0, 1.0}; }
inline PureQubit x_plus() { return {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}; }
inline PureQubit x_minus() { return {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)}; }
inline PureQubit y_plus() { return {1.0 / std::sqrt(2.0), cplx(0.0, 1.0 / std::sqrt(2.0))}; }
inline PureQubit y_minus() { return {1.0 / std::sqrt(2.0), cplx(0.0, -1.0 / std::sqrt(2.0))}; }

// ---------------------------------------------------------------------------
// Projector2: validated orthogonal projector with its rank.
// ---------------------------------------------------------------------------

struct Projector2 {
  Matrix2 matrix;
  int rank = 1;
};

inline bool is_projector_matrix(const Matrix2& m, double tol = kTol) {
  return is_hermitian(m, tol) && max_abs_diff(m * m, m) <= tol;
}

// Validates hermiticity, idempotence, and integer trace; the trace of an
// orthogonal projector equals its rank.
inline Projector2 make_projector(const Matrix2& m, double tol = kTol) {
  if (!is_hermitian(m, tol)) {
    throw validation_error("projector must be Hermitian");
  }
  if (max_abs_diff(m * m, m) > tol) {
    throw validation_error("projector must be idempotent");
  }
  const double tr = trace(m).real();
  const int rank = static_cast<int>(std::lround(tr));
  if (rank < 1 || rank > 2 || std::abs(tr - rank) > tol) {
    throw validation_error("projector trace must be 1 or 2");
  }
  return {m, rank};
}

// Rank-1 projector onto cos(theta)|z+> + sin(theta) e^{i phi}|z->.
inline Projector2 projector_from_angles(double theta, double phi) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const cplx e = std::polar(1.0, phi);
  return {{c * c, c * s * std::conj(e), c * s * e, s * s}, 1};
}

inline Projector2 projector_from_state(const PureQubit& v) {
  return {outer(normalized(v)), 1};
}

inline Projector2 identity_projector() { return {Matrix2::identity(), 2}; }

// Extracts the gauge-fixed unit vector spanning a rank-1 projector's range.
// The larger column is numerically safest: column j of |v><v| is conj(v_j) v.
inline PureQubit state_from_projector(const Projector2& p, double tol = kTol) {
  if (p.rank != 1) {
    throw unsupported_state("state extraction requires a rank-1 projector");
  }
  const Matrix2& m = p.matrix;
  const PureQubit col0{m.m00, m.m10};
  const PureQubit col1{m.m01, m.m11};
  const PureQubit& best = norm(col0) >= norm(col1) ? col0 : col1;
  return gauge_fixed(normalized(best), tol);
}

// ---------------------------------------------------------------------------
// Branch / HistoryState.
// ---------------------------------------------------------------------------

struct Branch {
  cplx amplitude{};
  std::vector<Projector2> events;  // events[0] belongs to the earliest time
};

struct HistoryState {
  std::vector<Branch> branches;
  std::vector<Matrix2> bridging;  // size n_times()-1; evolution between times

  std::size_t n_times() const {
    return branches.empty() ? 0 : branches.front().events.size();
  }
};

inline void validate(const HistoryState& state, double tol = kTol) {
  if (state.branches.empty()) {
    throw validation_error("history state needs at least one branch");
  }
  const std::size_t n = state.branches.front().events.size();
  if (n == 0) {
    throw validation_error("branches need at least one event");
  }
  for (const Branch& b : state.branches) {
    if (b.events.size() != n) {
      throw validation_error("all branches must cover the same times");
    }
    for (const Projector2& p : b.events) {
      if (!is_projector_matrix(p.matrix, tol)) {
        throw validation_error("branch event is not a projector");
      }
    }
  }
  if (state.bridging.size() != n - 1) {
    throw validation_error("bridging must hold one matrix per time gap");
  }
  for (const Matrix2& u : state.bridging) {
    if (!is_unitary(u, tol)) {
      throw validation_error("bridging matrix is not unitary");
    }
  }
}

// Builds a state with identity bridging and validates it.
inline HistoryState make_history(std::vector<Branch> branches) {
  HistoryState state{std::move(branches), {}};
  if (!state.branches.empty() && state.n_times() > 0) {
    state.bridging.assign(state.n_times() - 1, Matrix2::identity());
  }
  validate(state);
  return state;
}

inline HistoryState make_history(std::vector<Branch> branches,
                                 std::vector<Matrix2> bridging) {
  HistoryState state{std::move(branches), std::move(bridging)};
  validate(state);
  return state;
}

inline bool has_identity_bridging(const HistoryState& state, double tol = kTol) {
  for (const Matrix2& u : state.bridging) {
    if (max_abs_diff(u, Matrix2::identity()) > tol) return false;
  }
  return true;
}

inline bool same_bridging(const HistoryState& a, const HistoryState& b,
                          double tol = kTol) {
  if (a.bridging.size() != b.bridging.size()) return false;
  for (std::size_t i = 0; i < a.bridging.size(); ++i) {
    if (max_abs_diff(a.bridging[i], b.bridging[i]) > tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Chain operator and inner product.
// ---------------------------------------------------------------------------

// K = sum over branches of amplitude * P_n U_{n-1} ... U_1 P_1, applying
// the earliest projector first.
inline Matrix2 chain_operator(const HistoryState& state) {
  Matrix2 k = Matrix2::zero();
  for (const Branch& b : state.branches) {
    Matrix2 m = b.events.front().matrix;
    for (std::size_t t = 1; t < b.events.size(); ++t) {
      m = b.events[t].matrix * state.bridging[t - 1] * m;
    }
    k = k + b.amplitude * m;
  }
  return k;
}

// (a|b) = Tr(K(a)^dagger K(b)). Requires matching time count and bridging.
inline cplx inner_product(const HistoryState& a, const HistoryState& b) {
  if (a.n_times() != b.n_times()) {
    throw dimension_mismatch("history states cover different time counts");
  }
  if (!same_bridging(a, b)) {
    throw dimension_mismatch("history states carry different bridging");
  }
  return trace(adjoint(chain_operator(a)) * chain_operator(b));
}

inline double history_norm(const HistoryState& state) {
  return std::sqrt(std::max(0.0, inner_product(state, state).real()));
}

inline std::vector<std::vector<cplx>> gram_matrix(
    const std::vector<HistoryState>& states) {
  std::vector<std::vector<cplx>> g(states.size(),
                                   std::vector<cplx>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = 0; j < states.size(); ++j) {
      g[i][j] = inner_product(states[i], states[j]);
    }
  }
  return g;
}

// Concatenates the scaled branch lists of two compatible states.
inline HistoryState superpose(const cplx& alpha, const HistoryState& a,
                              const cplx& beta, const HistoryState& b) {
  if (a.n_times() != b.n_times() || !same_bridging(a, b)) {
    throw dimension_mismatch("cannot superpose incompatible history states");
  }
  HistoryState out = a;
  for (Branch& br : out.branches) br.amplitude *= alpha;
  for (const Branch& br : b.branches) {
    Branch scaled = br;
    scaled.amplitude *= beta;
    out.branches.push_back(std::move(scaled));
  }
  return out;
}

inline HistoryState normalized_history(const HistoryState& state) {
  const double n = history_norm(state);
  if (n < kTol) {
    throw degenerate_state("history state has zero chain norm");
  }
  HistoryState out = state;
  for (Branch& b : out.branches) b.amplitude /= n;
  return out;
}

// ---------------------------------------------------------------------------
// Named states.
// ---------------------------------------------------------------------------

// (1/sqrt2)([z+] over all three times minus [z-] over all three times).
inline HistoryState ghz_history() {
  const Projector2 zp = projector_from_state(z_plus());
  const Projector2 zm = projector_from_state(z_minus());
  const double r = 1.0 / std::sqrt(2.0);
  return make_history({{r, {zp, zp, zp}}, {-r, {zm, zm, zm}}});
}

// Same branches with a plus sign.
inline HistoryState ghz_plus_history() {
  const Projector2 zp = projector_from_state(z_plus());
  const Projector2 zm = projector_from_state(z_minus());
  const double r = 1.0 / std::sqrt(2.0);
  return make_history({{r, {zp, zp, zp}}, {r, {zm, zm, zm}}});
}

// (1/sqrt3) times the three single-flip branches; the flip visits t1, t2,
// then t3.
inline HistoryState w_history() {
  const Projector2 zp = projector_from_state(z_plus());
  const Projector2 zm = projector_from_state(z_minus());
  const double r = 1.0 / std::sqrt(3.0);
  return make_history({{r, {zm, zp, zp}}, {r, {zp, zm, zp}}, {r, {zp, zp, zm}}});
}

// Product history P(theta1,phi1) at t1 through P(theta3,phi3) at t3.
inline HistoryState separable_history(double theta1, double phi1,
                                      double theta2, double phi2,
                                      double theta3, double phi3) {
  return make_history({{1.0,
                        {projector_from_angles(theta1, phi1),
                         projector_from_angles(theta2, phi2),
                         projector_from_angles(theta3, phi3)}}});
}

enum class BellKind { phi_plus, phi_minus, psi_plus, psi_minus };

// Two-time maximally entangled histories. In display notation (latest
// leftmost): phi+- = ([z+]o[z+] +- [z-]o[z-])/sqrt2 and
// psi+- = ([z+]o[z-] +- [z-]o[z+])/sqrt2.
inline HistoryState temporal_bell(BellKind kind) {
  const Projector2 zp = projector_from_state(z_plus());
  const Projector2 zm = projector_from_state(z_minus());
  const double r = 1.0 / std::sqrt(2.0);
  switch (kind) {
    case BellKind::phi_plus:
      return make_history({{r, {zp, zp}}, {r, {zm, zm}}});
    case BellKind::phi_minus:
      return make_history({{r, {zp, zp}}, {-r, {zm, zm}}});
    case BellKind::psi_plus:
      return make_history({{r, {zm, zp}}, {r, {zp, zm}}});
    case BellKind::psi_minus:
      return make_history({{r, {zm, zp}}, {-r, {zp, zm}}});
  }
  throw validation_error("unknown temporal Bell kind");
}

// Inserts the projector P(theta,phi) as a new event at time slot `slot`
// (0 = earliest) of every branch of a two-time state.
inline HistoryState two_time_with_tail(const HistoryState& two_time,
                                       double theta, double phi,
                                       std::size_t slot = 0) {
  validate(two_time);
  if (two_time.n_times() != 2) {
    throw dimension_mismatch("tail attachment requires a two-time state");
  }
  if (!has_identity_bridging(two_time)) {
    throw unsupported_evolution("tail attachment requires identity bridging");
  }
  if (slot > 2) {
    throw validation_error("tail slot must be 0, 1, or 2");
  }
  const Projector2 tail = projector_from_angles(theta, phi);
  std::vector<Branch> branches = two_time.branches;
  for (Branch& b : branches) {
    b.events.insert(b.events.begin() + static_cast<std::ptrdiff_t>(slot), tail);
  }
  return make_history(std::move(branches));
}

// ---------------------------------------------------------------------------
// Display.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_real(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

inline std::string format_cplx(const cplx& z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real();
  if (z.imag() >= 0) os << "+";
  os << z.imag() << "i";
  return os.str();
}

inline std::string event_label(const Projector2& p) {
  if (p.rank == 2) return "[1]";
  struct Named {
    const char* label;
    PureQubit state;
  };
  const Named named[] = {{"[z+]", z_plus()},  {"[z-]", z_minus()},
                         {"[x+]", x_plus()},  {"[x-]", x_minus()},
                         {"[y+]", y_plus()},  {"[y-]", y_minus()}};
  for (const Named& n : named) {
    if (max_abs_diff(p.matrix, outer(n.state)) <= 1e-9) return n.label;
  }
  // Generic rank-1 case: recover polar angles from the gauge-fixed vector.
  const PureQubit v = state_from_projector(p);
  const double theta = std::atan2(std::abs(v.c1), std::abs(v.c0));
  const double phi = std::arg(v.c1);
  return "[theta=" + format_real(theta) + ",phi=" + format_real(phi) + "]";
}

}  // namespace detail

// Renders branches in the conventional order, latest time leftmost.
inline std::string to_display_string(const HistoryState& state) {
  std::string out;
  for (std::size_t i = 0; i < state.branches.size(); ++i) {
    const Branch& b = state.branches[i];
    if (i > 0) out += " + ";
    out += "(" + detail::format_cplx(b.amplitude) + ")";
    for (std::size_t t = b.events.size(); t-- > 0;) {
      out += t + 1 == b.events.size() ? "*" : "o";
      out += detail::event_label(b.events[t]);
    }
  }
  return out;
}

}  // namespace tghz
