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

// State-vector simulation of the history-recording protocol: one system
// qubit plus three ancilla qubits. At each of the three times the system
// is coupled to a fresh ancilla by a controlled flip in a chosen basis;
// measuring the ancillas afterwards identifies (or, in a superposed
// basis, erases) which branch the system took.
//
// Register amplitude ordering: index = s*8 + a1*4 + a2*2 + a3 where s is
// the system bit and a1..a3 the ancilla bits (system most significant).
// The controlled flip fires in the coupling basis: with basis states
// |u+>, |u->, the unitary is [u+][u+] (x) I + [u-][u-] (x) X_k, i.e. the
// ancilla k flips exactly on the minus component of the system.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "tghz/errors.hpp"
#include "tghz/histories.hpp"
#include "tghz/measurement.hpp"

namespace tghz {

// ---------------------------------------------------------------------------
// Register and protocol.
// ---------------------------------------------------------------------------

struct Register {
  std::array<cplx, 16> amp{};
};

inline double register_norm(const Register& r) {
  double n2 = 0.0;
  for (const cplx& a : r.amp) n2 += std::norm(a);
  return std::sqrt(n2);
}

// System in `system`, ancillas in |000>.
inline Register initial_register(const PureQubit& system) {
  Register r;
  r.amp[0] = system.c0;
  r.amp[8] = system.c1;
  return r;
}

// Controlled flip of ancilla k (0-based), controlled on the system in the
// given basis.
inline Register controlled_flip(const Register& r, Axis basis, int ancilla) {
  if (ancilla < 0 || ancilla > 2) {
    throw validation_error("ancilla index must be 0, 1, or 2");
  }
  const auto [plus, minus] = axis_eigenbasis(basis);
  const std::size_t flip_bit = std::size_t{1} << (2 - ancilla);

  Register out;
  for (std::size_t anc = 0; anc < 8; ++anc) {
    // System subvector at this ancilla configuration.
    const PureQubit sys{r.amp[anc], r.amp[8 + anc]};
    const cplx on_plus = inner(plus, sys);
    const cplx on_minus = inner(minus, sys);
    // Plus component leaves the ancilla alone.
    out.amp[anc] += on_plus * plus.c0;
    out.amp[8 + anc] += on_plus * plus.c1;
    // Minus component flips ancilla k.
    const std::size_t flipped = anc ^ flip_bit;
    out.amp[flipped] += on_minus * minus.c0;
    out.amp[8 + flipped] += on_minus * minus.c1;
  }
  return out;
}

struct ProtocolTranscript {
  std::array<Axis, 3> coupling_bases{};
  // states[0] = initial, states[t] = after the coupling at time t.
  std::array<Register, 4> states{};
};

inline ProtocolTranscript run_protocol(const PureQubit& system,
                                       const std::array<Axis, 3>& bases) {
  const double n = norm(system);
  if (std::abs(n - 1.0) > kTol) {
    throw validation_error("system state must be normalized");
  }
  ProtocolTranscript t;
  t.coupling_bases = bases;
  t.states[0] = initial_register(system);
  for (int step = 0; step < 3; ++step) {
    t.states[step + 1] = controlled_flip(t.states[step], bases[step], step);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Ancilla post-selection.
// ---------------------------------------------------------------------------

using AncillaState = std::array<cplx, 8>;

inline AncillaState ancilla_basis_ket(std::size_t bits) {
  AncillaState s{};
  s.at(bits) = 1.0;
  return s;
}

inline AncillaState ancilla_ghz_plus() {
  AncillaState s{};
  s[0] = 1.0 / std::sqrt(2.0);
  s[7] = 1.0 / std::sqrt(2.0);
  return s;
}

inline AncillaState ancilla_ghz_minus() {
  AncillaState s{};
  s[0] = 1.0 / std::sqrt(2.0);
  s[7] = -1.0 / std::sqrt(2.0);
  return s;
}

struct PostSelection {
  double probability = 0.0;
  // Normalized conditional system state; empty when the outcome has
  // (near-)zero probability.
  std::optional<PureQubit> conditional;
};

// Projects the ancillas onto `outcome` and reports the Born probability
// (squared norm of the projected register) plus the conditional system
// state.
inline PostSelection postselect_ancillas(const Register& r,
                                         const AncillaState& outcome) {
  double n2 = 0.0;
  for (const cplx& a : outcome) n2 += std::norm(a);
  if (std::abs(n2 - 1.0) > 1e-10) {
    throw validation_error("ancilla outcome state must be normalized");
  }
  PureQubit sys{0.0, 0.0};
  for (std::size_t anc = 0; anc < 8; ++anc) {
    const cplx w = std::conj(outcome[anc]);
    sys.c0 += w * r.amp[anc];
    sys.c1 += w * r.amp[8 + anc];
  }
  PostSelection out;
  const double p = std::norm(sys.c0) + std::norm(sys.c1);
  out.probability = p;
  if (p > kTol) {
    const double n = std::sqrt(p);
    out.conditional = PureQubit{sys.c0 / n, sys.c1 / n};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Histories implied by the standard erasure outcomes.
// ---------------------------------------------------------------------------

enum class AncillaOutcome { all_zero, all_one, ghz_plus, ghz_minus };

// The history state identified by measuring the ancillas of the Z-coupled
// protocol in the computational or GHZ basis.
inline HistoryState implied_history(AncillaOutcome outcome) {
  const Projector2 zp = projector_from_state(z_plus());
  const Projector2 zm = projector_from_state(z_minus());
  switch (outcome) {
    case AncillaOutcome::all_zero:
      return make_history({{1.0, {zp, zp, zp}}});
    case AncillaOutcome::all_one:
      return make_history({{1.0, {zm, zm, zm}}});
    case AncillaOutcome::ghz_plus:
      return ghz_plus_history();
    case AncillaOutcome::ghz_minus:
      return ghz_history();
  }
  throw validation_error("unsupported ancilla outcome label");
}

// ---------------------------------------------------------------------------
// Independent correlator oracle.
// ---------------------------------------------------------------------------

// Expectation of a three-letter word over {X, Y} against the GHZ history,
// obtained without any history-state machinery: run the Z-coupled
// protocol from |x+>, post-select the system on |x-> (the erasure outcome
// that identifies the GHZ-minus history), then read each ancilla k in the
// basis (|0> + s u_k |1>)/sqrt2 with u = 1 for X and i for Y. The signed
// parity of the readouts is the correlator.
inline double expectation_via_ancilla(const AxisWord& word) {
  if (word.size() != 3) {
    throw validation_error("the ancilla oracle takes three-letter words");
  }
  std::array<cplx, 3> u{};
  for (int k = 0; k < 3; ++k) {
    switch (word.axes[static_cast<std::size_t>(k)]) {
      case Axis::x: u[k] = 1.0; break;
      case Axis::y: u[k] = cplx(0.0, 1.0); break;
      default:
        throw validation_error("the ancilla oracle takes words over {X, Y}");
    }
  }

  const ProtocolTranscript t =
      run_protocol(x_plus(), {Axis::z, Axis::z, Axis::z});
  const Register& reg = t.states[3];
  const PureQubit sys_keep = x_minus();

  double weighted = 0.0;
  double total = 0.0;
  for (int s1 : {1, -1}) {
    for (int s2 : {1, -1}) {
      for (int s3 : {1, -1}) {
        const int s[3] = {s1, s2, s3};
        AncillaState outcome{};
        const double r = 1.0 / std::sqrt(8.0);
        for (std::size_t bits = 0; bits < 8; ++bits) {
          cplx v = r;
          for (int k = 0; k < 3; ++k) {
            if ((bits >> (2 - k)) & 1U) {
              v *= static_cast<double>(s[k]) * u[k];
            }
          }
          outcome[bits] = v;
        }
        const PostSelection ps = postselect_ancillas(reg, outcome);
        double joint = 0.0;
        if (ps.probability > 0.0 && ps.conditional) {
          joint = ps.probability * std::norm(inner(sys_keep, *ps.conditional));
        }
        weighted += s1 * s2 * s3 * joint;
        total += joint;
      }
    }
  }
  if (total < kTol) {
    throw degenerate_state("oracle post-selection has zero acceptance");
  }
  return weighted / total;
}

}  // namespace tghz
