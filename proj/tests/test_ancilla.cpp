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

#include "tghz/ancilla.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "tghz/histories.hpp"
#include "tghz/measurement.hpp"

namespace tghz {
namespace {

constexpr double kEps = 1e-12;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Gram-Schmidt over the 8-dimensional ancilla space.
std::array<AncillaState, 8> random_orthonormal_basis(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::array<AncillaState, 8> basis{};
  for (auto& v : basis) {
    for (cplx& c : v) c = cplx(g(rng), g(rng));
  }
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      cplx overlap = 0.0;
      for (std::size_t k = 0; k < 8; ++k) {
        overlap += std::conj(basis[j][k]) * basis[i][k];
      }
      for (std::size_t k = 0; k < 8; ++k) basis[i][k] -= overlap * basis[j][k];
    }
    double n2 = 0.0;
    for (const cplx& c : basis[i]) n2 += std::norm(c);
    const double n = std::sqrt(n2);
    REQUIRE(n > 1e-6);
    for (cplx& c : basis[i]) c /= n;
  }
  return basis;
}

TEST_CASE("protocol snapshots from the superposed start") {
  const ProtocolTranscript t =
      run_protocol(x_plus(), {Axis::z, Axis::z, Axis::z});

  // Initial: (|0> + |1>)/sqrt2 (x) |000>.
  CHECK(std::abs(t.states[0].amp[0] - kInvSqrt2) < kEps);
  CHECK(std::abs(t.states[0].amp[8] - kInvSqrt2) < kEps);

  // After the first coupling: (|0>|000> + |1>|100>)/sqrt2.
  CHECK(std::abs(t.states[1].amp[0] - kInvSqrt2) < kEps);
  CHECK(std::abs(t.states[1].amp[12] - kInvSqrt2) < kEps);

  // After the second: (|0>|000> + |1>|110>)/sqrt2.
  CHECK(std::abs(t.states[2].amp[0] - kInvSqrt2) < kEps);
  CHECK(std::abs(t.states[2].amp[14] - kInvSqrt2) < kEps);

  // Final: (|0>|000> + |1>|111>)/sqrt2.
  CHECK(std::abs(t.states[3].amp[0] - kInvSqrt2) < kEps);
  CHECK(std::abs(t.states[3].amp[15] - kInvSqrt2) < kEps);

  // Every other component vanishes in every snapshot.
  for (const Register& reg : t.states) {
    double off = 0.0;
    for (std::size_t i = 0; i < 16; ++i) {
      if (i != 0 && i != 8 && i != 12 && i != 14 && i != 15) {
        off += std::abs(reg.amp[i]);
      }
    }
    CHECK(off < kEps);
  }
}

TEST_CASE("definite start never fires the couplings") {
  const ProtocolTranscript t =
      run_protocol(z_plus(), {Axis::z, Axis::z, Axis::z});
  for (const Register& reg : t.states) {
    CHECK(std::abs(reg.amp[0] - 1.0) < kEps);
    for (std::size_t i = 1; i < 16; ++i) CHECK(std::abs(reg.amp[i]) < kEps);
  }
}

TEST_CASE("snapshots stay normalized for random inputs") {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> g;
  const std::array<Axis, 3> all_axes = {Axis::x, Axis::y, Axis::z};
  for (int i = 0; i < 100; ++i) {
    const PureQubit sys =
        normalized(PureQubit{cplx(g(rng), g(rng)), cplx(g(rng), g(rng))});
    const std::array<Axis, 3> bases = {all_axes[rng() % 3],
                                       all_axes[rng() % 3],
                                       all_axes[rng() % 3]};
    const ProtocolTranscript t = run_protocol(sys, bases);
    for (const Register& reg : t.states) {
      CHECK(std::abs(register_norm(reg) - 1.0) < kEps);
    }
  }
  CHECK_THROWS_AS(run_protocol(PureQubit{0.7, 0.0}, {Axis::z, Axis::z, Axis::z}),
                  validation_error);
}

TEST_CASE("post-selection on the final register") {
  const Register reg =
      run_protocol(x_plus(), {Axis::z, Axis::z, Axis::z}).states[3];

  // Frozen oracle values (projected-norm arithmetic on
  // (|0>|000> + |1>|111>)/sqrt2): each erasure outcome keeps both
  // branches with amplitude 1/2, squared norm 1/2.
  const PostSelection minus = postselect_ancillas(reg, ancilla_ghz_minus());
  CHECK(std::abs(minus.probability - 0.5) < kEps);
  REQUIRE(minus.conditional.has_value());
  CHECK(std::abs(std::abs(inner(x_minus(), *minus.conditional)) - 1.0) < kEps);

  const PostSelection plus = postselect_ancillas(reg, ancilla_ghz_plus());
  CHECK(std::abs(plus.probability - 0.5) < kEps);
  REQUIRE(plus.conditional.has_value());
  CHECK(std::abs(std::abs(inner(x_plus(), *plus.conditional)) - 1.0) < kEps);

  const PostSelection zeros = postselect_ancillas(reg, ancilla_basis_ket(0));
  CHECK(std::abs(zeros.probability - 0.5) < kEps);
  REQUIRE(zeros.conditional.has_value());
  CHECK(std::abs(std::abs(inner(z_plus(), *zeros.conditional)) - 1.0) < kEps);

  const PostSelection mid = postselect_ancillas(reg, ancilla_basis_ket(2));
  CHECK(mid.probability < kEps);
  CHECK_FALSE(mid.conditional.has_value());

  AncillaState unnormalized{};
  unnormalized[0] = 0.5;
  CHECK_THROWS_AS(postselect_ancillas(reg, unnormalized), validation_error);
}

TEST_CASE("erasure-sector probabilities and completeness") {
  const Register reg =
      run_protocol(x_plus(), {Axis::z, Axis::z, Axis::z}).states[3];

  // GHZ-sector basis: the two erasure states plus the six computational
  // fillers. Probabilities: 1/2, 1/2, then zeros; they must sum to 1.
  double total = 0.0;
  const PostSelection plus = postselect_ancillas(reg, ancilla_ghz_plus());
  const PostSelection minus = postselect_ancillas(reg, ancilla_ghz_minus());
  CHECK(std::abs(plus.probability - 0.5) < kEps);
  CHECK(std::abs(minus.probability - 0.5) < kEps);
  total = plus.probability + minus.probability;
  for (std::size_t bits = 1; bits < 7; ++bits) {
    const PostSelection ps = postselect_ancillas(reg, ancilla_basis_ket(bits));
    CHECK(ps.probability < kEps);
    total += ps.probability;
  }
  CHECK(std::abs(total - 1.0) < 1e-10);

  // Completeness over the computational basis.
  double comp = 0.0;
  for (std::size_t bits = 0; bits < 8; ++bits) {
    comp += postselect_ancillas(reg, ancilla_basis_ket(bits)).probability;
  }
  CHECK(std::abs(comp - 1.0) < 1e-10);

  // Completeness over random orthonormal bases, for random registers.
  std::mt19937_64 rng(81);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    const PureQubit sys =
        normalized(PureQubit{cplx(g(rng), g(rng)), cplx(g(rng), g(rng))});
    const Register r = run_protocol(sys, {Axis::z, Axis::x, Axis::y}).states[3];
    const auto basis = random_orthonormal_basis(rng);
    double sum = 0.0;
    for (const AncillaState& b : basis) {
      sum += postselect_ancillas(r, b).probability;
    }
    CHECK(std::abs(sum - 1.0) < 1e-10);
  }
}

TEST_CASE("implied histories") {
  const HistoryState minus = implied_history(AncillaOutcome::ghz_minus);
  CHECK(std::abs(inner_product(minus, ghz_history()) - 1.0) < kEps);
  CHECK(std::abs(ghz_functional(minus) - 1.0) < kEps);

  const HistoryState plus = implied_history(AncillaOutcome::ghz_plus);
  CHECK(std::abs(inner_product(plus, ghz_plus_history()) - 1.0) < kEps);

  const HistoryState zeros = implied_history(AncillaOutcome::all_zero);
  REQUIRE(zeros.branches.size() == 1);
  CHECK(max_abs_diff(zeros.branches[0].events[0].matrix,
                     outer(z_plus())) < kEps);

  const HistoryState ones = implied_history(AncillaOutcome::all_one);
  REQUIRE(ones.branches.size() == 1);
  CHECK(max_abs_diff(ones.branches[0].events[2].matrix,
                     outer(z_minus())) < kEps);
}

TEST_CASE("ancilla readout oracle agrees with direct expectations") {
  for (const char* text : {"XXX", "XXY", "XYX", "YXX", "XYY", "YXY", "YYX",
                           "YYY"}) {
    const AxisWord word = AxisWord::parse(text);
    const double via_ancilla = expectation_via_ancilla(word);
    const double direct = expectation(ghz_history(), word);
    CHECK(std::abs(via_ancilla - direct) < 1e-10);
  }
  CHECK(std::abs(expectation_via_ancilla(AxisWord::parse("XXX")) - (-1.0)) <
        1e-10);
  CHECK(std::abs(expectation_via_ancilla(AxisWord::parse("XYY")) - 1.0) <
        1e-10);
  CHECK(std::abs(expectation_via_ancilla(AxisWord::parse("YXY")) - 1.0) <
        1e-10);

  CHECK_THROWS_AS(expectation_via_ancilla(AxisWord::parse("XX")),
                  validation_error);
  CHECK_THROWS_AS(expectation_via_ancilla(AxisWord::parse("XXZ")),
                  validation_error);
}

TEST_CASE("controlled flip validation") {
  const Register reg = initial_register(z_plus());
  CHECK_THROWS_AS(controlled_flip(reg, Axis::z, 3), validation_error);
  CHECK_THROWS_AS(controlled_flip(reg, Axis::z, -1), validation_error);
}

}  // namespace
}  // namespace tghz
