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

#include "tghz/optics.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "tghz/histories.hpp"
#include "tghz/measurement.hpp"

#ifndef TGHZ_DATA_DIR
#error "TGHZ_DATA_DIR must point at the shipped data directory"
#endif

namespace tghz {
namespace {

constexpr double kEps = 1e-12;

std::string data_path(const char* name) {
  return std::string(TGHZ_DATA_DIR) + "/" + name;
}

std::vector<TrialConfig> shipped_table() {
  return load_trial_table(data_path("trial_table.tsv"));
}

std::map<std::string, AxisWord> shipped_words() {
  return load_trial_words(data_path("trial_words.tsv"));
}

// Writes `text` to a fresh temp file and returns its path.
std::string write_temp(const std::string& stem, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() /
                    ("tghz_test_" + stem + ".tsv");
  std::ofstream out(path);
  out << text;
  out.close();
  return path.string();
}

TEST_CASE("wave-plate matrices") {
  const WaveplateConvention conv = convention("qwp-plus");

  // HWP at 0 degrees: diag(1, -1).
  const JonesMatrix h0 = waveplate_matrix(WaveplateKind::hwp, 0.0, conv);
  CHECK(max_abs_diff(h0, Matrix2{1.0, 0.0, 0.0, -1.0}) < kEps);

  // HWP at 22.5 degrees turns H into D, with no extra phase.
  const JonesVector d = apply(
      waveplate_matrix(WaveplateKind::hwp, 22.5, conv), z_plus());
  CHECK(std::abs(d.c0 - 1.0 / std::sqrt(2.0)) < kEps);
  CHECK(std::abs(d.c1 - 1.0 / std::sqrt(2.0)) < kEps);

  // QWP at 45 degrees makes circular light from H; the handedness is the
  // one observable that separates the two retardance-sense conventions.
  const JonesVector plus_out = apply(
      waveplate_matrix(WaveplateKind::qwp, 45.0, convention("qwp-plus")),
      z_plus());
  const JonesVector minus_out = apply(
      waveplate_matrix(WaveplateKind::qwp, 45.0, convention("qwp-minus")),
      z_plus());
  CHECK(std::abs(std::abs(inner(y_minus(), plus_out)) - 1.0) < kEps);
  CHECK(std::abs(std::abs(inner(y_plus(), minus_out)) - 1.0) < kEps);

  // Unitarity over random mount angles, all conventions.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> angle(-360.0, 360.0);
  for (const WaveplateConvention& c : known_conventions()) {
    for (int i = 0; i < 50; ++i) {
      CHECK(is_unitary(waveplate_matrix(WaveplateKind::hwp, angle(rng), c)));
      CHECK(is_unitary(waveplate_matrix(WaveplateKind::qwp, angle(rng), c)));
    }
  }

  CHECK_THROWS_AS(convention("qwp-sideways"), validation_error);
  CHECK_THROWS_AS(
      waveplate_matrix(WaveplateKind::hwp,
                       std::numeric_limits<double>::quiet_NaN(), conv),
      validation_error);
}

TEST_CASE("polarizing beam splitter") {
  // D splits evenly over H (transmitted) and V (reflected).
  const auto [t, r] = pbs_apply(z_plus(), z_minus(), x_plus());
  CHECK(std::abs(norm(t) * norm(t) - 0.5) < kEps);
  CHECK(std::abs(norm(r) * norm(r) - 0.5) < kEps);

  // A field aligned with the transmitted port never reflects.
  const auto [t2, r2] = pbs_apply(x_plus(), x_minus(), x_plus());
  CHECK(std::abs(norm(t2) - 1.0) < kEps);
  CHECK(norm(r2) < kEps);

  // Energy conservation for random fields and random analysis bases.
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  for (int i = 0; i < 10000; ++i) {
    const PureQubit basis =
        normalized(PureQubit{cplx(g(rng), g(rng)), cplx(g(rng), g(rng))});
    const PureQubit ortho{-std::conj(basis.c1), std::conj(basis.c0)};
    const PureQubit field{cplx(g(rng), g(rng)), cplx(g(rng), g(rng))};
    const auto [tt, rr] = pbs_apply(basis, ortho, field);
    CHECK(std::abs(norm(tt) * norm(tt) + norm(rr) * norm(rr) -
                   norm(field) * norm(field)) < 1e-10);
  }

  CHECK_THROWS_AS(pbs_apply(z_plus(), x_plus(), z_plus()), validation_error);
  CHECK_THROWS_AS(pbs_apply(PureQubit{0.5, 0.0}, z_minus(), z_plus()),
                  validation_error);
}

TEST_CASE("cells and trial-id decoding") {
  const auto words = shipped_words();

  CHECK(trial_cell("Trial1.1", words).str() == "DDD");
  CHECK(trial_cell("Trial1.2", words).str() == "ADD");
  CHECK(trial_cell("Trial1.8", words).str() == "AAA");
  CHECK(trial_cell("Trial2.1", words).str() == "RRD");
  CHECK(trial_cell("Trial2.5", words).str() == "RRA");
  CHECK(trial_cell("Trial3.4", words).str() == "LAR");
  CHECK(trial_cell("Trial4.1", words).str() == "DRR");

  CHECK(trial_cell("Trial1.1", words).sign() == +1);
  CHECK(trial_cell("Trial1.2", words).sign() == -1);
  CHECK(trial_cell("Trial1.8", words).sign() == -1);

  CHECK_THROWS_AS(trial_cell("Ref", words), validation_error);
  CHECK_THROWS_AS(trial_cell("Trial5.1", words), validation_error);

  // Flip bits address slots from the earliest time.
  const StageSpec base = base_cell_for_word(AxisWord::parse("XYX"));
  CHECK(base.str() == "DRD");
  CHECK(flip_cell(base, 1).str() == "ARD");
  CHECK(flip_cell(base, 2).str() == "DLD");
  CHECK(flip_cell(base, 4).str() == "DRA");
  CHECK(flip_cell(base, 7).str() == "ALA");
  CHECK_THROWS_AS(flip_cell(base, 8), validation_error);
  CHECK_THROWS_AS(base_cell_for_word(AxisWord::parse("XZX")),
                  validation_error);
}

TEST_CASE("dark-port amplitudes match the history amplitudes") {
  // The interferometer's dark-port amplitude for a projection cell must
  // equal the three-time amplitude of the entangled history at the same
  // settings, including the phase.
  const HistoryState ghz = ghz_history();
  const NoiseModel ideal = ideal_noise();
  for (const char* text : {"XXX", "XXY", "XYX", "YXX", "XYY", "YXY", "YYX",
                           "YYY"}) {
    const AxisWord word = AxisWord::parse(text);
    const StageSpec base = base_cell_for_word(word);
    for (int f = 0; f < 8; ++f) {
      const StageSpec cell = flip_cell(base, f);
      std::vector<PureQubit> outcomes;
      for (CellBasis b : cell.slots) outcomes.push_back(cell_state(b));
      const cplx optical = mzi_amplitude(cell, ideal);
      const cplx history = multi_time_amplitude(ghz, outcomes);
      CHECK(std::abs(optical - history) < 1e-10);
    }
  }

  // All-X closed form: amplitude (1 - s1 s2 s3)/4.
  const StageSpec xxx = base_cell_for_word(AxisWord::parse("XXX"));
  for (int f = 0; f < 8; ++f) {
    const StageSpec cell = flip_cell(xxx, f);
    const double expected = (1.0 - cell.sign()) / 4.0;
    CHECK(std::abs(mzi_amplitude(cell, ideal) - expected) < kEps);
  }

  // XYY at full visibility lights up only the even-parity cells with
  // s1 s2 s3 = +1.
  const StageSpec xyy = base_cell_for_word(AxisWord::parse("XYY"));
  for (int f = 0; f < 8; ++f) {
    const StageSpec cell = flip_cell(xyy, f);
    const double p = cell_probability(cell, ideal);
    if (cell.sign() == +1) {
      CHECK(std::abs(p - 0.25) < kEps);
    } else {
      CHECK(p < kEps);
    }
  }
}

TEST_CASE("noise model on cell probabilities") {
  // Zero visibility: no interference, every cell weighs 1/8.
  NoiseModel blind;
  blind.visibility = 0.0;
  for (const char* text : {"XXX", "YYX", "YXY", "XYY"}) {
    const StageSpec base = base_cell_for_word(AxisWord::parse(text));
    for (int f = 0; f < 8; ++f) {
      CHECK(std::abs(cell_probability(flip_cell(base, f), blind) - 0.125) <
            kEps);
    }
  }

  // The eight cells of a word always sum to 1, at any visibility and
  // phase drift.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uv(0.0, 1.0);
  std::uniform_real_distribution<double> ud(-3.14, 3.14);
  for (int i = 0; i < 50; ++i) {
    NoiseModel n;
    n.visibility = uv(rng);
    n.phase_drift = ud(rng);
    for (const char* text : {"XXX", "YYX", "YXY", "XYY"}) {
      const StageSpec base = base_cell_for_word(AxisWord::parse(text));
      double sum = 0.0;
      for (int f = 0; f < 8; ++f) {
        sum += cell_probability(flip_cell(base, f), n);
      }
      CHECK(std::abs(sum - 1.0) < 1e-10);
    }
  }

  // Phase drift of pi relights the dark cell of the all-plus setting.
  NoiseModel flipped;
  flipped.phase_drift = M_PI;
  const StageSpec ddd = base_cell_for_word(AxisWord::parse("XXX"));
  CHECK(cell_probability(ddd, ideal_noise()) < kEps);
  CHECK(std::abs(cell_probability(ddd, flipped) - 0.25) < kEps);

  NoiseModel bad;
  bad.visibility = 1.5;
  CHECK_THROWS_AS(cell_probability(ddd, bad), validation_error);
  bad.visibility = -0.1;
  CHECK_THROWS_AS(cell_probability(ddd, bad), validation_error);
}

TEST_CASE("word correlators from the interferometer") {
  const NoiseModel ideal = ideal_noise();
  for (const char* text : {"XXX", "XXY", "XYX", "YXX", "XYY", "YXY", "YYX",
                           "YYY"}) {
    const AxisWord word = AxisWord::parse(text);
    CHECK(std::abs(word_expectation(word, ideal) -
                   expectation(ghz_history(), word)) < 1e-10);
  }

  // Degraded visibility scales every correlator linearly.
  NoiseModel n;
  n.visibility = 0.9;
  CHECK(std::abs(word_expectation(AxisWord::parse("XXX"), n) + 0.9) < kEps);
  CHECK(std::abs(word_expectation(AxisWord::parse("XYY"), n) - 0.9) < kEps);
}

TEST_CASE("trial table loader") {
  const auto table = shipped_table();
  REQUIRE(table.size() == 33);
  CHECK(table[0].id == "Ref");
  CHECK(table[0].hwp_deg[0] == 45.0);
  CHECK(table[0].hwp_deg[3] == 45.0);

  const TrialConfig& t11 = table[1];
  CHECK(t11.id == "Trial1.1");
  CHECK(t11.qwp_deg[0] == 135.0);
  CHECK(t11.hwp_deg[0] == 67.5);
  CHECK(t11.qwp_deg[1] == 90.0);
  CHECK(t11.hwp_deg[1] == 112.5);
  CHECK(t11.hwp_deg[5] == 67.5);
  CHECK(t11.hwp_deg[7] == 90.0);

  // Every trial id of the 4 x 8 grid appears exactly once.
  std::set<std::string> ids;
  for (const TrialConfig& t : table) ids.insert(t.id);
  CHECK(ids.size() == 33);
  for (int g = 1; g <= 4; ++g) {
    for (int k = 1; k <= 8; ++k) {
      CHECK(ids.count("Trial" + std::to_string(g) + "." + std::to_string(k)) ==
            1);
    }
  }

  CHECK_THROWS_AS(load_trial_table("/nonexistent/table.tsv"), parse_error);
  CHECK_THROWS_AS(
      load_trial_table(write_temp(
          "truncated",
          "id\tqwp1\thwp1\nTrial1.1\t135\t67.5\n")),
      parse_error);
  CHECK_THROWS_AS(
      load_trial_table(write_temp(
          "badid",
          "id\tq\th\tq\th\tq\th\tq\th\tq\th\tq\th\tq\th\tq\th\n"
          "TrialX.9\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\t0\n")),
      parse_error);
}

TEST_CASE("trial word loader") {
  const auto words = shipped_words();
  REQUIRE(words.size() == 4);
  CHECK(words.at("Trial1").str() == "XXX");
  CHECK(words.at("Trial2").str() == "YYX");
  CHECK(words.at("Trial3").str() == "YXY");
  CHECK(words.at("Trial4").str() == "XYY");

  CHECK_THROWS_AS(load_trial_words("/nonexistent/words.tsv"), parse_error);
  CHECK_THROWS_AS(
      load_trial_words(write_temp("dup_words",
                                  "Trial1\tXXX\nTrial1\tYYX\n")),
      parse_error);
  CHECK_THROWS_AS(
      load_trial_words(write_temp("short_words", "Trial1\tXXX\n")),
      parse_error);
}

TEST_CASE("schedule conformance report") {
  const auto table = shipped_table();
  const auto words = shipped_words();

  const ConventionReport plus =
      validate_convention(convention("qwp-plus"), table, words);
  CHECK(plus.convention_id == "qwp-plus");
  CHECK(std::abs(plus.ref_count - 1.0) < 1e-9);
  REQUIRE(plus.trials.size() == 32);
  CHECK(plus.n_minus == 30);
  CHECK(plus.n_plus == 2);
  CHECK(plus.n_none == 0);
  CHECK_FALSE(plus.all_pass);

  std::set<std::string> inverted;
  for (const TrialCheck& t : plus.trials) {
    CHECK(t.structure_ok);
    if (t.tag == InterferenceTag::plus_port) inverted.insert(t.id);
    // Stage analysis states always land in the six-state dictionary.
    for (char c : t.stage_labels) CHECK(c != '?');
  }
  CHECK(inverted == std::set<std::string>{"Trial3.7", "Trial3.8"});

  // Swapping the quarter-wave retardance sense relabels the circular
  // states but leaves every photon count unchanged.
  const ConventionReport minus =
      validate_convention(convention("qwp-minus"), table, words);
  REQUIRE(minus.trials.size() == 32);
  CHECK(minus.n_minus == 30);
  CHECK(minus.n_plus == 2);
  for (std::size_t i = 0; i < 32; ++i) {
    CHECK(plus.trials[i].id == minus.trials[i].id);
    CHECK(std::abs(plus.trials[i].concrete_count -
                   minus.trials[i].concrete_count) < 1e-9);
  }
  CHECK(std::abs(plus.ref_count - minus.ref_count) < 1e-9);

  // Passing the light through each set's HWP before its QWP is not
  // count-equivalent: whole trial groups leave the dark port.
  const ConventionReport swapped =
      validate_convention(convention("hwp-first"), table, words);
  CHECK_FALSE(swapped.all_pass);
  CHECK(swapped.n_minus < 30);
  CHECK(swapped.n_plus >= 8);

  // The abstract projection model conforms by construction.
  std::vector<StageSpec> specs;
  for (const AxisWord& w : ghz_words()) {
    for (int f = 0; f < 8; ++f) {
      specs.push_back(flip_cell(base_cell_for_word(w), f));
    }
  }
  const ConventionReport abstract = validate_convention(specs);
  CHECK(abstract.all_pass);
  CHECK(abstract.n_minus == 32);
}

TEST_CASE("single-trial sampling") {
  const StageSpec bright =
      flip_cell(base_cell_for_word(AxisWord::parse("XXX")), 1);
  const NoiseModel ideal = ideal_noise();

  // Deterministic under a fixed seed.
  const TrialCounts a = simulate_trial(bright, 1000000, ideal, 42);
  const TrialCounts b = simulate_trial(bright, 1000000, ideal, 42);
  CHECK(a.d2 == b.d2);
  CHECK(a.probability == b.probability);

  // The bright cell of the all-X word holds a quarter of the ensemble.
  CHECK(std::abs(a.probability - 0.25) < kEps);
  const double sigma = std::sqrt(1000000 * 0.25 * 0.75);
  CHECK(std::abs(static_cast<double>(a.d2) - 250000.0) < 5.0 * sigma);

  // Blind interferometer: each cell keeps 1/8.
  NoiseModel blind;
  blind.visibility = 0.0;
  const TrialCounts c = simulate_trial(bright, 1000000, blind, 43);
  const double sigma8 = std::sqrt(1000000 * 0.125 * 0.875);
  CHECK(std::abs(static_cast<double>(c.d2) - 125000.0) < 5.0 * sigma8);

  // Dark counts ride on top of a dark cell.
  NoiseModel noisy;
  noisy.dark_rate = 5.0;
  const StageSpec dark = base_cell_for_word(AxisWord::parse("XXX"));
  const TrialCounts d = simulate_trial(dark, 1000, noisy, 44);
  const TrialCounts d_again = simulate_trial(dark, 1000, noisy, 44);
  CHECK(d.d2 == d_again.d2);
  CHECK(d.d2 >= 0);

  CHECK_THROWS_AS(simulate_trial(bright, 0, ideal, 1), validation_error);
  CHECK_THROWS_AS(simulate_trial(bright, 100, ideal, 1, 1.5),
                  validation_error);

  // Concrete Jones-chain sampling agrees with the abstract cell for a
  // conforming schedule row.
  const auto table = shipped_table();
  const auto words = shipped_words();
  const WaveplateConvention conv = convention("qwp-plus");
  for (const TrialConfig& cfg : table) {
    if (cfg.id != "Trial1.2") continue;
    const double concrete = concrete_cell_probability(cfg, conv, ideal);
    const double abstract =
        cell_probability(trial_cell(cfg.id, words), ideal);
    CHECK(std::abs(concrete - abstract) < 1e-9);
  }
}

TEST_CASE("full experiment, analytic mode") {
  const auto table = shipped_table();
  const auto words = shipped_words();

  // Ideal optics reproduce the history-state correlators exactly.
  const SimResult ideal = run_ghz_experiment(table, words, 1000000,
                                             ideal_noise(), 0,
                                             SimMode::analytic);
  const double expected_sign[4] = {-1.0, 1.0, 1.0, 1.0};
  for (std::size_t w = 0; w < 4; ++w) {
    CHECK(std::abs(ideal.words[w].correlator - expected_sign[w]) < kEps);
    CHECK(ideal.words[w].sigma == 0.0);
    double psum = 0.0;
    for (double p : ideal.words[w].cell_probabilities) psum += p;
    CHECK(std::abs(psum - 1.0) < kEps);
  }
  CHECK(std::abs(ideal.g - 1.0) < kEps);
  CHECK(ideal.g_sigma == 0.0);

  // Analytic counts are the rounded expected counts.
  CHECK(ideal.words[0].cell_counts[0] == 0);       // DDD is dark
  CHECK(ideal.words[0].cell_counts[1] == 250000);  // ADD is bright

  // The functional decays as the fourth power of the visibility.
  for (double v : {0.0, 0.25, 0.5, 0.75, 0.9, 1.0}) {
    NoiseModel n;
    n.visibility = v;
    const SimResult res =
        run_ghz_experiment(table, words, 1000000, n, 0, SimMode::analytic);
    CHECK(std::abs(res.g - v * v * v * v) < 1e-12);
    for (std::size_t w = 0; w < 4; ++w) {
      CHECK(std::abs(std::abs(res.words[w].correlator) - v) < 1e-12);
    }
  }

  // Phase drift enters through v cos(delta).
  NoiseModel drifted;
  drifted.visibility = 0.8;
  drifted.phase_drift = M_PI / 3.0;
  const SimResult res =
      run_ghz_experiment(table, words, 1000000, drifted, 0,
                         SimMode::analytic);
  CHECK(std::abs(res.g - std::pow(0.4, 4)) < 1e-12);

  // Schedule validation.
  std::vector<TrialConfig> missing;
  for (const TrialConfig& t : table) {
    if (t.id != "Trial2.3") missing.push_back(t);
  }
  CHECK_THROWS_AS(run_ghz_experiment(missing, words, 1000, ideal_noise(), 0,
                                     SimMode::analytic),
                  validation_error);

  std::vector<TrialConfig> doubled = table;
  doubled.push_back(table[1]);
  CHECK_THROWS_AS(run_ghz_experiment(doubled, words, 1000, ideal_noise(), 0,
                                     SimMode::analytic),
                  validation_error);

  auto partial_words = words;
  partial_words.erase("Trial4");
  CHECK_THROWS_AS(run_ghz_experiment(table, partial_words, 1000,
                                     ideal_noise(), 0, SimMode::analytic),
                  validation_error);

  CHECK_THROWS_AS(run_ghz_experiment(table, words, 0, ideal_noise(), 0,
                                     SimMode::analytic),
                  validation_error);
}

TEST_CASE("full experiment, Monte-Carlo mode") {
  const auto table = shipped_table();
  const auto words = shipped_words();
  NoiseModel n;
  n.visibility = 0.9;

  const SimResult an =
      run_ghz_experiment(table, words, 1000000, n, 0, SimMode::analytic);
  CHECK(std::abs(an.g - 0.6561) < 1e-12);

  const SimResult mc = run_ghz_experiment(table, words, 1000000, n,
                                          20260816, SimMode::monte_carlo);
  const SimResult mc2 = run_ghz_experiment(table, words, 1000000, n,
                                           20260816, SimMode::monte_carlo);

  // Bit-identical reruns under the same seed.
  CHECK(mc.g == mc2.g);
  CHECK(mc.g_sigma == mc2.g_sigma);
  for (std::size_t w = 0; w < 4; ++w) {
    CHECK(mc.words[w].correlator == mc2.words[w].correlator);
    for (int f = 0; f < 8; ++f) {
      CHECK(mc.words[w].cell_counts[f] == mc2.words[w].cell_counts[f]);
    }
  }

  // Sampled correlators sit within five standard errors of the analytic
  // values, and so does the functional.
  for (std::size_t w = 0; w < 4; ++w) {
    REQUIRE(mc.words[w].sigma > 0.0);
    CHECK(std::abs(mc.words[w].correlator - an.words[w].correlator) <
          5.0 * mc.words[w].sigma);
  }
  REQUIRE(mc.g_sigma > 0.0);
  CHECK(std::abs(mc.g - 0.6561) < 5.0 * mc.g_sigma);

  // A different seed draws different counts.
  const SimResult other = run_ghz_experiment(table, words, 1000000, n, 7,
                                             SimMode::monte_carlo);
  bool any_diff = false;
  for (std::size_t w = 0; w < 4; ++w) {
    for (int f = 0; f < 8; ++f) {
      any_diff |= other.words[w].cell_counts[f] != mc.words[w].cell_counts[f];
    }
  }
  CHECK(any_diff);
}

}  // namespace
}  // namespace tghz
