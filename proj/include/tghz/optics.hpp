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

// Jones-calculus model of the three-stage polarization Mach-Zehnder
// interferometer. A heralded photon is split on an H/V beam splitter;
// each arm passes three projection stages (a quarter-wave plate, a
// half-wave plate, and an H-transmitting splitter per stage) plus an
// exit plate pair, and the arms recombine with a relative minus sign at
// the dark detector D2.
//
// Polarization dictionary (H, V) basis:
//   H = z+, V = z-, D = x+, A = x-, R = y+, L = y-.
//
// Two layers of modeling:
//   - abstract: a trial is a triple of dictionary states (one per time);
//     the D2 probability follows from the two arm products
//     pH = prod <a_t|H>, pV = prod <a_t|V>.
//   - concrete: a trial is sixteen mounted wave-plate angles; the arm
//     amplitudes are read off the actual matrix chains. validate_convention
//     compares the two layers per trial.
//
// The experiment evaluation (run_ghz_experiment) uses the abstract layer,
// with each trial's projection cell derived from its schedule id plus the
// group-to-word data file; whether the mounted angles realize those cells
// is the separate validate_convention step.
//
// Noise: visibility acts on the interference cross term only, i.e. a
// fraction v of the photons interferes and the rest add incoherently.
// This makes the eight cell probabilities of a word sum to 1 at every v
// and degrades every correlator linearly (the functional goes as v^4).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tghz/errors.hpp"
#include "tghz/histories.hpp"
#include "tghz/measurement.hpp"

namespace tghz {

using JonesVector = PureQubit;  // field amplitudes in the (H, V) basis
using JonesMatrix = Matrix2;

// ---------------------------------------------------------------------------
// Dictionary states and measurement cells.
// ---------------------------------------------------------------------------

// Published basis indices: 1 = D, 2 = A, 3 = R, 4 = L.
enum class CellBasis : int { d = 1, a = 2, r = 3, l = 4 };

inline CellBasis cell_basis_from_index(int i) {
  if (i < 1 || i > 4) throw validation_error("basis index must be 1..4");
  return static_cast<CellBasis>(i);
}

inline JonesVector cell_state(CellBasis b) {
  switch (b) {
    case CellBasis::d: return x_plus();
    case CellBasis::a: return x_minus();
    case CellBasis::r: return y_plus();
    case CellBasis::l: return y_minus();
  }
  throw validation_error("unsupported basis label");
}

inline int cell_sign(CellBasis b) {
  return (b == CellBasis::d || b == CellBasis::r) ? +1 : -1;
}

inline Axis cell_axis(CellBasis b) {
  return (b == CellBasis::d || b == CellBasis::a) ? Axis::x : Axis::y;
}

inline char cell_char(CellBasis b) {
  switch (b) {
    case CellBasis::d: return 'D';
    case CellBasis::a: return 'A';
    case CellBasis::r: return 'R';
    case CellBasis::l: return 'L';
  }
  return '?';
}

// One projection setting of the interferometer: the dictionary state
// analyzed at each of the three times (earliest first).
struct StageSpec {
  std::array<CellBasis, 3> slots{CellBasis::d, CellBasis::d, CellBasis::d};

  int sign() const {
    return cell_sign(slots[0]) * cell_sign(slots[1]) * cell_sign(slots[2]);
  }
  std::string str() const {
    return {cell_char(slots[0]), cell_char(slots[1]), cell_char(slots[2])};
  }
};

// Base cell of a word: the all-plus eigenstates (X -> D, Y -> R).
inline StageSpec base_cell_for_word(const AxisWord& word) {
  if (word.size() != 3) {
    throw validation_error("a measurement cell needs a three-letter word");
  }
  StageSpec spec;
  for (std::size_t t = 0; t < 3; ++t) {
    switch (word.axes[t]) {
      case Axis::x: spec.slots[t] = CellBasis::d; break;
      case Axis::y: spec.slots[t] = CellBasis::r; break;
      default:
        throw validation_error("cells are defined for words over {X, Y}");
    }
  }
  return spec;
}

// Bit b of `flips` swaps slot b to the opposite eigenstate.
inline StageSpec flip_cell(StageSpec base, int flips) {
  if (flips < 0 || flips > 7) throw validation_error("flip index must be 0..7");
  for (int t = 0; t < 3; ++t) {
    if ((flips >> t) & 1) {
      auto& s = base.slots[static_cast<std::size_t>(t)];
      switch (s) {
        case CellBasis::d: s = CellBasis::a; break;
        case CellBasis::a: s = CellBasis::d; break;
        case CellBasis::r: s = CellBasis::l; break;
        case CellBasis::l: s = CellBasis::r; break;
      }
    }
  }
  return base;
}

// ---------------------------------------------------------------------------
// Optical elements.
// ---------------------------------------------------------------------------

enum class WaveplateKind { hwp, qwp };

// Pinned by the trial table itself: how a mounted angle turns into a Jones
// matrix (retardance sense of the quarter-wave plate) and which plate the
// light meets first inside one stage pair. The table's count-level
// predictions are identical under either retardance sense, so that choice
// stays a convention rather than a measurement.
struct WaveplateConvention {
  std::string id;
  int qwp_sense = +1;     // sign of the quarter-wave retardance phase
  bool qwp_first = true;  // light passes the QWP before the HWP in a pair
};

inline const std::vector<WaveplateConvention>& known_conventions() {
  static const std::vector<WaveplateConvention> table = {
      {"qwp-plus", +1, true},
      {"qwp-minus", -1, true},
      {"hwp-first", +1, false},
  };
  return table;
}

inline WaveplateConvention convention(const std::string& id) {
  for (const WaveplateConvention& c : known_conventions()) {
    if (c.id == id) return c;
  }
  std::string msg = "unknown wave-plate convention '" + id + "'; known:";
  for (const WaveplateConvention& c : known_conventions()) msg += " " + c.id;
  throw validation_error(msg);
}

inline Matrix2 rotation_matrix(double rad) {
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  return Matrix2{c, -s, s, c};
}

// Linear retarder with fast axis at `angle_deg` from horizontal:
// R(rho) diag(1, e^{i s Gamma}) R(-rho), Gamma = pi for HWP, pi/2 for QWP.
inline JonesMatrix waveplate_matrix(WaveplateKind kind, double angle_deg,
                                    const WaveplateConvention& conv) {
  if (!std::isfinite(angle_deg)) {
    throw validation_error("wave-plate angle must be finite");
  }
  const double rho = angle_deg * M_PI / 180.0;
  const double gamma =
      (kind == WaveplateKind::hwp) ? M_PI : conv.qwp_sense * M_PI / 2.0;
  const Matrix2 retard{1.0, 0.0, 0.0, std::exp(cplx(0.0, gamma))};
  return rotation_matrix(rho) * retard * rotation_matrix(-rho);
}

inline JonesMatrix waveplate_matrix(WaveplateKind kind, double angle_deg,
                                    const std::string& convention_id) {
  return waveplate_matrix(kind, angle_deg, convention(convention_id));
}

// Splits `field` on a polarizing beam splitter with transmission axis
// `alpha`; returns (transmitted, reflected).
inline std::pair<JonesVector, JonesVector> pbs_apply(const PureQubit& alpha,
                                                     const PureQubit& alpha_bar,
                                                     const JonesVector& field) {
  if (std::abs(norm(alpha) - 1.0) > kTol ||
      std::abs(norm(alpha_bar) - 1.0) > kTol) {
    throw validation_error("beam-splitter basis states must be normalized");
  }
  if (std::abs(inner(alpha, alpha_bar)) > kTol) {
    throw validation_error("beam-splitter basis states must be orthogonal");
  }
  const cplx t = inner(alpha, field);
  const cplx r = inner(alpha_bar, field);
  return {t * alpha, r * alpha_bar};
}

// ---------------------------------------------------------------------------
// Noise model.
// ---------------------------------------------------------------------------

struct NoiseModel {
  double visibility = 1.0;   // interference contrast, 0..1
  double phase_drift = 0.0;  // residual recombination phase, radians
  double dark_rate = 0.0;    // expected stray D2 counts per trial
};

inline void validate(const NoiseModel& n) {
  if (!(n.visibility >= 0.0 && n.visibility <= 1.0)) {
    throw validation_error("visibility must lie in [0, 1]");
  }
  if (!std::isfinite(n.phase_drift)) {
    throw validation_error("phase drift must be finite");
  }
  if (!(n.dark_rate >= 0.0) || !std::isfinite(n.dark_rate)) {
    throw validation_error("dark rate must be finite and nonnegative");
  }
}

inline NoiseModel ideal_noise() { return NoiseModel{}; }

// ---------------------------------------------------------------------------
// Abstract interferometer model.
// ---------------------------------------------------------------------------

// Arm chain products for a projection cell.
inline std::pair<cplx, cplx> arm_products(const StageSpec& spec) {
  cplx ph = 1.0;
  cplx pv = 1.0;
  for (CellBasis b : spec.slots) {
    const PureQubit a = cell_state(b);
    ph *= inner(a, z_plus());
    pv *= inner(a, z_minus());
  }
  return {ph, pv};
}

// Dark-port amplitude (pH - v e^{i delta} pV)/sqrt2. At v = 1, delta = 0
// its squared magnitude is the post-selected cell probability, and those
// probabilities sum to 1 over the eight sign tuples of a word.
inline cplx mzi_amplitude(const StageSpec& spec, const NoiseModel& noise) {
  validate(noise);
  const auto [ph, pv] = arm_products(spec);
  const cplx drift = std::exp(cplx(0.0, noise.phase_drift));
  return (ph - noise.visibility * drift * pv) / std::sqrt(2.0);
}

// Combines two arm amplitudes into a dark-port probability with the
// visibility acting on the cross term only.
inline double dark_port_probability(cplx arm_h, cplx arm_v,
                                    const NoiseModel& noise) {
  const cplx drift = std::exp(cplx(0.0, noise.phase_drift));
  const double cross =
      (drift * std::conj(arm_h) * arm_v).real();
  const double w =
      std::norm(arm_h) + std::norm(arm_v) - 2.0 * noise.visibility * cross;
  return w / 2.0;
}

// Post-selected probability of one projection cell. Equals
// |mzi_amplitude|^2 at v = 1; at v < 1 the non-interfering fraction is
// kept, so the eight cells of a word still sum to 1.
inline double cell_probability(const StageSpec& spec, const NoiseModel& noise) {
  validate(noise);
  const auto [ph, pv] = arm_products(spec);
  return dark_port_probability(ph, pv, noise);
}

// Correlator of a word over {X, Y} predicted by the interferometer:
// the sign-weighted average over the word's eight cells.
inline double word_expectation(const AxisWord& word, const NoiseModel& noise) {
  const StageSpec base = base_cell_for_word(word);
  double num = 0.0;
  double den = 0.0;
  for (int f = 0; f < 8; ++f) {
    const StageSpec cell = flip_cell(base, f);
    const double p = cell_probability(cell, noise);
    num += cell.sign() * p;
    den += p;
  }
  if (den < kTol) throw degenerate_state("word has zero total weight");
  return num / den;
}

// ---------------------------------------------------------------------------
// Trial table.
// ---------------------------------------------------------------------------

struct TrialConfig {
  // "Ref" or "Trial<g>.<k>" with g in 1..4 and k in 1..8. All beam
  // splitters sit in the fixed H/V basis; the per-trial analysis bases
  // enter through the plate angles.
  std::string id;
  std::array<double, 8> qwp_deg{};
  std::array<double, 8> hwp_deg{};
};

inline bool is_known_trial_id(const std::string& id) {
  if (id == "Ref") return true;
  if (id.size() != 8 || id.compare(0, 5, "Trial") != 0) return false;
  return id[5] >= '1' && id[5] <= '4' && id[6] == '.' && id[7] >= '1' &&
         id[7] <= '8';
}

// Loads the 33-row schedule (Ref + 32 trials) with 16 angle columns per
// row. Lines starting with '#' are comments; the first data line is the
// column header.
inline std::vector<TrialConfig> load_trial_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open trial table '" + path + "'");
  std::vector<TrialConfig> out;
  bool header_seen = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string id;
    row >> id;
    if (!header_seen) {
      if (id != "id") throw parse_error("trial table must start with an 'id' header row");
      header_seen = true;
      continue;
    }
    if (!is_known_trial_id(id)) {
      throw parse_error("unknown trial id '" + id + "' in trial table");
    }
    TrialConfig cfg;
    cfg.id = id;
    for (int k = 0; k < 8; ++k) {
      if (!(row >> cfg.qwp_deg[static_cast<std::size_t>(k)] >>
            cfg.hwp_deg[static_cast<std::size_t>(k)])) {
        throw parse_error("row '" + id + "' needs 16 numeric angle columns");
      }
      if (!std::isfinite(cfg.qwp_deg[static_cast<std::size_t>(k)]) ||
          !std::isfinite(cfg.hwp_deg[static_cast<std::size_t>(k)])) {
        throw parse_error("row '" + id + "' has a non-finite angle");
      }
    }
    double extra;
    if (row >> extra) {
      throw parse_error("row '" + id + "' has more than 16 angle columns");
    }
    out.push_back(cfg);
  }
  if (out.size() != 33) {
    throw parse_error("trial table must hold 33 rows (Ref + 32 trials), got " +
                      std::to_string(out.size()));
  }
  return out;
}

// Group-to-word mapping, shipped as data so a corrected assignment needs
// no rebuild. Rows: "<group> <word>", e.g. "Trial1 XXX".
inline std::map<std::string, AxisWord> load_trial_words(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open trial word table '" + path + "'");
  std::map<std::string, AxisWord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string group, word;
    if (!(row >> group >> word)) {
      throw parse_error("trial word row needs '<group> <word>'");
    }
    if (out.count(group)) {
      throw parse_error("duplicate trial group '" + group + "'");
    }
    out[group] = AxisWord::parse(word);
  }
  if (out.size() != 4) {
    throw parse_error("trial word table must map exactly 4 groups");
  }
  return out;
}

// The projection cell measured by a trial id: the group's word fixes the
// base cell and bit b of (k - 1) flips slot b.
inline StageSpec trial_cell(const std::string& id,
                            const std::map<std::string, AxisWord>& words) {
  if (!is_known_trial_id(id) || id == "Ref") {
    throw validation_error("trial '" + id + "' does not select a cell");
  }
  const std::string group = id.substr(0, 6);
  const auto it = words.find(group);
  if (it == words.end()) {
    throw validation_error("no word assigned to group '" + group + "'");
  }
  const int flips = id[7] - '1';
  return flip_cell(base_cell_for_word(it->second), flips);
}

// ---------------------------------------------------------------------------
// Concrete arm chains.
// ---------------------------------------------------------------------------

// Matrix of one plate pair (one "set") under a convention.
inline JonesMatrix set_matrix(const TrialConfig& cfg, int set,
                              const WaveplateConvention& conv) {
  if (set < 0 || set > 7) throw validation_error("set index must be 0..7");
  const auto s = static_cast<std::size_t>(set);
  const JonesMatrix q = waveplate_matrix(WaveplateKind::qwp, cfg.qwp_deg[s], conv);
  const JonesMatrix h = waveplate_matrix(WaveplateKind::hwp, cfg.hwp_deg[s], conv);
  return conv.qwp_first ? h * q : q * h;
}

// Arm amplitudes through the concrete plate chains. The reflected arm
// (sets 1-4) starts in V and ends in V; the transmitted arm (sets 5-8)
// stays in H; interior splitters pass H onward in both arms.
struct ArmAmplitudes {
  cplx reflected = 0.0;   // <V| S4 P_H S3 P_H S2 P_H S1 |V>
  cplx transmitted = 0.0; // <H| S8 P_H S7 P_H S6 P_H S5 |H>
};

inline ArmAmplitudes arm_amplitudes(const TrialConfig& cfg,
                                    const WaveplateConvention& conv) {
  const Matrix2 project_h{1.0, 0.0, 0.0, 0.0};
  const auto chain = [&](int first) {
    Matrix2 m = set_matrix(cfg, first, conv);
    for (int k = 1; k < 4; ++k) {
      m = set_matrix(cfg, first + k, conv) * project_h * m;
    }
    return m;
  };
  const Matrix2 m1 = chain(0);
  const Matrix2 m2 = chain(4);
  ArmAmplitudes a;
  a.reflected = inner(z_minus(), apply(m1, z_minus()));
  a.transmitted = inner(z_plus(), apply(m2, z_plus()));
  return a;
}

// Dark-port probability of a concrete trial: the arms recombine with a
// relative minus sign at D2, so the ideal count is |A_t - A_r|^2 / 2.
inline double concrete_cell_probability(const TrialConfig& cfg,
                                        const WaveplateConvention& conv,
                                        const NoiseModel& noise) {
  validate(noise);
  const ArmAmplitudes a = arm_amplitudes(cfg, conv);
  return dark_port_probability(a.transmitted, a.reflected, noise);
}

// ---------------------------------------------------------------------------
// Photon counting.
// ---------------------------------------------------------------------------

struct TrialCounts {
  double probability = 0.0;   // post-selected D2 cell probability
  std::int64_t injected = 0;  // photons entering the post-selected ensemble
  std::int64_t d2 = 0;        // sampled D2 clicks, dark counts included
};

inline TrialCounts sample_counts(double probability, std::int64_t photons,
                                 const NoiseModel& noise, std::uint64_t seed,
                                 double transmission) {
  if (photons <= 0) throw validation_error("photon count must be positive");
  if (!(transmission >= 0.0 && transmission <= 1.0)) {
    throw validation_error("transmission must lie in [0, 1]");
  }
  TrialCounts out;
  out.probability = probability;
  out.injected = photons;
  const double success =
      std::clamp(probability * transmission, 0.0, 1.0);
  std::mt19937_64 rng(seed);
  std::binomial_distribution<std::int64_t> clicks(photons, success);
  out.d2 = clicks(rng);
  if (noise.dark_rate > 0.0) {
    std::poisson_distribution<std::int64_t> dark(noise.dark_rate);
    out.d2 += dark(rng);
  }
  return out;
}

inline TrialCounts simulate_trial(const StageSpec& spec, std::int64_t photons,
                                  const NoiseModel& noise, std::uint64_t seed,
                                  double transmission = 1.0) {
  validate(noise);
  return sample_counts(cell_probability(spec, noise), photons, noise, seed,
                       transmission);
}

inline TrialCounts simulate_trial(const TrialConfig& cfg,
                                  const WaveplateConvention& conv,
                                  std::int64_t photons,
                                  const NoiseModel& noise, std::uint64_t seed,
                                  double transmission = 1.0) {
  return sample_counts(concrete_cell_probability(cfg, conv, noise), photons,
                       noise, seed, transmission);
}

// ---------------------------------------------------------------------------
// Full experiment.
// ---------------------------------------------------------------------------

enum class SimMode { analytic, monte_carlo };

struct WordEstimate {
  AxisWord word;
  double correlator = 0.0;
  double sigma = 0.0;  // Poisson-propagated standard error (0 in analytic mode)
  std::array<double, 8> cell_probabilities{};  // by flip index
  std::array<std::int64_t, 8> cell_counts{};
};

struct SimResult {
  SimMode mode = SimMode::analytic;
  std::int64_t photons_per_trial = 0;  // Counts(total) for every trial
  NoiseModel noise;
  std::uint64_t seed = 0;
  std::array<WordEstimate, 4> words{};
  double g = 0.0;
  double g_sigma = 0.0;
};

// Runs the complete 32-trial schedule. Correlators are sign-weighted
// count ratios over each word's eight cells; the functional is minus the
// product of the four correlators. Monte-Carlo mode draws per-trial
// counts with seed = base seed XOR the trial's canonical index, so trials
// are independent and the aggregation is order-free.
inline SimResult run_ghz_experiment(const std::vector<TrialConfig>& trials,
                                    const std::map<std::string, AxisWord>& words,
                                    std::int64_t photons,
                                    const NoiseModel& noise, std::uint64_t seed,
                                    SimMode mode) {
  validate(noise);
  if (photons <= 0) throw validation_error("photon count must be positive");

  // The schedule must cover every trial id exactly once (Ref optional).
  std::map<std::string, const TrialConfig*> by_id;
  for (const TrialConfig& t : trials) {
    if (t.id == "Ref") continue;
    if (!by_id.emplace(t.id, &t).second) {
      throw validation_error("duplicate trial id '" + t.id + "'");
    }
  }
  for (int g = 1; g <= 4; ++g) {
    for (int k = 1; k <= 8; ++k) {
      const std::string id =
          "Trial" + std::to_string(g) + "." + std::to_string(k);
      if (!by_id.count(id)) {
        throw validation_error("schedule is missing trial '" + id + "'");
      }
    }
  }

  // Each functional word must be assigned to exactly one group.
  const std::array<AxisWord, 4> functional = ghz_words();
  std::array<std::string, 4> group_of_word;
  for (std::size_t w = 0; w < 4; ++w) {
    bool found = false;
    for (const auto& [group, word] : words) {
      if (word.str() == functional[w].str()) {
        group_of_word[w] = group;
        found = true;
        break;
      }
    }
    if (!found) {
      throw validation_error("no trial group assigned to word " +
                             functional[w].str());
    }
  }

  SimResult res;
  res.mode = mode;
  res.photons_per_trial = photons;
  res.noise = noise;
  res.seed = seed;

  for (std::size_t w = 0; w < 4; ++w) {
    WordEstimate& est = res.words[w];
    est.word = functional[w];
    const std::string& group = group_of_word[w];
    const int group_number = group[5] - '0';

    double num_p = 0.0;
    double num_c = 0.0;
    double den_c = 0.0;
    std::array<int, 8> cell_signs{};
    for (int f = 0; f < 8; ++f) {
      const std::string id = group + "." + std::to_string(f + 1);
      const StageSpec cell = trial_cell(id, words);
      const double p = cell_probability(cell, noise);
      est.cell_probabilities[static_cast<std::size_t>(f)] = p;
      cell_signs[static_cast<std::size_t>(f)] = cell.sign();
      num_p += cell.sign() * p;

      std::int64_t counts = 0;
      if (mode == SimMode::monte_carlo) {
        const std::uint64_t trial_index =
            static_cast<std::uint64_t>((group_number - 1) * 8 + f);
        counts = sample_counts(p, photons, noise, seed ^ trial_index, 1.0).d2;
      } else {
        counts = std::llround(p * static_cast<double>(photons));
      }
      est.cell_counts[static_cast<std::size_t>(f)] = counts;
      num_c += cell.sign() * static_cast<double>(counts);
      den_c += static_cast<double>(counts);
    }

    if (mode == SimMode::analytic) {
      // The eight cell probabilities of a word sum to 1 by construction.
      est.correlator = num_p;
      est.sigma = 0.0;
    } else {
      if (den_c <= 0.0) {
        throw degenerate_state("word " + est.word.str() + " collected no counts");
      }
      est.correlator = num_c / den_c;
      // Poisson propagation: Var(E) = sum_m C_m ((s_m T - S) / T^2)^2.
      double var = 0.0;
      for (int f = 0; f < 8; ++f) {
        const double c = static_cast<double>(
            est.cell_counts[static_cast<std::size_t>(f)]);
        const double d =
            (cell_signs[static_cast<std::size_t>(f)] * den_c - num_c) /
            (den_c * den_c);
        var += c * d * d;
      }
      est.sigma = std::sqrt(var);
    }
  }

  double g = -1.0;
  for (const WordEstimate& est : res.words) g *= est.correlator;
  res.g = g;
  double var_g = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double partial = 1.0;
    for (std::size_t j = 0; j < 4; ++j) {
      if (j != i) partial *= res.words[j].correlator;
    }
    var_g += partial * partial * res.words[i].sigma * res.words[i].sigma;
  }
  res.g_sigma = std::sqrt(var_g);
  return res;
}

// ---------------------------------------------------------------------------
// Convention validation against the shipped table.
// ---------------------------------------------------------------------------

enum class InterferenceTag { minus_port, plus_port, none };

inline const char* interference_tag_name(InterferenceTag t) {
  switch (t) {
    case InterferenceTag::minus_port: return "minus";
    case InterferenceTag::plus_port: return "plus";
    case InterferenceTag::none: return "none";
  }
  return "?";
}

struct TrialCheck {
  std::string id;
  StageSpec scheduled_cell;
  // Dictionary labels of the states analyzed by the six interior stages
  // and the two exits, classified up to phase ('?' when non-canonical).
  // Parked plates rephase the interior beam, so these labels are gauge
  // dependent; conformance is decided at the count level below.
  std::array<char, 8> stage_labels{};
  bool structure_ok = false;
  InterferenceTag tag = InterferenceTag::none;
  double concrete_count = 0.0;   // |A_t - A_r|^2 / 2 from the plate chains
  double predicted_minus = 0.0;  // abstract dark-port prediction
  double predicted_plus = 0.0;   // abstract bright-port prediction
  bool pass = false;
};

struct ConventionReport {
  std::string convention_id;
  double ref_count = 0.0;  // dark-port count of the Ref alignment row
  std::vector<TrialCheck> trials;
  int n_minus = 0;
  int n_plus = 0;
  int n_none = 0;
  bool all_pass = false;
};

namespace detail {

// Classifies a Jones vector against the six dictionary states up to a
// global phase.
inline char classify_dictionary(const JonesVector& v) {
  static const std::array<std::pair<char, PureQubit>, 6> dict = {{
      {'H', z_plus()},
      {'V', z_minus()},
      {'D', x_plus()},
      {'A', x_minus()},
      {'R', y_plus()},
      {'L', y_minus()},
  }};
  const double n = norm(v);
  if (n < kTol) return '?';
  for (const auto& [label, state] : dict) {
    if (std::abs(std::abs(inner(state, v)) / n - 1.0) < 1e-9) return label;
  }
  return '?';
}

}  // namespace detail

inline TrialCheck check_trial(const TrialConfig& cfg,
                              const WaveplateConvention& conv,
                              const std::map<std::string, AxisWord>& words) {
  TrialCheck out;
  out.id = cfg.id;
  out.scheduled_cell = trial_cell(cfg.id, words);

  std::array<Matrix2, 8> sets;
  for (int k = 0; k < 8; ++k) {
    sets[static_cast<std::size_t>(k)] = set_matrix(cfg, k, conv);
  }

  // Interior stages analyze chi_k = S_k^dag |H>; exits map the interior
  // H beam back onto the recombination ports.
  bool equatorial = true;
  for (int k : {0, 1, 2, 4, 5, 6}) {
    const auto s = static_cast<std::size_t>(k);
    const JonesVector chi = apply(adjoint(sets[s]), z_plus());
    out.stage_labels[s] = detail::classify_dictionary(chi);
    if (std::abs(std::abs(chi.c0) - std::abs(chi.c1)) > 1e-9) {
      equatorial = false;
    }
  }
  const JonesVector exit_r = apply(sets[3], z_plus());
  const JonesVector exit_t = apply(sets[7], z_plus());
  out.stage_labels[3] = detail::classify_dictionary(exit_r);
  out.stage_labels[7] = detail::classify_dictionary(exit_t);
  const bool exits_ok =
      std::abs(std::abs(inner(z_minus(), exit_r)) - 1.0) < 1e-9 &&
      std::abs(std::abs(inner(z_plus(), exit_t)) - 1.0) < 1e-9;
  const bool repeated_first_set =
      max_abs_diff(sets[0], sets[4]) < 1e-9;
  out.structure_ok = equatorial && exits_ok && repeated_first_set;

  const ArmAmplitudes a = arm_amplitudes(cfg, conv);
  out.concrete_count = 0.5 * std::norm(a.transmitted - a.reflected);
  const auto [ph, pv] = arm_products(out.scheduled_cell);
  out.predicted_minus = 0.5 * std::norm(ph - pv);
  out.predicted_plus = 0.5 * std::norm(ph + pv);
  if (std::abs(out.concrete_count - out.predicted_minus) < 1e-9) {
    out.tag = InterferenceTag::minus_port;
  } else if (std::abs(out.concrete_count - out.predicted_plus) < 1e-9) {
    out.tag = InterferenceTag::plus_port;
  } else {
    out.tag = InterferenceTag::none;
  }
  out.pass = out.structure_ok && out.tag == InterferenceTag::minus_port;
  return out;
}

inline ConventionReport validate_convention(
    const WaveplateConvention& conv, const std::vector<TrialConfig>& table,
    const std::map<std::string, AxisWord>& words) {
  ConventionReport report;
  report.convention_id = conv.id;
  bool all = true;
  for (const TrialConfig& cfg : table) {
    if (cfg.id == "Ref") {
      const ArmAmplitudes a = arm_amplitudes(cfg, conv);
      report.ref_count = 0.5 * std::norm(a.transmitted - a.reflected);
      continue;
    }
    TrialCheck check = check_trial(cfg, conv, words);
    switch (check.tag) {
      case InterferenceTag::minus_port: ++report.n_minus; break;
      case InterferenceTag::plus_port: ++report.n_plus; break;
      case InterferenceTag::none: ++report.n_none; break;
    }
    all = all && check.pass;
    report.trials.push_back(std::move(check));
  }
  report.all_pass = all && !report.trials.empty();
  return report;
}

// Abstract bypass: a schedule given directly as projection cells has
// nothing to calibrate, so every check passes by construction.
inline ConventionReport validate_convention(
    const std::vector<StageSpec>& specs) {
  ConventionReport report;
  report.convention_id = "abstract";
  report.ref_count = 1.0;
  for (const StageSpec& spec : specs) {
    TrialCheck check;
    check.id = spec.str();
    check.scheduled_cell = spec;
    const auto [ph, pv] = arm_products(spec);
    check.predicted_minus = 0.5 * std::norm(ph - pv);
    check.predicted_plus = 0.5 * std::norm(ph + pv);
    check.concrete_count = check.predicted_minus;
    check.structure_ok = true;
    check.tag = InterferenceTag::minus_port;
    check.pass = true;
    for (char& c : check.stage_labels) c = '-';
    ++report.n_minus;
    report.trials.push_back(std::move(check));
  }
  report.all_pass = true;
  return report;
}

}  // namespace tghz
