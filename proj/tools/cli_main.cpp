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

// Command-line front end. Subcommands:
//   ghz            correlators and the functional for built-in states
//   bounds         the three maximizations, bound versus achieved
//   classical      the classical-model maximization alone
//   ancilla        coupling-register snapshots and erasure post-selection
//   optics         the 32-trial interferometer run, exact or sampled
//   validate-table conformance report for a wave-plate schedule
//
// `--format structured` emits one JSON document on stdout; runs with the
// same inputs and seed are byte-identical. Validation failures exit
// nonzero with a single diagnostic line on stderr.

#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tghz/tghz.hpp"

namespace {

using tghz::json;

constexpr const char* kDefaultTable = TGHZ_DATA_DIR "/trial_table.tsv";
constexpr const char* kDefaultWords = TGHZ_DATA_DIR "/trial_words.tsv";

struct GlobalOptions {
  std::string format = "human";
  std::uint64_t seed = 0;
};

bool structured(const GlobalOptions& g) { return g.format == "structured"; }

void emit(const json& doc) { std::cout << doc.dump(2) << "\n"; }

std::ostream& out() {
  std::cout << std::setprecision(15);
  return std::cout;
}

json correlators_json(const tghz::GhzReport& report) {
  json c = json::object();
  const auto words = tghz::ghz_words();
  for (std::size_t i = 0; i < 4; ++i) {
    c[words[i].str()] = report.correlators[i];
  }
  return c;
}

// ---------------------------------------------------------------------------
// ghz
// ---------------------------------------------------------------------------

struct GhzOptions {
  std::string state = "ghz";
  std::vector<double> theta;
  std::vector<double> phi;
};

tghz::HistoryState build_state(const GhzOptions& opt) {
  if (opt.state == "ghz") return tghz::ghz_history();
  if (opt.state == "w") return tghz::w_history();
  if (opt.state == "separable") {
    if (opt.theta.size() != 3 || opt.phi.size() != 3) {
      throw tghz::validation_error(
          "--state separable needs --theta a,b,c and --phi a,b,c (radians)");
    }
    return tghz::separable_history(opt.theta[0], opt.phi[0], opt.theta[1],
                                   opt.phi[1], opt.theta[2], opt.phi[2]);
  }
  throw tghz::validation_error("unknown state '" + opt.state +
                               "'; known: ghz, w, separable");
}

int run_ghz(const GlobalOptions& g, const GhzOptions& opt) {
  const tghz::HistoryState state = build_state(opt);
  const tghz::GhzReport report = tghz::ghz_report(state);
  const double chain = tghz::frobenius_norm(tghz::chain_operator(state));

  if (structured(g)) {
    json doc;
    doc["command"] = "ghz";
    doc["state"] = opt.state;
    doc["display"] = tghz::to_display_string(state);
    doc["chain_norm"] = chain;
    doc["correlators"] = correlators_json(report);
    doc["functional"] = report.value;
    doc["history"] = tghz::to_json(state);
    emit(doc);
    return 0;
  }

  out() << "state: " << opt.state << "\n"
        << "display: " << tghz::to_display_string(state) << "\n"
        << "chain norm: " << chain << "\n";
  const auto words = tghz::ghz_words();
  for (std::size_t i = 0; i < 4; ++i) {
    out() << "<" << words[i].str() << "> = " << report.correlators[i] << "\n";
  }
  out() << "G = " << report.value << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// bounds / classical
// ---------------------------------------------------------------------------

json search_json(const std::string& objective, double bound,
                 const tghz::OptimizationResult& r) {
  json doc;
  doc["objective"] = objective;
  doc["bound"] = bound;
  doc["achieved"] = r.best_value;
  doc["gap"] = bound - r.best_value;
  doc["evaluations"] = r.iterations;
  doc["argmax"] = r.argmax;
  json trace = json::array();
  for (const auto& [n, v] : r.trace) trace.push_back(json::array({n, v}));
  doc["trace"] = trace;
  return doc;
}

void print_search(const std::string& objective, double bound,
                  const tghz::OptimizationResult& r) {
  out() << "objective: " << objective << "\n"
        << "  bound:       " << bound << "\n"
        << "  achieved:    " << r.best_value << "\n"
        << "  evaluations: " << r.iterations << "\n"
        << "  argmax:     ";
  for (double x : r.argmax) out() << " " << x;
  out() << "\n";
}

int run_bounds(const GlobalOptions& g) {
  tghz::OptimizerOptions options;
  options.seed = g.seed;
  const tghz::OptimizationResult sep = tghz::maximize_separable_g(options);
  const tghz::OptimizationResult two = tghz::maximize_partial_g(options);
  const tghz::OptimizationResult cls = tghz::maximize_classical_g(options);

  if (structured(g)) {
    json doc;
    doc["command"] = "bounds";
    doc["seed"] = g.seed;
    doc["searches"] = json::array({search_json("separable", 0.0, sep),
                                   search_json("two-time", 0.0625, two),
                                   search_json("classical", 0.0625, cls)});
    emit(doc);
    return 0;
  }

  print_search("separable", 0.0, sep);
  print_search("two-time", 0.0625, two);
  print_search("classical", 0.0625, cls);
  return 0;
}

int run_classical(const GlobalOptions& g) {
  tghz::OptimizerOptions options;
  options.seed = g.seed;
  const tghz::OptimizationResult r = tghz::maximize_classical_g(options);
  const double at_canonical = tghz::classical_g(tghz::classical_argmax());

  if (structured(g)) {
    json doc;
    doc["command"] = "classical";
    doc["seed"] = g.seed;
    doc["canonical_maximizer"] = tghz::classical_argmax();
    doc["canonical_value"] = at_canonical;
    doc["search"] = search_json("classical", 0.0625, r);
    emit(doc);
    return 0;
  }

  out() << "canonical maximizer value: " << at_canonical << "\n";
  print_search("classical", 0.0625, r);
  return 0;
}

// ---------------------------------------------------------------------------
// ancilla
// ---------------------------------------------------------------------------

std::string register_label(std::size_t i) {
  std::string s = "|";
  s += static_cast<char>('0' + (i >> 3));
  s += ';';
  s += static_cast<char>('0' + ((i >> 2) & 1));
  s += static_cast<char>('0' + ((i >> 1) & 1));
  s += static_cast<char>('0' + (i & 1));
  s += '>';
  return s;
}

json register_json(const tghz::Register& reg) {
  json doc = json::object();
  for (std::size_t i = 0; i < 16; ++i) {
    if (std::abs(reg.amp[i]) > 0.0) {
      doc[register_label(i)] =
          json::array({reg.amp[i].real(), reg.amp[i].imag()});
    }
  }
  return doc;
}

int run_ancilla(const GlobalOptions& g) {
  const tghz::ProtocolTranscript t = tghz::run_protocol(
      tghz::x_plus(), {tghz::Axis::z, tghz::Axis::z, tghz::Axis::z});
  const tghz::Register& final_reg = t.states[3];

  struct Outcome {
    const char* name;
    tghz::AncillaState state;
    tghz::AncillaOutcome kind;
  };
  const std::array<Outcome, 4> outcomes = {
      Outcome{"|000>", tghz::ancilla_basis_ket(0), tghz::AncillaOutcome::all_zero},
      Outcome{"|111>", tghz::ancilla_basis_ket(7), tghz::AncillaOutcome::all_one},
      Outcome{"ghz+", tghz::ancilla_ghz_plus(), tghz::AncillaOutcome::ghz_plus},
      Outcome{"ghz-", tghz::ancilla_ghz_minus(), tghz::AncillaOutcome::ghz_minus},
  };

  const std::array<const char*, 4> stage_names = {
      "initial", "after coupling 1", "after coupling 2", "after coupling 3"};

  if (structured(g)) {
    json doc;
    doc["command"] = "ancilla";
    doc["system"] = "x+";
    doc["couplings"] = "ZZZ";
    json snaps = json::array();
    for (std::size_t s = 0; s < 4; ++s) {
      snaps.push_back(json{{"stage", stage_names[s]},
                           {"amplitudes", register_json(t.states[s])}});
    }
    doc["snapshots"] = snaps;
    json post = json::array();
    for (const Outcome& o : outcomes) {
      const tghz::PostSelection sel =
          tghz::postselect_ancillas(final_reg, o.state);
      json entry;
      entry["outcome"] = o.name;
      entry["probability"] = sel.probability;
      if (sel.conditional.has_value()) {
        entry["conditional"] = json::array(
            {tghz::to_json(sel.conditional->c0), tghz::to_json(sel.conditional->c1)});
      }
      entry["implied_history"] =
          tghz::to_display_string(tghz::implied_history(o.kind));
      post.push_back(entry);
    }
    doc["postselection"] = post;
    json readout = json::object();
    for (const tghz::AxisWord& w : tghz::ghz_words()) {
      readout[w.str()] = tghz::expectation_via_ancilla(w);
    }
    doc["readout"] = readout;
    emit(doc);
    return 0;
  }

  out() << "system: x+, couplings: ZZZ\n";
  for (std::size_t s = 0; s < 4; ++s) {
    out() << stage_names[s] << ":\n";
    for (std::size_t i = 0; i < 16; ++i) {
      const tghz::cplx a = t.states[s].amp[i];
      if (std::abs(a) > 0.0) {
        out() << "  " << register_label(i) << "  " << a.real();
        if (a.imag() != 0.0) out() << " + " << a.imag() << "i";
        out() << "\n";
      }
    }
  }
  out() << "post-selection:\n";
  for (const Outcome& o : outcomes) {
    const tghz::PostSelection sel =
        tghz::postselect_ancillas(final_reg, o.state);
    out() << "  " << o.name << ": probability " << sel.probability;
    if (sel.conditional.has_value()) {
      out() << ", conditional (" << sel.conditional->c0 << ", "
            << sel.conditional->c1 << ")";
    }
    out() << "\n    implied history: "
          << tghz::to_display_string(tghz::implied_history(o.kind)) << "\n";
  }
  out() << "readout via ancillas:\n";
  for (const tghz::AxisWord& w : tghz::ghz_words()) {
    out() << "  <" << w.str() << "> = " << tghz::expectation_via_ancilla(w)
          << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// optics
// ---------------------------------------------------------------------------

struct OpticsOptions {
  std::string table = kDefaultTable;
  std::string words = kDefaultWords;
  std::string mode = "analytic";
  std::int64_t photons = 1000000;
  double visibility = 1.0;
  double phase_drift = 0.0;
  double dark_rate = 0.0;
};

int run_optics(const GlobalOptions& g, const OpticsOptions& opt) {
  if (opt.mode != "analytic" && opt.mode != "monte-carlo") {
    throw tghz::validation_error("unknown mode '" + opt.mode +
                                 "'; known: analytic, monte-carlo");
  }
  const auto table = tghz::load_trial_table(opt.table);
  const auto words = tghz::load_trial_words(opt.words);
  tghz::NoiseModel noise;
  noise.visibility = opt.visibility;
  noise.phase_drift = opt.phase_drift;
  noise.dark_rate = opt.dark_rate;
  const tghz::SimMode mode = opt.mode == "analytic"
                                 ? tghz::SimMode::analytic
                                 : tghz::SimMode::monte_carlo;
  const tghz::SimResult res = tghz::run_ghz_experiment(
      table, words, opt.photons, noise, g.seed, mode);

  if (structured(g)) {
    json doc;
    doc["command"] = "optics";
    doc["mode"] = opt.mode;
    doc["photons_per_trial"] = res.photons_per_trial;
    doc["visibility"] = noise.visibility;
    doc["phase_drift"] = noise.phase_drift;
    doc["dark_rate"] = noise.dark_rate;
    doc["seed"] = g.seed;
    json jwords = json::array();
    for (const tghz::WordEstimate& est : res.words) {
      json w;
      w["word"] = est.word.str();
      w["correlator"] = est.correlator;
      w["sigma"] = est.sigma;
      w["cell_probabilities"] = est.cell_probabilities;
      w["cell_counts"] = est.cell_counts;
      jwords.push_back(w);
    }
    doc["words"] = jwords;
    doc["functional"] = res.g;
    doc["functional_sigma"] = res.g_sigma;
    emit(doc);
    return 0;
  }

  out() << "mode: " << opt.mode << "\n"
        << "photons per trial: " << res.photons_per_trial << "\n"
        << "visibility: " << noise.visibility
        << ", phase drift: " << noise.phase_drift
        << ", dark rate: " << noise.dark_rate << "\n";
  for (const tghz::WordEstimate& est : res.words) {
    out() << "word " << est.word.str() << ": correlator " << est.correlator;
    if (res.mode == tghz::SimMode::monte_carlo) {
      out() << " +/- " << est.sigma;
    }
    out() << "\n  counts:";
    for (std::int64_t c : est.cell_counts) out() << " " << c;
    out() << "\n";
  }
  out() << "G = " << res.g;
  if (res.mode == tghz::SimMode::monte_carlo) out() << " +/- " << res.g_sigma;
  out() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// validate-table
// ---------------------------------------------------------------------------

struct ValidateOptions {
  std::string table = kDefaultTable;
  std::string words = kDefaultWords;
  std::string convention = "qwp-plus";
};

int run_validate(const GlobalOptions& g, const ValidateOptions& opt) {
  const auto table = tghz::load_trial_table(opt.table);
  const auto words = tghz::load_trial_words(opt.words);
  const tghz::ConventionReport report = tghz::validate_convention(
      tghz::convention(opt.convention), table, words);

  if (structured(g)) {
    json doc;
    doc["command"] = "validate-table";
    doc["convention"] = report.convention_id;
    doc["reference_count"] = report.ref_count;
    json trials = json::array();
    for (const tghz::TrialCheck& t : report.trials) {
      json entry;
      entry["id"] = t.id;
      entry["cell"] = t.scheduled_cell.str();
      entry["stages"] = std::string(t.stage_labels.begin(),
                                    t.stage_labels.end());
      entry["structure_ok"] = t.structure_ok;
      entry["tag"] = tghz::interference_tag_name(t.tag);
      entry["count"] = t.concrete_count;
      entry["predicted_minus"] = t.predicted_minus;
      entry["predicted_plus"] = t.predicted_plus;
      entry["pass"] = t.pass;
      trials.push_back(entry);
    }
    doc["trials"] = trials;
    doc["minus_port"] = report.n_minus;
    doc["plus_port"] = report.n_plus;
    doc["unmatched"] = report.n_none;
    doc["all_pass"] = report.all_pass;
    emit(doc);
    return 0;
  }

  out() << "convention: " << report.convention_id << "\n"
        << "reference count: " << report.ref_count << "\n";
  for (const tghz::TrialCheck& t : report.trials) {
    out() << t.id << "  cell " << t.scheduled_cell.str() << "  stages "
          << std::string(t.stage_labels.begin(), t.stage_labels.end())
          << "  structure " << (t.structure_ok ? "ok " : "BAD")
          << "  tag " << tghz::interference_tag_name(t.tag) << "  count "
          << t.concrete_count << " (minus " << t.predicted_minus << ", plus "
          << t.predicted_plus << ")\n";
  }
  out() << "summary: minus " << report.n_minus << ", plus " << report.n_plus
        << ", unmatched " << report.n_none << ", all pass: "
        << (report.all_pass ? "yes" : "no") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  GlobalOptions global;
  GhzOptions ghz_opt;
  OpticsOptions optics_opt;
  ValidateOptions validate_opt;

  CLI::App app{"entangled-histories toolkit"};
  app.require_subcommand(1);
  app.add_option("--format", global.format, "output format")
      ->check(CLI::IsMember({"human", "structured"}))
      ->capture_default_str();
  app.add_option("--seed", global.seed, "random seed")->capture_default_str();

  CLI::App* ghz = app.add_subcommand(
      "ghz", "correlators and the functional for a history state");
  ghz->add_option("--state", ghz_opt.state, "ghz, w, or separable")
      ->capture_default_str();
  ghz->add_option("--theta", ghz_opt.theta,
                  "three polar angles in radians (separable state)")
      ->delimiter(',');
  ghz->add_option("--phi", ghz_opt.phi,
                  "three azimuthal angles in radians (separable state)")
      ->delimiter(',');

  CLI::App* bounds = app.add_subcommand(
      "bounds", "maximize the functional over the three restricted families");
  CLI::App* classical = app.add_subcommand(
      "classical", "maximize the functional over classical sign models");

  CLI::App* ancilla = app.add_subcommand(
      "ancilla", "coupling-register snapshots and erasure post-selection");

  CLI::App* optics = app.add_subcommand(
      "optics", "run the 32-trial interferometer schedule");
  optics->add_option("--table", optics_opt.table, "trial table path")
      ->capture_default_str();
  optics->add_option("--words", optics_opt.words, "trial word table path")
      ->capture_default_str();
  optics->add_option("--mode", optics_opt.mode, "analytic or monte-carlo")
      ->capture_default_str();
  optics->add_option("--photons", optics_opt.photons, "photons per trial")
      ->capture_default_str();
  optics->add_option("--visibility", optics_opt.visibility,
                     "interference visibility in [0, 1]")
      ->capture_default_str();
  optics->add_option("--phase-drift", optics_opt.phase_drift,
                     "interferometer phase drift in radians")
      ->capture_default_str();
  optics->add_option("--dark-rate", optics_opt.dark_rate,
                     "expected dark counts per trial")
      ->capture_default_str();

  CLI::App* validate = app.add_subcommand(
      "validate-table", "check a wave-plate schedule against its cells");
  validate->add_option("--table", validate_opt.table, "trial table path")
      ->capture_default_str();
  validate->add_option("--words", validate_opt.words, "trial word table path")
      ->capture_default_str();
  validate->add_option("--convention", validate_opt.convention,
                       "wave-plate convention id")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (ghz->parsed()) return run_ghz(global, ghz_opt);
    if (bounds->parsed()) return run_bounds(global);
    if (classical->parsed()) return run_classical(global);
    if (ancilla->parsed()) return run_ancilla(global);
    if (optics->parsed()) return run_optics(global, optics_opt);
    if (validate->parsed()) return run_validate(global, validate_opt);
  } catch (const tghz::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
