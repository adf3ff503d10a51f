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

// Numerical certification of the three G regimes:
//   separable histories        G <= 0
//   two-time entangled + tail  G <= 1/16
//   classical sign model       G <= 1/16
// Each bound is exercised by an explicit maximizer built on one core:
// a coarse grid plus seeded random multistarts, refined by Nelder-Mead.
// Results are deterministic for a fixed seed (single-threaded evaluation,
// lexicographically lowest argmax wins ties).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "tghz/errors.hpp"
#include "tghz/measurement.hpp"

namespace tghz {

// ---------------------------------------------------------------------------
// Classical sign model: eight joint assignments of the four setting
// products, constrained to overall product +1.
// ---------------------------------------------------------------------------

using ClassicalDistribution = std::array<double, 8>;

// Sign of each of the four words (XXX, YYX, YXY, XYY) under assignment k.
// Row order matches the conventional p1..p8 labeling of the model.
inline constexpr std::array<std::array<int, 4>, 8> kClassicalSigns = {{
    {{+1, +1, +1, +1}},
    {{+1, +1, -1, -1}},
    {{+1, -1, +1, -1}},
    {{+1, -1, -1, +1}},
    {{-1, -1, -1, -1}},
    {{-1, +1, +1, -1}},
    {{-1, +1, -1, +1}},
    {{-1, -1, +1, +1}},
}};

inline void validate_distribution(const ClassicalDistribution& p,
                                  double tol = kTol) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) {
      throw validation_error("classical probabilities must be nonnegative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw validation_error("classical probabilities must sum to 1");
  }
}

// The four signed sums E_XXX, E_YYX, E_YXY, E_XYY.
inline std::array<double, 4> classical_correlators(
    const ClassicalDistribution& p) {
  std::array<double, 4> e{};
  for (std::size_t k = 0; k < 8; ++k) {
    for (std::size_t w = 0; w < 4; ++w) {
      e[w] += kClassicalSigns[k][w] * p[k];
    }
  }
  return e;
}

inline double classical_g(const ClassicalDistribution& p) {
  validate_distribution(p);
  const std::array<double, 4> e = classical_correlators(p);
  return -(e[0] * e[1] * e[2] * e[3]);
}

// A distribution attaining the 1/16 maximum.
inline ClassicalDistribution classical_argmax() {
  return {0.25, 0.25, 0.25, 0.0, 0.0, 0.25, 0.0, 0.0};
}

namespace detail {

// Uniform double in (0, 1].
inline double uniform_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace detail

// Uniform sample from the probability simplex via normalized exponential
// spacings (equivalent in law to a flat Dirichlet draw).
inline ClassicalDistribution random_simplex_point(std::mt19937_64& rng) {
  ClassicalDistribution p{};
  double sum = 0.0;
  for (double& v : p) {
    v = -std::log(detail::uniform_unit(rng));
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

// ---------------------------------------------------------------------------
// Optimizer core.
// ---------------------------------------------------------------------------

struct OptimizerOptions {
  // Coarse stage: target points per axis; the actual per-axis count is
  // reduced until the full grid fits in grid_eval_budget evaluations.
  int grid_points = 21;
  std::int64_t grid_eval_budget = 200000;
  // Seeded uniform multistart points added to the candidate pool.
  int random_starts = 64;
  // How many of the best candidates get Nelder-Mead refinement.
  int refine_top = 8;
  int nelder_mead_iterations = 400;
  double nelder_mead_tolerance = 1e-12;
  std::uint64_t seed = 0;
  // Always-evaluated explicit starting points (each refined as well).
  std::vector<std::vector<double>> extra_starts;
};

struct OptimizationResult {
  double best_value = 0.0;
  std::vector<double> argmax;
  std::int64_t iterations = 0;  // objective evaluations
  std::vector<std::pair<std::int64_t, double>> trace;  // improvements
};

using Objective = std::function<double(const std::vector<double>&)>;
using Box = std::vector<std::pair<double, double>>;

namespace detail {

class BestTracker {
 public:
  explicit BestTracker(OptimizationResult& result) : result_(result) {}

  double eval(const Objective& f, const std::vector<double>& x) {
    const double v = f(x);
    ++result_.iterations;
    // Strictly-greater keeps the first point found at a given value, and
    // grid/start enumeration runs in lexicographic order, so ties resolve
    // to the lowest argmax.
    if (result_.argmax.empty() || v > result_.best_value) {
      result_.best_value = v;
      result_.argmax = x;
      result_.trace.emplace_back(result_.iterations, v);
    }
    return v;
  }

 private:
  OptimizationResult& result_;
};

inline std::vector<double> clamp_to_box(std::vector<double> x, const Box& box) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::clamp(x[i], box[i].first, box[i].second);
  }
  return x;
}

// Standard Nelder-Mead on a box (points clamped), maximizing f.
inline void nelder_mead(const Objective& f, const Box& box,
                        const std::vector<double>& start, int max_iterations,
                        double tolerance, BestTracker& tracker) {
  const std::size_t dim = box.size();
  struct Vertex {
    std::vector<double> x;
    double value;
  };
  std::vector<Vertex> simplex;
  simplex.reserve(dim + 1);
  simplex.push_back({start, tracker.eval(f, start)});
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> x = start;
    const double span = box[i].second - box[i].first;
    double step = 0.05 * span;
    if (step <= 0.0) step = 0.05;
    x[i] = x[i] + step <= box[i].second ? x[i] + step : x[i] - step;
    x = clamp_to_box(std::move(x), box);
    simplex.push_back({x, tracker.eval(f, x)});
  }

  const auto by_value_desc = [](const Vertex& a, const Vertex& b) {
    return a.value > b.value;
  };
  for (int it = 0; it < max_iterations; ++it) {
    std::sort(simplex.begin(), simplex.end(), by_value_desc);
    if (simplex.front().value - simplex.back().value < tolerance) break;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t v = 0; v < dim; ++v) {
      for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[v].x[i];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    Vertex& worst = simplex.back();
    const auto blend = [&](double coeff) {
      std::vector<double> x(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        x[i] = centroid[i] + coeff * (centroid[i] - worst.x[i]);
      }
      return clamp_to_box(std::move(x), box);
    };

    const std::vector<double> reflected = blend(1.0);
    const double fr = tracker.eval(f, reflected);
    if (fr > simplex.front().value) {
      const std::vector<double> expanded = blend(2.0);
      const double fe = tracker.eval(f, expanded);
      worst = fe > fr ? Vertex{expanded, fe} : Vertex{reflected, fr};
      continue;
    }
    if (fr > simplex[dim - 1].value) {
      worst = {reflected, fr};
      continue;
    }
    const std::vector<double> contracted = blend(-0.5);
    const double fc = tracker.eval(f, contracted);
    if (fc > worst.value) {
      worst = {contracted, fc};
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t v = 1; v <= dim; ++v) {
      for (std::size_t i = 0; i < dim; ++i) {
        simplex[v].x[i] = 0.5 * (simplex[v].x[i] + simplex[0].x[i]);
      }
      simplex[v].value = tracker.eval(f, simplex[v].x);
    }
  }
}

}  // namespace detail

// Maximizes a pure objective over a box. Stages: full coarse grid (per-axis
// resolution reduced to fit the evaluation budget), seeded random
// multistarts, then Nelder-Mead from the best candidates and all explicit
// starts. Deterministic for fixed options.
inline OptimizationResult optimizer_core(const Objective& objective,
                                         const Box& box,
                                         const OptimizerOptions& options = {}) {
  const std::size_t dim = box.size();
  if (dim == 0) throw validation_error("optimization domain is empty");
  for (const auto& [lo, hi] : box) {
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw validation_error("invalid optimization bounds");
    }
  }
  for (const auto& start : options.extra_starts) {
    if (start.size() != dim) {
      throw validation_error("explicit start has wrong dimension");
    }
  }

  OptimizationResult result;
  detail::BestTracker tracker(result);

  struct Candidate {
    double value;
    std::vector<double> x;
  };
  std::vector<Candidate> candidates;

  // Coarse grid.
  int per_axis = std::max(0, options.grid_points);
  if (per_axis > 1) {
    while (per_axis > 2) {
      double total = 1.0;
      for (std::size_t i = 0; i < dim && total <= 1e18; ++i) total *= per_axis;
      if (total <= static_cast<double>(options.grid_eval_budget)) break;
      --per_axis;
    }
    std::vector<int> index(dim, 0);
    std::vector<double> x(dim);
    bool done = false;
    while (!done) {
      for (std::size_t i = 0; i < dim; ++i) {
        const auto [lo, hi] = box[i];
        x[i] = lo + (hi - lo) * index[i] / (per_axis - 1);
      }
      candidates.push_back({tracker.eval(objective, x), x});
      // Advance the mixed-radix counter, least significant axis last, so
      // points appear in lexicographic order.
      done = true;
      for (std::size_t i = dim; i-- > 0;) {
        if (++index[i] < per_axis) {
          done = false;
          break;
        }
        index[i] = 0;
      }
    }
  }

  // Random multistarts.
  std::mt19937_64 rng(options.seed);
  for (int r = 0; r < options.random_starts; ++r) {
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const auto [lo, hi] = box[i];
      x[i] = lo + (hi - lo) * detail::uniform_unit(rng);
    }
    candidates.push_back({tracker.eval(objective, x), x});
  }

  // Refinement pool: the top candidates plus every explicit start.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.value > b.value;
                   });
  const std::size_t top = std::min<std::size_t>(
      candidates.size(), static_cast<std::size_t>(std::max(0, options.refine_top)));
  std::vector<std::vector<double>> starts;
  for (std::size_t i = 0; i < top; ++i) starts.push_back(candidates[i].x);
  for (const auto& s : options.extra_starts) {
    starts.push_back(detail::clamp_to_box(s, box));
    tracker.eval(objective, starts.back());
  }
  if (options.nelder_mead_iterations > 0) {
    for (const auto& s : starts) {
      detail::nelder_mead(objective, box, s, options.nelder_mead_iterations,
                          options.nelder_mead_tolerance, tracker);
    }
  }

  if (result.argmax.empty()) {
    throw validation_error("optimizer evaluated no points; relax the options");
  }
  return result;
}

// ---------------------------------------------------------------------------
// The three bound searches.
// ---------------------------------------------------------------------------

// Free parameters (theta1, phi1, theta2, phi2, theta3, phi3) of a product
// history. The supremum is 0 (approached where any sine factor vanishes).
inline OptimizationResult maximize_separable_g(
    const OptimizerOptions& options = {}) {
  const double half_pi = std::numbers::pi / 2.0;
  const Box box(6, {0.0, half_pi});
  return optimizer_core(
      [](const std::vector<double>& x) {
        return g_separable_closed_form(x[0], x[1], x[2], x[3], x[4], x[5]);
      },
      box, options);
}

// Parameters (chi1, chi2, chi3, phi_ab, phi_cd, theta, phi): the chi's are
// spherical coordinates for the Bell magnitudes
//   |a| = cos chi1, |b| = sin chi1 cos chi2,
//   |c| = sin chi1 sin chi2 cos chi3, |d| = sin chi1 sin chi2 sin chi3,
// and the phases enter as b = |b| e^{i phi_ab}, d = |d| e^{i phi_cd} with
// a, c real. Maximum 1/16.
inline OptimizationResult maximize_partial_g(
    const OptimizerOptions& options = {}) {
  const double pi = std::numbers::pi;
  Box box(7, {0.0, pi / 2.0});
  box[3] = {0.0, 2.0 * pi};
  box[4] = {0.0, 2.0 * pi};
  return optimizer_core(
      [](const std::vector<double>& x) {
        BellCoefficients k;
        k.a = std::cos(x[0]);
        k.b = std::polar(std::sin(x[0]) * std::cos(x[1]), x[3]);
        k.c = std::sin(x[0]) * std::sin(x[1]) * std::cos(x[2]);
        k.d = std::polar(std::sin(x[0]) * std::sin(x[1]) * std::sin(x[2]), x[4]);
        return g_two_time_closed_form(k, x[5], x[6]);
      },
      box, options);
}

// Raw box coordinates on [0,1]^8, projected to the simplex by normalizing
// absolute values; the all-zero corner scores below every valid value.
// The reported argmax is the normalized distribution. Maximum 1/16.
inline OptimizationResult maximize_classical_g(
    const OptimizerOptions& options = {}) {
  // Under the default evaluation budget the 8-dim coarse grid settles on
  // 4 points per axis, and that grid contains the exact maximizer pattern.
  const Box box(8, {0.0, 1.0});
  OptimizationResult result = optimizer_core(
      [](const std::vector<double>& x) {
        ClassicalDistribution p{};
        double sum = 0.0;
        for (std::size_t i = 0; i < 8; ++i) {
          p[i] = std::abs(x[i]);
          sum += p[i];
        }
        if (sum < 1e-12) return -2.0;  // below min(classical_g) = -1
        for (double& v : p) v /= sum;
        return classical_g(p);
      },
      box, options);
  // Report the distribution itself, not the raw box point.
  double sum = 0.0;
  for (double& v : result.argmax) {
    v = std::abs(v);
    sum += v;
  }
  if (sum >= 1e-12) {
    for (double& v : result.argmax) v /= sum;
  }
  return result;
}

}  // namespace tghz
