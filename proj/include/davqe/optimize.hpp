// Copyright 2026 The davqe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "davqe/errors.hpp"
#include "davqe/rng.hpp"

namespace davqe {

// Derivative-free minimizers over box-bounded parameter vectors. All three
// are deterministic for a fixed seed: identical options replay identical
// evaluation sequences.

using Objective = std::function<double(const std::vector<double>&)>;

struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const { return lower.size(); }

  void validate() const {
    if (lower.empty() || lower.size() != upper.size()) {
      throw ConstraintError("Bounds: lower/upper must be non-empty and match");
    }
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) ||
          lower[i] > upper[i]) {
        throw ConstraintError("Bounds: invalid interval at dimension " +
                              std::to_string(i));
      }
    }
  }
};

struct OptimOptions {
  long max_evals = 1000;
  std::uint64_t seed = 0;
  std::vector<double> start;  // empty: seeded random point inside the bounds
  double xtol = 1e-10;
  double ftol = 1e-12;
  int population = 15;       // differential evolution
  double de_weight = 0.6;    // differential evolution scale factor
  double de_crossover = 0.9; // differential evolution crossover rate
  std::function<bool()> should_stop;  // polled before every evaluation
};

struct OptimResult {
  std::vector<double> best_x;
  double best_f = std::numeric_limits<double>::infinity();
  long n_evals = 0;
  bool converged = false;
  std::vector<double> history;  // objective value of every evaluation, in order
};

namespace detail {

inline constexpr double kNonFiniteSentinel = 1e100;

// Shared evaluation bookkeeping: clamps candidates into the box (adding a
// quadratic penalty on the violation so searches are steered back inside),
// counts evaluations, tracks the best in-box value, and aborts once more
// than half of the evaluations return non-finite values.
class Evaluator {
 public:
  Evaluator(const Objective& objective, const Bounds& bounds,
            const OptimOptions& options)
      : objective_(objective), bounds_(bounds), options_(options) {}

  bool exhausted() const {
    return result_.n_evals >= options_.max_evals ||
           (options_.should_stop && options_.should_stop());
  }

  double evaluate(const std::vector<double>& x) {
    std::vector<double> clamped(x.size());
    double penalty = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      clamped[i] = std::clamp(x[i], bounds_.lower[i], bounds_.upper[i]);
      const double span =
          std::max(bounds_.upper[i] - bounds_.lower[i], 1e-12);
      const double excess = (x[i] - clamped[i]) / span;
      penalty += 1e8 * excess * excess;
    }
    const double value = objective_(clamped);
    result_.n_evals++;
    if (!std::isfinite(value)) {
      non_finite_++;
      if (result_.n_evals >= 20 && 2 * non_finite_ > result_.n_evals) {
        throw NumericError(
            "optimizer aborted: objective returned non-finite values at " +
            std::to_string(non_finite_) + " of " +
            std::to_string(result_.n_evals) + " evaluations");
      }
      result_.history.push_back(kNonFiniteSentinel);
      return kNonFiniteSentinel + penalty;
    }
    result_.history.push_back(value);
    if (value < result_.best_f) {
      result_.best_f = value;
      result_.best_x = clamped;
    }
    return value + penalty;
  }

  OptimResult take(bool converged) {
    result_.converged = converged;
    return std::move(result_);
  }

  const OptimResult& peek() const { return result_; }

 private:
  const Objective& objective_;
  const Bounds& bounds_;
  const OptimOptions& options_;
  OptimResult result_;
  long non_finite_ = 0;
};

inline std::vector<double> starting_point(const Bounds& bounds,
                                          const OptimOptions& options,
                                          Rng& rng) {
  if (!options.start.empty()) {
    if (options.start.size() != bounds.dim()) {
      throw ConstraintError("optimizer start point has wrong dimension");
    }
    return options.start;
  }
  std::vector<double> x(bounds.dim());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.uniform(bounds.lower[i], bounds.upper[i]);
  }
  return x;
}

}  // namespace detail

// Nelder-Mead simplex descent.
inline OptimResult nelder_mead(const Objective& objective, const Bounds& bounds,
                               const OptimOptions& options) {
  bounds.validate();
  Rng rng(options.seed);
  detail::Evaluator evaluator(objective, bounds, options);
  const std::size_t dim = bounds.dim();

  std::vector<std::vector<double>> simplex;
  std::vector<double> values;
  const std::vector<double> origin = detail::starting_point(bounds, options, rng);
  simplex.push_back(origin);
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> vertex = origin;
    const double span = bounds.upper[i] - bounds.lower[i];
    double step = 0.05 * span;
    if (step == 0.0) step = 1e-8;
    if (vertex[i] + step > bounds.upper[i]) step = -step;
    vertex[i] += step;
    simplex.push_back(vertex);
  }
  for (const auto& vertex : simplex) {
    if (evaluator.exhausted()) return evaluator.take(false);
    values.push_back(evaluator.evaluate(vertex));
  }

  std::vector<std::size_t> order(simplex.size());
  while (!evaluator.exhausted()) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return values[a] < values[b];
    });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[order.size() - 2];

    double extent = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      double lo = simplex[0][i], hi = simplex[0][i];
      for (const auto& vertex : simplex) {
        lo = std::min(lo, vertex[i]);
        hi = std::max(hi, vertex[i]);
      }
      extent = std::max(extent, hi - lo);
    }
    if (std::abs(values[worst] - values[best]) <=
            options.ftol * (std::abs(values[best]) + options.ftol) &&
        extent <= options.xtol) {
      return evaluator.take(true);
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[order[k]][i];
    }
    for (std::size_t i = 0; i < dim; ++i) centroid[i] /= double(dim);

    auto blend = [&](double factor) {
      std::vector<double> point(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        point[i] = centroid[i] + factor * (simplex[worst][i] - centroid[i]);
      }
      return point;
    };

    const auto reflected = blend(-1.0);
    if (evaluator.exhausted()) break;
    const double reflected_value = evaluator.evaluate(reflected);

    if (reflected_value < values[best]) {
      const auto expanded = blend(-2.0);
      if (evaluator.exhausted()) break;
      const double expanded_value = evaluator.evaluate(expanded);
      if (expanded_value < reflected_value) {
        simplex[worst] = expanded;
        values[worst] = expanded_value;
      } else {
        simplex[worst] = reflected;
        values[worst] = reflected_value;
      }
    } else if (reflected_value < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = reflected_value;
    } else {
      const bool outside = reflected_value < values[worst];
      const auto contracted = blend(outside ? -0.5 : 0.5);
      if (evaluator.exhausted()) break;
      const double contracted_value = evaluator.evaluate(contracted);
      if (contracted_value <
          (outside ? reflected_value : values[worst])) {
        simplex[worst] = contracted;
        values[worst] = contracted_value;
      } else {
        // Shrink towards the best vertex.
        for (std::size_t k = 0; k < simplex.size(); ++k) {
          if (k == best) continue;
          for (std::size_t i = 0; i < dim; ++i) {
            simplex[k][i] =
                simplex[best][i] + 0.5 * (simplex[k][i] - simplex[best][i]);
          }
          if (evaluator.exhausted()) return evaluator.take(false);
          values[k] = evaluator.evaluate(simplex[k]);
        }
      }
    }
  }
  return evaluator.take(false);
}

// Powell's conjugate-direction method with golden-section line searches
// confined to the box.
inline OptimResult powell(const Objective& objective, const Bounds& bounds,
                          const OptimOptions& options) {
  bounds.validate();
  Rng rng(options.seed);
  detail::Evaluator evaluator(objective, bounds, options);
  const std::size_t dim = bounds.dim();

  std::vector<double> x = detail::starting_point(bounds, options, rng);
  for (std::size_t i = 0; i < dim; ++i) {
    x[i] = std::clamp(x[i], bounds.lower[i], bounds.upper[i]);
  }
  if (evaluator.exhausted()) return evaluator.take(false);
  double fx = evaluator.evaluate(x);

  std::vector<std::vector<double>> directions(dim,
                                              std::vector<double>(dim, 0.0));
  for (std::size_t i = 0; i < dim; ++i) directions[i][i] = 1.0;

  // Line minimization along direction d from x, staying inside the box.
  const long line_budget = std::max<long>(
      6, options.max_evals / static_cast<long>(4 * dim + 1));
  auto line_minimize = [&](const std::vector<double>& direction,
                           double f_current) {
    double t_lo = 0.0, t_hi = 0.0;
    bool unbounded = true;
    for (std::size_t i = 0; i < dim; ++i) {
      if (direction[i] == 0.0) continue;
      const double to_upper = (bounds.upper[i] - x[i]) / direction[i];
      const double to_lower = (bounds.lower[i] - x[i]) / direction[i];
      const double hi = std::max(to_upper, to_lower);
      const double lo = std::min(to_upper, to_lower);
      if (unbounded) {
        t_lo = lo;
        t_hi = hi;
        unbounded = false;
      } else {
        t_lo = std::max(t_lo, lo);
        t_hi = std::min(t_hi, hi);
      }
    }
    if (unbounded || t_hi <= t_lo) return std::make_pair(0.0, f_current);

    auto point_at = [&](double t) {
      std::vector<double> p(dim);
      for (std::size_t i = 0; i < dim; ++i) p[i] = x[i] + t * direction[i];
      return p;
    };

    const double golden = 0.6180339887498949;
    double a = t_lo, b = t_hi;
    double t1 = b - golden * (b - a);
    double t2 = a + golden * (b - a);
    if (evaluator.exhausted()) return std::make_pair(0.0, f_current);
    double f1 = evaluator.evaluate(point_at(t1));
    if (evaluator.exhausted()) return std::make_pair(t1, f1);
    double f2 = evaluator.evaluate(point_at(t2));
    long used = 2;
    while (used < line_budget && !evaluator.exhausted() &&
           (b - a) > options.xtol * (1.0 + std::abs(a) + std::abs(b))) {
      if (f1 <= f2) {
        b = t2;
        t2 = t1;
        f2 = f1;
        t1 = b - golden * (b - a);
        f1 = evaluator.evaluate(point_at(t1));
      } else {
        a = t1;
        t1 = t2;
        f1 = f2;
        t2 = a + golden * (b - a);
        f2 = evaluator.evaluate(point_at(t2));
      }
      ++used;
    }
    double t_best = f1 <= f2 ? t1 : t2;
    double f_best = std::min(f1, f2);
    // Keep zero displacement when the search found nothing better.
    if (f_best >= f_current) return std::make_pair(0.0, f_current);
    return std::make_pair(t_best, f_best);
  };

  bool converged = false;
  while (!evaluator.exhausted() && !converged) {
    const double f_start = fx;
    const std::vector<double> x_start = x;
    std::size_t biggest_drop_index = 0;
    double biggest_drop = 0.0;

    for (std::size_t d = 0; d < dim && !evaluator.exhausted(); ++d) {
      const auto [t, f_line] = line_minimize(directions[d], fx);
      if (t != 0.0) {
        const double drop = fx - f_line;
        if (drop > biggest_drop) {
          biggest_drop = drop;
          biggest_drop_index = d;
        }
        for (std::size_t i = 0; i < dim; ++i) {
          x[i] = std::clamp(x[i] + t * directions[d][i], bounds.lower[i],
                            bounds.upper[i]);
        }
        fx = f_line;
      }
    }

    if (2.0 * (f_start - fx) <=
        options.ftol * (std::abs(f_start) + std::abs(fx) + 1e-300)) {
      converged = true;
      break;
    }

    std::vector<double> swept(dim);
    double norm = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      swept[i] = x[i] - x_start[i];
      norm += swept[i] * swept[i];
    }
    if (norm > 0.0 && biggest_drop > 0.0) {
      directions[biggest_drop_index] = directions.back();
      directions.back() = swept;
      const auto [t, f_line] = line_minimize(directions.back(), fx);
      if (t != 0.0) {
        for (std::size_t i = 0; i < dim; ++i) {
          x[i] = std::clamp(x[i] + t * directions.back()[i], bounds.lower[i],
                            bounds.upper[i]);
        }
        fx = f_line;
      }
    }
  }
  return evaluator.take(converged);
}

// Differential evolution, best/1/bin variant.
inline OptimResult differential_evolution(const Objective& objective,
                                          const Bounds& bounds,
                                          const OptimOptions& options) {
  bounds.validate();
  if (options.population < 4) {
    throw ConstraintError("differential_evolution: population must be >= 4");
  }
  Rng rng(options.seed);
  detail::Evaluator evaluator(objective, bounds, options);
  const std::size_t dim = bounds.dim();
  const std::size_t population = static_cast<std::size_t>(options.population);

  std::vector<std::vector<double>> members(population,
                                           std::vector<double>(dim));
  std::vector<double> values(population,
                             std::numeric_limits<double>::infinity());
  for (std::size_t m = 0; m < population; ++m) {
    if (m == 0 && !options.start.empty()) {
      members[m] = detail::starting_point(bounds, options, rng);
    } else {
      for (std::size_t i = 0; i < dim; ++i) {
        members[m][i] = rng.uniform(bounds.lower[i], bounds.upper[i]);
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t m = 0; m < population; ++m) {
    if (evaluator.exhausted()) return evaluator.take(false);
    values[m] = evaluator.evaluate(members[m]);
    if (values[m] < values[best]) best = m;
  }

  while (!evaluator.exhausted()) {
    for (std::size_t m = 0; m < population; ++m) {
      if (evaluator.exhausted()) break;
      std::size_t r1, r2;
      do {
        r1 = rng.integer_below(population);
      } while (r1 == m || r1 == best);
      do {
        r2 = rng.integer_below(population);
      } while (r2 == m || r2 == best || r2 == r1);

      std::vector<double> trial = members[m];
      const std::size_t forced = rng.integer_below(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        if (i == forced || rng.uniform() < options.de_crossover) {
          const double mutated = members[best][i] +
                                 options.de_weight *
                                     (members[r1][i] - members[r2][i]);
          trial[i] = std::clamp(mutated, bounds.lower[i], bounds.upper[i]);
        }
      }
      const double trial_value = evaluator.evaluate(trial);
      if (trial_value <= values[m]) {
        members[m] = std::move(trial);
        values[m] = trial_value;
        if (trial_value < values[best]) best = m;
      }
    }
    double worst_value = values[0];
    double best_value = values[0];
    for (const double v : values) {
      worst_value = std::max(worst_value, v);
      best_value = std::min(best_value, v);
    }
    if (worst_value - best_value <=
        options.ftol * (std::abs(best_value) + options.ftol)) {
      return evaluator.take(true);
    }
  }
  return evaluator.take(false);
}

inline OptimResult minimize(const Objective& objective, const Bounds& bounds,
                            const OptimOptions& options,
                            const std::string& method) {
  if (method == "nelder-mead") return nelder_mead(objective, bounds, options);
  if (method == "powell") return powell(objective, bounds, options);
  if (method == "differential-evolution") {
    return differential_evolution(objective, bounds, options);
  }
  throw ConstraintError("unknown optimizer '" + method + "'");
}

}  // namespace davqe
