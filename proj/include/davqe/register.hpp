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

#include <cmath>
#include <iterator>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "davqe/errors.hpp"
#include "davqe/optimize.hpp"
#include "davqe/pauli.hpp"
#include "davqe/rng.hpp"

namespace davqe {

// Atom registers in the plane and the geometric embedding of a target
// Hamiltonian's two-body couplings into distance-law interactions.
//
// Lengths are micrometres, energies are rad/us (hbar = 1).

inline constexpr double kDefaultMinSpacing = 4.0;  // um
inline constexpr double kDefaultC6 = 5420503.0;    // rad/us * um^6
inline constexpr double kDefaultC3 = 3700.0;       // rad/us * um^3

enum class InteractionKind {
  Ising,  // V(r) = c6 / r^6 on number operators
  XY,     // V(r) = c3 / r^3 on flip-flop (XX + YY) pairs
};

struct InteractionModel {
  InteractionKind kind = InteractionKind::Ising;
  double c6 = kDefaultC6;
  double c3 = kDefaultC3;

  static InteractionModel ising(double c6 = kDefaultC6) {
    InteractionModel model;
    model.kind = InteractionKind::Ising;
    model.c6 = c6;
    return model;
  }
  static InteractionModel xy(double c3 = kDefaultC3) {
    InteractionModel model;
    model.kind = InteractionKind::XY;
    model.c3 = c3;
    return model;
  }

  double strength() const { return kind == InteractionKind::Ising ? c6 : c3; }
  int exponent() const { return kind == InteractionKind::Ising ? 6 : 3; }

  void validate() const {
    if (!std::isfinite(strength()) || strength() <= 0.0) {
      throw ConstraintError("interaction strength must be positive and finite");
    }
  }

  double at_distance(double r) const {
    return strength() / std::pow(r, exponent());
  }
};

class Register {
 public:
  Register(std::vector<Eigen::Vector2d> positions, InteractionModel model,
           double min_spacing = kDefaultMinSpacing)
      : positions_(std::move(positions)),
        model_(model),
        min_spacing_(min_spacing) {
    model_.validate();
    if (positions_.empty()) {
      throw ConstraintError("register needs at least one atom");
    }
    if (!(min_spacing_ > 0.0) || !std::isfinite(min_spacing_)) {
      throw ConstraintError("minimum spacing must be positive and finite");
    }
    for (std::size_t i = 0; i < positions_.size(); ++i) {
      if (!positions_[i].allFinite()) {
        throw ConstraintError("atom " + std::to_string(i) +
                              " has non-finite coordinates");
      }
    }
    for (std::size_t i = 0; i < positions_.size(); ++i) {
      for (std::size_t j = i + 1; j < positions_.size(); ++j) {
        const double d = (positions_[i] - positions_[j]).norm();
        if (d < min_spacing_) {
          throw ConstraintError(
              "atoms " + std::to_string(i) + " and " + std::to_string(j) +
              " are " + std::to_string(d) + " um apart, below the " +
              std::to_string(min_spacing_) + " um minimum spacing");
        }
      }
    }
  }

  int n_atoms() const { return static_cast<int>(positions_.size()); }
  const std::vector<Eigen::Vector2d>& positions() const { return positions_; }
  const InteractionModel& model() const { return model_; }
  double min_spacing() const { return min_spacing_; }

 private:
  std::vector<Eigen::Vector2d> positions_;
  InteractionModel model_;
  double min_spacing_;
};

// Pairwise coupling strengths V_ij = strength / r_ij^exponent; symmetric with
// a zero diagonal.
inline Eigen::MatrixXd interaction_matrix(const Register& reg) {
  const int n = reg.n_atoms();
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double r = (reg.positions()[i] - reg.positions()[j]).norm();
      values(i, j) = reg.model().at_distance(r);
      values(j, i) = values(i, j);
    }
  }
  return values;
}

struct TargetMatrix {
  Eigen::MatrixXd values;
  int selected_terms = 0;  // zero means nothing was embeddable
};

// Collects the positive two-qubit ZZ coefficients of a Hamiltonian into a
// symmetric coupling matrix. Other terms (single-qubit, negative ZZ, any X/Y
// content) are left to the drive fields and are not embedded geometrically.
inline TargetMatrix target_matrix(const PauliHamiltonian& hamiltonian,
                                  int n_atoms) {
  if (n_atoms != hamiltonian.n_qubits()) {
    throw ConstraintError("target_matrix: atom count must match qubit count");
  }
  TargetMatrix target;
  target.values = Eigen::MatrixXd::Zero(n_atoms, n_atoms);
  for (const auto& term : hamiltonian.terms()) {
    if (term.string.weight() != 2) continue;
    if (term.coefficient <= 0.0) continue;
    const auto first = term.string.letters().begin();
    const auto second = std::next(first);
    if (first->second != PauliLetter::Z || second->second != PauliLetter::Z) {
      continue;
    }
    target.values(first->first, second->first) = term.coefficient;
    target.values(second->first, first->first) = term.coefficient;
    target.selected_terms++;
  }
  return target;
}

// Sum of squared deviations over ordered atom pairs (i != j).
inline double embedding_score(const Eigen::MatrixXd& target,
                              const Eigen::MatrixXd& resource) {
  if (target.rows() != target.cols() || resource.rows() != resource.cols() ||
      target.rows() != resource.rows()) {
    throw ConstraintError("embedding_score: matrices must be square and match");
  }
  double score = 0.0;
  for (int i = 0; i < target.rows(); ++i) {
    for (int j = 0; j < target.cols(); ++j) {
      if (i == j) continue;
      const double diff = target(i, j) - resource(i, j);
      score += diff * diff;
    }
  }
  return score;
}

struct EmbedOptions {
  double box_halfwidth = 60.0;  // atoms are confined to [-w, w]^2
  int n_starts = 10;            // start 0 descends from the initial layout
  long max_evals = 20000;       // total across starts
  std::uint64_t seed = 1;
};

struct EmbedResult {
  std::vector<Eigen::Vector2d> positions;
  double score = std::numeric_limits<double>::infinity();
  int winning_start = -1;                // -1: kept the initial layout
  bool search_feasible = false;          // any start met the minimum spacing
  std::vector<double> objective_trace;   // penalized objective per evaluation
};

namespace detail {

inline std::vector<Eigen::Vector2d> unflatten_positions(
    const std::vector<double>& x) {
  std::vector<Eigen::Vector2d> positions(x.size() / 2);
  for (std::size_t a = 0; a < positions.size(); ++a) {
    positions[a] = Eigen::Vector2d(x[2 * a], x[2 * a + 1]);
  }
  return positions;
}

inline bool spacing_ok(const std::vector<Eigen::Vector2d>& positions,
                       double min_spacing) {
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      if ((positions[i] - positions[j]).norm() < min_spacing) return false;
    }
  }
  return true;
}

}  // namespace detail

// Searches for atom coordinates whose interaction matrix approximates the
// target couplings, using the interaction model and minimum spacing of the
// initial register. Runs Nelder-Mead descents from the initial layout and
// from seeded random layouts, keeping the best spacing-respecting
// arrangement; when no descent produces a feasible candidate the initial
// register is returned unchanged with search_feasible = false.
inline EmbedResult optimize_register(const Eigen::MatrixXd& target,
                                     const Register& init,
                                     const EmbedOptions& options) {
  const int n = init.n_atoms();
  if (target.rows() != target.cols() || target.rows() != n) {
    throw ConstraintError(
        "optimize_register: target matrix must be square with one row per "
        "atom");
  }
  if (options.n_starts < 1 || options.max_evals < options.n_starts) {
    throw ConstraintError("optimize_register: invalid search budget");
  }
  const InteractionModel& model = init.model();
  const double min_spacing = init.min_spacing();

  const double spacing_penalty_scale =
      1e3 * std::max(target.cwiseAbs().maxCoeff(), 1.0);

  auto objective = [&](const std::vector<double>& x) {
    const auto positions = detail::unflatten_positions(x);
    Eigen::MatrixXd resource = Eigen::MatrixXd::Zero(n, n);
    double spacing_penalty = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double r = (positions[i] - positions[j]).norm();
        const double r_safe = std::max(r, 1e-3);
        resource(i, j) = model.at_distance(r_safe);
        resource(j, i) = resource(i, j);
        if (r < min_spacing) {
          const double gap = min_spacing - r;
          spacing_penalty += spacing_penalty_scale * gap * gap;
        }
      }
    }
    return embedding_score(target, resource) + spacing_penalty;
  };

  EmbedResult result;
  result.positions = init.positions();
  result.score = embedding_score(target, interaction_matrix(init));

  Bounds bounds;
  bounds.lower.assign(2 * n, -options.box_halfwidth);
  bounds.upper.assign(2 * n, options.box_halfwidth);

  const long evals_per_start = options.max_evals / options.n_starts;
  for (int start = 0; start < options.n_starts; ++start) {
    OptimOptions optim;
    optim.max_evals = evals_per_start;
    optim.seed = mix_seed(options.seed, static_cast<std::uint64_t>(start));
    optim.xtol = 1e-10;
    optim.ftol = 1e-14;
    if (start == 0) {
      optim.start.resize(2 * n);
      for (int a = 0; a < n; ++a) {
        optim.start[2 * a] = init.positions()[a].x();
        optim.start[2 * a + 1] = init.positions()[a].y();
      }
    }
    const OptimResult run = nelder_mead(objective, bounds, optim);
    result.objective_trace.insert(result.objective_trace.end(),
                                  run.history.begin(), run.history.end());
    if (run.best_x.empty()) continue;

    const auto positions = detail::unflatten_positions(run.best_x);
    if (!detail::spacing_ok(positions, min_spacing)) continue;
    result.search_feasible = true;

    const double score = embedding_score(
        target, interaction_matrix(Register(positions, model, min_spacing)));
    if (score < result.score) {
      result.score = score;
      result.positions = positions;
      result.winning_start = start;
    }
  }
  return result;
}

}  // namespace davqe
