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
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "davqe/errors.hpp"
#include "davqe/pauli.hpp"
#include "davqe/rng.hpp"
#include "davqe/state.hpp"

namespace davqe {

// Shot-based estimation of Pauli expectation values: single-qubit basis
// rotations, Born-rule sampling, derandomized construction of a shared
// measurement plan, and energy assembly from empirical averages.

// Accuracy target entering the greedy cost through nu = 1 - exp(-eps^2/2).
// At 0.9 the per-hit decay factor is about 2/3, so the greedy pass moves on
// to uncovered low-weight terms after a handful of repeats on heavy ones
// instead of re-hitting the heavy terms indefinitely.
inline constexpr double kDefaultEpsilon = 0.9;

// A measurement setting assigning X, Y, or Z to every qubit. The string
// form lists qubit 0 first ("XZY" measures X on qubit 0).
class MeasurementBasis {
 public:
  explicit MeasurementBasis(PauliString letters) : letters_(std::move(letters)) {
    if (letters_.weight() != letters_.n_qubits()) {
      throw ConstraintError(
          "measurement basis must assign X, Y, or Z to every qubit");
    }
  }

  static MeasurementBasis parse(const std::string& text) {
    if (text.empty()) {
      throw ConstraintError("measurement basis string is empty");
    }
    PauliString letters(static_cast<int>(text.size()));
    for (std::size_t j = 0; j < text.size(); ++j) {
      switch (text[j]) {
        case 'X': letters.set(static_cast<int>(j), PauliLetter::X); break;
        case 'Y': letters.set(static_cast<int>(j), PauliLetter::Y); break;
        case 'Z': letters.set(static_cast<int>(j), PauliLetter::Z); break;
        default:
          throw ConstraintError(std::string("invalid basis letter '") +
                                text[j] + "'");
      }
    }
    return MeasurementBasis(std::move(letters));
  }

  int n_qubits() const { return letters_.n_qubits(); }
  const PauliString& letters() const { return letters_; }
  PauliLetter at(int qubit) const { return letters_.at(qubit); }

  std::string str() const {
    std::string out(static_cast<std::size_t>(n_qubits()), 'Z');
    for (int j = 0; j < n_qubits(); ++j) {
      out[static_cast<std::size_t>(j)] = static_cast<char>(letters_.at(j));
    }
    return out;
  }

  bool hits(const PauliString& observable) const {
    return davqe::hits(letters_, observable);
  }

  friend bool operator==(const MeasurementBasis& a, const MeasurementBasis& b) {
    return a.letters_ == b.letters_;
  }
  friend bool operator<(const MeasurementBasis& a, const MeasurementBasis& b) {
    return a.letters_ < b.letters_;
  }

 private:
  PauliString letters_;
};

// Outcomes of repeated measurement in one basis; bit j of an outcome word is
// the measured bit of qubit j, mapped to the eigenvalue (-1)^bit.
struct ShotBatch {
  MeasurementBasis basis;
  std::vector<std::uint64_t> outcomes;
};

struct DerandomizedPlan {
  std::vector<MeasurementBasis> bases;  // distinct, first-occurrence order
  std::vector<long> repetitions;        // per-basis shot counts, >= 1
  double epsilon = kDefaultEpsilon;

  long total_shots() const {
    long total = 0;
    for (const long r : repetitions) total += r;
    return total;
  }

  void validate() const {
    if (bases.size() != repetitions.size()) {
      throw ConstraintError("plan bases and repetitions differ in length");
    }
    for (const long r : repetitions) {
      if (r < 1) throw ConstraintError("plan repetitions must be positive");
    }
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
      throw ConstraintError("plan epsilon must lie in (0, 1)");
    }
  }
};

namespace detail {

// Rotates every qubit so the basis letter becomes Z: X via the Hadamard
// rotation, Y via its phase-adjusted counterpart mapping |0> + i|1> to |0>.
inline Eigen::VectorXcd rotate_to_z(const QuantumState& state,
                                    const MeasurementBasis& basis) {
  Eigen::VectorXcd amplitudes = state.amplitudes();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int qubit = 0; qubit < state.n_qubits(); ++qubit) {
    const PauliLetter letter = basis.at(qubit);
    if (letter == PauliLetter::Z) continue;
    const Eigen::Index mask = Eigen::Index(1) << qubit;
    for (Eigen::Index b = 0; b < amplitudes.size(); ++b) {
      if (b & mask) continue;
      const std::complex<double> a0 = amplitudes(b);
      const std::complex<double> a1 = amplitudes(b | mask);
      if (letter == PauliLetter::X) {
        amplitudes(b) = (a0 + a1) * inv_sqrt2;
        amplitudes(b | mask) = (a0 - a1) * inv_sqrt2;
      } else {
        const std::complex<double> i(0.0, 1.0);
        amplitudes(b) = (a0 - i * a1) * inv_sqrt2;
        amplitudes(b | mask) = (a0 + i * a1) * inv_sqrt2;
      }
    }
  }
  return amplitudes;
}

}  // namespace detail

// Draws n_shots bitstrings from the Born distribution of the state measured
// in the given basis; deterministic for a fixed seed.
inline ShotBatch sample(const QuantumState& state,
                        const MeasurementBasis& basis, long n_shots,
                        std::uint64_t seed) {
  if (basis.n_qubits() != state.n_qubits()) {
    throw ConstraintError("basis size does not match the state");
  }
  if (n_shots < 1) {
    throw ConstraintError("shot count must be positive");
  }
  const Eigen::VectorXcd rotated = detail::rotate_to_z(state, basis);
  std::vector<double> cumulative(static_cast<std::size_t>(rotated.size()));
  double running = 0.0;
  for (Eigen::Index b = 0; b < rotated.size(); ++b) {
    running += std::norm(rotated(b));
    cumulative[static_cast<std::size_t>(b)] = running;
  }
  const double total = cumulative.back();

  Rng rng(seed);
  ShotBatch batch{basis, {}};
  batch.outcomes.reserve(static_cast<std::size_t>(n_shots));
  for (long shot = 0; shot < n_shots; ++shot) {
    const double u = rng.uniform() * total;
    const auto it =
        std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const auto index = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative.begin()),
        cumulative.size() - 1);
    batch.outcomes.push_back(static_cast<std::uint64_t>(index));
  }
  return batch;
}

namespace detail {

inline std::vector<double> normalized_weights(
    const std::vector<std::pair<PauliString, double>>& observables) {
  double total = 0.0;
  for (const auto& [s, w] : observables) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ConstraintError("observable weights must be non-negative");
    }
    total += w;
  }
  std::vector<double> weights;
  weights.reserve(observables.size());
  for (const auto& [s, w] : observables) {
    weights.push_back(total > 0.0 ? w / total : 0.0);
  }
  return weights;
}

}  // namespace detail

// Greedy letter-by-letter construction of max_bases measurement settings
// minimizing the expected-confidence cost
//   CONF = sum_s w_s * prod_m (1 - nu q_{m,s}),  nu = 1 - exp(-epsilon^2/2),
// where q_{m,s} multiplies 1/3 per yet-unassigned support qubit and drops to
// zero once a basis letter mismatches the observable. Ties prefer Z, then X,
// then Y, making the result deterministic; a later candidate must win by more
// than a small absolute margin so that roundoff in the accumulation order
// cannot flip symmetric choices.
inline constexpr double kConfTieTolerance = 1e-12;

inline DerandomizedPlan derandomize(
    const std::vector<std::pair<PauliString, double>>& observables,
    int n_qubits, int max_bases, double epsilon = kDefaultEpsilon) {
  if (n_qubits < 1 || n_qubits > 64) {
    throw ConstraintError("derandomize: invalid qubit count");
  }
  if (max_bases < 1) {
    throw ConstraintError("derandomize: need at least one basis");
  }
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw ConstraintError("derandomize: epsilon must lie in (0, 1)");
  }
  for (const auto& [s, w] : observables) {
    if (s.is_identity()) {
      throw ConstraintError("derandomize: identity observable supplied");
    }
    if (s.n_qubits() != n_qubits) {
      throw ConstraintError("derandomize: observable qubit count mismatch");
    }
  }

  const std::size_t n_obs = observables.size();
  const std::vector<double> weights = detail::normalized_weights(observables);
  const double nu = 1.0 - std::exp(-0.5 * epsilon * epsilon);

  std::vector<double> third_pow(static_cast<std::size_t>(n_qubits) + 1, 1.0);
  for (std::size_t k = 1; k < third_pow.size(); ++k) {
    third_pow[k] = third_pow[k - 1] / 3.0;
  }

  // Factor of each finished basis: (1 - nu) when it hits observable s, 1
  // otherwise; accumulated as done[s].
  std::vector<double> done(n_obs, 1.0);
  std::vector<int> support_size(n_obs);
  for (std::size_t s = 0; s < n_obs; ++s) {
    support_size[s] = observables[s].first.weight();
  }

  std::vector<MeasurementBasis> raw_bases;
  const PauliLetter candidates[3] = {PauliLetter::Z, PauliLetter::X,
                                     PauliLetter::Y};

  for (int m = 0; m < max_bases; ++m) {
    std::vector<double> future(n_obs);
    for (std::size_t s = 0; s < n_obs; ++s) {
      future[s] = std::pow(1.0 - nu * third_pow[support_size[s]],
                           double(max_bases - m - 1));
    }
    std::vector<char> alive(n_obs, 1);
    std::vector<int> unassigned(support_size.begin(), support_size.end());

    PauliString letters(n_qubits);
    for (int j = 0; j < n_qubits; ++j) {
      double best_cost = std::numeric_limits<double>::infinity();
      PauliLetter best_letter = PauliLetter::Z;
      for (const PauliLetter candidate : candidates) {
        double cost = 0.0;
        for (std::size_t s = 0; s < n_obs; ++s) {
          double current = 1.0;
          if (alive[s]) {
            const PauliLetter obs_letter = observables[s].first.at(j);
            if (obs_letter == PauliLetter::I) {
              current = 1.0 - nu * third_pow[unassigned[s]];
            } else if (obs_letter == candidate) {
              current = 1.0 - nu * third_pow[unassigned[s] - 1];
            } else {
              current = 1.0;  // killed: q drops to zero
            }
          }
          cost += weights[s] * done[s] * future[s] * current;
        }
        if (cost < best_cost - kConfTieTolerance) {
          best_cost = cost;
          best_letter = candidate;
        }
      }
      letters.set(j, best_letter);
      for (std::size_t s = 0; s < n_obs; ++s) {
        if (!alive[s]) continue;
        const PauliLetter obs_letter = observables[s].first.at(j);
        if (obs_letter == PauliLetter::I) continue;
        if (obs_letter == best_letter) {
          unassigned[s]--;
        } else {
          alive[s] = 0;
        }
      }
    }
    for (std::size_t s = 0; s < n_obs; ++s) {
      if (alive[s]) done[s] *= 1.0 - nu;
    }
    raw_bases.emplace_back(std::move(letters));
  }

  // Canonical form: merge duplicates, keeping first-occurrence order.
  DerandomizedPlan plan;
  plan.epsilon = epsilon;
  std::map<MeasurementBasis, std::size_t> seen;
  for (auto& basis : raw_bases) {
    const auto it = seen.find(basis);
    if (it == seen.end()) {
      seen.emplace(basis, plan.bases.size());
      plan.bases.push_back(std::move(basis));
      plan.repetitions.push_back(1);
    } else {
      plan.repetitions[it->second]++;
    }
  }
  return plan;
}

// Seeded fully-random plan (uniform X/Y/Z per letter) for comparison runs
// against the derandomized construction.
inline DerandomizedPlan random_plan(int n_qubits, int max_bases,
                                    std::uint64_t seed,
                                    double epsilon = kDefaultEpsilon) {
  if (n_qubits < 1 || max_bases < 1) {
    throw ConstraintError("random_plan: invalid size");
  }
  Rng rng(seed);
  const PauliLetter alphabet[3] = {PauliLetter::X, PauliLetter::Y,
                                   PauliLetter::Z};
  DerandomizedPlan plan;
  plan.epsilon = epsilon;
  std::map<MeasurementBasis, std::size_t> seen;
  for (int m = 0; m < max_bases; ++m) {
    PauliString letters(n_qubits);
    for (int j = 0; j < n_qubits; ++j) {
      letters.set(j, alphabet[rng.integer_below(3)]);
    }
    MeasurementBasis basis(std::move(letters));
    const auto it = seen.find(basis);
    if (it == seen.end()) {
      seen.emplace(basis, plan.bases.size());
      plan.bases.push_back(std::move(basis));
      plan.repetitions.push_back(1);
    } else {
      plan.repetitions[it->second]++;
    }
  }
  return plan;
}

// Convenience wrapper deriving (string, |coefficient|) pairs from a
// Hamiltonian's non-identity terms.
inline DerandomizedPlan derandomize_for(const PauliHamiltonian& hamiltonian,
                                        int max_bases,
                                        double epsilon = kDefaultEpsilon) {
  std::vector<std::pair<PauliString, double>> observables;
  for (const auto& term : hamiltonian.non_identity_terms()) {
    observables.emplace_back(term.string, std::abs(term.coefficient));
  }
  return derandomize(observables, hamiltonian.n_qubits(), max_bases, epsilon);
}

// Redistributes a shot budget over the plan's bases proportionally to each
// basis's weighted hit count, by largest remainder, with at least one shot
// per basis.
inline DerandomizedPlan allocate_shots(
    const DerandomizedPlan& plan, long budget,
    const std::vector<std::pair<PauliString, double>>& observables) {
  plan.validate();
  const long n_bases = static_cast<long>(plan.bases.size());
  if (budget < n_bases) {
    throw BudgetError("budget of " + std::to_string(budget) +
                      " shots cannot cover " + std::to_string(n_bases) +
                      " bases");
  }
  const std::vector<double> weights = detail::normalized_weights(observables);
  std::vector<double> hit_weight(plan.bases.size(), 0.0);
  double total_weight = 0.0;
  for (std::size_t b = 0; b < plan.bases.size(); ++b) {
    for (std::size_t s = 0; s < observables.size(); ++s) {
      if (plan.bases[b].hits(observables[s].first)) {
        hit_weight[b] += weights[s];
      }
    }
    total_weight += hit_weight[b];
  }

  DerandomizedPlan out = plan;
  const long spread = budget - n_bases;  // one shot per basis is reserved
  std::vector<double> remainders(plan.bases.size());
  long assigned = 0;
  for (std::size_t b = 0; b < plan.bases.size(); ++b) {
    const double share =
        total_weight > 0.0
            ? double(spread) * hit_weight[b] / total_weight
            : double(spread) / double(n_bases);
    const double floored = std::floor(share);
    out.repetitions[b] = 1 + static_cast<long>(floored);
    remainders[b] = share - floored;
    assigned += out.repetitions[b];
  }
  std::vector<std::size_t> order(plan.bases.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return remainders[a] > remainders[b];
                   });
  for (std::size_t k = 0; assigned < budget; ++k) {
    out.repetitions[order[k % order.size()]]++;
    ++assigned;
  }
  return out;
}

struct EmpiricalAverage {
  double omega = 0.0;
  long n_hits = 0;
};

// omega_s = (1/N_h) sum over shots of hitting batches of
// prod_{j in support} (-1)^{bit_j}; N_h counts hitting shots.
inline EmpiricalAverage empirical_average(const std::vector<ShotBatch>& batches,
                                          const PauliString& observable) {
  const std::uint64_t support = observable.support_mask();
  double total = 0.0;
  long hits = 0;
  for (const auto& batch : batches) {
    if (!batch.basis.hits(observable)) continue;
    for (const std::uint64_t outcome : batch.outcomes) {
      const int parity = __builtin_popcountll(outcome & support) & 1;
      total += parity ? -1.0 : 1.0;
    }
    hits += static_cast<long>(batch.outcomes.size());
  }
  if (hits == 0) return {0.0, 0};
  return {total / double(hits), hits};
}

struct EnergyEstimate {
  double energy = 0.0;
  std::vector<double> per_term;          // omega per non-identity term
  std::vector<std::size_t> uncovered;    // indices into per_term with no hits
};

// energy = c_identity + sum over covered terms of c_s * omega_s; terms no
// basis hits are reported as uncovered and contribute zero.
inline EnergyEstimate estimate_energy(const PauliHamiltonian& hamiltonian,
                                      const std::vector<ShotBatch>& batches) {
  EnergyEstimate estimate;
  estimate.energy = hamiltonian.identity_coefficient();
  const auto terms = hamiltonian.non_identity_terms();
  estimate.per_term.reserve(terms.size());
  for (std::size_t s = 0; s < terms.size(); ++s) {
    const EmpiricalAverage average = empirical_average(batches, terms[s].string);
    estimate.per_term.push_back(average.omega);
    if (average.n_hits == 0) {
      estimate.uncovered.push_back(s);
    } else {
      estimate.energy += terms[s].coefficient * average.omega;
    }
  }
  return estimate;
}

// Executes a plan against a state; basis b uses seed = mix_seed(seed, b).
inline std::vector<ShotBatch> run_plan(const QuantumState& state,
                                       const DerandomizedPlan& plan,
                                       std::uint64_t seed) {
  plan.validate();
  std::vector<ShotBatch> batches;
  batches.reserve(plan.bases.size());
  for (std::size_t b = 0; b < plan.bases.size(); ++b) {
    batches.push_back(sample(state, plan.bases[b], plan.repetitions[b],
                             mix_seed(seed, static_cast<std::uint64_t>(b))));
  }
  return batches;
}

inline EnergyEstimate estimate_with_plan(const PauliHamiltonian& hamiltonian,
                                         const QuantumState& state,
                                         const DerandomizedPlan& plan,
                                         std::uint64_t seed) {
  return estimate_energy(hamiltonian, run_plan(state, plan, seed));
}

}  // namespace davqe
