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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "davqe/dense.hpp"
#include "davqe/dynamics.hpp"
#include "davqe/errors.hpp"
#include "davqe/measurement.hpp"
#include "davqe/optimize.hpp"
#include "davqe/pauli.hpp"
#include "davqe/register.hpp"
#include "davqe/rng.hpp"
#include "davqe/state.hpp"

namespace davqe {

// Variational loops: pulse-parameterized state preparation driven by the
// derivative-free optimizers, with energies from the exact expectation, the
// shared derandomized plan, or a per-term baseline.
//
// Trace record parameter layouts by ansatz:
//   UccXY:          {delta0, delta1, t}
//   AlternatingAB:  {t_a^1, t_b^1, ..., t_a^L, t_b^L}
//                   (within layer l, U_b(t_b^l) acts before U_a(t_a^l))
//   PhaseSegments:  {t^1, ..., t^L, phi^1, ..., phi^L}
//   IterativeSplit: {time_labels..., omegas..., deltas...}

inline constexpr int kDefaultScanQubitCap = 10;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDefaultTotalTime = 4.0;  // us

enum class Ansatz { UccXY, AlternatingAB, PhaseSegments, IterativeSplit };
enum class OptimizerKind { NelderMead, Powell, DifferentialEvolution };

inline const char* optimizer_name(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::NelderMead: return "nelder-mead";
    case OptimizerKind::Powell: return "powell";
    case OptimizerKind::DifferentialEvolution: return "differential-evolution";
  }
  throw ConstraintError("unknown optimizer kind");
}

struct ParamBounds {
  double omega_min = 0.0;                  // rad/us
  double omega_max = 4.0 * kPi;            // rad/us
  double delta_min = -4.0 * kPi;           // rad/us
  double delta_max = 4.0 * kPi;            // rad/us
  double phase_min = 0.0;                  // rad
  double phase_max = 2.0 * kPi;            // rad
  double duration_min = kDefaultMinSegment;  // us
  double duration_max = kDefaultTotalTime;   // us

  void validate() const {
    const auto check = [](double lo, double hi, const char* label) {
      if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
        throw ConstraintError(std::string("bounds for ") + label +
                              " are not a finite ordered interval");
      }
    };
    check(omega_min, omega_max, "omega");
    check(delta_min, delta_max, "delta");
    check(phase_min, phase_max, "phase");
    check(duration_min, duration_max, "duration");
    if (omega_min < 0.0) {
      throw ConstraintError("omega bounds must be non-negative");
    }
    if (duration_min <= 0.0) {
      throw ConstraintError("duration bounds must be positive");
    }
  }
};

struct VqeConfig {
  Ansatz ansatz = Ansatz::IterativeSplit;
  OptimizerKind optimizer = OptimizerKind::Powell;
  long shot_budget_total = 350000;  // run-level sampling budget
  long shots_per_energy = 1000;     // derandomized-plan budget per evaluation
  long shots_per_term = 1000;       // per-term baseline shots
  int evals_per_iteration = 20;     // optimizer cap per splitting iteration
  int max_iterations = 25;          // splitting iterations (exact-mode stop)
  long max_optim_evals = 4000;      // single-pass protocols in exact mode
  int plan_bases = 200;             // greedy construction length
  double epsilon = kDefaultEpsilon;
  double t_tot = kDefaultTotalTime;   // us
  double min_segment = kDefaultMinSegment;  // us
  double fixed_omega = 2.0 * kPi;     // rad/us, alternating/phase protocols
  double fixed_delta = 2.0 * kPi;     // rad/us, alternating protocol
  ParamBounds bounds;
  std::uint64_t seed = 1;
  bool exact_mode = false;
  bool frozen_noise = false;  // reuse evaluation 0's sampling seed throughout
  int n_repeats = 10;         // scan averaging

  void validate() const {
    if (shot_budget_total < 1 || shots_per_energy < 1 || shots_per_term < 1) {
      throw ConstraintError("shot budgets must be positive");
    }
    if (evals_per_iteration < 0 || max_iterations < 1 || max_optim_evals < 1) {
      throw ConstraintError("evaluation caps must be positive");
    }
    if (plan_bases < 1) {
      throw ConstraintError("plan_bases must be positive");
    }
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
      throw ConstraintError("epsilon must lie in (0, 1)");
    }
    if (!std::isfinite(min_segment) || min_segment <= 0.0 ||
        !std::isfinite(t_tot) || t_tot < 2.0 * min_segment) {
      throw ConstraintError("t_tot must cover at least two minimal segments");
    }
    if (!std::isfinite(fixed_omega) || fixed_omega < 0.0 ||
        !std::isfinite(fixed_delta)) {
      throw ConstraintError("fixed drive values must be finite, omega >= 0");
    }
    if (n_repeats < 1) {
      throw ConstraintError("n_repeats must be positive");
    }
    bounds.validate();
  }
};

struct VqeRecord {
  int iteration = 0;
  std::vector<double> parameters;
  double energy_estimate = 0.0;  // Hartree
  long cumulative_shots = 0;
  double wall_time = 0.0;  // seconds since run start
};

struct VqeTrace {
  std::vector<VqeRecord> records;
  double best_energy = std::numeric_limits<double>::infinity();
  std::vector<double> best_parameters;

  long total_shots() const {
    return records.empty() ? 0 : records.back().cumulative_shots;
  }
};

// |e_exact - e_est| / |e_exact|.
inline double relative_error(double e_exact, double e_est) {
  if (!std::isfinite(e_exact) || !std::isfinite(e_est)) {
    throw ConstraintError("relative_error: non-finite energy");
  }
  if (e_exact == 0.0) {
    throw ConstraintError("relative_error: exact energy is zero");
  }
  return std::abs(e_exact - e_est) / std::abs(e_exact);
}

// Piecewise-constant pulse described by its split points. time_labels are
// strictly increasing with the last equal to the total duration; interval i
// runs from time_labels[i-1] (0 for the first) to time_labels[i] under
// (omegas[i], deltas[i]).
struct PulseParams {
  std::vector<double> time_labels;  // us
  std::vector<double> omegas;       // rad/us
  std::vector<double> deltas;       // rad/us

  std::size_t n_intervals() const { return time_labels.size(); }

  void validate(double min_segment, double t_tot) const {
    if (time_labels.empty() || omegas.size() != time_labels.size() ||
        deltas.size() != time_labels.size()) {
      throw ConstraintError("pulse parameter lists must be non-empty and "
                            "equal in length");
    }
    double previous = 0.0;
    for (const double label : time_labels) {
      if (!std::isfinite(label) || label - previous < min_segment) {
        throw ConstraintError("time labels must increase by at least the " +
                              std::to_string(min_segment) + " us segment "
                              "floor");
      }
      previous = label;
    }
    if (std::abs(time_labels.back() - t_tot) > 1e-12) {
      throw ConstraintError("last time label must equal t_tot");
    }
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      if (!std::isfinite(omegas[i]) || omegas[i] < 0.0 ||
          !std::isfinite(deltas[i])) {
        throw ConstraintError("pulse amplitudes must be finite, omega >= 0");
      }
    }
  }

  PulseSequence to_pulse() const {
    PulseSequence pulse;
    pulse.global_only = true;
    double previous = 0.0;
    for (std::size_t i = 0; i < time_labels.size(); ++i) {
      DriveSegment segment;
      segment.duration = time_labels[i] - previous;
      segment.omega = DriveField(omegas[i]);
      segment.delta = DriveField(deltas[i]);
      segment.z_convention = ZConvention::Projector;
      pulse.segments.push_back(std::move(segment));
      previous = time_labels[i];
    }
    return pulse;
  }
};

// Splits one pulse interval at a point drawn uniformly from the region where
// both children keep at least min_segment of duration; the children inherit
// the parent's omega and delta unchanged. Throws when every interval is
// already too short to split (saturation).
inline PulseParams split_time_label(const PulseParams& params,
                                    double min_segment, std::uint64_t seed) {
  params.validate(min_segment, params.time_labels.back());
  const std::size_t n = params.n_intervals();
  std::vector<double> slack(n);
  double feasible = 0.0;
  double previous = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double length = params.time_labels[i] - previous;
    slack[i] = std::max(length - 2.0 * min_segment, 0.0);
    feasible += slack[i];
    previous = params.time_labels[i];
  }
  if (feasible <= 0.0) {
    throw ConstraintError("pulse splitting saturated: no interval exceeds "
                          "twice the segment floor");
  }

  // Uniform over the feasible region, equivalent to rejection sampling of
  // uniform draws on (0, t_tot).
  Rng rng(seed);
  double u = rng.uniform() * feasible;
  std::size_t interval = n - 1;
  previous = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (u <= slack[i] || i == n - 1) {
      interval = i;
      break;
    }
    u -= slack[i];
    previous = params.time_labels[i];
  }
  const double split_at = previous + min_segment + std::min(u, slack[interval]);

  PulseParams out = params;
  out.time_labels.insert(out.time_labels.begin() + long(interval), split_at);
  out.omegas.insert(out.omegas.begin() + long(interval),
                    params.omegas[interval]);
  out.deltas.insert(out.deltas.begin() + long(interval),
                    params.deltas[interval]);
  return out;
}

// State preparation helpers shared by the protocols and their tests.

// Product of L layers exp(-i H_a t_a^l) exp(-i H_b t_b^l) applied to |0...0>,
// with H_a = (1/2) sum_i (omega X_i - delta Z_i) + interactions and H_b the
// same at delta = 0. durations = {t_a^1, t_b^1, ..., t_a^L, t_b^L}.
inline QuantumState alternating_state(const Register& reg, double omega,
                                      double delta,
                                      const std::vector<double>& durations) {
  if (durations.empty() || durations.size() % 2 != 0) {
    throw ConstraintError("alternating ansatz needs 2L durations");
  }
  DriveSegment seg_a;
  seg_a.duration = 1.0;
  seg_a.omega = DriveField(omega);
  seg_a.delta = DriveField(delta);
  seg_a.z_convention = ZConvention::HalfZ;
  DriveSegment seg_b = seg_a;
  seg_b.delta = DriveField(0.0);
  const SegmentPropagator prop_a(reg, seg_a);
  const SegmentPropagator prop_b(reg, seg_b);
  QuantumState state = QuantumState::zero_state(reg.n_atoms());
  for (std::size_t layer = 0; 2 * layer < durations.size(); ++layer) {
    state = prop_b.apply(state, durations[2 * layer + 1]);
    state = prop_a.apply(state, durations[2 * layer]);
  }
  return state;
}

// Product of L segments exp(-i H(phi^l) t^l) applied to |0...0>, with drive
// (omega/2)(cos phi X_i + sin phi Y_i) and no detuning.
inline QuantumState phase_ansatz_state(const Register& reg, double omega,
                                       const std::vector<double>& durations,
                                       const std::vector<double>& phases) {
  if (durations.empty() || durations.size() != phases.size()) {
    throw ConstraintError("phase ansatz needs matching durations and phases");
  }
  QuantumState state = QuantumState::zero_state(reg.n_atoms());
  for (std::size_t l = 0; l < durations.size(); ++l) {
    DriveSegment segment;
    segment.duration = 1.0;
    segment.omega = DriveField(omega);
    segment.delta = DriveField(0.0);
    segment.phase = phases[l];
    const SegmentPropagator propagator(reg, segment);
    state = propagator.apply(state, durations[l]);
  }
  return state;
}

// Evolves a computational-basis state under the split-pulse parameters.
inline QuantumState pulse_state(const Register& reg, const PulseParams& params,
                                const std::string& init_bits,
                                double min_segment = kDefaultMinSegment) {
  DynamicsLimits limits;
  limits.min_segment = min_segment;
  return evolve(prepare_product_state(init_bits), reg, params.to_pulse(),
                limits);
}

namespace detail {

// One of three energy backends: exact expectation, the shared derandomized
// plan, or per-term sampling (the baseline billing every string, identity
// included, at the fixed per-term rate).
class EnergyEvaluator {
 public:
  static EnergyEvaluator exact(const PauliHamiltonian& h) {
    EnergyEvaluator e(h);
    e.mode_ = Mode::Exact;
    e.shots_ = 0;
    return e;
  }

  static EnergyEvaluator derandomized(const PauliHamiltonian& h,
                                      int plan_bases, double epsilon,
                                      long shots_per_energy) {
    EnergyEvaluator e(h);
    e.mode_ = Mode::Plan;
    std::vector<std::pair<PauliString, double>> observables;
    for (const auto& term : h.non_identity_terms()) {
      observables.emplace_back(term.string, std::abs(term.coefficient));
    }
    DerandomizedPlan plan =
        derandomize(observables, h.n_qubits(), plan_bases, epsilon);
    e.plan_ = allocate_shots(plan, shots_per_energy, observables);
    e.shots_ = e.plan_.total_shots();
    return e;
  }

  static EnergyEvaluator per_term(const PauliHamiltonian& h,
                                  long shots_per_term) {
    EnergyEvaluator e(h);
    e.mode_ = Mode::PerTerm;
    e.per_term_shots_ = shots_per_term;
    for (const auto& term : h.non_identity_terms()) {
      PauliString letters(h.n_qubits());
      for (int qubit = 0; qubit < h.n_qubits(); ++qubit) {
        const PauliLetter l = term.string.at(qubit);
        letters.set(qubit, l == PauliLetter::I ? PauliLetter::Z : l);
      }
      e.term_bases_.emplace_back(std::move(letters));
    }
    e.shots_ = shots_per_term * long(h.terms().size());
    return e;
  }

  double evaluate(const QuantumState& state, std::uint64_t seed) const {
    switch (mode_) {
      case Mode::Exact:
        return expectation(h_, state);
      case Mode::Plan:
        return estimate_with_plan(h_, state, plan_, seed).energy;
      case Mode::PerTerm: {
        double energy = h_.identity_coefficient();
        const auto terms = h_.non_identity_terms();
        for (std::size_t s = 0; s < terms.size(); ++s) {
          const ShotBatch batch =
              sample(state, term_bases_[s], per_term_shots_,
                     mix_seed(seed, static_cast<std::uint64_t>(s)));
          energy += terms[s].coefficient *
                    empirical_average({batch}, terms[s].string).omega;
        }
        return energy;
      }
    }
    throw NumericError("unreachable evaluator mode");
  }

  long shots_per_evaluation() const { return shots_; }

 private:
  explicit EnergyEvaluator(const PauliHamiltonian& h) : h_(h) {}

  enum class Mode { Exact, Plan, PerTerm };
  PauliHamiltonian h_;
  Mode mode_ = Mode::Exact;
  DerandomizedPlan plan_;
  std::vector<MeasurementBasis> term_bases_;
  long per_term_shots_ = 0;
  long shots_ = 0;
};

inline EnergyEvaluator select_evaluator(const PauliHamiltonian& h,
                                        const VqeConfig& cfg,
                                        bool per_term_baseline) {
  if (cfg.exact_mode) return EnergyEvaluator::exact(h);
  if (per_term_baseline) {
    return EnergyEvaluator::per_term(h, cfg.shots_per_term);
  }
  return EnergyEvaluator::derandomized(h, cfg.plan_bases, cfg.epsilon,
                                       cfg.shots_per_energy);
}

// Appends one trace record per energy evaluation, deriving the sampling seed
// from the run seed and the global evaluation index (or evaluation 0's seed
// throughout when frozen_noise is set).
class TraceRecorder {
 public:
  TraceRecorder(const VqeConfig& cfg, EnergyEvaluator evaluator)
      : cfg_(cfg),
        evaluator_(std::move(evaluator)),
        start_(std::chrono::steady_clock::now()) {}

  double measure(const QuantumState& state, int iteration,
                 std::vector<double> parameters) {
    const std::uint64_t index = cfg_.frozen_noise ? 0 : eval_index_;
    const double energy =
        evaluator_.evaluate(state, mix_seed(cfg_.seed, index));
    ++eval_index_;
    cumulative_shots_ += evaluator_.shots_per_evaluation();
    VqeRecord record;
    record.iteration = iteration;
    record.parameters = std::move(parameters);
    record.energy_estimate = energy;
    record.cumulative_shots = cumulative_shots_;
    record.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_)
            .count();
    if (energy < trace_.best_energy) {
      trace_.best_energy = energy;
      trace_.best_parameters = record.parameters;
    }
    trace_.records.push_back(std::move(record));
    return energy;
  }

  bool budget_exhausted() const {
    return !cfg_.exact_mode && cumulative_shots_ >= cfg_.shot_budget_total;
  }

  long sampled_evals_remaining() const {
    const long per_eval = evaluator_.shots_per_evaluation();
    if (per_eval <= 0) return std::numeric_limits<long>::max();
    const long remaining = cfg_.shot_budget_total - cumulative_shots_;
    return std::max(remaining / per_eval + (remaining % per_eval != 0), 0L);
  }

  VqeTrace take() { return std::move(trace_); }

 private:
  VqeConfig cfg_;
  EnergyEvaluator evaluator_;
  std::chrono::steady_clock::time_point start_;
  VqeTrace trace_;
  std::uint64_t eval_index_ = 0;
  long cumulative_shots_ = 0;
};

inline OptimOptions base_options(const VqeConfig& cfg, std::uint64_t stream,
                                 TraceRecorder& recorder) {
  OptimOptions options;
  options.seed = mix_seed(cfg.seed, stream);
  if (!cfg.exact_mode) {
    options.should_stop = [&recorder]() {
      return recorder.budget_exhausted();
    };
  }
  return options;
}

}  // namespace detail

// Optimizes (delta0, delta1, t) over the exchange-block state preparation.
// The differential evolution optimizer is the recommended choice.
inline VqeTrace run_ucc_xy(const PauliHamiltonian& h_eff, const Register& reg,
                           const VqeConfig& cfg) {
  cfg.validate();
  if (cfg.ansatz != Ansatz::UccXY) {
    throw ConstraintError("run_ucc_xy requires the UccXY ansatz");
  }
  if (h_eff.n_qubits() != 2) {
    throw ConstraintError("run_ucc_xy needs a 2-qubit Hamiltonian");
  }
  if (reg.n_atoms() != 2 || reg.model().kind != InteractionKind::XY) {
    throw ConstraintError("run_ucc_xy needs a 2-atom XY register");
  }

  detail::TraceRecorder recorder(cfg, detail::select_evaluator(h_eff, cfg,
                                                               false));
  Bounds bounds;
  bounds.lower = {cfg.bounds.delta_min, cfg.bounds.delta_min, 0.0};
  bounds.upper = {cfg.bounds.delta_max, cfg.bounds.delta_max, cfg.t_tot};

  OptimOptions options = detail::base_options(cfg, 0xB0, recorder);
  options.max_evals = cfg.exact_mode
                          ? cfg.max_optim_evals
                          : std::max(recorder.sampled_evals_remaining(), 1L);

  const Objective objective = [&](const std::vector<double>& x) {
    const QuantumState state = ucc_xy_state(x[0], x[1], x[2], reg);
    return recorder.measure(state, 0, x);
  };
  minimize(objective, bounds, options, optimizer_name(cfg.optimizer));
  return recorder.take();
}

// Optimizes the 2L layer durations of the alternating protocol at fixed
// drive values; sampled energies use the per-term baseline.
inline VqeTrace run_alternating(const PauliHamiltonian& h_t,
                                const Register& reg, int layers,
                                const VqeConfig& cfg) {
  cfg.validate();
  if (cfg.ansatz != Ansatz::AlternatingAB) {
    throw ConstraintError("run_alternating requires the AlternatingAB ansatz");
  }
  if (layers < 1) {
    throw ConstraintError("run_alternating needs at least one layer");
  }
  if (reg.n_atoms() != h_t.n_qubits()) {
    throw ConstraintError("register size does not match the Hamiltonian");
  }

  detail::TraceRecorder recorder(cfg,
                                 detail::select_evaluator(h_t, cfg, true));

  DriveSegment seg_a;
  seg_a.duration = 1.0;
  seg_a.omega = DriveField(cfg.fixed_omega);
  seg_a.delta = DriveField(cfg.fixed_delta);
  seg_a.z_convention = ZConvention::HalfZ;
  DriveSegment seg_b = seg_a;
  seg_b.delta = DriveField(0.0);
  const SegmentPropagator prop_a(reg, seg_a);
  const SegmentPropagator prop_b(reg, seg_b);

  Bounds bounds;
  bounds.lower.assign(2 * std::size_t(layers), cfg.bounds.duration_min);
  bounds.upper.assign(2 * std::size_t(layers), cfg.bounds.duration_max);

  OptimOptions options = detail::base_options(cfg, 0xA1, recorder);
  options.max_evals = cfg.exact_mode
                          ? cfg.max_optim_evals
                          : std::max(recorder.sampled_evals_remaining(), 1L);

  const Objective objective = [&](const std::vector<double>& x) {
    QuantumState state = QuantumState::zero_state(reg.n_atoms());
    for (std::size_t layer = 0; 2 * layer < x.size(); ++layer) {
      state = prop_b.apply(state, x[2 * layer + 1]);
      state = prop_a.apply(state, x[2 * layer]);
    }
    return recorder.measure(state, 0, x);
  };
  minimize(objective, bounds, options, optimizer_name(cfg.optimizer));
  return recorder.take();
}

// Optimizes L (duration, phase) pairs of the single-Hamiltonian protocol at
// fixed omega and zero detuning; loop contract identical to run_alternating.
inline VqeTrace run_phase_ansatz(const PauliHamiltonian& h_t,
                                 const Register& reg, int segments,
                                 const VqeConfig& cfg) {
  cfg.validate();
  if (cfg.ansatz != Ansatz::PhaseSegments) {
    throw ConstraintError("run_phase_ansatz requires the PhaseSegments "
                          "ansatz");
  }
  if (segments < 1) {
    throw ConstraintError("run_phase_ansatz needs at least one segment");
  }
  if (reg.n_atoms() != h_t.n_qubits()) {
    throw ConstraintError("register size does not match the Hamiltonian");
  }

  detail::TraceRecorder recorder(cfg,
                                 detail::select_evaluator(h_t, cfg, true));

  const std::size_t L = std::size_t(segments);
  Bounds bounds;
  bounds.lower.assign(2 * L, cfg.bounds.duration_min);
  bounds.upper.assign(2 * L, cfg.bounds.duration_max);
  for (std::size_t l = 0; l < L; ++l) {
    bounds.lower[L + l] = cfg.bounds.phase_min;
    bounds.upper[L + l] = cfg.bounds.phase_max;
  }

  OptimOptions options = detail::base_options(cfg, 0xA2, recorder);
  options.max_evals = cfg.exact_mode
                          ? cfg.max_optim_evals
                          : std::max(recorder.sampled_evals_remaining(), 1L);

  const Objective objective = [&](const std::vector<double>& x) {
    const std::vector<double> durations(x.begin(), x.begin() + long(L));
    const std::vector<double> phases(x.begin() + long(L), x.end());
    const QuantumState state =
        phase_ansatz_state(reg, cfg.fixed_omega, durations, phases);
    return recorder.measure(state, 0, x);
  };
  minimize(objective, bounds, options, optimizer_name(cfg.optimizer));
  return recorder.take();
}

namespace detail {

inline PulseParams initial_split_params(const VqeConfig& cfg, Rng& rng) {
  PulseParams params;
  params.time_labels = {0.5 * cfg.t_tot, cfg.t_tot};
  for (int i = 0; i < 2; ++i) {
    params.omegas.push_back(
        rng.uniform(cfg.bounds.omega_min, cfg.bounds.omega_max));
    params.deltas.push_back(
        rng.uniform(cfg.bounds.delta_min, cfg.bounds.delta_max));
  }
  return params;
}

inline std::vector<double> flatten_pulse(const PulseParams& params) {
  std::vector<double> flat = params.time_labels;
  flat.insert(flat.end(), params.omegas.begin(), params.omegas.end());
  flat.insert(flat.end(), params.deltas.begin(), params.deltas.end());
  return flat;
}

// One optimizer pass over the 2K amplitudes (omegas then deltas) of a pulse
// with fixed time labels; returns the updated pulse.
inline PulseParams optimize_pulse_amplitudes(
    const Register& reg, const VqeConfig& cfg, const std::string& init_bits,
    PulseParams params, int iteration, long max_evals,
    std::uint64_t optimizer_stream, TraceRecorder& recorder) {
  const std::size_t K = params.n_intervals();
  Bounds bounds;
  bounds.lower.assign(2 * K, cfg.bounds.omega_min);
  bounds.upper.assign(2 * K, cfg.bounds.omega_max);
  for (std::size_t i = 0; i < K; ++i) {
    bounds.lower[K + i] = cfg.bounds.delta_min;
    bounds.upper[K + i] = cfg.bounds.delta_max;
  }

  OptimOptions options = base_options(cfg, optimizer_stream, recorder);
  options.max_evals = max_evals;
  options.start = params.omegas;
  options.start.insert(options.start.end(), params.deltas.begin(),
                       params.deltas.end());

  const Objective objective = [&](const std::vector<double>& x) {
    PulseParams candidate = params;
    candidate.omegas.assign(x.begin(), x.begin() + long(K));
    candidate.deltas.assign(x.begin() + long(K), x.end());
    const QuantumState state =
        pulse_state(reg, candidate, init_bits, cfg.min_segment);
    return recorder.measure(state, iteration, flatten_pulse(candidate));
  };
  const OptimResult result =
      minimize(objective, bounds, options, optimizer_name(cfg.optimizer));
  if (result.best_x.size() == 2 * K) {
    params.omegas.assign(result.best_x.begin(), result.best_x.begin() +
                                                    long(K));
    params.deltas.assign(result.best_x.begin() + long(K),
                         result.best_x.end());
  }
  return params;
}

}  // namespace detail

// Grows a piecewise-constant pulse by alternating bounded optimizer passes
// with random interval splits, from K = 2 intervals at randomly drawn
// amplitudes, until the shot budget is spent, max_iterations is reached, or
// splitting saturates.
inline VqeTrace run_iterative_pulse(const PauliHamiltonian& h_t,
                                    const Register& reg, const VqeConfig& cfg,
                                    const std::string& init_bits) {
  cfg.validate();
  if (cfg.ansatz != Ansatz::IterativeSplit) {
    throw ConstraintError("run_iterative_pulse requires the IterativeSplit "
                          "ansatz");
  }
  if (reg.n_atoms() != h_t.n_qubits()) {
    throw ConstraintError("register size does not match the Hamiltonian");
  }
  if (cfg.evals_per_iteration < 1) {
    throw ConstraintError("run_iterative_pulse needs at least one "
                          "evaluation per iteration");
  }

  detail::TraceRecorder recorder(cfg, detail::select_evaluator(h_t, cfg,
                                                               false));
  Rng init_rng(mix_seed(cfg.seed, 0x496E6974));  // amplitude initialization
  PulseParams params = detail::initial_split_params(cfg, init_rng);

  for (int iteration = 0; iteration < cfg.max_iterations; ++iteration) {
    const long cap =
        cfg.exact_mode
            ? long(cfg.evals_per_iteration)
            : std::min(long(cfg.evals_per_iteration),
                       std::max(recorder.sampled_evals_remaining(), 1L));
    params = detail::optimize_pulse_amplitudes(
        reg, cfg, init_bits, std::move(params), iteration, cap,
        0x0B7 + std::uint64_t(iteration), recorder);
    if (recorder.budget_exhausted()) break;
    if (iteration + 1 >= cfg.max_iterations) break;
    try {
      params = split_time_label(params, cfg.min_segment,
                                mix_seed(cfg.seed, 0x5B117 +
                                                       std::uint64_t(
                                                           iteration)));
    } catch (const ConstraintError&) {
      break;  // saturated: no interval long enough to split
    }
  }
  return recorder.take();
}

struct ScanEntry {
  std::string bitstring;  // ket order, qubit 0 rightmost
  double error = 0.0;     // mean relative error after the first pass
  double mean_energy = 0.0;
};

// Runs the first iterative-pulse optimization pass from every computational
// basis state, with amplitude draws, optimizer streams, and sampling seeds
// shared across states (common random numbers), and ranks the states by the
// averaged relative error.
inline std::vector<ScanEntry> scan_product_states(const PauliHamiltonian& h_t,
                                                  const Register& reg,
                                                  const VqeConfig& cfg) {
  cfg.validate();
  if (h_t.n_qubits() > kDefaultScanQubitCap) {
    throw ConstraintError("scan limited to " +
                          std::to_string(kDefaultScanQubitCap) + " qubits");
  }
  if (reg.n_atoms() != h_t.n_qubits()) {
    throw ConstraintError("register size does not match the Hamiltonian");
  }
  const double e_exact = ground_energy_exact(h_t);
  const detail::EnergyEvaluator evaluator =
      detail::select_evaluator(h_t, cfg, false);

  const int n = h_t.n_qubits();
  const std::size_t n_states = std::size_t(1) << n;
  std::vector<ScanEntry> entries(n_states);

  for (std::size_t b = 0; b < n_states; ++b) {
    std::string bits(std::size_t(n), '0');
    for (int qubit = 0; qubit < n; ++qubit) {
      if ((b >> qubit) & 1) bits[std::size_t(n - 1 - qubit)] = '1';
    }
    entries[b].bitstring = bits;

    double error_sum = 0.0;
    double energy_sum = 0.0;
    for (int repeat = 0; repeat < cfg.n_repeats; ++repeat) {
      VqeConfig pass_cfg = cfg;
      pass_cfg.seed = mix_seed(cfg.seed, std::uint64_t(repeat));
      detail::TraceRecorder recorder(pass_cfg, evaluator);
      double best;
      if (cfg.evals_per_iteration == 0) {
        best = recorder.measure(prepare_product_state(bits), 0, {});
      } else {
        Rng init_rng(mix_seed(pass_cfg.seed, 0x496E6974));
        PulseParams params = detail::initial_split_params(pass_cfg, init_rng);
        detail::optimize_pulse_amplitudes(reg, pass_cfg, bits,
                                          std::move(params), 0,
                                          cfg.evals_per_iteration, 0x0B7,
                                          recorder);
        best = recorder.take().best_energy;
      }
      error_sum += relative_error(e_exact, best);
      energy_sum += best;
    }
    entries[b].error = error_sum / cfg.n_repeats;
    entries[b].mean_energy = energy_sum / cfg.n_repeats;
  }

  std::stable_sort(entries.begin(), entries.end(),
                   [](const ScanEntry& a, const ScanEntry& b) {
                     return a.error < b.error;
                   });
  return entries;
}

}  // namespace davqe
