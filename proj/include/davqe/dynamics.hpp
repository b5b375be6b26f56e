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
#include <complex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "davqe/errors.hpp"
#include "davqe/register.hpp"
#include "davqe/state.hpp"

namespace davqe {

// Piecewise-constant pulse dynamics: drive + interaction Hamiltonians built
// from a register, statevector evolution by per-segment Hermitian
// eigendecomposition.
//
// Conventions (hbar = 1, energies in rad/us, durations in us):
//   - excitation number operator per qubit: nhat = |1><1|
//   - drive per segment: (1/2) sum_i omega_i (cos(phase) X_i + sin(phase) Y_i)
//   - detuning, Projector convention:      - sum_i delta_i nhat_i
//   - detuning, HalfZ convention:          - (1/2) sum_i delta_i (2 nhat_i - I)
//     (the two differ by an identity shift, hence only by a global phase)
//   - Ising interaction: sum_{i<j} V_ij nhat_i nhat_j, V_ij = c6 / r_ij^6
//   - XY interaction: sum_{i != j} V_ij (X_i X_j + Y_i Y_j), V_ij = c3 / r_ij^3
//     (double-counted sum: each unordered pair enters twice)

inline constexpr int kDefaultDynamicsQubitCap = 12;
inline constexpr double kDefaultMinSegment = 0.004;  // us

enum class ZConvention { Projector, HalfZ };

// A scalar broadcast or per-qubit array of field values.
class DriveField {
 public:
  DriveField(double value = 0.0) : values_{value}, scalar_(true) {}
  DriveField(std::vector<double> values)
      : values_(std::move(values)), scalar_(false) {
    if (values_.empty()) {
      throw ConstraintError("per-qubit field array must be non-empty");
    }
  }

  bool scalar() const { return scalar_; }
  const std::vector<double>& values() const { return values_; }

  double at(int qubit) const {
    return scalar_ ? values_[0] : values_[static_cast<std::size_t>(qubit)];
  }

  void validate(int n_qubits, const std::string& label,
                bool require_nonnegative) const {
    if (!scalar_ && static_cast<int>(values_.size()) != n_qubits) {
      throw ConstraintError(label + " array has " +
                            std::to_string(values_.size()) +
                            " entries for " + std::to_string(n_qubits) +
                            " qubits");
    }
    for (const double v : values_) {
      if (!std::isfinite(v)) {
        throw ConstraintError(label + " contains a non-finite value");
      }
      if (require_nonnegative && v < 0.0) {
        throw ConstraintError(label + " must be non-negative");
      }
    }
  }

 private:
  std::vector<double> values_;
  bool scalar_;
};

struct DriveSegment {
  double duration = 0.0;  // us
  DriveField omega{0.0};  // rad/us, >= 0
  DriveField delta{0.0};  // rad/us
  double phase = 0.0;     // rad
  ZConvention z_convention = ZConvention::Projector;

  void validate(int n_qubits, double min_segment) const {
    if (!std::isfinite(duration) || duration < min_segment) {
      throw ConstraintError("segment duration " + std::to_string(duration) +
                            " us is below the " + std::to_string(min_segment) +
                            " us floor");
    }
    if (!std::isfinite(phase)) {
      throw ConstraintError("segment phase must be finite");
    }
    omega.validate(n_qubits, "omega", true);
    delta.validate(n_qubits, "delta", false);
  }
};

struct PulseSequence {
  std::vector<DriveSegment> segments;
  bool global_only = false;

  double total_duration() const {
    double total = 0.0;
    for (const auto& segment : segments) total += segment.duration;
    return total;
  }

  void validate(int n_qubits, double min_segment = kDefaultMinSegment) const {
    for (std::size_t s = 0; s < segments.size(); ++s) {
      segments[s].validate(n_qubits, min_segment);
      if (global_only && (!segments[s].omega.scalar() ||
                          !segments[s].delta.scalar())) {
        throw ConstraintError("segment " + std::to_string(s) +
                              " uses per-qubit fields in a global-only pulse");
      }
    }
    if (!std::isfinite(total_duration())) {
      throw ConstraintError("pulse duration overflows");
    }
  }
};

struct DynamicsLimits {
  int qubit_cap = kDefaultDynamicsQubitCap;
  double min_segment = kDefaultMinSegment;
};

// Dense Hermitian matrix of the constant Hamiltonian during one segment
// (the segment's duration plays no role here).
inline Eigen::MatrixXcd build_hamiltonian(const Register& reg,
                                          const DriveSegment& segment,
                                          int qubit_cap =
                                              kDefaultDynamicsQubitCap) {
  const int n = reg.n_atoms();
  if (n > qubit_cap) {
    throw ConstraintError("register with " + std::to_string(n) +
                          " atoms exceeds the dynamics cap of " +
                          std::to_string(qubit_cap) + " qubits");
  }
  segment.omega.validate(n, "omega", true);
  segment.delta.validate(n, "delta", false);
  if (!std::isfinite(segment.phase)) {
    throw ConstraintError("segment phase must be finite");
  }

  const Eigen::Index dim = Eigen::Index(1) << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const Eigen::MatrixXd couplings = interaction_matrix(reg);
  const bool ising = reg.model().kind == InteractionKind::Ising;

  double half_z_shift = 0.0;
  if (segment.z_convention == ZConvention::HalfZ) {
    for (int i = 0; i < n; ++i) half_z_shift += 0.5 * segment.delta.at(i);
  }
  for (Eigen::Index b = 0; b < dim; ++b) {
    double diagonal = half_z_shift;
    for (int i = 0; i < n; ++i) {
      if ((b >> i) & 1) diagonal -= segment.delta.at(i);
    }
    if (ising) {
      for (int i = 0; i < n; ++i) {
        if (!((b >> i) & 1)) continue;
        for (int j = i + 1; j < n; ++j) {
          if ((b >> j) & 1) diagonal += couplings(i, j);
        }
      }
    }
    h(b, b) = diagonal;
  }

  for (int i = 0; i < n; ++i) {
    const double omega = segment.omega.at(i);
    if (omega == 0.0) continue;
    const std::complex<double> upper(0.5 * omega * std::cos(segment.phase),
                                     -0.5 * omega * std::sin(segment.phase));
    const Eigen::Index mask = Eigen::Index(1) << i;
    for (Eigen::Index b = 0; b < dim; ++b) {
      if (b & mask) continue;
      h(b, b | mask) += upper;
      h(b | mask, b) += std::conj(upper);
    }
  }

  if (!ising) {
    for (int i = 0; i < n; ++i) {
      const Eigen::Index mask_i = Eigen::Index(1) << i;
      for (int j = i + 1; j < n; ++j) {
        const Eigen::Index mask_j = Eigen::Index(1) << j;
        // sum_{i != j} V (XX + YY) gives each unordered pair coefficient 2V;
        // <01|XX + YY|10> = 2, so the basis matrix element is 4V.
        const double element = 4.0 * couplings(i, j);
        for (Eigen::Index b = 0; b < dim; ++b) {
          if ((b & mask_i) && !(b & mask_j)) {
            const Eigen::Index partner = (b ^ mask_i) | mask_j;
            h(partner, b) += element;
            h(b, partner) += element;
          }
        }
      }
    }
  }
  return h;
}

// Eigendecomposition of one segment Hamiltonian, reusable across durations.
class SegmentPropagator {
 public:
  SegmentPropagator(const Register& reg, const DriveSegment& segment,
                    int qubit_cap = kDefaultDynamicsQubitCap)
      : n_qubits_(reg.n_atoms()) {
    const Eigen::MatrixXcd h = build_hamiltonian(reg, segment, qubit_cap);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) {
      throw NumericError("segment Hamiltonian eigendecomposition failed");
    }
    vectors_ = solver.eigenvectors();
    values_ = solver.eigenvalues();
  }

  int n_qubits() const { return n_qubits_; }

  QuantumState apply(const QuantumState& state, double duration) const {
    if (!std::isfinite(duration) || duration < 0.0) {
      throw ConstraintError("propagation duration must be >= 0 and finite");
    }
    if (state.n_qubits() != n_qubits_) {
      throw ConstraintError("state size does not match the register");
    }
    const Eigen::VectorXcd modal = vectors_.adjoint() * state.amplitudes();
    Eigen::VectorXcd evolved(modal.size());
    for (Eigen::Index k = 0; k < modal.size(); ++k) {
      evolved(k) = std::polar(1.0, -values_(k) * duration) * modal(k);
    }
    Eigen::VectorXcd out = vectors_ * evolved;
    if (!out.allFinite()) {
      throw NumericError("evolution produced non-finite amplitudes");
    }
    const double norm = out.norm();
    if (std::abs(norm - 1.0) > 1e-9) {
      throw NumericError("evolution norm drifted by " +
                         std::to_string(std::abs(norm - 1.0)));
    }
    return QuantumState(n_qubits_, out / norm);
  }

 private:
  int n_qubits_;
  Eigen::MatrixXcd vectors_;
  Eigen::VectorXd values_;
};

// Applies the segments of a pulse in order to an initial state.
inline QuantumState evolve(const QuantumState& initial, const Register& reg,
                           const PulseSequence& pulse,
                           const DynamicsLimits& limits = {}) {
  if (initial.n_qubits() != reg.n_atoms()) {
    throw ConstraintError("initial state size does not match the register");
  }
  pulse.validate(reg.n_atoms(), limits.min_segment);
  QuantumState state = initial;
  for (const auto& segment : pulse.segments) {
    const SegmentPropagator propagator(reg, segment, limits.qubit_cap);
    state = propagator.apply(state, segment.duration);
  }
  return state;
}

// exp(-i t (delta0 Z'_0 + delta1 Z'_1 + H_XY)) |01>, with Z' = 2 nhat - I.
// Population stays in the single-excitation block {|01>, |10>}.
inline QuantumState ucc_xy_state(double delta0, double delta1, double t,
                                 const Register& reg) {
  if (reg.n_atoms() != 2 || reg.model().kind != InteractionKind::XY) {
    throw ConstraintError("ucc_xy_state needs a 2-atom XY register");
  }
  if (!std::isfinite(t) || t < 0.0) {
    throw ConstraintError("ucc_xy_state: time must be >= 0 and finite");
  }
  if (!std::isfinite(delta0) || !std::isfinite(delta1)) {
    throw ConstraintError("ucc_xy_state: detunings must be finite");
  }
  // The HalfZ convention gives -(1/2) delta' (2 nhat - I) per qubit, so
  // drive detunings delta' = -2 delta produce + delta (2 nhat - I).
  DriveSegment segment;
  segment.duration = t;
  segment.omega = DriveField(0.0);
  segment.delta = DriveField(std::vector<double>{-2.0 * delta0,
                                                 -2.0 * delta1});
  segment.z_convention = ZConvention::HalfZ;
  const SegmentPropagator propagator(reg, segment);
  return propagator.apply(prepare_product_state("01"), t);
}

}  // namespace davqe
