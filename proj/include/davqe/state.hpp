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

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

#include "davqe/errors.hpp"

namespace davqe {

// A normalized statevector over n qubits, little-endian basis indexing
// (qubit 0 is the least significant bit of the index).
class QuantumState {
 public:
  QuantumState(int n_qubits, Eigen::VectorXcd amplitudes)
      : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
    if (n_qubits < 1 || n_qubits > 28) {
      throw ConstraintError("QuantumState: qubit count must be in [1, 28]");
    }
    if (amplitudes_.size() != (Eigen::Index{1} << n_qubits)) {
      throw ConstraintError("QuantumState: amplitude vector has dimension " +
                            std::to_string(amplitudes_.size()) +
                            ", expected 2^" + std::to_string(n_qubits));
    }
    if (!amplitudes_.allFinite()) {
      throw NumericError("QuantumState: non-finite amplitude");
    }
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > 1e-6) {
      throw ConstraintError("QuantumState: norm " + std::to_string(norm) +
                            " deviates from 1 by more than 1e-6");
    }
    amplitudes_ /= norm;
  }

  static QuantumState zero_state(int n_qubits) {
    Eigen::VectorXcd amplitudes =
        Eigen::VectorXcd::Zero(Eigen::Index{1} << n_qubits);
    amplitudes[0] = 1.0;
    return QuantumState(n_qubits, std::move(amplitudes));
  }

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }

  std::complex<double> amplitude(std::uint64_t basis_index) const {
    return amplitudes_[static_cast<Eigen::Index>(basis_index)];
  }

 private:
  int n_qubits_;
  Eigen::VectorXcd amplitudes_;
};

// Computational basis state from a ket-style bitstring: the leftmost
// character is the highest qubit, the rightmost is qubit 0, so "01" is
// basis index 1 on two qubits.
inline QuantumState prepare_product_state(std::string_view bits) {
  if (bits.empty() || bits.size() > 28) {
    throw ConstraintError("prepare_product_state: bitstring length must be in "
                          "[1, 28]");
  }
  std::uint64_t index = 0;
  for (const char c : bits) {
    if (c != '0' && c != '1') {
      throw ConstraintError(
          "prepare_product_state: bitstring may contain only '0' and '1'");
    }
    index = (index << 1) | static_cast<std::uint64_t>(c - '0');
  }
  const int n_qubits = static_cast<int>(bits.size());
  Eigen::VectorXcd amplitudes =
      Eigen::VectorXcd::Zero(Eigen::Index{1} << n_qubits);
  amplitudes[static_cast<Eigen::Index>(index)] = 1.0;
  return QuantumState(n_qubits, std::move(amplitudes));
}

}  // namespace davqe
