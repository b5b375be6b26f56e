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
#include <bit>
#include <complex>
#include <cstdint>

#include "davqe/errors.hpp"
#include "davqe/pauli.hpp"
#include "davqe/state.hpp"

namespace davqe {

inline constexpr int kDefaultMatrixQubitCap = 14;

// Dense 2^n x 2^n matrix of a Pauli-string Hamiltonian, little-endian basis
// ordering. Guarded by a qubit cap because the cost is exponential.
inline Eigen::MatrixXcd to_matrix(const PauliHamiltonian& h,
                                  int qubit_cap = kDefaultMatrixQubitCap) {
  if (h.n_qubits() > qubit_cap) {
    throw ConstraintError("to_matrix: " + std::to_string(h.n_qubits()) +
                          " qubits exceeds cap " + std::to_string(qubit_cap));
  }
  const std::uint64_t dim = 1ULL << h.n_qubits();
  Eigen::MatrixXcd matrix = Eigen::MatrixXcd::Zero(
      static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& term : h.terms()) {
    const BasisAction action = basis_action(term.string);
    const std::complex<double> lead =
        term.coefficient * detail::i_power(action.i_power);
    for (std::uint64_t b = 0; b < dim; ++b) {
      const double sign =
          (std::popcount(b & action.sign_mask) & 1) ? -1.0 : 1.0;
      matrix(static_cast<Eigen::Index>(b ^ action.flip_mask),
             static_cast<Eigen::Index>(b)) += lead * sign;
    }
  }
  return matrix;
}

// Smallest eigenvalue of the dense form.
inline double ground_energy_exact(const PauliHamiltonian& h,
                                  int qubit_cap = kDefaultMatrixQubitCap) {
  const Eigen::MatrixXcd matrix = to_matrix(h, qubit_cap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix,
                                                         Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("ground_energy_exact: eigensolver failed");
  }
  return solver.eigenvalues()(0);
}

// <psi| P |psi> for a single Pauli string, evaluated without forming the
// dense matrix.
inline double term_expectation(const PauliString& s, const QuantumState& psi) {
  if (s.n_qubits() != psi.n_qubits()) {
    throw ConstraintError("term_expectation: qubit counts differ");
  }
  const BasisAction action = basis_action(s);
  const std::complex<double> lead = detail::i_power(action.i_power);
  const auto& amplitudes = psi.amplitudes();
  std::complex<double> total = 0.0;
  const std::uint64_t dim = 1ULL << s.n_qubits();
  for (std::uint64_t b = 0; b < dim; ++b) {
    const double sign = (std::popcount(b & action.sign_mask) & 1) ? -1.0 : 1.0;
    total += std::conj(amplitudes[static_cast<Eigen::Index>(b ^ action.flip_mask)]) *
             (lead * sign) * amplitudes[static_cast<Eigen::Index>(b)];
  }
  return total.real();
}

// <psi| H |psi> accumulated term by term.
inline double expectation(const PauliHamiltonian& h, const QuantumState& psi) {
  if (h.n_qubits() != psi.n_qubits()) {
    throw ConstraintError("expectation: qubit counts differ");
  }
  double energy = 0.0;
  for (const auto& term : h.terms()) {
    if (term.string.is_identity()) {
      energy += term.coefficient;
    } else {
      energy += term.coefficient * term_expectation(term.string, psi);
    }
  }
  return energy;
}

}  // namespace davqe
