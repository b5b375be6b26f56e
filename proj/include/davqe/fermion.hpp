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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "davqe/errors.hpp"
#include "davqe/pauli.hpp"

namespace davqe {

inline constexpr int kDefaultModeCap = 16;

// Second-quantized Hamiltonian
//   H = sum_{pq} h1[p,q] a†_p a_q
//     + (1/2) sum_{pqrs} h2[p,q,r,s] a†_p a†_q a_r a_s
// with real tensors stored row-major. Mode p maps to qubit p; occupation of
// mode p is bit p of the basis index.
struct FermionHamiltonian {
  int n_modes = 0;
  std::vector<double> one_body;  // n_modes^2, row-major [p][q]
  std::vector<double> two_body;  // n_modes^4, row-major [p][q][r][s]

  double one(int p, int q) const { return one_body[p * n_modes + q]; }

  double two(int p, int q, int r, int s) const {
    return two_body[((p * n_modes + q) * n_modes + r) * n_modes + s];
  }

  double& two(int p, int q, int r, int s) {
    return two_body[((p * n_modes + q) * n_modes + r) * n_modes + s];
  }

  // Hermiticity of the real tensors: h1 symmetric, h2[p,q,r,s] == h2[s,r,q,p].
  void validate(double tolerance = 1e-12) const {
    const std::size_t n = static_cast<std::size_t>(n_modes);
    if (n_modes < 1) {
      throw ConstraintError("FermionHamiltonian: n_modes must be positive");
    }
    if (one_body.size() != n * n || two_body.size() != n * n * n * n) {
      throw ConstraintError("FermionHamiltonian: tensor sizes do not match "
                            "n_modes");
    }
    for (int p = 0; p < n_modes; ++p) {
      for (int q = 0; q < n_modes; ++q) {
        if (!std::isfinite(one(p, q))) {
          throw ConstraintError("FermionHamiltonian: non-finite one-body entry");
        }
        if (std::abs(one(p, q) - one(q, p)) > tolerance) {
          throw ConstraintError(
              "FermionHamiltonian: one-body tensor not symmetric at (" +
              std::to_string(p) + ", " + std::to_string(q) + ")");
        }
      }
    }
    for (int p = 0; p < n_modes; ++p) {
      for (int q = 0; q < n_modes; ++q) {
        for (int r = 0; r < n_modes; ++r) {
          for (int s = 0; s < n_modes; ++s) {
            if (!std::isfinite(two(p, q, r, s))) {
              throw ConstraintError(
                  "FermionHamiltonian: non-finite two-body entry");
            }
            if (std::abs(two(p, q, r, s) - two(s, r, q, p)) > tolerance) {
              throw ConstraintError(
                  "FermionHamiltonian: two-body tensor violates "
                  "h[p,q,r,s] == h[s,r,q,p] at (" + std::to_string(p) + ", " +
                  std::to_string(q) + ", " + std::to_string(r) + ", " +
                  std::to_string(s) + ")");
            }
          }
        }
      }
    }
  }
};

namespace detail {

using OperatorSum = std::vector<std::pair<std::complex<double>, PauliString>>;

// Right-multiplies an operator sum by the Jordan-Wigner image of a ladder
// operator on `mode`:
//   a†_p = Z_0 ... Z_{p-1} (X_p - i Y_p) / 2
//   a_p  = Z_0 ... Z_{p-1} (X_p + i Y_p) / 2
inline OperatorSum apply_ladder(const OperatorSum& ops, int n_modes, int mode,
                                bool dagger) {
  PauliString x_part(n_modes);
  PauliString y_part(n_modes);
  for (int j = 0; j < mode; ++j) {
    x_part.set(j, PauliLetter::Z);
    y_part.set(j, PauliLetter::Z);
  }
  x_part.set(mode, PauliLetter::X);
  y_part.set(mode, PauliLetter::Y);
  const std::complex<double> y_weight =
      dagger ? std::complex<double>(0.0, -0.5) : std::complex<double>(0.0, 0.5);

  OperatorSum out;
  out.reserve(ops.size() * 2);
  for (const auto& [coefficient, string] : ops) {
    auto px = multiply(string, x_part);
    out.emplace_back(coefficient * 0.5 * px.phase, std::move(px.string));
    auto py = multiply(string, y_part);
    out.emplace_back(coefficient * y_weight * py.phase, std::move(py.string));
  }
  return out;
}

inline void accumulate(std::map<PauliString, std::complex<double>>& total,
                       const OperatorSum& ops, double weight) {
  for (const auto& [coefficient, string] : ops) {
    total[string] += weight * coefficient;
  }
}

}  // namespace detail

// Jordan-Wigner transform to a qubit Hamiltonian. The result is real by
// Hermiticity of the input; imaginary residues above 1e-9 raise a
// NumericError, and real coefficients with |c| <= prune are dropped.
inline PauliHamiltonian jordan_wigner(const FermionHamiltonian& f,
                                      int mode_cap = kDefaultModeCap,
                                      double prune = 1e-12) {
  f.validate();
  if (f.n_modes > mode_cap) {
    throw ConstraintError("jordan_wigner: " + std::to_string(f.n_modes) +
                          " modes exceeds cap " + std::to_string(mode_cap));
  }
  const int n = f.n_modes;
  std::map<PauliString, std::complex<double>> total;
  const detail::OperatorSum unit = {{1.0, PauliString(n)}};

  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      const double weight = f.one(p, q);
      if (weight == 0.0) continue;
      auto ops = detail::apply_ladder(unit, n, p, true);
      ops = detail::apply_ladder(ops, n, q, false);
      detail::accumulate(total, ops, weight);
    }
  }
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      for (int r = 0; r < n; ++r) {
        for (int s = 0; s < n; ++s) {
          const double weight = f.two(p, q, r, s);
          if (weight == 0.0) continue;
          auto ops = detail::apply_ladder(unit, n, p, true);
          ops = detail::apply_ladder(ops, n, q, true);
          ops = detail::apply_ladder(ops, n, r, false);
          ops = detail::apply_ladder(ops, n, s, false);
          detail::accumulate(total, ops, 0.5 * weight);
        }
      }
    }
  }

  std::vector<PauliTerm> terms;
  terms.reserve(total.size());
  for (const auto& [string, coefficient] : total) {
    if (std::abs(coefficient.imag()) > 1e-9) {
      throw NumericError("jordan_wigner: imaginary residue " +
                         std::to_string(coefficient.imag()) + " on " +
                         string.str());
    }
    terms.push_back({coefficient.real(), string});
  }
  return PauliHamiltonian(n, std::move(terms), prune);
}

}  // namespace davqe
