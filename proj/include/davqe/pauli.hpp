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

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "davqe/errors.hpp"

namespace davqe {

// Weighted sums of Pauli strings and their text format.
//
// Qubit ordering is little-endian throughout: qubit 0 is the least
// significant bit of a computational basis index. A basis index written as
// a ket string ("0011") lists the highest qubit first, so "01" is index 1.

enum class PauliLetter : char { I = 'I', X = 'X', Y = 'Y', Z = 'Z' };

inline char to_char(PauliLetter l) { return static_cast<char>(l); }

// A single n-qubit Pauli string. Only non-identity letters are stored, keyed
// by qubit index.
class PauliString {
 public:
  explicit PauliString(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 64) {
      throw ConstraintError("PauliString: qubit count must be in [1, 64], got " +
                            std::to_string(n_qubits));
    }
  }

  PauliString(int n_qubits,
              std::initializer_list<std::pair<int, PauliLetter>> letters)
      : PauliString(n_qubits) {
    for (const auto& [qubit, letter] : letters) set(qubit, letter);
  }

  int n_qubits() const { return n_qubits_; }

  void set(int qubit, PauliLetter letter) {
    if (qubit < 0 || qubit >= n_qubits_) {
      throw ConstraintError("PauliString: qubit index " + std::to_string(qubit) +
                            " out of range for " + std::to_string(n_qubits_) +
                            " qubits");
    }
    if (letter == PauliLetter::I) {
      letters_.erase(qubit);
    } else {
      letters_[qubit] = letter;
    }
  }

  PauliLetter at(int qubit) const {
    auto it = letters_.find(qubit);
    return it == letters_.end() ? PauliLetter::I : it->second;
  }

  const std::map<int, PauliLetter>& letters() const { return letters_; }

  bool is_identity() const { return letters_.empty(); }

  int weight() const { return static_cast<int>(letters_.size()); }

  std::uint64_t support_mask() const {
    std::uint64_t mask = 0;
    for (const auto& [qubit, letter] : letters_) mask |= 1ULL << qubit;
    return mask;
  }

  std::string str() const {
    if (letters_.empty()) return "I";
    std::string out;
    for (const auto& [qubit, letter] : letters_) {
      if (!out.empty()) out += ' ';
      out += to_char(letter);
      out += std::to_string(qubit);
    }
    return out;
  }

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.n_qubits_ == b.n_qubits_ && a.letters_ == b.letters_;
  }

  // Canonical order: the identity first, then lexicographic by the
  // (qubit, letter) sequence.
  friend bool operator<(const PauliString& a, const PauliString& b) {
    return a.letters_ < b.letters_;
  }

 private:
  int n_qubits_;
  std::map<int, PauliLetter> letters_;
};

struct PauliProduct {
  std::complex<double> phase;
  PauliString string;
};

namespace detail {

// Single-letter product table: returns the resulting letter and the power of
// i carried by the product.
inline std::pair<PauliLetter, int> letter_product(PauliLetter a, PauliLetter b) {
  using L = PauliLetter;
  if (a == L::I) return {b, 0};
  if (b == L::I) return {a, 0};
  if (a == b) return {L::I, 0};
  if (a == L::X && b == L::Y) return {L::Z, 1};
  if (a == L::Y && b == L::X) return {L::Z, 3};
  if (a == L::Y && b == L::Z) return {L::X, 1};
  if (a == L::Z && b == L::Y) return {L::X, 3};
  if (a == L::Z && b == L::X) return {L::Y, 1};
  return {L::Y, 3};  // X * Z
}

inline std::complex<double> i_power(int quadrant) {
  switch (quadrant & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace detail

// Product of two Pauli strings on the same qubit count, with the phase from
// {1, i, -1, -i} tracked explicitly.
inline PauliProduct multiply(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw ConstraintError("multiply: qubit counts differ (" +
                          std::to_string(a.n_qubits()) + " vs " +
                          std::to_string(b.n_qubits()) + ")");
  }
  PauliString out(a.n_qubits());
  int quadrant = 0;
  auto ia = a.letters().begin();
  auto ib = b.letters().begin();
  while (ia != a.letters().end() || ib != b.letters().end()) {
    int qubit;
    PauliLetter la = PauliLetter::I;
    PauliLetter lb = PauliLetter::I;
    if (ib == b.letters().end() ||
        (ia != a.letters().end() && ia->first < ib->first)) {
      qubit = ia->first;
      la = ia->second;
      ++ia;
    } else if (ia == a.letters().end() || ib->first < ia->first) {
      qubit = ib->first;
      lb = ib->second;
      ++ib;
    } else {
      qubit = ia->first;
      la = ia->second;
      lb = ib->second;
      ++ia;
      ++ib;
    }
    auto [letter, quarter] = detail::letter_product(la, lb);
    quadrant += quarter;
    out.set(qubit, letter);
  }
  return {detail::i_power(quadrant), out};
}

// Whether a measurement in `basis` yields outcomes from which `observable`
// can be read off: every non-identity letter of the observable must match
// the basis letter on that qubit. The basis must assign a non-identity
// letter to every qubit.
inline bool hits(const PauliString& basis, const PauliString& observable) {
  if (basis.n_qubits() != observable.n_qubits()) {
    throw ConstraintError("hits: qubit counts differ");
  }
  if (basis.weight() != basis.n_qubits()) {
    throw ConstraintError(
        "hits: measurement basis must assign a letter to every qubit");
  }
  for (const auto& [qubit, letter] : observable.letters()) {
    if (basis.at(qubit) != letter) return false;
  }
  return true;
}

// Action of a Pauli string on computational basis states:
//   P |b> = i^{i_power} * (-1)^{popcount(b & sign_mask)} * |b ^ flip_mask>
struct BasisAction {
  std::uint64_t flip_mask = 0;
  std::uint64_t sign_mask = 0;
  int i_power = 0;
};

inline BasisAction basis_action(const PauliString& s) {
  BasisAction action;
  for (const auto& [qubit, letter] : s.letters()) {
    const std::uint64_t bit = 1ULL << qubit;
    switch (letter) {
      case PauliLetter::X:
        action.flip_mask |= bit;
        break;
      case PauliLetter::Y:
        action.flip_mask |= bit;
        action.sign_mask |= bit;
        action.i_power++;
        break;
      case PauliLetter::Z:
        action.sign_mask |= bit;
        break;
      case PauliLetter::I:
        break;
    }
  }
  action.i_power &= 3;
  return action;
}

struct PauliTerm {
  double coefficient;
  PauliString string;
};

// A real-weighted sum of Pauli strings on a fixed qubit count, kept in
// canonical form: unique strings in canonical order, coefficients merged,
// and terms with |coefficient| <= prune dropped.
class PauliHamiltonian {
 public:
  PauliHamiltonian(int n_qubits, std::vector<PauliTerm> terms,
                   double prune = 0.0)
      : n_qubits_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 64) {
      throw ConstraintError(
          "PauliHamiltonian: qubit count must be in [1, 64], got " +
          std::to_string(n_qubits));
    }
    std::map<PauliString, double> merged;
    for (auto& term : terms) {
      if (term.string.n_qubits() != n_qubits_) {
        throw ConstraintError(
            "PauliHamiltonian: term qubit count differs from header");
      }
      if (!std::isfinite(term.coefficient)) {
        throw ConstraintError("PauliHamiltonian: non-finite coefficient on " +
                              term.string.str());
      }
      merged[term.string] += term.coefficient;
    }
    for (auto& [string, coefficient] : merged) {
      if (std::abs(coefficient) <= prune) continue;
      terms_.push_back({coefficient, string});
    }
  }

  int n_qubits() const { return n_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  double identity_coefficient() const {
    if (!terms_.empty() && terms_.front().string.is_identity()) {
      return terms_.front().coefficient;
    }
    return 0.0;
  }

  // Terms excluding the identity, in canonical order.
  std::vector<PauliTerm> non_identity_terms() const {
    std::vector<PauliTerm> out;
    out.reserve(terms_.size());
    for (const auto& term : terms_) {
      if (!term.string.is_identity()) out.push_back(term);
    }
    return out;
  }

  double coefficient_l1() const {
    double total = 0.0;
    for (const auto& term : terms_) {
      if (!term.string.is_identity()) total += std::abs(term.coefficient);
    }
    return total;
  }

  std::string serialize() const {
    std::string out = "qubits: " + std::to_string(n_qubits_) + "\n";
    char buffer[64];
    for (const auto& term : terms_) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", term.coefficient);
      out += buffer;
      out += ' ';
      out += term.string.str();
      out += '\n';
    }
    return out;
  }

  friend bool operator==(const PauliHamiltonian& a, const PauliHamiltonian& b) {
    if (a.n_qubits_ != b.n_qubits_ || a.terms_.size() != b.terms_.size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
      if (!(a.terms_[i].string == b.terms_[i].string) ||
          a.terms_[i].coefficient != b.terms_[i].coefficient) {
        return false;
      }
    }
    return true;
  }

 private:
  int n_qubits_;
  std::vector<PauliTerm> terms_;
};

namespace detail {

struct Token {
  std::string text;
  int column;  // 1-based
};

inline std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return tokens;
}

}  // namespace detail

// Parses the Hamiltonian text format:
//   # comment
//   qubits: <N>
//   <coefficient> <term>
// where <term> is either the bare identity `I` or space-separated
// <letter><qubit> tokens with letter in {X, Y, Z}. Duplicate strings are
// merged; terms whose merged coefficient is zero are dropped.
inline PauliHamiltonian parse_hamiltonian(const std::string& text) {
  int n_qubits = -1;
  std::vector<PauliTerm> terms;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto tokens = detail::tokenize(line);
    if (tokens.empty()) {
      if (pos > text.size()) break;
      continue;
    }

    if (n_qubits < 0) {
      if (tokens[0].text != "qubits:" || tokens.size() != 2) {
        throw ParseError("expected header 'qubits: <N>'", line_no,
                         tokens[0].column);
      }
      char* parse_end = nullptr;
      const long value = std::strtol(tokens[1].text.c_str(), &parse_end, 10);
      if (*parse_end != '\0' || value < 1 || value > 64) {
        throw ParseError("invalid qubit count '" + tokens[1].text + "'",
                         line_no, tokens[1].column);
      }
      n_qubits = static_cast<int>(value);
      continue;
    }

    char* parse_end = nullptr;
    const double coefficient = std::strtod(tokens[0].text.c_str(), &parse_end);
    if (*parse_end != '\0' || !std::isfinite(coefficient)) {
      throw ParseError("invalid coefficient '" + tokens[0].text + "'", line_no,
                       tokens[0].column);
    }
    if (tokens.size() < 2) {
      throw ParseError("missing Pauli term after coefficient", line_no,
                       tokens[0].column);
    }

    PauliString string(n_qubits);
    if (tokens[1].text == "I") {
      if (tokens.size() != 2) {
        throw ParseError("identity term takes no further tokens", line_no,
                         tokens[2].column);
      }
    } else {
      for (std::size_t t = 1; t < tokens.size(); ++t) {
        const auto& token = tokens[t];
        const char letter = token.text[0];
        if (letter != 'X' && letter != 'Y' && letter != 'Z') {
          throw ParseError("expected Pauli token '<letter><qubit>' with letter "
                           "in {X, Y, Z}, got '" + token.text + "'",
                           line_no, token.column);
        }
        char* index_end = nullptr;
        const long qubit = std::strtol(token.text.c_str() + 1, &index_end, 10);
        if (index_end == token.text.c_str() + 1 || *index_end != '\0' ||
            qubit < 0) {
          throw ParseError("invalid qubit index in '" + token.text + "'",
                           line_no, token.column);
        }
        if (qubit >= n_qubits) {
          throw ParseError("qubit index " + std::to_string(qubit) +
                           " exceeds header count " + std::to_string(n_qubits),
                           line_no, token.column);
        }
        if (string.at(static_cast<int>(qubit)) != PauliLetter::I) {
          throw ParseError("duplicate qubit " + std::to_string(qubit) +
                           " in term", line_no, token.column);
        }
        string.set(static_cast<int>(qubit), static_cast<PauliLetter>(letter));
      }
    }
    terms.push_back({coefficient, string});
  }

  if (n_qubits < 0) {
    throw ParseError("missing 'qubits: <N>' header", 1, 1);
  }
  return PauliHamiltonian(n_qubits, std::move(terms));
}

}  // namespace davqe
