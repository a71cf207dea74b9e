#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "error.hpp"

namespace geomvqe {

using cplx = std::complex<double>;

/// Tensor product of single-qubit Paulis, stored as X and Z bit masks (bit q is qubit q).
/// Y on a qubit sets both bits: the operator is prod_q i^{x_q z_q} X^{x_q} Z^{z_q}.
struct PauliString {
  std::uint32_t x = 0;
  std::uint32_t z = 0;

  static PauliString identity() { return {}; }

  /// Single-qubit Pauli 'X', 'Y' or 'Z' on qubit q.
  static PauliString single(char p, int q) {
    const std::uint32_t b = 1u << q;
    switch (p) {
      case 'X': return {b, 0};
      case 'Y': return {b, b};
      case 'Z': return {0, b};
      default: throw InputError(fmt::format("unknown Pauli '{}'", p));
    }
  }

  char at(int q) const {
    const bool bx = (x >> q) & 1u, bz = (z >> q) & 1u;
    if (bx && bz) return 'Y';
    if (bx) return 'X';
    if (bz) return 'Z';
    return 'I';
  }

  bool is_identity() const { return x == 0 && z == 0; }

  /// Mask of the qubits the string acts on non-trivially.
  std::uint32_t support() const { return x | z; }

  std::uint64_t key() const { return (static_cast<std::uint64_t>(x) << 32) | z; }

  friend bool operator==(const PauliString&, const PauliString&) = default;

  /// Letter-wise order over qubits 0, 1, ... with I < X < Y < Z; identity sorts first.
  friend bool operator<(const PauliString& a, const PauliString& b) {
    if (a.key() == b.key()) return false;
    const std::uint32_t diff = (a.x ^ b.x) | (a.z ^ b.z);
    const int q = std::countr_zero(diff);
    auto rank = [](char c) { return c == 'I' ? 0 : c == 'X' ? 1 : c == 'Y' ? 2 : 3; };
    return rank(a.at(q)) < rank(b.at(q));
  }
};

/// a * b = phase * result.
inline std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b) {
  const PauliString r{a.x ^ b.x, a.z ^ b.z};
  int k = std::popcount(a.x & a.z) + std::popcount(b.x & b.z) + 2 * std::popcount(a.z & b.x) -
          std::popcount(r.x & r.z);
  k = ((k % 4) + 4) % 4;
  static constexpr cplx kPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return {kPow[k], r};
}

/// Real linear combination of Pauli strings on a fixed number of qubits.
class PauliSum {
 public:
  static constexpr double kDefaultPrune = 1e-12;

  PauliSum() = default;
  explicit PauliSum(int n_qubits) : n_qubits_(n_qubits) {}

  int n_qubits() const { return n_qubits_; }
  const std::map<PauliString, double>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  void add(const PauliString& p, double c) {
    if (c == 0.0) return;
    terms_[p] += c;
  }

  double coefficient(const PauliString& p) const {
    auto it = terms_.find(p);
    return it == terms_.end() ? 0.0 : it->second;
  }

  double identity_coefficient() const { return coefficient(PauliString::identity()); }

  void prune(double threshold = kDefaultPrune) {
    std::erase_if(terms_, [&](const auto& kv) { return std::abs(kv.second) < threshold; });
  }

  PauliSum& operator+=(const PauliSum& o) {
    for (const auto& [p, c] : o.terms_) add(p, c);
    return *this;
  }
  PauliSum& operator-=(const PauliSum& o) {
    for (const auto& [p, c] : o.terms_) add(p, -c);
    return *this;
  }
  PauliSum& operator*=(double s) {
    for (auto& kv : terms_) kv.second *= s;
    return *this;
  }

  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, double s) { return a *= s; }

 private:
  int n_qubits_ = 0;
  std::map<PauliString, double> terms_;
};

/// `X0 Y1` style word, empty for the identity.
inline std::string pauli_word(const PauliString& p, int n_qubits) {
  std::string out;
  for (int q = 0; q < n_qubits; ++q) {
    const char c = p.at(q);
    if (c == 'I') continue;
    if (!out.empty()) out += ' ';
    out += fmt::format("{}{}", c, q);
  }
  return out;
}

/// One term per line: `<coefficient:+.12e> [<P><qubit> ...]`, preceded by a `# qubits N` header.
inline std::string to_text(const PauliSum& h) {
  std::string out = fmt::format("# qubits {}\n", h.n_qubits());
  for (const auto& [p, c] : h.terms()) out += fmt::format("{:+.12e} [{}]\n", c, pauli_word(p, h.n_qubits()));
  return out;
}

inline PauliSum parse_pauli_sum(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int n_qubits = -1;
  std::vector<std::pair<PauliString, double>> terms;
  int max_qubit = -1;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.front() == '#') {
      std::istringstream h(line.substr(1));
      std::string word;
      int n = 0;
      if (h >> word >> n && word == "qubits") n_qubits = n;
      continue;
    }
    const auto lb = line.find('['), rb = line.find(']');
    if (lb == std::string::npos || rb == std::string::npos || rb < lb)
      throw InputError(fmt::format("line {}: expected '<coefficient> [<word>]'", lineno));
    double c = 0.0;
    try {
      c = std::stod(line.substr(0, lb));
    } catch (const std::exception&) {
      throw InputError(fmt::format("line {}: bad coefficient", lineno));
    }
    PauliString p;
    std::istringstream w(line.substr(lb + 1, rb - lb - 1));
    std::string tok;
    while (w >> tok) {
      if (tok.size() < 2) throw InputError(fmt::format("line {}: bad Pauli '{}'", lineno, tok));
      const int q = std::stoi(tok.substr(1));
      if (q < 0 || q >= 32) throw InputError(fmt::format("line {}: qubit out of range", lineno));
      const PauliString s = PauliString::single(tok.front(), q);
      if (p.support() & s.support()) throw InputError(fmt::format("line {}: repeated qubit {}", lineno, q));
      p.x |= s.x;
      p.z |= s.z;
      max_qubit = std::max(max_qubit, q);
    }
    terms.emplace_back(p, c);
  }
  if (n_qubits < 0) n_qubits = max_qubit + 1;
  if (max_qubit >= n_qubits) throw InputError("Pauli word acts beyond the declared qubit count");
  PauliSum h(n_qubits);
  for (const auto& [p, c] : terms) h.add(p, c);
  return h;
}

}  // namespace geomvqe
