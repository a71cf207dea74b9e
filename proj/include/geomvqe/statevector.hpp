#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "error.hpp"
#include "pauli.hpp"

namespace geomvqe {

/// Dense state of up to 16 qubits. Qubit 0 is the most significant bit of the basis-state
/// index, so |q0 q1 ... q_{N-1}> reads left to right as a binary number.
class Statevector {
 public:
  static constexpr int kMaxQubits = 16;

  Statevector() = default;
  explicit Statevector(int n_qubits) : n_(n_qubits), amp_(std::size_t{1} << n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits)
      throw InputError(fmt::format("statevector supports 1..{} qubits, got {}", kMaxQubits, n_qubits));
  }

  /// Computational basis state from a bitstring such as "1100" (character q is qubit q).
  static Statevector basis(std::string_view bits) {
    Statevector s(static_cast<int>(bits.size()));
    std::size_t idx = 0;
    for (char ch : bits) {
      if (ch != '0' && ch != '1') throw InputError(fmt::format("bad bitstring '{}'", bits));
      idx = (idx << 1) | static_cast<std::size_t>(ch == '1');
    }
    s.amp_[idx] = 1.0;
    return s;
  }

  static Statevector basis(std::span<const int> occupations) {
    std::string bits;
    for (int o : occupations) bits += o ? '1' : '0';
    return basis(bits);
  }

  int n_qubits() const { return n_; }
  std::size_t dim() const { return amp_.size(); }

  /// State-index bit belonging to qubit q.
  std::size_t mask(int q) const { return std::size_t{1} << (n_ - 1 - q); }

  cplx& operator[](std::size_t i) { return amp_[i]; }
  const cplx& operator[](std::size_t i) const { return amp_[i]; }

  /// Amplitude of a basis state given as a bitstring.
  cplx amplitude(std::string_view bits) const {
    std::size_t idx = 0;
    for (char ch : bits) idx = (idx << 1) | static_cast<std::size_t>(ch == '1');
    return amp_.at(idx);
  }

  std::span<cplx> amplitudes() { return amp_; }
  std::span<const cplx> amplitudes() const { return amp_; }

  double norm() const {
    double s = 0.0;
    for (const auto& a : amp_) s += std::norm(a);
    return std::sqrt(s);
  }

  cplx inner(const Statevector& o) const {
    cplx s = 0.0;
    for (std::size_t i = 0; i < amp_.size(); ++i) s += std::conj(amp_[i]) * o.amp_[i];
    return s;
  }

 private:
  int n_ = 0;
  std::vector<cplx> amp_;
};

inline Statevector basis_state(std::string_view bits) { return Statevector::basis(bits); }

namespace detail {
inline void check_qubits(const Statevector& s, std::span<const int> q) {
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (q[k] < 0 || q[k] >= s.n_qubits()) throw InputError(fmt::format("qubit {} out of range", q[k]));
    if (k > 0 && q[k] <= q[k - 1]) throw InputError("gate qubits must be strictly increasing");
  }
}
}  // namespace detail

/// Givens rotation coupling |01> and |10> on qubits (a, b):
///   |01> -> cos t |01> + sin t |10>,   |10> -> -sin t |01> + cos t |10>.
inline void apply_single_excitation(Statevector& s, double theta, int a, int b) {
  const int q[2] = {a, b};
  detail::check_qubits(s, q);
  const std::size_t ma = s.mask(a), mb = s.mask(b);
  const double ct = std::cos(theta), st = std::sin(theta);
  for (std::size_t i = 0; i < s.dim(); ++i) {
    if (i & (ma | mb)) continue;
    const cplx v01 = s[i | mb], v10 = s[i | ma];
    s[i | mb] = ct * v01 - st * v10;
    s[i | ma] = st * v01 + ct * v10;
  }
}

/// Rotation in the {|1100>, |0011>} plane of qubits (a, b, c, d):
///   |1100> -> cos t |1100> - sin t |0011>,   |0011> -> cos t |0011> + sin t |1100>.
inline void apply_double_excitation(Statevector& s, double theta, int a, int b, int c, int d) {
  const int q[4] = {a, b, c, d};
  detail::check_qubits(s, q);
  const std::size_t hi = s.mask(a) | s.mask(b), lo = s.mask(c) | s.mask(d);
  const double ct = std::cos(theta), st = std::sin(theta);
  for (std::size_t i = 0; i < s.dim(); ++i) {
    if (i & (hi | lo)) continue;
    const cplx v1100 = s[i | hi], v0011 = s[i | lo];
    s[i | hi] = ct * v1100 + st * v0011;
    s[i | lo] = -st * v1100 + ct * v0011;
  }
}

enum class GateKind { single, double_ };

struct Gate {
  GateKind kind = GateKind::double_;
  std::vector<int> qubits;  // 2 or 4, strictly increasing
  std::size_t angle_index = 0;

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Excitation gates applied in order to a basis-state reference.
struct Circuit {
  int n_qubits = 0;
  std::vector<int> hf_occupations;
  std::vector<Gate> gates;

  std::size_t n_parameters() const {
    std::size_t n = 0;
    for (const auto& g : gates) n = std::max(n, g.angle_index + 1);
    return n;
  }

  void validate() const {
    if (static_cast<int>(hf_occupations.size()) != n_qubits)
      throw InputError("reference occupation length differs from the qubit count");
    for (const auto& g : gates) {
      const std::size_t want = g.kind == GateKind::single ? 2 : 4;
      if (g.qubits.size() != want) throw InputError("gate has the wrong number of qubits");
      for (std::size_t k = 0; k < g.qubits.size(); ++k) {
        if (g.qubits[k] < 0 || g.qubits[k] >= n_qubits) throw InputError("gate qubit out of range");
        if (k > 0 && g.qubits[k] <= g.qubits[k - 1]) throw InputError("gate qubits not increasing");
      }
    }
  }
};

inline void apply_gate(Statevector& s, const Gate& g, double theta) {
  if (g.kind == GateKind::single)
    apply_single_excitation(s, theta, g.qubits[0], g.qubits[1]);
  else
    apply_double_excitation(s, theta, g.qubits[0], g.qubits[1], g.qubits[2], g.qubits[3]);
}

inline Statevector run_circuit(const Circuit& circuit, std::span<const double> theta) {
  if (theta.size() < circuit.n_parameters())
    throw InputError(fmt::format("circuit needs {} angles, got {}", circuit.n_parameters(), theta.size()));
  Statevector s = Statevector::basis(circuit.hf_occupations);
  for (const auto& g : circuit.gates) apply_gate(s, g, theta[g.angle_index]);
  return s;
}

namespace detail {
inline std::size_t to_state_mask(std::uint32_t qubit_mask, int n) {
  std::size_t m = 0;
  for (int q = 0; q < n; ++q)
    if ((qubit_mask >> q) & 1u) m |= std::size_t{1} << (n - 1 - q);
  return m;
}

inline cplx i_pow(int k) {
  static constexpr cplx kPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return kPow[k & 3];
}

// P|i> = i^k (-1)^{i.z} |i ^ x> with k = |x & z|. The loops below take the sign on the output
// index j = i ^ x, which adds (-1)^k, so the prefactor becomes (-i)^k.
inline cplx output_phase(const PauliString& p) { return i_pow(3 * std::popcount(p.x & p.z)); }
}  // namespace detail

/// <psi|P|psi> summed over the Pauli terms, one pass over the amplitudes per term.
inline double expectation(const Statevector& s, const PauliSum& h) {
  if (s.n_qubits() != h.n_qubits())
    throw InputError(fmt::format("observable on {} qubits, state on {}", h.n_qubits(), s.n_qubits()));
  const int n = s.n_qubits();
  cplx total = 0.0;
  for (const auto& [p, coef] : h.terms()) {
    const std::size_t sx = detail::to_state_mask(p.x, n);
    const std::size_t sz = detail::to_state_mask(p.z, n);
    const cplx phase = detail::output_phase(p);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < s.dim(); ++i) {
      const std::size_t j = i ^ sx;
      const double sign = (std::popcount(j & sz) & 1) ? -1.0 : 1.0;
      acc += std::conj(s[j]) * s[i] * sign;
    }
    total += coef * phase * acc;
  }
  if (std::abs(total.imag()) > 1e-10)
    throw InternalError(fmt::format("expectation value has imaginary part {:.3e}", total.imag()));
  return total.real();
}

/// A PauliSum regrouped by X mask with the Z/Y phases folded into one diagonal per group, so
/// H|psi> costs one pass per distinct X mask. Built once, evaluated many times.
class CompiledObservable {
 public:
  explicit CompiledObservable(const PauliSum& h) : n_(h.n_qubits()) {
    const std::size_t dim = std::size_t{1} << n_;
    std::map<std::size_t, std::size_t> slot;
    for (const auto& [p, coef] : h.terms()) {
      const std::size_t sx = detail::to_state_mask(p.x, n_);
      const std::size_t sz = detail::to_state_mask(p.z, n_);
      auto [it, fresh] = slot.try_emplace(sx, flips_.size());
      if (fresh) {
        flips_.push_back(sx);
        diag_.emplace_back(dim, cplx(0.0));
      }
      auto& d = diag_[it->second];
      const cplx c = coef * detail::output_phase(p);
      for (std::size_t j = 0; j < dim; ++j) d[j] += (std::popcount(j & sz) & 1) ? -c : c;
    }
  }

  int n_qubits() const { return n_; }
  std::size_t n_groups() const { return flips_.size(); }

  double expectation(const Statevector& s) const {
    check(s);
    cplx total = 0.0;
    for (std::size_t g = 0; g < flips_.size(); ++g) {
      const std::size_t sx = flips_[g];
      const auto& d = diag_[g];
      cplx acc = 0.0;
      for (std::size_t j = 0; j < s.dim(); ++j) acc += std::conj(s[j]) * d[j] * s[j ^ sx];
      total += acc;
    }
    if (std::abs(total.imag()) > 1e-10)
      throw InternalError(fmt::format("expectation value has imaginary part {:.3e}", total.imag()));
    return total.real();
  }

  /// H|psi>.
  Statevector apply(const Statevector& s) const {
    check(s);
    Statevector out(n_);
    for (std::size_t g = 0; g < flips_.size(); ++g) {
      const std::size_t sx = flips_[g];
      const auto& d = diag_[g];
      for (std::size_t j = 0; j < s.dim(); ++j) out[j] += d[j] * s[j ^ sx];
    }
    return out;
  }

 private:
  void check(const Statevector& s) const {
    if (s.n_qubits() != n_)
      throw InputError(fmt::format("observable on {} qubits, state on {}", n_, s.n_qubits()));
  }

  int n_;
  std::vector<std::size_t> flips_;
  std::vector<std::vector<cplx>> diag_;
};

}  // namespace geomvqe
