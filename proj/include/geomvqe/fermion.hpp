#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "error.hpp"
#include "pauli.hpp"
#include "scf.hpp"

namespace geomvqe {

struct LadderOp {
  int mode = 0;
  bool dagger = false;

  friend auto operator<=>(const LadderOp&, const LadderOp&) = default;
};

struct FermionTerm {
  double coefficient = 0.0;
  std::vector<LadderOp> ops;  // applied right to left, as written
};

/// Real linear combination of products of creation/annihilation operators.
struct FermionOperator {
  std::vector<FermionTerm> terms;

  void add(double c, std::vector<LadderOp> ops) { terms.push_back({c, std::move(ops)}); }

  int max_mode() const {
    int m = -1;
    for (const auto& t : terms)
      for (const auto& op : t.ops) m = std::max(m, op.mode);
    return m;
  }
};

inline LadderOp cdag(int p) { return {p, true}; }
inline LadderOp c(int p) { return {p, false}; }

inline FermionOperator adjoint(const FermionOperator& f) {
  FermionOperator out;
  for (const auto& t : f.terms) {
    std::vector<LadderOp> ops(t.ops.rbegin(), t.ops.rend());
    for (auto& op : ops) op.dagger = !op.dagger;
    out.add(t.coefficient, std::move(ops));
  }
  return out;
}

/// Normal-ordered form: creators left of annihilators, each group sorted by descending mode.
/// Products with a repeated creator or annihilator vanish. Returns a canonical map so two
/// operators can be compared term by term.
inline std::map<std::vector<LadderOp>, double> normal_order(const FermionOperator& f) {
  std::map<std::vector<LadderOp>, double> out;
  std::vector<std::pair<double, std::vector<LadderOp>>> work;
  for (const auto& t : f.terms) work.emplace_back(t.coefficient, t.ops);

  auto before = [](const LadderOp& a, const LadderOp& b) {
    // strict "a belongs left of b" in the normal order
    if (a.dagger != b.dagger) return a.dagger;
    return a.mode > b.mode;
  };

  while (!work.empty()) {
    auto [coef, ops] = std::move(work.back());
    work.pop_back();
    bool done = true;
    for (std::size_t i = 0; i + 1 < ops.size(); ++i) {
      const LadderOp a = ops[i], b = ops[i + 1];
      if (a.dagger == b.dagger && a.mode == b.mode) {
        done = true;
        coef = 0.0;
        break;
      }
      if (before(b, a)) {
        done = false;
        if (!a.dagger && b.dagger && a.mode == b.mode) {
          // c_p c_p^dag = 1 - c_p^dag c_p
          std::vector<LadderOp> contracted;
          contracted.insert(contracted.end(), ops.begin(), ops.begin() + static_cast<long>(i));
          contracted.insert(contracted.end(), ops.begin() + static_cast<long>(i) + 2, ops.end());
          work.emplace_back(coef, std::move(contracted));
        }
        std::swap(ops[i], ops[i + 1]);
        work.emplace_back(-coef, std::move(ops));
        break;
      }
    }
    if (done && coef != 0.0) out[ops] += coef;
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
  return out;
}

/// Largest coefficient of F - F^dagger after normal ordering.
inline double hermiticity_defect(const FermionOperator& f) {
  auto a = normal_order(f);
  for (const auto& [ops, c] : normal_order(adjoint(f))) a[ops] -= c;
  double worst = 0.0;
  for (const auto& kv : a) worst = std::max(worst, std::abs(kv.second));
  return worst;
}

/// Spin-orbital Hamiltonian with interleaved spin (2p = alpha, 2p+1 = beta):
///   E_core + sum h_pq c+_{p s} c_{q s} + 1/2 sum <pq|sr> c+_{p s} c+_{q t} c_{r t} c_{s s}
/// with <pq|sr> = (ps|qr) in chemist notation.
inline FermionOperator build_fermionic_hamiltonian(const ActiveSpaceIntegrals& a) {
  FermionOperator f;
  f.add(a.core_energy, {});
  const int m = a.n_active_orbitals;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      const double h = a.one_body(p, q);
      if (h == 0.0) continue;
      for (int s = 0; s < 2; ++s) f.add(h, {cdag(2 * p + s), c(2 * q + s)});
    }
  const auto& g = a.two_body;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s) {
          const double v = 0.5 * g(p, q, s, r);
          if (v == 0.0) continue;
          for (int sa = 0; sa < 2; ++sa)
            for (int sb = 0; sb < 2; ++sb) {
              const int P = 2 * p + sa, Q = 2 * q + sb, R = 2 * r + sb, S = 2 * s + sa;
              if (P == Q || R == S) continue;
              f.add(v, {cdag(P), cdag(Q), c(R), c(S)});
            }
        }
  return f;
}

/// Jordan-Wigner image of a fermionic operator:
///   c+_p -> Z_0..Z_{p-1} (X_p - iY_p)/2,   c_p -> Z_0..Z_{p-1} (X_p + iY_p)/2.
/// Coefficients below `prune` are dropped; an imaginary remainder above 1e-10 is an error.
inline PauliSum jordan_wigner(const FermionOperator& f, int n_qubits,
                              double prune = PauliSum::kDefaultPrune) {
  if (f.max_mode() >= n_qubits)
    throw InputError(fmt::format("mode {} does not fit into {} qubits", f.max_mode(), n_qubits));

  std::unordered_map<std::uint64_t, cplx> acc;
  std::vector<std::pair<cplx, PauliString>> cur, next;
  for (const auto& t : f.terms) {
    cur.assign(1, {cplx(t.coefficient, 0.0), PauliString::identity()});
    for (const auto& op : t.ops) {
      const std::uint32_t parity = (1u << op.mode) - 1u;
      const PauliString xs{(1u << op.mode), parity};
      const PauliString ys{(1u << op.mode), parity | (1u << op.mode)};
      const cplx ycoef = op.dagger ? cplx(0, -0.5) : cplx(0, 0.5);
      next.clear();
      for (const auto& [c0, p0] : cur) {
        auto [ph1, r1] = multiply(p0, xs);
        next.emplace_back(c0 * ph1 * 0.5, r1);
        auto [ph2, r2] = multiply(p0, ys);
        next.emplace_back(c0 * ph2 * ycoef, r2);
      }
      std::swap(cur, next);
    }
    for (const auto& [c0, p0] : cur) acc[p0.key()] += c0;
  }

  PauliSum out(n_qubits);
  for (const auto& [key, v] : acc) {
    if (std::abs(v.imag()) > 1e-10)
      throw InternalError(fmt::format("Jordan-Wigner produced imaginary coefficient {:.3e}", v.imag()));
    if (std::abs(v.real()) < prune) continue;
    out.add({static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key & 0xffffffffu)},
            v.real());
  }
  return out;
}

}  // namespace geomvqe
