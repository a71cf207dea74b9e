#pragma once

// McMurchie-Davidson integrals over contracted Cartesian Gaussians (s and p).

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "basis.hpp"
#include "boys.hpp"
#include "molecule.hpp"
#include "tensor.hpp"

namespace geomvqe {

struct AOIntegrals {
  Eigen::MatrixXd overlap;
  Eigen::MatrixXd kinetic;
  Eigen::MatrixXd nuclear_attraction;
  Tensor4 eri;  // chemist notation (ij|kl)
  std::vector<std::string> warnings;

  std::size_t n_basis() const { return static_cast<std::size_t>(overlap.rows()); }
  Eigen::MatrixXd core_hamiltonian() const { return kinetic + nuclear_attraction; }
};

namespace md {

/// Hermite expansion coefficient E^{ij}_t for one Cartesian direction.
/// `qx` is A_x - B_x; a, b are the primitive exponents.
inline double hermite_e(int i, int j, int t, double qx, double a, double b) {
  const double p = a + b;
  const double q = a * b / p;
  if (t < 0 || t > i + j || i < 0 || j < 0) return 0.0;
  if (i == 0 && j == 0 && t == 0) return std::exp(-q * qx * qx);
  if (j == 0) {
    return hermite_e(i - 1, j, t - 1, qx, a, b) / (2.0 * p) -
           q * qx / a * hermite_e(i - 1, j, t, qx, a, b) +
           (t + 1) * hermite_e(i - 1, j, t + 1, qx, a, b);
  }
  return hermite_e(i, j - 1, t - 1, qx, a, b) / (2.0 * p) +
         q * qx / b * hermite_e(i, j - 1, t, qx, a, b) +
         (t + 1) * hermite_e(i, j - 1, t + 1, qx, a, b);
}

/// Hermite Coulomb integrals R^0_{tuv} for t+u+v <= lmax, given exponent `p` and the
/// separation vector `pc`.
class HermiteCoulomb {
 public:
  static constexpr int kMax = 4;

  HermiteCoulomb(int lmax, double p, const Vec3& pc) : lmax_(lmax), pc_(pc) {
    std::array<double, kMax + 1> f{};
    boys(p * pc.squaredNorm(), std::span<double>(f.data(), static_cast<std::size_t>(lmax) + 1));
    double scale = 1.0;
    for (int n = 0; n <= lmax; ++n) {
      boys_scaled_[n] = scale * f[n];  // (-2p)^n F_n
      scale *= -2.0 * p;
    }
    for (auto& v : table_) v = kUnset;
  }

  double operator()(int t, int u, int v) { return r(t, u, v, 0); }

 private:
  static constexpr double kUnset = 1e300;

  double r(int t, int u, int v, int n) {
    if (t < 0 || u < 0 || v < 0) return 0.0;
    double& slot = table_[((n * (kMax + 1) + t) * (kMax + 1) + u) * (kMax + 1) + v];
    if (slot != kUnset) return slot;
    double val;
    if (t == 0 && u == 0 && v == 0)
      val = boys_scaled_[n];
    else if (t > 0)
      val = (t - 1) * r(t - 2, u, v, n + 1) + pc_.x() * r(t - 1, u, v, n + 1);
    else if (u > 0)
      val = (u - 1) * r(t, u - 2, v, n + 1) + pc_.y() * r(t, u - 1, v, n + 1);
    else
      val = (v - 1) * r(t, u, v - 2, n + 1) + pc_.z() * r(t, u, v - 1, n + 1);
    slot = val;
    return val;
  }

  int lmax_;
  Vec3 pc_;
  std::array<double, kMax + 1> boys_scaled_{};
  std::array<double, (kMax + 1) * (kMax + 1) * (kMax + 1) * (kMax + 1)> table_{};
};

using Powers = std::array<int, 3>;

inline double overlap_prim(double a, const Powers& la, const Vec3& A, double b, const Powers& lb,
                           const Vec3& B) {
  const double p = a + b;
  double s = std::pow(kPi / p, 1.5);
  for (int d = 0; d < 3; ++d) s *= hermite_e(la[d], lb[d], 0, A[d] - B[d], a, b);
  return s;
}

inline double kinetic_prim(double a, const Powers& la, const Vec3& A, double b, const Powers& lb,
                           const Vec3& B) {
  const int l2 = lb[0], m2 = lb[1], n2 = lb[2];
  const double term0 = b * (2 * (l2 + m2 + n2) + 3) * overlap_prim(a, la, A, b, lb, B);
  double term1 = 0.0;
  double term2 = 0.0;
  for (int d = 0; d < 3; ++d) {
    Powers up = lb;
    up[d] += 2;
    term1 += overlap_prim(a, la, A, b, up, B);
    if (lb[d] >= 2) {
      Powers down = lb;
      down[d] -= 2;
      term2 += lb[d] * (lb[d] - 1) * overlap_prim(a, la, A, b, down, B);
    }
  }
  return term0 - 2.0 * b * b * term1 - 0.5 * term2;
}

inline double nuclear_prim(double a, const Powers& la, const Vec3& A, double b, const Powers& lb,
                           const Vec3& B, const Vec3& C) {
  const double p = a + b;
  const Vec3 P = (a * A + b * B) / p;
  HermiteCoulomb R(la[0] + la[1] + la[2] + lb[0] + lb[1] + lb[2], p, P - C);
  double v = 0.0;
  for (int t = 0; t <= la[0] + lb[0]; ++t) {
    const double ex = hermite_e(la[0], lb[0], t, A.x() - B.x(), a, b);
    for (int u = 0; u <= la[1] + lb[1]; ++u) {
      const double ey = hermite_e(la[1], lb[1], u, A.y() - B.y(), a, b);
      for (int w = 0; w <= la[2] + lb[2]; ++w) {
        const double ez = hermite_e(la[2], lb[2], w, A.z() - B.z(), a, b);
        v += ex * ey * ez * R(t, u, w);
      }
    }
  }
  return 2.0 * kPi / p * v;
}

inline double eri_prim(double a, const Powers& la, const Vec3& A, double b, const Powers& lb,
                       const Vec3& B, double c, const Powers& lc, const Vec3& C, double d,
                       const Powers& ld, const Vec3& D) {
  const double p = a + b;
  const double q = c + d;
  const double alpha = p * q / (p + q);
  const Vec3 P = (a * A + b * B) / p;
  const Vec3 Q = (c * C + d * D) / q;
  int lsum = 0;
  for (int k = 0; k < 3; ++k) lsum += la[k] + lb[k] + lc[k] + ld[k];
  HermiteCoulomb R(lsum, alpha, P - Q);

  // Hermite coefficients for the bra and ket pairs, per direction.
  std::array<std::array<double, 3>, 3> ebra{};
  std::array<std::array<double, 3>, 3> eket{};
  for (int k = 0; k < 3; ++k) {
    for (int t = 0; t <= la[k] + lb[k]; ++t) ebra[k][t] = hermite_e(la[k], lb[k], t, A[k] - B[k], a, b);
    for (int t = 0; t <= lc[k] + ld[k]; ++t) eket[k][t] = hermite_e(lc[k], ld[k], t, C[k] - D[k], c, d);
  }

  double v = 0.0;
  for (int t = 0; t <= la[0] + lb[0]; ++t)
    for (int u = 0; u <= la[1] + lb[1]; ++u)
      for (int w = 0; w <= la[2] + lb[2]; ++w) {
        const double eb = ebra[0][t] * ebra[1][u] * ebra[2][w];
        if (eb == 0.0) continue;
        for (int tau = 0; tau <= lc[0] + ld[0]; ++tau)
          for (int nu = 0; nu <= lc[1] + ld[1]; ++nu)
            for (int phi = 0; phi <= lc[2] + ld[2]; ++phi) {
              const double ek = eket[0][tau] * eket[1][nu] * eket[2][phi];
              if (ek == 0.0) continue;
              const double sign = ((tau + nu + phi) % 2 == 0) ? 1.0 : -1.0;
              v += eb * ek * sign * R(t + tau, u + nu, w + phi);
            }
      }
  return 2.0 * std::pow(kPi, 2.5) / (p * q * std::sqrt(p + q)) * v;
}

}  // namespace md

inline double overlap(const BasisFunction& f, const BasisFunction& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.exponents.size(); ++i)
    for (std::size_t j = 0; j < g.exponents.size(); ++j)
      s += f.coefficients[i] * g.coefficients[j] *
           md::overlap_prim(f.exponents[i], f.powers, f.center, g.exponents[j], g.powers, g.center);
  return s;
}

inline double kinetic(const BasisFunction& f, const BasisFunction& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.exponents.size(); ++i)
    for (std::size_t j = 0; j < g.exponents.size(); ++j)
      s += f.coefficients[i] * g.coefficients[j] *
           md::kinetic_prim(f.exponents[i], f.powers, f.center, g.exponents[j], g.powers, g.center);
  return s;
}

/// <f| -Z / |r - C| |g>
inline double nuclear_attraction(const BasisFunction& f, const BasisFunction& g, const Vec3& C,
                                 double Z) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.exponents.size(); ++i)
    for (std::size_t j = 0; j < g.exponents.size(); ++j)
      s += f.coefficients[i] * g.coefficients[j] *
           md::nuclear_prim(f.exponents[i], f.powers, f.center, g.exponents[j], g.powers, g.center, C);
  return -Z * s;
}

/// Chemist-notation (fg|hk).
inline double electron_repulsion(const BasisFunction& f, const BasisFunction& g,
                                 const BasisFunction& h, const BasisFunction& k) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.exponents.size(); ++i)
    for (std::size_t j = 0; j < g.exponents.size(); ++j) {
      const double cij = f.coefficients[i] * g.coefficients[j];
      for (std::size_t m = 0; m < h.exponents.size(); ++m)
        for (std::size_t n = 0; n < k.exponents.size(); ++n)
          s += cij * h.coefficients[m] * k.coefficients[n] *
               md::eri_prim(f.exponents[i], f.powers, f.center, g.exponents[j], g.powers, g.center,
                            h.exponents[m], h.powers, h.center, k.exponents[n], k.powers, k.center);
    }
  return s;
}

/// Overlap between two (possibly differently placed) basis sets: S_ij = <a_i|b_j>.
inline Eigen::MatrixXd overlap_matrix(std::span<const BasisFunction> a,
                                      std::span<const BasisFunction> b) {
  Eigen::MatrixXd s(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) s(i, j) = overlap(a[i], b[j]);
  return s;
}

inline AOIntegrals compute_ao_integrals(const Molecule& mol, std::span<const BasisFunction> basis) {
  const std::size_t n = basis.size();
  AOIntegrals out;
  out.overlap.resize(n, n);
  out.kinetic.resize(n, n);
  out.nuclear_attraction.resize(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double s = overlap(basis[i], basis[j]);
      const double t = kinetic(basis[i], basis[j]);
      double v = 0.0;
      for (std::size_t a = 0; a < mol.n_atoms(); ++a)
        v += nuclear_attraction(basis[i], basis[j], mol.position(a), mol.charge_of(a));
      out.overlap(i, j) = out.overlap(j, i) = s;
      out.kinetic(i, j) = out.kinetic(j, i) = t;
      out.nuclear_attraction(i, j) = out.nuclear_attraction(j, i) = v;
    }
  }

  // Unique quartets i>=j, k>=l, ij>=kl; the other seven permutations are copies.
  out.eri = Tensor4(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l <= k; ++l) {
          if (i * (i + 1) / 2 + j < k * (k + 1) / 2 + l) continue;
          const double v = electron_repulsion(basis[i], basis[j], basis[k], basis[l]);
          for (auto [a, b] : {std::pair{i, j}, std::pair{j, i}})
            for (auto [c, d] : {std::pair{k, l}, std::pair{l, k}}) {
              out.eri(a, b, c, d) = v;
              out.eri(c, d, a, b) = v;
            }
        }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.overlap, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < 1e-8)
    out.warnings.push_back(fmt::format("basis is nearly linearly dependent (smallest overlap "
                                       "eigenvalue {:.3e})",
                                       es.eigenvalues()(0)));
  return out;
}

inline AOIntegrals compute_ao_integrals(const Molecule& mol, std::span<const BasisShell> shells) {
  const auto basis = expand_shells(shells, mol.coordinates());
  return compute_ao_integrals(mol, std::span<const BasisFunction>(basis));
}

}  // namespace geomvqe
