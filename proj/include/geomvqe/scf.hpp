#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "error.hpp"
#include "integrals.hpp"
#include "molecule.hpp"
#include "tensor.hpp"

namespace geomvqe {

struct ScfResult {
  Eigen::MatrixXd mo_coefficients;  // columns are MOs
  Eigen::VectorXd orbital_energies;
  double hf_energy = 0.0;  // includes nuclear repulsion
  Eigen::MatrixXd density;  // closed shell, P = 2 C_occ C_occ^T
  bool converged = false;
  int iterations = 0;
  int n_occupied = 0;

  std::size_t n_orbitals() const { return static_cast<std::size_t>(mo_coefficients.cols()); }
};

struct ScfOptions {
  double energy_tolerance = 1e-10;
  double density_tolerance = 1e-8;  // rms change
  int max_iterations = 200;
  int diis_start = 2;
  std::size_t diis_size = 8;
  double commutator_tolerance = 1e-11;  // max |X^T (FPS - SPF) X|
};

/// Make each MO's largest-magnitude AO coefficient positive. Near-ties (within 1e-8) go to
/// the lowest AO index so that symmetric molecules get a reproducible sign.
inline void fix_mo_phases(Eigen::MatrixXd& c) {
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    const double big = c.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      if (std::abs(c(i, j)) >= big - 1e-8) {
        if (c(i, j) < 0) c.col(j) *= -1.0;
        break;
      }
    }
  }
}

namespace detail {

inline Eigen::MatrixXd two_electron_fock(const Eigen::MatrixXd& p, const Tensor4& eri) {
  const auto n = p.rows();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index v = 0; v < n; ++v) {
      double s = 0.0;
      for (Eigen::Index l = 0; l < n; ++l)
        for (Eigen::Index k = 0; k < n; ++k)
          s += p(l, k) * (eri(m, v, l, k) - 0.5 * eri(m, l, v, k));
      g(m, v) = s;
    }
  return g;
}

// Pulay DIIS on the orthogonalized commutator X^T (FPS - SPF) X.
class Diis {
 public:
  explicit Diis(std::size_t size) : size_(size) {}

  Eigen::MatrixXd extrapolate(const Eigen::MatrixXd& f, const Eigen::MatrixXd& err) {
    focks_.push_back(f);
    errors_.push_back(err);
    if (focks_.size() > size_) {
      focks_.pop_front();
      errors_.pop_front();
    }
    const auto m = static_cast<Eigen::Index>(focks_.size());
    if (m < 2) return f;
    Eigen::MatrixXd b = Eigen::MatrixXd::Constant(m + 1, m + 1, -1.0);
    b(m, m) = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) b(i, j) = (errors_[i].array() * errors_[j].array()).sum();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
    rhs(m) = -1.0;
    const Eigen::VectorXd w = b.fullPivLu().solve(rhs);
    if (!w.allFinite()) return f;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(f.rows(), f.cols());
    for (Eigen::Index i = 0; i < m; ++i) out += w(i) * focks_[i];
    return out;
  }

 private:
  std::size_t size_;
  std::deque<Eigen::MatrixXd> focks_;
  std::deque<Eigen::MatrixXd> errors_;
};

}  // namespace detail

/// Closed-shell restricted Hartree-Fock from a core-Hamiltonian guess with Loewdin
/// orthogonalization and DIIS. Non-convergence is reported through `converged`.
inline ScfResult run_rhf(const Molecule& mol, const AOIntegrals& ints, const ScfOptions& opt = {}) {
  const Eigen::Index n = static_cast<Eigen::Index>(ints.n_basis());
  const int nocc = mol.n_electrons() / 2;
  if (nocc > n)
    throw InputError(fmt::format("{} electrons do not fit into {} orbitals", mol.n_electrons(), n));

  const Eigen::MatrixXd& s = ints.overlap;
  const Eigen::MatrixXd h = ints.core_hamiltonian();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ses(s);
  if (ses.eigenvalues()(0) <= 0.0) throw InputError("overlap matrix is not positive definite");
  const Eigen::MatrixXd x =
      ses.eigenvectors() * ses.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
      ses.eigenvectors().transpose();

  auto diagonalize = [&](const Eigen::MatrixXd& f, Eigen::MatrixXd& c, Eigen::VectorXd& e) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x.transpose() * f * x);
    c = x * es.eigenvectors();
    e = es.eigenvalues();
  };
  auto density_of = [&](const Eigen::MatrixXd& c) -> Eigen::MatrixXd {
    const auto occ = c.leftCols(nocc);
    return 2.0 * occ * occ.transpose();
  };

  ScfResult r;
  r.n_occupied = nocc;
  const double enuc = nuclear_repulsion(mol);

  Eigen::MatrixXd c;
  Eigen::VectorXd eps;
  diagonalize(h, c, eps);
  Eigen::MatrixXd p = density_of(c);
  double e_old = 0.0;
  double drms = 1.0;
  detail::Diis diis(opt.diis_size);

  for (int it = 1; it <= opt.max_iterations; ++it) {
    const Eigen::MatrixXd f = h + detail::two_electron_fock(p, ints.eri);
    const double e_elec = 0.5 * (p.array() * (h + f).array()).sum();
    const Eigen::MatrixXd err = x.transpose() * (f * p * s - s * p * f) * x;

    // DIIS can reproduce the previous density exactly without being self-consistent, so the
    // orbital gradient is checked as well.
    const double de = std::abs(e_elec - e_old);
    if (it > 1 && de < opt.energy_tolerance && drms < opt.density_tolerance &&
        err.cwiseAbs().maxCoeff() < opt.commutator_tolerance) {
      r.converged = true;
      break;
    }

    const Eigen::MatrixXd f_use = it > opt.diis_start ? diis.extrapolate(f, err) : f;
    diagonalize(f_use, c, eps);
    const Eigen::MatrixXd p_new = density_of(c);
    drms = std::sqrt((p_new - p).squaredNorm() / static_cast<double>(n * n));
    p = p_new;
    e_old = e_elec;
    r.iterations = it;
  }

  // Canonical orbitals of the final density.
  const Eigen::MatrixXd f = h + detail::two_electron_fock(p, ints.eri);
  diagonalize(f, c, eps);
  fix_mo_phases(c);
  r.mo_coefficients = c;
  r.orbital_energies = eps;
  r.density = density_of(c);
  r.hf_energy = 0.5 * (r.density.array() * (h + h + detail::two_electron_fock(r.density, ints.eri)).array()).sum() + enuc;
  return r;
}

/// Full-space integrals in the MO basis.
struct MOIntegrals {
  Eigen::MatrixXd one_body;  // h_pq
  Tensor4 two_body;          // physicist <pq|rs> = (pr|qs)
};

/// Chemist (pq|rs) in the MO basis by four successive quarter transforms.
inline Tensor4 transform_eri(const Tensor4& ao, const Eigen::MatrixXd& c) {
  const std::size_t n = ao.dim();
  const std::size_t m = static_cast<std::size_t>(c.cols());
  Tensor4 t1(std::max(n, m)), t2(std::max(n, m));
  // t1(p,j,k,l) = sum_i C_ip ao(i,j,k,l), and so on for each index.
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += c(i, p) * ao(i, j, k, l);
          t1(p, j, k, l) = s;
        }
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t q = 0; q < m; ++q)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += c(j, q) * t1(p, j, k, l);
          t2(p, q, k, l) = s;
        }
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t q = 0; q < m; ++q)
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t l = 0; l < n; ++l) {
          double s = 0.0;
          for (std::size_t k = 0; k < n; ++k) s += c(k, r) * t2(p, q, k, l);
          t1(p, q, r, l) = s;
        }
  Tensor4 out(m);
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t q = 0; q < m; ++q)
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t s_ = 0; s_ < m; ++s_) {
          double s = 0.0;
          for (std::size_t l = 0; l < n; ++l) s += c(l, s_) * t1(p, q, r, l);
          out(p, q, r, s_) = s;
        }
  return out;
}

inline MOIntegrals mo_transform(const ScfResult& scf, const AOIntegrals& ints) {
  if (!scf.converged) throw ScfConvergenceError("refusing to transform integrals of an unconverged SCF");
  const Eigen::MatrixXd& c = scf.mo_coefficients;
  MOIntegrals mo;
  mo.one_body = c.transpose() * ints.core_hamiltonian() * c;
  const Tensor4 chem = transform_eri(ints.eri, c);
  const std::size_t m = chem.dim();
  mo.two_body = Tensor4(m);
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t q = 0; q < m; ++q)
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t s = 0; s < m; ++s) mo.two_body(p, q, r, s) = chem(p, r, q, s);
  return mo;
}

struct ActiveSpaceIntegrals {
  Eigen::MatrixXd one_body;  // effective h_pq over active spatial MOs
  Tensor4 two_body;          // physicist <pq|rs> over active spatial MOs
  double core_energy = 0.0;  // nuclear repulsion + frozen-core energy
  int n_active_electrons = 0;
  int n_active_orbitals = 0;
};

/// Fold the lowest `molecule.n_core_orbitals()` doubly occupied MOs into a constant and an
/// effective one-body operator over the remaining orbitals.
inline ActiveSpaceIntegrals freeze_core(const Molecule& mol, const MOIntegrals& mo, const ScfResult& scf) {
  if (!scf.converged) throw ScfConvergenceError("refusing to build an active space from an unconverged SCF");
  const int ncore = mol.n_core_orbitals();
  if (ncore > scf.n_occupied)
    throw InputError(fmt::format("{} core orbitals requested but only {} are occupied", ncore,
                                 scf.n_occupied));
  const int n = static_cast<int>(mo.one_body.rows());
  const int m = n - ncore;
  const auto& g = mo.two_body;

  ActiveSpaceIntegrals a;
  a.n_active_orbitals = m;
  a.n_active_electrons = mol.n_electrons() - 2 * ncore;
  a.core_energy = nuclear_repulsion(mol);
  for (int c = 0; c < ncore; ++c) {
    a.core_energy += 2.0 * mo.one_body(c, c);
    for (int d = 0; d < ncore; ++d) a.core_energy += 2.0 * g(c, d, c, d) - g(c, d, d, c);
  }
  a.one_body.resize(m, m);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      double v = mo.one_body(p + ncore, q + ncore);
      for (int c = 0; c < ncore; ++c)
        v += 2.0 * g(p + ncore, c, q + ncore, c) - g(p + ncore, c, c, q + ncore);
      a.one_body(p, q) = v;
    }
  a.two_body = Tensor4(static_cast<std::size_t>(m));
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s) a.two_body(p, q, r, s) = g(p + ncore, q + ncore, r + ncore, s + ncore);
  return a;
}

/// Carries orbitals from a reference geometry to a nearby one. `metric` is the AO overlap used
/// to compare reference and target coefficient vectors. Within each block (core, remaining occupied, virtual)
/// the target orbitals are replaced by the rotation of that block closest to the reference
/// orbitals (orthogonal Procrustes). This fixes order and sign, follows degenerate and mixing
/// orbitals continuously and leaves the occupied space, and so the HF determinant, unchanged.
/// Orbital energies become the diagonal Fock elements. Returns the smallest diagonal overlap.
inline double align_orbitals(ScfResult& target, const Eigen::MatrixXd& metric,
                             const ScfResult& reference, int n_core = 0) {
  const Eigen::Index n = target.mo_coefficients.cols();
  const Eigen::Index nocc = target.n_occupied;
  if (n_core < 0 || n_core > nocc) throw InputError("core block larger than the occupied space");
  Eigen::MatrixXd& c = target.mo_coefficients;
  Eigen::VectorXd& eps = target.orbital_energies;
  const Eigen::MatrixXd& cref = reference.mo_coefficients;

  for (auto [lo, hi] : {std::pair<Eigen::Index, Eigen::Index>{0, n_core}, {n_core, nocc}, {nocc, n}}) {
    const Eigen::Index k = hi - lo;
    if (k == 0) continue;
    const Eigen::MatrixXd ok = cref.middleCols(lo, k).transpose() * metric * c.middleCols(lo, k);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ok, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXd q = svd.matrixV() * svd.matrixU().transpose();
    c.middleCols(lo, k) = c.middleCols(lo, k) * q;
    const Eigen::VectorXd ek = eps.segment(lo, k);
    for (Eigen::Index a = 0; a < k; ++a) eps(lo + a) = q.col(a).cwiseAbs2().dot(ek);
  }
  return (cref.transpose() * metric * c).diagonal().minCoeff();
}

}  // namespace geomvqe
