#pragma once

// Exact diagonalization reference: sector-projected ground states and FCI-level geometry
// optimization.

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "error.hpp"
#include "hamiltonian.hpp"
#include "optimizer.hpp"
#include "pauli.hpp"
#include "statevector.hpp"

namespace geomvqe {

/// Basis states with fixed particle number and Sz, sorted by bitstring.
/// Spin-orbital 2p is alpha and 2p+1 is beta.
struct SectorBasis {
  int n_qubits = 0;
  std::vector<std::size_t> states;  // statevector indices

  std::size_t dim() const { return states.size(); }

  static SectorBasis build(int n_qubits, int n_electrons, int twice_sz = 0) {
    SectorBasis b;
    b.n_qubits = n_qubits;
    const std::size_t full = std::size_t{1} << n_qubits;
    for (std::size_t i = 0; i < full; ++i) {
      if (std::popcount(i) != n_electrons) continue;
      int n_alpha = 0;
      for (int q = 0; q < n_qubits; q += 2)
        if (i & (std::size_t{1} << (n_qubits - 1 - q))) ++n_alpha;
      if (2 * n_alpha - n_electrons != twice_sz) continue;
      b.states.push_back(i);
    }
    return b;
  }
};

/// Dense Hermitian matrix of a Pauli sum (qubit 0 most significant).
inline Eigen::MatrixXcd dense_matrix(const PauliSum& h, int max_qubits = 10) {
  const int n = h.n_qubits();
  if (n > max_qubits)
    throw InputError(fmt::format("dense matrix limited to {} qubits, got {}", max_qubits, n));
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& [p, coef] : h.terms()) {
    const std::size_t sx = detail::to_state_mask(p.x, n);
    const std::size_t sz = detail::to_state_mask(p.z, n);
    const cplx c = coef * detail::output_phase(p);
    for (std::size_t i = 0; i < dim; ++i) {
      const std::size_t j = i ^ sx;
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) +=
          (std::popcount(j & sz) & 1) ? -c : c;
    }
  }
  return m;
}

/// Real symmetric projection of H onto a sector; throws if H leaks an imaginary part.
inline Eigen::MatrixXd sector_matrix(const PauliSum& h, const SectorBasis& basis) {
  const int n = h.n_qubits();
  if (n != basis.n_qubits) throw InputError("sector and observable disagree on the qubit count");
  std::vector<int> pos(std::size_t{1} << n, -1);
  for (std::size_t k = 0; k < basis.dim(); ++k) pos[basis.states[k]] = static_cast<int>(k);
  const auto d = static_cast<Eigen::Index>(basis.dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& [p, coef] : h.terms()) {
    const std::size_t sx = detail::to_state_mask(p.x, n);
    const std::size_t sz = detail::to_state_mask(p.z, n);
    const cplx c = coef * detail::output_phase(p);
    for (std::size_t k = 0; k < basis.dim(); ++k) {
      const std::size_t j = basis.states[k] ^ sx;
      if (pos[j] < 0) continue;
      m(pos[j], static_cast<Eigen::Index>(k)) += (std::popcount(j & sz) & 1) ? -c : c;
    }
  }
  if (m.imag().cwiseAbs().maxCoeff() > 1e-10)
    throw InternalError("sector Hamiltonian has an imaginary part");
  return m.real();
}

struct GroundState {
  double energy = 0.0;
  Statevector state;
};

namespace detail {
inline void fix_global_phase(Statevector& s) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.dim(); ++i)
    if (std::abs(s[i]) > std::abs(s[best]) + 1e-12) best = i;
  const cplx ph = std::abs(s[best]) > 0 ? std::conj(s[best]) / std::abs(s[best]) : cplx(1.0);
  for (auto& a : s.amplitudes()) a *= ph;
}
}  // namespace detail

/// Lowest eigenpair of H within the (n_electrons, Sz = 0) sector, embedded in the full space.
inline GroundState ground_state(const PauliSum& h, int n_electrons) {
  if (h.n_qubits() > 14) throw InputError("exact diagonalization limited to 14 qubits");
  const SectorBasis basis = SectorBasis::build(h.n_qubits(), n_electrons, 0);
  if (basis.dim() == 0) throw InputError("empty particle-number/spin sector");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sector_matrix(h, basis));
  GroundState g{es.eigenvalues()(0), Statevector(h.n_qubits())};
  for (std::size_t k = 0; k < basis.dim(); ++k)
    g.state[basis.states[k]] = es.eigenvectors()(static_cast<Eigen::Index>(k), 0);
  detail::fix_global_phase(g.state);
  return g;
}

/// Lowest eigenpair of H over the whole Hilbert space (no symmetry restriction).
inline GroundState ground_state_full_space(const PauliSum& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_matrix(h));
  GroundState g{es.eigenvalues()(0), Statevector(h.n_qubits())};
  for (std::size_t i = 0; i < g.state.dim(); ++i) g.state[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), 0);
  detail::fix_global_phase(g.state);
  return g;
}

/// Ground-state energy of the molecule at x in its active space.
inline double fci_energy(const Molecule& mol, std::span<const double> x) {
  const auto es = electronic_structure(mol, x);
  return ground_state(qubit_hamiltonian(es), es.active.n_active_electrons).energy;
}

/// Nuclear gradient <psi| dH/dx_i |psi> for every coordinate, derivative observables built
/// around `es`.
inline std::vector<double> nuclear_gradient(const ElectronicStructure& es, const Statevector& psi,
                                            double fd_delta, int threads = 1) {
  std::vector<double> g(es.molecule.n_coordinates());
  parallel_for(g.size(), threads, [&](std::size_t i) {
    g[i] = expectation(psi, hamiltonian_derivative(es, i, fd_delta));
  });
  return g;
}

/// Gradient descent on the nuclear coordinates with the exact sector ground state in place of
/// the circuit state.
inline Trajectory fci_geometry_optimize(const Molecule& mol, std::span<const double> x0,
                                        const OptimizerConfig& config = {}) {
  config.validate();
  Trajectory traj;
  std::vector<double> x(x0.begin(), x0.end());
  std::optional<ElectronicStructure> prev;
  try {
    for (int it = 0;; ++it) {
      auto es = electronic_structure(mol, x, prev ? &*prev : nullptr);
      const auto h = qubit_hamiltonian(es);
      const auto gs = ground_state(h, es.active.n_active_electrons);
      const auto gx = nuclear_gradient(es, gs.state, config.fd_delta, config.threads);
      traj.records.push_back({it, gs.energy, {}, x, max_abs(gx), 0.0});
      if (traj.records.back().max_grad_x <= config.grad_tolerance_x) {
        traj.stop = StopReason::converged;
        break;
      }
      if (it + 1 >= config.max_iterations) {
        traj.stop = StopReason::max_iterations;
        break;
      }
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= config.step_x * gx[i];
      prev = std::move(es);
    }
  } catch (const ScfConvergenceError& e) {
    traj.stop = StopReason::scf_failure;
    traj.message = e.what();
  } catch (const OrbitalMatchError& e) {
    traj.stop = StopReason::scf_failure;
    traj.message = e.what();
  }
  if (!traj.records.empty() && mol.n_atoms() <= 3)
    traj.final_geometry = geometry_params(mol.with_coordinates(traj.records.back().x));
  return traj;
}

}  // namespace geomvqe
