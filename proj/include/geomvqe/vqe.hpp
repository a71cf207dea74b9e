#pragma once

// Cost function, circuit and nuclear gradients, adaptive circuit construction and the joint
// (circuit + geometry) gradient-descent optimizer.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "error.hpp"
#include "fci.hpp"
#include "hamiltonian.hpp"
#include "optimizer.hpp"
#include "statevector.hpp"

namespace geomvqe {

/// Promotion of one or two electrons out of the first-N_e-filled reference.
struct Excitation {
  GateKind kind = GateKind::double_;
  std::vector<int> occupied;
  std::vector<int> virtuals;

  std::vector<int> qubits() const {
    std::vector<int> q = occupied;
    q.insert(q.end(), virtuals.begin(), virtuals.end());
    std::sort(q.begin(), q.end());
    return q;
  }

  friend bool operator==(const Excitation&, const Excitation&) = default;
};

struct ExcitationSet {
  std::vector<Excitation> singles;
  std::vector<Excitation> doubles;
};

/// All Sz-conserving singles and doubles, ordered lexicographically by (occupied, virtual).
inline ExcitationSet generate_excitations(int n_electrons, int n_spin_orbitals) {
  if (n_electrons <= 0 || n_electrons % 2 != 0 || n_electrons >= n_spin_orbitals)
    throw InputError(fmt::format("cannot excite {} electrons in {} spin-orbitals", n_electrons,
                                 n_spin_orbitals));
  auto spin = [](int p) { return p % 2; };
  ExcitationSet out;
  for (int i = 0; i < n_electrons; ++i)
    for (int a = n_electrons; a < n_spin_orbitals; ++a)
      if (spin(i) == spin(a)) out.singles.push_back({GateKind::single, {i}, {a}});
  for (int i = 0; i < n_electrons; ++i)
    for (int j = i + 1; j < n_electrons; ++j)
      for (int a = n_electrons; a < n_spin_orbitals; ++a)
        for (int b = a + 1; b < n_spin_orbitals; ++b)
          if (spin(i) + spin(j) == spin(a) + spin(b))
            out.doubles.push_back({GateKind::double_, {i, j}, {a, b}});
  return out;
}

inline std::vector<int> hf_occupations(int n_electrons, int n_qubits) {
  std::vector<int> occ(static_cast<std::size_t>(n_qubits), 0);
  std::fill(occ.begin(), occ.begin() + n_electrons, 1);
  return occ;
}

/// One gate per excitation, angle slots 0, 1, ... in order.
inline Circuit circuit_from_excitations(int n_electrons, int n_qubits, std::span<const Excitation> ex) {
  Circuit c{n_qubits, hf_occupations(n_electrons, n_qubits), {}};
  for (std::size_t k = 0; k < ex.size(); ++k) c.gates.push_back({ex[k].kind, ex[k].qubits(), k});
  return c;
}

/// g(theta, x) = <Psi(theta)| H(x) |Psi(theta)>, total energy in Hartree.
inline double cost(const Circuit& circuit, std::span<const double> theta, const Molecule& mol,
                   std::span<const double> x) {
  return expectation(run_circuit(circuit, theta), molecular_hamiltonian(mol, x));
}

namespace shift_rule {
// Generator spectrum {0, +-1} of the full-angle Givens gates gives frequencies 1 and 2.
inline const double kPlus = (std::sqrt(2.0) + 1.0) / (2.0 * std::sqrt(2.0));
inline const double kMinus = (std::sqrt(2.0) - 1.0) / (2.0 * std::sqrt(2.0));
inline constexpr double kShift1 = kPi / 4.0;
inline constexpr double kShift2 = 3.0 * kPi / 4.0;

/// d/dt of a trigonometric polynomial of degree 2 from four evaluations.
template <class G>
double derivative(G&& g, double t) {
  return kPlus * (g(t + kShift1) - g(t - kShift1)) - kMinus * (g(t + kShift2) - g(t - kShift2));
}
}  // namespace shift_rule

/// Parameter-shift gradient of <Psi(theta)|H|Psi(theta)> with respect to every angle slot.
inline std::vector<double> grad_theta(const Circuit& circuit, std::span<const double> theta,
                                      const CompiledObservable& h, int threads = 1) {
  const std::size_t n = circuit.n_parameters();
  std::vector<double> g(n, 0.0);
  parallel_for(n, threads, [&](std::size_t k) {
    std::vector<double> t(theta.begin(), theta.begin() + static_cast<long>(n));
    g[k] = shift_rule::derivative(
        [&](double v) {
          t[k] = v;
          return h.expectation(run_circuit(circuit, t));
        },
        theta[k]);
  });
  return g;
}

inline std::vector<double> grad_theta(const Circuit& circuit, std::span<const double> theta,
                                      const PauliSum& h) {
  return grad_theta(circuit, theta, CompiledObservable(h));
}

/// Nuclear gradient <Psi(theta)| dH/dx |Psi(theta)> with central-difference observables.
inline std::vector<double> grad_x(const Circuit& circuit, std::span<const double> theta,
                                  const Molecule& mol, std::span<const double> x, double fd_delta = 0.01,
                                  int threads = 1) {
  const auto es = electronic_structure(mol, x);
  return nuclear_gradient(es, run_circuit(circuit, theta), fd_delta, threads);
}

struct AdaptiveReport {
  Circuit circuit;
  std::size_t n_singles_total = 0;
  std::size_t n_doubles_total = 0;
  std::vector<Excitation> selected_doubles;
  std::vector<double> doubles_gradients;  // at theta = 0, for the selected doubles
  std::vector<Excitation> selected_singles;
  std::vector<double> singles_gradients;
  int doubles_optimization_steps = 0;
  std::vector<std::string> warnings;

  std::size_t n_total() const { return n_singles_total + n_doubles_total; }
  std::size_t n_selected() const { return circuit.gates.size(); }
};

/// Gradient-screened circuit: doubles with a non-negligible gradient on the reference,
/// optimized at fixed geometry, then the singles whose gradient in that state is
/// non-negligible. Final circuit: selected doubles then selected singles.
inline AdaptiveReport adaptive_build_report(const Molecule& mol, std::span<const double> x0,
                                            const OptimizerConfig& config = {}) {
  config.validate();
  const auto es = electronic_structure(mol, x0);
  const int ne = es.active.n_active_electrons;
  const int nq = es.n_qubits();
  const CompiledObservable h(qubit_hamiltonian(es));
  const ExcitationSet all = generate_excitations(ne, nq);

  AdaptiveReport rep;
  rep.n_singles_total = all.singles.size();
  rep.n_doubles_total = all.doubles.size();

  const Circuit all_doubles = circuit_from_excitations(ne, nq, all.doubles);
  const std::vector<double> zeros(all.doubles.size(), 0.0);
  const auto gd = grad_theta(all_doubles, zeros, h, config.threads);
  for (std::size_t k = 0; k < gd.size(); ++k) {
    if (std::abs(gd[k]) > config.adaptive_grad_threshold) {
      rep.selected_doubles.push_back(all.doubles[k]);
      rep.doubles_gradients.push_back(gd[k]);
    }
  }

  const Circuit doubles = circuit_from_excitations(ne, nq, rep.selected_doubles);
  std::vector<double> theta(rep.selected_doubles.size(), 0.0);
  for (int it = 0; it < 500 && !theta.empty(); ++it) {
    const auto g = grad_theta(doubles, theta, h, config.threads);
    if (max_abs(g) <= 1e-5) break;
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= config.step_theta * g[k];
    rep.doubles_optimization_steps = it + 1;
  }

  Circuit with_singles = doubles;
  const std::size_t nd = rep.selected_doubles.size();
  for (std::size_t k = 0; k < all.singles.size(); ++k)
    with_singles.gates.push_back({GateKind::single, all.singles[k].qubits(), nd + k});
  std::vector<double> theta_s = theta;
  theta_s.resize(nd + all.singles.size(), 0.0);
  const auto gs = grad_theta(with_singles, theta_s, h, config.threads);
  for (std::size_t k = 0; k < all.singles.size(); ++k) {
    if (std::abs(gs[nd + k]) > config.adaptive_grad_threshold) {
      rep.selected_singles.push_back(all.singles[k]);
      rep.singles_gradients.push_back(gs[nd + k]);
    }
  }

  std::vector<Excitation> chosen = rep.selected_doubles;
  chosen.insert(chosen.end(), rep.selected_singles.begin(), rep.selected_singles.end());
  rep.circuit = circuit_from_excitations(ne, nq, chosen);
  if (chosen.empty()) rep.warnings.push_back("no excitation passed the gradient threshold; circuit prepares the HF state only");
  return rep;
}

inline Circuit adaptive_build(const Molecule& mol, std::span<const double> x0, const OptimizerConfig& config = {}) {
  return adaptive_build_report(mol, x0, config).circuit;
}

/// Simultaneous gradient descent on circuit angles and nuclear coordinates. Both gradients
/// are taken at the current (theta, x) before either is updated. Orbitals at each new
/// geometry are aligned to those of the previous step so the angles keep their meaning.
inline Trajectory joint_optimize(const Molecule& mol, std::span<const double> x0, const Circuit& circuit,
                                 std::span<const double> theta0, const OptimizerConfig& config = {}) {
  config.validate();
  circuit.validate();
  Trajectory traj;
  traj.circuit = circuit;
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> theta(theta0.begin(), theta0.end());
  theta.resize(circuit.n_parameters(), 0.0);
  std::optional<ElectronicStructure> prev;
  try {
    for (int it = 0;; ++it) {
      auto es = electronic_structure(mol, x, prev ? &*prev : nullptr);
      if (es.n_qubits() != circuit.n_qubits) throw InputError("circuit and molecule disagree on the qubit count");
      const CompiledObservable h(qubit_hamiltonian(es));
      const Statevector psi = run_circuit(circuit, theta);
      const double energy = h.expectation(psi);
      const auto gt = grad_theta(circuit, theta, h, config.threads);
      const auto gx = nuclear_gradient(es, psi, config.fd_delta, config.threads);
      traj.records.push_back({it, energy, theta, x, max_abs(gx), max_abs(gt)});
      if (traj.records.back().max_grad_x <= config.grad_tolerance_x) {
        traj.stop = StopReason::converged;
        break;
      }
      if (it + 1 >= config.max_iterations) {
        traj.stop = StopReason::max_iterations;
        break;
      }
      for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= config.step_theta * gt[k];
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

inline Trajectory joint_optimize(const Molecule& mol, std::span<const double> x0, const Circuit& circuit,
                                 const OptimizerConfig& config = {}) {
  return joint_optimize(mol, x0, circuit, std::vector<double>(circuit.n_parameters(), 0.0), config);
}

}  // namespace geomvqe
