#pragma once

#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "basis.hpp"
#include "error.hpp"
#include "fermion.hpp"
#include "integrals.hpp"
#include "molecule.hpp"
#include "pauli.hpp"
#include "scf.hpp"

namespace geomvqe {

/// Everything the classical pipeline produces for one geometry.
struct ElectronicStructure {
  Molecule molecule;
  std::vector<BasisFunction> basis;
  AOIntegrals ao;
  ScfResult scf;
  ActiveSpaceIntegrals active;

  int n_qubits() const { return 2 * active.n_active_orbitals; }
};

/// Minimum MO overlap accepted when following orbitals from one geometry to a nearby one.
inline constexpr double kMinOrbitalOverlap = 0.9;

/// AO integrals -> RHF -> (optional alignment to `reference` orbitals) -> MO transform ->
/// frozen core. `min_overlap`, when given, receives the smallest matched-orbital overlap.
inline ElectronicStructure electronic_structure(const Molecule& mol, std::span<const double> x,
                                               const ElectronicStructure* reference = nullptr,
                                               double* min_overlap = nullptr,
                                               const ScfOptions& scf_options = {}) {
  ElectronicStructure es;
  es.molecule = mol.with_coordinates(x);
  const auto shells = molecule_shells(es.molecule);
  es.basis = expand_shells(shells, es.molecule.coordinates());
  es.ao = compute_ao_integrals(es.molecule, std::span<const BasisFunction>(es.basis));
  es.scf = run_rhf(es.molecule, es.ao, scf_options);
  if (!es.scf.converged)
    throw ScfConvergenceError(fmt::format("SCF did not converge in {} iterations", es.scf.iterations));
  if (reference) {
    // compare coefficient vectors in the target metric: a rigid translation then changes nothing
    const double m = align_orbitals(es.scf, es.ao.overlap, reference->scf, es.molecule.n_core_orbitals());
    if (min_overlap) *min_overlap = m;
  } else if (min_overlap) {
    *min_overlap = 1.0;
  }
  es.active = freeze_core(es.molecule, mo_transform(es.scf, es.ao), es.scf);
  return es;
}

inline PauliSum qubit_hamiltonian(const ActiveSpaceIntegrals& a, double prune = PauliSum::kDefaultPrune) {
  return jordan_wigner(build_fermionic_hamiltonian(a), 2 * a.n_active_orbitals, prune);
}

inline PauliSum qubit_hamiltonian(const ElectronicStructure& es, double prune = PauliSum::kDefaultPrune) {
  return qubit_hamiltonian(es.active, prune);
}

/// H(x) as a Pauli sum whose identity coefficient carries nuclear repulsion and frozen-core
/// energy, so expectation values are total energies.
inline PauliSum molecular_hamiltonian(const Molecule& mol, std::span<const double> x) {
  return qubit_hamiltonian(electronic_structure(mol, x));
}

/// Central-difference observable dH/dx_i = (H(x + d e_i) - H(x - d e_i)) / (2d), with both
/// displaced orbital sets aligned to the orbitals of `reference` (the geometry x).
inline PauliSum hamiltonian_derivative(const ElectronicStructure& reference, std::size_t i,
                                       double delta = 0.01,
                                       double prune = PauliSum::kDefaultPrune) {
  const Molecule& mol = reference.molecule;
  if (i >= mol.n_coordinates())
    throw InputError(fmt::format("coordinate index {} out of range (have {})", i, mol.n_coordinates()));
  if (!(delta > 0.0)) throw InputError("finite-difference step must be positive");

  std::vector<double> xp(mol.coordinates().begin(), mol.coordinates().end());
  std::vector<double> xm = xp;
  xp[i] += delta;
  xm[i] -= delta;
  double op = 0.0, om = 0.0;
  const auto plus = electronic_structure(mol, xp, &reference, &op);
  const auto minus = electronic_structure(mol, xm, &reference, &om);
  if (std::min(op, om) < kMinOrbitalOverlap)
    throw OrbitalMatchError(fmt::format(
        "orbital matching failed for coordinate {} (atom {}, axis {}): overlap {:.4f}", i, i / 3,
        "xyz"[i % 3], std::min(op, om)));

  // No pruning before the difference: small terms can differ between the two sides.
  PauliSum d = qubit_hamiltonian(plus, 0.0) - qubit_hamiltonian(minus, 0.0);
  d *= 1.0 / (2.0 * delta);
  d.prune(prune);
  return d;
}

inline PauliSum hamiltonian_derivative(const Molecule& mol, std::span<const double> x, std::size_t i,
                                       double delta = 0.01) {
  if (i >= x.size())
    throw InputError(fmt::format("coordinate index {} out of range (have {})", i, x.size()));
  return hamiltonian_derivative(electronic_structure(mol, x), i, delta);
}

}  // namespace geomvqe
