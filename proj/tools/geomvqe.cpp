#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <geomvqe/geomvqe.hpp>

namespace fs = std::filesystem;
using namespace geomvqe;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kScf = 3, kNotConverged = 4 };

struct RunConfig {
  std::string input;
  std::string out = ".";
  OptimizerConfig opt;
  bool with_fci = false;
  bool hf_preopt = false;
  bool optimize_geometry = false;
  bool dump_hamiltonian = false;
  bool dump_integrals = false;
};

Molecule read_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open input file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_molecule(ss.str());
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

std::string geometry_line(const Molecule& mol) {
  if (mol.n_atoms() > 3) return "geometry: (not summarized for more than 3 atoms)";
  const auto gp = geometry_params(mol);
  if (gp.bond_angle) return fmt::format("bond length {:.6f} Angstrom, angle {:.4f} deg", gp.bond_length, *gp.bond_angle);
  return fmt::format("bond length {:.6f} Angstrom", gp.bond_length);
}

void dump_requested(const RunConfig& rc, const Molecule& mol) {
  if (!rc.dump_hamiltonian && !rc.dump_integrals) return;
  const auto es = electronic_structure(mol, mol.coordinates());
  if (rc.dump_hamiltonian) write_file(fs::path(rc.out) / "hamiltonian.txt", to_text(qubit_hamiltonian(es)));
  if (rc.dump_integrals) write_file(fs::path(rc.out) / "integrals.txt", integrals_text(es.active));
}

int stop_code(const Trajectory& t) {
  switch (t.stop) {
    case StopReason::converged: return kOk;
    case StopReason::max_iterations: return kNotConverged;
    case StopReason::scf_failure: return kScf;
  }
  return kScf;
}

int run_hf(const RunConfig& rc) {
  const Molecule mol = read_input(rc.input);
  dump_requested(rc, mol);
  const auto es = electronic_structure(mol, mol.coordinates());
  fmt::print("converged in {} iterations\n", es.scf.iterations);
  fmt::print("nuclear repulsion  {:+.12f} Ha\n", nuclear_repulsion(mol));
  fmt::print("HF energy          {:+.12f} Ha\n", es.scf.hf_energy);
  fmt::print("occupied orbitals  {}\n", es.scf.n_occupied);
  fmt::print("orbital energies (Ha):\n");
  for (Eigen::Index i = 0; i < es.scf.orbital_energies.size(); ++i)
    fmt::print("  {:3d} {:+.10f}{}\n", i, es.scf.orbital_energies(i), i < es.scf.n_occupied ? "  occ" : "");
  for (const auto& w : es.ao.warnings) fmt::print(stderr, "warning: {}\n", w);
  return kOk;
}

int run_hamiltonian(const RunConfig& rc, bool to_stdout) {
  const Molecule mol = read_input(rc.input);
  dump_requested(rc, mol);
  const std::string text = to_text(molecular_hamiltonian(mol, mol.coordinates()));
  if (to_stdout) fmt::print("{}", text);
  else write_file(fs::path(rc.out) / "hamiltonian.txt", text);
  return kOk;
}

std::vector<double> hf_preoptimize(const Molecule& mol, const RunConfig& rc, int& code) {
  const auto es = electronic_structure(mol, mol.coordinates());
  const Circuit empty = circuit_from_excitations(es.active.n_active_electrons, es.n_qubits(), {});
  const Trajectory t = joint_optimize(mol, mol.coordinates(), empty, rc.opt);
  code = stop_code(t);
  fmt::print("HF pre-optimization: {} iterations, {}; {}\n", t.records.size(), stop_reason_name(t.stop),
             t.records.empty() ? std::string("no geometry") : geometry_line(mol.with_coordinates(t.final_record().x)));
  if (t.records.empty()) return {mol.coordinates().begin(), mol.coordinates().end()};
  return t.final_record().x;
}

void print_adaptive(const AdaptiveReport& rep) {
  fmt::print("excitations before selection: {} ({} singles, {} doubles)\n", rep.n_total(), rep.n_singles_total,
             rep.n_doubles_total);
  fmt::print("selected gates: {} ({} doubles, {} singles)\n", rep.n_selected(), rep.selected_doubles.size(),
             rep.selected_singles.size());
  fmt::print("doubles pre-optimization steps: {}\n", rep.doubles_optimization_steps);
  for (std::size_t k = 0; k < rep.circuit.gates.size(); ++k) {
    const double g = k < rep.doubles_gradients.size() ? rep.doubles_gradients[k]
                                                      : rep.singles_gradients[k - rep.doubles_gradients.size()];
    fmt::print("  {}  gradient {:+.6e}\n", gate_line(rep.circuit.gates[k], 0.0), g);
  }
  for (const auto& w : rep.warnings) fmt::print(stderr, "warning: {}\n", w);
}

int run_adaptive(const RunConfig& rc) {
  const Molecule mol = read_input(rc.input);
  dump_requested(rc, mol);
  print_adaptive(adaptive_build_report(mol, mol.coordinates(), rc.opt));
  return kOk;
}

std::string trajectory_summary(const Molecule& mol, const Trajectory& t, std::string_view title) {
  std::string s = fmt::format("{}\n", title);
  s += fmt::format("stop reason: {}\n", stop_reason_name(t.stop));
  if (!t.message.empty()) s += fmt::format("message: {}\n", t.message);
  s += fmt::format("iterations: {}\n", t.records.size());
  if (t.records.empty()) return s;
  const auto& r = t.final_record();
  s += fmt::format("final energy: {:+.10f} Ha\n", r.energy);
  s += fmt::format("max |grad x|: {:.3e} Ha/Bohr\n", r.max_grad_x);
  s += fmt::format("{}\n", geometry_line(mol.with_coordinates(r.x)));
  return s;
}

int run_optimize(const RunConfig& rc) {
  const Molecule mol = read_input(rc.input);
  dump_requested(rc, mol);
  std::vector<double> x0(mol.coordinates().begin(), mol.coordinates().end());
  if (rc.hf_preopt) {
    int code = kOk;
    x0 = hf_preoptimize(mol, rc, code);
    if (code == kScf) return code;
  }
  const auto rep = adaptive_build_report(mol, x0, rc.opt);
  print_adaptive(rep);
  const Trajectory t = joint_optimize(mol, x0, rep.circuit, rc.opt);

  std::string summary = trajectory_summary(mol, t, fmt::format("optimize {}", fs::path(rc.input).filename().string()));
  summary += fmt::format("gates: {} of {} excitations\n", rep.n_selected(), rep.n_total());
  if (!t.records.empty()) {
    const auto& r = t.final_record();
    const Molecule fin = mol.with_coordinates(r.x);
    write_file(fs::path(rc.out) / "final.xyz", to_xyz(fin, fmt::format("E = {:+.10f} Ha", r.energy)));
    write_file(fs::path(rc.out) / "circuit.txt", circuit_text(t.circuit, r.theta));
    if (rc.with_fci) {
      const double ef = fci_energy(mol, r.x);
      summary += fmt::format("FCI energy at final geometry: {:+.10f} Ha\n", ef);
      summary += fmt::format("E_VQE - E_FCI: {:+.3e} Ha ({} chemical accuracy)\n", r.energy - ef,
                             std::abs(r.energy - ef) <= kChemicalAccuracy ? "within" : "outside");
    }
  }
  write_file(fs::path(rc.out) / "trajectory.csv", trajectory_csv(t));
  write_file(fs::path(rc.out) / "summary.txt", summary);
  fmt::print("{}", summary);
  return stop_code(t);
}

int run_fci(const RunConfig& rc) {
  const Molecule mol = read_input(rc.input);
  dump_requested(rc, mol);
  if (!rc.optimize_geometry) {
    fmt::print("FCI energy: {:+.12f} Ha\n", fci_energy(mol, mol.coordinates()));
    return kOk;
  }
  const Trajectory t = fci_geometry_optimize(mol, mol.coordinates(), rc.opt);
  const std::string summary =
      trajectory_summary(mol, t, fmt::format("fci --optimize-geometry {}", fs::path(rc.input).filename().string()));
  if (!t.records.empty()) {
    const auto& r = t.final_record();
    write_file(fs::path(rc.out) / "final.xyz",
               to_xyz(mol.with_coordinates(r.x), fmt::format("E = {:+.10f} Ha", r.energy)));
  }
  write_file(fs::path(rc.out) / "trajectory.csv", trajectory_csv(t));
  write_file(fs::path(rc.out) / "summary.txt", summary);
  fmt::print("{}", summary);
  return stop_code(t);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint circuit and geometry optimization of small molecules on a statevector simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig rc;
  app.add_option("--step-theta", rc.opt.step_theta, "gradient-descent step for circuit angles (rad per Ha)")
      ->capture_default_str();
  app.add_option("--step-x", rc.opt.step_x, "gradient-descent step for coordinates (Bohr per Ha/Bohr)")
      ->capture_default_str();
  app.add_option("--tol-grad-x", rc.opt.grad_tolerance_x, "stop when max |grad x| <= this (Ha/Bohr)")
      ->capture_default_str();
  app.add_option("--max-iter", rc.opt.max_iterations, "maximum optimizer iterations")->capture_default_str();
  app.add_option("--fd-delta", rc.opt.fd_delta, "central-difference displacement (Bohr)")->capture_default_str();
  app.add_option("--adaptive-threshold", rc.opt.adaptive_grad_threshold,
                 "keep excitations with |gradient| above this (Ha)")
      ->capture_default_str();
  app.add_option("--threads", rc.opt.threads, "worker threads for gradient evaluation")->capture_default_str();
  app.add_option("--out", rc.out, "output directory")->capture_default_str();
  app.add_flag("--dump-hamiltonian", rc.dump_hamiltonian, "write hamiltonian.txt at the starting geometry");
  app.add_flag("--dump-integrals", rc.dump_integrals, "write integrals.txt (active space, MO basis)");

  auto* hf = app.add_subcommand("hf", "RHF energy and orbital energies");
  auto* ham = app.add_subcommand("hamiltonian", "qubit Hamiltonian as Pauli text");
  auto* ad = app.add_subcommand("adaptive", "gradient-screened circuit construction report");
  auto* opt = app.add_subcommand("optimize", "adaptive circuit then joint optimization");
  auto* fci = app.add_subcommand("fci", "exact ground-state energy or FCI geometry optimization");
  for (auto* s : {hf, ham, ad, opt, fci}) s->add_option("input", rc.input, "molecule input file")->required();
  opt->add_flag("--with-fci", rc.with_fci, "compare the final energy with FCI at the final geometry");
  opt->add_flag("--hf-preopt", rc.hf_preopt, "optimize the geometry at HF level before the adaptive step");
  fci->add_flag("--optimize-geometry", rc.optimize_geometry, "gradient descent with the exact ground state");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    rc.opt.validate();
    if (*hf) return run_hf(rc);
    if (*ham) return run_hamiltonian(rc, ham->count("--out") == 0 && app.count("--out") == 0);
    if (*ad) return run_adaptive(rc);
    if (*opt) return run_optimize(rc);
    if (*fci) return run_fci(rc);
  } catch (const InputError& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kInput;
  } catch (const ScfConvergenceError& e) {
    fmt::print(stderr, "SCF error: {}\n", e.what());
    return kScf;
  } catch (const OrbitalMatchError& e) {
    fmt::print(stderr, "SCF error: {}\n", e.what());
    return kScf;
  } catch (const fs::filesystem_error& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kInput;
  }
  return kUsage;
}
