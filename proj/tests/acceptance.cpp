// Acceptance run: one PASS/FAIL line per criterion, indented detail lines before it.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>

#include <fmt/format.h>

#include "common.hpp"
#include "integral_oracle.hpp"
#include "ladder_oracle.hpp"

namespace fs = std::filesystem;
using namespace geomvqe;

namespace {

int failures = 0;

void detail(const std::string& s) { fmt::print("    {}\n", s); }

void verdict(int id, std::string_view title, bool ok) {
  fmt::print("criterion {} {}: {}\n", id, ok ? "PASS" : "FAIL", title);
  std::fflush(stdout);
  if (!ok) ++failures;
}

struct Target {
  const char* file;
  const char* name;
  double d, d_tol;
  std::optional<double> phi;
  double phi_tol;
  std::optional<double> phi_fci;  // when the exact reference differs from the circuit one
};

const Target kTargets[] = {
    {"h2.inp", "H2", 0.735, 0.001, std::nullopt, 0.0, std::nullopt},
    {"h3plus.inp", "H3+", 0.986, 0.001, 60.0, 0.1, std::nullopt},
    {"beh2.inp", "BeH2", 1.316, 0.002, 180.0, 0.1, std::nullopt},
    {"h2o.inp", "H2O", 1.028, 0.002, 96.77, 0.15, 96.74},
};

struct Run {
  Molecule mol;
  AdaptiveReport adaptive;
  Trajectory vqe;
  Trajectory fci;
  double seconds_vqe = 0, seconds_fci = 0;
};

std::string params_text(const GeometryParams& g) {
  return g.bond_angle ? fmt::format("d {:.6f} A, angle {:.4f} deg", g.bond_length, *g.bond_angle)
                      : fmt::format("d {:.6f} A", g.bond_length);
}

bool params_ok(const GeometryParams& g, const Target& t, bool fci) {
  bool ok = std::abs(g.bond_length - t.d) <= t.d_tol;
  if (t.phi) {
    const double want = fci && t.phi_fci ? *t.phi_fci : *t.phi;
    ok = ok && g.bond_angle && std::abs(*g.bond_angle - want) <= t.phi_tol;
  }
  return ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool monotonic(const Trajectory& t) {
  for (std::size_t i = 1; i < t.records.size(); ++i)
    if (t.records[i].energy > t.records[i - 1].energy + 1e-12) return false;
  return true;
}

double side_spread(const Molecule& m) {
  const double a = (m.position(0) - m.position(1)).norm(), b = (m.position(1) - m.position(2)).norm(),
               c = (m.position(0) - m.position(2)).norm();
  return bohr_to_angstrom(std::max({a, b, c}) - std::min({a, b, c}));
}

std::vector<Run> run_all() {
  std::vector<Run> runs;
  for (const auto& t : kTargets) {
    Run r{testing::load_input(t.file), {}, {}, {}};
    const auto x0 = r.mol.coordinates();
    auto t0 = std::chrono::steady_clock::now();
    r.adaptive = adaptive_build_report(r.mol, x0);
    r.vqe = joint_optimize(r.mol, x0, r.adaptive.circuit);
    r.seconds_vqe = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    r.fci = fci_geometry_optimize(r.mol, x0);
    r.seconds_fci = seconds_since(t0);
    runs.push_back(std::move(r));
  }
  return runs;
}

void criterion1(const std::vector<Run>& runs) {
  bool ok = true;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& t = kTargets[k];
    const auto& r = runs[k];
    const auto start = geometry_params(r.mol);
    double offset = std::abs(start.bond_length - t.d) / t.d;
    if (t.phi) offset = std::max(offset, std::abs(*start.bond_angle - *t.phi) / *t.phi);
    bool m_ok = offset >= 0.03 && r.vqe.converged() && r.vqe.final_record().max_grad_x <= 1e-5 &&
                params_ok(*r.vqe.final_geometry, t, false);
    std::string extra;
    if (r.mol.n_atoms() == 3 && t.phi && *t.phi == 60.0) {
      const double spread = side_spread(r.mol.with_coordinates(r.vqe.final_record().x));
      m_ok = m_ok && spread < 1e-4;
      extra = fmt::format(", side spread {:.1e} A", spread);
    }
    detail(fmt::format("{}: start offset {:.1f}%, {} after {} iterations ({}), max|grad x| {:.2e}, {}{}, "
                       "energy {}monotonic, {:.0f} s",
                       t.name, 100 * offset, params_text(*r.vqe.final_geometry), r.vqe.records.size(),
                       stop_reason_name(r.vqe.stop), r.vqe.final_record().max_grad_x, m_ok ? "ok" : "OUT OF RANGE",
                       extra, monotonic(r.vqe) ? "" : "not ", r.seconds_vqe));
    ok = ok && m_ok;
  }
  verdict(1, "circuit geometry optimization reproduces the reference geometries", ok);
}

void criterion2(const std::vector<Run>& runs) {
  bool ok = true;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& t = kTargets[k];
    const auto& r = runs[k];
    const bool geo_ok = r.fci.converged() && r.fci.final_record().max_grad_x <= 1e-5 && params_ok(*r.fci.final_geometry, t, true);
    const auto& fin = r.vqe.final_record();
    const double gap = fin.energy - fci_energy(r.mol, fin.x);
    const bool e_ok = std::abs(gap) <= kChemicalAccuracy;
    detail(fmt::format("{}: exact-state optimization {} after {} iterations ({}, {:.0f} s) {}; "
                       "E_circuit - E_exact at the circuit geometry {:.3e} Ha {}",
                       t.name, params_text(*r.fci.final_geometry), r.fci.records.size(), stop_reason_name(r.fci.stop),
                       r.seconds_fci, geo_ok ? "ok" : "OUT OF RANGE", gap, e_ok ? "ok" : "TOO LARGE"));
    ok = ok && geo_ok && e_ok;
  }
  verdict(2, "exact-state cross-validation", ok);
}

void criterion3(const std::vector<Run>& runs) {
  const auto h3 = generate_excitations(2, 6);
  const auto be = generate_excitations(4, 12);
  const auto wa = generate_excitations(8, 12);
  bool ok = h3.singles.size() == 4 && h3.doubles.size() == 4 && be.singles.size() + be.doubles.size() == 92 &&
            wa.singles.size() + wa.doubles.size() == 92;
  detail(fmt::format("pools: H3+ {} singles + {} doubles, BeH2 {} + {} = {}, H2O {} + {} = {}", h3.singles.size(),
                     h3.doubles.size(), be.singles.size(), be.doubles.size(), be.singles.size() + be.doubles.size(),
                     wa.singles.size(), wa.doubles.size(), wa.singles.size() + wa.doubles.size()));

  const auto& h2 = runs[0].adaptive.circuit.gates;
  const auto& h3p = runs[1].adaptive.circuit.gates;
  ok = ok && h2.size() == 1 && h2[0].qubits == std::vector<int>{0, 1, 2, 3};
  ok = ok && h3p.size() == 2 && h3p[0].qubits == std::vector<int>{0, 1, 2, 3} &&
       h3p[1].qubits == std::vector<int>{0, 1, 4, 5};
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& a = runs[k].adaptive;
    std::string gates;
    if (a.n_selected() <= 2)
      for (const auto& g : a.circuit.gates) gates += " " + gate_line(g, 0.0).substr(0, gate_line(g, 0.0).find(" theta"));
    detail(fmt::format("{}: {} of {} excitations selected ({} doubles, {} singles){}", kTargets[k].name,
                       a.n_selected(), a.n_total(), a.selected_doubles.size(), a.selected_singles.size(), gates));
  }
  const auto n_be = static_cast<long>(runs[2].adaptive.n_selected());
  const auto n_wa = static_cast<long>(runs[3].adaptive.n_selected());
  ok = ok && std::abs(n_be - 18) <= 2 && std::abs(n_wa - 30) <= 2;
  verdict(3, "excitation pools and adaptive gate selection", ok);
}

void criterion4(const std::vector<Run>& runs) {
  const Run& r = runs[1];
  const TrajectoryRecord* rec = nullptr;
  for (const auto& x : r.vqe.records)
    if (x.iteration == 4) rec = &x;
  bool ok = rec != nullptr;
  if (rec) {
    const double gap = std::abs(rec->energy - fci_energy(r.mol, rec->x));
    const double dd = std::abs(geometry_params(r.mol.with_coordinates(rec->x)).bond_length - r.vqe.final_geometry->bond_length);
    ok = gap <= kChemicalAccuracy && dd > 0.001;
    detail(fmt::format("H3+ iteration 4: |E - E_exact| {:.3e} Ha, bond length {:.4f} A from its final value", gap, dd));
  }
  verdict(4, "H3+ energy converges before the geometry", ok);
}

std::vector<double> random_angles(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::vector<double> t(n);
  for (auto& v : t) v = ang(rng);
  return t;
}

void criterion5(const std::vector<Run>& runs) {
  std::vector<ElectronicStructure> es;
  for (const auto& r : runs) es.push_back(electronic_structure(r.mol, r.mol.coordinates()));

  std::mt19937_64 rng(2718);
  double worst_rel = 0;
  for (int draw = 0; draw < 50; ++draw) {
    const std::size_t k = draw % runs.size();
    const Circuit& c = runs[k].adaptive.circuit;
    const CompiledObservable obs(qubit_hamiltonian(es[k]));
    const auto t = random_angles(c.n_parameters(), rng);
    const auto g = grad_theta(c, t, obs);
    std::vector<double> fd(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      auto tp = t, tm = t;
      tp[i] += 1e-4;
      tm[i] -= 1e-4;
      fd[i] = (obs.expectation(run_circuit(c, tp)) - obs.expectation(run_circuit(c, tm))) / 2e-4;
    }
    double diff = 0;
    for (std::size_t i = 0; i < t.size(); ++i) diff = std::max(diff, std::abs(g[i] - fd[i]));
    worst_rel = std::max(worst_rel, diff / max_abs(fd));
  }
  detail(fmt::format("shift rule vs central difference, 50 draws: worst relative deviation {:.2e}", worst_rel));

  double worst_sum = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto t = random_angles(runs[k].adaptive.circuit.n_parameters(), rng);
    const auto g = nuclear_gradient(es[k], run_circuit(runs[k].adaptive.circuit, t), 0.01);
    for (int axis = 0; axis < 3; ++axis) {
      double s = 0;
      for (std::size_t a = 0; a < runs[k].mol.n_atoms(); ++a) s += g[3 * a + axis];
      worst_sum = std::max(worst_sum, std::abs(s));
    }
  }
  detail(fmt::format("per-axis sums of nuclear gradients at random circuit states: worst {:.2e} Ha/Bohr", worst_sum));

  bool ratios_ok = true;
  for (std::size_t k : {std::size_t{0}, std::size_t{3}}) {
    const auto gs = ground_state(qubit_hamiltonian(es[k]), es[k].active.n_active_electrons);
    auto at = [&](double d) { return expectation(gs.state, hamiltonian_derivative(es[k], 5, d)); };
    const double g1 = at(0.02), g2 = at(0.01), g3 = at(0.005);
    const double ratio = (g1 - g2) / (g2 - g3);
    ratios_ok = ratios_ok && ratio >= 2.5 && ratio <= 6.0;
    detail(fmt::format("{}: displacement halving 0.02/0.01/0.005 Bohr, difference ratio {:.3f}", kTargets[k].name, ratio));
  }
  verdict(5, "gradient correctness", worst_rel <= 1e-6 && worst_sum <= 1e-3 && ratios_ok);
}

void criterion6(const std::vector<Run>& runs) {
  double exhaustive = 0;
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) {
      exhaustive = std::max(exhaustive, testing::jw_defect(testing::hermitian(0.7, {cdag(p), c(q)}), 4));
      for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s)
          exhaustive = std::max(exhaustive, testing::jw_defect(testing::hermitian(-1.3, {cdag(p), cdag(q), c(r), c(s)}), 4));
    }
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> mode(0, 5);
  std::normal_distribution<double> gauss;
  double random = 0;
  for (int trial = 0; trial < 10; ++trial) {
    FermionOperator f;
    for (int k = 0; k < 12; ++k) {
      const double c1 = gauss(rng), c2 = gauss(rng);
      const auto one = testing::hermitian(c1, {cdag(mode(rng)), c(mode(rng))});
      const auto two = testing::hermitian(c2, {cdag(mode(rng)), cdag(mode(rng)), c(mode(rng)), c(mode(rng))});
      f.terms.insert(f.terms.end(), one.terms.begin(), one.terms.end());
      f.terms.insert(f.terms.end(), two.terms.begin(), two.terms.end());
    }
    random = std::max(random, testing::jw_defect(f, 6));
  }
  detail(fmt::format("mapped vs dense ladder matrices: all terms at 4 modes {:.1e}, random operators at 6 modes {:.1e}",
                     exhaustive, random));
  bool ok = exhaustive <= 1e-10 && random <= 1e-10;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto es = electronic_structure(runs[k].mol, runs[k].mol.coordinates());
    const PauliSum h = qubit_hamiltonian(es);
    const double comm = testing::commutator_norm(h, testing::number_operator(h.n_qubits()));
    const auto hf = Statevector::basis(std::span<const int>(hf_occupations(es.active.n_active_electrons, h.n_qubits())));
    const double dhf = std::abs(expectation(hf, h) - es.scf.hf_energy);
    detail(fmt::format("{}: [H, N] {:.1e}, <HF|H|HF> - E_HF {:.1e} Ha", kTargets[k].name, comm, dhf));
    ok = ok && comm <= 1e-10 && dhf <= 1e-8;
  }
  verdict(6, "fermion-to-qubit mapping correctness", ok);
}

void criterion7() {
  const Molecule h2 = testing::h2_at(0.735);
  const double e_hf = electronic_structure(h2, h2.coordinates()).scf.hf_energy;
  const double ref = -1.116998999056;  // pyscf RHF/STO-3G, tight convergence
  detail(fmt::format("H2 HF energy at 0.735 A: {:.12f} Ha, reference {:.12f}, deviation {:.1e}", e_hf, ref, std::abs(e_hf - ref)));

  const auto b = testing::toy_basis();
  const Vec3 centre(0.2, 0.9, -0.6);
  double one = 0;
  for (const auto& f : b)
    for (const auto& g : b) {
      one = std::max(one, std::abs(overlap(f, g) - testing::oracle_overlap(f, g)));
      one = std::max(one, std::abs(kinetic(f, g) - testing::oracle_kinetic(f, g)));
      one = std::max(one, std::abs(nuclear_attraction(f, g, centre, 3.0) - testing::oracle_nuclear(f, g, centre, 3.0)));
    }
  double two = 0;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j <= i; j += 2)
      for (std::size_t k = 0; k < b.size(); k += 3)
        for (std::size_t l = 0; l <= k; ++l)
          two = std::max(two, std::abs(electron_repulsion(b[i], b[j], b[k], b[l]) - testing::oracle_eri(b[i], b[j], b[k], b[l])));
  detail(fmt::format("toy basis vs quadrature: one-electron {:.1e}, two-electron {:.1e}", one, two));

  const Molecule w = testing::load_input("h2o.inp");
  const AOIntegrals ao = compute_ao_integrals(w, std::span<const BasisShell>(molecule_shells(w)));
  const std::size_t n = ao.n_basis();
  double sym = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          for (double u : {ao.eri(j, i, k, l), ao.eri(i, j, l, k), ao.eri(j, i, l, k), ao.eri(k, l, i, j),
                           ao.eri(l, k, i, j), ao.eri(k, l, j, i), ao.eri(l, k, j, i)})
            sym = std::max(sym, std::abs(u - ao.eri(i, j, k, l)));
  detail(fmt::format("water electron repulsion 8-fold symmetry: {:.1e}", sym));
  verdict(7, "integral and SCF anchors", std::abs(e_hf - ref) <= 1e-6 && one <= 1e-8 && two <= 1e-8 && sym <= 1e-12);
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[e.path().filename().string()] = ss.str();
  }
  return out;
}

void criterion8() {
  const fs::path root = fs::current_path() / "acceptance_runs";
  fs::remove_all(root);
  fs::create_directories(root);
  bool ok = true;
  for (const char* file : {"h2.inp", "h3plus.inp"}) {
    std::map<std::string, std::string> first;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = root / fmt::format("{}_{}", file, rep);
      // the second run spreads the gradients over three threads
      const std::string cmd = fmt::format("\"{}\" --out \"{}\" --dump-hamiltonian --dump-integrals{} optimize --with-fci \"{}/{}\" > \"{}.log\" 2>&1",
                                          GEOMVQE_CLI, out.string(), rep ? " --threads 3" : "", GEOMVQE_INPUT_DIR, file, out.string());
      const int rc = std::system(cmd.c_str());
      auto files = read_dir(out);
      if (rc != 0) ok = false;
      if (rep == 0) {
        first = std::move(files);
        continue;
      }
      std::size_t same = 0;
      for (const auto& [name, text] : first) {
        auto it = files.find(name);
        if (it != files.end() && it->second == text) ++same;
      }
      const bool eq = files.size() == first.size() && same == first.size() && first.size() >= 6;
      detail(fmt::format("{}: {} of {} output files identical across two runs (exit {})", file, same, first.size(), rc));
      ok = ok && eq;
    }
  }
  verdict(8, "repeated optimize runs are byte-identical", ok);
}

}  // namespace

// Optional arguments pick criteria by number; the default runs all eight.
int main(int argc, char** argv) {
  std::set<int> want;
  for (int i = 1; i < argc; ++i) want.insert(std::atoi(argv[i]));
  if (want.empty()) want = {1, 2, 3, 4, 5, 6, 7, 8};
  auto on = [&](int k) { return want.count(k) > 0; };

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Run> runs;
  if (std::any_of(want.begin(), want.end(), [](int k) { return k <= 6; })) runs = run_all();
  if (on(1)) criterion1(runs);
  if (on(2)) criterion2(runs);
  if (on(3)) criterion3(runs);
  if (on(4)) criterion4(runs);
  if (on(5)) criterion5(runs);
  if (on(6)) criterion6(runs);
  if (on(7)) criterion7();
  if (on(8)) criterion8();
  fmt::print("{} of {} criteria failed, {:.0f} s\n", failures, want.size(), seconds_since(t0));
  return failures;
}
