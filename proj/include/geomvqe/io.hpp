#pragma once

// Text formats for run outputs: trajectory CSV, XYZ geometry, circuit listing and
// active-space integral dumps.

#include <charconv>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "error.hpp"
#include "hamiltonian.hpp"
#include "molecule.hpp"
#include "optimizer.hpp"
#include "statevector.hpp"
#include "units.hpp"

namespace geomvqe {

/// One row per iteration, 12 significant digits: iter,energy_ha,max_grad_x,max_grad_theta,x_*,theta_*.
inline std::string trajectory_csv(const Trajectory& t) {
  std::string out = "iter,energy_ha,max_grad_x,max_grad_theta";
  const std::size_t nx = t.records.empty() ? 0 : t.records.front().x.size();
  const std::size_t nt = t.records.empty() ? 0 : t.records.front().theta.size();
  for (std::size_t i = 0; i < nx; ++i) out += fmt::format(",x_{}", i);
  for (std::size_t k = 0; k < nt; ++k) out += fmt::format(",theta_{}", k);
  out += '\n';
  for (const auto& r : t.records) {
    out += fmt::format("{},{:.11e},{:.11e},{:.11e}", r.iteration, r.energy, r.max_grad_x, r.max_grad_theta);
    for (double v : r.x) out += fmt::format(",{:.11e}", v);
    for (double v : r.theta) out += fmt::format(",{:.11e}", v);
    out += '\n';
  }
  return out;
}

/// Standard XYZ, coordinates converted to Angstrom.
inline std::string to_xyz(const Molecule& mol, std::string_view comment = "") {
  std::string out = fmt::format("{}\n{}\n", mol.n_atoms(), comment);
  for (std::size_t a = 0; a < mol.n_atoms(); ++a) {
    const Vec3 r = mol.position(a) * kAngstromPerBohr;
    out += fmt::format("{:<2} {:18.10f} {:18.10f} {:18.10f}\n", mol.symbols()[a], r.x(), r.y(), r.z());
  }
  return out;
}

inline std::string gate_line(const Gate& g, double theta) {
  std::string q;
  for (std::size_t i = 0; i < g.qubits.size(); ++i) q += fmt::format("{}{}", i ? "," : "", g.qubits[i]);
  return fmt::format("{} [{}] theta={:+.9f}", g.kind == GateKind::single ? "single" : "double", q, theta);
}

/// `double [0,1,2,3] theta=+0.123456789`, one gate per line.
inline std::string circuit_text(const Circuit& c, std::span<const double> theta) {
  std::string out;
  for (const auto& g : c.gates) out += gate_line(g, g.angle_index < theta.size() ? theta[g.angle_index] : 0.0) + '\n';
  return out;
}

struct ParsedGate {
  Gate gate;
  double theta = 0.0;
};

/// Inverse of circuit_text; angle slots are assigned in line order.
inline std::vector<ParsedGate> parse_circuit_text(std::string_view text) {
  std::vector<ParsedGate> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&] { return InputError(fmt::format("circuit line {}: cannot parse '{}'", lineno, line)); };
    const auto lb = line.find('['), rb = line.find(']'), eq = line.find("theta=");
    if (lb == std::string::npos || rb == std::string::npos || eq == std::string::npos || rb < lb) throw fail();
    ParsedGate pg;
    const std::string kind = detail::trim(line.substr(0, lb));
    if (kind == "single") pg.gate.kind = GateKind::single;
    else if (kind == "double") pg.gate.kind = GateKind::double_;
    else throw fail();
    std::istringstream qs(line.substr(lb + 1, rb - lb - 1));
    for (std::string tok; std::getline(qs, tok, ',');) {
      int q = 0;
      const std::string t = detail::trim(tok);
      auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), q);
      if (ec != std::errc{} || p != t.data() + t.size()) throw fail();
      pg.gate.qubits.push_back(q);
    }
    const std::string th = detail::trim(line.substr(eq + 6));
    std::size_t used = 0;
    try {
      pg.theta = std::stod(th, &used);
    } catch (const std::exception&) {
      throw fail();
    }
    if (used != th.size()) throw fail();
    pg.gate.angle_index = out.size();
    out.push_back(pg);
  }
  return out;
}

/// Active-space integrals in MO basis: constant, then nonzero h_pq and <pq|rs>, 0-based.
inline std::string integrals_text(const ActiveSpaceIntegrals& a, double threshold = 1e-12) {
  std::string out = fmt::format("# active orbitals {}\n# active electrons {}\nconstant {:+.15e}\n",
                                a.n_active_orbitals, a.n_active_electrons, a.core_energy);
  const int n = a.n_active_orbitals;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (std::abs(a.one_body(p, q)) > threshold) out += fmt::format("h {} {} {:+.15e}\n", p, q, a.one_body(p, q));
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
          if (std::abs(a.two_body(p, q, r, s)) > threshold)
            out += fmt::format("g {} {} {} {} {:+.15e}\n", p, q, r, s, a.two_body(p, q, r, s));
  return out;
}

inline std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::scf_failure: return "scf_failure";
  }
  return "unknown";
}

}  // namespace geomvqe
