#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "error.hpp"
#include "units.hpp"

namespace geomvqe {

using Vec3 = Eigen::Vector3d;

namespace detail {

struct ElementInfo {
  std::string_view symbol;
  int atomic_number;
};

inline constexpr std::array<ElementInfo, 3> kSupportedElements{{
    {"H", 1},
    {"Be", 4},
    {"O", 8},
}};

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace detail

/// Atomic number of a supported element; throws InputError otherwise.
inline int atomic_number(std::string_view symbol) {
  for (const auto& e : detail::kSupportedElements)
    if (e.symbol == symbol) return e.atomic_number;
  throw InputError(fmt::format("unsupported element '{}'", symbol));
}

/// Closed-shell molecule. Coordinates are stored flat (x0,y0,z0,x1,...) in Bohr.
class Molecule {
 public:
  Molecule() = default;

  Molecule(std::vector<std::string> symbols, std::vector<double> coordinates, int net_charge = 0,
           bool frozen_core = false)
      : symbols_(std::move(symbols)),
        coordinates_(std::move(coordinates)),
        net_charge_(net_charge),
        frozen_core_(frozen_core) {
    validate();
  }

  const std::vector<std::string>& symbols() const { return symbols_; }
  std::span<const double> coordinates() const { return coordinates_; }
  int net_charge() const { return net_charge_; }
  bool frozen_core() const { return frozen_core_; }

  std::size_t n_atoms() const { return symbols_.size(); }
  std::size_t n_coordinates() const { return coordinates_.size(); }

  Vec3 position(std::size_t atom) const {
    return {coordinates_[3 * atom], coordinates_[3 * atom + 1], coordinates_[3 * atom + 2]};
  }

  int charge_of(std::size_t atom) const { return atomic_number(symbols_[atom]); }

  int n_electrons() const {
    int z = 0;
    for (const auto& s : symbols_) z += atomic_number(s);
    return z - net_charge_;
  }

  /// Number of doubly occupied orbitals removed from the correlated space.
  int n_core_orbitals() const {
    if (!frozen_core_) return 0;
    return static_cast<int>(std::count_if(symbols_.begin(), symbols_.end(),
                                          [](const std::string& s) { return s != "H"; }));
  }

  /// Same molecule at another set of nuclear coordinates (Bohr).
  Molecule with_coordinates(std::span<const double> x) const {
    return Molecule(symbols_, std::vector<double>(x.begin(), x.end()), net_charge_, frozen_core_);
  }

 private:
  void validate() const {
    if (symbols_.empty()) throw InputError("molecule has no atoms");
    if (coordinates_.size() != 3 * symbols_.size())
      throw InputError(fmt::format("expected {} coordinates for {} atoms, got {}",
                                   3 * symbols_.size(), symbols_.size(), coordinates_.size()));
    for (double c : coordinates_)
      if (!std::isfinite(c)) throw InputError("non-finite coordinate");
    const int ne = n_electrons();
    if (ne < 2 || ne % 2 != 0)
      throw InputError(
          fmt::format("electron count {} is not an even number >= 2 (closed-shell only)", ne));
    for (std::size_t a = 0; a < n_atoms(); ++a)
      for (std::size_t b = a + 1; b < n_atoms(); ++b)
        if ((position(a) - position(b)).norm() < 0.1)
          throw InputError(fmt::format("atoms {} and {} are closer than 0.1 Bohr", a, b));
  }

  std::vector<std::string> symbols_;
  std::vector<double> coordinates_;
  int net_charge_ = 0;
  bool frozen_core_ = false;
};

/// Parse the line-oriented input format:
///
///     charge = 1
///     basis = sto-3g
///     frozen_core = false
///     unit = angstrom
///     geometry:
///       H 0.0 0.0 0.0
///       ...
///
/// `#` starts a comment line. The geometry block runs until EOF or the next `key = value` line.
inline Molecule parse_molecule(std::string_view text) {
  int charge = 0;
  bool frozen_core = false;
  std::optional<double> scale;  // Bohr per input length unit
  bool in_geometry = false;
  bool saw_geometry = false;
  std::vector<std::string> symbols;
  std::vector<double> coords;

  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (auto eq = line.find('='); eq != std::string::npos) {
      in_geometry = false;
      const std::string key = detail::lower(detail::trim(line.substr(0, eq)));
      const std::string value = detail::lower(detail::trim(line.substr(eq + 1)));
      if (key == "charge") {
        std::size_t used = 0;
        try {
          charge = std::stoi(value, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != value.size())
          throw InputError(fmt::format("line {}: invalid charge '{}'", lineno, value));
      } else if (key == "basis") {
        if (value != "sto-3g")
          throw InputError(fmt::format("line {}: unsupported basis '{}'", lineno, value));
      } else if (key == "frozen_core") {
        if (value == "true")
          frozen_core = true;
        else if (value == "false")
          frozen_core = false;
        else
          throw InputError(fmt::format("line {}: frozen_core must be true or false", lineno));
      } else if (key == "unit") {
        if (value == "angstrom")
          scale = kBohrPerAngstrom;
        else if (value == "bohr")
          scale = 1.0;
        else
          throw InputError(fmt::format("line {}: unknown unit '{}'", lineno, value));
      } else {
        throw InputError(fmt::format("line {}: unknown key '{}'", lineno, key));
      }
      continue;
    }

    if (detail::lower(line) == "geometry:") {
      in_geometry = true;
      saw_geometry = true;
      continue;
    }

    if (!in_geometry) throw InputError(fmt::format("line {}: malformed line '{}'", lineno, line));

    std::istringstream fields(line);
    std::string sym;
    double x = 0, y = 0, z = 0;
    std::string extra;
    if (!(fields >> sym >> x >> y >> z) || (fields >> extra))
      throw InputError(fmt::format("line {}: malformed geometry line '{}'", lineno, line));
    atomic_number(sym);
    symbols.push_back(sym);
    coords.insert(coords.end(), {x, y, z});
  }

  if (!scale) throw InputError("unit keyword missing");
  if (!saw_geometry || symbols.empty()) throw InputError("empty geometry block");
  for (double& c : coords) c *= *scale;
  return Molecule(std::move(symbols), std::move(coords), charge, frozen_core);
}

/// Inverse of parse_molecule. Coordinates are written in Bohr with round-trip precision.
inline std::string serialize_molecule(const Molecule& mol) {
  std::string out;
  out += fmt::format("charge = {}\n", mol.net_charge());
  out += "basis = sto-3g\n";
  out += fmt::format("frozen_core = {}\n", mol.frozen_core() ? "true" : "false");
  out += "unit = bohr\n";
  out += "geometry:\n";
  for (std::size_t a = 0; a < mol.n_atoms(); ++a) {
    const Vec3 r = mol.position(a);
    out += fmt::format("  {} {:.17g} {:.17g} {:.17g}\n", mol.symbols()[a], r.x(), r.y(), r.z());
  }
  return out;
}

/// Sum over nuclear pairs of Z_A Z_B / R_AB, in Hartree.
inline double nuclear_repulsion(const Molecule& mol) {
  double e = 0.0;
  for (std::size_t a = 0; a < mol.n_atoms(); ++a) {
    for (std::size_t b = a + 1; b < mol.n_atoms(); ++b) {
      const double r = (mol.position(a) - mol.position(b)).norm();
      if (r == 0.0) throw InputError(fmt::format("atoms {} and {} coincide", a, b));
      e += mol.charge_of(a) * mol.charge_of(b) / r;
    }
  }
  return e;
}

struct GeometryParams {
  double bond_length = 0.0;            // Angstrom
  std::optional<double> bond_angle;    // degrees; absent for diatomics
};

/// Index of the atom bonded to both others in a triatomic: the one with the smallest
/// summed distance to the rest (lowest index on ties).
inline std::size_t central_atom(const Molecule& mol) {
  std::size_t best = 0;
  double best_sum = 0.0;
  for (std::size_t a = 0; a < mol.n_atoms(); ++a) {
    double s = 0.0;
    for (std::size_t b = 0; b < mol.n_atoms(); ++b) s += (mol.position(a) - mol.position(b)).norm();
    if (a == 0 || s < best_sum - 1e-12) {
      best = a;
      best_sum = s;
    }
  }
  return best;
}

inline GeometryParams geometry_params(const Molecule& mol) {
  if (mol.n_atoms() == 2) {
    return {bohr_to_angstrom((mol.position(0) - mol.position(1)).norm()), std::nullopt};
  }
  if (mol.n_atoms() != 3)
    throw InputError(
        fmt::format("bond length/angle defined for 2 or 3 atoms only (got {})", mol.n_atoms()));
  const std::size_t c = central_atom(mol);
  const std::size_t a = (c + 1) % 3;
  const std::size_t b = (c + 2) % 3;
  const Vec3 u = mol.position(a) - mol.position(c);
  const Vec3 v = mol.position(b) - mol.position(c);
  const double cosphi = std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0);
  return {bohr_to_angstrom(std::min(u.norm(), v.norm())), rad_to_deg(std::acos(cosphi))};
}

}  // namespace geomvqe
