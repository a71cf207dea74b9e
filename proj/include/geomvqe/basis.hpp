#pragma once

#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "error.hpp"
#include "molecule.hpp"

namespace geomvqe {

/// A contracted shell of Gaussian primitives attached to one atom.
struct BasisShell {
  std::size_t center_index = 0;
  int angular_momentum = 0;  // 0 = s, 1 = p
  std::vector<double> exponents;
  std::vector<double> contraction_coefficients;

  /// Number of Cartesian functions the shell expands to.
  int size() const { return angular_momentum == 0 ? 1 : 3; }
};

namespace detail {

inline constexpr std::string_view kSto3gData =
#include "data/sto-3g.inc"
    ;

// Parses the NWChem-format block for one element. SP shells are split into an s and a p shell.
inline std::vector<BasisShell> parse_nwchem_element(std::string_view data, std::string_view symbol) {
  std::vector<BasisShell> shells;
  std::istringstream in{std::string(data)};
  std::string line;
  BasisShell* s_part = nullptr;
  BasisShell* p_part = nullptr;
  bool in_element = false;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#' || t.rfind("BASIS", 0) == 0 || t == "END") continue;
    std::istringstream fields(t);
    std::string head;
    fields >> head;
    if (std::isalpha(static_cast<unsigned char>(head.front()))) {
      std::string kind;
      fields >> kind;
      in_element = (head == symbol);
      s_part = p_part = nullptr;
      if (!in_element) continue;
      if (kind == "S" || kind == "SP") {
        shells.push_back({0, 0, {}, {}});
        s_part = &shells.back();
      }
      if (kind == "P" || kind == "SP") {
        shells.push_back({0, 1, {}, {}});
        p_part = &shells.back();
        if (kind == "SP") s_part = &shells[shells.size() - 2];
      }
      continue;
    }
    if (!in_element) continue;
    const double exponent = std::stod(head);
    double c1 = 0.0, c2 = 0.0;
    fields >> c1;
    if (s_part) {
      s_part->exponents.push_back(exponent);
      s_part->contraction_coefficients.push_back(c1);
      if (p_part) fields >> c2;
    } else {
      c2 = c1;
    }
    if (p_part) {
      p_part->exponents.push_back(exponent);
      p_part->contraction_coefficients.push_back(c2);
    }
  }
  return shells;
}

inline double double_factorial(int n) {
  double r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

}  // namespace detail

/// STO-3G shells for one element, in the order 1s, 2s, 2p.
inline std::vector<BasisShell> load_basis(std::string_view symbol) {
  atomic_number(symbol);
  auto shells = detail::parse_nwchem_element(detail::kSto3gData, symbol);
  if (shells.empty()) throw InputError(fmt::format("no STO-3G data for '{}'", symbol));
  return shells;
}

/// STO-3G shells for every atom of a molecule, center_index filled in.
inline std::vector<BasisShell> molecule_shells(const Molecule& mol) {
  std::vector<BasisShell> all;
  for (std::size_t a = 0; a < mol.n_atoms(); ++a) {
    for (auto sh : load_basis(mol.symbols()[a])) {
      sh.center_index = a;
      all.push_back(std::move(sh));
    }
  }
  return all;
}

/// A normalized contracted Cartesian Gaussian. Coefficients already include the primitive
/// normalization and the overall contraction normalization.
struct BasisFunction {
  Vec3 center = Vec3::Zero();
  std::array<int, 3> powers{0, 0, 0};
  std::vector<double> exponents;
  std::vector<double> coefficients;
  std::size_t atom = 0;
};

inline double primitive_norm(double alpha, const std::array<int, 3>& p) {
  const int l = p[0] + p[1] + p[2];
  return std::pow(2.0 * alpha / kPi, 0.75) * std::pow(4.0 * alpha, 0.5 * l) /
         std::sqrt(detail::double_factorial(2 * p[0] - 1) * detail::double_factorial(2 * p[1] - 1) *
                   detail::double_factorial(2 * p[2] - 1));
}

/// Expand shells into Cartesian basis functions centered at the given coordinates (Bohr).
/// p shells expand in the order px, py, pz.
inline std::vector<BasisFunction> expand_shells(std::span<const BasisShell> shells,
                                                std::span<const double> coordinates) {
  std::vector<BasisFunction> out;
  for (const auto& sh : shells) {
    const Vec3 center(coordinates[3 * sh.center_index], coordinates[3 * sh.center_index + 1],
                      coordinates[3 * sh.center_index + 2]);
    std::vector<std::array<int, 3>> comps;
    if (sh.angular_momentum == 0)
      comps = {{0, 0, 0}};
    else
      comps = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (const auto& p : comps) {
      BasisFunction f;
      f.center = center;
      f.powers = p;
      f.exponents = sh.exponents;
      f.atom = sh.center_index;
      const std::size_t n = sh.exponents.size();
      f.coefficients.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        f.coefficients[i] = sh.contraction_coefficients[i] * primitive_norm(sh.exponents[i], p);
      // self-overlap of the contraction, one Cartesian direction at a time
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double q = sh.exponents[i] + sh.exponents[j];
          double sij = 1.0;
          for (int d = 0; d < 3; ++d)
            sij *= detail::double_factorial(2 * p[d] - 1) / std::pow(2.0 * q, p[d]) *
                   std::sqrt(kPi / q);
          s += f.coefficients[i] * f.coefficients[j] * sij;
        }
      }
      for (double& c : f.coefficients) c /= std::sqrt(s);
      out.push_back(std::move(f));
    }
  }
  return out;
}

}  // namespace geomvqe
