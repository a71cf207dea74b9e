#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <geomvqe/geomvqe.hpp>

namespace testing {

inline geomvqe::Molecule load_input(const std::string& name) {
  std::ifstream in(std::string(GEOMVQE_INPUT_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return geomvqe::parse_molecule(ss.str());
}

inline geomvqe::Molecule h2_at(double d_angstrom) {
  const double z = geomvqe::angstrom_to_bohr(d_angstrom);
  return geomvqe::Molecule({"H", "H"}, {0, 0, 0, 0, 0, z});
}

inline geomvqe::Molecule h3plus_at(double d_angstrom) {
  const double d = geomvqe::angstrom_to_bohr(d_angstrom);
  return geomvqe::Molecule({"H", "H", "H"}, {0, 0, 0, d, 0, 0, d / 2, d * std::sqrt(3.0) / 2, 0}, 1);
}

inline geomvqe::Statevector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  geomvqe::Statevector s(n);
  double norm = 0;
  for (std::size_t i = 0; i < s.dim(); ++i) {
    s[i] = {g(rng), g(rng)};
    norm += std::norm(s[i]);
  }
  for (std::size_t i = 0; i < s.dim(); ++i) s[i] /= std::sqrt(norm);
  return s;
}

}  // namespace testing
