#include <catch_amalgamated.hpp>

#include "common.hpp"

using namespace geomvqe;
using Catch::Approx;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

Trajectory small_trajectory() {
  Trajectory t;
  t.records.push_back({0, -1.1234567890123, {0.0}, {0, 0, 0, 0, 0, 1.5}, 2.5e-2, 3.0e-1});
  t.records.push_back({1, -1.13, {-0.0625}, {0, 0, 0.01, 0, 0, 1.49}, 1e-6, 4e-7});
  return t;
}

}  // namespace

TEST_CASE("trajectory CSV") {
  const auto rows = lines(trajectory_csv(small_trajectory()));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "iter,energy_ha,max_grad_x,max_grad_theta,x_0,x_1,x_2,x_3,x_4,x_5,theta_0");
  const auto r0 = fields(rows[1]);
  REQUIRE(r0.size() == 11);
  CHECK(r0[0] == "0");
  CHECK(r0[1] == "-1.12345678901e+00");
  CHECK(r0[9] == "1.50000000000e+00");
  const auto r1 = fields(rows[2]);
  CHECK(r1[0] == "1");
  CHECK(std::stod(r1[10]) == -0.0625);
  CHECK(trajectory_csv(Trajectory{}) == "iter,energy_ha,max_grad_x,max_grad_theta\n");
}

TEST_CASE("XYZ output is in angstrom") {
  const Molecule m = testing::h2_at(0.735);
  const auto rows = lines(to_xyz(m, "final"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "2");
  CHECK(rows[1] == "final");
  std::istringstream last(rows[3]);
  std::string sym;
  double x, y, z;
  last >> sym >> x >> y >> z;
  CHECK(sym == "H");
  CHECK(z == Approx(0.735).margin(1e-10));
}

TEST_CASE("circuit text round trip") {
  Circuit c;
  c.n_qubits = 6;
  c.gates.push_back({GateKind::double_, {0, 1, 2, 3}, 0});
  c.gates.push_back({GateKind::single, {1, 5}, 1});
  const std::vector<double> theta{0.123456789, -1.5};
  const std::string text = circuit_text(c, theta);
  CHECK(lines(text)[0] == "double [0,1,2,3] theta=+0.123456789");
  CHECK(lines(text)[1] == "single [1,5] theta=-1.500000000");
  const auto parsed = parse_circuit_text(text + "\n");
  REQUIRE(parsed.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(parsed[k].gate == c.gates[k]);
    CHECK(parsed[k].theta == Approx(theta[k]).margin(1e-9));
  }
}

TEST_CASE("circuit text errors") {
  CHECK_THROWS_AS(parse_circuit_text("triple [0,1] theta=0.1"), InputError);
  CHECK_THROWS_AS(parse_circuit_text("double 0,1,2,3 theta=0.1"), InputError);
  CHECK_THROWS_AS(parse_circuit_text("double [0,a,2,3] theta=0.1"), InputError);
  CHECK_THROWS_AS(parse_circuit_text("double [0,1,2,3] theta=0.1x"), InputError);
  CHECK_THROWS_AS(parse_circuit_text("double [0,1,2,3]"), InputError);
  CHECK(parse_circuit_text("\n  \n").empty());
}

TEST_CASE("integral dump") {
  const Molecule m = testing::load_input("h2.inp");
  const auto es = electronic_structure(m, m.coordinates());
  const auto rows = lines(integrals_text(es.active));
  REQUIRE(rows.size() > 3);
  CHECK(rows[0] == "# active orbitals 2");
  CHECK(rows[1] == "# active electrons 2");
  CHECK(rows[2].rfind("constant ", 0) == 0);
  CHECK(std::stod(rows[2].substr(9)) == Approx(es.active.core_energy).margin(1e-14));
  std::size_t h = 0, g = 0;
  for (const auto& r : rows) {
    if (r.rfind("h ", 0) == 0) ++h;
    if (r.rfind("g ", 0) == 0) ++g;
  }
  // h01 vanishes by symmetry; 6 distinct nonzero (pq|rs) patterns spread over 8 physicist orderings
  CHECK(h == 2);
  CHECK(g >= 6);
}

TEST_CASE("stop reason names") {
  CHECK(stop_reason_name(StopReason::converged) == "converged");
  CHECK(stop_reason_name(StopReason::max_iterations) == "max_iterations");
  CHECK(stop_reason_name(StopReason::scf_failure) == "scf_failure");
}
