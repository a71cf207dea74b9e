#include <catch_amalgamated.hpp>

#include "common.hpp"

using namespace geomvqe;
using Catch::Matchers::ContainsSubstring;

namespace {

Eigen::Matrix2cd pauli_matrix(char c) {
  Eigen::Matrix2cd m;
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m.setIdentity();
  }
  return m;
}

// Kronecker product with qubit 0 leftmost (most significant)
Eigen::MatrixXcd kron_matrix(const PauliString& p, int n) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  for (int q = 0; q < n; ++q) {
    const Eigen::Matrix2cd b = pauli_matrix(p.at(q));
    Eigen::MatrixXcd r(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) r.block<2, 2>(2 * i, 2 * j) = m(i, j) * b;
    m = r;
  }
  return m;
}

PauliString random_string(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> d(0, (1u << n) - 1);
  return {d(rng), d(rng)};
}

}  // namespace

TEST_CASE("single-qubit products") {
  const auto X = PauliString::single('X', 0), Y = PauliString::single('Y', 0), Z = PauliString::single('Z', 0);
  auto [p1, r1] = multiply(X, Y);
  CHECK(r1 == Z);
  CHECK(p1 == cplx(0, 1));
  auto [p2, r2] = multiply(Y, X);
  CHECK(r2 == Z);
  CHECK(p2 == cplx(0, -1));
  auto [p3, r3] = multiply(Z, Z);
  CHECK(r3.is_identity());
  CHECK(p3 == cplx(1, 0));
  CHECK_THROWS_AS(PauliString::single('Q', 0), InputError);
}

TEST_CASE("multiply agrees with Kronecker matrices on random strings") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    const PauliString a = random_string(n, rng), b = random_string(n, rng);
    const auto [ph, r] = multiply(a, b);
    const Eigen::MatrixXcd lhs = kron_matrix(a, n) * kron_matrix(b, n);
    CHECK((lhs - ph * kron_matrix(r, n)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("dense matrix of a Pauli sum") {
  SECTION("qubit 0 is the most significant bit") {
    PauliSum z(2);
    z.add(PauliString::single('Z', 0), 1.0);
    const Eigen::MatrixXcd m = dense_matrix(z);
    CHECK(m.diagonal().real().transpose() == Eigen::RowVector4d(1, 1, -1, -1));
    CHECK(m.imag().cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("identity coefficient") {
    PauliSum c(3);
    c.add(PauliString::identity(), 2.5);
    CHECK((dense_matrix(c) - 2.5 * Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("random sums match Kronecker assembly and are Hermitian") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    PauliSum h(4);
    Eigen::MatrixXcd ref = Eigen::MatrixXcd::Zero(16, 16);
    for (int k = 0; k < 40; ++k) {
      const PauliString p = random_string(4, rng);
      const double c = g(rng);
      h.add(p, c);
      ref += c * kron_matrix(p, 4);
    }
    const Eigen::MatrixXcd m = dense_matrix(h);
    CHECK((m - ref).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("size cap") { CHECK_THROWS_AS(dense_matrix(PauliSum(11)), InputError); }
}

TEST_CASE("PauliSum arithmetic and pruning") {
  PauliSum a(2), b(2);
  const auto x0 = PauliString::single('X', 0), z1 = PauliString::single('Z', 1);
  a.add(x0, 1.0);
  a.add(z1, 0.5);
  b.add(x0, -1.0);
  b.add(PauliString::identity(), 3.0);
  PauliSum s = a + b;
  CHECK(s.coefficient(x0) == 0.0);
  CHECK(s.identity_coefficient() == 3.0);
  s.prune();
  CHECK(s.size() == 2);
  CHECK((a * 2.0).coefficient(z1) == 1.0);
  CHECK((a - a).coefficient(z1) == 0.0);
}

TEST_CASE("ordering puts the identity first and compares qubit 0 first") {
  const auto i = PauliString::identity();
  const auto x0 = PauliString::single('X', 0), z0 = PauliString::single('Z', 0), x1 = PauliString::single('X', 1);
  CHECK(i < x0);
  CHECK(x0 < z0);
  CHECK(x1 < x0);  // qubit 0 is I in x1
  CHECK_FALSE(x0 < x0);
}

TEST_CASE("text round trip") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  PauliSum h(5);
  for (int k = 0; k < 30; ++k) h.add(random_string(5, rng), g(rng));
  const std::string text = to_text(h);
  CHECK(text.rfind("# qubits 5\n", 0) == 0);
  const PauliSum back = parse_pauli_sum(text);
  REQUIRE(back.size() == h.size());
  CHECK(back.n_qubits() == 5);
  for (const auto& [p, c] : h.terms()) CHECK(std::abs(back.coefficient(p) - c) <= 1e-12 * std::abs(c));
  CHECK(to_text(back) == text);
}

TEST_CASE("text format") {
  PauliSum h(3);
  h.add(PauliString::identity(), -1.0);
  h.add(PauliString{0b101, 0b100}, 0.25);
  CHECK(to_text(h) == "# qubits 3\n-1.000000000000e+00 []\n+2.500000000000e-01 [X0 Y2]\n");
  CHECK_THROWS_WITH(parse_pauli_sum("0.5 X0\n"), ContainsSubstring("expected"));
  CHECK_THROWS_AS(parse_pauli_sum("abc [X0]\n"), InputError);
  CHECK_THROWS_AS(parse_pauli_sum("1 [X0 Z0]\n"), InputError);
  CHECK_THROWS_AS(parse_pauli_sum("# qubits 2\n1 [X3]\n"), InputError);
}
