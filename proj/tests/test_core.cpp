#include "doctest.h"
#include "support.hpp"

#include "qtomo/core.hpp"

using namespace qtomo;

namespace {
CMatrix diag2(double a, double b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}
}  // namespace

TEST_CASE("quantum_value examples") {
  CHECK(std::abs(quantum_value(DensityOperator(0.5 * pauli(0)), pauli(3))) < 1e-15);
  CHECK(std::abs(quantum_value(DensityOperator(diag2(1, 0)), pauli(3)) - 1.0) < 1e-15);
  // Stokes coefficients read off against the Paulis
  DensityOperator rho(0.5 * (pauli(0) + 0.6 * pauli(1) + 0.8 * pauli(3)));
  CHECK(std::abs(quantum_value(rho, pauli(1)) - 0.6) < 1e-15);
  CHECK(std::abs(quantum_value(rho, pauli(3)) - 0.8) < 1e-15);
}

TEST_CASE("quantum_value rejects dimension mismatch") {
  CHECK_THROWS_AS(quantum_value(DensityOperator::maximally_mixed(2), CMatrix::Identity(3, 3)),
                  ContractViolation);
}

TEST_CASE("quantum_value properties on random inputs") {
  test::Random rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = rng.integer(1, 6);
    const DensityOperator rho(rng.density(d) * rng.uniform(0.1, 3.0));
    const DensityOperator rho2(rng.density(d));
    const CMatrix h = rng.hermitian(d);
    const CMatrix x = rng.ginibre(d, d);
    const CMatrix y = rng.ginibre(d, d);
    // real on Hermitian operators
    const double bound = 1e-12 * rho.matrix().norm() * h.norm();
    CHECK(std::abs(quantum_value(rho, h).imag()) <= bound + 1e-15);
    // conjugate symmetry and linearity
    CHECK(std::abs(quantum_value(rho, x.adjoint()) - std::conj(quantum_value(rho, x))) < 1e-12);
    const Complex a(0.3, -1.2);
    CHECK(std::abs(quantum_value(rho, x + a * y) - quantum_value(rho, x) - a * quantum_value(rho, y)) < 1e-11);
    // additivity under source combination
    const DensityOperator sum(rho.matrix() + rho2.matrix());
    CHECK(std::abs(quantum_value(sum, x) - quantum_value(rho, x) - quantum_value(rho2, x)) < 1e-11);
  }
}

TEST_CASE("hermitian_basis") {
  SUBCASE("d = 1") {
    auto b = hermitian_basis(1);
    REQUIRE(b.size() == 1);
    CHECK(std::abs(b.elements()[0](0, 0) - 1.0) == 0.0);
  }
  SUBCASE("d = 2 gives the Pauli matrices") {
    auto b = hermitian_basis(2);
    REQUIRE(b.size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(max_abs(b.elements()[k] - pauli(k)) == 0.0);
  }
  SUBCASE("d = 3 has full Gram rank") {
    auto b = hermitian_basis(3);
    REQUIRE(b.size() == 9);
    // rank of the real 18 x 9 matrix of stacked real/imag parts
    RMatrix m(18, 9);
    for (int i = 0; i < 9; ++i) {
      CVector v = vec(b.elements()[i]);
      m.col(i) << v.real(), v.imag();
    }
    Eigen::JacobiSVD<RMatrix> svd(m);
    CHECK(svd.singularValues()(8) > 1e-3);
    for (const auto& e : b.elements()) CHECK(hermitian_defect(e) == 0.0);
  }
  SUBCASE("d = 0 is a contract violation") { CHECK_THROWS_AS(hermitian_basis(0), ContractViolation); }
}

TEST_CASE("hermitian_basis expansion reproduces random Hermitian matrices") {
  test::Random rng(5);
  for (int d = 1; d <= 6; ++d) {
    auto basis = hermitian_basis(d);
    for (int trial = 0; trial < 20; ++trial) {
      CMatrix h = rng.hermitian(d);
      CMatrix back = basis.resum(basis.coefficients(h));
      CHECK((back - h).norm() <= 1e-10 * h.norm());
    }
  }
}

TEST_CASE("validate_density") {
  SUBCASE("dark state") {
    auto r = validate_density(CMatrix::Zero(2, 2));
    CHECK(r.ok);
    CHECK(r.trace == 0.0);
  }
  SUBCASE("maximally mixed") {
    auto r = validate_density(diag2(0.5, 0.5));
    CHECK(r.ok);
    CHECK(r.trace == doctest::Approx(1.0));
  }
  SUBCASE("negative eigenvalue") {
    auto r = validate_density(diag2(1.0, -0.1));
    CHECK_FALSE(r.ok);
    CHECK(r.min_eigenvalue == doctest::Approx(-0.1).epsilon(1e-14));
  }
  SUBCASE("non-Hermitian") {
    CMatrix m = diag2(0.5, 0.5);
    m(0, 1) = 0.1;
    auto r = validate_density(m);
    CHECK_FALSE(r.ok);
    CHECK(r.hermitian_defect == doctest::Approx(0.1));
  }
  SUBCASE("non-square") { CHECK_THROWS_AS(validate_density(CMatrix::Zero(2, 3)), ContractViolation); }
}

TEST_CASE("DensityOperator construction enforces its invariants") {
  CHECK_THROWS_AS(DensityOperator(diag2(1.0, -0.1)), ContractViolation);
  CMatrix m = diag2(0.5, 0.5);
  m(0, 1) = 0.2;
  CHECK_THROWS_AS(DensityOperator{m}, ContractViolation);
  CHECK_THROWS_AS(DensityOperator(CMatrix::Zero(2, 3)), ContractViolation);
  // intensity is not normalized away
  CHECK(DensityOperator(diag2(2.0, 1.0)).trace() == doctest::Approx(3.0));
}

TEST_CASE("density_from_state examples") {
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(max_abs(density_from_state(StateVector(CVector::Unit(2, 0))).matrix() - diag2(1, 0)) == 0.0);
  CVector plus(2);
  plus << s, s;
  CMatrix half(2, 2);
  half << 0.5, 0.5, 0.5, 0.5;
  CHECK(max_abs(density_from_state(StateVector(plus)).matrix() - half) < 1e-15);
  CVector circ(2);
  circ << s, kI * s;
  CMatrix expect(2, 2);
  expect << 0.5, -0.5 * kI, 0.5 * kI, 0.5;
  CHECK(max_abs(density_from_state(StateVector(circ)).matrix() - expect) < 1e-15);
}

TEST_CASE("density_from_state output is a rank-one valid density") {
  test::Random rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = rng.integer(1, 8);
    CVector psi = rng.ginibre(d, 1).col(0) * rng.uniform(0.1, 4.0);
    auto rho = density_from_state(StateVector(psi));
    CHECK(validate_density(rho.matrix(), 1e-12).ok);
    CHECK(rho.trace() == doctest::Approx(psi.squaredNorm()).epsilon(1e-12));
    CHECK(numerical_rank(rho.matrix(), 1e-10) <= 1);
  }
}

TEST_CASE("normalize") {
  auto rho = normalize(DensityOperator(diag2(2.0, 2.0)));
  CHECK(rho.trace() == doctest::Approx(1.0));
  CHECK_THROWS_AS(normalize(DensityOperator::dark(2)), ContractViolation);
}

TEST_CASE("StateVector rejects non-finite components") {
  CVector v(2);
  v << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(StateVector{v}, ContractViolation);
}
