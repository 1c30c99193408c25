#include "doctest.h"
#include "support.hpp"

#include "qtomo/optics.hpp"

using namespace qtomo;

namespace {
CMatrix diag2(double a, double b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// Stokes components from explicit Pauli traces.
StokesVector stokes_oracle(const CMatrix& rho) {
  return {rho.trace().real(), (rho * pauli(1)).trace().real(), (rho * pauli(2)).trace().real(),
          (rho * pauli(3)).trace().real()};
}
}  // namespace

TEST_CASE("stokes_to_density examples") {
  CHECK(max_abs(stokes_to_density({1, 0, 0, 0}).matrix() - 0.5 * CMatrix::Identity(2, 2)) < 1e-15);
  CHECK(max_abs(stokes_to_density({1, 0, 0, 1}).matrix() - diag2(1, 0)) < 1e-15);
  CMatrix plus = CMatrix::Constant(2, 2, 0.5);
  auto s = density_to_stokes(DensityOperator(plus));
  CHECK(s.s0 == doctest::Approx(1));
  CHECK(s.s1 == doctest::Approx(1));
  CHECK(std::abs(s.s2) < 1e-15);
  CHECK(std::abs(s.s3) < 1e-15);
  CHECK_THROWS_AS(stokes_to_density({1, 1, 1, 0}), ContractViolation);
}

TEST_CASE("Stokes round trip and trace formula") {
  test::Random rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    CMatrix rho = rng.density(2) * rng.uniform(0.1, 3.0);
    auto s = density_to_stokes(DensityOperator(rho));
    auto o = stokes_oracle(rho);
    CHECK(std::abs(s.s0 - o.s0) < 1e-12);
    CHECK(std::abs(s.s1 - o.s1) < 1e-12);
    CHECK(std::abs(s.s2 - o.s2) < 1e-12);
    CHECK(std::abs(s.s3 - o.s3) < 1e-12);
    CHECK(max_abs(stokes_to_density(s).matrix() - rho) < 1e-12);
  }
}

TEST_CASE("degree_of_polarization") {
  CHECK(degree_of_polarization({1, 0, 0, 0}) == 0.0);
  CHECK(degree_of_polarization({1, 0, 0, 1}) == doctest::Approx(1.0));
  CHECK(degree_of_polarization({1, 0.6, 0, 0.8}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(degree_of_polarization({0, 0, 0, 0}), ContractViolation);
  test::Random rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    CMatrix pure = rng.pure_density(2);
    CHECK(degree_of_polarization(density_to_stokes(DensityOperator(pure))) == doctest::Approx(1.0).epsilon(1e-10));
    CMatrix mixed = rng.density(2);
    const double p = degree_of_polarization(density_to_stokes(DensityOperator(mixed)));
    CHECK(p < 1.0);
    CHECK(std::abs(mixed.determinant()) > 1e-14);
  }
}

TEST_CASE("apply_jones") {
  test::Random rng(7);
  const DensityOperator rho(rng.density(2));
  CHECK(max_abs(apply_jones(rho, JonesMatrix(CMatrix::Identity(2, 2))).matrix() - rho.matrix()) < 1e-15);
  CHECK(apply_jones(rho, JonesMatrix::attenuator(0.5)).trace() == doctest::Approx(0.25));

  for (int trial = 0; trial < 50; ++trial) {
    CVector phi = rng.unit_vector(2), psi = rng.unit_vector(2);
    auto out = apply_jones(density_from_state(StateVector(psi)), JonesMatrix::polarizer(phi));
    CHECK(std::abs(out.trace() - std::norm(phi.dot(psi))) < 1e-14);
    CMatrix u = rng.unitary(2);
    CHECK(std::abs(apply_jones(rho, JonesMatrix(u)).trace() - 1.0) < 1e-13);
  }
  for (int trial = 0; trial < 10000; ++trial) {
    DensityOperator r(rng.density(2, rng.integer(1, 2)));
    JonesMatrix t(rng.ginibre(2, 2));
    CHECK(min_eigenvalue(apply_jones(r, t).matrix()) >= -1e-12);
  }
}

TEST_CASE("beam_splitter") {
  test::Random rng(9);
  CMatrix rho = rng.density(2);
  auto out = beam_splitter(single_beam_input(DensityOperator(rho)));
  CMatrix expected(4, 4);
  expected << rho, rho, rho, rho;
  CHECK(max_abs(out.matrix() - 0.5 * expected) < 1e-15);
  CHECK(max_abs(beam_splitter(DensityOperator::dark(4)).matrix()) == 0.0);
  auto twice = beam_splitter(beam_splitter(single_beam_input(DensityOperator(rho))));
  CHECK(max_abs(twice.matrix() - single_beam_input(DensityOperator(rho)).matrix()) < 1e-15);
  CHECK_THROWS_AS(beam_splitter(DensityOperator(rho)), ContractViolation);
}

TEST_CASE("cascade_measure examples") {
  SUBCASE("one splitter, orthogonal polarizers") {
    auto net = OpticalNetwork::split(OpticalNetwork::leaf(JonesMatrix(matrix_unit(2, 0, 0))),
                                     OpticalNetwork::leaf(JonesMatrix(matrix_unit(2, 1, 1))));
    auto c = cascade_measure(net);
    REQUIRE(c.measure.size() == 3);
    CHECK(max_abs(c.measure[0] - 0.5 * matrix_unit(2, 0, 0)) < 1e-15);
    CHECK(max_abs(c.measure[1] - 0.5 * matrix_unit(2, 1, 1)) < 1e-15);
    CHECK(max_abs(c.measure[2] - 0.5 * CMatrix::Identity(2, 2)) < 1e-15);
    CHECK(c.has_null_element());
  }
  SUBCASE("single lossless leaf") {
    auto c = cascade_measure(OpticalNetwork::leaf(JonesMatrix(CMatrix::Identity(2, 2))));
    REQUIRE(c.measure.size() == 1);
    CHECK(max_abs(c.measure[0] - CMatrix::Identity(2, 2)) == 0.0);
    CHECK(max_abs(c.null_element) == 0.0);
    CHECK_FALSE(c.has_null_element());
  }
  SUBCASE("depth-two unitary leaf") {
    test::Random rng(10);
    auto u = JonesMatrix(rng.unitary(2));
    auto net = OpticalNetwork::split(
        OpticalNetwork::split(OpticalNetwork::leaf(u), OpticalNetwork::leaf(JonesMatrix::attenuator(0.3))),
        OpticalNetwork::leaf(JonesMatrix::attenuator(1.0)));
    auto leaves = net.leaves();
    REQUIRE(leaves.size() == 3);
    CHECK(leaves[0].depth == 2);
    CHECK(leaves[0].attenuation == 0.25);
    auto c = cascade_measure(net);
    CHECK(max_abs(c.measure[0] - 0.25 * CMatrix::Identity(2, 2)) < 1e-15);
  }
  SUBCASE("over-unity filter is rejected") {
    CHECK_THROWS_AS(OpticalNetwork::leaf(JonesMatrix::attenuator(1.1)), ContractViolation);
  }
}

TEST_CASE("cascade responses follow the filtered intensities") {
  test::Random rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<CMatrix> ts;
    auto leaf = [&] {
      CMatrix t = rng.ginibre(2, 2);
      t /= spectral_norm(t) * rng.uniform(1.0, 2.0);
      ts.push_back(t);
      return OpticalNetwork::leaf(JonesMatrix(t));
    };
    auto l0 = leaf();
    auto l1 = leaf();
    auto l2 = leaf();
    auto net = OpticalNetwork::split(OpticalNetwork::split(l0, l1), l2);
    const double c[] = {0.25, 0.25, 0.5};
    auto cm = cascade_measure(net);
    CHECK(validate_measure(cm.measure.elements()).ok);
    CMatrix rho = rng.density(2) * rng.uniform(0.5, 2.0);
    RVector p = response_probabilities(cm.measure, DensityOperator(rho));
    for (int k = 0; k < 3; ++k)
      CHECK(std::abs(p(k) - c[k] * (ts[static_cast<std::size_t>(k)] * rho * ts[static_cast<std::size_t>(k)].adjoint()).trace().real()) < 1e-13);
    CHECK(std::abs(p.sum() - rho.trace().real()) < 1e-12);
    CHECK(min_eigenvalue(cm.null_element) >= -1e-12);
  }
}
