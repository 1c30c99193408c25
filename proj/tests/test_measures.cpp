#include "doctest.h"
#include "support.hpp"

#include <numbers>

#include "qtomo/measures.hpp"

using namespace qtomo;

namespace {
CMatrix proj(int d, int k) { return matrix_unit(d, k, k); }

CMatrix diag2(double a, double b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// Real rank of a family of Hermitian matrices through an SVD of their
// stacked real coordinates.
int stacked_rank(const std::vector<CMatrix>& el) {
  const auto d = el.front().rows();
  RMatrix m(2 * d * d, static_cast<Eigen::Index>(el.size()));
  for (std::size_t i = 0; i < el.size(); ++i) {
    CVector v = vec(el[i]);
    m.col(static_cast<Eigen::Index>(i)) << v.real(), v.imag();
  }
  Eigen::JacobiSVD<RMatrix> svd(m);
  int r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) r += svd.singularValues()(i) > 1e-9;
  return r;
}
}  // namespace

TEST_CASE("validate_measure examples") {
  CHECK(validate_measure({CMatrix::Identity(2, 2)}).ok);
  CHECK(validate_measure({proj(2, 0), proj(2, 1)}).ok);
  auto bad = validate_measure({0.6 * CMatrix::Identity(2, 2), 0.6 * CMatrix::Identity(2, 2)});
  CHECK_FALSE(bad.ok);
  CHECK(bad.sum_defect == doctest::Approx(0.2));
  CHECK_THROWS_AS(validate_measure({CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)}), ContractViolation);
}

TEST_CASE("QuantumMeasure construction names the failed invariant") {
  try {
    QuantumMeasure({0.6 * CMatrix::Identity(2, 2), 0.6 * CMatrix::Identity(2, 2)});
    FAIL("expected failure");
  } catch (const ContractViolation& e) {
    CHECK(std::string(e.what()).find("sum to the identity") != std::string::npos);
  }
  CHECK_THROWS_AS(QuantumMeasure({CMatrix::Identity(2, 2), CMatrix::Zero(2, 2)}), ContractViolation);
  CHECK_THROWS_AS(QuantumMeasure({diag2(1.5, 0.5), diag2(-0.5, 0.5)}), ContractViolation);
}

TEST_CASE("response_probabilities examples") {
  const auto comp = computational_measure(2);
  RVector p = response_probabilities(comp, DensityOperator(diag2(0.3, 0.7)));
  CHECK(p(0) == doctest::Approx(0.3));
  CHECK(p(1) == doctest::Approx(0.7));

  // perfect polarizer phi phi^* with phi = (1,1)/sqrt2 on psi = (1,0)
  const double s = 1.0 / std::sqrt(2.0);
  CVector phi(2);
  phi << s, s;
  CMatrix pol = phi * phi.adjoint();
  QuantumMeasure m({pol, CMatrix::Identity(2, 2) - pol});
  RVector q = response_probabilities(m, DensityOperator(diag2(1, 0)));
  CHECK(q(0) == doctest::Approx(std::norm(phi.dot(CVector::Unit(2, 0)))).epsilon(1e-15));
  CHECK(q(0) == doctest::Approx(0.5));

  RVector dark = response_probabilities(tetrahedron_measure(), DensityOperator::dark(2));
  CHECK(dark.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("response_probabilities is linear and sums to the intensity") {
  test::Random rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = rng.integer(1, 5);
    QuantumMeasure m(rng.measure(d, rng.integer(1, 2 * d * d)));
    const CMatrix r1 = rng.density(d) * rng.uniform(0.0, 2.0);
    const CMatrix r2 = rng.density(d) * rng.uniform(0.0, 2.0);
    const double a = rng.uniform(0, 3), b = rng.uniform(0, 3);
    RVector lhs = response_probabilities(m, DensityOperator(a * r1 + b * r2));
    RVector rhs = a * response_probabilities(m, DensityOperator(r1)) + b * response_probabilities(m, DensityOperator(r2));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(lhs.sum() - (a * r1 + b * r2).trace().real()) <= 1e-12);
  }
}

TEST_CASE("measured_quantity examples and bounds") {
  const auto comp = computational_measure(2);
  auto a = measured_quantity(Detector(comp, Scale::real({1.0, -1.0})));
  REQUIRE(a.size() == 1);
  CHECK(max_abs(a[0] - pauli(3)) == 0.0);

  // a two-element measure with distinct values summing to the identity operator
  const double s = 1.0 / std::sqrt(2.0);
  CVector phi(2);
  phi << s, kI * s;
  CMatrix p = phi * phi.adjoint();
  QuantumMeasure two({p, CMatrix::Identity(2, 2) - p});
  std::vector<CVector> vals(2, CVector::Constant(2, 1.0));
  vals[1](1) = 2.0;
  auto id = measured_quantity(Detector(two, Scale(vals)));
  CHECK(max_abs(id[0] - CMatrix::Identity(2, 2)) < 1e-15);
  CHECK(max_abs(id[1] - (p + 2.0 * (CMatrix::Identity(2, 2) - p))) < 1e-15);

  std::vector<CVector> repeated(2, CVector::Zero(1));
  CHECK_THROWS_AS(Scale{repeated}, ContractViolation);

  test::Random rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = rng.integer(1, 4);
    const int k = rng.integer(1, 6);
    QuantumMeasure m(rng.measure(d, k));
    std::vector<double> vals;
    for (int i = 0; i < k; ++i) vals.push_back(rng.normal() + 10.0 * i);
    auto q = measured_quantity(Detector(m, Scale::real(vals)));
    CHECK(hermitian_defect(q[0]) <= 1e-12);
    double bound = 0.0;
    for (double v : vals) bound += std::abs(v);
    CHECK(spectral_norm(q[0]) <= bound + 1e-12);
  }
}

TEST_CASE("scale changes along the null space leave the measured quantity unchanged") {
  // six-element measure: the map a -> sum a_k P_k has a 2-dimensional kernel
  const auto m = pauli_six_measure();
  RMatrix map(8, 6);
  for (int k = 0; k < 6; ++k) {
    CVector v = vec(m[static_cast<std::size_t>(k)]);
    map.col(k) << v.real(), v.imag();
  }
  Eigen::JacobiSVD<RMatrix> svd(map, Eigen::ComputeFullV);
  REQUIRE(svd.singularValues()(3) > 1e-6);
  const RVector null = svd.matrixV().col(5);
  CHECK((map * null).norm() < 1e-12);
  std::vector<double> base{1.0, 2.0, 3.0, 4.0, 5.0, 6.0}, moved = base;
  for (int k = 0; k < 6; ++k) moved[static_cast<std::size_t>(k)] += 0.37 * null(k);
  auto a = measured_quantity(Detector(m, Scale::real(base)));
  auto b = measured_quantity(Detector(m, Scale::real(moved)));
  CHECK(max_abs(a[0] - b[0]) < 1e-12);
}

TEST_CASE("statistical_expectation") {
  const Detector det(computational_measure(2), Scale::real({1.0, -1.0}));
  const DensityOperator rho(diag2(0.3, 0.7));
  auto one = [](const CVector&) { return CVector::Constant(1, 1.0); };
  auto ident = [](const CVector& a) { return a; };
  auto sq = [](const CVector& a) { return CVector::Constant(1, a.squaredNorm()); };
  CHECK(std::abs(statistical_expectation(det, rho, one)(0) - 1.0) < 1e-15);
  CHECK(std::abs(statistical_expectation(det, rho, ident)(0) - (-0.4)) < 1e-15);
  test::Random rng(8);
  for (int i = 0; i < 10; ++i) {
    DensityOperator r(rng.density(2));
    CHECK(std::abs(statistical_expectation(det, r, sq)(0) - 1.0) < 1e-14);
  }
  // expectation form of Born's rule on random detectors
  for (int trial = 0; trial < 50; ++trial) {
    const int d = rng.integer(1, 4), k = rng.integer(1, 6);
    QuantumMeasure m(rng.measure(d, k));
    std::vector<CVector> vals;
    for (int i = 0; i < k; ++i) {
      CVector a(2);
      a << Complex(rng.normal(), rng.normal()), Complex(rng.normal() + i, 0);
      vals.push_back(a);
    }
    Detector dk(m, Scale(vals));
    DensityOperator r(rng.density(d));
    auto stat = statistical_expectation(dk, r, ident);
    auto a = measured_quantity(dk);
    for (int j = 0; j < 2; ++j) CHECK(std::abs(stat(j) - quantum_value(r, a[static_cast<std::size_t>(j)])) < 1e-12);
  }
  try {
    statistical_expectation(det, DensityOperator(diag2(0.6, 0.7)), one);
    FAIL("expected failure");
  } catch (const ContractViolation& e) {
    CHECK(std::string(e.what()).find("trace 1.3") != std::string::npos);
  }
}

TEST_CASE("is_projective") {
  CHECK(is_projective(computational_measure(2)).projective);
  CHECK(is_projective(QuantumMeasure({CMatrix::Identity(2, 2)})).projective);
  auto tet = is_projective(tetrahedron_measure());
  CHECK_FALSE(tet.projective);
  // P^2 - P = -P/2 for these elements; its largest entry is (1 + 1/sqrt3)/8
  CHECK(tet.max_defect >= (1.0 + 1.0 / std::sqrt(3.0)) / 8.0 - 1e-12);
}

TEST_CASE("informational_completeness") {
  auto comp = informational_completeness(computational_measure(2));
  CHECK(comp.rank == 2);
  CHECK(comp.rank == stacked_rank(computational_measure(2).elements()));
  CHECK_FALSE(comp.complete);

  auto six = informational_completeness(pauli_six_measure());
  CHECK(six.rank == 4);
  CHECK(six.rank == stacked_rank(pauli_six_measure().elements()));
  CHECK(six.complete);
  CHECK_FALSE(six.minimal);

  auto tet = informational_completeness(tetrahedron_measure());
  CHECK(tet.rank == stacked_rank(tetrahedron_measure().elements()));
  CHECK(tet.rank == 4);
  CHECK(tet.complete);
  CHECK(tet.minimal);
}

TEST_CASE("coherent_partition_measure") {
  SUBCASE("single cell, vacuum truncation matches the radial integral") {
    const double radius = 1.3;
    auto m = coherent_partition_measure(0, {[](Complex) { return 1.0; }}, radius, {4000, 8});
    REQUIRE(m.size() == 2);
    const double oracle =
        test::simpson([](double r) { return 2.0 * r * std::exp(-r * r); }, 0.0, radius, 4000);
    CHECK(oracle == doctest::Approx(1.0 - std::exp(-radius * radius)).epsilon(1e-12));
    CHECK(std::abs(m[0](0, 0).real() - oracle) < 1e-7);
  }
  SUBCASE("elements and remainder sum to the identity") {
    auto cells = std::vector<PhaseSpaceWeight>{
        [](Complex a) { return a.real() > 0 ? 0.7 : 0.2; },
        [](Complex a) { return a.real() > 0 ? 0.3 : 0.0; },
        [](Complex a) { return a.real() > 0 ? 0.0 : 0.8; }};
    auto m = coherent_partition_measure(4, cells, 2.0, {100, 64});
    CMatrix sum = CMatrix::Zero(5, 5);
    for (const auto& p : m.elements()) sum += p;
    CHECK(max_abs(sum - CMatrix::Identity(5, 5)) < 1e-14);
  }
  SUBCASE("half-disc cells have equal diagonals") {
    auto cells = std::vector<PhaseSpaceWeight>{[](Complex a) { return a.real() > 0 ? 1.0 : 0.0; },
                                               [](Complex a) { return a.real() > 0 ? 0.0 : 1.0; }};
    auto m = coherent_partition_measure(5, cells, 2.5, {150, 128});
    for (int n = 0; n < 6; ++n) CHECK(std::abs(m[0](n, n) - m[1](n, n)) < 1e-12);
  }
  SUBCASE("coarse quadrature on a large disc is rejected") {
    try {
      coherent_partition_measure(0, {[](Complex) { return 1.0; }}, 2.0, {1, 1});
      FAIL("expected failure");
    } catch (const InfeasibleError& e) {
      CHECK(std::string(e.what()).find("truncation insufficient") != std::string::npos);
    }
  }
  SUBCASE("invalid weights") {
    CHECK_THROWS_AS(coherent_partition_measure(1, {[](Complex) { return -1.0; }}, 1.0), ContractViolation);
    CHECK_THROWS_AS(coherent_partition_measure(1, {[](Complex) { return 0.5; }}, 1.0), ContractViolation);
  }
}
