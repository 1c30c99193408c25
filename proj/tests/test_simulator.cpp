#include "doctest.h"
#include "support.hpp"

#include "qtomo/rng.hpp"
#include "qtomo/simulator.hpp"

using namespace qtomo;

namespace {
CMatrix diag2(double a, double b) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}
}  // namespace

TEST_CASE("counter generator") {
  CounterRng a(42), b(42), c(43);
  CHECK(a.bits(0) == b.bits(0));
  CHECK(a.bits(0) != c.bits(0));
  CHECK(a.bits(0) != a.bits(1));
  CHECK(a.derive(1).bits(0) != a.derive(2).bits(0));
  // SplitMix64 reference output for state 0 after one increment
  CHECK(CounterRng::mix(0x9e3779b97f4a7c15ULL) == 0xe220a8397b1dcdafULL);
  double mean = 0.0;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const double u = a.uniform(i);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    mean += u;
  }
  CHECK(std::abs(mean / 1e5 - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / 1e5));
}

TEST_CASE("sample_detections examples") {
  const auto comp = computational_measure(2);
  auto empty = sample_detections(DensityOperator(diag2(0.5, 0.5)), comp, 0, 1);
  CHECK(empty.shots() == 0);
  CHECK(empty.counts() == std::vector<std::uint64_t>{0, 0, 0});

  auto all = sample_detections(DensityOperator(diag2(1, 0)), comp, 1000, 7);
  CHECK(all.counts() == std::vector<std::uint64_t>{0, 1000, 0});

  const std::uint64_t n = 1000000;
  auto half = sample_detections(DensityOperator(diag2(0.5, 0.5)), comp, n, 11);
  auto c = half.counts();
  CHECK(c[0] == 0);
  CHECK(c[1] + c[2] == n);
  CHECK(std::abs(double(c[1]) - 5e5) <= 4.0 * std::sqrt(n * 0.25));
  CHECK(half.generator == std::string(CounterRng::name));
  CHECK(half.seed == 11);
  CHECK(half.elements == 2);
}

TEST_CASE("sampling contract") {
  const auto comp = computational_measure(2);
  CHECK_THROWS_AS(sample_detections(DensityOperator(diag2(0.5, 0.7)), comp, 10, 1), ContractViolation);
  RVector bad(2);
  bad << 0.6, 0.6;
  CHECK_THROWS_AS(sampling_distribution(bad), ContractViolation);
  RVector neg(2);
  neg << 1.1, -0.1;
  CHECK_THROWS_AS(sampling_distribution(neg), ContractViolation);
  RVector tiny(2);
  tiny << 1.0 + 1e-12, -1e-12;
  RVector clipped = sampling_distribution(tiny);
  CHECK(clipped(1) == 0.0);
  CHECK(clipped.sum() == doctest::Approx(1.0));
}

TEST_CASE("determinism and thread independence") {
  test::Random rng(3);
  QuantumMeasure m(rng.measure(3, 5));
  DensityOperator rho(rng.density(3));
  auto a = sample_detections(rho, m, 200000, 99);
  auto b = sample_detections(rho, m, 200000, 99);
  SamplingOptions par;
  par.threads = 4;
  auto c = sample_detections(rho, m, 200000, 99, par);
  CHECK(a.labels == b.labels);
  CHECK(a.labels == c.labels);
  auto d = sample_detections(rho, m, 200000, 100);
  CHECK(a.labels != d.labels);
}

TEST_CASE("law of large numbers over a fixed seed schedule") {
  test::Random rng(4);
  QuantumMeasure m(rng.measure(2, 4));
  DensityOperator rho(rng.density(2));
  RVector p = response_probabilities(m, rho);
  double previous = 1.0;
  for (std::uint64_t n : {1000ULL, 10000ULL, 100000ULL, 1000000ULL}) {
    auto r = empirical_rates(sample_detections(rho, m, n, 2024));
    double worst = 0.0;
    for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(r.rates(k + 1) - p(k)));
    CHECK(worst < previous);
    previous = worst;
    if (n == 1000000ULL)
      for (int k = 0; k < 4; ++k) CHECK(std::abs(r.rates(k + 1) - p(k)) <= 5.0 * std::sqrt(p(k) * (1 - p(k)) / n));
  }
}

TEST_CASE("filtered detections report the lost intensity as null") {
  auto filter = superop_from_kraus(KrausSet({matrix_unit(2, 0, 0)}));
  const std::uint64_t n = 400000;
  auto log = sample_filtered_detections(DensityOperator(CMatrix::Constant(2, 2, 0.5)), filter,
                                        computational_measure(2), n, 5);
  auto c = log.counts();
  CHECK(c[2] == 0);
  CHECK(std::abs(double(c[0]) - 0.5 * n) <= 5.0 * std::sqrt(n * 0.25));
}

TEST_CASE("empirical_rates") {
  EventLog same{"x", 0, 2, std::vector<std::uint32_t>(50, 2)};
  auto r = empirical_rates(same);
  CHECK(r.rates(2) == 1.0);
  CHECK(r.stderrs(2) == 0.0);

  EventLog mix{"x", 0, 2, {}};
  mix.labels.insert(mix.labels.end(), 300, 1);
  mix.labels.insert(mix.labels.end(), 700, 2);
  auto q = empirical_rates(mix);
  CHECK(q.rates(1) == doctest::Approx(0.3));
  CHECK(q.rates(2) == doctest::Approx(0.7));
  CHECK(q.stderrs(1) == doctest::Approx(0.0145).epsilon(0.01));
  CHECK(q.stderrs(2) == doctest::Approx(0.0145).epsilon(0.01));
  CHECK(q.rates.sum() == doctest::Approx(1.0));

  CHECK_THROWS_AS(empirical_rates(EventLog{"x", 0, 2, {}}), ContractViolation);
  CHECK_THROWS_AS(empirical_rates(EventLog{"x", 0, 2, {3}}), ContractViolation);
}

TEST_CASE("coincidences with a projective instrument") {
  auto p0 = superop_from_kraus(KrausSet({matrix_unit(2, 0, 0)}));
  auto p1 = superop_from_kraus(KrausSet({matrix_unit(2, 1, 1)}));
  Instrument inst({p0, p1});
  DensityOperator rho(diag2(0.3, 0.7));
  RMatrix joint = coincidence_probabilities(rho, inst, computational_measure(2));
  REQUIRE(joint.rows() == 3);
  REQUIRE(joint.cols() == 3);
  CHECK(joint(1, 1) == doctest::Approx(0.3));
  CHECK(joint(2, 2) == doctest::Approx(0.7));
  CHECK(joint.sum() == doctest::Approx(1.0));
  CHECK(std::abs(joint(1, 2)) + std::abs(joint(2, 1)) + joint.row(0).cwiseAbs().sum() < 1e-15);

  const std::uint64_t n = 200000;
  auto log = sample_coincidences(rho, inst, computational_measure(2), n, 3);
  auto counts = log.counts();
  CHECK(counts(1, 2) == 0);
  CHECK(counts(2, 1) == 0);
  CHECK(counts(1, 1) + counts(2, 2) == n);
  auto rates = empirical_rates(log);
  CHECK((rates.branch_marginal - rates.joint.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((rates.element_marginal - rates.joint.colwise().sum().transpose()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(rates.branch_marginal(1) - 0.3) <= 5.0 * std::sqrt(0.21 / n));
}

TEST_CASE("coincidence edge cases") {
  Instrument id({SuperOperator::identity(2)});
  test::Random rng(5);
  DensityOperator rho(rng.density(2));
  RMatrix joint = coincidence_probabilities(rho, id, tetrahedron_measure());
  CHECK(joint.rowwise().sum()(1) == doctest::Approx(1.0));
  CHECK(std::abs(joint.row(0).sum()) < 1e-12);

  // scaling the source and renormalizing leaves the statistics unchanged
  DensityOperator faint(rho.matrix() * 1e-8);
  auto a = sample_coincidences(normalize(faint), id, tetrahedron_measure(), 5000, 8);
  auto b = sample_coincidences(rho, id, tetrahedron_measure(), 5000, 8);
  CHECK(a.element == b.element);
  CHECK(a.branch == b.branch);
}

TEST_CASE("coincidence marginals follow branch intensities") {
  test::Random rng(6);
  auto k1 = rng.kraus(2, 2), k2 = rng.kraus(2, 1);
  // scale so the branches leave 20% of the largest intensity to the null branch
  const double s = std::sqrt(0.8 / max_eigenvalue(pi_operator(KrausSet(k1)) + pi_operator(KrausSet(k2))));
  for (auto& t : k1) t *= s;
  for (auto& t : k2) t *= s;
  auto e1 = superop_from_kraus(KrausSet(k1));
  auto e2 = superop_from_kraus(KrausSet(k2));
  Instrument inst({e1, e2});
  DensityOperator rho(rng.density(2));
  const std::uint64_t n = 1000000;
  auto rates = empirical_rates(sample_coincidences(rho, inst, tetrahedron_measure(), n, 77));
  for (std::size_t j = 0; j <= 2; ++j) {
    const double pj = inst.branch(j).apply(rho.matrix()).trace().real();
    CHECK(std::abs(rates.branch_marginal(static_cast<Eigen::Index>(j)) - pj) <= 5.0 * std::sqrt(pj * (1 - pj) / n));
  }
}
