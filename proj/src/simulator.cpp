#include "qtomo/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "qtomo/rng.hpp"

namespace qtomo {

namespace {

void require_normalized(const DensityOperator& source, double tol) {
  if (std::abs(source.trace() - 1.0) > tol) {
    std::ostringstream os;
    os << "source must be normalized to trace one (trace " << source.trace() << ")";
    throw ContractViolation(os.str());
  }
}

}  // namespace

std::vector<std::uint64_t> EventLog::counts() const {
  std::vector<std::uint64_t> c(elements + 1, 0);
  for (auto l : labels) {
    if (l > elements) throw ContractViolation("event label " + std::to_string(l) + " outside 0.." + std::to_string(elements));
    ++c[l];
  }
  return c;
}

Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic> CoincidenceLog::counts() const {
  Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic> c =
      Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(
          static_cast<Eigen::Index>(branches + 1), static_cast<Eigen::Index>(elements + 1));
  if (element.size() != branch.size()) throw ContractViolation("coincidence log columns differ in length");
  for (std::size_t i = 0; i < branch.size(); ++i) {
    if (branch[i] > branches || element[i] > elements)
      throw ContractViolation("coincidence label outside the instrument or detector range");
    ++c(branch[i], element[i]);
  }
  return c;
}

RVector sampling_distribution(const RVector& p, double tol) {
  if (p.size() == 0) throw ContractViolation("empty probability vector");
  RVector q = p;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (!std::isfinite(q(i))) throw ContractViolation("non-finite probability");
    if (q(i) < -tol) {
      std::ostringstream os;
      os << "probability " << i << " is negative beyond tolerance (" << q(i) << ")";
      throw ContractViolation(os.str());
    }
    q(i) = std::max(q(i), 0.0);
  }
  const double sum = q.sum();
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream os;
    os << "probabilities sum to " << sum << ", not 1";
    throw ContractViolation(os.str());
  }
  return q / sum;
}

std::vector<std::uint32_t> sample_categorical(const RVector& p, std::uint64_t shots,
                                              std::uint64_t seed, const SamplingOptions& opt) {
  const RVector q = sampling_distribution(p, opt.tol);
  std::vector<double> cdf(static_cast<std::size_t>(q.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) cdf[static_cast<std::size_t>(i)] = acc += q(i);
  cdf.back() = 1.0;
  // outcomes with zero mass are never selected: upper_bound skips equal cdf values
  const CounterRng rng(seed);
  std::vector<std::uint32_t> out(shots);
  auto fill = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t s = begin; s < end; ++s) {
      const double u = rng.uniform(s);
      out[s] = static_cast<std::uint32_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    }
  };
  const unsigned threads = std::max(1u, opt.threads);
  if (threads == 1 || shots < 100000) {
    fill(0, shots);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (shots + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t b = std::min<std::uint64_t>(shots, t * chunk);
      const std::uint64_t e = std::min<std::uint64_t>(shots, b + chunk);
      pool.emplace_back(fill, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

namespace {
EventLog make_log(const RVector& element_probs, std::uint64_t shots, std::uint64_t seed,
                  const SamplingOptions& opt) {
  // index 0 is the null response
  RVector p(element_probs.size() + 1);
  p(0) = 1.0 - element_probs.sum();
  p.tail(element_probs.size()) = element_probs;
  if (std::abs(p(0)) <= opt.tol) p(0) = 0.0;
  EventLog log;
  log.generator = std::string(CounterRng::name);
  log.seed = seed;
  log.elements = static_cast<std::size_t>(element_probs.size());
  log.labels = sample_categorical(p, shots, seed, opt);
  return log;
}
}  // namespace

EventLog sample_detections(const DensityOperator& source, const QuantumMeasure& m,
                           std::uint64_t shots, std::uint64_t seed, const SamplingOptions& opt) {
  require_normalized(source, opt.tol);
  return make_log(response_probabilities(m, source, opt.tol), shots, seed, opt);
}

EventLog sample_filtered_detections(const DensityOperator& source, const SuperOperator& filter,
                                    const QuantumMeasure& m, std::uint64_t shots,
                                    std::uint64_t seed, const SamplingOptions& opt) {
  require_normalized(source, opt.tol);
  const DensityOperator out = filter.apply(source);
  if (out.trace() > 1.0 + opt.tol) throw ContractViolation("filter amplifies the source intensity");
  return make_log(response_probabilities(m, out, opt.tol), shots, seed, opt);
}

RMatrix coincidence_probabilities(const DensityOperator& source, const Instrument& inst,
                                  const QuantumMeasure& second, double tol) {
  if (inst.dim() != source.dim() || second.dim() != source.dim())
    throw ContractViolation("instrument, detector and source dimensions differ");
  const auto rows = static_cast<Eigen::Index>(inst.size() + 1);
  const auto cols = static_cast<Eigen::Index>(second.size() + 1);
  RMatrix joint = RMatrix::Zero(rows, cols);
  for (Eigen::Index j = 0; j < rows; ++j) {
    const DensityOperator out(inst.branch(static_cast<std::size_t>(j)).apply(source.matrix()),
                              Tolerances{1e-8, tol});
    const RVector p = response_probabilities(second, out, tol);
    joint.row(j).tail(cols - 1) = p.transpose();
    joint(j, 0) = std::max(0.0, out.trace() - p.sum());
  }
  return joint;
}

CoincidenceLog sample_coincidences(const DensityOperator& source, const Instrument& inst,
                                   const QuantumMeasure& second, std::uint64_t shots,
                                   std::uint64_t seed, const SamplingOptions& opt) {
  require_normalized(source, opt.tol);
  const RMatrix joint = coincidence_probabilities(source, inst, second, opt.tol);
  RVector flat(joint.size());
  for (Eigen::Index j = 0; j < joint.rows(); ++j)
    for (Eigen::Index k = 0; k < joint.cols(); ++k) flat(j * joint.cols() + k) = joint(j, k);
  const auto draws = sample_categorical(flat, shots, seed, opt);
  CoincidenceLog log;
  log.generator = std::string(CounterRng::name);
  log.seed = seed;
  log.branches = inst.size();
  log.elements = second.size();
  log.branch.reserve(draws.size());
  log.element.reserve(draws.size());
  const auto cols = static_cast<std::uint32_t>(joint.cols());
  for (auto idx : draws) {
    log.branch.push_back(idx / cols);
    log.element.push_back(idx % cols);
  }
  return log;
}

namespace {
RVector binomial_stderr(const RVector& p, double n) {
  return (p.array() * (1.0 - p.array()) / n).max(0.0).sqrt().matrix();
}
}  // namespace

RateEstimate empirical_rates(const EventLog& log) {
  if (log.shots() == 0) throw ContractViolation("cannot estimate rates from an empty log");
  const auto counts = log.counts();
  RateEstimate r;
  r.shots = log.shots();
  const double n = static_cast<double>(r.shots);
  r.rates.resize(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i)
    r.rates(static_cast<Eigen::Index>(i)) = static_cast<double>(counts[i]) / n;
  r.stderrs = binomial_stderr(r.rates, n);
  return r;
}

CoincidenceRates empirical_rates(const CoincidenceLog& log) {
  if (log.shots() == 0) throw ContractViolation("cannot estimate rates from an empty log");
  CoincidenceRates r;
  r.shots = log.shots();
  const double n = static_cast<double>(r.shots);
  r.joint = log.counts().cast<double>() / n;
  r.joint_stderr = (r.joint.array() * (1.0 - r.joint.array()) / n).max(0.0).sqrt().matrix();
  r.branch_marginal = r.joint.rowwise().sum();
  r.branch_stderr = binomial_stderr(r.branch_marginal, n);
  r.element_marginal = r.joint.colwise().sum().transpose();
  return r;
}

}  // namespace qtomo
