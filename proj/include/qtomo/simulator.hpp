#pragma once

// Seeded generation of detection and coincidence events.
//
// Labels: detector element k is reported as label k in 1..K and label 0 is
// the null response (no element fired). Instrument branch j is 1..J with 0
// the null branch.

#include <cstdint>
#include <string>
#include <vector>

#include "qtomo/measures.hpp"
#include "qtomo/superop.hpp"

namespace qtomo {

struct SamplingOptions {
  unsigned threads = 1;
  double tol = 1e-9;
};

struct EventLog {
  std::string generator;
  std::uint64_t seed = 0;
  std::size_t elements = 0;          // K
  std::vector<std::uint32_t> labels;  // indexed by shot

  std::size_t shots() const noexcept { return labels.size(); }
  /// counts[label] for label in 0..K.
  std::vector<std::uint64_t> counts() const;
};

struct CoincidenceLog {
  std::string generator;
  std::uint64_t seed = 0;
  std::size_t branches = 0;  // J
  std::size_t elements = 0;  // K
  std::vector<std::uint32_t> branch;
  std::vector<std::uint32_t> element;

  std::size_t shots() const noexcept { return branch.size(); }
  /// counts(j, k) for j in 0..J, k in 0..K.
  Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic> counts() const;
};

/// Validates a probability vector for sampling: entries above -tol are
/// clipped to zero, the sum must be 1 within tol, and the result is
/// renormalized.
RVector sampling_distribution(const RVector& p, double tol = 1e-9);

/// Inverse-CDF multinomial draws of outcome indices 0..n-1 for shots
/// 0..N-1. Shot i consumes counter i of the generator.
std::vector<std::uint32_t> sample_categorical(const RVector& p, std::uint64_t shots,
                                              std::uint64_t seed, const SamplingOptions& opt = {});

/// Detection events for a trace-one source on a detector.
EventLog sample_detections(const DensityOperator& source, const QuantumMeasure& m,
                           std::uint64_t shots, std::uint64_t seed,
                           const SamplingOptions& opt = {});

/// Events when the source passes a filter before the detector; intensity
/// lost in the filter shows up as null responses.
EventLog sample_filtered_detections(const DensityOperator& source, const SuperOperator& filter,
                                    const QuantumMeasure& m, std::uint64_t shots,
                                    std::uint64_t seed, const SamplingOptions& opt = {});

/// Joint probabilities tr(P'_k E_j(rho)), rows j = 0..J (0 = null branch),
/// columns k = 0..K (column 0 is the second detector's null response, zero
/// for a complete measure).
RMatrix coincidence_probabilities(const DensityOperator& source, const Instrument& inst,
                                  const QuantumMeasure& second, double tol = 1e-9);

CoincidenceLog sample_coincidences(const DensityOperator& source, const Instrument& inst,
                                   const QuantumMeasure& second, std::uint64_t shots,
                                   std::uint64_t seed, const SamplingOptions& opt = {});

struct RateEstimate {
  RVector rates;    // index = label
  RVector stderrs;  // sqrt(p(1-p)/N)
  std::uint64_t shots = 0;
};

RateEstimate empirical_rates(const EventLog& log);

struct CoincidenceRates {
  RMatrix joint;  // (J+1) x (K+1)
  RMatrix joint_stderr;
  RVector branch_marginal;    // row sums
  RVector branch_stderr;
  RVector element_marginal;   // column sums
  std::uint64_t shots = 0;
};

CoincidenceRates empirical_rates(const CoincidenceLog& log);

}  // namespace qtomo
