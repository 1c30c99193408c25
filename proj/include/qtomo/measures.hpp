#pragma once

// Discrete quantum measures (POVMs), scales, and detectors.

#include <functional>
#include <vector>

#include "qtomo/core.hpp"

namespace qtomo {

struct MeasureReport {
  std::vector<double> min_eigenvalues;  // per element
  double sum_defect = 0.0;              // ||sum_k P_k - 1||_max
  bool all_nonzero = true;
  bool ok = false;
};

/// Checks positivity of every element, the partition of unity, and that no
/// element vanishes.
MeasureReport validate_measure(const std::vector<CMatrix>& elements, double tol = 1e-9);

/// Family of PSD Hermitian operators P_1..P_K summing to the identity.
class QuantumMeasure {
 public:
  explicit QuantumMeasure(std::vector<CMatrix> elements, double tol = 1e-9);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return elements_.size(); }
  const std::vector<CMatrix>& elements() const noexcept { return elements_; }
  const CMatrix& operator[](std::size_t k) const { return elements_[k]; }

 private:
  int dim_;
  std::vector<CMatrix> elements_;
};

/// Distinct values a_k in C^m assigned to detection elements.
class Scale {
 public:
  explicit Scale(std::vector<CVector> values);
  /// Scalar (m = 1) scale.
  static Scale real(const std::vector<double>& values);

  std::size_t size() const noexcept { return values_.size(); }
  int components() const noexcept { return components_; }
  const std::vector<CVector>& values() const noexcept { return values_; }
  bool is_real() const;

 private:
  std::vector<CVector> values_;
  int components_;
};

class Detector {
 public:
  Detector(QuantumMeasure measure, Scale scale);

  const QuantumMeasure& measure() const noexcept { return measure_; }
  const Scale& scale() const noexcept { return scale_; }

 private:
  QuantumMeasure measure_;
  Scale scale_;
};

/// p_k = tr(rho P_k). Entries sum to tr(rho).
RVector response_probabilities(const QuantumMeasure& m, const DensityOperator& rho,
                               double tol = 1e-9);

/// A_j = sum_k (a_k)_j P_k for each scale component j.
std::vector<CMatrix> measured_quantity(const Detector& det);

using ScaleFunction = std::function<CVector(const CVector&)>;

/// sum_k p_k f(a_k) for a trace-one state.
CVector statistical_expectation(const Detector& det, const DensityOperator& rho,
                                const ScaleFunction& f, double tol = 1e-9);

struct ProjectivityReport {
  bool projective = false;
  double max_defect = 0.0;  // max_{j,k} ||P_j P_k - delta_jk P_k||_max
};

ProjectivityReport is_projective(const QuantumMeasure& m, double tol = 1e-10);

struct CompletenessReport {
  int rank = 0;
  bool complete = false;
  bool minimal = false;
};

CompletenessReport informational_completeness(const QuantumMeasure& m);

// Built-in measures.
QuantumMeasure computational_measure(int d);
/// Qubit measure with elements (1 +- sigma_i)/6, ordered x+, x-, y+, y-, z+, z-.
QuantumMeasure pauli_six_measure();
/// Minimal informationally complete qubit measure (1 + v_k . sigma)/4 with the
/// vertices v_k of a regular tetrahedron.
QuantumMeasure tetrahedron_measure();

struct PolarGrid {
  int radial = 200;
  int angular = 256;
};

using PhaseSpaceWeight = std::function<double(Complex)>;

/// Coherent-state measure on truncated Fock space of dimension n_max + 1.
///
/// Element k is pi^{-1} int_{|alpha| < radius} w_k(alpha) |alpha><alpha| dalpha
/// by the midpoint rule on a polar grid; a final remainder element
/// 1 - sum_k P_k is appended. Throws InfeasibleError when the remainder is
/// not PSD ("truncation insufficient").
QuantumMeasure coherent_partition_measure(int n_max, const std::vector<PhaseSpaceWeight>& cells,
                                          double radius, PolarGrid grid = {},
                                          double tol = 1e-9);

/// Truncated coherent state e^{-|a|^2/2} sum_n a^n/sqrt(n!) |n>, n <= n_max.
CVector coherent_state(Complex alpha, int n_max);

}  // namespace qtomo
