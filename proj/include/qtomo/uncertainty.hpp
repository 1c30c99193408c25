#pragma once

// Quantum uncertainty of operator-valued quantities and its relation to the
// statistical spread of measurement results. States are trace-one.

#include <initializer_list>
#include <optional>
#include <vector>

#include "qtomo/measures.hpp"

namespace qtomo {

/// X in (Lin H)^m. For vectors, |X|^2 means X^* X = sum_j X_j^* X_j.
class QuantityVector {
 public:
  explicit QuantityVector(std::vector<CMatrix> components);
  QuantityVector(std::initializer_list<CMatrix> components)
      : QuantityVector(std::vector<CMatrix>(components)) {}
  QuantityVector(const CMatrix& single);  // NOLINT: implicit scalar quantity

  int dim() const noexcept { return static_cast<int>(components_.front().rows()); }
  std::size_t size() const noexcept { return components_.size(); }
  const std::vector<CMatrix>& components() const noexcept { return components_; }
  const CMatrix& operator[](std::size_t j) const { return components_[j]; }

  /// sum_j (X_j - xi_j)^* (X_j - xi_j).
  CMatrix squared_distance(const CVector& xi) const;

 private:
  std::vector<CMatrix> components_;
};

struct UncertaintyReport {
  CVector mean;        // <X_j>
  double sigma = 0.0;  // sqrt(<|X - mean|^2>)
  CMatrix covariance;  // C_jk = <(X_j - mean_j)^* (X_k - mean_k)>, so tr C = sigma^2
};

UncertaintyReport q_uncertainty(const DensityOperator& rho, const QuantityVector& x,
                                double tol = 1e-9);

struct RobertsonCheck {
  double lhs = 0.0;  // sigma_A sigma_B
  double rhs = 0.0;  // |<[A,B]>| / 2
  bool satisfied = false;
};

RobertsonCheck robertson_check(const DensityOperator& rho, const CMatrix& a, const CMatrix& b,
                               double slack = 1e-10);

struct StatisticalSpread {
  CVector mean;         // A-bar, equal to the statistical mean of the results
  double e_var = 0.0;   // E(|a_k - A-bar|^2)
  double sigma2 = 0.0;  // sigma_A^2
  double excess = 0.0;  // e_var - sigma2 >= 0
};

/// Compares the spread of results of a detector with the q-uncertainty of
/// the quantity A it measures.
StatisticalSpread statistical_vs_quantum(const Detector& det, const DensityOperator& rho,
                                         double tol = 1e-9);

struct MeasurementUncertainty {
  double rmse = 0.0;            // sqrt(E(|a_k - X-bar|^2))
  double bias = 0.0;            // |A-bar - X-bar|
  double delta = 0.0;           // sqrt(E(|a_k - X-bar|^2) + (sigma_X^2 - sigma_A^2)_+)
  double e_var_about_x = 0.0;   // E(|a_k - X-bar|^2)
  double e_var = 0.0;           // E(|a_k - A-bar|^2)
  double sigma_x2 = 0.0;
  double sigma_a2 = 0.0;
};

/// Uncertainty incurred when the detector's results are used as values of X.
MeasurementUncertainty measurement_uncertainty(const Detector& det, const DensityOperator& rho,
                                               const QuantityVector& x, double tol = 1e-9);

struct SpectrumMembership {
  double min_eigenvalue = 0.0;  // of |X - xi|^2
  bool member = false;
  std::optional<StateVector> witness;
};

/// xi is in the joint spectrum iff states make <|X - xi|^2> arbitrarily
/// small; in finite dimension iff the smallest eigenvalue of |X - xi|^2
/// vanishes (within tol).
SpectrumMembership spectrum_membership(const QuantityVector& x, const CVector& xi,
                                       double tol = 1e-10);

}  // namespace qtomo
