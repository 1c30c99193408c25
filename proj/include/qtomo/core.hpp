#pragma once

// Quantum states and values on a finite-dimensional Hilbert space C^d.
//
// Densities carry intensity: tr(rho) is the source intensity and need not be
// one. Use normalize() when probabilities are wanted.

#include <vector>

#include "qtomo/errors.hpp"
#include "qtomo/linalg.hpp"

namespace qtomo {

struct Tolerances {
  double herm = 1e-10;  // absolute, max-norm of rho - rho^*
  double psd = 1e-9;    // relative to max(trace, 1)
};

/// Intensity-carrying state vector psi with rho = psi psi^*.
class StateVector {
 public:
  explicit StateVector(CVector components);

  int dim() const noexcept { return static_cast<int>(components_.size()); }
  const CVector& components() const noexcept { return components_; }
  double intensity() const { return components_.squaredNorm(); }

 private:
  CVector components_;
};

/// Positive semidefinite Hermitian operator. Construction validates and
/// stores the Hermitian part of the input.
class DensityOperator {
 public:
  explicit DensityOperator(const CMatrix& matrix, const Tolerances& tol = {});

  static DensityOperator dark(int dim);
  static DensityOperator maximally_mixed(int dim);

  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
  const CMatrix& matrix() const noexcept { return matrix_; }
  double trace() const { return matrix_.trace().real(); }

 private:
  CMatrix matrix_;
};

struct DensityReport {
  double hermitian_defect = 0.0;
  double min_eigenvalue = 0.0;
  double trace = 0.0;
  bool ok = false;
};

/// ok iff hermitian_defect <= tol and min_eigenvalue >= -tol * max(trace, 1).
DensityReport validate_density(const CMatrix& rho, double tol = 1e-9);

/// tr(rho X).
Complex quantum_value(const DensityOperator& rho, const CMatrix& x);

DensityOperator density_from_state(const StateVector& psi);

/// rho / tr(rho); the dark state has no normalization.
DensityOperator normalize(const DensityOperator& rho);

/// d^2 Hermitian matrices spanning the real space of Hermitian operators.
class OperatorBasis {
 public:
  OperatorBasis(int dim, std::vector<CMatrix> elements);

  int dim() const noexcept { return dim_; }
  const std::vector<CMatrix>& elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }

  /// Real coefficients c with sum_i c_i B_i = h for Hermitian h.
  RVector coefficients(const CMatrix& h) const;
  CMatrix resum(const RVector& coefficients) const;

 private:
  int dim_;
  std::vector<CMatrix> elements_;
  Eigen::LDLT<RMatrix> gram_;
};

/// Identity, the d(d-1)/2 symmetric off-diagonal pairs E_jk + E_kj, the
/// d(d-1)/2 antisymmetric pairs -iE_jk + iE_kj, then d-1 traceless diagonals
/// (generalized Gell-Mann normalization). For d = 2 this is exactly
/// (sigma_0, sigma_1, sigma_2, sigma_3).
OperatorBasis hermitian_basis(int d);

}  // namespace qtomo
