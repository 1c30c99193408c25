#pragma once

// Linear maps on d x d matrices and their Choi / Kraus representations.
//
// A superoperator is stored as the d^2 x d^2 matrix M acting on row-major
// vectorizations, so that M(a*d + b, j*d + k) = E_{abjk} and
// E(X)_{ab} = sum_{jk} E_{abjk} X_{jk}.

#include <functional>
#include <vector>

#include "qtomo/core.hpp"

namespace qtomo {

class SuperOperator {
 public:
  SuperOperator(int dim, CMatrix matrix);

  static SuperOperator identity(int dim);
  static SuperOperator zero(int dim);
  /// X -> X^T.
  static SuperOperator transpose_map(int dim);
  /// Tabulates a linear map from its action on the matrix units.
  static SuperOperator from_action(int dim, const std::function<CMatrix(const CMatrix&)>& f);

  int dim() const noexcept { return dim_; }
  const CMatrix& matrix() const noexcept { return m_; }
  Complex component(int a, int b, int j, int k) const;

  CMatrix apply(const CMatrix& x) const;
  DensityOperator apply(const DensityOperator& rho) const;

  /// max over matrix units of ||E(X^*) - E(X)^*||_max.
  double hermiticity_defect() const;

  SuperOperator operator+(const SuperOperator& other) const;
  SuperOperator operator*(Complex s) const;

 private:
  int dim_;
  CMatrix m_;
};

/// The Choi transform: components C_{abjk} = E_{ajbk}, stored with the same
/// row-major layout as SuperOperator. As a d^2 x d^2 matrix it is Hermitian
/// PSD exactly when E is completely positive.
class ChoiMatrix {
 public:
  ChoiMatrix(int dim, CMatrix matrix);

  int dim() const noexcept { return dim_; }
  const CMatrix& matrix() const noexcept { return c_; }

  /// The Choi transform viewed as a superoperator itself.
  SuperOperator as_superoperator() const { return SuperOperator(dim_, c_); }

 private:
  int dim_;
  CMatrix c_;
};

ChoiMatrix choi_transform(const SuperOperator& e);
/// Inverse transform (the same index permutation).
SuperOperator from_choi(const ChoiMatrix& c);

class KrausSet {
 public:
  explicit KrausSet(std::vector<CMatrix> operators);

  int dim() const noexcept { return static_cast<int>(ops_.front().rows()); }
  std::size_t size() const noexcept { return ops_.size(); }
  const std::vector<CMatrix>& operators() const noexcept { return ops_; }

 private:
  std::vector<CMatrix> ops_;
};

/// E(X) = sum_l T_l X T_l^*.
SuperOperator superop_from_kraus(const KrausSet& k);

struct CPReport {
  double hermitian_defect = 0.0;
  double min_choi_eigenvalue = 0.0;
  bool cp = false;
};

CPReport is_completely_positive(const SuperOperator& e, double tol = 1e-9);

/// T_l = sqrt(lambda_l) unvec(v_l) from the Choi eigendecomposition, in
/// descending eigenvalue order, each eigenvector phased so its first
/// nonzero component is real positive. Eigenvalues <= tol * lambda_max are
/// dropped. Throws ContractViolation when C is indefinite beyond tol or zero.
KrausSet kraus_from_choi(const ChoiMatrix& c, double tol = 1e-9);

/// Choi rank at threshold tol * lambda_max.
int choi_rank(const ChoiMatrix& c, double tol = 1e-9);

/// pi(E) = sum_l T_l^* T_l; tr E(rho) = tr(pi(E) rho).
CMatrix pi_operator(const KrausSet& k);
CMatrix pi_operator(const SuperOperator& e);

struct FilterClass {
  bool lossless = false;
  bool passive = false;
  bool active = false;
  bool mixing = false;
  int choi_rank = 0;
  double max_pi_eigenvalue = 0.0;
};

FilterClass classify(const KrausSet& k, double tol = 1e-9);
FilterClass classify(const SuperOperator& e, double tol = 1e-9);

/// Clip negative Choi eigenvalues and rebuild; the nearest CP map in
/// Frobenius norm on the Choi matrix.
SuperOperator project_cp(const SuperOperator& e);

/// Indexed family of completely positive maps E_1..E_J with
/// sum_j pi(E_j) <= 1. The null branch (label 0) is R X R^* with
/// R = sqrt(1 - sum_j pi(E_j)), so that branch rates sum to the intensity.
class Instrument {
 public:
  explicit Instrument(std::vector<SuperOperator> branches, double tol = 1e-9);

  int dim() const noexcept { return branches_.front().dim(); }
  std::size_t size() const noexcept { return branches_.size(); }
  const std::vector<SuperOperator>& branches() const noexcept { return branches_; }
  const SuperOperator& null_branch() const noexcept { return null_; }
  /// Branch j in 0..J, where 0 is the null branch.
  const SuperOperator& branch(std::size_t j) const { return j == 0 ? null_ : branches_.at(j - 1); }

 private:
  std::vector<SuperOperator> branches_;
  SuperOperator null_;
};

}  // namespace qtomo
