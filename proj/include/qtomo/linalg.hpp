#pragma once

// Dense complex linear algebra shared by every module. Matrices are Eigen
// dynamic-size complex matrices; vectorization is row-major throughout:
// vec(X)[a*d + b] = X(a, b).

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qtomo {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Pauli matrix sigma_k for k in {0,1,2,3}; sigma_0 is the 2x2 identity.
CMatrix pauli(int k);

/// Matrix unit e_j e_k^* of size d.
CMatrix matrix_unit(int d, int j, int k);

CVector vec(const CMatrix& x);
CMatrix unvec(const CVector& v, int d);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Largest absolute entry.
double max_abs(const CMatrix& x);
bool all_finite(const CMatrix& x);

CMatrix hermitian_part(const CMatrix& x);
double hermitian_defect(const CMatrix& x);

struct HermitianEigen {
  RVector values;   // ascending
  CMatrix vectors;  // columns
};

/// Eigendecomposition of the Hermitian part of x.
HermitianEigen hermitian_eigen(const CMatrix& x);

double min_eigenvalue(const CMatrix& x);
double max_eigenvalue(const CMatrix& x);

/// Rebuild V diag(f(lambda)) V^* from a decomposition.
template <typename F>
CMatrix spectral_apply(const HermitianEigen& eig, F&& f) {
  CVector diag(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) diag(i) = f(eig.values(i));
  return eig.vectors * diag.asDiagonal() * eig.vectors.adjoint();
}

double spectral_norm(const CMatrix& x);

/// Trace norm ||x||_1 of the Hermitian part.
double trace_norm(const CMatrix& x);

/// Half the trace norm of the difference.
double trace_distance(const CMatrix& a, const CMatrix& b);

/// Principal square root of a PSD matrix, negative eigenvalues clipped.
CMatrix psd_sqrt(const CMatrix& x);

/// Hilbert-Schmidt Gram matrix G_ij = Re tr(A_i^* A_j) of Hermitian matrices.
RMatrix real_gram(const std::vector<CMatrix>& elements);

/// Numerical rank from singular values, threshold tol * max singular value.
int numerical_rank(const RMatrix& m, double rtol = 1e-10);
int numerical_rank(const CMatrix& m, double rtol = 1e-10);

/// Ratio of largest to smallest singular value (infinity if singular).
double condition_number(const RMatrix& m);
double condition_number(const CMatrix& m);

}  // namespace qtomo
