#include "qtomo/core.hpp"

#include <cmath>
#include <sstream>

namespace qtomo {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::contract: return "contract_violation";
    case ErrorKind::input: return "input_error";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::numerical: return "numerical_failure";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// linear algebra helpers

CMatrix pauli(int k) {
  CMatrix s(2, 2);
  switch (k) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -kI, kI, 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw ContractViolation("pauli index must be in 0..3");
  }
  return s;
}

CMatrix matrix_unit(int d, int j, int k) {
  CMatrix e = CMatrix::Zero(d, d);
  e(j, k) = 1.0;
  return e;
}

CVector vec(const CMatrix& x) {
  CVector v(x.size());
  for (Eigen::Index a = 0; a < x.rows(); ++a)
    for (Eigen::Index b = 0; b < x.cols(); ++b) v(a * x.cols() + b) = x(a, b);
  return v;
}

CMatrix unvec(const CVector& v, int d) {
  if (v.size() != static_cast<Eigen::Index>(d) * d)
    throw ContractViolation("unvec: vector length is not d^2");
  CMatrix x(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) x(a, b) = v(a * d + b);
  return x;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double max_abs(const CMatrix& x) { return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff(); }

bool all_finite(const CMatrix& x) { return x.allFinite(); }

CMatrix hermitian_part(const CMatrix& x) { return 0.5 * (x + x.adjoint()); }

double hermitian_defect(const CMatrix& x) { return max_abs(x - x.adjoint()); }

HermitianEigen hermitian_eigen(const CMatrix& x) {
  if (x.rows() != x.cols()) throw ContractViolation("eigendecomposition of a non-square matrix");
  if (x.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(x));
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const CMatrix& x) {
  auto eig = hermitian_eigen(x);
  return eig.values.size() ? eig.values(0) : 0.0;
}

double max_eigenvalue(const CMatrix& x) {
  auto eig = hermitian_eigen(x);
  return eig.values.size() ? eig.values(eig.values.size() - 1) : 0.0;
}

double spectral_norm(const CMatrix& x) {
  if (x.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(x);
  return svd.singularValues()(0);
}

double trace_norm(const CMatrix& x) {
  return hermitian_eigen(x).values.cwiseAbs().sum();
}

double trace_distance(const CMatrix& a, const CMatrix& b) { return 0.5 * trace_norm(a - b); }

CMatrix psd_sqrt(const CMatrix& x) {
  return spectral_apply(hermitian_eigen(x), [](double l) { return std::sqrt(std::max(l, 0.0)); });
}

RMatrix real_gram(const std::vector<CMatrix>& elements) {
  const auto n = static_cast<Eigen::Index>(elements.size());
  RMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      double v = (elements[i].adjoint() * elements[j]).trace().real();
      g(i, j) = v;
      g(j, i) = v;
    }
  return g;
}

namespace {
template <typename M>
RVector singular_values(const M& m) {
  if (m.size() == 0) return RVector();
  Eigen::BDCSVD<M> svd(m);
  return svd.singularValues();
}

int rank_from(const RVector& s, double rtol) {
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rtol * s(0)) ++r;
  return r;
}

double cond_from(const RVector& s) {
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}
}  // namespace

int numerical_rank(const RMatrix& m, double rtol) { return rank_from(singular_values(m), rtol); }
int numerical_rank(const CMatrix& m, double rtol) { return rank_from(singular_values(m), rtol); }
double condition_number(const RMatrix& m) { return cond_from(singular_values(m)); }
double condition_number(const CMatrix& m) { return cond_from(singular_values(m)); }

// ---------------------------------------------------------------------------
// states

StateVector::StateVector(CVector components) : components_(std::move(components)) {
  if (components_.size() == 0) throw ContractViolation("state vector must have positive dimension");
  if (!components_.allFinite()) throw ContractViolation("state vector has non-finite components");
}

DensityOperator::DensityOperator(const CMatrix& matrix, const Tolerances& tol) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw ContractViolation("density operator must be a non-empty square matrix");
  if (!matrix.allFinite()) throw ContractViolation("density operator has non-finite entries");
  double defect = hermitian_defect(matrix);
  if (defect > tol.herm) {
    std::ostringstream os;
    os << "density operator is not Hermitian (defect " << defect << ")";
    throw ContractViolation(os.str());
  }
  matrix_ = hermitian_part(matrix);
  double tr = matrix_.trace().real();
  double lmin = min_eigenvalue(matrix_);
  if (lmin < -tol.psd * std::max(tr, 1.0)) {
    std::ostringstream os;
    os << "density operator is not positive semidefinite (min eigenvalue " << lmin << ")";
    throw ContractViolation(os.str());
  }
}

DensityOperator DensityOperator::dark(int dim) { return DensityOperator(CMatrix::Zero(dim, dim)); }

DensityOperator DensityOperator::maximally_mixed(int dim) {
  return DensityOperator(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityReport validate_density(const CMatrix& rho, double tol) {
  if (rho.rows() != rho.cols()) throw ContractViolation("validate_density: matrix is not square");
  DensityReport r;
  r.hermitian_defect = hermitian_defect(rho);
  r.min_eigenvalue = rho.size() ? min_eigenvalue(rho) : 0.0;
  r.trace = rho.trace().real();
  r.ok = rho.allFinite() && r.hermitian_defect <= tol &&
         r.min_eigenvalue >= -tol * std::max(r.trace, 1.0);
  return r;
}

Complex quantum_value(const DensityOperator& rho, const CMatrix& x) {
  if (x.rows() != rho.dim() || x.cols() != rho.dim())
    throw ContractViolation("quantum_value: operator dimension does not match the state");
  // tr(rho X) without forming the product
  return rho.matrix().transpose().cwiseProduct(x).sum();
}

DensityOperator density_from_state(const StateVector& psi) {
  const CVector& v = psi.components();
  return DensityOperator(v * v.adjoint());
}

DensityOperator normalize(const DensityOperator& rho) {
  double tr = rho.trace();
  if (!(tr > 0.0)) throw ContractViolation("cannot normalize the dark state (trace 0)");
  return DensityOperator(rho.matrix() / tr);
}

// ---------------------------------------------------------------------------
// operator bases

OperatorBasis::OperatorBasis(int dim, std::vector<CMatrix> elements)
    : dim_(dim), elements_(std::move(elements)) {
  if (dim < 1) throw ContractViolation("operator basis dimension must be positive");
  if (elements_.size() != static_cast<std::size_t>(dim) * dim)
    throw ContractViolation("operator basis needs d^2 elements");
  for (const auto& e : elements_) {
    if (e.rows() != dim || e.cols() != dim) throw ContractViolation("basis element has wrong size");
    if (hermitian_defect(e) > 1e-12) throw ContractViolation("basis element is not Hermitian");
  }
  RMatrix g = real_gram(elements_);
  if (numerical_rank(g, 1e-12) != static_cast<int>(elements_.size()))
    throw ContractViolation("basis elements are linearly dependent");
  gram_.compute(g);
}

RVector OperatorBasis::coefficients(const CMatrix& h) const {
  RVector rhs(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i)
    rhs(static_cast<Eigen::Index>(i)) = (elements_[i].adjoint() * h).trace().real();
  return gram_.solve(rhs);
}

CMatrix OperatorBasis::resum(const RVector& c) const {
  if (c.size() != static_cast<Eigen::Index>(elements_.size()))
    throw ContractViolation("coefficient count does not match basis size");
  CMatrix out = CMatrix::Zero(dim_, dim_);
  for (std::size_t i = 0; i < elements_.size(); ++i) out += c(static_cast<Eigen::Index>(i)) * elements_[i];
  return out;
}

OperatorBasis hermitian_basis(int d) {
  if (d < 1) throw ContractViolation("hermitian_basis: dimension must be at least 1");
  std::vector<CMatrix> el;
  el.reserve(static_cast<std::size_t>(d) * d);
  el.push_back(CMatrix::Identity(d, d));
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) el.push_back(matrix_unit(d, j, k) + matrix_unit(d, k, j));
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k)
      el.push_back(-kI * matrix_unit(d, j, k) + kI * matrix_unit(d, k, j));
  for (int l = 1; l < d; ++l) {
    CMatrix e = CMatrix::Zero(d, d);
    for (int j = 0; j < l; ++j) e(j, j) = 1.0;
    e(l, l) = -static_cast<double>(l);
    el.push_back(std::sqrt(2.0 / (l * (l + 1.0))) * e);
  }
  return OperatorBasis(d, std::move(el));
}

}  // namespace qtomo
