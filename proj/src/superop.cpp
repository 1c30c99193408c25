#include "qtomo/superop.hpp"

#include <cmath>
#include <sstream>

namespace qtomo {

namespace {

void check_square_d2(int dim, const CMatrix& m, const char* what) {
  if (dim < 1) throw ContractViolation(std::string(what) + ": dimension must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim;
  if (m.rows() != n || m.cols() != n)
    throw ContractViolation(std::string(what) + ": matrix must be d^2 x d^2");
  if (!m.allFinite()) throw ContractViolation(std::string(what) + ": non-finite entries");
}

// C_{abjk} = E_{ajbk}; an involution on d^2 x d^2 arrays.
CMatrix swap_middle(int d, const CMatrix& m) {
  CMatrix out(m.rows(), m.cols());
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) out(a * d + b, j * d + k) = m(a * d + j, b * d + k);
  return out;
}

}  // namespace

SuperOperator::SuperOperator(int dim, CMatrix matrix) : dim_(dim), m_(std::move(matrix)) {
  check_square_d2(dim_, m_, "superoperator");
}

SuperOperator SuperOperator::identity(int dim) {
  const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim;
  return SuperOperator(dim, CMatrix::Identity(n, n));
}

SuperOperator SuperOperator::zero(int dim) {
  const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim;
  return SuperOperator(dim, CMatrix::Zero(n, n));
}

SuperOperator SuperOperator::transpose_map(int dim) {
  return from_action(dim, [](const CMatrix& x) { return CMatrix(x.transpose()); });
}

SuperOperator SuperOperator::from_action(int dim, const std::function<CMatrix(const CMatrix&)>& f) {
  const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim;
  CMatrix m(n, n);
  for (int j = 0; j < dim; ++j)
    for (int k = 0; k < dim; ++k) m.col(j * dim + k) = vec(f(matrix_unit(dim, j, k)));
  return SuperOperator(dim, std::move(m));
}

Complex SuperOperator::component(int a, int b, int j, int k) const {
  return m_(a * dim_ + b, j * dim_ + k);
}

CMatrix SuperOperator::apply(const CMatrix& x) const {
  if (x.rows() != dim_ || x.cols() != dim_)
    throw ContractViolation("superoperator applied to a matrix of the wrong size");
  return unvec(m_ * vec(x), dim_);
}

DensityOperator SuperOperator::apply(const DensityOperator& rho) const {
  return DensityOperator(apply(rho.matrix()));
}

double SuperOperator::hermiticity_defect() const {
  double defect = 0.0;
  for (int j = 0; j < dim_; ++j)
    for (int k = 0; k < dim_; ++k) {
      CMatrix x = matrix_unit(dim_, j, k);
      defect = std::max(defect, max_abs(apply(CMatrix(x.adjoint())) - apply(x).adjoint()));
    }
  return defect;
}

SuperOperator SuperOperator::operator+(const SuperOperator& other) const {
  if (other.dim_ != dim_) throw ContractViolation("adding superoperators of different dimension");
  return SuperOperator(dim_, m_ + other.m_);
}

SuperOperator SuperOperator::operator*(Complex s) const { return SuperOperator(dim_, s * m_); }

ChoiMatrix::ChoiMatrix(int dim, CMatrix matrix) : dim_(dim), c_(std::move(matrix)) {
  check_square_d2(dim_, c_, "Choi matrix");
}

ChoiMatrix choi_transform(const SuperOperator& e) {
  return ChoiMatrix(e.dim(), swap_middle(e.dim(), e.matrix()));
}

SuperOperator from_choi(const ChoiMatrix& c) {
  return SuperOperator(c.dim(), swap_middle(c.dim(), c.matrix()));
}

KrausSet::KrausSet(std::vector<CMatrix> operators) : ops_(std::move(operators)) {
  if (ops_.empty()) throw ContractViolation("Kraus set must be nonempty");
  const auto d = ops_.front().rows();
  for (const auto& t : ops_) {
    if (t.rows() != d || t.cols() != d || d == 0)
      throw ContractViolation("Kraus operators must share one square dimension");
    if (!t.allFinite()) throw ContractViolation("Kraus operator has non-finite entries");
  }
}

SuperOperator superop_from_kraus(const KrausSet& k) {
  const int d = k.dim();
  CMatrix m = CMatrix::Zero(d * d, d * d);
  // vec(T X T^*) = (T kron conj(T)) vec(X) for row-major vec
  for (const auto& t : k.operators()) m += kron(t, t.conjugate());
  return SuperOperator(d, std::move(m));
}

CPReport is_completely_positive(const SuperOperator& e, double tol) {
  const ChoiMatrix c = choi_transform(e);
  CPReport r;
  r.hermitian_defect = hermitian_defect(c.matrix());
  r.min_choi_eigenvalue = min_eigenvalue(c.matrix());
  r.cp = r.hermitian_defect <= tol && r.min_choi_eigenvalue >= -tol;
  return r;
}

int choi_rank(const ChoiMatrix& c, double tol) {
  const auto eig = hermitian_eigen(c.matrix());
  const double lmax = eig.values(eig.values.size() - 1);
  if (!(lmax > 0.0)) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values(i) > tol * lmax) ++rank;
  return rank;
}

KrausSet kraus_from_choi(const ChoiMatrix& c, double tol) {
  const int d = c.dim();
  if (hermitian_defect(c.matrix()) > tol) throw ContractViolation("not completely positive: Choi matrix is not Hermitian");
  const auto eig = hermitian_eigen(c.matrix());
  const Eigen::Index n = eig.values.size();
  if (eig.values(0) < -tol) {
    std::ostringstream os;
    os << "not completely positive: Choi matrix has eigenvalue " << eig.values(0);
    throw ContractViolation(os.str());
  }
  const double lmax = eig.values(n - 1);
  if (!(lmax > 0.0)) throw ContractViolation("zero map: Choi matrix has rank 0 and no Kraus operators");
  std::vector<CMatrix> ops;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    const double l = eig.values(i);
    if (l <= tol * lmax) break;
    CVector v = eig.vectors.col(i);
    for (Eigen::Index p = 0; p < v.size(); ++p)
      if (std::abs(v(p)) > 1e-12) {
        v *= std::conj(v(p)) / std::abs(v(p));
        break;
      }
    ops.push_back(std::sqrt(l) * unvec(v, d));
  }
  return KrausSet(std::move(ops));
}

CMatrix pi_operator(const KrausSet& k) {
  CMatrix pi = CMatrix::Zero(k.dim(), k.dim());
  for (const auto& t : k.operators()) pi += t.adjoint() * t;
  return pi;
}

CMatrix pi_operator(const SuperOperator& e) {
  // tr E(X) = sum_{jk} (sum_a E_{aajk}) X_{jk} = tr(pi X)  =>  pi_{kj} = sum_a E_{aajk}
  const int d = e.dim();
  CMatrix pi = CMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int a = 0; a < d; ++a) pi(k, j) += e.component(a, a, j, k);
  return pi;
}

namespace {
FilterClass classify_pi(const CMatrix& pi, int rank, double tol) {
  FilterClass fc;
  fc.max_pi_eigenvalue = max_eigenvalue(pi);
  fc.lossless = max_abs(pi - CMatrix::Identity(pi.rows(), pi.cols())) <= tol;
  fc.passive = fc.max_pi_eigenvalue <= 1.0 + tol;
  fc.active = !fc.passive;
  fc.choi_rank = rank;
  fc.mixing = rank > 1;
  return fc;
}
}  // namespace

FilterClass classify(const KrausSet& k, double tol) {
  const auto e = superop_from_kraus(k);
  return classify_pi(pi_operator(k), choi_rank(choi_transform(e), tol), tol);
}

FilterClass classify(const SuperOperator& e, double tol) {
  return classify_pi(pi_operator(e), choi_rank(choi_transform(e), tol), tol);
}

SuperOperator project_cp(const SuperOperator& e) {
  const ChoiMatrix c = choi_transform(e);
  CMatrix clipped = spectral_apply(hermitian_eigen(c.matrix()), [](double l) { return std::max(l, 0.0); });
  return from_choi(ChoiMatrix(e.dim(), std::move(clipped)));
}

namespace {
SuperOperator make_null_branch(const std::vector<SuperOperator>& branches, double tol) {
  if (branches.empty()) throw ContractViolation("instrument needs at least one branch");
  const int d = branches.front().dim();
  CMatrix total = CMatrix::Zero(d, d);
  for (const auto& e : branches) {
    if (e.dim() != d) throw ContractViolation("instrument branches have mismatched dimensions");
    CPReport cp = is_completely_positive(e, tol);
    if (!cp.cp) {
      std::ostringstream os;
      os << "instrument branch is not completely positive (min Choi eigenvalue "
         << cp.min_choi_eigenvalue << ")";
      throw ContractViolation(os.str());
    }
    total += pi_operator(e);
  }
  const CMatrix deficit = CMatrix::Identity(d, d) - hermitian_part(total);
  const double lmin = min_eigenvalue(deficit);
  if (lmin < -tol) {
    std::ostringstream os;
    os << "super-unital instrument: sum of branch intensity operators exceeds the identity by "
       << -lmin;
    throw ContractViolation(os.str());
  }
  return superop_from_kraus(KrausSet({psd_sqrt(deficit)}));
}
}  // namespace

Instrument::Instrument(std::vector<SuperOperator> branches, double tol)
    : branches_(std::move(branches)), null_(make_null_branch(branches_, tol)) {}

}  // namespace qtomo
