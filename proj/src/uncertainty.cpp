#include "qtomo/uncertainty.hpp"

#include <cmath>
#include <sstream>

namespace qtomo {

namespace {

void require_trace_one(const DensityOperator& rho, double tol) {
  if (std::abs(rho.trace() - 1.0) > tol) {
    std::ostringstream os;
    os << "uncertainty needs a trace-one state (trace " << rho.trace() << ")";
    throw ContractViolation(os.str());
  }
}

double expect_real(const DensityOperator& rho, const CMatrix& x) { return quantum_value(rho, x).real(); }

}  // namespace

QuantityVector::QuantityVector(std::vector<CMatrix> components) : components_(std::move(components)) {
  if (components_.empty()) throw ContractViolation("quantity vector needs at least one component");
  const auto d = components_.front().rows();
  for (const auto& c : components_)
    if (c.rows() != d || c.cols() != d || d == 0)
      throw ContractViolation("quantity components must share one square dimension");
}

QuantityVector::QuantityVector(const CMatrix& single) : QuantityVector(std::vector<CMatrix>{single}) {}

CMatrix QuantityVector::squared_distance(const CVector& xi) const {
  if (xi.size() != static_cast<Eigen::Index>(components_.size()))
    throw ContractViolation("point and quantity have different numbers of components");
  const auto d = components_.front().rows();
  const CMatrix id = CMatrix::Identity(d, d);
  CMatrix b = CMatrix::Zero(d, d);
  for (std::size_t j = 0; j < components_.size(); ++j) {
    const CMatrix y = components_[j] - xi(static_cast<Eigen::Index>(j)) * id;
    b += y.adjoint() * y;
  }
  return b;
}

UncertaintyReport q_uncertainty(const DensityOperator& rho, const QuantityVector& x, double tol) {
  require_trace_one(rho, tol);
  if (x.dim() != rho.dim()) throw ContractViolation("quantity and state dimensions differ");
  const auto m = static_cast<Eigen::Index>(x.size());
  UncertaintyReport r;
  r.mean.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) r.mean(j) = quantum_value(rho, x[static_cast<std::size_t>(j)]);
  r.sigma = std::sqrt(std::max(0.0, expect_real(rho, x.squared_distance(r.mean))));
  const CMatrix id = CMatrix::Identity(x.dim(), x.dim());
  r.covariance.resize(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = 0; k < m; ++k) {
      const CMatrix yj = x[static_cast<std::size_t>(j)] - r.mean(j) * id;
      const CMatrix yk = x[static_cast<std::size_t>(k)] - r.mean(k) * id;
      r.covariance(j, k) = quantum_value(rho, yj.adjoint() * yk);
    }
  return r;
}

RobertsonCheck robertson_check(const DensityOperator& rho, const CMatrix& a, const CMatrix& b,
                               double slack) {
  for (const CMatrix* x : {&a, &b})
    if (x->rows() != x->cols() || hermitian_defect(*x) > 1e-10 * std::max(1.0, max_abs(*x)))
      throw ContractViolation("Robertson relation needs Hermitian operators");
  RobertsonCheck r;
  r.lhs = q_uncertainty(rho, a).sigma * q_uncertainty(rho, b).sigma;
  r.rhs = 0.5 * std::abs(quantum_value(rho, a * b - b * a));
  r.satisfied = r.lhs - r.rhs >= -slack;
  return r;
}

namespace {

struct OutcomeStats {
  RVector p;
  CVector mean;
};

OutcomeStats outcome_stats(const Detector& det, const DensityOperator& rho, double tol) {
  OutcomeStats s;
  s.p = response_probabilities(det.measure(), rho, tol);
  const auto& a = det.scale().values();
  s.mean = CVector::Zero(det.scale().components());
  for (std::size_t k = 0; k < a.size(); ++k) s.mean += s.p(static_cast<Eigen::Index>(k)) * a[k];
  return s;
}

double expected_sq_distance(const Detector& det, const RVector& p, const CVector& xi) {
  double e = 0.0;
  const auto& a = det.scale().values();
  for (std::size_t k = 0; k < a.size(); ++k) e += p(static_cast<Eigen::Index>(k)) * (a[k] - xi).squaredNorm();
  return e;
}

}  // namespace

StatisticalSpread statistical_vs_quantum(const Detector& det, const DensityOperator& rho, double tol) {
  require_trace_one(rho, tol);
  const OutcomeStats st = outcome_stats(det, rho, tol);
  StatisticalSpread s;
  s.mean = st.mean;
  s.e_var = expected_sq_distance(det, st.p, st.mean);
  const QuantityVector a(measured_quantity(det));
  const double sigma = q_uncertainty(rho, a, tol).sigma;
  s.sigma2 = sigma * sigma;
  s.excess = s.e_var - s.sigma2;
  return s;
}

MeasurementUncertainty measurement_uncertainty(const Detector& det, const DensityOperator& rho,
                                               const QuantityVector& x, double tol) {
  require_trace_one(rho, tol);
  if (x.size() != static_cast<std::size_t>(det.scale().components()))
    throw ContractViolation("quantity and scale have different numbers of components");
  if (x.dim() != rho.dim()) throw ContractViolation("quantity and state dimensions differ");
  const OutcomeStats st = outcome_stats(det, rho, tol);
  const UncertaintyReport ux = q_uncertainty(rho, x, tol);
  const QuantityVector a(measured_quantity(det));
  const double sigma_a = q_uncertainty(rho, a, tol).sigma;

  MeasurementUncertainty mu;
  mu.e_var_about_x = expected_sq_distance(det, st.p, ux.mean);
  mu.e_var = expected_sq_distance(det, st.p, st.mean);
  mu.rmse = std::sqrt(mu.e_var_about_x);
  mu.bias = (st.mean - ux.mean).norm();
  mu.sigma_x2 = ux.sigma * ux.sigma;
  mu.sigma_a2 = sigma_a * sigma_a;
  mu.delta = std::sqrt(mu.e_var_about_x + std::max(mu.sigma_x2 - mu.sigma_a2, 0.0));
  return mu;
}

SpectrumMembership spectrum_membership(const QuantityVector& x, const CVector& xi, double tol) {
  const auto eig = hermitian_eigen(x.squared_distance(xi));
  SpectrumMembership s;
  s.min_eigenvalue = eig.values(0);
  s.member = s.min_eigenvalue <= tol;
  if (s.member) s.witness.emplace(CVector(eig.vectors.col(0)));
  return s;
}

}  // namespace qtomo
