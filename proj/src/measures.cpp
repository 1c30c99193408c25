#include "qtomo/measures.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qtomo {

MeasureReport validate_measure(const std::vector<CMatrix>& elements, double tol) {
  if (elements.empty()) throw ContractViolation("quantum measure has no elements");
  const auto d = elements.front().rows();
  MeasureReport r;
  CMatrix sum = CMatrix::Zero(d, d);
  double herm = 0.0;
  for (const auto& p : elements) {
    if (p.rows() != d || p.cols() != d)
      throw ContractViolation("quantum measure elements have mismatched dimensions");
    herm = std::max(herm, hermitian_defect(p));
    r.min_eigenvalues.push_back(min_eigenvalue(p));
    if (max_abs(p) <= tol) r.all_nonzero = false;
    sum += p;
  }
  r.sum_defect = max_abs(sum - CMatrix::Identity(d, d));
  r.ok = herm <= tol && r.sum_defect <= tol && r.all_nonzero &&
         std::all_of(r.min_eigenvalues.begin(), r.min_eigenvalues.end(),
                     [tol](double l) { return l >= -tol; });
  return r;
}

QuantumMeasure::QuantumMeasure(std::vector<CMatrix> elements, double tol)
    : dim_(0), elements_(std::move(elements)) {
  MeasureReport r = validate_measure(elements_, tol);
  if (!r.ok) {
    std::ostringstream os;
    os << "invalid quantum measure: ";
    if (!r.all_nonzero) {
      os << "an element is zero";
    } else if (r.sum_defect > tol) {
      os << "elements do not sum to the identity (defect " << r.sum_defect << ")";
    } else {
      double lmin = *std::min_element(r.min_eigenvalues.begin(), r.min_eigenvalues.end());
      if (lmin < -tol)
        os << "element not positive semidefinite (min eigenvalue " << lmin << ")";
      else
        os << "element not Hermitian";
    }
    throw ContractViolation(os.str());
  }
  dim_ = static_cast<int>(elements_.front().rows());
  for (auto& p : elements_) p = hermitian_part(p);
}

Scale::Scale(std::vector<CVector> values) : values_(std::move(values)), components_(0) {
  if (values_.empty()) throw ContractViolation("scale has no values");
  components_ = static_cast<int>(values_.front().size());
  if (components_ < 1) throw ContractViolation("scale values need at least one component");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i].size() != components_) throw ContractViolation("scale values have mixed lengths");
    if (!values_[i].allFinite()) throw ContractViolation("scale value is not finite");
    for (std::size_t j = 0; j < i; ++j)
      if (values_[i] == values_[j]) throw ContractViolation("scale values must be pairwise distinct");
  }
}

Scale Scale::real(const std::vector<double>& values) {
  std::vector<CVector> v;
  v.reserve(values.size());
  for (double a : values) v.push_back(CVector::Constant(1, Complex(a, 0.0)));
  return Scale(std::move(v));
}

bool Scale::is_real() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const CVector& a) { return a.imag().isZero(0.0); });
}

Detector::Detector(QuantumMeasure measure, Scale scale)
    : measure_(std::move(measure)), scale_(std::move(scale)) {
  if (scale_.size() != measure_.size())
    throw ContractViolation("scale length does not match the number of measure elements");
}

RVector response_probabilities(const QuantumMeasure& m, const DensityOperator& rho, double tol) {
  if (m.dim() != rho.dim()) throw ContractViolation("measure and state dimensions differ");
  RVector p(static_cast<Eigen::Index>(m.size()));
  const double scale = std::max(rho.trace(), 1.0);
  for (std::size_t k = 0; k < m.size(); ++k) {
    Complex v = quantum_value(rho, m[k]);
    if (std::abs(v.imag()) > tol * scale)
      throw ContractViolation("response probability has a non-negligible imaginary part");
    if (v.real() < -tol * scale) throw ContractViolation("negative response probability");
    p(static_cast<Eigen::Index>(k)) = v.real();
  }
  return p;
}

std::vector<CMatrix> measured_quantity(const Detector& det) {
  const auto& m = det.measure();
  const auto& a = det.scale().values();
  std::vector<CMatrix> out(static_cast<std::size_t>(det.scale().components()),
                           CMatrix::Zero(m.dim(), m.dim()));
  for (std::size_t k = 0; k < m.size(); ++k)
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += a[k](static_cast<Eigen::Index>(j)) * m[k];
  return out;
}

CVector statistical_expectation(const Detector& det, const DensityOperator& rho,
                                const ScaleFunction& f, double tol) {
  if (std::abs(rho.trace() - 1.0) > tol) {
    std::ostringstream os;
    os << "statistical expectation needs a trace-one state (trace " << rho.trace() << ")";
    throw ContractViolation(os.str());
  }
  RVector p = response_probabilities(det.measure(), rho, tol);
  const auto& a = det.scale().values();
  CVector acc = p(0) * f(a[0]);
  for (std::size_t k = 1; k < a.size(); ++k) acc += p(static_cast<Eigen::Index>(k)) * f(a[k]);
  return acc;
}

ProjectivityReport is_projective(const QuantumMeasure& m, double tol) {
  ProjectivityReport r;
  for (std::size_t j = 0; j < m.size(); ++j)
    for (std::size_t k = 0; k < m.size(); ++k) {
      CMatrix prod = m[j] * m[k];
      if (j == k) prod -= m[k];
      r.max_defect = std::max(r.max_defect, max_abs(prod));
    }
  r.projective = r.max_defect <= tol;
  return r;
}

CompletenessReport informational_completeness(const QuantumMeasure& m) {
  CompletenessReport r;
  r.rank = numerical_rank(real_gram(m.elements()), 1e-10);
  const int d2 = m.dim() * m.dim();
  r.complete = r.rank == d2;
  r.minimal = r.complete && static_cast<int>(m.size()) == d2;
  return r;
}

QuantumMeasure computational_measure(int d) {
  if (d < 1) throw ContractViolation("computational_measure: dimension must be positive");
  std::vector<CMatrix> el;
  for (int k = 0; k < d; ++k) el.push_back(matrix_unit(d, k, k));
  return QuantumMeasure(std::move(el));
}

QuantumMeasure pauli_six_measure() {
  std::vector<CMatrix> el;
  for (int i = 1; i <= 3; ++i) {
    el.push_back((pauli(0) + pauli(i)) / 6.0);
    el.push_back((pauli(0) - pauli(i)) / 6.0);
  }
  return QuantumMeasure(std::move(el));
}

QuantumMeasure tetrahedron_measure() {
  const double s = 1.0 / std::sqrt(3.0);
  const double v[4][3] = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  std::vector<CMatrix> el;
  for (const auto& vk : v)
    el.push_back(0.25 * (pauli(0) + vk[0] * pauli(1) + vk[1] * pauli(2) + vk[2] * pauli(3)));
  return QuantumMeasure(std::move(el));
}

CVector coherent_state(Complex alpha, int n_max) {
  CVector v(n_max + 1);
  Complex term = std::exp(-0.5 * std::norm(alpha));
  for (int n = 0; n <= n_max; ++n) {
    v(n) = term;
    term *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  return v;
}

QuantumMeasure coherent_partition_measure(int n_max, const std::vector<PhaseSpaceWeight>& cells,
                                          double radius, PolarGrid grid, double tol) {
  if (n_max < 0) throw ContractViolation("truncation n_max must be nonnegative");
  if (cells.empty()) throw ContractViolation("coherent partition needs at least one cell");
  if (!(radius > 0.0)) throw ContractViolation("disc radius must be positive");
  if (grid.radial < 1 || grid.angular < 1) throw ContractViolation("quadrature grid must be nonempty");

  const int d = n_max + 1;
  std::vector<CMatrix> el(cells.size(), CMatrix::Zero(d, d));
  const double dr = radius / grid.radial;
  const double dphi = 2.0 * std::numbers::pi / grid.angular;
  for (int i = 0; i < grid.radial; ++i) {
    const double r = (i + 0.5) * dr;
    const double area = r * dr * dphi / std::numbers::pi;
    for (int j = 0; j < grid.angular; ++j) {
      const Complex alpha = std::polar(r, (j + 0.5) * dphi);
      const CVector psi = coherent_state(alpha, n_max);
      const CMatrix proj = psi * psi.adjoint();
      double total = 0.0;
      for (std::size_t k = 0; k < cells.size(); ++k) {
        const double w = cells[k](alpha);
        if (w < 0.0) throw ContractViolation("phase-space weight function is negative");
        total += w;
        if (w != 0.0) el[k] += (w * area) * proj;
      }
      if (std::abs(total - 1.0) > 1e-9)
        throw ContractViolation("phase-space weights do not sum to one on the disc");
    }
  }
  CMatrix rest = CMatrix::Identity(d, d);
  for (const auto& p : el) rest -= p;
  double lmin = min_eigenvalue(rest);
  if (lmin < -tol) {
    std::ostringstream os;
    os << "truncation insufficient: remainder element has min eigenvalue " << lmin;
    throw InfeasibleError(os.str());
  }
  el.push_back(rest);
  return QuantumMeasure(std::move(el), tol);
}

}  // namespace qtomo
