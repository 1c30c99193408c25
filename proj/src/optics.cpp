#include "qtomo/optics.hpp"

#include <cmath>
#include <sstream>

namespace qtomo {

double StokesVector::polarized_norm() const { return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3); }

DensityOperator stokes_to_density(const StokesVector& s, double tol) {
  if (!(s.s0 >= s.polarized_norm() - tol * std::max(1.0, s.s0))) {
    std::ostringstream os;
    os << "Stokes vector violates S0 >= |S| (S0 = " << s.s0 << ", |S| = " << s.polarized_norm() << ")";
    throw ContractViolation(os.str());
  }
  CMatrix rho = 0.5 * (s.s0 * pauli(0) + s.s1 * pauli(1) + s.s2 * pauli(2) + s.s3 * pauli(3));
  return DensityOperator(rho);
}

StokesVector density_to_stokes(const DensityOperator& rho) {
  if (rho.dim() != 2) throw ContractViolation("Stokes vectors describe 2x2 densities only");
  auto s = [&](int k) { return quantum_value(rho, pauli(k)).real(); };
  return {s(0), s(1), s(2), s(3)};
}

double degree_of_polarization(const StokesVector& s) {
  if (!(s.s0 > 0.0)) throw ContractViolation("degree of polarization undefined for the dark state");
  return s.polarized_norm() / s.s0;
}

JonesMatrix::JonesMatrix(CMatrix t) : t_(std::move(t)) {
  if (t_.rows() != 2 || t_.cols() != 2) throw ContractViolation("Jones matrix must be 2x2");
  if (!t_.allFinite()) throw ContractViolation("Jones matrix has non-finite entries");
}

JonesMatrix JonesMatrix::attenuator(double gamma) { return JonesMatrix(gamma * pauli(0)); }

JonesMatrix JonesMatrix::polarizer(const CVector& phi) {
  if (phi.size() != 2 || std::abs(phi.norm() - 1.0) > 1e-12)
    throw ContractViolation("polarizer direction must be a unit 2-vector");
  return JonesMatrix(phi * phi.adjoint());
}

DensityOperator apply_jones(const DensityOperator& rho, const JonesMatrix& t) {
  if (rho.dim() != 2) throw ContractViolation("Jones filters act on 2x2 densities");
  return DensityOperator(t.matrix() * rho.matrix() * t.matrix().adjoint());
}

namespace {
// Unnormalized splitter with entries +-1; the 1/2 is applied once after
// the congruence so a single-beam input splits without rounding.
CMatrix splitter_matrix() {
  CMatrix h(2, 2);
  h << 1, 1, 1, -1;
  return kron(h, pauli(0));
}
}  // namespace

DensityOperator beam_splitter(const DensityOperator& two_beam) {
  if (two_beam.dim() != 4) throw ContractViolation("beam splitter acts on 4x4 two-beam densities");
  static const CMatrix b = splitter_matrix();
  return DensityOperator(CMatrix(0.5 * (b * two_beam.matrix() * b.adjoint())));
}

DensityOperator single_beam_input(const DensityOperator& rho) {
  if (rho.dim() != 2) throw ContractViolation("single beam input must be a 2x2 density");
  CMatrix out = CMatrix::Zero(4, 4);
  out.topLeftCorner(2, 2) = rho.matrix();
  return DensityOperator(out);
}

OpticalNetwork OpticalNetwork::leaf(JonesMatrix t) {
  double norm = spectral_norm(t.matrix());
  if (norm > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "leaf filter is active (spectral norm " << norm << " > 1)";
    throw ContractViolation(os.str());
  }
  OpticalNetwork n;
  n.jones_.push_back(std::move(t));
  return n;
}

OpticalNetwork OpticalNetwork::split(OpticalNetwork first, OpticalNetwork second) {
  OpticalNetwork n;
  n.children_.push_back(std::move(first));
  n.children_.push_back(std::move(second));
  return n;
}

void OpticalNetwork::collect(int depth, std::vector<Leaf>& out) const {
  if (is_leaf()) {
    out.push_back({jones_.front(), depth, std::ldexp(1.0, -depth)});
    return;
  }
  for (const auto& c : children_) c.collect(depth + 1, out);
}

std::vector<OpticalNetwork::Leaf> OpticalNetwork::leaves() const {
  std::vector<Leaf> out;
  collect(0, out);
  return out;
}

CascadeMeasure cascade_measure(const OpticalNetwork& net, double tol) {
  std::vector<CMatrix> el;
  CMatrix null = CMatrix::Identity(2, 2);
  for (const auto& leaf : net.leaves()) {
    const CMatrix& t = leaf.jones.matrix();
    el.push_back(leaf.attenuation * t.adjoint() * t);
    null -= el.back();
  }
  const double lmin = min_eigenvalue(null);
  if (lmin < -tol) {
    std::ostringstream os;
    os << "lossy-network inconsistency: null element has min eigenvalue " << lmin;
    throw ContractViolation(os.str());
  }
  const std::size_t leaf_count = el.size();
  if (max_abs(null) > tol) el.push_back(null);
  return {QuantumMeasure(std::move(el), tol), null, leaf_count};
}

}  // namespace qtomo
