#pragma once

// Polarization qubits: Stokes vectors, Jones filters, beam splitters, and
// detectors built from beam-splitter cascades.

#include <vector>

#include "qtomo/core.hpp"
#include "qtomo/measures.hpp"

namespace qtomo {

struct StokesVector {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;

  double polarized_norm() const;  // |(s1, s2, s3)|
};

/// rho = (S0 sigma_0 + S1 sigma_1 + S2 sigma_2 + S3 sigma_3) / 2.
DensityOperator stokes_to_density(const StokesVector& s, double tol = 1e-12);
StokesVector density_to_stokes(const DensityOperator& rho);

/// |S| / S0; throws on the dark state.
double degree_of_polarization(const StokesVector& s);

class JonesMatrix {
 public:
  explicit JonesMatrix(CMatrix t);
  static JonesMatrix attenuator(double gamma);
  /// Perfect polarizer phi phi^* for a unit vector phi.
  static JonesMatrix polarizer(const CVector& phi);

  const CMatrix& matrix() const noexcept { return t_; }

 private:
  CMatrix t_;
};

/// rho' = T rho T^*.
DensityOperator apply_jones(const DensityOperator& rho, const JonesMatrix& t);

/// Half-silvered mirror acting on a two-beam state, a 2x2 block matrix of
/// 2x2 polarization blocks: rho' = B rho B^* with B = (1/sqrt2)[[1,1],[1,-1]]
/// blockwise.
DensityOperator beam_splitter(const DensityOperator& two_beam);

/// blockdiag(rho, 0): a single input beam entering the first port.
DensityOperator single_beam_input(const DensityOperator& rho);

/// Binary tree of beam splitters with a Jones filter in front of each leaf
/// detector. Leaf filters must satisfy ||T|| <= 1.
class OpticalNetwork {
 public:
  static OpticalNetwork leaf(JonesMatrix t);
  static OpticalNetwork split(OpticalNetwork first, OpticalNetwork second);

  struct Leaf {
    JonesMatrix jones;
    int depth;           // number of splitters passed
    double attenuation;  // 2^{-depth}
  };
  /// Leaves in depth-first order, first branch before second.
  std::vector<Leaf> leaves() const;

  bool is_leaf() const noexcept { return children_.empty(); }

 private:
  OpticalNetwork() = default;
  void collect(int depth, std::vector<Leaf>& out) const;

  std::vector<JonesMatrix> jones_;  // one entry for leaves
  std::vector<OpticalNetwork> children_;
};

struct CascadeMeasure {
  /// c_k T_k^* T_k for each leaf, then the null element when it is nonzero.
  QuantumMeasure measure;
  /// 1 - sum_k c_k T_k^* T_k, the no-detection response. May be zero.
  CMatrix null_element;
  std::size_t leaf_count = 0;
  bool has_null_element() const noexcept { return measure.size() > leaf_count; }
};

CascadeMeasure cascade_measure(const OpticalNetwork& net, double tol = 1e-9);

}  // namespace qtomo
