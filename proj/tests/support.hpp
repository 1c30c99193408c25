#pragma once

// Random instance generators and independent oracles for the test suites.
// Nothing here calls into the code paths it is used to check.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "qtomo/linalg.hpp"

namespace qtomo::test {

class Random {
 public:
  explicit Random(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  CMatrix ginibre(int rows, int cols) {
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = Complex(normal(), normal()) / std::sqrt(2.0);
    return m;
  }

  CVector unit_vector(int d) {
    CVector v = ginibre(d, 1).col(0);
    return v / v.norm();
  }

  CMatrix hermitian(int d) {
    CMatrix g = ginibre(d, d);
    return 0.5 * (g + g.adjoint());
  }

  CMatrix unitary(int d) {
    Eigen::HouseholderQR<CMatrix> qr(ginibre(d, d));
    CMatrix q = qr.householderQ();
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < d; ++i) q.col(i) *= std::polar(1.0, std::arg(r(i, i)));
    return q;
  }

  /// Trace-one density of rank `rank` (full rank by default).
  CMatrix density(int d, int rank = -1) {
    CMatrix g = ginibre(d, rank < 0 ? d : rank);
    CMatrix rho = g * g.adjoint();
    return rho / rho.trace().real();
  }

  CMatrix pure_density(int d) {
    CVector v = unit_vector(d);
    return v * v.adjoint();
  }

  /// Random POVM: S^{-1/2} G_k S^{-1/2} with G_k = A_k A_k^*.
  std::vector<CMatrix> measure(int d, int k) {
    std::vector<CMatrix> g;
    CMatrix s;
    Eigen::SelfAdjointEigenSolver<CMatrix> es;
    do {  // redraw until the elements span a full-rank sum
      g.clear();
      s = CMatrix::Zero(d, d);
      for (int i = 0; i < k; ++i) {
        CMatrix a = ginibre(d, k == 1 ? d : integer(1, d));
        g.push_back(a * a.adjoint());
        s += g.back();
      }
      es.compute(s);
    } while (es.eigenvalues().minCoeff() < 1e-3 * es.eigenvalues().maxCoeff());
    CMatrix inv_sqrt = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() *
                       es.eigenvectors().adjoint();
    for (auto& p : g) p = inv_sqrt * p * inv_sqrt;
    return g;
  }

  std::vector<CMatrix> kraus(int d, int count, double scale = 1.0) {
    std::vector<CMatrix> ops;
    for (int i = 0; i < count; ++i) ops.push_back(scale * ginibre(d, d) / std::sqrt(double(d * count)));
    return ops;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// --- oracles -----------------------------------------------------------------

/// sum_l T_l X T_l^* evaluated directly.
inline CMatrix apply_kraus(const std::vector<CMatrix>& ops, const CMatrix& x) {
  CMatrix out = CMatrix::Zero(x.rows(), x.cols());
  for (const auto& t : ops) out += t * x * t.adjoint();
  return out;
}

/// Choi transform action through the basis formula
/// sum_{jk} E(e_j e_k^*) X e_k e_j^*.
inline CMatrix choi_action_by_basis(const std::function<CMatrix(const CMatrix&)>& e, const CMatrix& x) {
  const auto d = x.rows();
  CMatrix out = CMatrix::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k) {
      CMatrix ejk = CMatrix::Zero(d, d);
      ejk(j, k) = 1.0;
      out += e(ejk) * x * ejk.adjoint();
    }
  return out;
}

/// Trace distance from explicit singular values of the difference.
inline double trace_distance_svd(const CMatrix& a, const CMatrix& b) {
  Eigen::JacobiSVD<CMatrix> svd(a - b);
  return 0.5 * svd.singularValues().sum();
}

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Central finite difference.
inline Complex central_difference(const std::function<Complex(double)>& f, double t, double h) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace qtomo::test
