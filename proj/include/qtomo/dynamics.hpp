#pragma once

// Evolution through media modelled as many thin filter slices, and the
// continuum equations they approach.

#include <functional>
#include <vector>

#include "qtomo/core.hpp"

namespace qtomo {

/// i hbar K = H - i V. V is PSD for passive media.
struct GeneratorModel {
  CMatrix hamiltonian;
  CMatrix dissipation;  // V; empty means zero
  double hbar = 1.0;

  /// K = -(i H + V) / hbar.
  CMatrix generator() const;
  void validate(double tol = 1e-9) const;
};

/// d rho/dt = K rho + rho K^* + sum_l gamma_l L_l rho L_l^*, with
/// K = -(i H + V)/hbar - 1/2 sum_l gamma_l L_l^* L_l. With V = 0 this is the
/// Lindblad equation.
struct LindbladModel {
  CMatrix hamiltonian;
  std::vector<CMatrix> jumps;
  std::vector<double> rates;
  double hbar = 1.0;
  CMatrix dissipation;  // optional extra V, empty means zero

  int dim() const { return static_cast<int>(hamiltonian.rows()); }
  CMatrix generator() const;
  void validate(double tol = 1e-9) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<CMatrix> states;

  const CMatrix& final_state() const { return states.back(); }
};

/// rho <- T rho T^* with T = 1 + dt K, starting from rho0.
Trajectory slice_evolution(const CMatrix& generator, const CMatrix& rho0, double dt, int steps);
/// Time-dependent variant; K is evaluated at the start of each slice.
Trajectory slice_evolution_varying(const std::function<CMatrix(double)>& generator, const CMatrix& rho0,
                                   double dt, int steps);

/// Exact e^{-iHt/hbar} rho0 e^{iHt/hbar} via the eigendecomposition of H.
DensityOperator von_neumann_evolve(const CMatrix& hamiltonian, const DensityOperator& rho0,
                                   double t, double hbar = 1.0);

/// psi0 split into its components in the eigenspaces of H; eigenvalues
/// closer than cluster_tol share one component.
struct SpectralSolution {
  std::vector<double> energies;
  std::vector<CVector> components;  // sum_k components[k] = psi0
  double hbar = 1.0;

  CVector at(double t) const;
};

SpectralSolution spectral_solution(const CMatrix& hamiltonian, const StateVector& psi0,
                                   double hbar = 1.0, double cluster_tol = 1e-10);
StateVector schrodinger_evolve(const CMatrix& hamiltonian, const StateVector& psi0, double t,
                               double hbar = 1.0);

/// Row-major vectorized generator of the master equation.
CMatrix liouvillian(const LindbladModel& model);

struct IntegratorOptions {
  double tolerance = 1e-8;  // max-norm agreement between successive halvings
  int max_halvings = 20;
};

/// Classical RK4 on the vectorized master equation. Snapshots at multiples of
/// dt up to t (the last one at t exactly); the internal substep is halved
/// until successive solutions agree within options.tolerance.
Trajectory lindblad_evolve(const LindbladModel& model, const CMatrix& rho0, double t, double dt,
                           const IntegratorOptions& options = {});

/// rho <- T rho T^* + dt sum_l gamma_l L_l rho L_l^*, T = 1 + dt K.
Trajectory sliced_master(const LindbladModel& model, const CMatrix& rho0, double dt, int steps);

/// Z^{-1} exp((E0 - H)/(kB T)), E0 the ground energy.
DensityOperator gibbs_state(const CMatrix& hamiltonian, double temperature, double kb = 1.0);

struct SpectralLines {
  std::vector<double> angular;    // omega_jk = |E_j - E_k| / hbar, ascending
  std::vector<double> frequency;  // omega / (2 pi)
};

SpectralLines rydberg_ritz_lines(const CMatrix& hamiltonian, double hbar = 1.0,
                                 double tol = 1e-10);

/// A |_ B = (i/hbar)(AB - BA).
CMatrix lie_product(const CMatrix& a, const CMatrix& b, double hbar = 1.0);

/// d/dt <A> along the von Neumann flow of H: <H |_ A>.
Complex ehrenfest_derivative(const DensityOperator& rho, const CMatrix& hamiltonian,
                             const CMatrix& a, double hbar = 1.0);

/// Lie-Poisson bracket of the linear functionals <A> and <B>: <A |_ B>.
Complex poisson_bracket(const CMatrix& a, const CMatrix& b, const DensityOperator& rho,
                        double hbar = 1.0);

}  // namespace qtomo
