#include "qtomo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qtomo {

namespace {

void require_hermitian(const CMatrix& h, const char* what, double tol = 1e-9) {
  if (h.rows() != h.cols() || h.rows() == 0)
    throw ContractViolation(std::string(what) + " must be a non-empty square matrix");
  if (hermitian_defect(h) > tol * std::max(1.0, max_abs(h)))
    throw ContractViolation(std::string(what) + " must be Hermitian");
}

void require_hbar(double hbar) {
  if (!(hbar > 0.0)) throw ContractViolation("hbar must be positive");
}

CMatrix zero_if_empty(const CMatrix& m, Eigen::Index d) {
  return m.size() == 0 ? CMatrix::Zero(d, d) : m;
}

}  // namespace

CMatrix GeneratorModel::generator() const {
  const auto d = hamiltonian.rows();
  return -(kI * hamiltonian + zero_if_empty(dissipation, d)) / hbar;
}

void GeneratorModel::validate(double tol) const {
  require_hermitian(hamiltonian, "Hamiltonian", tol);
  require_hbar(hbar);
  if (dissipation.size() != 0) {
    require_hermitian(dissipation, "dissipative potential V", tol);
    if (dissipation.rows() != hamiltonian.rows()) throw ContractViolation("V and H dimensions differ");
    if (min_eigenvalue(dissipation) < -tol) throw ContractViolation("dissipative potential V is not PSD");
  }
}

CMatrix LindbladModel::generator() const {
  const auto d = hamiltonian.rows();
  CMatrix k = -(kI * hamiltonian + zero_if_empty(dissipation, d)) / hbar;
  for (std::size_t l = 0; l < jumps.size(); ++l) k -= 0.5 * rates[l] * jumps[l].adjoint() * jumps[l];
  return k;
}

void LindbladModel::validate(double tol) const {
  require_hermitian(hamiltonian, "Hamiltonian", tol);
  require_hbar(hbar);
  if (jumps.size() != rates.size()) throw ContractViolation("need one rate per jump operator");
  for (std::size_t l = 0; l < jumps.size(); ++l) {
    if (jumps[l].rows() != hamiltonian.rows() || jumps[l].cols() != hamiltonian.cols())
      throw ContractViolation("jump operator dimension does not match H");
    if (!(rates[l] >= 0.0)) {
      std::ostringstream os;
      os << "jump rate gamma_" << l << " = " << rates[l] << " is negative";
      throw ContractViolation(os.str());
    }
  }
  if (dissipation.size() != 0) {
    GeneratorModel g{hamiltonian, dissipation, hbar};
    g.validate(tol);
  }
}

Trajectory slice_evolution_varying(const std::function<CMatrix(double)>& generator, const CMatrix& rho0,
                                   double dt, int steps) {
  if (!(dt > 0.0)) throw ContractViolation("slice width dt must be positive");
  if (steps < 0) throw ContractViolation("step count must be nonnegative");
  const auto d = rho0.rows();
  Trajectory tr;
  tr.times.reserve(static_cast<std::size_t>(steps) + 1);
  tr.states.reserve(static_cast<std::size_t>(steps) + 1);
  tr.times.push_back(0.0);
  tr.states.push_back(rho0);
  CMatrix rho = rho0;
  for (int s = 0; s < steps; ++s) {
    const CMatrix k = generator(s * dt);
    if (k.rows() != d || k.cols() != d) throw ContractViolation("generator dimension does not match the state");
    const CMatrix t = CMatrix::Identity(d, d) + dt * k;
    rho = t * rho * t.adjoint();
    tr.times.push_back((s + 1) * dt);
    tr.states.push_back(rho);
  }
  return tr;
}

Trajectory slice_evolution(const CMatrix& generator, const CMatrix& rho0, double dt, int steps) {
  return slice_evolution_varying([&generator](double) { return generator; }, rho0, dt, steps);
}

DensityOperator von_neumann_evolve(const CMatrix& hamiltonian, const DensityOperator& rho0,
                                   double t, double hbar) {
  require_hermitian(hamiltonian, "Hamiltonian");
  require_hbar(hbar);
  if (hamiltonian.rows() != rho0.dim()) throw ContractViolation("H and state dimensions differ");
  const auto eig = hermitian_eigen(hamiltonian);
  const CMatrix u = spectral_apply(eig, [&](double e) { return std::exp(-kI * e * t / hbar); });
  return DensityOperator(u * rho0.matrix() * u.adjoint());
}

CVector SpectralSolution::at(double t) const {
  CVector psi = CVector::Zero(components.front().size());
  for (std::size_t k = 0; k < energies.size(); ++k)
    psi += std::exp(-kI * energies[k] * t / hbar) * components[k];
  return psi;
}

SpectralSolution spectral_solution(const CMatrix& hamiltonian, const StateVector& psi0,
                                   double hbar, double cluster_tol) {
  require_hermitian(hamiltonian, "Hamiltonian");
  require_hbar(hbar);
  if (hamiltonian.rows() != psi0.dim()) throw ContractViolation("H and state dimensions differ");
  const auto eig = hermitian_eigen(hamiltonian);
  SpectralSolution sol;
  sol.hbar = hbar;
  const Eigen::Index n = eig.values.size();
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i + 1;
    while (j < n && eig.values(j) - eig.values(j - 1) < cluster_tol) ++j;
    const CMatrix v = eig.vectors.middleCols(i, j - i);
    sol.energies.push_back(eig.values.segment(i, j - i).mean());
    sol.components.push_back(v * (v.adjoint() * psi0.components()));
    i = j;
  }
  return sol;
}

StateVector schrodinger_evolve(const CMatrix& hamiltonian, const StateVector& psi0, double t,
                               double hbar) {
  return StateVector(spectral_solution(hamiltonian, psi0, hbar).at(t));
}

CMatrix liouvillian(const LindbladModel& model) {
  const auto d = model.hamiltonian.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  const CMatrix k = model.generator();
  // vec(K rho) = (K x 1) vec(rho); vec(rho K^*) = (1 x conj(K)) vec(rho)
  CMatrix l = kron(k, id) + kron(id, k.conjugate());
  for (std::size_t j = 0; j < model.jumps.size(); ++j)
    l += model.rates[j] * kron(model.jumps[j], model.jumps[j].conjugate());
  return l;
}

namespace {

Trajectory rk4_trajectory(const CMatrix& gen, const CMatrix& rho0, const std::vector<double>& times,
                          int substeps) {
  const int d = static_cast<int>(rho0.rows());
  Trajectory tr;
  tr.times = times;
  CVector y = vec(rho0);
  tr.states.push_back(rho0);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double h = (times[i] - times[i - 1]) / substeps;
    for (int s = 0; s < substeps; ++s) {
      const CVector k1 = gen * y;
      const CVector k2 = gen * (y + 0.5 * h * k1);
      const CVector k3 = gen * (y + 0.5 * h * k2);
      const CVector k4 = gen * (y + h * k3);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    tr.states.push_back(unvec(y, d));
  }
  return tr;
}

double max_difference(const Trajectory& a, const Trajectory& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i) m = std::max(m, max_abs(a.states[i] - b.states[i]));
  return m;
}

}  // namespace

Trajectory lindblad_evolve(const LindbladModel& model, const CMatrix& rho0, double t, double dt,
                           const IntegratorOptions& options) {
  model.validate();
  if (!(dt > 0.0)) throw ContractViolation("time step dt must be positive");
  if (!(t >= 0.0)) throw ContractViolation("final time must be nonnegative");
  if (rho0.rows() != model.dim() || rho0.cols() != model.dim())
    throw ContractViolation("initial state dimension does not match the model");
  std::vector<double> times{0.0};
  const auto n = static_cast<long>(std::ceil(t / dt - 1e-9));
  for (long i = 1; i <= n; ++i) times.push_back(std::min(t, i * dt));
  const CMatrix gen = liouvillian(model);

  int substeps = 1;
  Trajectory coarse = rk4_trajectory(gen, rho0, times, substeps);
  for (int h = 0; h < options.max_halvings; ++h) {
    substeps *= 2;
    Trajectory fine = rk4_trajectory(gen, rho0, times, substeps);
    const double diff = max_difference(coarse, fine);
    if (diff < options.tolerance) return fine;
    coarse = std::move(fine);
  }
  throw NumericalError("Lindblad integrator did not reach the requested tolerance");
}

Trajectory sliced_master(const LindbladModel& model, const CMatrix& rho0, double dt, int steps) {
  model.validate();
  if (!(dt > 0.0)) throw ContractViolation("slice width dt must be positive");
  const auto d = rho0.rows();
  const CMatrix t = CMatrix::Identity(d, d) + dt * model.generator();
  Trajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(rho0);
  CMatrix rho = rho0;
  for (int s = 0; s < steps; ++s) {
    CMatrix next = t * rho * t.adjoint();
    for (std::size_t l = 0; l < model.jumps.size(); ++l)
      next += model.rates[l] * dt * model.jumps[l] * rho * model.jumps[l].adjoint();
    rho = std::move(next);
    tr.times.push_back((s + 1) * dt);
    tr.states.push_back(rho);
  }
  return tr;
}

DensityOperator gibbs_state(const CMatrix& hamiltonian, double temperature, double kb) {
  require_hermitian(hamiltonian, "Hamiltonian");
  if (!(temperature > 0.0)) throw ContractViolation("temperature must be positive");
  if (!(kb > 0.0)) throw ContractViolation("Boltzmann constant must be positive");
  const auto eig = hermitian_eigen(hamiltonian);
  const double e0 = eig.values(0);
  const double beta = 1.0 / (kb * temperature);
  const double z = (-(eig.values.array() - e0) * beta).exp().sum();
  return DensityOperator(spectral_apply(eig, [&](double e) { return std::exp(-(e - e0) * beta) / z; }));
}

SpectralLines rydberg_ritz_lines(const CMatrix& hamiltonian, double hbar, double tol) {
  require_hermitian(hamiltonian, "Hamiltonian");
  require_hbar(hbar);
  const auto e = hermitian_eigen(hamiltonian).values;
  std::vector<double> omega;
  for (Eigen::Index j = 0; j < e.size(); ++j)
    for (Eigen::Index k = j + 1; k < e.size(); ++k) {
      const double w = std::abs(e(j) - e(k)) / hbar;
      if (w > tol) omega.push_back(w);
    }
  std::sort(omega.begin(), omega.end());
  SpectralLines lines;
  for (double w : omega)
    if (lines.angular.empty() || w - lines.angular.back() > tol) lines.angular.push_back(w);
  for (double w : lines.angular) lines.frequency.push_back(w / (2.0 * std::numbers::pi));
  return lines;
}

CMatrix lie_product(const CMatrix& a, const CMatrix& b, double hbar) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw ContractViolation("Lie product needs square matrices of equal size");
  require_hbar(hbar);
  return (kI / hbar) * (a * b - b * a);
}

Complex ehrenfest_derivative(const DensityOperator& rho, const CMatrix& hamiltonian,
                             const CMatrix& a, double hbar) {
  require_hermitian(hamiltonian, "Hamiltonian");
  return quantum_value(rho, lie_product(hamiltonian, a, hbar));
}

Complex poisson_bracket(const CMatrix& a, const CMatrix& b, const DensityOperator& rho, double hbar) {
  return quantum_value(rho, lie_product(a, b, hbar));
}

}  // namespace qtomo
