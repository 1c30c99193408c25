#include "qtomo/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qtomo {

bool ReconstructionReport::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

namespace {

struct LinearSolve {
  RVector x;
  int rank = 0;
  double condition = 0.0;
};

// Weighted least squares min ||W^{1/2}(A x - b)||; rank and condition number
// refer to the unweighted design.
LinearSolve solve_real(const RMatrix& a, const RVector& b, const RVector& w, double rank_rtol) {
  LinearSolve s;
  s.rank = numerical_rank(a, rank_rtol);
  s.condition = condition_number(a);
  const RVector sw = w.cwiseSqrt();
  const RMatrix aw = sw.asDiagonal() * a;
  Eigen::BDCSVD<RMatrix> svd(aw, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rank_rtol);
  s.x = svd.solve(sw.asDiagonal() * b);
  return s;
}

void note_conditioning(ReconstructionReport& r, double threshold) {
  if (r.condition_number > threshold) r.flags.emplace_back("ill_conditioned");
}

// Design row for a Hermitian operator against a basis: tr(X B_i), real.
RVector hs_row(const CMatrix& x, const OperatorBasis& basis) {
  RVector row(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    row(static_cast<Eigen::Index>(i)) = x.transpose().cwiseProduct(basis.elements()[i]).sum().real();
  return row;
}

}  // namespace

CMatrix project_density(const CMatrix& hermitian, double intensity) {
  CMatrix p = spectral_apply(hermitian_eigen(hermitian), [](double l) { return std::max(l, 0.0); });
  const double tr = p.trace().real();
  if (tr > 0.0) p *= std::max(intensity, 0.0) / tr;
  return hermitian_part(p);
}

// ---------------------------------------------------------------------------
// state tomography

StateEstimate state_tomography(const std::vector<MeasurementSetting>& settings,
                               const TomographyOptions& opt) {
  if (settings.empty()) throw ContractViolation("state tomography needs at least one measurement setting");
  const int d = settings.front().measure.dim();
  const OperatorBasis basis = hermitian_basis(d);
  Eigen::Index rows = 0;
  for (const auto& s : settings) {
    if (s.measure.dim() != d) throw ContractViolation("measurement settings have different dimensions");
    if (s.rates.size() != static_cast<Eigen::Index>(s.measure.size()))
      throw ContractViolation("rate vector length does not match the measure");
    if (s.stderrs && s.stderrs->size() != s.rates.size())
      throw ContractViolation("stderr vector length does not match the rates");
    rows += s.rates.size();
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  RMatrix a(rows, n);
  RVector b(rows), w = RVector::Ones(rows);
  double intensity = 0.0;
  Eigen::Index r = 0;
  for (const auto& s : settings) {
    for (std::size_t k = 0; k < s.measure.size(); ++k, ++r) {
      a.row(r) = hs_row(s.measure[k], basis).transpose();
      b(r) = s.rates(static_cast<Eigen::Index>(k));
      if (opt.weighted && s.stderrs) {
        const double se = std::max((*s.stderrs)(static_cast<Eigen::Index>(k)), opt.stderr_floor);
        w(r) = 1.0 / (se * se);
      }
    }
    intensity += s.rates.sum();
  }
  intensity /= static_cast<double>(settings.size());

  LinearSolve sol = solve_real(a, b, w, opt.rank_rtol);
  if (sol.rank < n) {
    std::ostringstream os;
    os << "not informationally complete: measure elements span rank " << sol.rank << " of "
       << n;
    throw InfeasibleError(os.str());
  }
  StateEstimate est{DensityOperator::dark(d), basis.resum(sol.x), {}};
  const CMatrix projected = project_density(est.unconstrained, intensity);
  est.state = DensityOperator(projected);
  auto& rep = est.report;
  rep.design_rank = sol.rank;
  rep.condition_number = sol.condition;
  rep.unconstrained_residual = (a * sol.x - b).norm();
  rep.residual = (a * basis.coefficients(projected) - b).norm();
  rep.projection_distance = trace_norm(est.unconstrained - projected);
  note_conditioning(rep, opt.condition_warning);
  if (rep.projection_distance > opt.tol) rep.flags.emplace_back("projected");
  return est;
}

StateEstimate state_tomography(const QuantumMeasure& m, const RVector& rates,
                               const TomographyOptions& opt) {
  return state_tomography(std::vector<MeasurementSetting>{{m, rates, std::nullopt}}, opt);
}

// ---------------------------------------------------------------------------
// detector tomography

namespace {

std::vector<CMatrix> renormalize_measure(std::vector<CMatrix> el, double tol) {
  const auto d = el.front().rows();
  const CMatrix id = CMatrix::Identity(d, d);
  auto clip = [](const CMatrix& p) {
    return hermitian_part(spectral_apply(hermitian_eigen(p), [](double l) { return std::max(l, 0.0); }));
  };
  for (auto& p : el) p = clip(p);
  for (int iter = 0; iter < 100; ++iter) {
    CMatrix sum = CMatrix::Zero(d, d);
    double total_trace = 0.0;
    for (const auto& p : el) {
      sum += p;
      total_trace += p.trace().real();
    }
    const CMatrix deficit = id - sum;
    if (max_abs(deficit) <= 0.1 * tol) return el;
    if (!(total_trace > 0.0)) break;
    for (auto& p : el) p = clip(p + (p.trace().real() / total_trace) * deficit);
  }
  // The proportional update stalls when clipping keeps removing mass; finish
  // with the congruence S^{-1/2} P_k S^{-1/2}, which sums to 1 exactly.
  CMatrix sum = CMatrix::Zero(d, d);
  for (const auto& p : el) sum += p;
  const auto eig = hermitian_eigen(sum);
  if (!(eig.values(0) > 0.0)) throw NumericalError("reconstructed measure elements do not span the space");
  const CMatrix inv_sqrt = spectral_apply(eig, [](double l) { return 1.0 / std::sqrt(l); });
  for (auto& p : el) p = hermitian_part(inv_sqrt * p * inv_sqrt);
  return el;
}

}  // namespace

MeasureEstimate detector_tomography(const std::vector<DensityOperator>& probes,
                                    const RMatrix& rates, const TomographyOptions& opt) {
  if (probes.empty()) throw ContractViolation("detector tomography needs probe states");
  if (rates.rows() != static_cast<Eigen::Index>(probes.size()) || rates.cols() < 1)
    throw ContractViolation("rate table must have one row per probe and one column per element");
  const int d = probes.front().dim();
  const OperatorBasis basis = hermitian_basis(d);
  const auto n = static_cast<Eigen::Index>(basis.size());
  RMatrix a(static_cast<Eigen::Index>(probes.size()), n);
  for (std::size_t l = 0; l < probes.size(); ++l) {
    if (probes[l].dim() != d) throw ContractViolation("probe states have different dimensions");
    a.row(static_cast<Eigen::Index>(l)) = hs_row(probes[l].matrix(), basis).transpose();
  }
  const int rank = numerical_rank(a, opt.rank_rtol);
  if (rank < n) {
    std::ostringstream os;
    os << "probe states span rank " << rank << " of " << n << "; need " << n
       << " linearly independent densities";
    throw InfeasibleError(os.str());
  }
  Eigen::BDCSVD<RMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RMatrix coeffs = svd.solve(rates);  // n x K

  std::vector<CMatrix> raw;
  for (Eigen::Index k = 0; k < coeffs.cols(); ++k) raw.push_back(basis.resum(coeffs.col(k)));
  std::vector<CMatrix> fixed = renormalize_measure(raw, opt.tol);

  MeasureEstimate est{QuantumMeasure(fixed, std::max(opt.tol, 1e-9)), raw, {}};
  auto& rep = est.report;
  rep.design_rank = rank;
  rep.condition_number = condition_number(a);
  rep.unconstrained_residual = (a * coeffs - rates).norm();
  RMatrix fitted(rates.rows(), rates.cols());
  for (std::size_t k = 0; k < fixed.size(); ++k)
    fitted.col(static_cast<Eigen::Index>(k)) = a * basis.coefficients(fixed[k]);
  rep.residual = (fitted - rates).norm();
  for (std::size_t k = 0; k < fixed.size(); ++k)
    rep.projection_distance = std::max(rep.projection_distance, trace_norm(raw[k] - fixed[k]));
  note_conditioning(rep, opt.condition_warning);
  if (rep.projection_distance > opt.tol) rep.flags.emplace_back("projected");
  return est;
}

// ---------------------------------------------------------------------------
// process tomography

ProcessEstimate process_tomography(const std::vector<DensityOperator>& probes,
                                   const std::vector<CMatrix>& outputs,
                                   const TomographyOptions& opt) {
  if (probes.empty() || probes.size() != outputs.size())
    throw ContractViolation("process tomography needs one output per probe");
  const int d = probes.front().dim();
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  const auto l_count = static_cast<Eigen::Index>(probes.size());
  CMatrix s(n, l_count), r(n, l_count);
  for (Eigen::Index l = 0; l < l_count; ++l) {
    const auto& out = outputs[static_cast<std::size_t>(l)];
    if (probes[static_cast<std::size_t>(l)].dim() != d || out.rows() != d || out.cols() != d)
      throw ContractViolation("probe and output dimensions must agree");
    s.col(l) = vec(probes[static_cast<std::size_t>(l)].matrix());
    r.col(l) = vec(out);
  }
  const int rank = numerical_rank(s, opt.rank_rtol);
  if (rank < n) {
    std::ostringstream os;
    os << "probe states span rank " << rank << " of " << n
       << "; they must span all Hermitian operators";
    throw InfeasibleError(os.str());
  }
  // M S = R  <=>  S^T M^T = R^T
  Eigen::BDCSVD<CMatrix> svd(s.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const CMatrix m = svd.solve(r.transpose()).transpose();

  SuperOperator raw(d, m);
  SuperOperator fitted = opt.project_cp ? project_cp(raw) : raw;
  ProcessEstimate est{fitted, raw, choi_rank(choi_transform(fitted), opt.tol), {}};
  auto& rep = est.report;
  rep.design_rank = rank;
  rep.condition_number = condition_number(s);
  rep.unconstrained_residual = (m * s - r).norm();
  rep.residual = (fitted.matrix() * s - r).norm();
  rep.projection_distance = trace_norm(choi_transform(raw).matrix() - choi_transform(fitted).matrix());
  note_conditioning(rep, opt.condition_warning);
  if (rep.projection_distance > opt.tol) rep.flags.emplace_back("projected");
  return est;
}

// ---------------------------------------------------------------------------
// instrument tomography

InstrumentEstimate instrument_tomography(const std::vector<RMatrix>& joint,
                                         const QuantumMeasure& second,
                                         const std::vector<DensityOperator>& probes,
                                         const TomographyOptions& opt) {
  if (joint.empty() || joint.size() != probes.size())
    throw ContractViolation("instrument tomography needs one coincidence table per probe");
  const auto k_count = static_cast<Eigen::Index>(second.size());
  const Eigen::Index branches = joint.front().rows();
  for (const auto& t : joint)
    if (t.rows() != branches || t.cols() != k_count + 1)
      throw ContractViolation("coincidence tables must be (J+1) x (K+1)");
  for (const auto& p : probes)
    if (std::abs(p.trace() - 1.0) > opt.tol) throw ContractViolation("probe states must have trace one");
  const auto ic = informational_completeness(second);
  if (!ic.complete) {
    std::ostringstream os;
    os << "not informationally complete: second detector spans rank " << ic.rank;
    throw InfeasibleError(os.str());
  }

  InstrumentEstimate est;
  est.branch_rates.resize(static_cast<Eigen::Index>(probes.size()), branches);
  for (std::size_t l = 0; l < probes.size(); ++l)
    est.branch_rates.row(static_cast<Eigen::Index>(l)) = joint[l].rowwise().sum().transpose();

  for (Eigen::Index j = 0; j < branches; ++j) {
    if (!(est.branch_rates.col(j).sum() > 0.0)) {
      if (j == 0) {
        // a null branch that never fires is the zero map
        est.flags.emplace_back("null_branch_empty");
        const int d = second.dim();
        est.branches.push_back({SuperOperator::zero(d), SuperOperator::zero(d), 0, {}});
        continue;
      }
      std::ostringstream os;
      os << "insufficient events for branch " << j;
      throw InfeasibleError(os.str());
    }
    std::vector<CMatrix> outputs;
    for (std::size_t l = 0; l < probes.size(); ++l) {
      const RVector rates = joint[l].row(j).tail(k_count).transpose();
      const double total = rates.sum();
      if (total > 0.0)
        outputs.push_back(state_tomography(second, rates, opt).state.matrix());
      else
        outputs.push_back(CMatrix::Zero(second.dim(), second.dim()));
    }
    est.branches.push_back(process_tomography(probes, outputs, opt));
  }
  return est;
}

InstrumentEstimate instrument_tomography(const std::vector<CoincidenceLog>& logs,
                                         const QuantumMeasure& second,
                                         const std::vector<DensityOperator>& probes,
                                         const TomographyOptions& opt) {
  std::vector<RMatrix> joint;
  joint.reserve(logs.size());
  for (const auto& log : logs) {
    if (log.elements != second.size())
      throw ContractViolation("coincidence log element count does not match the second detector");
    joint.push_back(empirical_rates(log).joint);
  }
  return instrument_tomography(joint, second, probes, opt);
}

// ---------------------------------------------------------------------------
// self-calibrating tomography

double self_calibration_residual(const std::vector<std::vector<CMatrix>>& outputs,
                                 const std::vector<SuperOperator>& filters,
                                 const std::vector<CMatrix>& sources) {
  double acc = 0.0;
  for (std::size_t k = 0; k < filters.size(); ++k)
    for (std::size_t l = 0; l < sources.size(); ++l)
      acc += (filters[k].apply(sources[l]) - outputs[k][l]).squaredNorm();
  return std::sqrt(acc);
}

namespace {

void solve_filters(const std::vector<std::vector<CMatrix>>& outputs,
                   std::vector<SuperOperator>& filters, const std::vector<CMatrix>& sources) {
  const int d = filters.front().dim();
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  const auto l_count = static_cast<Eigen::Index>(sources.size());
  CMatrix s(n, l_count);
  for (Eigen::Index l = 0; l < l_count; ++l) s.col(l) = vec(sources[static_cast<std::size_t>(l)]);
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(s.transpose());
  for (std::size_t k = 0; k < filters.size(); ++k) {
    CMatrix r(n, l_count);
    for (Eigen::Index l = 0; l < l_count; ++l) r.col(l) = vec(outputs[k][static_cast<std::size_t>(l)]);
    filters[k] = SuperOperator(d, cod.solve(r.transpose()).transpose());
  }
}

void solve_sources(const std::vector<std::vector<CMatrix>>& outputs,
                   const std::vector<SuperOperator>& filters, std::vector<CMatrix>& sources,
                   const OperatorBasis& basis) {
  const int d = basis.dim();
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  const auto k_count = static_cast<Eigen::Index>(filters.size());
  // real design: [Re; Im] of vec(F_k B_i), stacked over k
  RMatrix a(2 * n * k_count, static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index k = 0; k < k_count; ++k)
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const CVector col = vec(filters[static_cast<std::size_t>(k)].apply(basis.elements()[i]));
      a.block(2 * n * k, static_cast<Eigen::Index>(i), n, 1) = col.real();
      a.block(2 * n * k + n, static_cast<Eigen::Index>(i), n, 1) = col.imag();
    }
  Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(a);
  for (std::size_t l = 0; l < sources.size(); ++l) {
    RVector b(a.rows());
    for (Eigen::Index k = 0; k < k_count; ++k) {
      const CVector o = vec(outputs[static_cast<std::size_t>(k)][l]);
      b.segment(2 * n * k, n) = o.real();
      b.segment(2 * n * k + n, n) = o.imag();
    }
    sources[l] = basis.resum(cod.solve(b));
  }
}

}  // namespace

SelfCalibrationResult self_calibrating_tomography(
    const std::vector<std::vector<CMatrix>>& outputs, std::vector<SuperOperator> filters,
    std::vector<CMatrix> sources, const SelfCalibrationOptions& opt) {
  if (filters.size() < 2 || sources.size() < 2)
    throw ContractViolation("self-calibration needs at least two filters and two sources");
  const int d = filters.front().dim();
  if (outputs.size() != filters.size()) throw ContractViolation("need one output row per filter");
  for (const auto& row : outputs) {
    if (row.size() != sources.size()) throw ContractViolation("need one output per filter and source");
    for (const auto& o : row)
      if (o.rows() != d || o.cols() != d) throw ContractViolation("output has the wrong dimension");
  }
  for (const auto& f : filters)
    if (f.dim() != d) throw ContractViolation("filters have mismatched dimensions");
  for (auto& s : sources) {
    const auto rep = validate_density(s);
    if (s.rows() != d || !rep.ok) throw ContractViolation("initial source guess is not a valid density");
    s = hermitian_part(s);
  }
  const double gauge = opt.first_source_intensity.value_or(sources.front().trace().real());
  if (!(gauge > 0.0)) throw ContractViolation("first source must have positive intensity");

  const OperatorBasis basis = hermitian_basis(d);
  SelfCalibrationResult res;
  res.residual_history.push_back(self_calibration_residual(outputs, filters, sources));
  double best = res.residual_history.back();
  res.filters = filters;
  res.sources = sources;
  if (best <= opt.atol) res.converged = true;

  for (int it = 1; it <= opt.max_iter && !res.converged; ++it) {
    solve_filters(outputs, filters, sources);
    solve_sources(outputs, filters, sources, basis);
    const double tr = sources.front().trace().real();
    if (std::abs(tr) > 0.0) {
      const double c = gauge / tr;
      for (auto& s : sources) s *= c;
      for (auto& f : filters) f = f * Complex(1.0 / c, 0.0);
    }
    const double r = self_calibration_residual(outputs, filters, sources);
    const double prev = res.residual_history.back();
    res.residual_history.push_back(r);
    res.iterations = it;
    if (r <= best) {
      best = r;
      res.filters = filters;
      res.sources = sources;
    }
    if (r <= opt.atol || std::abs(prev - r) <= opt.rtol * prev) res.converged = true;
  }

  double data_norm = 0.0;
  for (const auto& row : outputs)
    for (const auto& o : row) data_norm += o.squaredNorm();
  data_norm = std::sqrt(data_norm);
  res.report.residual = best;
  res.report.unconstrained_residual = best;
  if (!res.converged) res.report.flags.emplace_back("not_converged");
  if (best > 1e-8 * std::max(data_norm, 1.0)) res.report.flags.emplace_back("inconsistent_data");
  return res;
}

}  // namespace qtomo
