#pragma once

// Reconstruction of states, detectors, processes, instruments and
// filter/source pairs from measured rates. All estimators are weighted
// linear least squares on the response equations
//     p_k = tr(rho P_k)
// followed by a projection onto the physical cone.

#include <optional>
#include <string>
#include <vector>

#include "qtomo/measures.hpp"
#include "qtomo/simulator.hpp"
#include "qtomo/superop.hpp"

namespace qtomo {

struct TomographyOptions {
  double rank_rtol = 1e-10;         // relative singular value threshold
  double condition_warning = 1e6;   // flag ill-conditioned designs above this
  double stderr_floor = 1e-6;       // weights are 1 / max(se, floor)^2
  bool weighted = true;
  bool project_cp = true;           // process / instrument maps
  double tol = 1e-9;
};

struct ReconstructionReport {
  double residual = 0.0;              // design residual of the returned estimate
  double unconstrained_residual = 0.0;
  double condition_number = 0.0;
  double projection_distance = 0.0;   // trace-norm distance moved by the cone projection
  int design_rank = 0;
  std::vector<std::string> flags;

  bool has_flag(const std::string& f) const;
};

/// Rates observed with one measure. stderrs are optional; when present and
/// weighting is on, equation k gets weight 1 / se_k^2.
struct MeasurementSetting {
  QuantumMeasure measure;
  RVector rates;
  std::optional<RVector> stderrs;
};

/// Eigenvalues clipped at zero, trace rescaled to `intensity`.
CMatrix project_density(const CMatrix& hermitian, double intensity);

struct StateEstimate {
  DensityOperator state;
  CMatrix unconstrained;
  ReconstructionReport report;
};

/// Solves tr(rho P_k) = p_k over Hermitian rho for all settings jointly,
/// then projects to the PSD cone with trace fixed to the mean per-setting
/// rate sum. Throws InfeasibleError ("not informationally complete") when
/// the elements do not span the Hermitian operators.
StateEstimate state_tomography(const std::vector<MeasurementSetting>& settings,
                               const TomographyOptions& opt = {});
StateEstimate state_tomography(const QuantumMeasure& m, const RVector& rates,
                               const TomographyOptions& opt = {});

struct MeasureEstimate {
  QuantumMeasure measure;
  std::vector<CMatrix> unconstrained;
  ReconstructionReport report;
};

/// Probes rho_l with rates(l, k) = tr(rho_l P_k). Each P_k is solved by least
/// squares, clipped to PSD, and the identity deficit is redistributed in
/// proportion to element traces.
MeasureEstimate detector_tomography(const std::vector<DensityOperator>& probes,
                                    const RMatrix& rates, const TomographyOptions& opt = {});

struct ProcessEstimate {
  SuperOperator map;
  SuperOperator unconstrained;
  int choi_rank = 0;
  ReconstructionReport report;
};

/// Solves E(rho_l) = out_l in least squares. With opt.project_cp the Choi
/// matrix is clipped to PSD.
ProcessEstimate process_tomography(const std::vector<DensityOperator>& probes,
                                   const std::vector<CMatrix>& outputs,
                                   const TomographyOptions& opt = {});

struct InstrumentEstimate {
  /// Index j = 0..J, 0 is the null branch.
  std::vector<ProcessEstimate> branches;
  /// branch_rates(l, j): observed marginal rate of branch j for probe l.
  RMatrix branch_rates;
  std::vector<std::string> flags;
};

/// joint[l] is the (J+1) x (K+1) table of coincidence rates for trace-one
/// probe l, rows j = 0..J, columns k = 0..K of the second detector (whose
/// elements must be informationally complete). Postselecting row j gives the
/// unnormalized branch output, reconstructed by state tomography and fed to
/// process tomography.
InstrumentEstimate instrument_tomography(const std::vector<RMatrix>& joint,
                                         const QuantumMeasure& second,
                                         const std::vector<DensityOperator>& probes,
                                         const TomographyOptions& opt = {});
InstrumentEstimate instrument_tomography(const std::vector<CoincidenceLog>& logs,
                                         const QuantumMeasure& second,
                                         const std::vector<DensityOperator>& probes,
                                         const TomographyOptions& opt = {});

struct SelfCalibrationOptions {
  int max_iter = 200;
  double rtol = 1e-12;       // stop when residual change <= rtol * previous residual
  double atol = 1e-13;       // or when the residual itself is this small
  std::optional<double> first_source_intensity;  // gauge; defaults to initial guess trace
};

struct SelfCalibrationResult {
  std::vector<SuperOperator> filters;
  std::vector<CMatrix> sources;
  std::vector<double> residual_history;  // entry 0 is the initial residual
  int iterations = 0;
  bool converged = false;
  ReconstructionReport report;
};

/// Alternating least squares for F_k(rho_l) = outputs[k][l]: filters are
/// solved with sources fixed, then sources (as Hermitian operators) with
/// filters fixed. The gauge (scaling sources against filters) is fixed by the
/// first source's trace.
SelfCalibrationResult self_calibrating_tomography(
    const std::vector<std::vector<CMatrix>>& outputs, std::vector<SuperOperator> filters,
    std::vector<CMatrix> sources, const SelfCalibrationOptions& opt = {});

/// sqrt(sum_kl ||F_k(rho_l) - out_kl||_F^2).
double self_calibration_residual(const std::vector<std::vector<CMatrix>>& outputs,
                                 const std::vector<SuperOperator>& filters,
                                 const std::vector<CMatrix>& sources);

}  // namespace qtomo
