#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include "qtomo/dynamics.hpp"
#include "qtomo/optics.hpp"
#include "qtomo/rng.hpp"
#include "qtomo/simulator.hpp"
#include "qtomo/tomography.hpp"
#include "qtomo/uncertainty.hpp"

namespace qtomo::cli {

using io::json;

namespace {

// ---------------------------------------------------------------------------
// input helpers

json load_json(const fs::path& p, Run& run) {
  run.input(p);
  return io::read_json(p);
}

// Any loader failure in user data is an input error.
template <class F>
auto as_input(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InputError&) {
    throw;
  } catch (const ContractViolation& e) {
    throw InputError(what + ": " + e.what());
  } catch (const json::exception& e) {
    throw InputError(what + ": " + e.what());
  }
}

// A density file, or a tomography report whose "estimate" is a density.
DensityOperator load_density(const fs::path& p, Run& run) {
  json j = load_json(p, run);
  if (j.is_object() && j.contains("estimate") && !j.contains("matrix")) j = j["estimate"];
  return io::density_from_json(j, run.global.tolerances());
}

io::MeasureFile load_measure(const fs::path& p, Run& run) {
  return io::measure_from_json(load_json(p, run), run.global.tol_psd);
}

SuperOperator channel_superop(const json& j, const Run& run) {
  return superop_from_kraus(io::channel_from_json(j, run.global.tol_psd));
}

RVector real_vector(const json& j, const std::string& what) {
  return as_input(what, [&] {
    if (!j.is_array()) throw InputError(what + " must be an array of numbers");
    RVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
  });
}

RMatrix real_matrix(const json& j, const std::string& what) {
  return as_input(what, [&] {
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw InputError(what + " must be a nested array");
    RMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    for (std::size_t r = 0; r < j.size(); ++r) {
      if (j[r].size() != j[0].size()) throw InputError(what + " has rows of different lengths");
      for (std::size_t c = 0; c < j[r].size(); ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
    return m;
  });
}

void require_dir(const fs::path& p) {
  if (!fs::is_directory(p)) throw InputError("missing directory " + p.string());
}

/// Files with the given extension in a directory, sorted by name.
std::vector<fs::path> list_files(const fs::path& dir, const std::string& ext) {
  require_dir(dir);
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw InputError("no " + ext + " files in " + dir.string());
  return out;
}

struct Probes {
  std::vector<std::string> names;
  std::vector<DensityOperator> states;
};

Probes load_probes(const fs::path& dir, Run& run) {
  Probes p;
  for (const auto& f : list_files(dir, ".json")) {
    p.names.push_back(f.stem().string());
    p.states.push_back(load_density(f, run));
  }
  return p;
}

EventLog load_event_log(const fs::path& p, Run& run) {
  if (!fs::exists(p)) throw InputError("missing events file " + p.string());
  run.input(p);
  const std::string text = io::read_text(p);
  if (io::is_coincidence_csv(text)) throw InputError(p.string() + " holds coincidences, expected detection events");
  return io::event_log_from_csv(text);
}

CoincidenceLog load_coincidence_log(const fs::path& p, Run& run) {
  if (!fs::exists(p)) throw InputError("missing events file " + p.string());
  run.input(p);
  const std::string text = io::read_text(p);
  if (!io::is_coincidence_csv(text)) throw InputError(p.string() + " holds detection events, expected coincidences");
  return io::coincidence_log_from_csv(text);
}

struct Rates {
  RVector rates;  // labels 1..K
  std::optional<RVector> stderrs;
};

Rates rates_from_log(const EventLog& log, std::size_t k, const std::string& where) {
  if (log.elements != k)
    throw InputError(where + " has " + std::to_string(log.elements) + " elements, the measure has " + std::to_string(k));
  auto r = as_input(where, [&] { return empirical_rates(log); });
  const auto n = static_cast<Eigen::Index>(k);
  return {r.rates.tail(n), RVector(r.stderrs.tail(n))};
}

/// Rates for a named observation: rates.json[name] when present, else
/// events/<name>.csv.
Rates named_rates(const fs::path& dir, const std::string& name, std::size_t k, const std::optional<json>& table,
                  Run& run) {
  if (table) {
    if (!table->contains(name)) throw InputError("rates.json has no entry \"" + name + "\"");
    const json& e = (*table)[name];
    Rates r;
    if (e.is_object()) {
      r.rates = real_vector(e.value("rates", json()), "rates of " + name);
      if (e.contains("stderrs")) r.stderrs = real_vector(e["stderrs"], "stderrs of " + name);
    } else {
      r.rates = real_vector(e, "rates of " + name);
    }
    if (static_cast<std::size_t>(r.rates.size()) != k)
      throw InputError("rates of " + name + " have length " + std::to_string(r.rates.size()) + ", expected " +
                       std::to_string(k));
    return r;
  }
  const fs::path f = dir / "events" / (name + ".csv");
  return rates_from_log(load_event_log(f, run), k, f.string());
}

std::optional<json> optional_rates_table(const fs::path& dir, Run& run) {
  const fs::path p = dir / "rates.json";
  if (!fs::exists(p)) return std::nullopt;
  return load_json(p, run);
}

// ---------------------------------------------------------------------------
// output helpers

json report_json(const ReconstructionReport& r) {
  return json{{"condition_number", r.condition_number},
              {"design_rank", r.design_rank},
              {"flags", r.flags},
              {"projection_distance", r.projection_distance},
              {"residual", r.residual},
              {"unconstrained_residual", r.unconstrained_residual}};
}

json matrices_json(const std::vector<CMatrix>& ms) {
  json a = json::array();
  for (const auto& m : ms) a.push_back(io::to_json(m));
  return a;
}

json class_json(const FilterClass& c) {
  return json{{"active", c.active},
              {"choi_rank", c.choi_rank},
              {"lossless", c.lossless},
              {"max_pi_eigenvalue", c.max_pi_eigenvalue},
              {"mixing", c.mixing},
              {"passive", c.passive}};
}

json map_json(const SuperOperator& e, const Run& run) {
  json j{{"dim", e.dim()},
         {"superoperator", io::to_json(e.matrix())},
         {"choi", io::to_json(choi_transform(e).matrix())}};
  const auto cp = is_completely_positive(e, run.global.tol_psd);
  j["completely_positive"] = cp.cp;
  j["min_choi_eigenvalue"] = cp.min_choi_eigenvalue;
  if (cp.cp && max_abs(e.matrix()) > 0.0) {
    j["kraus"] = matrices_json(kraus_from_choi(choi_transform(e), run.global.tol_psd).operators());
    j["classification"] = class_json(classify(e, run.global.tol_psd));
  }
  return j;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_plot(const fs::path& p, const std::string& header, const std::vector<std::pair<double, double>>& rows,
                Run& run) {
  std::ostringstream os;
  os << header << '\n';
  for (const auto& [x, y] : rows) os << format_double(x) << ',' << format_double(y) << '\n';
  io::write_text_atomic(p, os.str());
  run.output(p);
}

void emit(const fs::path& p, const json& j, Run& run) {
  io::write_json(p, j);
  run.output(p);
  std::cout << "wrote " << p.string() << '\n';
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

TomographyOptions tomography_options(const TomoOptions& opt, const Run& run) {
  TomographyOptions to;
  to.rank_rtol = run.global.rtol;
  to.tol = run.global.tol_psd;
  to.weighted = !opt.unweighted;
  to.project_cp = !opt.no_cp_projection;
  return to;
}

// ---------------------------------------------------------------------------
// tomography bundles

json tomo_state(const fs::path& dir, const TomographyOptions& to, Run& run) {
  std::vector<MeasurementSetting> settings;
  const auto table = optional_rates_table(dir, run);
  if (fs::exists(dir / "measure.json")) {
    const auto mf = load_measure(dir / "measure.json", run);
    const std::size_t k = mf.measure.size();
    Rates r;
    if (table) {
      r.rates = real_vector(table->value("rates", json()), "rates.json \"rates\"");
      if (table->contains("stderrs")) r.stderrs = real_vector((*table)["stderrs"], "rates.json \"stderrs\"");
      if (static_cast<std::size_t>(r.rates.size()) != k) throw InputError("rates.json length does not match the measure");
    } else {
      if (!fs::is_directory(dir / "events")) throw InputError("missing events: no rates.json and no events/ in " + dir.string());
      // all logs observe the same measure; pool them
      EventLog pooled;
      bool first = true;
      for (const auto& f : list_files(dir / "events", ".csv")) {
        auto log = load_event_log(f, run);
        if (first) {
          pooled = log;
          first = false;
        } else {
          if (log.elements != pooled.elements) throw InputError("event logs in " + dir.string() + " disagree on element count");
          pooled.labels.insert(pooled.labels.end(), log.labels.begin(), log.labels.end());
        }
      }
      r = rates_from_log(pooled, k, (dir / "events").string());
    }
    settings.push_back({mf.measure, r.rates, r.stderrs});
  } else if (fs::is_directory(dir / "measures")) {
    for (const auto& f : list_files(dir / "measures", ".json")) {
      const auto mf = load_measure(f, run);
      auto r = named_rates(dir, f.stem().string(), mf.measure.size(), table, run);
      settings.push_back({mf.measure, r.rates, r.stderrs});
    }
  } else {
    throw InputError("state bundle needs measure.json or measures/ in " + dir.string());
  }

  const auto est = state_tomography(settings, to);
  json out{{"kind", "state"},
           {"estimate", io::density_to_json(est.state)},
           {"unconstrained", io::to_json(est.unconstrained)},
           {"diagnostics", report_json(est.report)},
           {"trace", est.state.trace()}};
  if (est.state.dim() == 2) {
    const auto s = density_to_stokes(est.state);
    out["stokes"] = {s.s0, s.s1, s.s2, s.s3};
  }
  if (fs::exists(dir / "reference.json")) {
    const auto ref = load_density(dir / "reference.json", run);
    if (ref.dim() != est.state.dim()) throw InputError("reference.json has the wrong dimension");
    out["reference_trace_distance"] = trace_distance(est.state.matrix(), ref.matrix());
  }
  return out;
}

json tomo_detector(const fs::path& dir, const TomographyOptions& to, Run& run) {
  const auto probes = load_probes(dir / "probes", run);
  const auto table = optional_rates_table(dir, run);
  std::size_t k = 0;
  if (table) {
    const auto& first = (*table)[probes.names.front()];
    k = (first.is_object() ? first.value("rates", json::array()) : first).size();
  } else {
    const fs::path f = dir / "events" / (probes.names.front() + ".csv");
    k = load_event_log(f, run).elements;
    run.inputs.pop_back();
  }
  if (k == 0) throw InputError("cannot determine the number of detector elements");
  RMatrix rates(static_cast<Eigen::Index>(probes.names.size()), static_cast<Eigen::Index>(k));
  for (std::size_t l = 0; l < probes.names.size(); ++l)
    rates.row(static_cast<Eigen::Index>(l)) = named_rates(dir, probes.names[l], k, table, run).rates.transpose();
  const auto est = detector_tomography(probes.states, rates, to);
  json out{{"kind", "detector"},
           {"estimate", io::measure_to_json(est.measure)},
           {"unconstrained", matrices_json(est.unconstrained)},
           {"probes", probes.names},
           {"diagnostics", report_json(est.report)}};
  if (fs::exists(dir / "reference.json")) {
    const auto ref = load_measure(dir / "reference.json", run);
    if (ref.measure.size() != est.measure.size()) throw InputError("reference.json has a different element count");
    double err = 0.0;
    for (std::size_t i = 0; i < ref.measure.size(); ++i) err = std::max(err, max_abs(ref.measure[i] - est.measure[i]));
    out["reference_max_error"] = err;
  }
  return out;
}

json tomo_process(const fs::path& dir, const TomographyOptions& to, Run& run) {
  const auto probes = load_probes(dir / "probes", run);
  const auto mf = load_measure(dir / "measure.json", run);
  const auto table = optional_rates_table(dir, run);
  std::vector<CMatrix> outputs;
  json states = json::array();
  for (const auto& name : probes.names) {
    // lost intensity appears as null events, so the output trace is the
    // fraction of detected events
    auto r = named_rates(dir, name, mf.measure.size(), table, run);
    auto st = state_tomography(std::vector<MeasurementSetting>{{mf.measure, r.rates, r.stderrs}}, to);
    outputs.push_back(st.state.matrix());
    states.push_back(io::density_to_json(st.state));
  }
  const auto est = process_tomography(probes.states, outputs, to);
  json out{{"kind", "process"},
           {"estimate", map_json(est.map, run)},
           {"unconstrained", io::to_json(est.unconstrained.matrix())},
           {"choi_rank", est.choi_rank},
           {"probes", probes.names},
           {"output_states", states},
           {"diagnostics", report_json(est.report)}};
  return out;
}

json tomo_instrument(const fs::path& dir, const TomographyOptions& to, Run& run) {
  const auto probes = load_probes(dir / "probes", run);
  const auto second = load_measure(dir / "measure.json", run);
  const auto table = optional_rates_table(dir, run);
  InstrumentEstimate est = [&] {
    if (table) {
      std::vector<RMatrix> joint;
      for (const auto& name : probes.names) {
        if (!table->contains(name)) throw InputError("rates.json has no entry \"" + name + "\"");
        joint.push_back(real_matrix((*table)[name], "coincidence rates of " + name));
      }
      return instrument_tomography(joint, second.measure, probes.states, to);
    }
    std::vector<CoincidenceLog> logs;
    for (const auto& name : probes.names) logs.push_back(load_coincidence_log(dir / "events" / (name + ".csv"), run));
    return instrument_tomography(logs, second.measure, probes.states, to);
  }();
  json branches = json::array();
  for (std::size_t j = 0; j < est.branches.size(); ++j) {
    json b = map_json(est.branches[j].map, run);
    b["label"] = j;
    b["choi_rank"] = est.branches[j].choi_rank;
    b["diagnostics"] = report_json(est.branches[j].report);
    branches.push_back(b);
  }
  json rates = json::array();
  for (Eigen::Index l = 0; l < est.branch_rates.rows(); ++l) {
    json row = json::array();
    for (Eigen::Index j = 0; j < est.branch_rates.cols(); ++j) row.push_back(est.branch_rates(l, j));
    rates.push_back(row);
  }
  return json{{"kind", "instrument"},
              {"branches", branches},
              {"branch_rates", rates},
              {"probes", probes.names},
              {"flags", est.flags}};
}

json tomo_selfcal(const fs::path& dir, const TomoOptions& opt, Run& run) {
  std::vector<std::string> source_names, filter_names;
  std::vector<CMatrix> sources;
  std::vector<SuperOperator> filters;
  for (const auto& f : list_files(dir / "sources", ".json")) {
    source_names.push_back(f.stem().string());
    sources.push_back(load_density(f, run).matrix());
  }
  for (const auto& f : list_files(dir / "filters", ".json")) {
    filter_names.push_back(f.stem().string());
    filters.push_back(as_input("filter " + f.string(), [&] { return channel_superop(load_json(f, run), run); }));
  }
  std::vector<std::vector<CMatrix>> outputs(filters.size());
  for (std::size_t k = 0; k < filters.size(); ++k)
    for (const auto& s : source_names) {
      const fs::path p = dir / "outputs" / (filter_names[k] + "__" + s + ".json");
      if (!fs::exists(p)) throw InputError("missing output file " + p.string());
      outputs[k].push_back(load_density(p, run).matrix());
    }
  SelfCalibrationOptions so;
  so.max_iter = opt.max_iter;
  const auto res = self_calibrating_tomography(outputs, filters, sources, so);
  json fj = json::array();
  for (std::size_t k = 0; k < res.filters.size(); ++k) {
    json f = map_json(res.filters[k], run);
    f["name"] = filter_names[k];
    fj.push_back(f);
  }
  json sj = json::array();
  for (std::size_t l = 0; l < res.sources.size(); ++l)
    sj.push_back(json{{"name", source_names[l]}, {"matrix", io::to_json(res.sources[l])}});
  return json{{"kind", "selfcal"},
              {"filters", fj},
              {"sources", sj},
              {"residual_history", res.residual_history},
              {"iterations", res.iterations},
              {"converged", res.converged},
              {"diagnostics", report_json(res.report)}};
}

// ---------------------------------------------------------------------------
// dynamics

int slice_count(double t, double dt) {
  const double ratio = t / dt;
  const double steps = std::round(ratio);
  if (std::abs(steps - ratio) > 1e-9 * std::max(1.0, ratio))
    throw InputError("t must be a whole number of dt steps for this method");
  if (steps > 1e8) throw InputError("too many steps");
  return static_cast<int>(steps);
}

bool closed(const LindbladModel& m) {
  return m.jumps.empty() && (m.dissipation.size() == 0 || max_abs(m.dissipation) == 0.0);
}

}  // namespace

fs::path manifest_for(const fs::path& output) {
  return output.parent_path() / (output.stem().string() + ".manifest.json");
}

void simulate(const SimulateOptions& opt, Run& run) {
  const fs::path out(opt.out);
  run.manifest_path = out / "manifest.json";
  run.seed = opt.seed;
  fs::create_directories(out);
  const auto source = load_density(opt.source, run);
  const json dev = load_json(opt.device, run);
  SamplingOptions so;
  so.threads = std::max(1u, opt.threads);
  so.tol = run.global.tol_psd;
  const double tol = run.global.tol_psd;

  std::string csv;
  json counts;
  std::string kind;
  if (dev.contains("instrument")) {
    kind = "instrument";
    if (!dev["instrument"].is_array() || dev["instrument"].empty())
      throw InputError("\"instrument\" must be a non-empty array of channels");
    if (!dev.contains("detector")) throw InputError("instrument device needs a \"detector\"");
    std::vector<SuperOperator> branches;
    for (const auto& c : dev["instrument"]) branches.push_back(channel_superop(c, run));
    const Instrument inst(branches, tol);
    const auto second = io::measure_from_json(dev["detector"], tol);
    const auto log = sample_coincidences(source, inst, second.measure, opt.shots, opt.seed, so);
    csv = io::coincidence_log_to_csv(log);
    counts = io::counts_to_json(log);
  } else if (dev.contains("channel")) {
    kind = "filtered";
    if (!dev.contains("detector")) throw InputError("filtered device needs a \"detector\"");
    const auto filter = channel_superop(dev["channel"], run);
    const auto m = io::measure_from_json(dev["detector"], tol);
    const auto log = sample_filtered_detections(source, filter, m.measure, opt.shots, opt.seed, so);
    csv = io::event_log_to_csv(log);
    counts = io::counts_to_json(log);
  } else {
    QuantumMeasure m = [&] {
      if (dev.contains("network")) {
        kind = "network";
        return as_input("network", [&] { return cascade_measure(io::network_from_json(dev["network"]), tol).measure; });
      }
      kind = "measure";
      return io::measure_from_json(dev, tol).measure;
    }();
    const auto log = sample_detections(source, m, opt.shots, opt.seed, so);
    csv = io::event_log_to_csv(log);
    counts = io::counts_to_json(log);
  }
  run.details["device_kind"] = kind;
  run.details["shots"] = opt.shots;
  run.details["generator"] = std::string(CounterRng::name);
  io::write_text_atomic(out / "events.csv", csv);
  run.output(out / "events.csv");
  emit(out / "counts.json", counts, run);
}

void tomo(const TomoOptions& opt, Run& run) {
  const fs::path out(opt.out);
  run.manifest_path = manifest_for(out);
  const fs::path dir(opt.dir);
  require_dir(dir);
  run.details["kind"] = opt.kind;
  const auto to = tomography_options(opt, run);
  json result;
  if (opt.kind == "state")
    result = tomo_state(dir, to, run);
  else if (opt.kind == "detector")
    result = tomo_detector(dir, to, run);
  else if (opt.kind == "process")
    result = tomo_process(dir, to, run);
  else if (opt.kind == "instrument")
    result = tomo_instrument(dir, to, run);
  else if (opt.kind == "selfcal")
    result = tomo_selfcal(dir, opt, run);
  else
    throw InputError("unknown tomography kind " + opt.kind);
  ensure_parent(out);
  emit(out, result, run);
}

void dynamics(const DynamicsOptions& opt, Run& run) {
  const fs::path out(opt.out);
  run.manifest_path = out / "manifest.json";
  run.details["method"] = opt.method;
  if (!(opt.dt > 0.0) || !std::isfinite(opt.dt)) throw InputError("dt must be positive");
  if (!(opt.t >= 0.0) || !std::isfinite(opt.t)) throw InputError("t must be nonnegative");
  const auto model = as_input("model", [&] {
    auto m = io::model_from_json(load_json(opt.model, run));
    m.validate(run.global.tol_psd);
    return m;
  });
  const CMatrix rho0 = [&] {
    if (!opt.state.empty()) return load_density(opt.state, run).matrix();
    return DensityOperator::maximally_mixed(model.dim()).matrix();
  }();
  if (rho0.rows() != model.dim()) throw InputError("state and model dimensions differ");
  fs::create_directories(out);

  json rep{{"method", opt.method}, {"t", opt.t}, {"dt", opt.dt}};
  Trajectory traj;
  if (opt.method == "lindblad") {
    traj = lindblad_evolve(model, rho0, opt.t, opt.dt);
  } else if (opt.method == "exact") {
    if (!closed(model)) throw InputError("the exact method needs a closed model (no jump operators, no V)");
    const int steps = slice_count(opt.t, opt.dt);
    const DensityOperator r0(rho0, run.global.tolerances());
    for (int i = 0; i <= steps; ++i) {
      const double ti = i == steps ? opt.t : i * opt.dt;
      traj.times.push_back(ti);
      traj.states.push_back(von_neumann_evolve(model.hamiltonian, r0, ti, model.hbar).matrix());
    }
  } else if (opt.method == "slice") {
    const int steps = slice_count(opt.t, opt.dt);
    traj = sliced_master(model, rho0, opt.dt, steps);
    // first-order check: error at dt and dt/2 against the reference solution
    const CMatrix ref = closed(model)
                            ? von_neumann_evolve(model.hamiltonian, DensityOperator(rho0, run.global.tolerances()),
                                                 opt.t, model.hbar)
                                  .matrix()
                            : lindblad_evolve(model, rho0, opt.t, std::min(opt.dt, 0.05)).final_state();
    const double e1 = max_abs(traj.final_state() - ref);
    const double e2 = max_abs(sliced_master(model, rho0, opt.dt / 2, 2 * steps).final_state() - ref);
    const double ratio = e2 > 0.0 ? e1 / e2 : 0.0;
    rep["richardson"] = {{"error_dt", e1}, {"error_half_dt", e2}, {"ratio", ratio}};
    std::cout << "slice error ratio (dt vs dt/2): " << format_double(ratio) << '\n';
  } else {
    throw InputError("unknown method " + opt.method + " (slice, exact or lindblad)");
  }
  rep["steps"] = traj.times.size() - 1;
  rep["final_trace"] = traj.final_state().trace().real();
  rep["final_state"] = io::to_json(traj.final_state());
  emit(out / "trajectory.json", io::trajectory_to_json(traj), run);
  emit(out / "report.json", rep, run);
}

void report(const ReportOptions& opt, Run& run) {
  const fs::path out(opt.out);
  run.manifest_path = manifest_for(out);
  run.details["kind"] = opt.kind;
  json rep{{"kind", opt.kind}};
  std::vector<std::pair<double, double>> plot;
  std::string plot_header;

  if (opt.kind == "uncertainty") {
    if (opt.state.empty() || opt.detector.empty()) throw InputError("uncertainty needs --state and --detector");
    const auto rho = load_density(opt.state, run);
    const auto det = as_input("detector", [&] { return load_measure(opt.detector, run).detector(); });
    const auto a = measured_quantity(det);
    const auto qa = q_uncertainty(rho, QuantityVector(a), run.global.tol_psd);
    const auto spread = statistical_vs_quantum(det, rho, run.global.tol_psd);
    rep["measured_quantity"] = matrices_json(a);
    rep["projective"] = is_projective(det.measure(), run.global.tol_psd).projective;
    rep["quantum"] = {{"mean", io::to_json(qa.mean)}, {"sigma", qa.sigma}, {"covariance", io::to_json(qa.covariance)}};
    rep["statistical"] = {{"mean", io::to_json(spread.mean)},
                          {"e_var", spread.e_var},
                          {"sigma2", spread.sigma2},
                          {"excess", spread.excess}};
    if (!opt.quantity.empty()) {
      const json qj = load_json(opt.quantity, run);
      const QuantityVector x = as_input("quantity", [&] {
        if (qj.contains("components")) {
          std::vector<CMatrix> cs;
          for (const auto& c : qj["components"]) cs.push_back(io::matrix_from_json(c));
          return QuantityVector(cs);
        }
        return QuantityVector(io::matrix_from_json(qj.at("matrix")));
      });
      const auto mu = measurement_uncertainty(det, rho, x, run.global.tol_psd);
      rep["measurement"] = {{"rmse", mu.rmse},         {"bias", mu.bias},     {"delta", mu.delta},
                            {"e_var_about_x", mu.e_var_about_x}, {"sigma_x2", mu.sigma_x2}, {"sigma_a2", mu.sigma_a2}};
      if (x.size() == 1 && a.size() == 1 && hermitian_defect(x[0]) <= run.global.tol_herm &&
          hermitian_defect(a[0]) <= run.global.tol_herm) {
        const auto rb = robertson_check(rho, hermitian_part(a[0]), hermitian_part(x[0]));
        rep["robertson"] = {{"lhs", rb.lhs}, {"rhs", rb.rhs}, {"satisfied", rb.satisfied}};
      }
    }
    const RVector p = response_probabilities(det.measure(), rho, run.global.tol_psd);
    plot_header = "value,probability";
    for (std::size_t k = 0; k < det.measure().size(); ++k)
      plot.emplace_back(det.scale().values()[k](0).real(), p(static_cast<Eigen::Index>(k)));
  } else if (opt.kind == "lines") {
    if (opt.model.empty()) throw InputError("lines needs --model");
    const auto model = as_input("model", [&] { return io::model_from_json(load_json(opt.model, run)); });
    const auto lines = rydberg_ritz_lines(model.hamiltonian, model.hbar, run.global.rtol);
    rep["angular"] = lines.angular;
    rep["frequency"] = lines.frequency;
    plot_header = "frequency,intensity";
    for (double f : lines.frequency) plot.emplace_back(f, 1.0);
  } else if (opt.kind == "classify") {
    if (opt.channel.empty()) throw InputError("classify needs --channel");
    const auto k = io::channel_from_json(load_json(opt.channel, run), run.global.tol_psd);
    const auto c = classify(k, run.global.tol_psd);
    const CMatrix pi = pi_operator(k);
    rep["classification"] = class_json(c);
    rep["pi"] = io::to_json(pi);
    rep["kraus_count"] = k.size();
    const RVector ev = hermitian_eigen(pi).values;
    plot_header = "index,pi_eigenvalue";
    for (Eigen::Index i = 0; i < ev.size(); ++i) plot.emplace_back(static_cast<double>(i), ev(i));
  } else {
    throw InputError("unknown report kind " + opt.kind);
  }
  ensure_parent(out);
  emit(out, rep, run);
  if (!opt.plot.empty()) {
    ensure_parent(opt.plot);
    write_plot(opt.plot, plot_header, plot, run);
  }
}

}  // namespace qtomo::cli
