#include "qtomo/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "qtomo/errors.hpp"

namespace qtomo::cli {

namespace {

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ContractViolation*>(&e) || dynamic_cast<const InputError*>(&e)) return input_error;
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return input_error;
  if (dynamic_cast<const InfeasibleError*>(&e)) return infeasible;
  return numerical;
}

std::string kind_for(const std::exception& e) {
  if (dynamic_cast<const ContractViolation*>(&e)) return "contract_violation";
  if (dynamic_cast<const InputError*>(&e)) return "input_error";
  if (dynamic_cast<const InfeasibleError*>(&e)) return "infeasible";
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical_error";
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return "input_error";
  return "internal_error";
}

io::json manifest_json(const Run& run, double seconds, const io::json* error) {
  io::json m{{"command", run.command},
             {"args", run.args},
             {"inputs", run.inputs},
             {"outputs", run.outputs},
             {"tolerances", {{"psd", run.global.tol_psd}, {"herm", run.global.tol_herm}, {"rtol", run.global.rtol}}},
             {"version", QTOMO_VERSION},
             {"wall_time_seconds", seconds},
             {"status", error ? "error" : "ok"},
             {"details", run.details}};
  if (run.seed) m["seed"] = *run.seed;
  if (error) m["error"] = *error;
  return m;
}

void write_manifest(const Run& run, double seconds, const io::json* error) {
  if (!run.manifest_path) return;
  try {
    const auto& p = *run.manifest_path;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    io::write_json(p, manifest_json(run, seconds, error));
  } catch (const std::exception& e) {
    std::cerr << "could not write manifest: " << e.what() << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& argv) {
  CLI::App app{"Quantum tomography toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", QTOMO_VERSION);

  Run r;
  app.add_option("--tol-psd", r.global.tol_psd, "Positivity tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tol-herm", r.global.tol_herm, "Hermiticity tolerance")->check(CLI::PositiveNumber);
  app.add_option("--rtol", r.global.rtol, "Relative rank tolerance")->check(CLI::PositiveNumber);

  SimulateOptions sim;
  auto* sc = app.add_subcommand("simulate", "Sample detection events");
  sc->add_option("source", sim.source, "Source density JSON")->required();
  sc->add_option("device", sim.device, "Measure, network, filter or instrument JSON")->required();
  sc->add_option("--shots", sim.shots, "Number of events")->required();
  sc->add_option("--seed", sim.seed, "RNG seed")->envname("QTOMO_SEED")->required();
  sc->add_option("--out", sim.out, "Output directory")->required();
  sc->add_option("--threads", sim.threads, "Worker threads")->check(CLI::PositiveNumber);

  TomoOptions tom;
  auto* tc = app.add_subcommand("tomo", "Reconstruct from a data bundle");
  tc->add_option("kind", tom.kind, "Reconstruction kind")
      ->required()
      ->check(CLI::IsMember({"state", "detector", "process", "instrument", "selfcal"}));
  tc->add_option("dir", tom.dir, "Bundle directory")->required();
  tc->add_option("--out", tom.out, "Report JSON")->required();
  tc->add_flag("--unweighted", tom.unweighted, "Ignore standard errors");
  tc->add_flag("--no-cp-projection", tom.no_cp_projection, "Skip projection onto physical maps");
  tc->add_option("--max-iter", tom.max_iter, "Self-calibration iteration limit")->check(CLI::PositiveNumber);

  DynamicsOptions dyn;
  auto* dc = app.add_subcommand("dynamics", "Integrate a master equation");
  dc->add_option("model", dyn.model, "Model JSON")->required();
  dc->add_option("--state", dyn.state, "Initial density JSON");
  dc->add_option("--t", dyn.t, "Final time");
  dc->add_option("--dt", dyn.dt, "Time step");
  dc->add_option("--method", dyn.method, "slice, exact or lindblad");
  dc->add_option("--out", dyn.out, "Output directory")->required();

  ReportOptions rep;
  auto* rc = app.add_subcommand("report", "Derived quantities");
  rc->add_option("kind", rep.kind, "Report kind")->required()->check(CLI::IsMember({"uncertainty", "lines", "classify"}));
  rc->add_option("--state", rep.state, "Density JSON or state report");
  rc->add_option("--detector", rep.detector, "Detector JSON with scale");
  rc->add_option("--quantity", rep.quantity, "Target quantity JSON");
  rc->add_option("--model", rep.model, "Model JSON");
  rc->add_option("--channel", rep.channel, "Channel JSON");
  rc->add_option("--out", rep.out, "Report JSON")->required();
  rc->add_option("--plot", rep.plot, "CSV plot data");

  std::vector<std::string> rev(argv.rbegin(), argv.rend() - (argv.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : input_error;
  }

  r.args.assign(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  try {
    if (sc->parsed()) {
      r.command = "simulate";
      simulate(sim, r);
    } else if (tc->parsed()) {
      r.command = "tomo";
      tomo(tom, r);
    } else if (dc->parsed()) {
      r.command = "dynamics";
      dynamics(dyn, r);
    } else {
      r.command = "report";
      report(rep, r);
    }
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    const io::json err{{"kind", kind_for(e)}, {"message", e.what()}, {"exit_code", code}};
    std::cerr << io::canonical_dump(io::json{{"error", err}});
    write_manifest(r, elapsed(), &err);
    return code;
  }
  write_manifest(r, elapsed(), nullptr);
  return ok;
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace qtomo::cli
