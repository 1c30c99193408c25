#pragma once

// Command implementations behind the qtomo front end. Each command reads its
// inputs, writes its outputs and records what it touched in the Run.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qtomo/core.hpp"
#include "qtomo/io.hpp"

namespace qtomo::cli {

namespace fs = std::filesystem;

struct GlobalOptions {
  double tol_psd = 1e-9;
  double tol_herm = 1e-10;
  double rtol = 1e-10;

  Tolerances tolerances() const { return {tol_herm, tol_psd}; }
};

/// Bookkeeping for the run manifest.
struct Run {
  std::string command;
  std::vector<std::string> args;
  GlobalOptions global;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  io::json details = io::json::object();
  std::optional<fs::path> manifest_path;

  void input(const fs::path& p) { inputs.push_back(p.string()); }
  void output(const fs::path& p) { outputs.push_back(p.string()); }
};

struct SimulateOptions {
  std::string source, device, out;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct TomoOptions {
  std::string kind;  // state | detector | process | instrument | selfcal
  std::string dir, out;
  bool unweighted = false;
  bool no_cp_projection = false;
  int max_iter = 200;
};

struct DynamicsOptions {
  std::string model, state, out, method = "lindblad";
  double t = 1.0;
  double dt = 0.01;
};

struct ReportOptions {
  std::string kind;  // uncertainty | lines | classify
  std::string state, detector, quantity, model, channel, out, plot;
};

void simulate(const SimulateOptions& opt, Run& run);
void tomo(const TomoOptions& opt, Run& run);
void dynamics(const DynamicsOptions& opt, Run& run);
void report(const ReportOptions& opt, Run& run);

/// "<dir>/<stem>.manifest.json" for an output file.
fs::path manifest_for(const fs::path& output);

}  // namespace qtomo::cli
