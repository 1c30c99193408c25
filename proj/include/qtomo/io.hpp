#pragma once

// File formats. Complex scalars are [re, im]; matrices are row-major nested
// arrays of complex scalars. Plain numbers are accepted as real scalars on
// input. Output JSON is canonical: sorted keys, doubles printed with 17
// significant digits.

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "qtomo/dynamics.hpp"
#include "qtomo/measures.hpp"
#include "qtomo/optics.hpp"
#include "qtomo/simulator.hpp"
#include "qtomo/superop.hpp"

namespace qtomo::io {

using json = nlohmann::json;

json to_json(Complex z);
json to_json(const CMatrix& m);
json to_json(const CVector& v);
json to_json(const RVector& v);
json to_json(const RMatrix& m);
Complex complex_from_json(const json& j);
CMatrix matrix_from_json(const json& j);
CVector vector_from_json(const json& j);

/// Serialization with sorted keys and %.17g doubles.
std::string canonical_dump(const json& j, int indent = 2);

json read_json(const std::filesystem::path& path);
/// Writes via a temporary file and rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const json& j);

// density file: { "dim": d, "matrix": [...] }
json density_to_json(const DensityOperator& rho);
DensityOperator density_from_json(const json& j, const Tolerances& tol = {});

// measure file: { "dim": d, "elements": [matrix...], "scale": [[re,im]-vectors] }
struct MeasureFile {
  QuantumMeasure measure;
  std::optional<Scale> scale;

  Detector detector() const;
};
json measure_to_json(const QuantumMeasure& m, const std::optional<Scale>& scale = std::nullopt);
MeasureFile measure_from_json(const json& j, double tol = 1e-9);

// channel file: { "dim": d, "kraus": [matrix...] } or { "dim": d, "choi": matrix }
json channel_to_json(const KrausSet& k);
json choi_to_json(const ChoiMatrix& c);
KrausSet channel_from_json(const json& j, double tol = 1e-9);

// optical network: { "split": [a, b] } | { "leaf": { "jones": matrix } }
OpticalNetwork network_from_json(const json& j);

// dynamics model: { "H": m, "V": m?, "hbar": x?, "lindblad": { "L": [m...], "gamma": [x...] }? }
LindbladModel model_from_json(const json& j);
json model_to_json(const LindbladModel& m);

json trajectory_to_json(const Trajectory& t);

// Event logs: comment header lines "# key=value", then CSV rows.
std::string event_log_to_csv(const EventLog& log);
std::string coincidence_log_to_csv(const CoincidenceLog& log);
EventLog event_log_from_csv(const std::string& text);
CoincidenceLog coincidence_log_from_csv(const std::string& text);
/// Detects the format from the CSV column header.
bool is_coincidence_csv(const std::string& text);

std::string read_text(const std::filesystem::path& path);

json counts_to_json(const EventLog& log);
json counts_to_json(const CoincidenceLog& log);

}  // namespace qtomo::io
