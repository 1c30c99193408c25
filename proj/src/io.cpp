#include "qtomo/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace qtomo::io {

namespace fs = std::filesystem;

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

json to_json(const RVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(RVector(m.row(i).transpose())));
  return rows;
}

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw InputError("expected a complex scalar [re, im], got " + j.dump());
}

CMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InputError("expected a non-empty matrix (array of rows)");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw InputError("matrix rows must be non-empty arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw InputError("matrix rows have different lengths");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

CVector vector_from_json(const json& j) {
  if (!j.is_array()) throw InputError("expected an array of complex scalars");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

namespace {

void dump_number(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

bool is_flat(const json& j) {
  for (const auto& e : j)
    if (e.is_structured()) return false;
  return true;
}

void dump_rec(std::string& out, const json& j, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::number_float: dump_number(out, j.get<double>()); break;
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      // numeric rows (complex pairs, short vectors) stay on one line
      const bool inline_items = is_flat(j) || indent < 0;
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += inline_items && indent >= 0 ? ", " : ",";
        first = false;
        if (!inline_items) newline(depth + 1);
        dump_rec(out, e, inline_items ? -1 : indent, depth + 1);
      }
      if (!inline_items) newline(depth);
      out += ']';
      break;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {  // std::map keeps keys sorted
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(key).dump();
        out += indent < 0 ? ":" : ": ";
        dump_rec(out, value, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      break;
    }
    default: out += j.dump(); break;
  }
}

}  // namespace

std::string canonical_dump(const json& j, int indent) {
  std::string out;
  dump_rec(out, j, indent, 0);
  if (indent >= 0) out += '\n';
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) { write_text_atomic(path, canonical_dump(j)); }

// ---------------------------------------------------------------------------

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

void check_dim(const json& j, Eigen::Index actual) {
  if (j.contains("dim")) {
    if (!j["dim"].is_number_integer() || j["dim"].get<long>() != actual)
      throw InputError("field \"dim\" does not match the matrix size");
  }
}

// Wraps invariant failures in loaded data as input errors.
template <typename F>
auto as_input(const char* what, F&& f) {
  try {
    return f();
  } catch (const ContractViolation& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

json density_to_json(const DensityOperator& rho) {
  return json{{"dim", rho.dim()}, {"matrix", to_json(rho.matrix())}};
}

DensityOperator density_from_json(const json& j, const Tolerances& tol) {
  const CMatrix m = matrix_from_json(require(j, "matrix"));
  check_dim(j, m.rows());
  return as_input("invalid density", [&] { return DensityOperator(m, tol); });
}

Detector MeasureFile::detector() const {
  if (!scale) throw InputError("measure file has no scale; a detector needs one");
  return Detector(measure, *scale);
}

json measure_to_json(const QuantumMeasure& m, const std::optional<Scale>& scale) {
  json el = json::array();
  for (const auto& p : m.elements()) el.push_back(to_json(p));
  json out{{"dim", m.dim()}, {"elements", el}};
  if (scale) {
    json s = json::array();
    for (const auto& a : scale->values()) s.push_back(to_json(a));
    out["scale"] = s;
  }
  return out;
}

MeasureFile measure_from_json(const json& j, double tol) {
  const json& el = require(j, "elements");
  if (!el.is_array() || el.empty()) throw InputError("\"elements\" must be a non-empty array");
  std::vector<CMatrix> elements;
  for (const auto& e : el) elements.push_back(matrix_from_json(e));
  check_dim(j, elements.front().rows());
  QuantumMeasure m = as_input("invalid measure", [&] { return QuantumMeasure(elements, tol); });
  std::optional<Scale> scale;
  if (j.contains("scale")) {
    std::vector<CVector> values;
    for (const auto& a : j["scale"]) {
      // scalar entries are accepted as one-component values
      if (a.is_number() || (a.is_array() && a.size() == 2 && a[0].is_number()))
        values.push_back(CVector::Constant(1, complex_from_json(a)));
      else
        values.push_back(vector_from_json(a));
    }
    scale = as_input("invalid scale", [&] { return Scale(values); });
    if (scale->size() != m.size()) throw InputError("scale length does not match the measure");
  }
  return {std::move(m), std::move(scale)};
}

json channel_to_json(const KrausSet& k) {
  json ops = json::array();
  for (const auto& t : k.operators()) ops.push_back(to_json(t));
  return json{{"dim", k.dim()}, {"kraus", ops}};
}

json choi_to_json(const ChoiMatrix& c) { return json{{"dim", c.dim()}, {"choi", to_json(c.matrix())}}; }

KrausSet channel_from_json(const json& j, double tol) {
  if (j.contains("kraus")) {
    std::vector<CMatrix> ops;
    for (const auto& t : j["kraus"]) ops.push_back(matrix_from_json(t));
    if (ops.empty()) throw InputError("\"kraus\" must be a non-empty array");
    check_dim(j, ops.front().rows());
    return as_input("invalid channel", [&] { return KrausSet(ops); });
  }
  if (j.contains("choi")) {
    const CMatrix c = matrix_from_json(j["choi"]);
    const auto d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(c.rows()))));
    if (static_cast<Eigen::Index>(d) * d != c.rows()) throw InputError("Choi matrix size is not a square number");
    check_dim(j, d);
    return as_input("invalid channel", [&] { return kraus_from_choi(ChoiMatrix(d, c), tol); });
  }
  throw InputError("channel file needs \"kraus\" or \"choi\"");
}

OpticalNetwork network_from_json(const json& j) {
  if (j.contains("split")) {
    const json& s = j["split"];
    if (!s.is_array() || s.size() != 2) throw InputError("\"split\" needs exactly two branches");
    return OpticalNetwork::split(network_from_json(s[0]), network_from_json(s[1]));
  }
  if (j.contains("leaf")) {
    const CMatrix t = matrix_from_json(require(j["leaf"], "jones"));
    return as_input("invalid network leaf", [&] { return OpticalNetwork::leaf(JonesMatrix(t)); });
  }
  throw InputError("network node needs \"split\" or \"leaf\"");
}

LindbladModel model_from_json(const json& j) {
  LindbladModel m;
  m.hamiltonian = matrix_from_json(require(j, "H"));
  if (j.contains("V")) m.dissipation = matrix_from_json(j["V"]);
  if (j.contains("hbar")) m.hbar = j["hbar"].get<double>();
  if (j.contains("lindblad")) {
    const json& l = j["lindblad"];
    for (const auto& op : require(l, "L")) m.jumps.push_back(matrix_from_json(op));
    for (const auto& g : require(l, "gamma")) m.rates.push_back(g.get<double>());
  }
  as_input("invalid model", [&] {
    m.validate();
    return 0;
  });
  return m;
}

json model_to_json(const LindbladModel& m) {
  json out{{"H", to_json(m.hamiltonian)}, {"hbar", m.hbar}};
  if (m.dissipation.size()) out["V"] = to_json(m.dissipation);
  if (!m.jumps.empty()) {
    json ls = json::array();
    for (const auto& l : m.jumps) ls.push_back(to_json(l));
    out["lindblad"] = json{{"L", ls}, {"gamma", m.rates}};
  }
  return out;
}

json trajectory_to_json(const Trajectory& t) {
  json out = json::array();
  for (std::size_t i = 0; i < t.times.size(); ++i)
    out.push_back(json{{"t", t.times[i]}, {"matrix", to_json(t.states[i])}});
  return out;
}

// ---------------------------------------------------------------------------
// CSV event logs

std::string event_log_to_csv(const EventLog& log) {
  std::string out;
  out.reserve(log.labels.size() * 10 + 128);
  out += "# seed=" + std::to_string(log.seed) + "\n";
  out += "# generator=" + log.generator + "\n";
  out += "# elements=" + std::to_string(log.elements) + "\n";
  out += "shot,label\n";
  for (std::size_t i = 0; i < log.labels.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += std::to_string(log.labels[i]);
    out += '\n';
  }
  return out;
}

std::string coincidence_log_to_csv(const CoincidenceLog& log) {
  std::string out;
  out.reserve(log.branch.size() * 12 + 128);
  out += "# seed=" + std::to_string(log.seed) + "\n";
  out += "# generator=" + log.generator + "\n";
  out += "# branches=" + std::to_string(log.branches) + "\n";
  out += "# elements=" + std::to_string(log.elements) + "\n";
  out += "shot,j,k\n";
  for (std::size_t i = 0; i < log.branch.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += std::to_string(log.branch[i]);
    out += ',';
    out += std::to_string(log.element[i]);
    out += '\n';
  }
  return out;
}

namespace {

struct CsvContent {
  std::map<std::string, std::string> header;
  std::string columns;
  std::vector<std::vector<std::uint64_t>> rows;
};

std::uint64_t parse_uint(std::string_view s, std::size_t line) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw InputError("malformed integer on CSV line " + std::to_string(line));
  return v;
}

CsvContent parse_csv(const std::string& text, std::size_t expected_cols) {
  CsvContent c;
  std::size_t pos = 0, line = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view ln(text.data() + pos, end - pos);
    pos = end + 1;
    ++line;
    if (!ln.empty() && ln.back() == '\r') ln.remove_suffix(1);
    if (ln.empty()) continue;
    if (ln.front() == '#') {
      ln.remove_prefix(1);
      while (!ln.empty() && ln.front() == ' ') ln.remove_prefix(1);
      const auto eq = ln.find('=');
      if (eq != std::string_view::npos) c.header[std::string(ln.substr(0, eq))] = std::string(ln.substr(eq + 1));
      continue;
    }
    if (c.columns.empty()) {
      c.columns = std::string(ln);
      continue;
    }
    std::vector<std::uint64_t> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = ln.find(',', start);
      row.push_back(parse_uint(ln.substr(start, comma == std::string_view::npos ? ln.npos : comma - start), line));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (row.size() != expected_cols)
      throw InputError("CSV line " + std::to_string(line) + " has the wrong number of fields");
    if (row[0] != c.rows.size()) throw InputError("CSV shot indices must be 0, 1, 2, ... in order");
    c.rows.push_back(std::move(row));
  }
  return c;
}

std::uint64_t header_uint(const CsvContent& c, const char* key) {
  auto it = c.header.find(key);
  if (it == c.header.end()) throw InputError(std::string("event log header lacks ") + key);
  return parse_uint(it->second, 0);
}

}  // namespace

bool is_coincidence_csv(const std::string& text) { return text.find("shot,j,k") != std::string::npos; }

EventLog event_log_from_csv(const std::string& text) {
  const CsvContent c = parse_csv(text, 2);
  if (c.columns != "shot,label") throw InputError("event log must have columns shot,label");
  EventLog log;
  log.seed = header_uint(c, "seed");
  log.generator = c.header.count("generator") ? c.header.at("generator") : "";
  log.elements = header_uint(c, "elements");
  log.labels.reserve(c.rows.size());
  for (const auto& r : c.rows) {
    if (r[1] > log.elements) throw InputError("event label exceeds the element count");
    log.labels.push_back(static_cast<std::uint32_t>(r[1]));
  }
  return log;
}

CoincidenceLog coincidence_log_from_csv(const std::string& text) {
  const CsvContent c = parse_csv(text, 3);
  if (c.columns != "shot,j,k") throw InputError("coincidence log must have columns shot,j,k");
  CoincidenceLog log;
  log.seed = header_uint(c, "seed");
  log.generator = c.header.count("generator") ? c.header.at("generator") : "";
  log.branches = header_uint(c, "branches");
  log.elements = header_uint(c, "elements");
  for (const auto& r : c.rows) {
    if (r[1] > log.branches || r[2] > log.elements) throw InputError("coincidence label out of range");
    log.branch.push_back(static_cast<std::uint32_t>(r[1]));
    log.element.push_back(static_cast<std::uint32_t>(r[2]));
  }
  return log;
}

json counts_to_json(const EventLog& log) {
  return json{{"counts", log.counts()},
              {"elements", log.elements},
              {"generator", log.generator},
              {"seed", log.seed},
              {"shots", log.shots()}};
}

json counts_to_json(const CoincidenceLog& log) {
  const auto c = log.counts();
  json rows = json::array();
  for (Eigen::Index j = 0; j < c.rows(); ++j) {
    json row = json::array();
    for (Eigen::Index k = 0; k < c.cols(); ++k) row.push_back(c(j, k));
    rows.push_back(row);
  }
  return json{{"branches", log.branches},
              {"counts", rows},
              {"elements", log.elements},
              {"generator", log.generator},
              {"seed", log.seed},
              {"shots", log.shots()}};
}

}  // namespace qtomo::io
