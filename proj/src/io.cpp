#include "stlcp/io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "stlcp/error.hpp"

namespace stlcp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Non-empty, non-comment lines with 1-based line numbers.
std::vector<std::pair<std::size_t, std::string_view>> content_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    auto line = trim(text.substr(start, end - start));
    if (!line.empty() && line.front() != '#') out.emplace_back(number, line);
    start = end + 1;
  }
  return out;
}

[[noreturn]] void format_error(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::Format, "line " + std::to_string(line) + ": " + msg);
}

double finite_cell(std::size_t line, std::string_view cell) {
  double v = 0.0;
  try {
    v = parse_double(cell);
  } catch (const Error&) {
    format_error(line, "malformed number '" + std::string(cell) + "'");
  }
  if (!std::isfinite(v)) format_error(line, "non-finite state value");
  return v;
}

Step step_cell(std::size_t line, std::string_view cell) {
  try {
    return parse_step(cell);
  } catch (const Error&) {
    format_error(line, "malformed step '" + std::string(cell) + "'");
  }
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

std::vector<double> parse_doubles(std::string_view text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (auto cell : split(text, ',')) out.push_back(parse_double(cell));
  return out;
}

const std::string& require_key(const KeyValues& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw Error(ErrorCode::Format, "missing key '" + key + "'");
  return it->second;
}

std::size_t parse_count(std::string_view text) {
  Step v = parse_step(text);
  if (v < 0) throw Error(ErrorCode::Format, "negative count '" + std::string(text) + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

double parse_double(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  const char* first = text.data();
  if (!text.empty() && text.front() == '+') ++first;
  auto res = std::from_chars(first, text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::Format, "malformed number '" + std::string(text) + "'");
  }
  return v;
}

Step parse_step(std::string_view text) {
  text = trim(text);
  Step v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::Format, "malformed integer '" + std::string(text) + "'");
  }
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

Dataset parse_trajectories_csv(std::string_view text) {
  auto lines = content_lines(text);
  if (lines.empty()) throw Error(ErrorCode::Format, "trajectory file is empty");
  auto header = split(lines.front().second, ',');
  if (header.size() < 3 || header[0] != "traj_id" || header[1] != "tau") {
    format_error(lines.front().first, "expected header 'traj_id,tau,<components>'");
  }
  Dataset data;
  for (std::size_t i = 2; i < header.size(); ++i) {
    if (header[i].empty()) format_error(lines.front().first, "empty component name");
    data.schema.names.emplace_back(header[i]);
  }
  const std::size_t dim = data.schema.dim();
  std::set<std::string> seen;
  std::vector<double> state(dim);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto [number, line] = lines[li];
    auto cells = split(line, ',');
    if (cells.size() != dim + 2) {
      format_error(number, "expected " + std::to_string(dim + 2) + " columns, got " +
                               std::to_string(cells.size()));
    }
    std::string id(cells[0]);
    if (id.empty()) format_error(number, "empty trajectory id");
    const Step tau = step_cell(number, cells[1]);
    if (data.trajectories.empty() || data.trajectories.back().id != id) {
      if (!seen.insert(id).second) format_error(number, "rows of trajectory '" + id + "' are not contiguous");
      data.trajectories.push_back(Trajectory{id, Signal(dim, {})});
    }
    auto& traj = data.trajectories.back();
    if (tau != static_cast<Step>(traj.states.length())) {
      format_error(number, "trajectory '" + id + "' expected tau=" +
                               std::to_string(traj.states.length()) + ", got " + std::to_string(tau));
    }
    for (std::size_t c = 0; c < dim; ++c) state[c] = finite_cell(number, cells[c + 2]);
    traj.states.append(state);
  }
  return data;
}

std::string trajectories_csv(const Dataset& data) {
  std::ostringstream out;
  out << "traj_id,tau";
  for (const auto& n : data.schema.names) out << ',' << n;
  out << '\n';
  for (const auto& x : data.trajectories) {
    if (x.states.dim() != data.schema.dim()) {
      throw Error(ErrorCode::DimensionMismatch, "trajectory '" + x.id + "' does not match schema");
    }
    for (std::size_t s = 0; s < x.states.length(); ++s) {
      out << x.id << ',' << s;
      for (double v : x.states.at(s)) out << ',' << format_double(v);
      out << '\n';
    }
  }
  return out.str();
}

Dataset parse_trajectories_jsonl(std::string_view text) {
  Dataset data;
  std::set<std::string> seen;
  for (const auto& [number, line] : content_lines(text)) {
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      format_error(number, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("states") ||
        !obj["states"].is_array()) {
      format_error(number, "expected an object with 'id' and 'states'");
    }
    std::string id = obj["id"].is_string() ? obj["id"].get<std::string>() : obj["id"].dump();
    if (!seen.insert(id).second) format_error(number, "duplicate trajectory id '" + id + "'");
    std::vector<std::vector<double>> rows;
    try {
      rows = obj["states"].get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception&) {
      format_error(number, "'states' must be an array of numeric arrays");
    }
    if (rows.empty() || rows.front().empty()) format_error(number, "trajectory has no states");
    if (obj.contains("names")) {
      Schema named{obj["names"].get<std::vector<std::string>>()};
      if (data.schema.dim() == 0) data.schema = named;
      if (!(named == data.schema)) format_error(number, "component names differ between lines");
    }
    if (data.schema.dim() == 0) data.schema = Schema::numbered(rows.front().size());
    for (const auto& r : rows) {
      if (r.size() != data.schema.dim()) format_error(number, "state dimension mismatch");
    }
    data.trajectories.push_back(Trajectory{id, Signal::from_rows(rows)});
  }
  if (data.trajectories.empty()) throw Error(ErrorCode::Format, "trajectory file is empty");
  return data;
}

Dataset read_trajectories(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  const std::string text = read_file(path);
  if (ext == ".jsonl" || ext == ".json") return parse_trajectories_jsonl(text);
  return parse_trajectories_csv(text);
}

void write_trajectories(const std::filesystem::path& path, const Dataset& data) {
  write_file(path, trajectories_csv(data));
}

PredictionTable parse_prediction_table(std::string_view text) {
  auto lines = content_lines(text);
  if (lines.empty()) throw Error(ErrorCode::Format, "prediction table is empty");
  auto header = split(lines.front().second, ',');
  if (header.size() < 4 || header[0] != "traj_id" || header[1] != "t" || header[2] != "tau") {
    format_error(lines.front().first, "expected header 'traj_id,t,tau,<components>'");
  }
  PredictionTable table;
  table.dim = header.size() - 3;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto [number, line] = lines[li];
    auto cells = split(line, ',');
    if (cells.size() != table.dim + 3) {
      format_error(number, "expected " + std::to_string(table.dim + 3) + " columns, got " +
                               std::to_string(cells.size()));
    }
    std::string id(cells[0]);
    if (id.empty()) format_error(number, "empty trajectory id");
    const Step t = step_cell(number, cells[1]);
    const Step tau = step_cell(number, cells[2]);
    if (t < 0) format_error(number, "negative t");
    auto& rows = table.rows[{id, t}];
    if (tau != t + 1 + static_cast<Step>(rows.size())) {
      format_error(number, "trajectory '" + id + "' at t=" + std::to_string(t) + " expected tau=" +
                               std::to_string(t + 1 + static_cast<Step>(rows.size())));
    }
    std::vector<double> state(table.dim);
    for (std::size_t c = 0; c < table.dim; ++c) state[c] = finite_cell(number, cells[c + 3]);
    rows.push_back(std::move(state));
  }
  return table;
}

std::string prediction_table_csv(const PredictionTable& table) {
  std::ostringstream out;
  out << "traj_id,t,tau";
  for (std::size_t c = 0; c < table.dim; ++c) out << ",x" << (c + 1);
  out << '\n';
  for (const auto& [key, rows] : table.rows) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out << key.first << ',' << key.second << ',' << key.second + 1 + static_cast<Step>(i);
      for (double v : rows[i]) out << ',' << format_double(v);
      out << '\n';
    }
  }
  return out.str();
}

PredictionTable read_prediction_table(const std::filesystem::path& path) {
  return parse_prediction_table(read_file(path));
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  for (const auto& [number, line] : content_lines(text)) {
    auto eq = line.find('=');
    if (eq == std::string_view::npos) format_error(number, "expected key=value");
    std::string key(trim(line.substr(0, eq)));
    if (key.empty()) format_error(number, "empty key");
    if (!kv.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
      format_error(number, "duplicate key '" + key + "'");
    }
  }
  return kv;
}

std::string predictor_artifact(const Predictor& p) {
  std::ostringstream out;
  out << "format=stlcp-predictor/1\n";
  out << "kind=" << predictor_kind_name(p.kind()) << "\n";
  if (p.kind() == PredictorKind::Autoregressive) {
    const auto& m = p.ar();
    out << "order=" << m.order << "\n"
        << "dim=" << m.dim << "\n"
        << "t=" << m.t << "\n"
        << "max_horizon=" << m.max_horizon << "\n"
        << "weights=" << join_doubles(m.weights) << "\n";
  } else if (p.kind() == PredictorKind::External) {
    throw Error(ErrorCode::InvalidArgument,
                "table-backed predictors are stored as prediction tables, not artifacts");
  }
  return out.str();
}

Predictor parse_predictor_artifact(std::string_view text, const std::filesystem::path& base_dir) {
  const KeyValues kv = parse_key_values(text);
  if (require_key(kv, "format") != "stlcp-predictor/1") {
    throw Error(ErrorCode::Format, "not a predictor artifact");
  }
  const auto& kind = require_key(kv, "kind");
  if (kind == "hold-last") return Predictor::hold_last();
  if (kind == "external") {
    std::filesystem::path table = require_key(kv, "table");
    if (table.is_relative()) table = base_dir / table;
    return load_external(table);
  }
  if (kind != "ar") throw Error(ErrorCode::Format, "unknown predictor kind '" + kind + "'");
  ArModel m;
  m.order = parse_count(require_key(kv, "order"));
  m.dim = parse_count(require_key(kv, "dim"));
  m.t = parse_step(require_key(kv, "t"));
  m.max_horizon = parse_step(require_key(kv, "max_horizon"));
  m.weights = parse_doubles(require_key(kv, "weights"));
  return Predictor::autoregressive(std::move(m));
}

std::string calibration_artifact(const Calibration& c) {
  std::ostringstream out;
  out << "format=stlcp-calibration/1\n"
      << "method=" << method_name(c.method) << "\n"
      << "delta=" << format_double(c.delta) << "\n"
      << "k=" << c.k << "\n"
      << "p=" << c.rank() << "\n"
      << "tau0=" << c.tau0 << "\n"
      << "t=" << c.t << "\n"
      << "horizon=" << c.horizon << "\n"
      << "norm=" << norm_name(c.norm) << "\n"
      << "formula_hash=" << c.formula_hash << "\n";
  std::vector<double> values;
  for (const auto& r : c.regions) values.push_back(r.value);
  if (c.method == Method::Direct) {
    out << "C=" << (values.empty() ? std::string() : format_double(values.front())) << "\n";
  } else {
    out << "delta_bar=" << format_double(c.regions.empty() ? c.delta : c.regions.front().delta) << "\n";
    out << "C_tau=" << join_doubles(values) << "\n";
  }
  return out.str();
}

Calibration parse_calibration_artifact(std::string_view text) {
  const KeyValues kv = parse_key_values(text);
  if (require_key(kv, "format") != "stlcp-calibration/1") {
    throw Error(ErrorCode::Format, "not a calibration artifact");
  }
  Calibration c;
  c.method = parse_method(require_key(kv, "method"));
  c.delta = parse_double(require_key(kv, "delta"));
  c.k = parse_count(require_key(kv, "k"));
  const std::size_t p = parse_count(require_key(kv, "p"));
  c.tau0 = parse_step(require_key(kv, "tau0"));
  c.t = parse_step(require_key(kv, "t"));
  c.horizon = parse_step(require_key(kv, "horizon"));
  c.norm = parse_norm(require_key(kv, "norm"));
  c.formula_hash = require_key(kv, "formula_hash");
  std::vector<double> values;
  double region_delta = c.delta;
  if (c.method == Method::Direct) {
    values = {parse_double(require_key(kv, "C"))};
  } else {
    region_delta = parse_double(require_key(kv, "delta_bar"));
    values = parse_doubles(require_key(kv, "C_tau"));
    if (static_cast<Step>(values.size()) != c.horizon) {
      throw Error(ErrorCode::Format, "C_tau has " + std::to_string(values.size()) +
                                         " entries, horizon is " + std::to_string(c.horizon));
    }
  }
  if (p != conformal_rank(c.k, region_delta)) {
    throw Error(ErrorCode::Format, "rank p is inconsistent with k and delta");
  }
  for (double v : values) {
    if (std::isnan(v)) throw Error(ErrorCode::Format, "region constant is NaN");
    if ((p > c.k) != std::isinf(v)) {
      throw Error(ErrorCode::Format, "region constant must be infinite exactly when p > k");
    }
    c.regions.push_back(RegionConstant{v, p, c.k, region_delta});
  }
  return c;
}

std::string verdict_record(const Verdict& v, std::string_view config_hash) {
  std::ostringstream out;
  out << "method=" << method_name(v.method) << " delta=" << format_double(v.delta)
      << " rho=" << format_double(v.robustness) << " region=";
  if (v.regions.empty()) {
    out << "none";
  } else {
    for (std::size_t i = 0; i < v.regions.size(); ++i) {
      if (i) out << ',';
      out << format_double(v.regions[i].value);
    }
  }
  out << " guaranteed=" << (v.guaranteed ? "true" : "false") << " t=" << v.t << " tau0=" << v.tau0
      << " H=" << v.horizon << " formula_hash=" << v.formula_hash;
  if (v.decided_by_observation) out << " decided_by_observation=true";
  if (!config_hash.empty()) out << " config_hash=" << config_hash;
  return out.str();
}

}  // namespace stlcp
