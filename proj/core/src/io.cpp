#include "sbarom/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "sbarom/error.hpp"

namespace sbarom {

using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------- CSV helpers

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double to_double(std::string_view cell, std::size_t line, const char* column) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError(line, std::string("column '") + column + "': '" + std::string(cell) +
                               "' is not a finite number");
  }
  return v;
}

std::size_t to_index(std::string_view cell, std::size_t line, const char* column) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ParseError(line, std::string("column '") + column + "': '" + std::string(cell) +
                               "' is not a non-negative integer");
  }
  return v;
}

// Reads lines, skipping blank ones, keeping 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (!trim(line).empty()) return true;
    }
    return false;
  }
  std::size_t number() const { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

std::vector<std::string_view> read_header(LineReader& reader, std::string& line, const char* expected) {
  if (!reader.next(line)) throw ParseError(1, std::string("missing header '") + expected + "'");
  return split(trim(line));
}

void expect_cells(const std::vector<std::string_view>& cells, std::size_t count, std::size_t line) {
  if (cells.size() != count) {
    throw ParseError(line, "expected " + std::to_string(count) + " columns, found " +
                               std::to_string(cells.size()));
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------- JSON helpers

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) throw ConfigError(path, "missing key");
  return obj.at(key);
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

json point_json(const Vec2& p) { return json::array({p.x(), p.y()}); }

Vec2 point_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", kCsvSignificantDigits, value);
  return buf;
}

// ------------------------------------------------------------------- frames

std::vector<SensorFrame> parse_frames(std::istream& in) {
  LineReader reader(in);
  std::string line;
  const auto header = read_header(reader, line, "time_s,point_index,x_m,y_m");
  const bool has_z = header.size() == 5 && header[4] == "z_m";
  if (!(header.size() == 4 || has_z) || header[0] != "time_s" || header[1] != "point_index" ||
      header[2] != "x_m" || header[3] != "y_m") {
    throw ParseError(reader.number(), "expected header 'time_s,point_index,x_m,y_m[,z_m]'");
  }
  const std::size_t columns = has_z ? 5 : 4;

  std::vector<SensorFrame> frames;
  while (reader.next(line)) {
    const std::size_t ln = reader.number();
    const auto cells = split(trim(line));
    expect_cells(cells, columns, ln);
    const double t = to_double(cells[0], ln, "time_s");
    const std::size_t idx = to_index(cells[1], ln, "point_index");
    const double x = to_double(cells[2], ln, "x_m");
    const double y = to_double(cells[3], ln, "y_m");
    if (has_z) {
      const double z = to_double(cells[4], ln, "z_m");
      if (std::abs(z) >= kMaxOutOfPlane) throw ParseError(ln, "out-of-plane |z_m| >= 5 mm");
    }
    if (t < 0.0) throw ParseError(ln, "time_s must be >= 0");

    if (frames.empty() || t != frames.back().time) {
      if (!frames.empty() && t < frames.back().time) {
        throw ParseError(ln, "time_s decreases (frames must be in increasing time order)");
      }
      frames.push_back({t, {}});
    }
    auto& frame = frames.back();
    if (idx != frame.points.size()) {
      throw ParseError(ln, "point_index " + std::to_string(idx) + " out of sequence, expected " +
                               std::to_string(frame.points.size()));
    }
    frame.points.emplace_back(x, y);
  }
  if (frames.empty()) throw ParseError(reader.number() + 1, "no data rows");
  return frames;
}

std::vector<SensorFrame> parse_frames(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_frames(in);
}

void write_frames(std::ostream& out, const std::vector<SensorFrame>& frames) {
  out << "time_s,point_index,x_m,y_m\n";
  for (const auto& f : frames) {
    for (std::size_t k = 0; k < f.points.size(); ++k) {
      out << format_number(f.time) << ',' << k << ',' << format_number(f.points[k].x()) << ','
          << format_number(f.points[k].y()) << '\n';
    }
  }
}

void write_frames(const std::filesystem::path& path, const std::vector<SensorFrame>& frames) {
  auto out = open_out(path);
  write_frames(out, frames);
  finish(out, path);
}

// ----------------------------------------------------------------- pressure

PressureTrace parse_pressure(std::istream& in) {
  LineReader reader(in);
  std::string line;
  const auto header = read_header(reader, line, "time_s,pressure_pa");
  if (header.size() != 2 || header[0] != "time_s" || header[1] != "pressure_pa") {
    throw ParseError(reader.number(), "expected header 'time_s,pressure_pa'");
  }
  std::vector<PressureTrace::Sample> samples;
  while (reader.next(line)) {
    const std::size_t ln = reader.number();
    const auto cells = split(trim(line));
    expect_cells(cells, 2, ln);
    const double t = to_double(cells[0], ln, "time_s");
    const double p = to_double(cells[1], ln, "pressure_pa");
    if (!samples.empty() && !(t > samples.back().time)) {
      throw ParseError(ln, "time_s must be strictly increasing");
    }
    samples.push_back({t, p});
  }
  if (samples.empty()) throw ParseError(reader.number() + 1, "no data rows");
  return PressureTrace(std::move(samples));
}

PressureTrace parse_pressure(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_pressure(in);
}

void write_pressure(std::ostream& out, const PressureTrace& trace) {
  out << "time_s,pressure_pa\n";
  for (const auto& s : trace.samples()) {
    out << format_number(s.time) << ',' << format_number(s.pressure) << '\n';
  }
}

void write_pressure(const std::filesystem::path& path, const PressureTrace& trace) {
  auto out = open_out(path);
  write_pressure(out, trace);
  finish(out, path);
}

// ------------------------------------------------------------------- config

void ModelConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(geometry.r1)) throw ConfigError("geometry.r1_m", "must be > 0");
  if (!positive(geometry.r2)) throw ConfigError("geometry.r2_m", "must be > 0");
  if (!(geometry.r2 < geometry.r1)) throw ConfigError("geometry.r2_m", "must be smaller than r1_m");
  if (!positive(geometry.wall)) throw ConfigError("geometry.wall_m", "must be > 0");
  if (!positive(geometry.total_length)) throw ConfigError("geometry.total_length_m", "must be > 0");
  if (!positive(geometry.total_mass)) throw ConfigError("geometry.total_mass_kg", "must be > 0");
  if (n_links < 1) throw ConfigError("n_links", "must be >= 1");
  if (!positive(params.k_b)) throw ConfigError("params.k_b", "must be > 0");
  if (params.damping.size() != n_links) {
    throw ConfigError("params.damping", "needs exactly n_links entries");
  }
  for (double d : params.damping) {
    if (!std::isfinite(d) || d < 0.0) throw ConfigError("params.damping", "entries must be >= 0");
  }
}

ModelConfig parse_config(std::istream& in) {
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("<document>", "top level must be an object");

  ModelConfig cfg;
  const json& g = require(root, "geometry", "geometry");
  cfg.geometry.r1 = require_number(g, "r1_m", "geometry.r1_m");
  cfg.geometry.r2 = require_number(g, "r2_m", "geometry.r2_m");
  cfg.geometry.wall = require_number(g, "wall_m", "geometry.wall_m");
  cfg.geometry.total_length = require_number(g, "total_length_m", "geometry.total_length_m");
  cfg.geometry.total_mass = require_number(g, "total_mass_kg", "geometry.total_mass_kg");

  const json& n = require(root, "n_links", "n_links");
  if (!n.is_number_integer() || n.get<long long>() < 1) {
    throw ConfigError("n_links", "must be an integer >= 1");
  }
  cfg.n_links = n.get<std::size_t>();

  const json& p = require(root, "params", "params");
  cfg.params.k_b = require_number(p, "k_b", "params.k_b");
  const json& d = require(p, "damping", "params.damping");
  if (!d.is_array()) throw ConfigError("params.damping", "expected an array");
  cfg.params.damping.clear();
  for (const auto& v : d) {
    if (!v.is_number()) throw ConfigError("params.damping", "expected numbers");
    cfg.params.damping.push_back(v.get<double>());
  }

  if (root.contains("reference_frames")) {
    const json& r = root.at("reference_frames");
    if (!r.is_string()) throw ConfigError("reference_frames", "expected a path string");
    cfg.reference_frames = r.get<std::string>();
  }
  if (root.contains("reference_index")) {
    const json& r = root.at("reference_index");
    if (!r.is_number_integer() || r.get<long long>() < 0) {
      throw ConfigError("reference_index", "must be an integer >= 0");
    }
    cfg.reference_index = r.get<std::size_t>();
  }
  cfg.validate();
  return cfg;
}

ModelConfig parse_config(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_config(in);
}

namespace {

json config_json(const ModelConfig& cfg) {
  json j;
  j["geometry"] = {{"r1_m", cfg.geometry.r1},
                   {"r2_m", cfg.geometry.r2},
                   {"wall_m", cfg.geometry.wall},
                   {"total_length_m", cfg.geometry.total_length},
                   {"total_mass_kg", cfg.geometry.total_mass}};
  j["n_links"] = cfg.n_links;
  j["params"] = {{"k_b", cfg.params.k_b}, {"damping", cfg.params.damping}};
  if (cfg.reference_frames) j["reference_frames"] = *cfg.reference_frames;
  if (cfg.reference_index != 0) j["reference_index"] = cfg.reference_index;
  return j;
}

}  // namespace

void write_config(std::ostream& out, const ModelConfig& config) {
  config.validate();
  out << config_json(config).dump(2) << '\n';
}

void write_config(const std::filesystem::path& path, const ModelConfig& config) {
  auto out = open_out(path);
  write_config(out, config);
  finish(out, path);
}

// --------------------------------------------------------------- trajectory

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  const std::size_t n = traj.links();
  out << "time_s";
  for (std::size_t i = 1; i <= n; ++i) out << ",q_" << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",qdot_" << i;
  for (std::size_t i = 0; i <= n; ++i) out << ",x_" << i << ",y_" << i;
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_number(traj.times[k]);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
      out << ',' << format_number(traj.states[k].q[i]);
    }
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
      out << ',' << format_number(traj.states[k].qdot[i]);
    }
    for (const auto& p : traj.joint_positions[k]) {
      out << ',' << format_number(p.x()) << ',' << format_number(p.y());
    }
    out << '\n';
  }
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& trajectory) {
  auto out = open_out(path);
  write_trajectory(out, trajectory);
  finish(out, path);
}

Trajectory parse_trajectory(std::istream& in) {
  LineReader reader(in);
  std::string line;
  const auto header = read_header(reader, line, "time_s,q_1..");
  const std::size_t cols = header.size();
  if (cols < 7 || (cols - 3) % 4 != 0) {
    throw ParseError(reader.number(), "trajectory header has an invalid column count");
  }
  const std::size_t n = (cols - 3) / 4;
  std::vector<std::string> expected{"time_s"};
  for (std::size_t i = 1; i <= n; ++i) expected.push_back("q_" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) expected.push_back("qdot_" + std::to_string(i));
  for (std::size_t i = 0; i <= n; ++i) {
    expected.push_back("x_" + std::to_string(i));
    expected.push_back("y_" + std::to_string(i));
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (header[c] != expected[c]) {
      throw ParseError(reader.number(), "expected column '" + expected[c] + "', found '" +
                                            std::string(header[c]) + "'");
    }
  }

  Trajectory traj;
  const auto nn = static_cast<Eigen::Index>(n);
  while (reader.next(line)) {
    const std::size_t ln = reader.number();
    const auto cells = split(trim(line));
    expect_cells(cells, cols, ln);
    const double t = to_double(cells[0], ln, "time_s");
    if (!traj.times.empty() && !(t > traj.times.back())) {
      throw ParseError(ln, "time_s must be strictly increasing");
    }
    JointState s{VecX(nn), VecX(nn)};
    for (std::size_t i = 0; i < n; ++i) {
      s.q[static_cast<Eigen::Index>(i)] = to_double(cells[1 + i], ln, expected[1 + i].c_str());
      s.qdot[static_cast<Eigen::Index>(i)] =
          to_double(cells[1 + n + i], ln, expected[1 + n + i].c_str());
    }
    std::vector<Vec2> pts(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      const std::size_t c = 1 + 2 * n + 2 * i;
      pts[i] = {to_double(cells[c], ln, expected[c].c_str()),
                to_double(cells[c + 1], ln, expected[c + 1].c_str())};
    }
    traj.times.push_back(t);
    traj.states.push_back(std::move(s));
    traj.joint_positions.push_back(std::move(pts));
  }
  if (traj.times.empty()) throw ParseError(reader.number() + 1, "no data rows");
  return traj;
}

Trajectory parse_trajectory(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_trajectory(in);
}

// ------------------------------------------------------------------ reports

void write_report(std::ostream& out, const ReconstructionReport& report) {
  json j;
  j["n_links"] = report.n_links;
  j["reference_index"] = report.reference_index;
  json links = json::array();
  for (const auto& l : report.reference_chain) {
    links.push_back({{"length_m", l.length}, {"offset_rad", l.offset}});
  }
  j["reference_chain"] = links;
  j["max_error_m"] = report.max_error;
  j["mean_error_m"] = report.mean_error;
  json frames = json::array();
  for (const auto& f : report.frames) {
    json nodes = json::array();
    for (const auto& p : f.nodes) nodes.push_back(point_json(p));
    frames.push_back({{"time_s", f.time},
                      {"node_indices", f.node_indices},
                      {"nodes_m", nodes},
                      {"knots_m", f.knots},
                      {"joint_angles_rad", std::vector<double>(f.joint_angles.begin(), f.joint_angles.end())},
                      {"max_deviation_m", f.deviation.max},
                      {"mean_deviation_m", f.deviation.mean}});
  }
  j["frames"] = frames;
  out << j.dump(2) << '\n';
}

ReconstructionReport parse_reconstruction_report(std::istream& in) {
  const json j = json::parse(in);
  ReconstructionReport r;
  r.n_links = j.at("n_links").get<std::size_t>();
  r.reference_index = j.at("reference_index").get<std::size_t>();
  for (const auto& l : j.at("reference_chain")) {
    LinkParams p;
    p.length = l.at("length_m").get<double>();
    p.offset = l.at("offset_rad").get<double>();
    r.reference_chain.push_back(p);
  }
  r.max_error = j.at("max_error_m").get<double>();
  r.mean_error = j.at("mean_error_m").get<double>();
  for (const auto& f : j.at("frames")) {
    FrameReconstruction fr;
    fr.time = f.at("time_s").get<double>();
    fr.node_indices = f.at("node_indices").get<std::vector<std::size_t>>();
    for (const auto& p : f.at("nodes_m")) fr.nodes.push_back(point_from(p));
    fr.knots = f.at("knots_m").get<std::vector<double>>();
    const auto q = f.at("joint_angles_rad").get<std::vector<double>>();
    fr.joint_angles = Eigen::Map<const VecX>(q.data(), static_cast<Eigen::Index>(q.size()));
    fr.deviation = {f.at("max_deviation_m").get<double>(), f.at("mean_deviation_m").get<double>()};
    r.frames.push_back(std::move(fr));
  }
  return r;
}

void write_report(std::ostream& out, const OrderSelectionReport& report) {
  json j;
  j["threshold_m"] = report.threshold;
  j["chosen_n"] = report.chosen_n;
  j["threshold_met"] = report.threshold_met;
  j["times_s"] = report.times;
  json cands = json::array();
  for (const auto& c : report.candidates) {
    cands.push_back({{"n", c.n},
                     {"max_error_m", c.max_error},
                     {"mean_error_m", c.mean_error},
                     {"frame_max_m", c.frame_max},
                     {"frame_mean_m", c.frame_mean}});
  }
  j["candidates"] = cands;
  out << j.dump(2) << '\n';
}

OrderSelectionReport parse_order_report(std::istream& in) {
  const json j = json::parse(in);
  OrderSelectionReport r;
  r.threshold = j.at("threshold_m").get<double>();
  r.chosen_n = j.at("chosen_n").get<std::size_t>();
  r.threshold_met = j.at("threshold_met").get<bool>();
  r.times = j.at("times_s").get<std::vector<double>>();
  for (const auto& c : j.at("candidates")) {
    r.candidates.push_back({c.at("n").get<std::size_t>(), c.at("max_error_m").get<double>(),
                            c.at("mean_error_m").get<double>(),
                            c.at("frame_max_m").get<std::vector<double>>(),
                            c.at("frame_mean_m").get<std::vector<double>>()});
  }
  return r;
}

void write_report(std::ostream& out, const IdentifyResult& result, const ModelConfig& fitted) {
  json j;
  j["config"] = config_json(fitted);
  j["objective_m"] = result.value.rms;
  j["diverged"] = result.value.diverged;
  j["converged"] = result.converged;
  j["evaluations"] = result.evaluations;
  j["best_so_far_m"] = result.best_so_far;
  out << j.dump(2) << '\n';
}

template <class Report>
void write_report(const std::filesystem::path& path, const Report& report) {
  auto out = open_out(path);
  write_report(out, report);
  finish(out, path);
}

template void write_report<ReconstructionReport>(const std::filesystem::path&,
                                                 const ReconstructionReport&);
template void write_report<OrderSelectionReport>(const std::filesystem::path&,
                                                 const OrderSelectionReport&);

void write_report(const std::filesystem::path& path, const IdentifyResult& result,
                  const ModelConfig& fitted) {
  auto out = open_out(path);
  write_report(out, result, fitted);
  finish(out, path);
}

}  // namespace sbarom
