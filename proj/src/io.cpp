#include "qrngq/io.hpp"

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "qrngq/error.hpp"

namespace qrngq {
namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Non-empty lines with their 1-based line numbers.
std::vector<std::pair<int, std::string>> content_lines(const std::string& text) {
  std::vector<std::pair<int, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto t = trim(line);
    if (!t.empty()) out.emplace_back(no, std::move(t));
  }
  return out;
}

[[noreturn]] void parse_error(const std::string& origin, int line, const std::string& what) {
  throw Error(ErrorCode::kParse, origin + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
bool parse_value(const std::string& s, T& v) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

double parse_double(const std::string& s, const std::string& origin, int line) {
  double v = 0.0;
  if (!parse_value(s, v)) parse_error(origin, line, "invalid number '" + s + "'");
  return v;
}

std::string clean_field(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw Error(ErrorCode::kIo, "cannot move output into place at " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_histogram_csv(const IntensityHistogram& hist) {
  std::string out = "code,count\n";
  for (int i = 0; i < hist.bin_count(); ++i) {
    out += std::to_string(i) + "," + std::to_string(hist.counts()[static_cast<std::size_t>(i)]) + "\n";
  }
  return out;
}

IntensityHistogram parse_histogram_csv(const std::string& text, const std::string& origin) {
  const auto lines = content_lines(text);
  if (lines.empty()) throw Error(ErrorCode::kEmptyInput, origin + ": empty histogram file");
  if (split(lines[0].second) != std::vector<std::string>{"code", "count"}) {
    parse_error(origin, lines[0].first, "expected header 'code,count'");
  }
  std::vector<std::uint64_t> counts;
  std::vector<bool> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [no, line] = lines[i];
    const auto fields = split(line);
    if (fields.size() != 2) parse_error(origin, no, "expected 2 fields");
    int code = 0;
    std::uint64_t count = 0;
    if (!parse_value(fields[0], code) || code < 0) parse_error(origin, no, "invalid code '" + fields[0] + "'");
    if (!parse_value(fields[1], count)) parse_error(origin, no, "invalid count '" + fields[1] + "'");
    const auto idx = static_cast<std::size_t>(code);
    if (idx >= counts.size()) {
      counts.resize(idx + 1, 0);
      seen.resize(idx + 1, false);
    }
    if (seen[idx]) parse_error(origin, no, "duplicate code " + fields[0]);
    seen[idx] = true;
    counts[idx] = count;
  }
  if (counts.empty()) throw Error(ErrorCode::kEmptyInput, origin + ": histogram has no rows");
  return IntensityHistogram(std::move(counts));
}

std::vector<int> parse_codes(const std::string& text, const std::string& origin) {
  const auto lines = content_lines(text);
  if (lines.empty()) throw Error(ErrorCode::kEmptyInput, origin + ": no intensity codes");
  std::vector<int> codes;
  codes.reserve(lines.size());

  int probe = 0;
  const bool has_header = !parse_value(lines[0].second, probe);
  if (!has_header) {
    for (const auto& [no, line] : lines) {
      int v = 0;
      if (!parse_value(line, v)) parse_error(origin, no, "expected one integer code, got '" + line + "'");
      codes.push_back(v);
    }
    return codes;
  }

  const auto header = split(lines[0].second);
  std::size_t column = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "code") column = c;
  }
  if (column == header.size()) parse_error(origin, lines[0].first, "header has no 'code' column");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [no, line] = lines[i];
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      parse_error(origin, no, "expected " + std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    }
    int v = 0;
    if (!parse_value(fields[column], v)) parse_error(origin, no, "invalid code '" + fields[column] + "'");
    codes.push_back(v);
  }
  if (codes.empty()) throw Error(ErrorCode::kEmptyInput, origin + ": no intensity codes");
  return codes;
}

std::string format_codes(const SampleSequence& seq) {
  std::string out = "code\n";
  out.reserve(seq.size() * 5 + 8);
  for (int v : seq.values()) {
    out += std::to_string(v);
    out += '\n';
  }
  return out;
}

int TraceTable::find(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return static_cast<int>(c);
  }
  return -1;
}

const std::vector<double>& TraceTable::signal() const {
  const int idx = find("interfered_intensity");
  return data.at(idx >= 0 ? static_cast<std::size_t>(idx) : 0);
}

TraceTable to_trace_table(const PipelineTrace& trace) {
  TraceTable t;
  t.sample_rate = trace.laser.sample_rate;
  t.columns = {"drive_mA", "photon_density", "phase_rad", "interfered_intensity"};
  t.data = {trace.drive_ma, trace.laser.photon_density, trace.laser.phase_rad, trace.interfered_mw};
  return t;
}

std::string format_trace_csv(const TraceTable& table) {
  std::string out = "time_s";
  for (const auto& c : table.columns) out += "," + c;
  out += "\n";
  const std::size_t n = table.data.empty() ? 0 : table.data.front().size();
  out.reserve(n * 16 * (table.columns.size() + 1));
  for (std::size_t i = 0; i < n; ++i) {
    out += format_number(static_cast<double>(i) / table.sample_rate);
    for (const auto& col : table.data) {
      out += ',';
      out += format_number(col[i]);
    }
    out += '\n';
  }
  return out;
}

TraceTable parse_trace_csv(const std::string& text, const std::string& origin) {
  const auto lines = content_lines(text);
  if (lines.empty()) throw Error(ErrorCode::kEmptyInput, origin + ": empty trace file");
  const auto header = split(lines[0].second);
  if (header.size() < 2 || header[0] != "time_s") {
    parse_error(origin, lines[0].first, "expected header 'time_s,<value columns...>'");
  }
  TraceTable table;
  table.columns.assign(header.begin() + 1, header.end());
  table.data.resize(table.columns.size());
  std::vector<double> time;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [no, line] = lines[i];
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      parse_error(origin, no, "expected " + std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    }
    time.push_back(parse_double(fields[0], origin, no));
    for (std::size_t c = 1; c < fields.size(); ++c) {
      table.data[c - 1].push_back(parse_double(fields[c], origin, no));
    }
  }
  if (time.size() < 2) throw Error(ErrorCode::kTraceTooShort, origin + ": trace needs at least 2 samples");
  const double dt = (time.back() - time.front()) / static_cast<double>(time.size() - 1);
  if (!(dt > 0.0)) throw Error(ErrorCode::kParse, origin + ": time column must increase");
  for (std::size_t i = 0; i < time.size(); ++i) {
    if (std::abs(time[i] - time.front() - static_cast<double>(i) * dt) > 1e-3 * dt) {
      parse_error(origin, lines[i + 1].first, "non-uniform sampling");
    }
  }
  table.sample_rate = 1.0 / dt;
  return table;
}

std::string format_calibration_csv(const CalibrationGrid& grid) {
  std::string out = "noise,fraction,rep,d_stat\n";
  for (const auto& cell : grid.cells) {
    for (std::size_t r = 0; r < cell.d_stat.size(); ++r) {
      out += format_number(cell.noise) + "," + format_number(cell.fraction) + "," + std::to_string(r) +
             "," + format_number(cell.d_stat[r]) + "\n";
    }
  }
  out += "mean,,," + format_number(grid.mean_d_stat) + "\n";
  return out;
}

std::string format_calibration_cells_csv(const CalibrationGrid& grid) {
  std::string out = "noise,fraction,mean_d_stat,std_d_stat,failed_fits\n";
  for (const auto& cell : grid.cells) {
    out += format_number(cell.noise) + "," + format_number(cell.fraction) + "," +
           format_number(cell.mean) + "," + format_number(cell.std) + "," +
           std::to_string(cell.failed_fits) + "\n";
  }
  return out;
}

std::string format_sample_size_csv(const SampleSizeStudy& study) {
  std::string out = "size,mean_d_stat,std_d_stat\n";
  for (const auto& row : study.rows) {
    out += std::to_string(row.size) + "," + format_number(row.mean) + "," + format_number(row.std) + "\n";
  }
  return out;
}

std::string format_acceptance_csv(const SweepResult& result) {
  const auto maps = acceptance_maps(result);
  if (maps.empty()) return {};
  const auto& first = maps.front();
  std::string out = std::string(axis_name(first.axis1)) + "," + axis_name(first.axis2) +
                    ",d_stat,c1_db,pass_statdist,pass_autocorr,pass_overall,error";
  for (auto axis : first.fixed_axes) out += std::string(",") + axis_name(axis);
  out += "\n";
  for (const auto& map : maps) {
    for (const SweepCell* cell : map.cells) {
      const auto& d = cell->drive;
      out += format_number(axis_value(d, map.axis1)) + "," + format_number(axis_value(d, map.axis2)) + ",";
      if (cell->report) {
        const auto& r = *cell->report;
        out += format_number(r.d_stat()) + "," + format_number(r.c1_db()) + "," +
               (r.pass_statdist ? "1" : "0") + "," + (r.pass_autocorr ? "1" : "0") + "," +
               (r.pass_overall ? "1" : "0") + "," + clean_field(r.autocorr_error);
      } else {
        out += "nan,nan,0,0,0," + clean_field(cell->error);
      }
      for (auto axis : map.fixed_axes) out += "," + format_number(axis_value(d, axis));
      out += "\n";
    }
  }
  return out;
}

std::string report_to_json(const QualReport& r, const Boundaries& b) {
  json j;
  j["sample_count"] = r.sample_count;
  j["d_stat"] = r.fit.d_stat;
  j["fit"] = {{"lo", r.fit.model.lo},
              {"hi", r.fit.model.hi},
              {"mass", r.fit.model.mass},
              {"converged", r.fit.converged},
              {"evaluations", r.fit.evaluations},
              {"failure_reason", r.fit.failure_reason}};
  json coeff = json::array();
  json c_db = json::array();
  json lags = json::array();
  for (std::size_t i = 0; i < r.c_db.size(); ++i) {
    lags.push_back(i + 1);
    coeff.push_back(number_or_null(r.coeff[i]));
    c_db.push_back(number_or_null(r.c_db[i]));
  }
  j["autocorr"] = {{"lags", lags}, {"coeff", coeff}, {"c_db", c_db}, {"error", r.autocorr_error}};
  j["min_entropy_bits"] = r.min_entropy_bits;
  j["dynamic_range_fraction"] = r.dynamic_range;
  json lag_bounds = json::object();
  for (const auto& [lag, bound] : b.higher_lag_bound_db) lag_bounds[std::to_string(lag)] = bound;
  j["boundaries"] = {{"d_bound", b.d_bound}, {"c1_bound_db", b.c1_bound_db}, {"higher_lag_bound_db", lag_bounds}};
  j["pass_statdist"] = r.pass_statdist;
  j["pass_autocorr"] = r.pass_autocorr;
  j["pass_overall"] = r.pass_overall;
  json meta = {{"source", r.source}, {"seed", r.seed}, {"laser", r.laser}};
  if (r.operating_point) {
    const auto& d = *r.operating_point;
    meta["operating_point"] = {{"temperature_c", d.temperature_c},
                               {"duty_cycle", d.duty_cycle},
                               {"peak_ma", d.peak_ma},
                               {"mod_depth", d.mod_depth},
                               {"rep_period_s", d.rep_period_s}};
  } else {
    meta["operating_point"] = nullptr;
  }
  j["metadata"] = meta;
  return j.dump(2) + "\n";
}

QualReport report_from_json(const std::string& text, Boundaries* boundaries) {
  QualReport r;
  try {
    const json j = json::parse(text);
    r.sample_count = j.at("sample_count").get<std::size_t>();
    const auto& fit = j.at("fit");
    r.fit.d_stat = j.at("d_stat").get<double>();
    r.fit.model.lo = fit.at("lo").get<double>();
    r.fit.model.hi = fit.at("hi").get<double>();
    r.fit.model.mass = fit.at("mass").get<double>();
    r.fit.converged = fit.at("converged").get<bool>();
    r.fit.evaluations = fit.at("evaluations").get<int>();
    r.fit.failure_reason = fit.at("failure_reason").get<std::string>();
    const auto& ac = j.at("autocorr");
    for (const auto& v : ac.at("coeff")) r.coeff.push_back(number_from(v));
    for (const auto& v : ac.at("c_db")) r.c_db.push_back(number_from(v));
    r.autocorr_error = ac.at("error").get<std::string>();
    r.min_entropy_bits = j.at("min_entropy_bits").get<double>();
    r.dynamic_range = j.at("dynamic_range_fraction").get<double>();
    r.pass_statdist = j.at("pass_statdist").get<bool>();
    r.pass_autocorr = j.at("pass_autocorr").get<bool>();
    r.pass_overall = j.at("pass_overall").get<bool>();
    const auto& meta = j.at("metadata");
    r.source = meta.at("source").get<std::string>();
    r.seed = meta.at("seed").get<std::uint64_t>();
    r.laser = meta.at("laser").get<std::string>();
    if (!meta.at("operating_point").is_null()) {
      const auto& op = meta.at("operating_point");
      DriveParams d;
      d.temperature_c = op.at("temperature_c").get<double>();
      d.duty_cycle = op.at("duty_cycle").get<double>();
      d.peak_ma = op.at("peak_ma").get<double>();
      d.mod_depth = op.at("mod_depth").get<double>();
      d.rep_period_s = op.at("rep_period_s").get<double>();
      r.operating_point = d;
    }
    if (boundaries) {
      const auto& b = j.at("boundaries");
      boundaries->d_bound = b.at("d_bound").get<double>();
      boundaries->c1_bound_db = b.at("c1_bound_db").get<double>();
      boundaries->higher_lag_bound_db.clear();
      for (const auto& [lag, bound] : b.at("higher_lag_bound_db").items()) {
        boundaries->higher_lag_bound_db[std::stoi(lag)] = bound.get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed report: ") + e.what());
  }
  return r;
}

}  // namespace qrngq
