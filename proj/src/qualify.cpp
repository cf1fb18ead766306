#include "qrngq/qualify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qrngq/detail/parallel.hpp"
#include "qrngq/error.hpp"

namespace qrngq {
namespace {

constexpr std::uint64_t kIntegratorStream = 1;
constexpr std::uint64_t kDriftStream = 2;
constexpr std::uint64_t kDetectionStream = 3;

}  // namespace

void Boundaries::validate() const {
  if (!(d_bound > 0.0 && d_bound < 1.0)) throw Error(ErrorCode::kInvalidConfig, "d_bound must be in (0, 1)");
  if (!(c1_bound_db < 0.0)) throw Error(ErrorCode::kInvalidConfig, "c1_bound_db must be negative");
  for (const auto& [lag, bound] : higher_lag_bound_db) {
    if (lag < 2 || lag > kReportedLags) {
      throw Error(ErrorCode::kInvalidConfig, "higher-lag bounds apply to lags 2..10");
    }
    if (!std::isfinite(bound)) throw Error(ErrorCode::kInvalidConfig, "lag bound must be finite");
  }
}

double QualReport::c1_db() const {
  return c_db.empty() ? std::numeric_limits<double>::quiet_NaN() : c_db.front();
}

void evaluate_flags(QualReport& report, const Boundaries& b) {
  report.pass_statdist = report.fit.d_stat <= b.d_bound;
  bool ok = report.autocorr_error.empty() && !report.c_db.empty() && report.c_db[0] <= b.c1_bound_db;
  for (const auto& [lag, bound] : b.higher_lag_bound_db) {
    const auto idx = static_cast<std::size_t>(lag - 1);
    if (idx >= report.c_db.size() || !(report.c_db[idx] <= bound)) ok = false;
  }
  report.pass_autocorr = ok;
  report.pass_overall = report.pass_statdist && report.pass_autocorr;
}

QualReport qualify(const SampleSequence& seq, const Boundaries& b, const FitConfig& fit) {
  b.validate();
  const auto hist = build_histogram(seq);
  QualReport r;
  r.sample_count = seq.size();
  r.fit = fit_arcsine(hist, fit);
  r.min_entropy_bits = min_entropy(hist);
  r.dynamic_range = dynamic_range_fraction(hist);
  const int lags = std::min<int>(kReportedLags, static_cast<int>(seq.size()) - 1);
  try {
    if (lags < 1) throw Error(ErrorCode::kLagTooLarge, "sequence too short for lag 1");
    const auto profile = autocorr_profile(seq, lags);
    r.coeff.assign(profile.coeff.begin() + 1, profile.coeff.end());
    r.c_db.assign(profile.coeff_db.begin() + 1, profile.coeff_db.end());
  } catch (const Error& e) {
    r.coeff.clear();
    r.c_db.clear();
    r.autocorr_error = std::string(error_code_name(e.code())) + ": " + e.what();
  }
  evaluate_flags(r, b);
  return r;
}

double derive_autocorr_boundary(std::span<const double> cw_c1_db_values) {
  if (cw_c1_db_values.empty()) throw Error(ErrorCode::kEmptyInput, "no CW coefficients given");
  double best = std::numeric_limits<double>::infinity();
  for (double v : cw_c1_db_values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidInput, "CW coefficient must be finite");
    best = std::min(best, v);
  }
  return best - 10.0 * std::log10(2.0);
}

const char* axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kTemperature: return "temperature_c";
    case SweepAxis::kDutyCycle: return "duty_cycle";
    case SweepAxis::kPeakCurrent: return "peak_ma";
    case SweepAxis::kModDepth: return "mod_depth";
  }
  return "?";
}

double axis_value(const DriveParams& d, SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kTemperature: return d.temperature_c;
    case SweepAxis::kDutyCycle: return d.duty_cycle;
    case SweepAxis::kPeakCurrent: return d.peak_ma;
    case SweepAxis::kModDepth: return d.mod_depth;
  }
  return 0.0;
}

std::size_t SweepGrid::cell_count() const {
  return temperature_c.size() * duty_cycle.size() * peak_ma.size() * mod_depth.size();
}

DriveParams SweepGrid::cell(std::size_t c) const {
  DriveParams d;
  d.rep_period_s = rep_period_s;
  d.mod_depth = mod_depth[c % mod_depth.size()];
  c /= mod_depth.size();
  d.peak_ma = peak_ma[c % peak_ma.size()];
  c /= peak_ma.size();
  d.duty_cycle = duty_cycle[c % duty_cycle.size()];
  c /= duty_cycle.size();
  d.temperature_c = temperature_c[c];
  return d;
}

void SweepGrid::validate() const {
  if (cell_count() == 0) throw Error(ErrorCode::kEmptyInput, "sweep grid is empty");
  for (std::size_t c = 0; c < cell_count(); ++c) cell(c).validate();
}

void SimConfig::validate() const {
  laser.validate();
  interferometer.validate();
  detection.validate();
  if (!(sample_rate > 0.0)) throw Error(ErrorCode::kInvalidConfig, "sample rate must be positive");
  if (pulses < 100) throw Error(ErrorCode::kInvalidConfig, "at least 100 pulses are needed");
  if (!(scope_bandwidth_hz >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "scope bandwidth must be >= 0");
}

namespace {

// Drops the start-up transient and the samples without a delayed arm.
void crop_front(PipelineTrace& t, double seconds) {
  const auto drop = static_cast<std::size_t>(std::llround(seconds * t.laser.sample_rate));
  if (drop >= t.laser.size()) throw Error(ErrorCode::kTraceTooShort, "nothing left after the warm-up");
  const auto cut = [drop](std::vector<double>& v) { v.erase(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(drop)); };
  cut(t.drive_ma);
  cut(t.laser.drive_ma);
  cut(t.laser.photon_density);
  cut(t.laser.phase_rad);
  cut(t.interfered_mw);
}

PipelineTrace run_chain(std::vector<double> drive_ma, double temperature_c, const SimConfig& sim,
                        std::uint64_t seed) {
  PipelineTrace out;
  out.drive_ma = filter_drive(sim.laser, drive_ma, sim.sample_rate);
  IntegratorConfig ic;
  ic.dt = sim.dt;
  ic.temperature_c = temperature_c;
  ic.seed = detail::derive_seed(seed, {kIntegratorStream});
  out.laser = integrate_rate_equations(sim.laser, out.drive_ma, sim.sample_rate, ic);

  InterferometerParams ip = sim.interferometer;
  ip.drift_seed = detail::derive_seed(seed, {kDriftStream});
  out.interfered_mw = amzi_interfere(out.laser, ip);
  if (sim.scope_bandwidth_hz > 0.0) {
    out.interfered_mw = lowpass(out.interfered_mw, sim.sample_rate, sim.scope_bandwidth_hz);
  }
  return out;
}

}  // namespace

PipelineTrace simulate_pipeline_trace(const DriveParams& drive, const SimConfig& sim,
                                      std::uint64_t seed) {
  drive.validate();
  sim.validate();
  const std::size_t periods = sim.warmup_pulses + sim.pulses + 2;
  auto out = run_chain(make_drive(drive, sim.sample_rate, periods), drive.temperature_c, sim, seed);
  crop_front(out, static_cast<double>(sim.warmup_pulses + 1) * drive.rep_period_s);
  out.detected_delay_s = detect_pulse_onset(out.interfered_mw, sim.sample_rate, drive.rep_period_s);
  return out;
}

PipelineTrace simulate_cw_trace(double current_ma, double temperature_c, double rep_period_s,
                                const SimConfig& sim, std::uint64_t seed) {
  sim.validate();
  if (!(current_ma > 0.0) || !(rep_period_s > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "CW current and period must be positive");
  }
  const double seconds = static_cast<double>(sim.warmup_pulses + sim.pulses + 2) * rep_period_s;
  const auto samples = static_cast<std::size_t>(std::ceil(seconds * sim.sample_rate));
  auto out = run_chain(make_constant_drive(current_ma, sim.sample_rate, samples), temperature_c, sim, seed);
  crop_front(out, static_cast<double>(sim.warmup_pulses + 1) * rep_period_s);
  return out;
}

SweepCell simulate_cell(const DriveParams& drive, const SimConfig& sim, const SweepExtraction& ex,
                        const Boundaries& b, std::uint64_t seed) {
  SweepCell cell;
  cell.drive = drive;
  try {
    b.validate();
    const auto trace = simulate_pipeline_trace(drive, sim, seed);
    cell.detected_delay_s = trace.detected_delay_s;

    ExtractionConfig cfg;
    cfg.rep_period_s = drive.rep_period_s;
    cfg.delay_s = trace.detected_delay_s;
    const double optical_on = std::max(drive.duty_cycle * drive.rep_period_s - cfg.delay_s, 0.0);
    cfg.intra_pulse_offset_s = ex.offset_s ? *ex.offset_s : ex.offset_fraction * optical_on;
    auto values = extract_intensities(trace.interfered_mw, sim.sample_rate, cfg);
    if (values.size() > sim.pulses) values.resize(sim.pulses);

    double power = 0.0;
    for (std::size_t i = 0; i < trace.laser.size(); ++i) power += trace.laser.power_mw(i);
    cell.mean_power_mw = power / static_cast<double>(trace.laser.size());

    const auto digitized = digitize(values, sim.detection, detail::derive_seed(seed, {kDetectionStream}));
    QualReport report = qualify(digitized.codes, b, sim.fit);
    report.source = "simulation";
    report.seed = seed;
    report.operating_point = drive;
    report.laser = sim.laser.name;
    cell.report = std::move(report);
  } catch (const std::exception& e) {
    cell.report.reset();
    cell.error = e.what();
    if (const auto* qe = dynamic_cast<const Error*>(&e)) {
      cell.error = std::string(error_code_name(qe->code())) + ": " + cell.error;
    }
  }
  return cell;
}

SweepResult sweep(const SweepGrid& grid, const SimConfig& sim, const SweepExtraction& ex,
                  const Boundaries& b, std::uint64_t seed) {
  grid.validate();
  sim.validate();
  b.validate();
  SweepResult result;
  result.grid = grid;
  result.cells.resize(grid.cell_count());
  detail::parallel_for(result.cells.size(), sim.threads, [&](std::size_t c) {
    result.cells[c] = simulate_cell(grid.cell(c), sim, ex, b, detail::derive_seed(seed, {c}));
  });
  return result;
}

std::vector<AcceptanceMap> acceptance_maps(const SweepResult& result) {
  const auto& g = result.grid;
  const std::vector<std::pair<SweepAxis, std::size_t>> dims{
      {SweepAxis::kPeakCurrent, g.peak_ma.size()},
      {SweepAxis::kDutyCycle, g.duty_cycle.size()},
      {SweepAxis::kModDepth, g.mod_depth.size()},
      {SweepAxis::kTemperature, g.temperature_c.size()},
  };
  std::vector<SweepAxis> order;
  for (const auto& [axis, n] : dims) {
    if (n > 1) order.push_back(axis);
  }
  for (const auto& [axis, n] : dims) {
    if (n <= 1) order.push_back(axis);
  }

  std::map<std::vector<double>, AcceptanceMap> groups;
  for (const auto& cell : result.cells) {
    std::vector<double> key;
    for (std::size_t i = 2; i < order.size(); ++i) key.push_back(axis_value(cell.drive, order[i]));
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) {
      it->second.axis1 = order[0];
      it->second.axis2 = order[1];
      it->second.fixed_axes.assign(order.begin() + 2, order.end());
      it->second.fixed_values = key;
    }
    it->second.cells.push_back(&cell);
  }

  std::vector<AcceptanceMap> maps;
  for (auto& [key, map] : groups) {
    std::stable_sort(map.cells.begin(), map.cells.end(), [&](const SweepCell* a, const SweepCell* b) {
      const double a1 = axis_value(a->drive, map.axis1);
      const double b1 = axis_value(b->drive, map.axis1);
      if (a1 != b1) return a1 < b1;
      return axis_value(a->drive, map.axis2) < axis_value(b->drive, map.axis2);
    });
    maps.push_back(std::move(map));
  }
  return maps;
}

}  // namespace qrngq
