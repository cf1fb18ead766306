#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrngq/autocorr.hpp"
#include "qrngq/core.hpp"
#include "qrngq/criteria.hpp"
#include "qrngq/extract.hpp"
#include "qrngq/laser_sim.hpp"

namespace qrngq {

inline constexpr int kReportedLags = 10;

struct Boundaries {
  double d_bound = 0.155;
  double c1_bound_db = -18.52;
  // Optional bounds for lags 2..10 (dB); empty by default.
  std::map<int, double> higher_lag_bound_db;

  void validate() const;
};

struct QualReport {
  std::size_t sample_count = 0;
  FitResult fit;
  std::vector<double> coeff;     // C_1..C_10 (empty when the autocorrelation is undefined)
  std::vector<double> c_db;      // 10 log10 |C_d|
  std::string autocorr_error;    // e.g. ZeroVariance
  double min_entropy_bits = 0.0;
  double dynamic_range = 0.0;
  bool pass_statdist = false;
  bool pass_autocorr = false;
  bool pass_overall = false;

  // Provenance of the dataset.
  std::string source;
  std::uint64_t seed = 0;
  std::optional<DriveParams> operating_point;
  std::string laser;

  double d_stat() const { return fit.d_stat; }
  double c1_db() const;
};

// Recomputes the pass flags from the stored statistics only.
void evaluate_flags(QualReport& report, const Boundaries& b);

QualReport qualify(const SampleSequence& seq, const Boundaries& b = {}, const FitConfig& fit = {});

// min(cw) - 10 log10(2): half the best CW coefficient, in dB.
double derive_autocorr_boundary(std::span<const double> cw_c1_db_values);

enum class SweepAxis { kTemperature, kDutyCycle, kPeakCurrent, kModDepth };
const char* axis_name(SweepAxis axis);
double axis_value(const DriveParams& d, SweepAxis axis);

struct SweepGrid {
  std::vector<double> temperature_c{25.0};
  std::vector<double> duty_cycle{0.5};
  std::vector<double> peak_ma{32.0};
  std::vector<double> mod_depth{0.5};
  double rep_period_s = kDefaultDelay;

  std::size_t cell_count() const;
  // Cell c in row-major order over (temperature, duty cycle, peak, MD).
  DriveParams cell(std::size_t c) const;
  void validate() const;
};

struct SimConfig {
  LaserParams laser;
  double sample_rate = 50e9;
  double dt = 1e-12;
  std::size_t pulses = 10000;
  std::size_t warmup_pulses = 10;
  InterferometerParams interferometer;
  double scope_bandwidth_hz = 8e9;  // 0 disables the acquisition lowpass
  DetectionModel detection;
  FitConfig fit;
  unsigned threads = 0;

  void validate() const;
};

struct SweepExtraction {
  // Sampling instant as a fraction of the optical on-time (drive on-time minus
  // the detected delay).
  double offset_fraction = kDefaultOffsetFraction;
  // Absolute offset from the optical pulse start; overrides offset_fraction.
  std::optional<double> offset_s;
};

struct SweepCell {
  DriveParams drive;
  std::optional<QualReport> report;  // empty when the pipeline raised
  std::string error;
  double detected_delay_s = 0.0;
  double mean_power_mw = 0.0;

  bool passed() const { return report && report->pass_overall; }
};

// Full simulation chain for one operating point.
SweepCell simulate_cell(const DriveParams& drive, const SimConfig& sim, const SweepExtraction& ex,
                        const Boundaries& b, std::uint64_t seed);

// Intermediate products of the chain, for inspection and file output. The
// warm-up periods and the first period (no delayed arm yet) are cut off, so
// t = 0 is the start of an electrical period.
struct PipelineTrace {
  std::vector<double> drive_ma;     // after the optional drive lowpass
  PulseTrace laser;
  std::vector<double> interfered_mw;  // after the acquisition lowpass
  double detected_delay_s = 0.0;
};
PipelineTrace simulate_pipeline_trace(const DriveParams& drive, const SimConfig& sim,
                                      std::uint64_t seed);
// Constant drive for (pulses + 1) repetition periods.
PipelineTrace simulate_cw_trace(double current_ma, double temperature_c, double rep_period_s,
                                const SimConfig& sim, std::uint64_t seed);

struct SweepResult {
  SweepGrid grid;
  std::vector<SweepCell> cells;  // grid.cell order
};

SweepResult sweep(const SweepGrid& grid, const SimConfig& sim, const SweepExtraction& ex,
                  const Boundaries& b, std::uint64_t seed);

struct AcceptanceMap {
  SweepAxis axis1;
  SweepAxis axis2;
  std::vector<SweepAxis> fixed_axes;
  std::vector<double> fixed_values;
  std::vector<const SweepCell*> cells;  // axis1-major
};

// Splits a sweep into 2-D maps over the first two varying axes (peak current
// and duty cycle preferred); one map per combination of the remaining axes.
std::vector<AcceptanceMap> acceptance_maps(const SweepResult& result);

}  // namespace qrngq
