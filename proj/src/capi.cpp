#include "qrngq/qrngq.h"

#include <cmath>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "qrngq/autocorr.hpp"
#include "qrngq/criteria.hpp"
#include "qrngq/error.hpp"
#include "qrngq/extract.hpp"
#include "qrngq/io.hpp"
#include "qrngq/phase_sim.hpp"
#include "qrngq/qualify.hpp"

struct qrngq_sequence {
  qrngq::SampleSequence seq;
};

struct qrngq_report {
  qrngq::QualReport report;
  qrngq::Boundaries boundaries;
};

struct qrngq_calibration {
  qrngq::CalibrationGrid grid;
};

struct qrngq_size_study {
  qrngq::SampleSizeStudy study;
};

struct qrngq_sim {
  qrngq::SimConfig config;
};

struct qrngq_trace {
  qrngq::TraceTable table;
};

struct qrngq_sweep_result {
  qrngq::SweepResult result;
};

namespace {

thread_local std::string g_last_error;

qrngq_status fail(qrngq_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
qrngq_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return QRNGQ_OK;
  } catch (const qrngq::Error& e) {
    return fail(static_cast<qrngq_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(QRNGQ_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QRNGQ_INTERNAL, e.what());
  }
}

#define QRNGQ_REQUIRE(cond, msg) \
  if (!(cond)) return fail(QRNGQ_INVALID_INPUT, msg)

qrngq::Boundaries to_boundaries(const qrngq_boundaries* b) {
  qrngq::Boundaries out;
  if (!b) return out;
  out.d_bound = b->d_bound;
  out.c1_bound_db = b->c1_bound_db;
  for (int i = 0; i < 9; ++i) {
    if (!std::isnan(b->higher_lag_bound_db[i])) out.higher_lag_bound_db[i + 2] = b->higher_lag_bound_db[i];
  }
  out.validate();
  return out;
}

qrngq::DriveParams to_drive(const qrngq_drive& d) {
  qrngq::DriveParams out;
  out.temperature_c = d.temperature_c;
  out.duty_cycle = d.duty_cycle;
  out.peak_ma = d.peak_ma;
  out.mod_depth = d.mod_depth;
  out.rep_period_s = d.rep_period_s;
  out.validate();
  return out;
}

qrngq_drive from_drive(const qrngq::DriveParams& d) {
  return {d.temperature_c, d.duty_cycle, d.peak_ma, d.mod_depth, d.rep_period_s};
}

std::vector<double> linspace(double a, double b, int points) {
  if (points < 1) throw qrngq::Error(qrngq::ErrorCode::kInvalidInput, "grid needs at least one point");
  std::vector<double> v;
  for (int i = 0; i < points; ++i) v.push_back(points == 1 ? a : a + (b - a) * i / (points - 1));
  return v;
}

qrngq::CalibrationSpec to_spec(const qrngq_calibration_params& p) {
  qrngq::CalibrationSpec spec;
  spec.noise_values = linspace(p.noise_min, p.noise_max, p.noise_points);
  spec.fraction_values = linspace(p.fraction_min, p.fraction_max, p.fraction_points);
  spec.n_samples = p.n_samples;
  spec.reps = p.reps;
  spec.sigma_phi = p.sigma_phi;
  spec.seed = p.seed;
  spec.threads = p.threads;
  return spec;
}

qrngq::AdcModel adc_of(int bits) {
  qrngq::AdcModel adc;
  adc.bits = bits;
  adc.validate();
  return adc;
}

std::vector<double> span_of(const double* values, size_t n) {
  if (n == 0) return {};
  if (!values) throw qrngq::Error(qrngq::ErrorCode::kInvalidInput, "grid axis pointer is null");
  return std::vector<double>(values, values + n);
}

}  // namespace

extern "C" {

const char* qrngq_last_error(void) { return g_last_error.c_str(); }

const char* qrngq_status_name(qrngq_status status) {
  if (status == QRNGQ_OK) return "Ok";
  if (status == QRNGQ_INTERNAL) return "Internal";
  if (status >= QRNGQ_INVALID_INPUT && status <= QRNGQ_IO) {
    return qrngq::error_code_name(static_cast<qrngq::ErrorCode>(static_cast<int>(status)));
  }
  return "Unknown";
}

const char* qrngq_version(void) { return "1.0.0"; }

qrngq_status qrngq_sequence_create(const int* codes, size_t n, int code_count, qrngq_sequence** out) {
  QRNGQ_REQUIRE(out, "output pointer is null");
  QRNGQ_REQUIRE(codes || n == 0, "codes pointer is null");
  return guarded([&] {
    *out = new qrngq_sequence{qrngq::SampleSequence(std::vector<int>(codes, codes + n), code_count)};
  });
}

qrngq_status qrngq_sequence_load(const char* path, int code_count, qrngq_sequence** out) {
  QRNGQ_REQUIRE(path && out, "null argument");
  return guarded([&] {
    auto codes = qrngq::parse_codes(qrngq::read_file(path), path);
    *out = new qrngq_sequence{qrngq::SampleSequence(std::move(codes), code_count)};
  });
}

qrngq_status qrngq_sequence_write(const qrngq_sequence* seq, const char* path) {
  QRNGQ_REQUIRE(seq && path, "null argument");
  return guarded([&] { qrngq::write_file_atomic(path, qrngq::format_codes(seq->seq)); });
}

qrngq_status qrngq_sequence_write_histogram(const qrngq_sequence* seq, const char* path) {
  QRNGQ_REQUIRE(seq && path, "null argument");
  return guarded([&] {
    qrngq::write_file_atomic(path, qrngq::format_histogram_csv(qrngq::build_histogram(seq->seq)));
  });
}

size_t qrngq_sequence_size(const qrngq_sequence* seq) { return seq ? seq->seq.size() : 0; }

int qrngq_sequence_code_count(const qrngq_sequence* seq) { return seq ? seq->seq.code_count() : 0; }

const int* qrngq_sequence_data(const qrngq_sequence* seq) {
  return seq ? seq->seq.values().data() : nullptr;
}

void qrngq_sequence_free(qrngq_sequence* seq) { delete seq; }

qrngq_status qrngq_stat_distance(const uint64_t* measured, const double* expected, size_t n, double* out) {
  QRNGQ_REQUIRE(measured && expected && out, "null argument");
  return guarded([&] {
    qrngq::IntensityHistogram hist(std::vector<std::uint64_t>(measured, measured + n));
    qrngq::ArcsineModel model;
    model.expected.assign(expected, expected + n);
    for (double a : model.expected) model.mass += a;
    *out = qrngq::stat_distance(hist, model);
  });
}

qrngq_status qrngq_min_entropy(const qrngq_sequence* seq, double* out_bits) {
  QRNGQ_REQUIRE(seq && out_bits, "null argument");
  return guarded([&] { *out_bits = qrngq::min_entropy(qrngq::build_histogram(seq->seq)); });
}

qrngq_status qrngq_autocorr_coeff(const qrngq_sequence* seq, int lag, double* out) {
  QRNGQ_REQUIRE(seq && out, "null argument");
  return guarded([&] { *out = qrngq::autocorr_coeff(seq->seq, lag); });
}

void qrngq_boundaries_default(qrngq_boundaries* b) {
  if (!b) return;
  const qrngq::Boundaries d;
  b->d_bound = d.d_bound;
  b->c1_bound_db = d.c1_bound_db;
  for (double& v : b->higher_lag_bound_db) v = std::numeric_limits<double>::quiet_NaN();
}

qrngq_status qrngq_derive_autocorr_boundary(const double* cw_c1_db, size_t n, double* out_db) {
  QRNGQ_REQUIRE(out_db && (cw_c1_db || n == 0), "null argument");
  return guarded([&] {
    *out_db = qrngq::derive_autocorr_boundary(std::span<const double>(cw_c1_db, n));
  });
}

qrngq_status qrngq_qualify(const qrngq_sequence* seq, const qrngq_boundaries* b, qrngq_report** out) {
  QRNGQ_REQUIRE(seq && out, "null argument");
  return guarded([&] {
    const auto bounds = to_boundaries(b);
    *out = new qrngq_report{qrngq::qualify(seq->seq, bounds), bounds};
    (*out)->report.source = "sequence";
  });
}

double qrngq_report_d_stat(const qrngq_report* r) {
  return r ? r->report.d_stat() : std::numeric_limits<double>::quiet_NaN();
}

int qrngq_report_converged(const qrngq_report* r) { return r && r->report.fit.converged ? 1 : 0; }

qrngq_status qrngq_report_c_db(const qrngq_report* r, int lag, double* out) {
  QRNGQ_REQUIRE(r && out, "null argument");
  if (!r->report.autocorr_error.empty()) return fail(QRNGQ_ZERO_VARIANCE, r->report.autocorr_error);
  if (lag < 1 || static_cast<size_t>(lag) > r->report.c_db.size()) {
    return fail(QRNGQ_LAG_TOO_LARGE, "lag outside the reported profile");
  }
  *out = r->report.c_db[static_cast<size_t>(lag - 1)];
  g_last_error.clear();
  return QRNGQ_OK;
}

double qrngq_report_min_entropy(const qrngq_report* r) {
  return r ? r->report.min_entropy_bits : std::numeric_limits<double>::quiet_NaN();
}

int qrngq_report_pass_statdist(const qrngq_report* r) { return r && r->report.pass_statdist ? 1 : 0; }
int qrngq_report_pass_autocorr(const qrngq_report* r) { return r && r->report.pass_autocorr ? 1 : 0; }
int qrngq_report_pass_overall(const qrngq_report* r) { return r && r->report.pass_overall ? 1 : 0; }

const char* qrngq_report_autocorr_error(const qrngq_report* r) {
  return r ? r->report.autocorr_error.c_str() : "";
}

qrngq_status qrngq_report_reevaluate(qrngq_report* r, const qrngq_boundaries* b) {
  QRNGQ_REQUIRE(r, "null argument");
  return guarded([&] {
    r->boundaries = to_boundaries(b);
    qrngq::evaluate_flags(r->report, r->boundaries);
  });
}

qrngq_status qrngq_report_write_json(const qrngq_report* r, const char* path) {
  QRNGQ_REQUIRE(r && path, "null argument");
  return guarded([&] { qrngq::write_file_atomic(path, qrngq::report_to_json(r->report, r->boundaries)); });
}

qrngq_status qrngq_report_load_json(const char* path, qrngq_report** out) {
  QRNGQ_REQUIRE(path && out, "null argument");
  return guarded([&] {
    auto holder = std::make_unique<qrngq_report>();
    holder->report = qrngq::report_from_json(qrngq::read_file(path), &holder->boundaries);
    *out = holder.release();
  });
}

void qrngq_report_free(qrngq_report* r) { delete r; }

void qrngq_calibration_params_default(qrngq_calibration_params* p) {
  if (!p) return;
  const auto spec = qrngq::CalibrationSpec::default_grid();
  p->noise_min = spec.noise_values.front();
  p->noise_max = spec.noise_values.back();
  p->noise_points = static_cast<int>(spec.noise_values.size());
  p->fraction_min = spec.fraction_values.front();
  p->fraction_max = spec.fraction_values.back();
  p->fraction_points = static_cast<int>(spec.fraction_values.size());
  p->n_samples = spec.n_samples;
  p->reps = spec.reps;
  p->sigma_phi = spec.sigma_phi;
  p->adc_bits = qrngq::AdcModel{}.bits;
  p->seed = spec.seed;
  p->threads = spec.threads;
}

qrngq_status qrngq_calibrate(const qrngq_calibration_params* p, qrngq_calibration** out) {
  QRNGQ_REQUIRE(p && out, "null argument");
  return guarded([&] {
    *out = new qrngq_calibration{qrngq::calibrate_boundary(to_spec(*p), adc_of(p->adc_bits))};
  });
}

double qrngq_calibration_mean(const qrngq_calibration* c) {
  return c ? c->grid.mean_d_stat : std::numeric_limits<double>::quiet_NaN();
}

size_t qrngq_calibration_cell_count(const qrngq_calibration* c) { return c ? c->grid.cells.size() : 0; }

qrngq_status qrngq_calibration_cell(const qrngq_calibration* c, size_t index, double* noise,
                                    double* fraction, double* mean, double* std) {
  QRNGQ_REQUIRE(c, "null argument");
  QRNGQ_REQUIRE(index < c->grid.cells.size(), "cell index out of range");
  const auto& cell = c->grid.cells[index];
  if (noise) *noise = cell.noise;
  if (fraction) *fraction = cell.fraction;
  if (mean) *mean = cell.mean;
  if (std) *std = cell.std;
  g_last_error.clear();
  return QRNGQ_OK;
}

qrngq_status qrngq_calibration_write(const qrngq_calibration* c, const char* path, const char* cells_path) {
  QRNGQ_REQUIRE(c && path, "null argument");
  return guarded([&] {
    qrngq::write_file_atomic(path, qrngq::format_calibration_csv(c->grid));
    if (cells_path) qrngq::write_file_atomic(cells_path, qrngq::format_calibration_cells_csv(c->grid));
  });
}

void qrngq_calibration_free(qrngq_calibration* c) { delete c; }

qrngq_status qrngq_sample_size_study(const qrngq_calibration_params* p, double noise, double fraction,
                                     const size_t* sizes, size_t n_sizes, qrngq_size_study** out) {
  QRNGQ_REQUIRE(p && out && (sizes || n_sizes == 0), "null argument");
  return guarded([&] {
    const std::vector<std::size_t> sz(sizes, sizes + n_sizes);
    *out = new qrngq_size_study{qrngq::sample_size_study(noise, fraction, sz, p->reps, p->seed, p->sigma_phi,
                                                         adc_of(p->adc_bits), p->threads)};
  });
}

size_t qrngq_size_study_rows(const qrngq_size_study* s) { return s ? s->study.rows.size() : 0; }

qrngq_status qrngq_size_study_row(const qrngq_size_study* s, size_t row, size_t* size, double* mean,
                                  double* std) {
  QRNGQ_REQUIRE(s, "null argument");
  QRNGQ_REQUIRE(row < s->study.rows.size(), "row index out of range");
  const auto& r = s->study.rows[row];
  if (size) *size = r.size;
  if (mean) *mean = r.mean;
  if (std) *std = r.std;
  g_last_error.clear();
  return QRNGQ_OK;
}

qrngq_status qrngq_size_study_write(const qrngq_size_study* s, const char* path) {
  QRNGQ_REQUIRE(s && path, "null argument");
  return guarded([&] { qrngq::write_file_atomic(path, qrngq::format_sample_size_csv(s->study)); });
}

void qrngq_size_study_free(qrngq_size_study* s) { delete s; }

qrngq_status qrngq_simulate_phase_codes(double sigma_phi, double noise, double fraction, size_t n,
                                        int adc_bits, uint64_t seed, qrngq_sequence** out) {
  QRNGQ_REQUIRE(out, "null argument");
  return guarded([&] {
    qrngq::PhaseDiffusionConfig pc;
    pc.sigma_phi = sigma_phi;
    pc.n_pulses = n;
    pc.seed = seed;
    const auto intensities = qrngq::phases_to_intensities(qrngq::simulate_phases(pc), pc.visibility);
    qrngq::NoiseModel nm;
    nm.sigma_noise = noise;
    *out = new qrngq_sequence{qrngq::apply_noise_and_quantize(intensities, nm, fraction, adc_of(adc_bits), seed)};
  });
}

void qrngq_drive_default(qrngq_drive* d) {
  if (d) *d = from_drive(qrngq::DriveParams{});
}

qrngq_status qrngq_sim_create(const char* preset, qrngq_sim** out) {
  QRNGQ_REQUIRE(out, "null argument");
  return guarded([&] {
    auto sim = std::make_unique<qrngq_sim>();
    sim->config.laser = qrngq::laser_preset(preset ? preset : "laser3");
    *out = sim.release();
  });
}

qrngq_status qrngq_sim_load_laser(qrngq_sim* sim, const char* path) {
  QRNGQ_REQUIRE(sim && path, "null argument");
  return guarded([&] { sim->config.laser = qrngq::load_laser_params(path); });
}

qrngq_status qrngq_sim_set_lowpass(qrngq_sim* sim, double cutoff_hz) {
  QRNGQ_REQUIRE(sim, "null argument");
  QRNGQ_REQUIRE(cutoff_hz >= 0.0 && std::isfinite(cutoff_hz), "lowpass cutoff must be >= 0");
  sim->config.laser.drive_lowpass_hz = cutoff_hz;
  g_last_error.clear();
  return QRNGQ_OK;
}

qrngq_status qrngq_sim_set_pulses(qrngq_sim* sim, size_t pulses) {
  QRNGQ_REQUIRE(sim, "null argument");
  QRNGQ_REQUIRE(pulses >= 100, "at least 100 pulses are needed");
  sim->config.pulses = pulses;
  g_last_error.clear();
  return QRNGQ_OK;
}

qrngq_status qrngq_sim_set_sample_rate(qrngq_sim* sim, double sample_rate) {
  QRNGQ_REQUIRE(sim, "null argument");
  QRNGQ_REQUIRE(sample_rate > 0.0 && std::isfinite(sample_rate), "sample rate must be positive");
  sim->config.sample_rate = sample_rate;
  g_last_error.clear();
  return QRNGQ_OK;
}

qrngq_status qrngq_sim_set_adc_bits(qrngq_sim* sim, int bits) {
  QRNGQ_REQUIRE(sim, "null argument");
  return guarded([&] {
    auto det = sim->config.detection;
    det.adc_bits = bits;
    det.validate();
    sim->config.detection = det;
  });
}

qrngq_status qrngq_sim_set_drift(qrngq_sim* sim, double rad_per_sqrt_s) {
  QRNGQ_REQUIRE(sim, "null argument");
  QRNGQ_REQUIRE(rad_per_sqrt_s >= 0.0 && std::isfinite(rad_per_sqrt_s), "drift must be >= 0");
  sim->config.interferometer.drift_rad_per_sqrt_s = rad_per_sqrt_s;
  g_last_error.clear();
  return QRNGQ_OK;
}

qrngq_status qrngq_sim_set_threads(qrngq_sim* sim, unsigned threads) {
  QRNGQ_REQUIRE(sim, "null argument");
  sim->config.threads = threads;
  g_last_error.clear();
  return QRNGQ_OK;
}

double qrngq_sim_threshold_ma(const qrngq_sim* sim, double temperature_c) {
  if (!sim) return std::numeric_limits<double>::quiet_NaN();
  try {
    return sim->config.laser.threshold_current_ma(temperature_c);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return std::numeric_limits<double>::quiet_NaN();
  }
}

void qrngq_sim_free(qrngq_sim* sim) { delete sim; }

qrngq_status qrngq_simulate_trace(const qrngq_sim* sim, const qrngq_drive* drive, uint64_t seed,
                                  qrngq_trace** out) {
  QRNGQ_REQUIRE(sim && drive && out, "null argument");
  return guarded([&] {
    const auto trace = qrngq::simulate_pipeline_trace(to_drive(*drive), sim->config, seed);
    *out = new qrngq_trace{qrngq::to_trace_table(trace)};
  });
}

qrngq_status qrngq_simulate_cw_trace(const qrngq_sim* sim, const qrngq_drive* drive, uint64_t seed,
                                     qrngq_trace** out) {
  QRNGQ_REQUIRE(sim && drive && out, "null argument");
  return guarded([&] {
    const auto trace = qrngq::simulate_cw_trace(drive->peak_ma, drive->temperature_c, drive->rep_period_s,
                                                sim->config, seed);
    *out = new qrngq_trace{qrngq::to_trace_table(trace)};
  });
}

qrngq_status qrngq_trace_load(const char* path, qrngq_trace** out) {
  QRNGQ_REQUIRE(path && out, "null argument");
  return guarded([&] { *out = new qrngq_trace{qrngq::parse_trace_csv(qrngq::read_file(path), path)}; });
}

qrngq_status qrngq_trace_write(const qrngq_trace* t, const char* path) {
  QRNGQ_REQUIRE(t && path, "null argument");
  return guarded([&] { qrngq::write_file_atomic(path, qrngq::format_trace_csv(t->table)); });
}

double qrngq_trace_sample_rate(const qrngq_trace* t) { return t ? t->table.sample_rate : 0.0; }

size_t qrngq_trace_size(const qrngq_trace* t) {
  return t && !t->table.data.empty() ? t->table.data.front().size() : 0;
}

qrngq_status qrngq_trace_pulse_onset(const qrngq_trace* t, double rep_period_s, double* out_s) {
  QRNGQ_REQUIRE(t && out_s, "null argument");
  return guarded([&] {
    *out_s = qrngq::detect_pulse_onset(t->table.signal(), t->table.sample_rate, rep_period_s);
  });
}

void qrngq_trace_free(qrngq_trace* t) { delete t; }

void qrngq_extraction_default(qrngq_extraction* e) {
  if (!e) return;
  const qrngq::DetectionModel det;
  e->rep_period_s = qrngq::kDefaultDelay;
  e->delay_s = -1.0;
  e->offset_s = -1.0;
  e->offset_fraction = qrngq::kDefaultOffsetFraction;
  e->duty_cycle = qrngq::DriveParams{}.duty_cycle;
  e->start_s = 0.0;
  e->adc_bits = det.adc_bits;
  e->noise_abs = det.noise_abs_mw;
  e->noise_of_range = det.noise_of_range;
  e->seed = 1;
}

qrngq_status qrngq_extract(const qrngq_trace* t, const qrngq_extraction* e, qrngq_sequence** out) {
  QRNGQ_REQUIRE(t && e && out, "null argument");
  return guarded([&] {
    const auto& signal = t->table.signal();
    qrngq::ExtractionConfig cfg;
    cfg.rep_period_s = e->rep_period_s;
    cfg.start_s = e->start_s;
    cfg.delay_s = e->delay_s >= 0.0
                      ? e->delay_s
                      : qrngq::detect_pulse_onset(signal, t->table.sample_rate, e->rep_period_s, e->start_s);
    if (e->offset_s >= 0.0) {
      cfg.intra_pulse_offset_s = e->offset_s;
    } else {
      if (!(e->duty_cycle > 0.0 && e->duty_cycle < 1.0)) {
        throw qrngq::Error(qrngq::ErrorCode::kInvalidConfig, "duty cycle must be in (0, 1)");
      }
      cfg.intra_pulse_offset_s =
          e->offset_fraction * std::max(e->duty_cycle * e->rep_period_s - cfg.delay_s, 0.0);
    }
    const auto values = qrngq::extract_intensities(signal, t->table.sample_rate, cfg);
    qrngq::DetectionModel det;
    det.adc_bits = e->adc_bits;
    det.noise_abs_mw = e->noise_abs;
    det.noise_of_range = e->noise_of_range;
    *out = new qrngq_sequence{qrngq::digitize(values, det, e->seed).codes};
  });
}

qrngq_status qrngq_sweep(const qrngq_sim* sim, const qrngq_grid* grid, const qrngq_boundaries* b,
                         double offset_fraction, double offset_s, uint64_t seed, qrngq_sweep_result** out) {
  QRNGQ_REQUIRE(sim && grid && out, "null argument");
  return guarded([&] {
    qrngq::SweepGrid g;
    g.temperature_c = span_of(grid->temperature_c, grid->n_temperature);
    g.duty_cycle = span_of(grid->duty_cycle, grid->n_duty_cycle);
    g.peak_ma = span_of(grid->peak_ma, grid->n_peak);
    g.mod_depth = span_of(grid->mod_depth, grid->n_mod_depth);
    g.rep_period_s = grid->rep_period_s;
    qrngq::SweepExtraction ex;
    ex.offset_fraction = offset_fraction;
    if (offset_s >= 0.0) ex.offset_s = offset_s;
    *out = new qrngq_sweep_result{qrngq::sweep(g, sim->config, ex, to_boundaries(b), seed)};
  });
}

size_t qrngq_sweep_cell_count(const qrngq_sweep_result* s) { return s ? s->result.cells.size() : 0; }

qrngq_status qrngq_sweep_cell(const qrngq_sweep_result* s, size_t index, qrngq_cell_summary* out) {
  QRNGQ_REQUIRE(s && out, "null argument");
  QRNGQ_REQUIRE(index < s->result.cells.size(), "cell index out of range");
  const auto& cell = s->result.cells[index];
  out->drive = from_drive(cell.drive);
  out->has_error = cell.report ? 0 : 1;
  out->d_stat = cell.report ? cell.report->d_stat() : std::numeric_limits<double>::quiet_NaN();
  out->c1_db = cell.report ? cell.report->c1_db() : std::numeric_limits<double>::quiet_NaN();
  out->pass_statdist = cell.report && cell.report->pass_statdist ? 1 : 0;
  out->pass_autocorr = cell.report && cell.report->pass_autocorr ? 1 : 0;
  out->pass_overall = cell.passed() ? 1 : 0;
  g_last_error.clear();
  return QRNGQ_OK;
}

const char* qrngq_sweep_cell_error(const qrngq_sweep_result* s, size_t index) {
  if (!s || index >= s->result.cells.size()) return "";
  return s->result.cells[index].error.c_str();
}

qrngq_status qrngq_sweep_write_csv(const qrngq_sweep_result* s, const char* path) {
  QRNGQ_REQUIRE(s && path, "null argument");
  return guarded([&] { qrngq::write_file_atomic(path, qrngq::format_acceptance_csv(s->result)); });
}

void qrngq_sweep_free(qrngq_sweep_result* s) { delete s; }

}  // extern "C"
