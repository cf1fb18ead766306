#ifndef QRNGQ_QRNGQ_H
#define QRNGQ_QRNGQ_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define QRNGQ_API __attribute__((visibility("default")))
#else
#define QRNGQ_API
#endif

typedef enum qrngq_status {
  QRNGQ_OK = 0,
  QRNGQ_INVALID_INPUT = 1,
  QRNGQ_EMPTY_INPUT = 2,
  QRNGQ_INVALID_SUPPORT = 3,
  QRNGQ_DEGENERATE_SUPPORT = 4,
  QRNGQ_MASS_MISMATCH = 5,
  QRNGQ_SHAPE_MISMATCH = 6,
  QRNGQ_LAG_TOO_LARGE = 7,
  QRNGQ_ZERO_VARIANCE = 8,
  QRNGQ_INVALID_COEFFICIENT = 9,
  QRNGQ_NUMERICAL_DIVERGENCE = 10,
  QRNGQ_TRACE_TOO_SHORT = 11,
  QRNGQ_INVALID_CONFIG = 12,
  QRNGQ_NO_SIGNAL = 13,
  QRNGQ_PARSE = 14,
  QRNGQ_IO = 15,
  QRNGQ_INTERNAL = 99
} qrngq_status;

/* Message of the last failed call on this thread ("" if none). */
QRNGQ_API const char* qrngq_last_error(void);
QRNGQ_API const char* qrngq_status_name(qrngq_status status);
QRNGQ_API const char* qrngq_version(void);

/* ---- sequences of ADC codes ---- */
typedef struct qrngq_sequence qrngq_sequence;

QRNGQ_API qrngq_status qrngq_sequence_create(const int* codes, size_t n, int code_count,
                                             qrngq_sequence** out);
/* One code per line or a CSV with a `code` column. */
QRNGQ_API qrngq_status qrngq_sequence_load(const char* path, int code_count, qrngq_sequence** out);
QRNGQ_API qrngq_status qrngq_sequence_write(const qrngq_sequence* seq, const char* path);
QRNGQ_API qrngq_status qrngq_sequence_write_histogram(const qrngq_sequence* seq, const char* path);
QRNGQ_API size_t qrngq_sequence_size(const qrngq_sequence* seq);
QRNGQ_API int qrngq_sequence_code_count(const qrngq_sequence* seq);
QRNGQ_API const int* qrngq_sequence_data(const qrngq_sequence* seq);
QRNGQ_API void qrngq_sequence_free(qrngq_sequence* seq);

/* ---- criteria ---- */
QRNGQ_API qrngq_status qrngq_stat_distance(const uint64_t* measured, const double* expected, size_t n,
                                           double* out);
QRNGQ_API qrngq_status qrngq_min_entropy(const qrngq_sequence* seq, double* out_bits);
QRNGQ_API qrngq_status qrngq_autocorr_coeff(const qrngq_sequence* seq, int lag, double* out);

typedef struct qrngq_boundaries {
  double d_bound;
  double c1_bound_db;
  /* Per-lag bounds for lags 2..10 (index lag - 2); NaN disables a lag. */
  double higher_lag_bound_db[9];
} qrngq_boundaries;

QRNGQ_API void qrngq_boundaries_default(qrngq_boundaries* b);
QRNGQ_API qrngq_status qrngq_derive_autocorr_boundary(const double* cw_c1_db, size_t n, double* out_db);

/* ---- qualification reports ---- */
typedef struct qrngq_report qrngq_report;

QRNGQ_API qrngq_status qrngq_qualify(const qrngq_sequence* seq, const qrngq_boundaries* b,
                                     qrngq_report** out);
QRNGQ_API double qrngq_report_d_stat(const qrngq_report* r);
QRNGQ_API int qrngq_report_converged(const qrngq_report* r);
/* lag in 1..10; QRNGQ_ZERO_VARIANCE when the coefficients are undefined. */
QRNGQ_API qrngq_status qrngq_report_c_db(const qrngq_report* r, int lag, double* out);
QRNGQ_API double qrngq_report_min_entropy(const qrngq_report* r);
QRNGQ_API int qrngq_report_pass_statdist(const qrngq_report* r);
QRNGQ_API int qrngq_report_pass_autocorr(const qrngq_report* r);
QRNGQ_API int qrngq_report_pass_overall(const qrngq_report* r);
/* Empty string unless the autocorrelation could not be evaluated. */
QRNGQ_API const char* qrngq_report_autocorr_error(const qrngq_report* r);
/* Re-evaluates the flags against new boundaries without touching the data. */
QRNGQ_API qrngq_status qrngq_report_reevaluate(qrngq_report* r, const qrngq_boundaries* b);
QRNGQ_API qrngq_status qrngq_report_write_json(const qrngq_report* r, const char* path);
QRNGQ_API qrngq_status qrngq_report_load_json(const char* path, qrngq_report** out);
QRNGQ_API void qrngq_report_free(qrngq_report* r);

/* ---- boundary calibration (phase-diffusion Monte Carlo) ---- */
typedef struct qrngq_calibration_params {
  double noise_min, noise_max;
  int noise_points;
  double fraction_min, fraction_max;
  int fraction_points;
  size_t n_samples;
  int reps;
  double sigma_phi;
  int adc_bits;
  uint64_t seed;
  unsigned threads; /* 0 = all cores */
} qrngq_calibration_params;

typedef struct qrngq_calibration qrngq_calibration;

QRNGQ_API void qrngq_calibration_params_default(qrngq_calibration_params* p);
QRNGQ_API qrngq_status qrngq_calibrate(const qrngq_calibration_params* p, qrngq_calibration** out);
QRNGQ_API double qrngq_calibration_mean(const qrngq_calibration* c);
QRNGQ_API size_t qrngq_calibration_cell_count(const qrngq_calibration* c);
QRNGQ_API qrngq_status qrngq_calibration_cell(const qrngq_calibration* c, size_t index, double* noise,
                                              double* fraction, double* mean, double* std);
/* cells_path may be NULL. */
QRNGQ_API qrngq_status qrngq_calibration_write(const qrngq_calibration* c, const char* path,
                                               const char* cells_path);
QRNGQ_API void qrngq_calibration_free(qrngq_calibration* c);

typedef struct qrngq_size_study qrngq_size_study;

QRNGQ_API qrngq_status qrngq_sample_size_study(const qrngq_calibration_params* p, double noise,
                                               double fraction, const size_t* sizes, size_t n_sizes,
                                               qrngq_size_study** out);
QRNGQ_API size_t qrngq_size_study_rows(const qrngq_size_study* s);
QRNGQ_API qrngq_status qrngq_size_study_row(const qrngq_size_study* s, size_t row, size_t* size,
                                            double* mean, double* std);
QRNGQ_API qrngq_status qrngq_size_study_write(const qrngq_size_study* s, const char* path);
QRNGQ_API void qrngq_size_study_free(qrngq_size_study* s);

/* Phase-diffusion intensities, noisy and quantized. */
QRNGQ_API qrngq_status qrngq_simulate_phase_codes(double sigma_phi, double noise, double fraction,
                                                  size_t n, int adc_bits, uint64_t seed,
                                                  qrngq_sequence** out);

/* ---- laser simulation ---- */
typedef struct qrngq_drive {
  double temperature_c;
  double duty_cycle;
  double peak_ma;
  double mod_depth;
  double rep_period_s;
} qrngq_drive;

QRNGQ_API void qrngq_drive_default(qrngq_drive* d);

/* Simulation setup: laser parameters, sampling, interferometer, detection. */
typedef struct qrngq_sim qrngq_sim;

QRNGQ_API qrngq_status qrngq_sim_create(const char* preset, qrngq_sim** out);
QRNGQ_API qrngq_status qrngq_sim_load_laser(qrngq_sim* sim, const char* path);
QRNGQ_API qrngq_status qrngq_sim_set_lowpass(qrngq_sim* sim, double cutoff_hz);
QRNGQ_API qrngq_status qrngq_sim_set_pulses(qrngq_sim* sim, size_t pulses);
QRNGQ_API qrngq_status qrngq_sim_set_sample_rate(qrngq_sim* sim, double sample_rate);
QRNGQ_API qrngq_status qrngq_sim_set_adc_bits(qrngq_sim* sim, int bits);
QRNGQ_API qrngq_status qrngq_sim_set_drift(qrngq_sim* sim, double rad_per_sqrt_s);
QRNGQ_API qrngq_status qrngq_sim_set_threads(qrngq_sim* sim, unsigned threads);
QRNGQ_API double qrngq_sim_threshold_ma(const qrngq_sim* sim, double temperature_c);
QRNGQ_API void qrngq_sim_free(qrngq_sim* sim);

/* Sampled waveform with a sample rate and named columns. */
typedef struct qrngq_trace qrngq_trace;

QRNGQ_API qrngq_status qrngq_simulate_trace(const qrngq_sim* sim, const qrngq_drive* drive, uint64_t seed,
                                            qrngq_trace** out);
/* Constant drive for sim's pulse count times drive->rep_period_s. */
QRNGQ_API qrngq_status qrngq_simulate_cw_trace(const qrngq_sim* sim, const qrngq_drive* drive,
                                               uint64_t seed, qrngq_trace** out);
QRNGQ_API qrngq_status qrngq_trace_load(const char* path, qrngq_trace** out);
QRNGQ_API qrngq_status qrngq_trace_write(const qrngq_trace* t, const char* path);
QRNGQ_API double qrngq_trace_sample_rate(const qrngq_trace* t);
QRNGQ_API size_t qrngq_trace_size(const qrngq_trace* t);
/* Start of the optical pulse within a period, from the period-averaged profile. */
QRNGQ_API qrngq_status qrngq_trace_pulse_onset(const qrngq_trace* t, double rep_period_s, double* out_s);
QRNGQ_API void qrngq_trace_free(qrngq_trace* t);

typedef struct qrngq_extraction {
  double rep_period_s;
  double delay_s;  /* negative: detect from the trace */
  double offset_s; /* negative: offset_fraction of the optical on-time */
  double offset_fraction;
  double duty_cycle; /* needed for the fractional offset */
  double start_s;
  int adc_bits;
  /* Detection noise added before quantization (0 for recorded waveforms). */
  double noise_abs;
  double noise_of_range;
  uint64_t seed;
} qrngq_extraction;

QRNGQ_API void qrngq_extraction_default(qrngq_extraction* e);
QRNGQ_API qrngq_status qrngq_extract(const qrngq_trace* t, const qrngq_extraction* e, qrngq_sequence** out);

/* ---- parameter sweeps ---- */
typedef struct qrngq_grid {
  const double* temperature_c;
  size_t n_temperature;
  const double* duty_cycle;
  size_t n_duty_cycle;
  const double* peak_ma;
  size_t n_peak;
  const double* mod_depth;
  size_t n_mod_depth;
  double rep_period_s;
} qrngq_grid;

typedef struct qrngq_cell_summary {
  qrngq_drive drive;
  double d_stat;
  double c1_db;
  int pass_statdist;
  int pass_autocorr;
  int pass_overall;
  int has_error;
} qrngq_cell_summary;

typedef struct qrngq_sweep_result qrngq_sweep_result;

/* offset_s < 0 selects offset_fraction of the optical on-time. */
QRNGQ_API qrngq_status qrngq_sweep(const qrngq_sim* sim, const qrngq_grid* grid, const qrngq_boundaries* b,
                                   double offset_fraction, double offset_s, uint64_t seed,
                                   qrngq_sweep_result** out);
QRNGQ_API size_t qrngq_sweep_cell_count(const qrngq_sweep_result* s);
QRNGQ_API qrngq_status qrngq_sweep_cell(const qrngq_sweep_result* s, size_t index, qrngq_cell_summary* out);
QRNGQ_API const char* qrngq_sweep_cell_error(const qrngq_sweep_result* s, size_t index);
QRNGQ_API qrngq_status qrngq_sweep_write_csv(const qrngq_sweep_result* s, const char* path);
QRNGQ_API void qrngq_sweep_free(qrngq_sweep_result* s);

#ifdef __cplusplus
}
#endif

#endif
