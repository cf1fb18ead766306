#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qrngq/qrngq.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("qrngq_capi_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(qrngq_status_name(QRNGQ_OK)) == "Ok");
  CHECK(std::string(qrngq_status_name(QRNGQ_ZERO_VARIANCE)) == "ZeroVariance");
  CHECK(std::string(qrngq_status_name(QRNGQ_IO)) == "Io");
  CHECK(std::strlen(qrngq_version()) > 0);
}

TEST_CASE("sequence lifecycle and errors") {
  const int codes[] = {1, 2, 3, 2};
  qrngq_sequence* s = nullptr;
  REQUIRE(qrngq_sequence_create(codes, 4, 4, &s) == QRNGQ_OK);
  CHECK(qrngq_sequence_size(s) == 4);
  CHECK(qrngq_sequence_code_count(s) == 4);
  CHECK(qrngq_sequence_data(s)[2] == 3);
  double h = 0.0;
  CHECK(qrngq_min_entropy(s, &h) == QRNGQ_OK);
  CHECK(h == doctest::Approx(1.0));
  double c = 0.0;
  CHECK(qrngq_autocorr_coeff(s, 4, &c) == QRNGQ_LAG_TOO_LARGE);
  CHECK(std::strlen(qrngq_last_error()) > 0);
  qrngq_sequence_free(s);

  qrngq_sequence* bad = nullptr;
  CHECK(qrngq_sequence_create(codes, 4, 2, &bad) == QRNGQ_INVALID_INPUT);
  CHECK(bad == nullptr);
  CHECK(qrngq_sequence_create(codes, 4, 4, nullptr) == QRNGQ_INVALID_INPUT);
  qrngq_sequence_free(nullptr);

  const int flat[] = {5, 5, 5, 5};
  REQUIRE(qrngq_sequence_create(flat, 4, 8, &s) == QRNGQ_OK);
  CHECK(qrngq_autocorr_coeff(s, 1, &c) == QRNGQ_ZERO_VARIANCE);
  qrngq_sequence_free(s);
}

TEST_CASE("criteria through the C API") {
  const uint64_t n[] = {1, 3};
  const double a[] = {2.0, 2.0};
  double d = -1.0;
  CHECK(qrngq_stat_distance(n, a, 2, &d) == QRNGQ_OK);
  CHECK(d == 0.25);
  const double wrong[] = {2.0, 3.0};
  CHECK(qrngq_stat_distance(n, wrong, 2, &d) == QRNGQ_MASS_MISMATCH);

  const double cw[] = {-15.52, -12.0};
  double bound = 0.0;
  CHECK(qrngq_derive_autocorr_boundary(cw, 2, &bound) == QRNGQ_OK);
  CHECK(bound == doctest::Approx(-18.53).epsilon(1e-3));
  CHECK(qrngq_derive_autocorr_boundary(cw, 0, &bound) == QRNGQ_EMPTY_INPUT);
}

TEST_CASE("qualify, reevaluate and JSON") {
  TempDir tmp;
  qrngq_sequence* s = nullptr;
  REQUIRE(qrngq_simulate_phase_codes(0.825 * M_PI, 0.005, 0.8, 10000, 10, 4, &s) == QRNGQ_OK);
  qrngq_boundaries b;
  qrngq_boundaries_default(&b);
  CHECK(b.d_bound == 0.155);
  CHECK(b.c1_bound_db == -18.52);
  CHECK(std::isnan(b.higher_lag_bound_db[0]));
  qrngq_report* r = nullptr;
  REQUIRE(qrngq_qualify(s, &b, &r) == QRNGQ_OK);
  CHECK(qrngq_report_converged(r) == 1);
  CHECK(qrngq_report_d_stat(r) < 0.155);
  CHECK(qrngq_report_pass_overall(r) == 1);
  double c1 = 0.0;
  CHECK(qrngq_report_c_db(r, 1, &c1) == QRNGQ_OK);
  CHECK(c1 < -18.52);
  CHECK(qrngq_report_c_db(r, 11, &c1) == QRNGQ_LAG_TOO_LARGE);
  CHECK(std::string(qrngq_report_autocorr_error(r)).empty());

  qrngq_boundaries strict = b;
  strict.d_bound = 0.01;
  CHECK(qrngq_report_reevaluate(r, &strict) == QRNGQ_OK);
  CHECK(qrngq_report_pass_statdist(r) == 0);
  CHECK(qrngq_report_pass_overall(r) == 0);
  CHECK(qrngq_report_reevaluate(r, &b) == QRNGQ_OK);
  CHECK(qrngq_report_pass_overall(r) == 1);
  strict = b;
  strict.d_bound = 2.0;
  CHECK(qrngq_report_reevaluate(r, &strict) == QRNGQ_INVALID_CONFIG);

  const auto path = tmp.file("report.json");
  CHECK(qrngq_report_write_json(r, path.c_str()) == QRNGQ_OK);
  qrngq_report* back = nullptr;
  REQUIRE(qrngq_report_load_json(path.c_str(), &back) == QRNGQ_OK);
  CHECK(qrngq_report_d_stat(back) == qrngq_report_d_stat(r));
  CHECK(qrngq_report_pass_overall(back) == qrngq_report_pass_overall(r));
  const auto copy = tmp.file("copy.json");
  CHECK(qrngq_report_write_json(back, copy.c_str()) == QRNGQ_OK);
  CHECK(slurp(copy) == slurp(path));
  qrngq_report_free(back);
  qrngq_report_free(r);

  const auto codes = tmp.file("codes.txt");
  CHECK(qrngq_sequence_write(s, codes.c_str()) == QRNGQ_OK);
  qrngq_sequence* loaded = nullptr;
  REQUIRE(qrngq_sequence_load(codes.c_str(), 1024, &loaded) == QRNGQ_OK);
  CHECK(qrngq_sequence_size(loaded) == 10000);
  CHECK(std::memcmp(qrngq_sequence_data(loaded), qrngq_sequence_data(s), 10000 * sizeof(int)) == 0);
  qrngq_sequence_free(loaded);
  const auto hist = tmp.file("hist.csv");
  CHECK(qrngq_sequence_write_histogram(s, hist.c_str()) == QRNGQ_OK);
  CHECK(slurp(hist).rfind("code,count\n", 0) == 0);
  qrngq_sequence_free(s);

  CHECK(qrngq_sequence_load(tmp.file("nope.txt").c_str(), 1024, &loaded) == QRNGQ_IO);
  std::ofstream(tmp.file("bad.txt")) << "1\n2\nthree\n";
  CHECK(qrngq_sequence_load(tmp.file("bad.txt").c_str(), 1024, &loaded) == QRNGQ_PARSE);
  CHECK(std::string(qrngq_last_error()).find(":3") != std::string::npos);
}

TEST_CASE("calibration and sample-size study") {
  TempDir tmp;
  qrngq_calibration_params p;
  qrngq_calibration_params_default(&p);
  CHECK(p.noise_points == 8);
  CHECK(p.reps == 10);
  p.noise_points = 2;
  p.fraction_points = 2;
  p.reps = 2;
  p.n_samples = 2000;
  qrngq_calibration* c = nullptr;
  REQUIRE(qrngq_calibrate(&p, &c) == QRNGQ_OK);
  CHECK(qrngq_calibration_cell_count(c) == 4);
  double noise = 0, fraction = 0, mean = 0, std = 0;
  CHECK(qrngq_calibration_cell(c, 3, &noise, &fraction, &mean, &std) == QRNGQ_OK);
  CHECK(noise == doctest::Approx(p.noise_max));
  CHECK(fraction == doctest::Approx(p.fraction_max));
  CHECK(qrngq_calibration_cell(c, 4, &noise, &fraction, &mean, &std) == QRNGQ_INVALID_INPUT);
  CHECK(qrngq_calibration_mean(c) > 0.0);
  CHECK(qrngq_calibration_write(c, tmp.file("cal.csv").c_str(), nullptr) == QRNGQ_OK);
  CHECK(slurp(tmp.file("cal.csv")).find("mean,,,") != std::string::npos);
  qrngq_calibration_free(c);

  p.noise_points = 0;
  CHECK(qrngq_calibrate(&p, &c) == QRNGQ_INVALID_INPUT);

  const size_t sizes[] = {500, 5000};
  qrngq_calibration_params_default(&p);
  p.reps = 4;
  qrngq_size_study* st = nullptr;
  REQUIRE(qrngq_sample_size_study(&p, 0.015, 0.5, sizes, 2, &st) == QRNGQ_OK);
  CHECK(qrngq_size_study_rows(st) == 2);
  size_t size = 0;
  CHECK(qrngq_size_study_row(st, 1, &size, &mean, &std) == QRNGQ_OK);
  CHECK(size == 5000);
  CHECK(qrngq_size_study_write(st, tmp.file("sizes.csv").c_str()) == QRNGQ_OK);
  qrngq_size_study_free(st);
}

TEST_CASE("simulation, traces, extraction and sweeps") {
  TempDir tmp;
  qrngq_sim* sim = nullptr;
  CHECK(qrngq_sim_create("laser7", &sim) == QRNGQ_INVALID_INPUT);
  REQUIRE(qrngq_sim_create("laser3", &sim) == QRNGQ_OK);
  CHECK(qrngq_sim_threshold_ma(sim, 25.0) == doctest::Approx(16.02).epsilon(0.01));
  CHECK(qrngq_sim_set_pulses(sim, 10) == QRNGQ_INVALID_INPUT);
  CHECK(qrngq_sim_set_pulses(sim, 300) == QRNGQ_OK);
  CHECK(qrngq_sim_set_adc_bits(sim, 0) == QRNGQ_INVALID_INPUT);
  CHECK(qrngq_sim_set_sample_rate(sim, -1.0) == QRNGQ_INVALID_INPUT);
  CHECK(qrngq_sim_set_lowpass(sim, -5.0) == QRNGQ_INVALID_INPUT);

  qrngq_drive d;
  qrngq_drive_default(&d);
  d.peak_ma = 44.0;
  d.mod_depth = 0.35;
  qrngq_trace* t = nullptr;
  REQUIRE(qrngq_simulate_trace(sim, &d, 3, &t) == QRNGQ_OK);
  CHECK(qrngq_trace_sample_rate(t) == 50e9);
  CHECK(qrngq_trace_size(t) > 300 * 250);
  double onset = 0.0;
  CHECK(qrngq_trace_pulse_onset(t, d.rep_period_s, &onset) == QRNGQ_OK);
  CHECK(onset > 0.0);
  CHECK(onset < d.duty_cycle * d.rep_period_s);

  qrngq_extraction e;
  qrngq_extraction_default(&e);
  e.duty_cycle = d.duty_cycle;
  qrngq_sequence* codes = nullptr;
  REQUIRE(qrngq_extract(t, &e, &codes) == QRNGQ_OK);
  CHECK(qrngq_sequence_size(codes) >= 300);
  qrngq_sequence_free(codes);
  e.offset_s = d.rep_period_s * 2.0;
  CHECK(qrngq_extract(t, &e, &codes) == QRNGQ_INVALID_CONFIG);

  const auto path = tmp.file("trace.csv");
  CHECK(qrngq_trace_write(t, path.c_str()) == QRNGQ_OK);
  qrngq_trace* back = nullptr;
  REQUIRE(qrngq_trace_load(path.c_str(), &back) == QRNGQ_OK);
  CHECK(qrngq_trace_size(back) == qrngq_trace_size(t));
  CHECK(qrngq_trace_sample_rate(back) == doctest::Approx(50e9).epsilon(1e-9));
  qrngq_trace_free(back);
  qrngq_trace_free(t);

  const double peaks[] = {10.0, 44.0};
  const double dcs[] = {0.5};
  const double mds[] = {0.35};
  const double temps[] = {25.0};
  qrngq_grid g{temps, 1, dcs, 1, peaks, 2, mds, 1, d.rep_period_s};
  qrngq_boundaries b;
  qrngq_boundaries_default(&b);
  qrngq_sweep_result* res = nullptr;
  REQUIRE(qrngq_sweep(sim, &g, &b, 0.8, -1.0, 9, &res) == QRNGQ_OK);
  CHECK(qrngq_sweep_cell_count(res) == 2);
  qrngq_cell_summary cs;
  CHECK(qrngq_sweep_cell(res, 1, &cs) == QRNGQ_OK);
  CHECK(cs.drive.peak_ma == 44.0);
  CHECK(cs.has_error == 0);
  CHECK(qrngq_sweep_cell(res, 2, &cs) == QRNGQ_INVALID_INPUT);
  CHECK(qrngq_sweep_write_csv(res, tmp.file("map.csv").c_str()) == QRNGQ_OK);
  CHECK(slurp(tmp.file("map.csv")).rfind("peak_ma,duty_cycle,d_stat", 0) == 0);
  qrngq_sweep_free(res);

  qrngq_grid empty{temps, 1, dcs, 1, peaks, 0, mds, 1, d.rep_period_s};
  CHECK(qrngq_sweep(sim, &empty, &b, 0.8, -1.0, 9, &res) == QRNGQ_EMPTY_INPUT);

  REQUIRE(qrngq_simulate_cw_trace(sim, &d, 3, &t) == QRNGQ_OK);
  qrngq_trace_free(t);
  qrngq_sim_free(sim);
}
