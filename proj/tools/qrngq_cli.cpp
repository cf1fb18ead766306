// qrngq: command-line front end over the C API.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qrngq/qrngq.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;
constexpr double kPi = 3.14159265358979323846;

struct CliError {
  std::string message;
};

void check(qrngq_status st, const char* what) {
  if (st != QRNGQ_OK) {
    throw CliError{std::string(what) + ": " + qrngq_status_name(st) + ": " + qrngq_last_error()};
  }
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Sequence = Handle<qrngq_sequence, qrngq_sequence_free>;
using Report = Handle<qrngq_report, qrngq_report_free>;
using Calibration = Handle<qrngq_calibration, qrngq_calibration_free>;
using SizeStudy = Handle<qrngq_size_study, qrngq_size_study_free>;
using Sim = Handle<qrngq_sim, qrngq_sim_free>;
using Trace = Handle<qrngq_trace, qrngq_trace_free>;
using SweepResult = Handle<qrngq_sweep_result, qrngq_sweep_free>;

// Accepts plain radians or a multiple of pi ("0.825pi").
double parse_angle(const std::string& text) {
  std::string s = text;
  double scale = 1.0;
  if (s.size() > 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    scale = kPi;
    s.resize(s.size() - 2);
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw CliError{"invalid angle '" + text + "'"};
  return v * scale;
}

bool looks_like_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{"cannot open " + path};
  std::string first;
  std::getline(in, first);
  return first.rfind("time_s", 0) == 0;
}

struct Common {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  int adc_bits = 10;
};

struct BoundFlags {
  double d_bound = 0.155;
  double c1_bound_db = -18.52;

  qrngq_boundaries get() const {
    qrngq_boundaries b;
    qrngq_boundaries_default(&b);
    b.d_bound = d_bound;
    b.c1_bound_db = c1_bound_db;
    return b;
  }
};

void add_bounds(CLI::App* cmd, BoundFlags& b) {
  cmd->add_option("--d-bound", b.d_bound, "statistical-distance boundary")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--c1-bound-db", b.c1_bound_db, "lag-1 autocorrelation boundary in dB");
}

struct DriveFlags {
  std::string preset = "laser3";
  std::string laser_file;
  double lowpass_hz = -1.0;
  double temperature = 25.0;
  double duty_cycle = 0.5;
  double peak_ma = 42.0;
  double mod_depth = 0.35;
  double rep_period = 5.0678e-9;
  std::size_t pulses = 10000;
  double sample_rate = 50e9;
  double drift = -1.0;
};

void add_sim_flags(CLI::App* cmd, DriveFlags& f) {
  cmd->add_option("--preset", f.preset, "laser preset")->check(CLI::IsMember({"laser1", "laser2", "laser3"}));
  cmd->add_option("--laser-file", f.laser_file, "key = value laser parameter file (overrides --preset)");
  cmd->add_option("--lowpass-hz", f.lowpass_hz, "drive lowpass cutoff, 0 disables");
  cmd->add_option("--rep-period", f.rep_period, "pulse repetition period (s)")->check(CLI::PositiveNumber);
  cmd->add_option("--n", f.pulses, "pulses per operating point")->check(CLI::Range(100, 100000000));
  cmd->add_option("--sample-rate", f.sample_rate, "simulation sample rate (samples/s)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--drift", f.drift, "interferometer phase drift (rad/sqrt(s))");
}

void configure_sim(Sim& sim, const DriveFlags& f, const Common& c) {
  check(qrngq_sim_create(f.preset.c_str(), sim.out()), "laser preset");
  if (!f.laser_file.empty()) check(qrngq_sim_load_laser(sim.get(), f.laser_file.c_str()), "laser file");
  if (f.lowpass_hz >= 0.0) check(qrngq_sim_set_lowpass(sim.get(), f.lowpass_hz), "--lowpass-hz");
  check(qrngq_sim_set_pulses(sim.get(), f.pulses), "--n");
  check(qrngq_sim_set_sample_rate(sim.get(), f.sample_rate), "--sample-rate");
  check(qrngq_sim_set_adc_bits(sim.get(), c.adc_bits), "--adc-bits");
  if (f.drift >= 0.0) check(qrngq_sim_set_drift(sim.get(), f.drift), "--drift");
  check(qrngq_sim_set_threads(sim.get(), c.threads), "--threads");
}

qrngq_drive drive_of(const DriveFlags& f) {
  qrngq_drive d;
  qrngq_drive_default(&d);
  d.temperature_c = f.temperature;
  d.duty_cycle = f.duty_cycle;
  d.peak_ma = f.peak_ma;
  d.mod_depth = f.mod_depth;
  d.rep_period_s = f.rep_period;
  return d;
}

struct ExtractFlags {
  double rep_period = 5.0678e-9;
  double duty_cycle = 0.5;
  double offset = -1.0;
  double offset_fraction = 0.8;
  double delay = -1.0;
  double start = 0.0;
  double detector_noise = -1.0;
  double range_noise = -1.0;
};

void add_extract_flags(CLI::App* cmd, ExtractFlags& f) {
  cmd->add_option("--rep-period", f.rep_period, "pulse repetition period (s)")->check(CLI::PositiveNumber);
  cmd->add_option("--duty-cycle", f.duty_cycle, "duty cycle, for the default sampling offset")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--offset", f.offset, "sampling instant after the optical pulse start (s)");
  cmd->add_option("--offset-fraction", f.offset_fraction, "sampling instant as a fraction of the optical on-time")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--delay", f.delay, "electrical-to-optical delay (s); detected when omitted");
  cmd->add_option("--start", f.start, "time of the first period in the trace (s)");
  cmd->add_option("--detector-noise", f.detector_noise, "absolute detection noise added before quantization");
  cmd->add_option("--range-noise", f.range_noise, "detection noise as a fraction of the ADC range");
}

void extract_codes(const qrngq_trace* trace, const ExtractFlags& f, const Common& c, Sequence& out) {
  qrngq_extraction e;
  qrngq_extraction_default(&e);
  e.rep_period_s = f.rep_period;
  e.duty_cycle = f.duty_cycle;
  e.offset_s = f.offset;
  e.offset_fraction = f.offset_fraction;
  e.delay_s = f.delay;
  e.start_s = f.start;
  e.adc_bits = c.adc_bits;
  if (f.detector_noise >= 0.0) e.noise_abs = f.detector_noise;
  if (f.range_noise >= 0.0) e.noise_of_range = f.range_noise;
  e.seed = c.seed;
  check(qrngq_extract(trace, &e, out.out()), "extraction");
}

void print_report(const qrngq_report* r) {
  std::printf("d_stat            %.6f%s\n", qrngq_report_d_stat(r), qrngq_report_converged(r) ? "" : " (fit failed)");
  double c1 = 0.0;
  if (qrngq_report_c_db(r, 1, &c1) == QRNGQ_OK) {
    std::printf("C1                %.3f dB\n", c1);
  } else {
    std::printf("C1                undefined (%s)\n", qrngq_report_autocorr_error(r));
  }
  std::printf("min-entropy       %.4f bits\n", qrngq_report_min_entropy(r));
  std::printf("pass_statdist     %d\n", qrngq_report_pass_statdist(r));
  std::printf("pass_autocorr     %d\n", qrngq_report_pass_autocorr(r));
  std::printf("pass_overall      %d\n", qrngq_report_pass_overall(r));
}

std::vector<std::size_t> parse_sizes(const std::vector<std::string>& items) {
  std::vector<std::size_t> sizes;
  for (const auto& s : items) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || v == 0) throw CliError{"invalid sample size '" + s + "'"};
    sizes.push_back(static_cast<std::size_t>(v));
  }
  return sizes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quality checks for phase-noise QRNG intensity data"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "seed for every random draw");
  app.add_option("--threads", common.threads, "worker threads (0 = all cores)");
  app.add_option("--adc-bits", common.adc_bits, "ADC resolution")->check(CLI::Range(1, 24));

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Monte Carlo calibration of the d_stat boundary");
  qrngq_calibration_params cp;
  qrngq_calibration_params_default(&cp);
  std::vector<double> cal_noise;
  std::vector<double> cal_fraction;
  std::string cal_sigma = "0.825pi";
  int grid_points = cp.noise_points;
  std::vector<std::string> cal_sizes;
  std::string cal_out = "calibration.csv";
  std::string cal_cells_out;
  std::string cal_sizes_out = "sample_size.csv";
  cal->add_option("--noise", cal_noise, "noise std as a fraction of the span (one value or min,max)")
      ->delimiter(',');
  cal->add_option("--fraction", cal_fraction, "ADC range fraction (one value or min,max)")->delimiter(',');
  cal->add_option("--grid-points", grid_points, "grid points per axis")->check(CLI::Range(1, 1000));
  cal->add_option("--sigma-phi", cal_sigma, "phase std per pulse, radians or e.g. 0.825pi");
  cal->add_option("--n", cp.n_samples, "samples per simulated dataset")->check(CLI::Range(100, 100000000));
  cal->add_option("--reps", cp.reps, "repetitions per cell")->check(CLI::Range(1, 100000));
  cal->add_option("--sizes", cal_sizes, "sample sizes for the convergence study")->delimiter(',');
  cal->add_option("--out", cal_out, "per-dataset calibration CSV");
  cal->add_option("--cells-out", cal_cells_out, "per-cell mean/std CSV");
  cal->add_option("--sizes-out", cal_sizes_out, "convergence CSV");

  // qualify
  auto* qual = app.add_subcommand("qualify", "Apply both criteria to an intensity or trace file");
  std::string qual_in;
  std::string qual_out;
  BoundFlags qual_bounds;
  ExtractFlags qual_ex;
  qual->add_option("--in", qual_in, "codes file or trace CSV")->required();
  qual->add_option("--out", qual_out, "JSON report");
  add_bounds(qual, qual_bounds);
  add_extract_flags(qual, qual_ex);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a laser trace or phase-diffusion codes");
  DriveFlags sim_flags;
  bool cw = false;
  bool phase_model = false;
  std::string sim_out;
  std::string sim_codes_out;
  std::string sim_sigma = "0.825pi";
  double sim_noise = 0.015;
  double sim_fraction = 0.5;
  ExtractFlags sim_ex;
  add_sim_flags(sim_cmd, sim_flags);
  sim_cmd->add_option("--temperature", sim_flags.temperature, "laser temperature (C)");
  sim_cmd->add_option("--duty-cycle", sim_flags.duty_cycle, "duty cycle")->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--peak-ma", sim_flags.peak_ma, "peak current I_m (mA)")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--mod-depth", sim_flags.mod_depth, "modulation depth")->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_flag("--cw", cw, "constant drive at --peak-ma instead of pulses");
  sim_cmd->add_flag("--phase-model", phase_model, "ideal phase-diffusion intensities instead of the laser model");
  sim_cmd->add_option("--sigma-phi", sim_sigma, "phase std per pulse for --phase-model");
  sim_cmd->add_option("--noise", sim_noise, "detection noise for --phase-model")->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--fraction", sim_fraction, "ADC range fraction for --phase-model")
      ->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--offset", sim_ex.offset, "sampling offset for --codes-out (s)");
  sim_cmd->add_option("--out", sim_out, "trace CSV (codes for --phase-model)");
  sim_cmd->add_option("--codes-out", sim_codes_out, "codes extracted at the default sampling instant");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Acceptance map over drive parameters");
  DriveFlags sweep_flags;
  std::vector<double> sw_temp{25.0};
  std::vector<double> sw_dc{1.0 / 30, 4.0 / 30, 9.0 / 30, 15.0 / 30, 21.0 / 30, 27.0 / 30};
  std::vector<double> sw_peak{10, 18, 26, 34, 42, 50};
  std::vector<double> sw_md{0.35};
  double sw_offset = -1.0;
  double sw_offset_fraction = 0.8;
  std::string sweep_out = "acceptance.csv";
  BoundFlags sweep_bounds;
  add_sim_flags(sweep_cmd, sweep_flags);
  add_bounds(sweep_cmd, sweep_bounds);
  sweep_cmd->add_option("--temperature", sw_temp, "temperatures (C)")->delimiter(',');
  sweep_cmd->add_option("--duty-cycle", sw_dc, "duty cycles")->delimiter(',');
  sweep_cmd->add_option("--peak-ma", sw_peak, "peak currents (mA)")->delimiter(',');
  sweep_cmd->add_option("--mod-depth", sw_md, "modulation depths")->delimiter(',');
  sweep_cmd->add_option("--offset", sw_offset, "sampling instant after the optical pulse start (s)");
  sweep_cmd->add_option("--offset-fraction", sw_offset_fraction, "sampling instant as a fraction of the on-time")
      ->check(CLI::Range(0.0, 1.0));
  sweep_cmd->add_option("--out", sweep_out, "acceptance-map CSV");

  // extract
  auto* ext = app.add_subcommand("extract", "Per-pulse codes from a trace CSV");
  std::string ext_in;
  std::string ext_out;
  std::string ext_hist_out;
  ExtractFlags ext_flags;
  ext->add_option("--in", ext_in, "trace CSV (time_s plus value columns)")->required();
  ext->add_option("--out", ext_out, "codes file")->required();
  ext->add_option("--histogram-out", ext_hist_out, "histogram CSV (code,count)");
  add_extract_flags(ext, ext_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitError;
  }

  try {
    if (cal->parsed()) {
      cp.sigma_phi = parse_angle(cal_sigma);
      cp.adc_bits = common.adc_bits;
      cp.seed = common.seed;
      cp.threads = common.threads;
      cp.noise_points = grid_points;
      cp.fraction_points = grid_points;
      if (!cal_noise.empty()) {
        if (cal_noise.size() > 2) throw CliError{"--noise takes one value or min,max"};
        cp.noise_min = cal_noise.front();
        cp.noise_max = cal_noise.back();
        if (cal_noise.size() == 1) cp.noise_points = 1;
      }
      if (!cal_fraction.empty()) {
        if (cal_fraction.size() > 2) throw CliError{"--fraction takes one value or min,max"};
        cp.fraction_min = cal_fraction.front();
        cp.fraction_max = cal_fraction.back();
        if (cal_fraction.size() == 1) cp.fraction_points = 1;
      }
      Calibration grid;
      check(qrngq_calibrate(&cp, grid.out()), "calibration");
      check(qrngq_calibration_write(grid.get(), cal_out.c_str(), cal_cells_out.empty() ? nullptr : cal_cells_out.c_str()),
            "writing calibration");
      double sum_sq = 0.0;
      const std::size_t cells = qrngq_calibration_cell_count(grid.get());
      const double mean = qrngq_calibration_mean(grid.get());
      for (std::size_t i = 0; i < cells; ++i) {
        double m = 0.0;
        check(qrngq_calibration_cell(grid.get(), i, nullptr, nullptr, &m, nullptr), "calibration cell");
        sum_sq += (m - mean) * (m - mean);
      }
      std::printf("cells %zu, reps %d, n %zu\n", cells, cp.reps, cp.n_samples);
      std::printf("cell-mean spread  %.4f\n", cells > 1 ? std::sqrt(sum_sq / static_cast<double>(cells - 1)) : 0.0);
      std::printf("mean d_stat = %.4f (proposed d_bound)\n", mean);

      if (!cal_sizes.empty()) {
        const auto sizes = parse_sizes(cal_sizes);
        SizeStudy study;
        check(qrngq_sample_size_study(&cp, cp.noise_min, cp.fraction_min, sizes.data(), sizes.size(), study.out()),
              "sample-size study");
        check(qrngq_size_study_write(study.get(), cal_sizes_out.c_str()), "writing sample-size study");
        for (std::size_t i = 0; i < qrngq_size_study_rows(study.get()); ++i) {
          std::size_t size = 0;
          double m = 0.0, s = 0.0;
          check(qrngq_size_study_row(study.get(), i, &size, &m, &s), "sample-size row");
          std::printf("size %zu: mean %.4f std %.4f\n", size, m, s);
        }
      }
      return kExitPass;
    }

    if (qual->parsed()) {
      Sequence seq;
      if (looks_like_trace(qual_in)) {
        Trace trace;
        check(qrngq_trace_load(qual_in.c_str(), trace.out()), "reading trace");
        extract_codes(trace.get(), qual_ex, common, seq);
      } else {
        check(qrngq_sequence_load(qual_in.c_str(), 1 << common.adc_bits, seq.out()), "reading codes");
      }
      const auto bounds = qual_bounds.get();
      Report report;
      check(qrngq_qualify(seq.get(), &bounds, report.out()), "qualify");
      if (!qual_out.empty()) check(qrngq_report_write_json(report.get(), qual_out.c_str()), "writing report");
      std::printf("samples           %zu\n", qrngq_sequence_size(seq.get()));
      print_report(report.get());
      return qrngq_report_pass_overall(report.get()) ? kExitPass : kExitFail;
    }

    if (sim_cmd->parsed()) {
      if (phase_model) {
        if (sim_out.empty()) throw CliError{"--out is required"};
        Sequence seq;
        check(qrngq_simulate_phase_codes(parse_angle(sim_sigma), sim_noise, sim_fraction, sim_flags.pulses,
                                         common.adc_bits, common.seed, seq.out()),
              "phase simulation");
        check(qrngq_sequence_write(seq.get(), sim_out.c_str()), "writing codes");
        std::printf("wrote %zu codes to %s\n", qrngq_sequence_size(seq.get()), sim_out.c_str());
        return kExitPass;
      }
      if (sim_out.empty() && sim_codes_out.empty()) throw CliError{"--out or --codes-out is required"};
      Sim sim;
      DriveFlags f = sim_flags;
      // CW data needs the interferometer to wander for its coefficients to show.
      if (cw && f.drift < 0.0) f.drift = 300.0;
      configure_sim(sim, f, common);
      const auto drive = drive_of(f);
      Trace trace;
      if (cw) {
        check(qrngq_simulate_cw_trace(sim.get(), &drive, common.seed, trace.out()), "CW simulation");
      } else {
        check(qrngq_simulate_trace(sim.get(), &drive, common.seed, trace.out()), "simulation");
      }
      if (!sim_out.empty()) check(qrngq_trace_write(trace.get(), sim_out.c_str()), "writing trace");
      std::printf("trace: %zu samples at %.6g samples/s\n", qrngq_trace_size(trace.get()),
                  qrngq_trace_sample_rate(trace.get()));
      if (!sim_codes_out.empty()) {
        ExtractFlags ex = sim_ex;
        ex.rep_period = f.rep_period;
        ex.duty_cycle = f.duty_cycle;
        if (cw) ex.delay = 0.0;
        Sequence seq;
        extract_codes(trace.get(), ex, common, seq);
        check(qrngq_sequence_write(seq.get(), sim_codes_out.c_str()), "writing codes");
        std::printf("codes: %zu written to %s\n", qrngq_sequence_size(seq.get()), sim_codes_out.c_str());
      }
      return kExitPass;
    }

    if (sweep_cmd->parsed()) {
      Sim sim;
      configure_sim(sim, sweep_flags, common);
      qrngq_grid grid{sw_temp.data(), sw_temp.size(), sw_dc.data(), sw_dc.size(),
                      sw_peak.data(), sw_peak.size(), sw_md.data(), sw_md.size(), sweep_flags.rep_period};
      const auto bounds = sweep_bounds.get();
      SweepResult result;
      check(qrngq_sweep(sim.get(), &grid, &bounds, sw_offset_fraction, sw_offset, common.seed, result.out()),
            "sweep");
      check(qrngq_sweep_write_csv(result.get(), sweep_out.c_str()), "writing acceptance map");
      std::size_t passed = 0;
      const std::size_t cells = qrngq_sweep_cell_count(result.get());
      for (std::size_t i = 0; i < cells; ++i) {
        qrngq_cell_summary c;
        check(qrngq_sweep_cell(result.get(), i, &c), "sweep cell");
        passed += static_cast<std::size_t>(c.pass_overall);
        std::printf("T=%g DC=%.4f Im=%g MD=%g  d_stat=%.4f C1=%.2f dB  %s%s\n", c.drive.temperature_c,
                    c.drive.duty_cycle, c.drive.peak_ma, c.drive.mod_depth, c.d_stat, c.c1_db,
                    c.pass_overall ? "PASS" : "fail", c.has_error ? " (error)" : "");
      }
      std::printf("%zu of %zu cells pass\n", passed, cells);
      return passed > 0 ? kExitPass : kExitFail;
    }

    if (ext->parsed()) {
      Trace trace;
      check(qrngq_trace_load(ext_in.c_str(), trace.out()), "reading trace");
      Sequence seq;
      extract_codes(trace.get(), ext_flags, common, seq);
      check(qrngq_sequence_write(seq.get(), ext_out.c_str()), "writing codes");
      if (!ext_hist_out.empty()) check(qrngq_sequence_write_histogram(seq.get(), ext_hist_out.c_str()), "writing histogram");
      std::printf("codes: %zu written to %s\n", qrngq_sequence_size(seq.get()), ext_out.c_str());
      return kExitPass;
    }
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return kExitError;
  }
  return kExitError;
}
