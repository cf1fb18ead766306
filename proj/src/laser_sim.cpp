#include "qrngq/laser_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <sstream>

#include "qrngq/core.hpp"
#include "qrngq/detail/parallel.hpp"
#include "qrngq/error.hpp"

namespace qrngq {
namespace {

constexpr double kMaxStep = 1e-12;

void require(bool ok, ErrorCode code, const std::string& message) {
  if (!ok) throw Error(code, message);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

using DoubleField = double LaserParams::*;

const std::map<std::string, DoubleField>& double_fields() {
  static const std::map<std::string, DoubleField> fields{
      {"active_volume", &LaserParams::active_volume},
      {"carrier_lifetime", &LaserParams::carrier_lifetime},
      {"photon_lifetime", &LaserParams::photon_lifetime},
      {"differential_gain", &LaserParams::differential_gain},
      {"transparency_density", &LaserParams::transparency_density},
      {"confinement", &LaserParams::confinement},
      {"beta_sp", &LaserParams::beta_sp},
      {"alpha", &LaserParams::alpha},
      {"gain_compression", &LaserParams::gain_compression},
      {"wavelength", &LaserParams::wavelength},
      {"output_efficiency", &LaserParams::output_efficiency},
      {"reference_temperature_c", &LaserParams::reference_temperature_c},
      {"threshold_slope_per_k", &LaserParams::threshold_slope_per_k},
      {"drive_lowpass_hz", &LaserParams::drive_lowpass_hz},
  };
  return fields;
}

}  // namespace

void DriveParams::validate() const {
  require(duty_cycle > 0.0 && duty_cycle < 1.0, ErrorCode::kInvalidInput,
          "duty cycle must be in (0, 1)");
  require(peak_ma > 0.0 && std::isfinite(peak_ma), ErrorCode::kInvalidInput,
          "peak current must be positive");
  require(mod_depth >= 0.0 && mod_depth <= 1.0, ErrorCode::kInvalidInput,
          "modulation depth must be in [0, 1]");
  require(rep_period_s > 0.0 && std::isfinite(rep_period_s), ErrorCode::kInvalidInput,
          "repetition period must be positive");
  require(std::isfinite(temperature_c), ErrorCode::kInvalidInput, "temperature must be finite");
}

double LaserParams::threshold_density() const {
  return transparency_density + 1.0 / (confinement * differential_gain * photon_lifetime);
}

double LaserParams::injection_efficiency(double temperature_c) const {
  const double scale = 1.0 + threshold_slope_per_k * (temperature_c - reference_temperature_c);
  require(scale > 0.0, ErrorCode::kInvalidInput, "temperature outside the threshold model range");
  return 1.0 / scale;
}

double LaserParams::threshold_current_ma(double temperature_c) const {
  const double ith = kElementaryCharge * active_volume * threshold_density() / carrier_lifetime;
  return 1e3 * ith / injection_efficiency(temperature_c);
}

double LaserParams::output_mw(double photon_density) const {
  const double photon_energy = kPlanck * kSpeedOfLight / wavelength;
  const double photons = photon_density * active_volume / confinement;
  return 1e3 * output_efficiency * photon_energy * photons / photon_lifetime;
}

void LaserParams::validate() const {
  for (const auto& [key, field] : double_fields()) {
    const double v = this->*field;
    require(std::isfinite(v), ErrorCode::kInvalidInput, "laser parameter " + key + " is not finite");
  }
  require(active_volume > 0 && carrier_lifetime > 0 && photon_lifetime > 0 &&
              differential_gain > 0 && transparency_density > 0 && confinement > 0 &&
              wavelength > 0 && output_efficiency > 0,
          ErrorCode::kInvalidInput, "laser physical constants must be positive");
  require(beta_sp > 0.0 && beta_sp < 1.0, ErrorCode::kInvalidInput, "beta_sp must be in (0, 1)");
  require(confinement <= 1.0, ErrorCode::kInvalidInput, "confinement must be <= 1");
  require(alpha >= 0.0, ErrorCode::kInvalidInput, "alpha must be >= 0");
  require(gain_compression >= 0.0, ErrorCode::kInvalidInput, "gain_compression must be >= 0");
  require(drive_lowpass_hz >= 0.0, ErrorCode::kInvalidInput, "drive_lowpass_hz must be >= 0");
  require(drive_lowpass_order >= 1 && drive_lowpass_order <= 8, ErrorCode::kInvalidInput,
          "drive_lowpass_order must be in 1..8");
}

LaserParams laser_preset(const std::string& name) {
  LaserParams lp;
  lp.intensity_noise = true;
  if (name == "laser1") {
    lp.name = "laser1";
    lp.drive_lowpass_hz = 1e9;
    lp.drive_lowpass_order = 3;
  } else if (name == "laser2") {
    lp.name = "laser2";
    lp.output_efficiency *= 0.1;
  } else if (name == "laser3") {
    lp.name = "laser3";
  } else {
    throw Error(ErrorCode::kInvalidInput, "unknown laser preset '" + name + "'");
  }
  return lp;
}

LaserParams parse_laser_params(const std::string& text, const std::string& origin) {
  LaserParams lp;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto where = origin + ":" + std::to_string(line_no);
    const auto eq = body.find('=');
    require(eq != std::string::npos, ErrorCode::kParse, where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key == "name") {
      lp.name = value;
    } else if (key == "intensity_noise") {
      require(value == "true" || value == "false", ErrorCode::kParse,
              where + ": intensity_noise must be true or false");
      lp.intensity_noise = value == "true";
    } else if (key == "drive_lowpass_order") {
      int v = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      require(ec == std::errc() && ptr == value.data() + value.size(), ErrorCode::kParse,
              where + ": invalid integer '" + value + "'");
      lp.drive_lowpass_order = v;
    } else if (key == "preset") {
      lp = laser_preset(value);
    } else {
      const auto it = double_fields().find(key);
      require(it != double_fields().end(), ErrorCode::kParse, where + ": unknown key '" + key + "'");
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      require(ec == std::errc() && ptr == value.data() + value.size(), ErrorCode::kParse,
              where + ": invalid number '" + value + "'");
      lp.*(it->second) = v;
    }
  }
  lp.validate();
  return lp;
}

LaserParams load_laser_params(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open laser parameter file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_laser_params(buffer.str(), path);
}

std::string format_laser_params(const LaserParams& lp) {
  std::string out = "name = " + lp.name + "\n";
  char buf[64];
  for (const auto& [key, field] : double_fields()) {
    std::snprintf(buf, sizeof buf, "%.17g", lp.*field);
    out += key + " = " + buf + "\n";
  }
  out += "drive_lowpass_order = " + std::to_string(lp.drive_lowpass_order) + "\n";
  out += std::string("intensity_noise = ") + (lp.intensity_noise ? "true" : "false") + "\n";
  return out;
}

std::vector<double> make_drive(const DriveParams& p, double sample_rate, std::size_t periods) {
  p.validate();
  require(sample_rate > 0.0, ErrorCode::kInvalidInput, "sample rate must be positive");
  require(p.rep_period_s * sample_rate >= 20.0, ErrorCode::kInvalidInput,
          "sample rate resolves fewer than 20 samples per period");
  const auto samples = static_cast<std::size_t>(
      std::llround(static_cast<double>(periods) * p.rep_period_s * sample_rate));
  const double per_sample = 1.0 / (p.rep_period_s * sample_rate);  // periods per sample
  const double on = p.peak_ma;
  const double off = p.off_level_ma();
  std::vector<double> drive(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double pos = static_cast<double>(i) * per_sample;
    const double frac = pos - std::floor(pos);
    drive[i] = frac < p.duty_cycle - 1e-12 ? on : off;
  }
  return drive;
}

std::vector<double> make_constant_drive(double current_ma, double sample_rate, std::size_t samples) {
  require(sample_rate > 0.0, ErrorCode::kInvalidInput, "sample rate must be positive");
  require(std::isfinite(current_ma), ErrorCode::kInvalidInput, "current must be finite");
  return std::vector<double>(samples, current_ma);
}

std::vector<double> lowpass(std::span<const double> trace, double sample_rate, double cutoff_hz) {
  require(cutoff_hz > 0.0, ErrorCode::kInvalidInput, "lowpass cutoff must be positive");
  require(sample_rate > 0.0, ErrorCode::kInvalidInput, "sample rate must be positive");
  std::vector<double> out(trace.size());
  if (trace.empty()) return out;
  // Impulse-invariant first-order section: unity DC gain.
  const double a = 1.0 - std::exp(-2.0 * kPi * cutoff_hz / sample_rate);
  double y = trace[0];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    y += a * (trace[i] - y);
    out[i] = y;
  }
  return out;
}

std::vector<double> filter_drive(const LaserParams& lp, std::span<const double> drive_ma,
                                 double sample_rate) {
  lp.validate();
  std::vector<double> out(drive_ma.begin(), drive_ma.end());
  if (lp.drive_lowpass_hz <= 0.0) return out;
  for (int k = 0; k < lp.drive_lowpass_order; ++k) out = lowpass(out, sample_rate, lp.drive_lowpass_hz);
  return out;
}

PulseTrace integrate_rate_equations(const LaserParams& lp, std::span<const double> drive_ma,
                                    double sample_rate, const IntegratorConfig& config) {
  lp.validate();
  require(sample_rate > 0.0, ErrorCode::kInvalidInput, "sample rate must be positive");
  require(config.dt > 0.0 && config.dt <= kMaxStep, ErrorCode::kInvalidInput,
          "integration step must be in (0, 1 ps]");
  const auto substeps =
      static_cast<std::size_t>(std::ceil(1.0 / (sample_rate * config.dt) - 1e-9));
  const double h = 1.0 / (sample_rate * static_cast<double>(substeps));

  const double tau_n = lp.carrier_lifetime;
  const double inv_tau_p = 1.0 / lp.photon_lifetime;
  const double g0 = lp.differential_gain;
  const double n_tr = lp.transparency_density;
  const double gamma = lp.confinement;
  const double beta = lp.beta_sp;
  const double half_alpha = 0.5 * lp.alpha;
  const double eps = lp.gain_compression;
  const double inv_tau_n = 1.0 / tau_n;
  const double pump_per_ma =
      1e-3 * lp.injection_efficiency(config.temperature_c) / (kElementaryCharge * lp.active_volume);
  const double floor_per_n = beta / tau_n * lp.photon_lifetime * 1e-3;
  const double floor_abs = floor_per_n * 1e-3 * n_tr;
  const bool s_noise = lp.intensity_noise && config.allow_intensity_noise;

  auto rng = detail::make_rng(config.seed, {0x1a5e7});
  boost::random::normal_distribution<double> gauss(0.0, 1.0);

  PulseTrace trace;
  trace.sample_rate = sample_rate;
  trace.mw_per_density = lp.output_mw(1.0);
  trace.drive_ma.assign(drive_ma.begin(), drive_ma.end());
  trace.photon_density.resize(drive_ma.size());
  trace.phase_rad.resize(drive_ma.size());

  // Start from the sub-threshold equilibrium of the first drive sample.
  const double n_th = lp.threshold_density();
  double n = drive_ma.empty() ? 0.0 : std::clamp(drive_ma[0] * pump_per_ma * tau_n, 0.0, n_th);
  double s = std::max(gamma * beta * n / tau_n * lp.photon_lifetime, floor_abs);
  double phase = 0.0;

  for (std::size_t i = 0; i < drive_ma.size(); ++i) {
    const double pump = drive_ma[i] * pump_per_ma;
    double chirp = 0.0;
    double phase_var = 0.0;
    for (std::size_t k = 0; k < substeps; ++k) {
      const double gain = g0 * (n - n_tr) / (1.0 + eps * s);
      const double net = gamma * gain - inv_tau_p;
      const double rsp = gamma * beta * n * inv_tau_n;
      const double dn = (pump - n * inv_tau_n - gain * s) * h;
      double ds = (net * s + rsp) * h;
      if (s_noise) ds += std::sqrt(2.0 * rsp * s * h) * gauss(rng);
      chirp += half_alpha * net * h;
      phase_var += rsp * h / (2.0 * s);
      n = std::max(n + dn, 0.0);
      s = std::max(s + ds, std::max(floor_per_n * n, floor_abs));
    }
    if (!std::isfinite(n) || !std::isfinite(s) || !std::isfinite(phase_var)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "rate equations diverged at t = %.6g s",
                    static_cast<double>(i) / sample_rate);
      throw Error(ErrorCode::kNumericalDivergence, buf);
    }
    phase += chirp;
    if (config.phase_noise) phase += std::sqrt(phase_var) * gauss(rng);
    trace.photon_density[i] = s;
    trace.phase_rad[i] = phase;
  }
  return trace;
}

void InterferometerParams::validate() const {
  require(delay_s > 0.0 && std::isfinite(delay_s), ErrorCode::kInvalidInput,
          "interferometer delay must be positive");
  require(split_first > 0.0 && split_first < 1.0 && split_second > 0.0 && split_second < 1.0,
          ErrorCode::kInvalidInput, "split ratios must be in (0, 1)");
  require(drift_rad_per_sqrt_s >= 0.0, ErrorCode::kInvalidInput, "drift must be >= 0");
}

AmziPorts amzi_interfere_ports(const PulseTrace& trace, const InterferometerParams& ip) {
  ip.validate();
  require(trace.sample_rate > 0.0, ErrorCode::kInvalidInput, "trace sample rate must be positive");
  const auto shift = static_cast<std::size_t>(std::llround(ip.delay_s * trace.sample_rate));
  require(shift >= 1 && trace.size() > shift, ErrorCode::kTraceTooShort,
          "trace is not longer than the interferometer delay");

  // Output port: c1 E(t) + c2 E(t - delay); complementary: c3 E(t) - c4 E(t - delay).
  const double r1 = ip.split_first;
  const double r2 = ip.split_second;
  const double c1 = std::sqrt(r1 * r2);
  const double c2 = std::sqrt((1.0 - r1) * (1.0 - r2));
  const double c3 = std::sqrt(r1 * (1.0 - r2));
  const double c4 = std::sqrt((1.0 - r1) * r2);

  auto rng = detail::make_rng(ip.drift_seed, {0xd21f7});
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double drift_step = ip.drift_rad_per_sqrt_s / std::sqrt(trace.sample_rate);
  double bias = ip.bias_phase;

  AmziPorts out;
  out.primary.resize(trace.size());
  out.complementary.resize(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const std::complex<double> direct = std::polar(std::sqrt(trace.power_mw(i)), trace.phase_rad[i]);
    std::complex<double> delayed{0.0, 0.0};
    if (i >= shift) {
      delayed = std::polar(std::sqrt(trace.power_mw(i - shift)), trace.phase_rad[i - shift] + bias);
    }
    out.primary[i] = std::norm(c1 * direct + c2 * delayed);
    out.complementary[i] = std::norm(c3 * direct - c4 * delayed);
    if (drift_step > 0.0) bias += drift_step * gauss(rng);
  }
  return out;
}

std::vector<double> amzi_interfere(const PulseTrace& trace, const InterferometerParams& ip) {
  return amzi_interfere_ports(trace, ip).primary;
}

std::vector<double> cw_intensity_to_phase(std::span<const double> intensities, double i_min,
                                          double i_max) {
  require(i_min < i_max, ErrorCode::kInvalidInput, "cw_intensity_to_phase requires i_min < i_max");
  std::vector<double> out;
  out.reserve(intensities.size());
  for (double v : intensities) {
    const double x = std::clamp(2.0 * (v - i_min) / (i_max - i_min) - 1.0, -1.0, 1.0);
    out.push_back(std::acos(x));
  }
  return out;
}

}  // namespace qrngq
