#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qrngq {

inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kPlanck = 6.62607015e-34;             // J s
inline constexpr double kSpeedOfLight = 2.99792458e8;         // m/s

// Period of the delay line; the default pulse repetition period matches it so
// consecutive pulses overlap exactly.
inline constexpr double kDefaultDelay = 5.0678e-9;

struct DriveParams {
  double temperature_c = 25.0;
  double duty_cycle = 0.5;   // fraction of the period at peak current
  double peak_ma = 32.0;     // I_m
  double mod_depth = 0.5;    // MD; > 0.5 reverse-biases the off phase
  double rep_period_s = kDefaultDelay;

  double bias_ma() const { return (1.0 - mod_depth) * peak_ma; }
  double amplitude_ma() const { return mod_depth * peak_ma; }
  double off_level_ma() const { return (1.0 - 2.0 * mod_depth) * peak_ma; }
  void validate() const;
};

// Single-mode rate-equation constants (SI units, densities in m^-3).
struct LaserParams {
  std::string name = "laser3";
  double active_volume = 6e-17;          // m^3
  double carrier_lifetime = 1e-9;        // s
  double photon_lifetime = 2e-12;        // s
  double differential_gain = 2.5e-12;    // v_g * dg/dN, m^3/s
  double transparency_density = 1e24;   // m^-3
  double confinement = 0.3;
  double beta_sp = 1e-5;
  double alpha = 4.0;                    // linewidth enhancement
  double gain_compression = 1.5e-23;     // epsilon in G = g0 (N - N_tr) / (1 + epsilon S), m^3
  double wavelength = 1550e-9;           // m
  double output_efficiency = 0.5;        // fraction of cavity loss reaching the fiber
  double reference_temperature_c = 25.0;
  double threshold_slope_per_k = 0.015;  // relative threshold increase per kelvin
  // First-order lowpass on the drive current (bias-T); 0 disables it.
  double drive_lowpass_hz = 0.0;
  int drive_lowpass_order = 1;  // identical first-order sections in cascade
  // Spontaneous-emission Langevin force on the photon density. Off for bare
  // parameter sets; the named presets switch it on.
  bool intensity_noise = false;

  double threshold_density() const;
  // Terminal current at threshold, including the temperature model.
  double threshold_current_ma(double temperature_c) const;
  double injection_efficiency(double temperature_c) const;
  // Fiber-coupled optical power (mW) for photon density s.
  double output_mw(double photon_density) const;
  void validate() const;
};

// Named behavioural presets: laser1 (1 GHz drive lowpass), laser2 (10x lower
// output power), laser3 (unfiltered reference device).
LaserParams laser_preset(const std::string& name);

// key = value lines; '#' starts a comment. Unknown keys are an error.
LaserParams parse_laser_params(const std::string& text, const std::string& origin = "<string>");
LaserParams load_laser_params(const std::string& path);
std::string format_laser_params(const LaserParams& lp);

struct PulseTrace {
  double sample_rate = 0.0;           // samples/s
  std::vector<double> drive_ma;
  std::vector<double> photon_density; // m^-3
  std::vector<double> phase_rad;      // unwrapped optical phase
  double mw_per_density = 0.0;        // photon density -> fiber-coupled power

  double power_mw(std::size_t i) const { return mw_per_density * photon_density[i]; }

  std::size_t size() const { return photon_density.size(); }
  double duration() const { return static_cast<double>(size()) / sample_rate; }
};

std::vector<double> make_drive(const DriveParams& p, double sample_rate, std::size_t periods);

// Continuous-wave drive at a constant current.
std::vector<double> make_constant_drive(double current_ma, double sample_rate, std::size_t samples);

std::vector<double> lowpass(std::span<const double> trace, double sample_rate, double cutoff_hz);

// The preset's drive lowpass (identity when drive_lowpass_hz is 0).
std::vector<double> filter_drive(const LaserParams& lp, std::span<const double> drive_ma,
                                 double sample_rate);

struct IntegratorConfig {
  double dt = 0.2e-12;              // s; rounded down so an integer number of steps fits a sample
  double temperature_c = 25.0;
  bool phase_noise = true;
  // Overrides LaserParams::intensity_noise when set to false.
  bool allow_intensity_noise = true;
  std::uint64_t seed = 1;
};

// Explicit stochastic Euler integration of carrier density, photon density and
// phase. The drive is held constant over each output sample.
PulseTrace integrate_rate_equations(const LaserParams& lp, std::span<const double> drive_ma,
                                    double sample_rate, const IntegratorConfig& config);

struct InterferometerParams {
  double delay_s = kDefaultDelay;
  double split_first = 0.515;   // power ratio into the short arm
  double split_second = 0.515;  // power ratio of the short arm into the output port
  double bias_phase = 0.0;      // static phase of the long arm, radians
  // Slow random-walk drift of the long-arm phase (thermal/acoustic), rad/sqrt(s).
  double drift_rad_per_sqrt_s = 0.0;
  std::uint64_t drift_seed = 1;

  void validate() const;
};

// Output port intensity |c1 E(t) + c2 E(t - delay)|^2 in mW. Samples earlier
// than the delay carry only the short arm. The delay is realized to the
// nearest sample.
std::vector<double> amzi_interfere(const PulseTrace& trace, const InterferometerParams& ip);

// Both output ports, for energy bookkeeping.
struct AmziPorts {
  std::vector<double> primary;
  std::vector<double> complementary;
};
AmziPorts amzi_interfere_ports(const PulseTrace& trace, const InterferometerParams& ip);

// Phase magnitude from a CW interference intensity: acos(2 (I - i_min)/(i_max - i_min) - 1).
std::vector<double> cw_intensity_to_phase(std::span<const double> intensities, double i_min,
                                          double i_max);

}  // namespace qrngq
