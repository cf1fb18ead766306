#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qrngq/core.hpp"
#include "qrngq/criteria.hpp"

namespace qrngq {

// Target relative-phase width between consecutive pulses: the (0.8 pi)^2
// threshold inflated by the measured system phase noise.
inline constexpr double kDefaultSigmaPhi = 0.825 * kPi;

struct PhaseDiffusionConfig {
  double sigma_phi = kDefaultSigmaPhi;  // radians
  std::size_t n_pulses = 10000;
  double visibility = 1.0;
  std::uint64_t seed = 1;
  // Std (radians per pulse) of a slow random-walk offset added to every
  // relative phase. Zero keeps pulses independent; nonzero induces lag
  // correlations.
  double drift_sigma = 0.0;

  void validate() const;
};

struct NoiseModel {
  // Additive Gaussian intensity noise, as a fraction of the ideal span.
  double sigma_noise = 0.015;
  // Characterization record of the measured CW phase noise; not used by the
  // simulation itself.
  double system_phase_noise_deg = 36.33;

  void validate() const;
};

std::vector<double> simulate_phases(const PhaseDiffusionConfig& cfg);

// I_k = (1 + V cos(phi_k)) / 2
std::vector<double> phases_to_intensities(std::span<const double> phases, double visibility);

// Places the ideal [0, 1] intensity span on the central `fraction` of the ADC
// range, adds Gaussian noise and quantizes.
SampleSequence apply_noise_and_quantize(std::span<const double> intensities, const NoiseModel& noise,
                                        double fraction, const AdcModel& adc, std::uint64_t seed);

// phases -> intensities -> noise + quantize -> fit; returns the fitted d_stat.
double simulate_fitted_distance(double sigma_phi, double noise, double fraction, std::size_t n,
                                const AdcModel& adc, std::uint64_t seed,
                                const FitConfig& fit = {});

struct CalibrationSpec {
  std::vector<double> noise_values;
  std::vector<double> fraction_values;
  std::size_t n_samples = 10000;
  int reps = 10;
  double sigma_phi = kDefaultSigmaPhi;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  FitConfig fit;

  // n x n grid spanning noise [0.43 %, 3.0 %] and fraction [50 %, 85 %].
  static CalibrationSpec default_grid(int points = 8);
};

struct CalibrationCell {
  double noise = 0.0;
  double fraction = 0.0;
  std::vector<double> d_stat;  // one per rep
  int failed_fits = 0;
  double mean = 0.0;
  double std = 0.0;
};

struct CalibrationGrid {
  CalibrationSpec spec;
  std::vector<CalibrationCell> cells;  // row-major: noise outer, fraction inner
  double mean_d_stat = 0.0;

  const CalibrationCell& cell(std::size_t noise_index, std::size_t fraction_index) const {
    return cells[noise_index * spec.fraction_values.size() + fraction_index];
  }
};

CalibrationGrid calibrate_boundary(const CalibrationSpec& spec, const AdcModel& adc = {});

struct SampleSizeRow {
  std::size_t size = 0;
  double mean = 0.0;
  double std = 0.0;
};

struct SampleSizeStudy {
  std::vector<SampleSizeRow> rows;
  // Set when reps < 2: the std column is reported as 0.
  bool degenerate_statistics = false;
};

SampleSizeStudy sample_size_study(double noise, double fraction, std::span<const std::size_t> sizes,
                                  int reps, std::uint64_t seed,
                                  double sigma_phi = kDefaultSigmaPhi, const AdcModel& adc = {},
                                  unsigned threads = 0, const FitConfig& fit = {});

}  // namespace qrngq
