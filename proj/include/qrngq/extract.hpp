#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qrngq/core.hpp"

namespace qrngq {

struct ExtractionConfig {
  double rep_period_s = 0.0;
  double delay_s = 0.0;               // electrical -> optical
  double intra_pulse_offset_s = 0.0;  // from optical pulse start to the sampling instant
  double start_s = 0.0;               // time of the first electrical period

  void validate() const;
};

// Default sampling instant: 80 % of the on-time, past the relaxation
// oscillations of well-formed pulses.
inline constexpr double kDefaultOffsetFraction = 0.8;

// One nearest-sample value per period at
// t_k = start + k * rep_period + delay + intra_pulse_offset.
std::vector<double> extract_intensities(std::span<const double> trace, double sample_rate,
                                        const ExtractionConfig& cfg);

SampleSequence extract_codes(std::span<const double> trace, double sample_rate,
                             const ExtractionConfig& cfg, const AdcModel& adc);

// Shift (in samples, within one period) maximizing the sliding inner product
// of the mean-removed traces.
std::size_t detect_delay_samples(std::span<const double> electrical, std::span<const double> optical,
                                 double sample_rate, double rep_period_s);
double detect_delay(std::span<const double> electrical, std::span<const double> optical,
                    double sample_rate, double rep_period_s);

// Time from the electrical period start to the first point where the
// period-averaged optical profile reaches threshold_fraction of its peak.
// Unlike the inner product, this does not saturate when the optical pulse is
// shorter than the electrical one.
double detect_pulse_onset(std::span<const double> optical, double sample_rate, double rep_period_s,
                          double start_s = 0.0, double threshold_fraction = 0.5);

// Oscilloscope front end for simulated data: the vertical range is picked from
// a 1-1.6-2.5-4-6.3 ladder so the signal fills at most max_fraction of it,
// Gaussian noise is added and the result is quantized.
struct DetectionModel {
  int adc_bits = 10;
  double noise_abs_mw = 0.01;       // detector noise, independent of the range
  double noise_of_range = 0.004;    // front-end noise as a fraction of full scale
  double max_fraction = 0.85;
  double min_full_scale_mw = 0.1;

  void validate() const;
};

struct Digitized {
  SampleSequence codes;
  AdcModel adc;
  double full_scale_mw = 0.0;
  double noise_mw = 0.0;
};

Digitized digitize(std::span<const double> intensities_mw, const DetectionModel& model,
                   std::uint64_t seed);

}  // namespace qrngq
