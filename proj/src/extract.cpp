#include "qrngq/extract.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "qrngq/detail/parallel.hpp"
#include "qrngq/error.hpp"

namespace qrngq {
namespace {

constexpr std::size_t kDelaySearchPeriods = 64;

bool is_flat(std::span<const double> x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double scale = std::max({std::abs(*lo), std::abs(*hi), 1e-300});
  return *hi - *lo <= 1e-12 * scale;
}

double choose_full_scale(double span, const DetectionModel& model) {
  static constexpr std::array<double, 5> kMantissas{1.0, 1.6, 2.5, 4.0, 6.3};
  const double needed = std::max(span / model.max_fraction, model.min_full_scale_mw);
  double decade = std::pow(10.0, std::floor(std::log10(needed)));
  for (;;) {
    for (double m : kMantissas) {
      if (m * decade >= needed * (1.0 - 1e-12)) return m * decade;
    }
    decade *= 10.0;
  }
}

}  // namespace

void ExtractionConfig::validate() const {
  if (!(rep_period_s > 0.0) || !std::isfinite(rep_period_s)) {
    throw Error(ErrorCode::kInvalidConfig, "repetition period must be positive");
  }
  if (!(intra_pulse_offset_s >= 0.0 && intra_pulse_offset_s < rep_period_s)) {
    throw Error(ErrorCode::kInvalidConfig, "intra-pulse offset must lie in [0, rep_period)");
  }
  if (!std::isfinite(delay_s) || delay_s < 0.0 || !(start_s >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "delay and start time must be finite and >= 0");
  }
}

std::vector<double> extract_intensities(std::span<const double> trace, double sample_rate,
                                        const ExtractionConfig& cfg) {
  cfg.validate();
  if (!(sample_rate > 0.0)) throw Error(ErrorCode::kInvalidInput, "sample rate must be positive");
  const double duration = static_cast<double>(trace.size()) / sample_rate;
  if (duration - cfg.start_s < 2.0 * cfg.rep_period_s) {
    throw Error(ErrorCode::kTraceTooShort, "trace shorter than two repetition periods");
  }
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    const double t = cfg.start_s + static_cast<double>(k) * cfg.rep_period_s + cfg.delay_s +
                     cfg.intra_pulse_offset_s;
    const auto idx = static_cast<std::size_t>(std::llround(t * sample_rate));
    if (idx >= trace.size()) break;
    out.push_back(trace[idx]);
  }
  return out;
}

SampleSequence extract_codes(std::span<const double> trace, double sample_rate,
                             const ExtractionConfig& cfg, const AdcModel& adc) {
  adc.validate();
  const auto values = extract_intensities(trace, sample_rate, cfg);
  std::vector<int> codes;
  codes.reserve(values.size());
  for (double v : values) codes.push_back(quantize(v, adc));
  return SampleSequence(std::move(codes), adc.code_count());
}

std::size_t detect_delay_samples(std::span<const double> electrical, std::span<const double> optical,
                                 double sample_rate, double rep_period_s) {
  if (!(sample_rate > 0.0 && rep_period_s > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "sample rate and period must be positive");
  }
  const auto period = static_cast<std::size_t>(std::llround(rep_period_s * sample_rate));
  const std::size_t n = std::min(electrical.size(), optical.size());
  if (period < 1 || n < 2 * period) {
    throw Error(ErrorCode::kTraceTooShort, "delay detection needs at least two periods");
  }
  const std::size_t used = std::min(n, kDelaySearchPeriods * period + period);
  const auto e = electrical.first(used);
  const auto o = optical.first(used);
  if (is_flat(e) || is_flat(o)) throw Error(ErrorCode::kNoSignal, "trace has no modulation");

  double em = 0.0, om = 0.0;
  for (std::size_t i = 0; i < used; ++i) {
    em += e[i];
    om += o[i];
  }
  em /= static_cast<double>(used);
  om /= static_cast<double>(used);

  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < period; ++s) {
    double acc = 0.0;
    for (std::size_t i = 0; i + s < used; ++i) acc += (e[i] - em) * (o[i + s] - om);
    const double score = acc / static_cast<double>(used - s);
    if (score > best_score) {
      best_score = score;
      best = s;
    }
  }
  return best;
}

double detect_delay(std::span<const double> electrical, std::span<const double> optical,
                    double sample_rate, double rep_period_s) {
  return static_cast<double>(detect_delay_samples(electrical, optical, sample_rate, rep_period_s)) /
         sample_rate;
}

double detect_pulse_onset(std::span<const double> optical, double sample_rate, double rep_period_s,
                          double start_s, double threshold_fraction) {
  if (!(sample_rate > 0.0 && rep_period_s > 0.0 && start_s >= 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "sample rate and period must be positive");
  }
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "threshold fraction must be in (0, 1)");
  }
  const double per = rep_period_s * sample_rate;
  const auto width = static_cast<std::size_t>(std::floor(per));
  const double first = start_s * sample_rate;
  std::size_t periods = 0;
  while (first + static_cast<double>(periods + 1) * per <= static_cast<double>(optical.size()) &&
         periods < kDelaySearchPeriods) {
    ++periods;
  }
  if (width < 1 || periods < 2) throw Error(ErrorCode::kTraceTooShort, "onset detection needs two periods");

  std::vector<double> profile(width, 0.0);
  for (std::size_t k = 0; k < periods; ++k) {
    const auto base = static_cast<std::size_t>(std::llround(first + static_cast<double>(k) * per));
    for (std::size_t j = 0; j < width && base + j < optical.size(); ++j) profile[j] += optical[base + j];
  }
  if (is_flat(profile)) throw Error(ErrorCode::kNoSignal, "optical trace has no modulation");
  const auto [lo, hi] = std::minmax_element(profile.begin(), profile.end());
  const double level = *lo + threshold_fraction * (*hi - *lo);
  std::size_t j = 0;
  while (profile[j] < level) ++j;
  return static_cast<double>(j) / sample_rate;
}

void DetectionModel::validate() const {
  if (adc_bits < 1 || adc_bits > 24) throw Error(ErrorCode::kInvalidInput, "adc bits out of range");
  if (!(noise_abs_mw >= 0.0 && noise_of_range >= 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "detection noise must be >= 0");
  }
  if (!(max_fraction > 0.0 && max_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "max_fraction must be in (0, 1]");
  }
  if (!(min_full_scale_mw > 0.0)) throw Error(ErrorCode::kInvalidInput, "min_full_scale must be > 0");
}

Digitized digitize(std::span<const double> intensities_mw, const DetectionModel& model,
                   std::uint64_t seed) {
  model.validate();
  if (intensities_mw.empty()) throw Error(ErrorCode::kEmptyInput, "nothing to digitize");
  const auto [lo_it, hi_it] = std::minmax_element(intensities_mw.begin(), intensities_mw.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  Digitized out;
  out.full_scale_mw = choose_full_scale(hi - lo, model);
  out.noise_mw = std::hypot(model.noise_abs_mw, model.noise_of_range * out.full_scale_mw);
  const double center = 0.5 * (lo + hi);
  out.adc = AdcModel{model.adc_bits, center - 0.5 * out.full_scale_mw,
                     center + 0.5 * out.full_scale_mw};

  auto rng = detail::make_rng(seed, {0xde7ec7});
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<int> codes;
  codes.reserve(intensities_mw.size());
  for (double v : intensities_mw) codes.push_back(quantize(v + out.noise_mw * gauss(rng), out.adc));
  out.codes = SampleSequence(std::move(codes), out.adc.code_count());
  return out;
}

}  // namespace qrngq
