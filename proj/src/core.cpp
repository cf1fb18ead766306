#include "qrngq/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qrngq/error.hpp"

namespace qrngq {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInvalidSupport: return "InvalidSupport";
    case ErrorCode::kDegenerateSupport: return "DegenerateSupport";
    case ErrorCode::kMassMismatch: return "MassMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kLagTooLarge: return "LagTooLarge";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kInvalidCoefficient: return "InvalidCoefficient";
    case ErrorCode::kNumericalDivergence: return "NumericalDivergence";
    case ErrorCode::kTraceTooShort: return "TraceTooShort";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kNoSignal: return "NoSignal";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

void AdcModel::validate() const {
  if (bits < 1 || bits > 24) {
    throw Error(ErrorCode::kInvalidInput, "ADC bits must be in [1, 24], got " + std::to_string(bits));
  }
  if (!(range_high > range_low)) {
    throw Error(ErrorCode::kInvalidInput, "ADC range_high must exceed range_low");
  }
}

int quantize(double intensity, const AdcModel& adc) {
  const int top = adc.code_count() - 1;
  if (std::isnan(intensity)) return 0;
  const double scaled =
      (intensity - adc.range_low) / (adc.range_high - adc.range_low) * adc.code_count();
  if (scaled <= 0.0) return 0;
  if (scaled >= static_cast<double>(top)) return top;
  return static_cast<int>(std::floor(scaled));
}

SampleSequence::SampleSequence(std::vector<int> codes, int code_count)
    : codes_(std::move(codes)), code_count_(code_count) {
  if (code_count_ < 1) throw Error(ErrorCode::kInvalidInput, "code_count must be positive");
  for (std::size_t i = 0; i < codes_.size(); ++i) {
    if (codes_[i] < 0 || codes_[i] >= code_count_) {
      throw Error(ErrorCode::kInvalidInput,
                  "sample " + std::to_string(i) + " has code " + std::to_string(codes_[i]) +
                      " outside [0, " + std::to_string(code_count_ - 1) + "]");
    }
  }
}

IntensityHistogram::IntensityHistogram(std::vector<std::uint64_t> counts)
    : counts_(std::move(counts)) {
  for (auto c : counts_) total_ += c;
}

int IntensityHistogram::min_occupied() const {
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] != 0) return static_cast<int>(i);
  }
  return -1;
}

int IntensityHistogram::max_occupied() const {
  for (std::size_t i = counts_.size(); i-- > 0;) {
    if (counts_[i] != 0) return static_cast<int>(i);
  }
  return -1;
}

int IntensityHistogram::occupied_codes() const {
  return static_cast<int>(std::count_if(counts_.begin(), counts_.end(),
                                        [](std::uint64_t c) { return c != 0; }));
}

IntensityHistogram build_histogram(const SampleSequence& seq) {
  if (seq.empty()) throw Error(ErrorCode::kEmptyInput, "cannot build a histogram from an empty sequence");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(seq.code_count()), 0);
  for (int code : seq.values()) ++counts[static_cast<std::size_t>(code)];
  return IntensityHistogram(std::move(counts));
}

double wrap_phase(double phi) {
  if (!std::isfinite(phi)) throw Error(ErrorCode::kInvalidInput, "phase must be finite");
  constexpr double two_pi = 2.0 * kPi;
  double r = std::remainder(phi, two_pi);  // [-pi, pi]
  if (r <= -kPi) r += two_pi;
  return r;
}

double dynamic_range_fraction(const IntensityHistogram& hist) {
  if (hist.total() == 0) throw Error(ErrorCode::kEmptyInput, "histogram is empty");
  const int span = hist.max_occupied() - hist.min_occupied() + 1;
  return static_cast<double>(span) / hist.bin_count();
}

}  // namespace qrngq
