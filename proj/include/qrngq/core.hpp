#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qrngq {

inline constexpr double kPi = 3.14159265358979323846;

// Linear digitizer: [range_low, range_high) is split into 2^bits equal codes.
struct AdcModel {
  int bits = 10;
  double range_low = 0.0;
  double range_high = 1.0;

  int code_count() const { return 1 << bits; }
  void validate() const;
};

// Saturates at the rails instead of failing, like a real ADC.
int quantize(double intensity, const AdcModel& adc);

// Ordered per-pulse ADC codes X_1..X_N.
class SampleSequence {
 public:
  SampleSequence() = default;
  SampleSequence(std::vector<int> codes, int code_count);

  std::span<const int> values() const { return codes_; }
  std::size_t size() const { return codes_.size(); }
  bool empty() const { return codes_.empty(); }
  int code_count() const { return code_count_; }

 private:
  std::vector<int> codes_;
  int code_count_ = 1024;
};

class IntensityHistogram {
 public:
  IntensityHistogram() = default;
  explicit IntensityHistogram(std::vector<std::uint64_t> counts);

  std::span<const std::uint64_t> counts() const { return counts_; }
  std::uint64_t total() const { return total_; }
  int bin_count() const { return static_cast<int>(counts_.size()); }

  // Lowest/highest code with a nonzero count; -1 when empty.
  int min_occupied() const;
  int max_occupied() const;
  int occupied_codes() const;

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

IntensityHistogram build_histogram(const SampleSequence& seq);

// Maps phi onto (-pi, pi].
double wrap_phase(double phi);

double dynamic_range_fraction(const IntensityHistogram& hist);

}  // namespace qrngq
