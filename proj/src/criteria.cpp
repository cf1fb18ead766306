#include "qrngq/criteria.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qrngq/error.hpp"

namespace qrngq {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double arcsine_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 2.0 / kPi * std::asin(std::sqrt(x));
}

// Unnormalized weights for the bins that carry mass under support (lo, hi).
// Writes weights for bins [first, first + out.size()) and returns their sum.
struct SupportRange {
  int first = 0;
  int last = -1;  // inclusive; last < first means no bin
};

SupportRange support_range(double lo, double hi, int bin_count, CountsMethod method) {
  SupportRange r;
  if (method == CountsMethod::kBinCenter) {
    // centers c_i = i + 0.5 strictly inside (lo, hi)
    r.first = static_cast<int>(std::floor(lo - 0.5)) + 1;
    r.last = static_cast<int>(std::ceil(hi - 0.5)) - 1;
  } else {
    r.first = static_cast<int>(std::floor(lo));
    r.last = static_cast<int>(std::ceil(hi)) - 1;
  }
  r.first = std::max(r.first, 0);
  r.last = std::min(r.last, bin_count - 1);
  return r;
}

double support_weights(double lo, double hi, SupportRange r, CountsMethod method,
                       std::span<double> out) {
  const double width = hi - lo;
  double sum = 0.0;
  for (int i = r.first; i <= r.last; ++i) {
    double w;
    if (method == CountsMethod::kBinCenter) {
      const double x = (i + 0.5 - lo) / width;
      w = 1.0 / (kPi * std::sqrt(x * (1.0 - x)));
    } else {
      w = arcsine_cdf((i + 1.0 - lo) / width) - arcsine_cdf((i - lo) / width);
    }
    out[static_cast<std::size_t>(i - r.first)] = w;
    sum += w;
  }
  return sum;
}

// Distance to the arcsine with support (lo, hi), evaluated without building
// a full model. Infeasible supports evaluate to +inf.
class DistanceObjective {
 public:
  DistanceObjective(const IntensityHistogram& hist, CountsMethod method)
      : method_(method),
        bins_(hist.bin_count()),
        total_(static_cast<double>(hist.total())),
        counts_(hist.counts().begin(), hist.counts().end()),
        prefix_(counts_.size() + 1, 0.0),
        scratch_(counts_.size(), 0.0) {
    for (std::size_t i = 0; i < counts_.size(); ++i) prefix_[i + 1] = prefix_[i] + counts_[i];
  }

  double operator()(double lo, double hi) {
    ++evaluations_;
    if (!(hi > lo)) return kInf;
    const SupportRange r = support_range(lo, hi, bins_, method_);
    if (r.last < r.first) return kInf;
    const double sum = support_weights(lo, hi, r, method_, scratch_);
    if (!(sum > 0.0) || !std::isfinite(sum)) return kInf;
    const double scale = total_ / sum;
    double l1 = 0.0;
    for (int i = r.first; i <= r.last; ++i) {
      l1 += std::abs(scale * scratch_[static_cast<std::size_t>(i - r.first)] -
                     counts_[static_cast<std::size_t>(i)]);
    }
    const double inside = prefix_[static_cast<std::size_t>(r.last) + 1] -
                          prefix_[static_cast<std::size_t>(r.first)];
    l1 += total_ - inside;
    return l1 / (2.0 * total_);
  }

  int evaluations() const { return evaluations_; }

 private:
  CountsMethod method_;
  int bins_;
  double total_;
  std::vector<double> counts_;
  std::vector<double> prefix_;
  std::vector<double> scratch_;
  int evaluations_ = 0;
};

struct Candidate {
  double lo;
  double hi;
  double value;
};

}  // namespace

ArcsineModel arcsine_expected_counts(double lo, double hi, double mass, int bin_count,
                                     CountsMethod method) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::kInvalidSupport, "arcsine support requires lo < hi");
  }
  if (!(mass > 0.0)) throw Error(ErrorCode::kInvalidInput, "arcsine mass must be positive");
  if (bin_count < 1) throw Error(ErrorCode::kInvalidInput, "bin_count must be positive");

  ArcsineModel model{lo, hi, mass, std::vector<double>(static_cast<std::size_t>(bin_count), 0.0)};
  const SupportRange r = support_range(lo, hi, bin_count, method);
  if (r.last < r.first) {
    throw Error(ErrorCode::kDegenerateSupport, "no ADC bin lies inside the arcsine support");
  }
  std::span<double> out(model.expected.data() + r.first,
                        static_cast<std::size_t>(r.last - r.first + 1));
  const double sum = support_weights(lo, hi, r, method, out);
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw Error(ErrorCode::kDegenerateSupport, "arcsine support carries no finite mass");
  }
  for (double& a : out) a = mass * a / sum;
  return model;
}

ArcsineModel arcsine_expected_counts(double lo, double hi, double mass, const AdcModel& adc,
                                     CountsMethod method) {
  return arcsine_expected_counts(lo, hi, mass, adc.code_count(), method);
}

double stat_distance(const IntensityHistogram& hist, const ArcsineModel& model) {
  if (static_cast<int>(model.expected.size()) != hist.bin_count()) {
    throw Error(ErrorCode::kShapeMismatch,
                "histogram has " + std::to_string(hist.bin_count()) + " bins, model has " +
                    std::to_string(model.expected.size()));
  }
  const double n = static_cast<double>(hist.total());
  if (n <= 0.0) throw Error(ErrorCode::kEmptyInput, "histogram is empty");
  if (std::abs(model.mass - n) > 1e-6 * n) {
    throw Error(ErrorCode::kMassMismatch, "model mass " + std::to_string(model.mass) +
                                              " differs from histogram total " +
                                              std::to_string(hist.total()));
  }
  const auto counts = hist.counts();
  double l1 = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    l1 += std::abs(model.expected[i] - static_cast<double>(counts[i]));
  }
  return l1 / (2.0 * n);
}

FitResult fit_arcsine(const IntensityHistogram& hist, const FitConfig& config) {
  FitResult result;
  if (hist.total() < std::max<std::uint64_t>(config.min_samples, 1)) {
    result.failure_reason = "too few samples (" + std::to_string(hist.total()) + ")";
    return result;
  }
  if (hist.occupied_codes() < config.min_occupied_codes) {
    result.failure_reason = "degenerate histogram (" + std::to_string(hist.occupied_codes()) +
                            " occupied codes)";
    return result;
  }

  const int bins = hist.bin_count();
  const double bound_lo = -0.5 * bins;
  const double bound_hi = 1.5 * bins;
  DistanceObjective objective(hist, config.method);
  auto eval = [&](double lo, double hi) {
    if (lo < bound_lo || hi > bound_hi) return kInf;
    return objective(lo, hi);
  };

  const double lo0 = hist.min_occupied();
  const double hi0 = hist.max_occupied() + 1.0;
  const double width0 = hi0 - lo0;

  std::vector<Candidate> starts;
  const int g = std::max(config.grid_points, 1);
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < g; ++b) {
      const double da = g == 1 ? 0.0 : config.start_spread * (2.0 * a / (g - 1) - 1.0);
      const double db = g == 1 ? 0.0 : config.start_spread * (2.0 * b / (g - 1) - 1.0);
      const double lo = lo0 + da * width0;
      const double hi = hi0 + db * width0;
      starts.push_back({lo, hi, eval(lo, hi)});
    }
  }
  std::sort(starts.begin(), starts.end(),
            [](const Candidate& x, const Candidate& y) { return x.value < y.value; });

  constexpr std::array<std::array<double, 2>, 8> kDirections{{
      {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {-1, 1}, {1, -1}}};

  Candidate best{lo0, hi0, kInf};
  bool capped = false;
  const int refine = std::min<int>(config.refine_starts, static_cast<int>(starts.size()));
  for (int s = 0; s < refine && !capped; ++s) {
    Candidate cur = starts[static_cast<std::size_t>(s)];
    if (!std::isfinite(cur.value)) continue;
    double step = std::max(1.0, 0.02 * width0);
    while (step >= config.step_tolerance) {
      if (objective.evaluations() >= config.max_evaluations) {
        capped = true;
        break;
      }
      bool improved = false;
      for (const auto& d : kDirections) {
        const double lo = cur.lo + d[0] * step;
        const double hi = cur.hi + d[1] * step;
        const double v = eval(lo, hi);
        if (v < cur.value) {
          cur = {lo, hi, v};
          improved = true;
          break;
        }
      }
      if (!improved) step *= 0.5;
    }
    if (cur.value < best.value) best = cur;
  }

  result.evaluations = objective.evaluations();
  if (std::isfinite(best.value)) {
    result.model = arcsine_expected_counts(best.lo, best.hi, static_cast<double>(hist.total()),
                                           bins, config.method);
  }
  if (capped) {
    result.failure_reason = "evaluation cap reached";
  } else if (!std::isfinite(best.value)) {
    result.failure_reason = "no feasible support found";
  } else if (best.value > config.failure_threshold) {
    result.failure_reason = "best distance " + std::to_string(best.value) + " above threshold";
  } else {
    result.converged = true;
    result.d_stat = stat_distance(hist, result.model);
  }
  return result;
}

double min_entropy(const IntensityHistogram& hist) {
  if (hist.total() == 0) throw Error(ErrorCode::kEmptyInput, "histogram is empty");
  const auto counts = hist.counts();
  const auto peak = *std::max_element(counts.begin(), counts.end());
  return -std::log2(static_cast<double>(peak) / static_cast<double>(hist.total()));
}

}  // namespace qrngq
