#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qrngq/core.hpp"

namespace qrngq {

// How the ideal arcsine is discretized onto ADC bins. Bin i covers [i, i+1)
// in code units.
enum class CountsMethod {
  kBinCenter,      // density at bin centers, renormalized
  kCdfDifference,  // exact probability mass per bin, renormalized
};

struct ArcsineModel {
  double lo = 0.0;
  double hi = 0.0;
  double mass = 0.0;
  std::vector<double> expected;  // a_0..a_{B-1}
};

ArcsineModel arcsine_expected_counts(double lo, double hi, double mass, int bin_count,
                                     CountsMethod method = CountsMethod::kBinCenter);
ArcsineModel arcsine_expected_counts(double lo, double hi, double mass, const AdcModel& adc,
                                     CountsMethod method = CountsMethod::kBinCenter);

// Half the L1 distance between observed and expected counts, divided by N_I.
double stat_distance(const IntensityHistogram& hist, const ArcsineModel& model);

struct FitConfig {
  std::uint64_t min_samples = 100;
  // Fewer occupied codes than this is treated as a degenerate histogram.
  int min_occupied_codes = 3;
  // A best distance above this counts as a failed fit.
  double failure_threshold = 0.9;
  int max_evaluations = 20000;
  // Multi-start grid: grid_points x grid_points edge offsets spanning
  // +-start_spread of the occupied range.
  int grid_points = 5;
  double start_spread = 0.10;
  int refine_starts = 3;
  // Pattern search stops once its step (code units) drops below this.
  double step_tolerance = 1e-3;
  CountsMethod method = CountsMethod::kBinCenter;
};

struct FitResult {
  ArcsineModel model;
  double d_stat = 1.0;
  bool converged = false;
  int evaluations = 0;
  std::string failure_reason;  // empty when converged
};

FitResult fit_arcsine(const IntensityHistogram& hist, const FitConfig& config = {});

double min_entropy(const IntensityHistogram& hist);

}  // namespace qrngq
