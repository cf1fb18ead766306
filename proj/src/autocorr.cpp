#include "qrngq/autocorr.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qrngq/error.hpp"

namespace qrngq {
namespace {

std::vector<double> to_double(const SampleSequence& seq) {
  return {seq.values().begin(), seq.values().end()};
}

void check_lag(std::size_t n, int lag) {
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "sequence is empty");
  if (lag < 0) throw Error(ErrorCode::kInvalidInput, "lag must be non-negative");
  if (static_cast<std::size_t>(lag) >= n) {
    throw Error(ErrorCode::kLagTooLarge,
                "lag " + std::to_string(lag) + " >= sequence length " + std::to_string(n));
  }
}

bool is_constant(std::span<const double> x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *lo == *hi;
}

double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// Products are taken on mean-centered values: sum(x_i x_{i+d})/N - mean^2
// equals sum((x_i - m)(x_{i+d} - m))/N under circular indexing.
double centered_autocov(std::span<const double> x, double mean, int lag, LagIndexing indexing) {
  const std::size_t n = x.size();
  const std::size_t d = static_cast<std::size_t>(lag);
  double acc = 0.0;
  for (std::size_t i = 0; i + d < n; ++i) acc += (x[i] - mean) * (x[i + d] - mean);
  if (indexing == LagIndexing::kCircular) {
    for (std::size_t i = n - d; i < n; ++i) acc += (x[i] - mean) * (x[i + d - n] - mean);
  }
  return acc / static_cast<double>(n);
}

}  // namespace

double autocov(std::span<const double> x, int lag, const AutocorrConfig& config) {
  check_lag(x.size(), lag);
  return centered_autocov(x, mean_of(x), lag, config.indexing);
}

double autocov(const SampleSequence& seq, int lag, const AutocorrConfig& config) {
  return autocov(to_double(seq), lag, config);
}

double autocorr_coeff(std::span<const double> x, int lag, const AutocorrConfig& config) {
  check_lag(x.size(), lag);
  const double m = mean_of(x);
  const double g0 = centered_autocov(x, m, 0, config.indexing);
  if (!(g0 > 0.0) || is_constant(x)) {
    throw Error(ErrorCode::kZeroVariance, "sequence has zero variance");
  }
  if (lag == 0) return 1.0;
  return std::clamp(centered_autocov(x, m, lag, config.indexing) / g0, -1.0, 1.0);
}

double autocorr_coeff(const SampleSequence& seq, int lag, const AutocorrConfig& config) {
  return autocorr_coeff(to_double(seq), lag, config);
}

double coeff_db(double c, double db_floor) {
  if (!(std::abs(c) <= 1.0)) {
    throw Error(ErrorCode::kInvalidCoefficient,
                "autocorrelation coefficient " + std::to_string(c) + " outside [-1, 1]");
  }
  if (c == 0.0) return db_floor;
  return std::max(10.0 * std::log10(std::abs(c)), db_floor);
}

AutocorrProfile autocorr_profile(std::span<const double> x, int max_lag,
                                 const AutocorrConfig& config) {
  if (max_lag < 0) throw Error(ErrorCode::kInvalidInput, "max_lag must be non-negative");
  check_lag(x.size(), max_lag);
  const double m = mean_of(x);
  AutocorrProfile p;
  p.gamma.reserve(static_cast<std::size_t>(max_lag) + 1);
  for (int d = 0; d <= max_lag; ++d) p.gamma.push_back(centered_autocov(x, m, d, config.indexing));
  const double g0 = p.gamma[0];
  if (!(g0 > 0.0) || is_constant(x)) {
    throw Error(ErrorCode::kZeroVariance, "sequence has zero variance");
  }
  for (int d = 0; d <= max_lag; ++d) {
    // Cauchy-Schwarz bounds |C_d| by 1; clamp the last-ulp overshoot.
    const double c = d == 0 ? 1.0 : std::clamp(p.gamma[static_cast<std::size_t>(d)] / g0, -1.0, 1.0);
    p.coeff.push_back(c);
    p.coeff_db.push_back(coeff_db(c, config.db_floor));
  }
  return p;
}

AutocorrProfile autocorr_profile(const SampleSequence& seq, int max_lag,
                                 const AutocorrConfig& config) {
  return autocorr_profile(to_double(seq), max_lag, config);
}

}  // namespace qrngq
