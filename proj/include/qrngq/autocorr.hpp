#pragma once

#include <span>
#include <vector>

#include "qrngq/core.hpp"

namespace qrngq {

enum class LagIndexing {
  kCircular,   // X_{i+d} wraps to the start; always N terms
  kTruncated,  // only the N-d in-range products, still divided by N
};

struct AutocorrConfig {
  LagIndexing indexing = LagIndexing::kCircular;
  // Value reported by coeff_db for a coefficient of exactly zero.
  double db_floor = -100.0;
};

struct AutocorrProfile {
  std::vector<double> gamma;    // lags 0..D
  std::vector<double> coeff;    // C_0 = 1
  std::vector<double> coeff_db; // coeff_db[0] = 0
  int max_lag() const { return static_cast<int>(gamma.size()) - 1; }
};

double autocov(std::span<const double> x, int lag, const AutocorrConfig& config = {});
double autocov(const SampleSequence& seq, int lag, const AutocorrConfig& config = {});

double autocorr_coeff(std::span<const double> x, int lag, const AutocorrConfig& config = {});
double autocorr_coeff(const SampleSequence& seq, int lag, const AutocorrConfig& config = {});

// 10*log10|c|; db_floor for c == 0.
double coeff_db(double c, double db_floor = -100.0);

AutocorrProfile autocorr_profile(std::span<const double> x, int max_lag = 10,
                                 const AutocorrConfig& config = {});
AutocorrProfile autocorr_profile(const SampleSequence& seq, int max_lag = 10,
                                 const AutocorrConfig& config = {});

}  // namespace qrngq
