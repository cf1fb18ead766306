#include <algorithm>
#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "qrngq/phase_sim.hpp"

using namespace qrngq;

namespace {

// Probability of [a, b] under a Normal(0, sigma^2) wrapped onto the circle.
double wrapped_normal_mass(double a, double b, double sigma) {
  double p = 0.0;
  for (int k = -20; k <= 20; ++k) {
    const double shift = 2.0 * kPi * k;
    p += 0.5 * (std::erf((b + shift) / (sigma * std::sqrt(2.0))) - std::erf((a + shift) / (sigma * std::sqrt(2.0))));
  }
  return p;
}

}  // namespace

TEST_CASE("simulate_phases") {
  PhaseDiffusionConfig zero;
  zero.sigma_phi = 0.0;
  zero.n_pulses = 100;
  for (double p : simulate_phases(zero)) CHECK(p == 0.0);

  PhaseDiffusionConfig narrow;
  narrow.sigma_phi = 0.1;
  narrow.n_pulses = 100000;
  const auto ph = simulate_phases(narrow);
  const double mean = std::accumulate(ph.begin(), ph.end(), 0.0) / ph.size();
  double var = 0.0;
  for (double p : ph) var += (p - mean) * (p - mean);
  CHECK(std::sqrt(var / (ph.size() - 1)) == doctest::Approx(0.1).epsilon(0.02));

  PhaseDiffusionConfig bad;
  bad.sigma_phi = -1.0;
  CHECK_ERROR_CODE(simulate_phases(bad), ErrorCode::kInvalidInput);
}

TEST_CASE("wide phase diffusion is close to uniform on the circle") {
  PhaseDiffusionConfig cfg;
  cfg.n_pulses = 1000000;
  cfg.seed = 5;
  const auto ph = simulate_phases(cfg);
  const int bins = 64;
  std::vector<double> counts(bins, 0.0);
  for (double p : ph) {
    CHECK_MESSAGE((p > -kPi && p <= kPi), "phase not wrapped");
    ++counts[std::min(bins - 1, static_cast<int>((p + kPi) / (2.0 * kPi) * bins))];
  }
  double tv_empirical = 0.0, tv_oracle = 0.0;
  for (int i = 0; i < bins; ++i) {
    const double a = -kPi + 2.0 * kPi * i / bins;
    const double b = a + 2.0 * kPi / bins;
    tv_empirical += std::abs(counts[i] / ph.size() - 1.0 / bins);
    tv_oracle += std::abs(wrapped_normal_mass(a, b, cfg.sigma_phi) - 1.0 / bins);
  }
  tv_empirical *= 0.5;
  tv_oracle *= 0.5;
  // The wrapped density itself sits ~0.022 away from uniform at this width.
  CHECK(tv_oracle == doctest::Approx(0.022).epsilon(0.05));
  CHECK(std::abs(tv_empirical - tv_oracle) < 0.004);
  CHECK(tv_empirical < 0.025);
}

TEST_CASE("phases_to_intensities") {
  const std::vector<double> ph{0.0, kPi, 0.5 * kPi};
  const auto i = phases_to_intensities(ph, 1.0);
  CHECK(i[0] == doctest::Approx(1.0));
  CHECK(i[1] == doctest::Approx(0.0));
  CHECK(i[2] == doctest::Approx(0.5));
  CHECK_ERROR_CODE(phases_to_intensities(ph, 1.2), ErrorCode::kInvalidInput);
  CHECK_ERROR_CODE(phases_to_intensities(ph, -0.1), ErrorCode::kInvalidInput);
}

TEST_CASE("uniform phases produce the arcsine law") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::vector<double> ph(1000000);
  for (auto& p : ph) p = u(rng);
  auto in = phases_to_intensities(ph, 1.0);
  for (double v : in) CHECK_MESSAGE((v >= 0.0 && v <= 1.0), "intensity out of range");
  std::sort(in.begin(), in.end());
  CHECK(in[in.size() / 2] == doctest::Approx(0.5).epsilon(0.02));
  for (double x : {0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95}) {
    const double emp = static_cast<double>(std::lower_bound(in.begin(), in.end(), x) - in.begin()) / in.size();
    CHECK(std::abs(emp - 2.0 / kPi * std::asin(std::sqrt(x))) < 0.01);
  }

  for (double v : phases_to_intensities(ph, 0.6)) CHECK_MESSAGE((v >= 0.2 - 1e-12 && v <= 0.8 + 1e-12), "visibility");
}

TEST_CASE("apply_noise_and_quantize") {
  const std::vector<double> in{0.0, 0.25, 0.5, 0.999};
  NoiseModel quiet;
  quiet.sigma_noise = 0.0;
  const auto s = apply_noise_and_quantize(in, quiet, 1.0, AdcModel{}, 1);
  const std::vector<int> expected{0, 256, 512, 1022};
  CHECK(std::equal(s.values().begin(), s.values().end(), expected.begin()));

  // Half the range, centered.
  const auto h = apply_noise_and_quantize(in, quiet, 0.5, AdcModel{}, 1);
  CHECK(h.values()[0] == 256);
  CHECK(h.values()[2] == 512);

  NoiseModel noisy;
  const auto a = apply_noise_and_quantize(in, noisy, 0.7, AdcModel{}, 9);
  const auto b = apply_noise_and_quantize(in, noisy, 0.7, AdcModel{}, 9);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));

  CHECK_ERROR_CODE(apply_noise_and_quantize(in, noisy, 0.0, AdcModel{}, 1), ErrorCode::kInvalidInput);
  CHECK_ERROR_CODE(apply_noise_and_quantize(in, noisy, 1.5, AdcModel{}, 1), ErrorCode::kInvalidInput);
  NoiseModel negative;
  negative.sigma_noise = -0.1;
  CHECK_ERROR_CODE(apply_noise_and_quantize(in, negative, 0.5, AdcModel{}, 1), ErrorCode::kInvalidInput);
}

TEST_CASE("more detection noise means a larger fitted distance") {
  double low = 0.0, high = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    low += simulate_fitted_distance(kDefaultSigmaPhi, 0.005, 0.6, 10000, AdcModel{}, seed);
    high += simulate_fitted_distance(kDefaultSigmaPhi, 0.03, 0.6, 10000, AdcModel{}, seed);
  }
  CHECK(high > low);
}

TEST_CASE("calibrate_boundary") {
  CalibrationSpec empty;
  CHECK_ERROR_CODE(calibrate_boundary(empty), ErrorCode::kEmptyInput);

  CalibrationSpec floor;
  floor.noise_values = {0.0};
  floor.fraction_values = {1.0};
  floor.n_samples = 1000000;
  floor.reps = 1;
  const auto g = calibrate_boundary(floor);
  REQUIRE(g.cells.size() == 1);
  CHECK(g.mean_d_stat < 0.03);

  auto spec = CalibrationSpec::default_grid(3);
  CHECK(spec.noise_values.front() == doctest::Approx(0.0043));
  CHECK(spec.noise_values.back() == doctest::Approx(0.030));
  CHECK(spec.fraction_values.front() == doctest::Approx(0.50));
  CHECK(spec.fraction_values.back() == doctest::Approx(0.85));
  spec.reps = 3;
  spec.n_samples = 2000;
  spec.threads = 1;
  const auto serial = calibrate_boundary(spec);
  spec.threads = 4;
  const auto parallel = calibrate_boundary(spec);
  CHECK(serial.mean_d_stat == parallel.mean_d_stat);
  REQUIRE(serial.cells.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(serial.cells[i].d_stat == parallel.cells[i].d_stat);
    CHECK(serial.cells[i].d_stat.size() == 3);
  }
  double total = 0.0;
  for (const auto& c : serial.cells) total += std::accumulate(c.d_stat.begin(), c.d_stat.end(), 0.0);
  CHECK(serial.mean_d_stat == doctest::Approx(total / 27.0).epsilon(1e-12));
}

TEST_CASE("sample_size_study") {
  const std::vector<std::size_t> sizes{1000, 10000};
  const auto one = sample_size_study(0.015, 0.5, sizes, 1, 3);
  CHECK(one.degenerate_statistics);
  for (const auto& r : one.rows) CHECK(r.std == 0.0);

  const auto study = sample_size_study(0.015, 0.5, sizes, 8, 3);
  CHECK_FALSE(study.degenerate_statistics);
  REQUIRE(study.rows.size() == 2);
  CHECK(study.rows[0].size == 1000);
  CHECK(study.rows[1].mean < study.rows[0].mean);

  const std::vector<std::size_t> unsorted{1000, 100};
  CHECK_ERROR_CODE(sample_size_study(0.015, 0.5, unsorted, 2, 1), ErrorCode::kInvalidInput);
}
