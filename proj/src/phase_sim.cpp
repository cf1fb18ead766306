#include "qrngq/phase_sim.hpp"

#include <cmath>
#include <random>
#include <string>

#include "qrngq/detail/parallel.hpp"
#include "qrngq/error.hpp"

namespace qrngq {
namespace {

// Stream tags keep the phase and noise draws of one pipeline independent.
constexpr std::uint64_t kPhaseStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

void PhaseDiffusionConfig::validate() const {
  if (!(sigma_phi >= 0.0) || !std::isfinite(sigma_phi)) {
    throw Error(ErrorCode::kInvalidInput, "sigma_phi must be finite and >= 0");
  }
  if (n_pulses < 1) throw Error(ErrorCode::kInvalidInput, "n_pulses must be >= 1");
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "visibility must be in [0, 1]");
  }
  if (!(drift_sigma >= 0.0)) throw Error(ErrorCode::kInvalidInput, "drift_sigma must be >= 0");
}

void NoiseModel::validate() const {
  if (!(sigma_noise >= 0.0) || !std::isfinite(sigma_noise)) {
    throw Error(ErrorCode::kInvalidInput, "sigma_noise must be finite and >= 0");
  }
}

std::vector<double> simulate_phases(const PhaseDiffusionConfig& cfg) {
  cfg.validate();
  auto rng = detail::make_rng(cfg.seed, {kPhaseStream});
  std::normal_distribution<double> step(0.0, 1.0);
  std::vector<double> phases(cfg.n_pulses);
  double drift = 0.0;
  for (auto& phi : phases) {
    double p = cfg.sigma_phi * step(rng);
    if (cfg.drift_sigma > 0.0) {
      drift += cfg.drift_sigma * step(rng);
      p += drift;
    }
    phi = wrap_phase(p);
  }
  return phases;
}

std::vector<double> phases_to_intensities(std::span<const double> phases, double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "visibility must be in [0, 1]");
  }
  std::vector<double> out;
  out.reserve(phases.size());
  for (double phi : phases) out.push_back(0.5 * (1.0 + visibility * std::cos(phi)));
  return out;
}

SampleSequence apply_noise_and_quantize(std::span<const double> intensities, const NoiseModel& noise,
                                        double fraction, const AdcModel& adc, std::uint64_t seed) {
  noise.validate();
  adc.validate();
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "fraction must be in (0, 1]");
  }
  auto rng = detail::make_rng(seed, {kNoiseStream});
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double width = adc.range_high - adc.range_low;
  const double offset = adc.range_low + 0.5 * (1.0 - fraction) * width;
  std::vector<int> codes;
  codes.reserve(intensities.size());
  for (double i : intensities) {
    const double noisy = noise.sigma_noise > 0.0 ? i + noise.sigma_noise * gauss(rng) : i;
    codes.push_back(quantize(offset + fraction * width * noisy, adc));
  }
  return SampleSequence(std::move(codes), adc.code_count());
}

double simulate_fitted_distance(double sigma_phi, double noise, double fraction, std::size_t n,
                                const AdcModel& adc, std::uint64_t seed, const FitConfig& fit) {
  PhaseDiffusionConfig pc;
  pc.sigma_phi = sigma_phi;
  pc.n_pulses = n;
  pc.seed = seed;
  const auto intensities = phases_to_intensities(simulate_phases(pc), pc.visibility);
  NoiseModel nm;
  nm.sigma_noise = noise;
  const auto seq = apply_noise_and_quantize(intensities, nm, fraction, adc, seed);
  return fit_arcsine(build_histogram(seq), fit).d_stat;
}

CalibrationSpec CalibrationSpec::default_grid(int points) {
  CalibrationSpec spec;
  const auto linspace = [points](double a, double b) {
    std::vector<double> v;
    for (int i = 0; i < points; ++i) {
      v.push_back(points == 1 ? a : a + (b - a) * i / (points - 1));
    }
    return v;
  };
  spec.noise_values = linspace(0.0043, 0.030);
  spec.fraction_values = linspace(0.50, 0.85);
  return spec;
}

CalibrationGrid calibrate_boundary(const CalibrationSpec& spec, const AdcModel& adc) {
  if (spec.noise_values.empty() || spec.fraction_values.empty()) {
    throw Error(ErrorCode::kEmptyInput, "calibration grid is empty");
  }
  if (spec.reps < 1) throw Error(ErrorCode::kInvalidInput, "reps must be >= 1");
  adc.validate();

  CalibrationGrid grid;
  grid.spec = spec;
  const std::size_t nf = spec.fraction_values.size();
  const std::size_t cell_count = spec.noise_values.size() * nf;
  grid.cells.resize(cell_count);
  for (std::size_t c = 0; c < cell_count; ++c) {
    grid.cells[c].noise = spec.noise_values[c / nf];
    grid.cells[c].fraction = spec.fraction_values[c % nf];
    grid.cells[c].d_stat.assign(static_cast<std::size_t>(spec.reps), 0.0);
  }

  const std::size_t reps = static_cast<std::size_t>(spec.reps);
  detail::parallel_for(cell_count * reps, spec.threads, [&](std::size_t task) {
    const std::size_t c = task / reps;
    const std::size_t r = task % reps;
    auto& cell = grid.cells[c];
    const std::uint64_t seed = detail::derive_seed(spec.seed, {c, r});
    cell.d_stat[r] = simulate_fitted_distance(spec.sigma_phi, cell.noise, cell.fraction,
                                              spec.n_samples, adc, seed, spec.fit);
  });

  double total = 0.0;
  for (auto& cell : grid.cells) {
    cell.mean = mean_of(cell.d_stat);
    cell.std = sample_std(cell.d_stat, cell.mean);
    for (double d : cell.d_stat) {
      total += d;
      if (d >= 1.0) ++cell.failed_fits;
    }
  }
  grid.mean_d_stat = total / static_cast<double>(cell_count * reps);
  return grid;
}

SampleSizeStudy sample_size_study(double noise, double fraction, std::span<const std::size_t> sizes,
                                  int reps, std::uint64_t seed, double sigma_phi,
                                  const AdcModel& adc, unsigned threads, const FitConfig& fit) {
  if (sizes.empty()) throw Error(ErrorCode::kEmptyInput, "no sample sizes given");
  if (reps < 1) throw Error(ErrorCode::kInvalidInput, "reps must be >= 1");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1 || (i > 0 && sizes[i] <= sizes[i - 1])) {
      throw Error(ErrorCode::kInvalidInput, "sample sizes must be positive and ascending");
    }
  }
  const std::size_t r = static_cast<std::size_t>(reps);
  std::vector<double> d(sizes.size() * r, 0.0);
  detail::parallel_for(d.size(), threads, [&](std::size_t task) {
    const std::size_t s = task / r;
    const std::uint64_t task_seed = detail::derive_seed(seed, {s, task % r});
    d[task] = simulate_fitted_distance(sigma_phi, noise, fraction, sizes[s], adc, task_seed, fit);
  });

  SampleSizeStudy study;
  study.degenerate_statistics = reps < 2;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    std::vector<double> block(d.begin() + static_cast<std::ptrdiff_t>(s * r),
                              d.begin() + static_cast<std::ptrdiff_t>((s + 1) * r));
    const double m = mean_of(block);
    study.rows.push_back({sizes[s], m, sample_std(block, m)});
  }
  return study;
}

}  // namespace qrngq
