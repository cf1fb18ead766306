#include <algorithm>
#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "qrngq/core.hpp"
#include "qrngq/laser_sim.hpp"

using namespace qrngq;

namespace {

double amplitude(const std::vector<double>& x, std::size_t from) {
  const auto [lo, hi] = std::minmax_element(x.begin() + static_cast<std::ptrdiff_t>(from), x.end());
  return 0.5 * (*hi - *lo);
}

std::vector<double> sinusoid(double f, double fs, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2.0 * kPi * f * static_cast<double>(i) / fs);
  return x;
}

PulseTrace cw_field(std::size_t n, double fs, double phase_step) {
  PulseTrace t;
  t.sample_rate = fs;
  t.mw_per_density = 1.0;
  t.photon_density.assign(n, 2.0);
  t.drive_ma.assign(n, 0.0);
  t.phase_rad.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.phase_rad[i] = phase_step * static_cast<double>(i);
  return t;
}

}  // namespace

TEST_CASE("make_drive levels") {
  DriveParams p;
  p.peak_ma = 40.0;
  p.mod_depth = 0.5;
  const double fs = 50e9;
  auto d = make_drive(p, fs, 4);
  CHECK(*std::min_element(d.begin(), d.end()) == 0.0);
  CHECK(*std::max_element(d.begin(), d.end()) == 40.0);
  const auto on = std::count(d.begin(), d.end(), 40.0);
  CHECK(static_cast<double>(on) / d.size() == doctest::Approx(0.5).epsilon(0.01));

  p.mod_depth = 0.7;
  d = make_drive(p, fs, 2);
  CHECK(*std::min_element(d.begin(), d.end()) == doctest::Approx(-16.0));
  CHECK(p.bias_ma() + p.amplitude_ma() == doctest::Approx(p.peak_ma));

  p.mod_depth = 0.2;
  CHECK(p.off_level_ma() == doctest::Approx(24.0));

  CHECK_ERROR_CODE(make_drive(p, 1e9, 2), ErrorCode::kInvalidInput);
  DriveParams bad;
  bad.duty_cycle = 1.0;
  CHECK_ERROR_CODE(make_drive(bad, fs, 2), ErrorCode::kInvalidInput);
  bad = DriveParams{};
  bad.peak_ma = 0.0;
  CHECK_ERROR_CODE(make_drive(bad, fs, 2), ErrorCode::kInvalidInput);
}

TEST_CASE("first-order lowpass response") {
  const double fs = 100e9, fc = 1e9;
  const std::vector<double> flat(500, 3.25);
  for (double v : lowpass(flat, fs, fc)) CHECK(v == doctest::Approx(3.25));

  const auto at_cutoff = lowpass(sinusoid(fc, fs, 20000), fs, fc);
  CHECK(amplitude(at_cutoff, 10000) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.02));

  const auto slow = lowpass(sinusoid(fc / 100.0, fs, 40000), fs, fc);
  CHECK(std::abs(amplitude(slow, 20000) - 1.0) < 1e-3);
}

TEST_CASE("a 1 GHz lowpass flattens a 1.18 GHz pulse train") {
  DriveParams p;
  p.rep_period_s = 1.0 / 1.18e9;
  p.duty_cycle = 29.0 / 30.0;
  p.peak_ma = 40.0;
  const double fs = 100e9;
  const auto raw = make_drive(p, fs, 50);
  const auto single = lowpass(raw, fs, 1e9);
  const auto tail = raw.size() / 2;
  CHECK(amplitude(single, tail) <= 0.5 * amplitude(raw, tail));

  const auto lp1 = laser_preset("laser1");
  const auto cascade = filter_drive(lp1, raw, fs);
  CHECK(amplitude(cascade, tail) <= amplitude(single, tail));
  const auto lp3 = laser_preset("laser3");
  const auto passthrough = filter_drive(lp3, raw, fs);
  CHECK(passthrough == raw);
}

TEST_CASE("presets and parameter files") {
  const auto l1 = laser_preset("laser1");
  const auto l2 = laser_preset("laser2");
  const auto l3 = laser_preset("laser3");
  CHECK(l1.drive_lowpass_hz == 1e9);
  CHECK(l3.drive_lowpass_hz == 0.0);
  CHECK(l2.output_mw(1e21) == doctest::Approx(0.1 * l3.output_mw(1e21)));
  CHECK(l3.threshold_current_ma(40.0) > l3.threshold_current_ma(25.0));
  CHECK_ERROR_CODE(laser_preset("laser9"), ErrorCode::kInvalidInput);

  const auto text = format_laser_params(l1);
  const auto back = parse_laser_params(text);
  CHECK(back.drive_lowpass_hz == l1.drive_lowpass_hz);
  CHECK(back.drive_lowpass_order == l1.drive_lowpass_order);
  CHECK(back.beta_sp == l1.beta_sp);
  CHECK(back.intensity_noise == l1.intensity_noise);
  CHECK(format_laser_params(back) == text);

  CHECK_ERROR_CODE(parse_laser_params("no_such_key = 1\n"), ErrorCode::kParse);
  CHECK_ERROR_CODE(parse_laser_params("alpha 4\n"), ErrorCode::kParse);
  CHECK_ERROR_CODE(parse_laser_params("alpha = four\n"), ErrorCode::kParse);
  CHECK_ERROR_CODE(parse_laser_params("beta_sp = 2\n"), ErrorCode::kInvalidInput);
  const auto commented = parse_laser_params("# comment\nalpha = 3 # trailing\n\n");
  CHECK(commented.alpha == 3.0);
}

TEST_CASE("unpumped laser decays monotonically") {
  auto lp = laser_preset("laser3");
  const double fs = 50e9;
  std::vector<double> drive(2000, 0.0);
  IntegratorConfig ic;
  ic.phase_noise = false;
  ic.allow_intensity_noise = false;
  // Start from an above-threshold state by pumping first.
  std::fill(drive.begin(), drive.begin() + 500, 2.0 * lp.threshold_current_ma(25.0));
  const auto tr = integrate_rate_equations(lp, drive, fs, ic);
  for (std::size_t i = 700; i < tr.size(); ++i) CHECK(tr.photon_density[i] <= tr.photon_density[i - 1]);
  CHECK(tr.photon_density.back() < 1e-4 * *std::max_element(tr.photon_density.begin(), tr.photon_density.end()));
  for (double s : tr.photon_density) CHECK(s > 0.0);
}

TEST_CASE("steady state matches the algebraic fixed point") {
  auto lp = laser_preset("laser3");
  const double current = 2.0 * lp.threshold_current_ma(25.0);
  const double fs = 50e9;
  IntegratorConfig ic;
  ic.phase_noise = false;
  ic.allow_intensity_noise = false;
  ic.dt = 0.2e-12;
  const auto tr = integrate_rate_equations(lp, std::vector<double>(static_cast<std::size_t>(15e-9 * fs), current), fs, ic);

  // N(S) from the photon equation at rest; bisect the carrier equation for S.
  const double pump = current * 1e-3 * lp.injection_efficiency(25.0) / (kElementaryCharge * lp.active_volume);
  const double G = lp.confinement, tn = lp.carrier_lifetime, tp = lp.photon_lifetime, b = lp.beta_sp;
  auto carriers = [&](double s) { return (G * pump - s / tp) * tn / (G * (1.0 - b)); };
  auto residual = [&](double s) {
    const double n = carriers(s);
    return lp.differential_gain * (n - lp.transparency_density) / (1.0 + lp.gain_compression * s) * s -
           (pump - n / tn);
  };
  double lo = 1e10, hi = G * pump * tp * (1.0 - 1e-12);
  const bool rising = residual(lo) < 0.0;
  REQUIRE((residual(hi) < 0.0) != rising);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((residual(mid) < 0.0) == rising ? lo : hi) = mid;
  }
  const double s_star = 0.5 * (lo + hi);
  CHECK(std::abs(tr.photon_density.back() / s_star - 1.0) < 0.005);
}

TEST_CASE("without noise or chirp coupling the steady-state phase is constant") {
  auto lp = laser_preset("laser3");
  lp.alpha = 0.0;
  IntegratorConfig ic;
  ic.phase_noise = false;
  ic.allow_intensity_noise = false;
  const auto tr = integrate_rate_equations(lp, std::vector<double>(500, 30.0), 50e9, ic);
  for (double p : tr.phase_rad) CHECK(p == 0.0);
}

TEST_CASE("gain switching shows relaxation oscillations") {
  auto lp = laser_preset("laser3");
  DriveParams p;  // 32 mA, MD 0.5, DC 0.5
  const double fs = 100e9;
  IntegratorConfig ic;
  ic.phase_noise = false;
  ic.allow_intensity_noise = false;
  const auto tr = integrate_rate_equations(lp, make_drive(p, fs, 3), fs, ic);
  const auto per = static_cast<std::size_t>(std::llround(p.rep_period_s * fs));
  const auto on = static_cast<std::size_t>(p.duty_cycle * static_cast<double>(per));
  // Third period: peak of the pulse vs the level just before switch-off.
  const auto begin = tr.photon_density.begin() + static_cast<std::ptrdiff_t>(2 * per);
  const double peak = *std::max_element(begin, begin + static_cast<std::ptrdiff_t>(on));
  const double settled = tr.photon_density[2 * per + on - 2];
  CHECK(peak >= 1.2 * settled);
}

TEST_CASE("runaway parameters are reported as divergence") {
  auto lp = laser_preset("laser3");
  lp.gain_compression = 0.0;
  IntegratorConfig ic;
  ic.dt = 1e-12;
  CHECK_ERROR_CODE(integrate_rate_equations(lp, std::vector<double>(100, 1e300), 50e9, ic),
                   ErrorCode::kNumericalDivergence);
  ic.dt = 2e-12;
  CHECK_ERROR_CODE(integrate_rate_equations(lp, std::vector<double>(10, 1.0), 50e9, ic),
                   ErrorCode::kInvalidInput);
}

TEST_CASE("interferometer output") {
  const double fs = 100e9;
  InterferometerParams ip;
  ip.delay_s = 50.0 / fs;
  ip.split_first = ip.split_second = 0.5;

  const auto same = amzi_interfere(cw_field(400, fs, 0.0), ip);
  CHECK(same[10] == doctest::Approx(0.25 * 2.0));  // short arm only
  for (std::size_t i = 50; i < 400; ++i) CHECK(same[i] == doctest::Approx(2.0 * (0.5 * 2.0)));

  const auto opposite = amzi_interfere(cw_field(400, fs, kPi / 50.0), ip);
  for (std::size_t i = 50; i < 400; ++i) CHECK(opposite[i] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  InterferometerParams uneven = ip;
  uneven.split_first = uneven.split_second = 0.515;
  const auto dark = amzi_interfere(cw_field(400, fs, kPi / 50.0), uneven);
  const double c1 = 0.515, c2 = 0.485;
  const double expected = std::pow(c1 * std::sqrt(2.0) - c2 * std::sqrt(2.0), 2);
  CHECK(dark[200] == doctest::Approx(expected));
  CHECK(dark[200] > 0.0);

  CHECK_ERROR_CODE(amzi_interfere(cw_field(40, fs, 0.0), ip), ErrorCode::kTraceTooShort);
}

TEST_CASE("balanced interferometer conserves energy across both ports") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 6.0);
  PulseTrace t = cw_field(1000, 100e9, 0.0);
  for (auto& s : t.photon_density) s = u(rng);
  for (auto& p : t.phase_rad) p = u(rng);
  InterferometerParams ip;
  ip.delay_s = 100.0 / 100e9;
  ip.split_first = ip.split_second = 0.5;
  const auto ports = amzi_interfere_ports(t, ip);
  for (std::size_t i = 100; i < 1000; ++i) {
    CHECK(ports.primary[i] + ports.complementary[i] ==
          doctest::Approx(0.5 * (t.photon_density[i] + t.photon_density[i - 100])));
  }
}

TEST_CASE("cw_intensity_to_phase") {
  const std::vector<double> in{4.0, 1.0, 2.5, 9.0, -3.0};
  const auto ph = cw_intensity_to_phase(in, 1.0, 4.0);
  CHECK(ph[0] == doctest::Approx(0.0));
  CHECK(ph[1] == doctest::Approx(kPi));
  CHECK(ph[2] == doctest::Approx(kPi / 2));
  CHECK(ph[3] == doctest::Approx(0.0));
  CHECK(ph[4] == doctest::Approx(kPi));
  CHECK_ERROR_CODE(cw_intensity_to_phase(in, 2.0, 2.0), ErrorCode::kInvalidInput);
}
