#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support/oracles.hpp"
#include "wavekit/pde_oracle.hpp"
#include "wavekit/transforms.hpp"
#include "wavekit/wave_kernel.hpp"

namespace wavekit {
namespace {

constexpr double kPi = std::numbers::pi;

FdConfig config(double dt, double t, Boundary b = Boundary::kPeriodic) {
  FdConfig cfg;
  cfg.steps = static_cast<std::size_t>(std::llround(t / dt));
  cfg.dt = t / static_cast<double>(cfg.steps);
  cfg.boundary = b;
  return cfg;
}

FeatureField cosine_mode(std::size_t n, std::size_t k) {
  FeatureField f(n, n, 1);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) f.at(0, y, x) = std::cos(2 * kPi * k * x / n);
  return f;
}

TEST(FdWave, ConstantIsSteadyState) {
  const FeatureField u0(Dims{8, 8, 2}, std::vector<double>(128, 0.37));
  const FeatureField v0(8, 8, 2);
  for (double alpha : {0.0, 0.1, 5.0}) {
    const auto sol = fd_wave_solve(u0, v0, {1.0, alpha, 0.8}, config(0.01, 0.8));
    EXPECT_LT(max_abs_diff(sol.u, u0), 1e-10);
    EXPECT_LT(max_abs_diff(sol.v, v0), 1e-10);
  }
}

TEST(FdWave, SinglePeriodicModeAmplitude) {
  // The 5-point scheme oscillates the mode at 2sin(ω/2), not ω. With ω = π/8
  // cos(ω) and cos(2sin(ω/2)) differ by 1.04e-3 relative, so the discrete
  // frequency is the oracle here.
  const std::size_t n = 64, k = 4;
  const auto u0 = cosine_mode(n, k);
  const auto sol = fd_wave_solve(u0, FeatureField(n, n, 1), {1.0, 0.0, 1.0}, config(1e-3, 1.0));
  const double omega = 2 * kPi * k / n;
  const double omega_h = 2 * std::sin(omega / 2);
  const double amp = sol.u.at(0, 0, 0);
  EXPECT_LT(std::abs(amp - std::cos(omega_h)) / std::cos(omega_h), 1e-3);
  EXPECT_LT(std::abs(amp - std::cos(omega_h)), 1e-6);
  EXPECT_LT(max_abs_diff(sol.u, amp * u0), 1e-10);
  EXPECT_NEAR(std::abs(std::cos(omega) - std::cos(omega_h)) / std::cos(omega), 1.04e-3, 1e-5);
}

TEST(FdWave, RandomFieldMatchesDiscreteClosedForm) {
  const auto u0 = band_limit(random_field(21, 32, 32, 1), 2.0 / 3.0);
  const FeatureField v0(32, 32, 1);
  const WaveParams p{1.0, 0.1, 0.5};
  const auto sol = fd_wave_solve(u0, v0, p, config(2e-3, 0.5));
  EXPECT_LT(rel_l2(sol.u, closed_form_discrete(u0, v0, p, Boundary::kPeriodic)), 1e-3);
}

TEST(FdWave, VelocityOutputMatchesClosedForm) {
  const auto u0 = band_limit(random_field(3, 16, 16, 1), 2.0 / 3.0);
  const auto v0 = band_limit(random_field(4, 16, 16, 1), 2.0 / 3.0);
  const WaveParams p{0.8, 0.3, 0.6};
  const auto sol = fd_wave_solve(u0, v0, p, config(1e-3, 0.6));
  // v(t) = u(t) evolved from (v0, -ω₀²u0 - αv0); its closed form is the time
  // derivative of u, checked through a centered difference of the closed form.
  const double h = 1e-4;
  auto up = closed_form_discrete(u0, v0, {0.8, 0.3, 0.6 + h}, Boundary::kPeriodic);
  auto um = closed_form_discrete(u0, v0, {0.8, 0.3, 0.6 - h}, Boundary::kPeriodic);
  const FeatureField deriv = (1.0 / (2 * h)) * (up - um);
  EXPECT_LT(rel_l2(sol.v, deriv), 1e-4);
}

TEST(FdWave, ErrorPaths) {
  const auto u0 = random_field(1, 8, 8, 1);
  const FeatureField v0(8, 8, 1);
  FdConfig cfg = config(0.7, 1.4);
  try {
    fd_wave_solve(u0, v0, {1.0, 0.0, 1.4}, cfg);
    FAIL();
  } catch (const CflError& e) {
    EXPECT_NEAR(e.max_dt(), 0.9 / std::sqrt(2.0), 1e-15);
    EXPECT_NE(std::string(e.what()).find("maximal admissible dt"), std::string::npos);
  }
  FdConfig mismatch = config(0.01, 1.0);
  mismatch.steps = 99;
  EXPECT_THROW(fd_wave_solve(u0, v0, {1.0, 0.0, 1.0}, mismatch), std::invalid_argument);

  FeatureField huge(8, 8, 1);
  huge.at(0, 3, 3) = 1e308;
  huge.at(0, 3, 4) = -1e308;
  try {
    fd_wave_solve(huge, v0, {1.0, 0.0, 0.5}, config(0.05, 0.5));
    FAIL();
  } catch (const BlowUpError& e) {
    EXPECT_NE(std::string(e.what()).find("numerical blow-up at step"), std::string::npos);
  }
}

TEST(FdWave, LeapfrogEnergyConserved) {
  const auto u0 = random_field(8, 24, 24, 1);
  const FeatureField v0(24, 24, 1);
  const double dt = wave_max_dt(1.0);
  double first = 0.0, worst = 0.0;
  FeatureField last = u0;
  FdConfig cfg;
  cfg.dt = dt;
  cfg.steps = 1000;
  cfg.observer = [&](std::size_t step, const FeatureField& u) {
    if (step >= 2) {
      const double e = leapfrog_energy(last, u, 1.0, dt, Boundary::kPeriodic);
      if (step == 2) first = e;
      worst = std::max(worst, std::abs(e - first) / first);
    }
    last = u;
  };
  fd_wave_solve(u0, v0, {1.0, 0.0, dt * 1000}, cfg);
  EXPECT_GT(first, 0.0);
  EXPECT_LT(worst, 1e-3);
}

TEST(FdWave, DirichletBoundaryStaysZero) {
  const auto u0 = random_field(9, 10, 12, 2);
  const auto v0 = random_field(10, 10, 12, 2);
  FdConfig cfg = config(0.01, 0.5, Boundary::kDirichlet);
  std::size_t seen = 0;
  cfg.observer = [&](std::size_t, const FeatureField& padded) {
    ++seen;
    ASSERT_EQ(padded.height(), 12u);
    ASSERT_EQ(padded.width(), 14u);
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t x = 0; x < 14; ++x) {
        ASSERT_EQ(padded.at(c, 0, x), 0.0);
        ASSERT_EQ(padded.at(c, 11, x), 0.0);
      }
      for (std::size_t y = 0; y < 12; ++y) {
        ASSERT_EQ(padded.at(c, y, 0), 0.0);
        ASSERT_EQ(padded.at(c, y, 13), 0.0);
      }
    }
  };
  fd_wave_solve(u0, v0, {1.0, 0.1, 0.5}, cfg);
  EXPECT_EQ(seen, cfg.steps);
}

TEST(FdWave, DirichletMatchesModalSolution) {
  const auto u0 = random_field(17, 16, 16, 1);
  const FeatureField v0(16, 16, 1);
  const WaveParams p{1.0, 0.1, 0.5};
  const auto fd = fd_wave_solve(u0, v0, p, config(2e-3, 0.5, Boundary::kDirichlet));
  const auto modal = modal_solution(u0, v0, p, LaplacianSymbol::kFivePoint);
  EXPECT_LT(rel_l2(fd.u, modal), 1e-3);
  EXPECT_LT(rel_l2(fd.u, closed_form_discrete(u0, v0, p, Boundary::kDirichlet)), 1e-3);
}

TEST(ConvergenceStudy, SecondOrderInTime) {
  const auto u0 = band_limit(random_field(5, 32, 32, 1), 2.0 / 3.0);
  const auto v0 = band_limit(random_field(6, 32, 32, 1), 2.0 / 3.0);
  const auto study =
      convergence_study(u0, v0, {1.0, 0.1, 0.5}, {0.05, 0.025, 0.0125, 0.00625});
  ASSERT_EQ(study.rows.size(), 4u);
  for (std::size_t i = 1; i < study.rows.size(); ++i) {
    EXPECT_LT(study.rows[i].rel_l2, study.rows[i - 1].rel_l2);
  }
  EXPECT_GE(study.slope, 1.7);
  EXPECT_LE(study.slope, 2.3);
  EXPECT_THROW(convergence_study(u0, v0, {1.0, 0.1, 0.5}, {0.3}), std::invalid_argument);
}

TEST(FdHeat, ConstantUnchanged) {
  const FeatureField u0(Dims{6, 6, 1}, std::vector<double>(36, -1.25));
  EXPECT_LT(max_abs_diff(fd_heat_solve(u0, 1.0, config(0.01, 1.0)), u0), 1e-12);
}

TEST(FdHeat, SingleModeDecay) {
  const std::size_t n = 32, k = 2;
  const auto u0 = cosine_mode(n, k);
  const double kappa = 1.0, t = 0.2, dt = 1e-4;
  const auto u = fd_heat_solve(u0, kappa, config(dt, t));
  const double omega = 2 * kPi * k / n;
  const double lam = 4 * std::sin(omega / 2) * std::sin(omega / 2);
  // Explicit Euler multiplies the mode by (1 − kλdt) per step.
  EXPECT_NEAR(u.at(0, 0, 0), std::pow(1 - kappa * lam * dt, t / dt), 1e-12);
  EXPECT_NEAR(u.at(0, 0, 0), std::exp(-kappa * omega * omega * t), 2e-3);
}

TEST(FdHeat, MatchesSpectralHeatPath) {
  const auto u0 = band_limit(random_field(31, 32, 32, 1), 2.0 / 3.0);
  const double kappa = 1.0, t = 0.5;
  const auto fd = fd_heat_solve(u0, kappa, config(1e-3, t));
  const auto grid = frequency_grid(32, 32, Boundary::kPeriodic, LaplacianSymbol::kFivePoint);
  const auto mult = heat_kernel(kappa, t, grid);
  SpectralField s = fft2(u0);
  for (std::size_t i = 0; i < s.size(); ++i) s.data()[i] *= mult[i];
  EXPECT_LT(rel_l2(fd, ifft2(s)), 1e-3);
}

TEST(FdHeat, StabilityLimit) {
  try {
    fd_heat_solve(random_field(1, 4, 4, 1), 2.0, config(0.2, 1.0));
    FAIL();
  } catch (const CflError& e) {
    EXPECT_NEAR(e.max_dt(), 0.9 / 8.0, 1e-15);
  }
}

TEST(RelL2, Cases) {
  const auto a = random_field(1, 4, 4, 1);
  EXPECT_EQ(rel_l2(a, a), 0.0);
  const FeatureField one(Dims{1, 2, 1}, {1.0, 0.0});
  const FeatureField zero(1, 2, 1);
  // Denominator guard: ‖b‖ = 0 is clamped to 1e-30.
  EXPECT_DOUBLE_EQ(rel_l2(one, zero), 1e30);
  EXPECT_THROW(rel_l2(one, a), FieldError);
}

TEST(BandLimit, MatchesDirectSynthesis) {
  const auto f = random_field(2, 12, 10, 2);
  // keep 2/3 of ⌊N/2⌋: 4 on the 12-axis, 3 on the 10-axis; use a square grid for the oracle.
  const auto g = random_field(3, 12, 12, 1);
  EXPECT_LT(max_abs_diff(band_limit(g, 2.0 / 3.0), testing::band_limit_naive(g, 4)), 1e-12);
  EXPECT_LT(max_abs_diff(band_limit(f, 1.0), f), 1e-12);
}

TEST(LogLogSlope, ExactPowerLaw) {
  EXPECT_NEAR(loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}), 2.0, 1e-12);
}

}  // namespace
}  // namespace wavekit
