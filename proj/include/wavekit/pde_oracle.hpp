#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "wavekit/tensor.hpp"
#include "wavekit/wave_kernel.hpp"

namespace wavekit {

/// Explicit time-stepping configuration. Grid spacing is 1.
struct FdConfig {
  double dt = 1e-3;
  std::size_t steps = 1;
  Boundary boundary = Boundary::kPeriodic;
  /// Called after every completed step with the full state. For Dirichlet
  /// grids the state is padded with the boundary ring, (H+2)×(W+2)×C.
  std::function<void(std::size_t step, const FeatureField& state)> observer;
};

/// Time step or stability violation. `max_dt` is the largest admissible step.
class CflError : public std::invalid_argument {
 public:
  CflError(const std::string& what, double max_dt)
      : std::invalid_argument(what), max_dt_(max_dt) {}
  double max_dt() const noexcept { return max_dt_; }

 private:
  double max_dt_;
};

/// Non-finite state during time stepping.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

struct WaveSolution {
  FeatureField u;
  FeatureField v;
};

/// 0.9·h/(v·√2)
double wave_max_dt(double velocity);
/// 0.9·h²/(4k)
double heat_max_dt(double conductivity);

/// Leapfrog with centered (implicit-in-damping) velocity term and 5-point
/// Laplacian:
///   (uⁿ⁺¹ − 2uⁿ + uⁿ⁻¹)/dt² + α(uⁿ⁺¹ − uⁿ⁻¹)/(2dt) = v²Δuⁿ,
/// bootstrapped with u¹ = u⁰ + dt·v⁰ + dt²/2·(v²Δu⁰ − αv⁰). Requires
/// steps·dt = params.time. The returned velocity is (uᴺ⁺¹ − uᴺ⁻¹)/(2dt).
WaveSolution fd_wave_solve(const FeatureField& u0, const FeatureField& v0,
                           const WaveParams& params, const FdConfig& cfg);

/// Explicit Euler for u_t = kΔu over steps·dt.
FeatureField fd_heat_solve(const FeatureField& u0, double conductivity, const FdConfig& cfg);

/// 5-point Laplacian with spacing 1. Dirichlet treats out-of-grid neighbours as 0.
FeatureField laplacian5(const FeatureField& u, Boundary boundary);

/// Staggered leapfrog energy between consecutive levels uⁿ, uⁿ⁺¹:
/// Σ ((uⁿ⁺¹−uⁿ)/dt)² + v²·⟨uⁿ⁺¹, −Δuⁿ⟩, exactly conserved by the α = 0 scheme.
double leapfrog_energy(const FeatureField& u_prev, const FeatureField& u_next, double velocity,
                       double dt, Boundary boundary);

/// ‖a − b‖₂ / max(‖b‖₂, 1e-30).
double rel_l2(const FeatureField& a, const FeatureField& b);

struct ConvergenceRow {
  double dt = 0.0;
  std::size_t steps = 0;
  double rel_l2 = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;  ///< least-squares slope of log(rel_l2) against log(dt)
};

/// Compares fd_wave_solve against the closed-form solution of the same
/// spatially discretized problem (5-point symbol), one row per dt. Each dt
/// must divide params.time into an integer number of steps.
ConvergenceStudy convergence_study(const FeatureField& u0, const FeatureField& v0,
                                   const WaveParams& params, const std::vector<double>& dt_list,
                                   Boundary boundary = Boundary::kPeriodic);

/// Closed-form periodic or Dirichlet propagation of u0 (and v0) with the
/// 5-point symbol; the reference convergence_study measures against.
FeatureField closed_form_discrete(const FeatureField& u0, const FeatureField& v0,
                                  const WaveParams& params, Boundary boundary);

/// Zeroes every periodic mode whose signed index exceeds keep_fraction·⌊N/2⌋
/// on either axis. keep_fraction = 2/3 removes the upper spectral third.
FeatureField band_limit(const FeatureField& field, double keep_fraction);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace wavekit
