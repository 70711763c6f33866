#pragma once

#include <cstddef>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "wavekit/tensor.hpp"

namespace wavekit {

/// Physical triple of the damped wave equation u_tt + α·u_t = v²·Δu.
struct WaveParams {
  double velocity = 1.0;  ///< v > 0, grid units per unit time
  double damping = 0.1;   ///< α ≥ 0
  double time = 1.0;      ///< t ≥ 0

  /// Throws std::invalid_argument unless v > 0, α ≥ 0, t ≥ 0, all finite.
  void validate() const;
  double gamma() const noexcept { return 0.5 * damping; }
};

enum class Boundary { kPeriodic, kDirichlet };

/// Which Laplacian the spectral multiplier diagonalizes. kContinuous uses
/// -(ω_x² + ω_y²); kFivePoint uses the symbol of the 5-point stencil,
/// -(4sin²(ω_x/2) + 4sin²(ω_y/2)), which makes the closed form the exact
/// time solution of the spatially discretized equation.
enum class LaplacianSymbol { kContinuous, kFivePoint };

/// Angular frequencies per axis. Periodic: ω[k] = 2π·s(k)/N with s(k) the
/// signed FFT index in [-⌊N/2⌋, ⌈N/2⌉). Dirichlet: ω[n-1] = nπ/(N+1), n = 1..N.
struct FrequencyGrid {
  std::vector<double> omega_x;  ///< length W
  std::vector<double> omega_y;  ///< length H
  Boundary boundary = Boundary::kPeriodic;
  LaplacianSymbol symbol = LaplacianSymbol::kContinuous;

  std::size_t height() const noexcept { return omega_y.size(); }
  std::size_t width() const noexcept { return omega_x.size(); }
  /// |ω|² at bin (y, x) under the grid's Laplacian symbol.
  double spatial_sq(std::size_t y, std::size_t x) const;
};

FrequencyGrid frequency_grid(std::size_t height, std::size_t width, Boundary boundary,
                             LaplacianSymbol symbol = LaplacianSymbol::kContinuous);

enum class Regime { kUnderdamped, kCritical, kOverdamped };
std::string_view to_string(Regime r);

/// Half-width of the critical band around ω₀² = γ²: 1e-9·max(1, γ²).
double critical_band(double damping);

/// omega0_sq is v²(ω_x² + ω_y²).
Regime classify_regime(const WaveParams& params, double omega0_sq);

/// Raised when an operation is requested outside the regime it is defined for.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// ω_d = sqrt(ω₀² − (α/2)²). Throws RegimeError unless underdamped.
double damped_frequency(const WaveParams& params, double omega0_sq);

/// 2×2 state transition of one mode: (û_t, v̂_t) = [[cu, cv], [du, dv]]·(û₀, v̂₀).
struct ModeMatrix {
  double cu = 1.0;
  double cv = 0.0;
  double du = 0.0;
  double dv = 1.0;

  ModeMatrix transposed() const noexcept { return {cu, du, cv, dv}; }
};

ModeMatrix operator*(const ModeMatrix& a, const ModeMatrix& b);

/// Closed-form transition over time t for a mode with squared natural
/// frequency omega0_sq and damping α. Finite for every valid input, including
/// α = 0, t = 0 and omega0_sq = 0.
ModeMatrix mode_matrix(double omega0_sq, double damping, double t);

/// Transition matrix together with its partial derivatives.
struct ModeJacobian {
  ModeMatrix value;
  ModeMatrix d_omega0_sq;
  ModeMatrix d_damping;
  ModeMatrix d_time;
};

ModeJacobian mode_jacobian(double omega0_sq, double damping, double t);

/// Per-frequency coefficient planes (H×W, row-major) of the closed-form solution.
struct PropagationKernel {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> cu, cv, du, dv;
  std::vector<Regime> regime;

  ModeMatrix at(std::size_t i) const { return {cu[i], cv[i], du[i], dv[i]}; }
};

PropagationKernel kernel_coefficients(const WaveParams& params, const FrequencyGrid& grid);

/// Per-frequency heat multiplier e^{-k|ω|²t} (H×W, row-major).
std::vector<double> heat_kernel(double conductivity, double t, const FrequencyGrid& grid);

/// Dirichlet modal solution: sine-mode expansion of (u0, v0) on the interior
/// grid, each mode evolved as e^{-αt/2}(A·cos(ω_d t) + B·sin(ω_d t)) with
/// B = (V + (α/2)A)/ω_d. Every mode must be underdamped; otherwise RegimeError
/// names the offending (n, m).
FeatureField modal_solution(const FeatureField& u0, const FeatureField& v0,
                            const WaveParams& params,
                            LaplacianSymbol symbol = LaplacianSymbol::kContinuous);

struct SpectralRetention {
  double wave_gain = 0.0;      ///< |c_u| at the bin (zero initial velocity)
  double heat_gain = 0.0;      ///< e^{-k|ω|²t}
  double ratio = 0.0;          ///< wave_gain / heat_gain
  double wave_envelope = 0.0;  ///< e^{-αt/2}
  Regime regime = Regime::kUnderdamped;
};

/// Compares how much of a single frequency survives wave propagation versus
/// heat conduction over params.time. omega_sq is the spatial |ω|², before
/// scaling by v².
SpectralRetention spectral_retention(const WaveParams& params, double conductivity,
                                     double omega_sq);

}  // namespace wavekit
