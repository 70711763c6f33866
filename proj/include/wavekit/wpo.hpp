#pragma once

#include <vector>

#include "wavekit/tensor.hpp"
#include "wavekit/wave_kernel.hpp"

namespace wavekit {

/// Position/velocity pair propagated by the wave operator.
struct WpoState {
  FeatureField u;
  FeatureField v;
};

struct WpoOptions {
  LaplacianSymbol symbol = LaplacianSymbol::kContinuous;
};

double softplus(double x);
double softplus_inverse(double y);
double sigmoid(double x);

/// Unconstrained layer parameters; the physical values are their softplus.
struct WpoLayerParams {
  double raw_v = 0.0;
  double raw_alpha = 0.0;
  double raw_t = 0.0;

  WaveParams physical() const;
  static WpoLayerParams from_physical(const WaveParams& p);
};

/// Optional initial velocity derived from the initial field.
struct VelocityInit {
  enum class Mode { kZero, kLinearProjection };
  Mode mode = Mode::kZero;
  std::vector<double> scale;  ///< per channel, projection mode only
  std::vector<double> bias;   ///< per channel, projection mode only
};

FeatureField velocity_init(const FeatureField& u0, const VelocityInit& cfg);

/// Applies the per-frequency 2×2 closed-form transition to (u, v) on the
/// periodic grid, channel by channel. `max_imag`, when given, receives the
/// largest imaginary residue seen before it was discarded.
WpoState wpo_forward(const WpoState& state, const WaveParams& params, const WpoOptions& opts = {},
                     double* max_imag = nullptr);

/// Adjoint of wpo_forward with respect to (u, v): the transposed per-mode matrix.
WpoState wpo_adjoint(const WpoState& grad_out, const WaveParams& params,
                     const WpoOptions& opts = {});

struct WaveParamGrads {
  double d_velocity = 0.0;
  double d_damping = 0.0;
  double d_time = 0.0;
};

/// Gradient of ⟨grad_out, wpo_forward(state)⟩ with respect to (v, α, t).
WaveParamGrads wpo_physical_grads(const WpoState& state, const WpoState& grad_out,
                                  const WaveParams& params, const WpoOptions& opts = {});

struct RawParamGrads {
  double d_raw_v = 0.0;
  double d_raw_alpha = 0.0;
  double d_raw_t = 0.0;
};

/// Same gradient chained through the softplus parameterization.
RawParamGrads wpo_param_grads(const WpoState& state, const WpoState& grad_out,
                              const WpoLayerParams& layer, const WpoOptions& opts = {});

/// Σ over bins and channels of (|v̂|² + ω₀²|û|²)/(H·W).
double modal_energy(const WpoState& state, const WaveParams& params, const WpoOptions& opts = {});

/// Heat-conduction baseline: û_t = e^{-k|ω|²t}·û on the periodic grid.
FeatureField heat_forward(const FeatureField& u, double conductivity, double t,
                          const WpoOptions& opts = {});

struct HeatParamGrads {
  double d_conductivity = 0.0;
  double d_time = 0.0;
};

/// Gradient of ⟨grad_out, heat_forward(u)⟩ with respect to (k, t). The
/// operator is self-adjoint, so the input gradient is heat_forward(grad_out).
HeatParamGrads heat_param_grads(const FeatureField& u, const FeatureField& grad_out,
                                double conductivity, double t, const WpoOptions& opts = {});

}  // namespace wavekit
