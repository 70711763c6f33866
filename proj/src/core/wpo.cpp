#include "wavekit/wpo.hpp"

#include <algorithm>
#include <cmath>

#include "wavekit/transforms.hpp"

namespace wavekit {
namespace {

void require_state(const WpoState& s, const char* op) {
  if (!(s.u.dims() == s.v.dims())) {
    throw FieldError(std::string(op) + ": u " + s.u.dims().str() + " and v " + s.v.dims().str() +
                     " differ");
  }
}

FrequencyGrid periodic_grid(const Dims& d, const WpoOptions& opts) {
  return frequency_grid(d.height, d.width, Boundary::kPeriodic, opts.symbol);
}

// Re Σ conj(g)·(a·x + b·y) over one spectral field, with per-bin a, b.
template <typename CoefA, typename CoefB>
double spectral_pairing(const SpectralField& g, const SpectralField& x, const SpectralField& y,
                        CoefA a, CoefB b) {
  const std::size_t plane = g.dims().plane();
  double s = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const std::size_t i = j % plane;
    const auto z = a(i) * x.data()[j] + b(i) * y.data()[j];
    s += g.data()[j].real() * z.real() + g.data()[j].imag() * z.imag();
  }
  return s;
}

}  // namespace

double softplus(double x) {
  // ln(1 + eˣ) without overflow for large x.
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double softplus_inverse(double y) {
  if (!(y > 0.0)) throw std::invalid_argument("softplus_inverse: argument must be > 0");
  // ln(eʸ − 1) = y + ln(1 − e⁻ʸ)
  return y + std::log(-std::expm1(-y));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

WaveParams WpoLayerParams::physical() const {
  return {softplus(raw_v), softplus(raw_alpha), softplus(raw_t)};
}

WpoLayerParams WpoLayerParams::from_physical(const WaveParams& p) {
  return {softplus_inverse(p.velocity), softplus_inverse(p.damping), softplus_inverse(p.time)};
}

FeatureField velocity_init(const FeatureField& u0, const VelocityInit& cfg) {
  FeatureField out(u0.dims());
  if (cfg.mode == VelocityInit::Mode::kZero) return out;
  if (cfg.scale.size() != u0.channels() || cfg.bias.size() != u0.channels()) {
    throw std::invalid_argument("velocity_init: projection needs one scale and bias per channel");
  }
  for (std::size_t c = 0; c < u0.channels(); ++c) {
    auto src = u0.channel(c);
    auto dst = out.channel(c);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = cfg.scale[c] * src[i] + cfg.bias[c];
  }
  out.check_finite("velocity_init output");
  return out;
}

WpoState wpo_forward(const WpoState& state, const WaveParams& params, const WpoOptions& opts,
                     double* max_imag) {
  require_state(state, "wpo_forward");
  params.validate();
  const PropagationKernel k = kernel_coefficients(params, periodic_grid(state.u.dims(), opts));
  const SpectralField uh = fft2(state.u);
  const SpectralField vh = fft2(state.v);
  SpectralField ut(uh.dims());
  SpectralField vt(uh.dims());
  const std::size_t plane = uh.dims().plane();
  for (std::size_t j = 0; j < uh.size(); ++j) {
    const std::size_t i = j % plane;
    ut.data()[j] = k.cu[i] * uh.data()[j] + k.cv[i] * vh.data()[j];
    vt.data()[j] = k.du[i] * uh.data()[j] + k.dv[i] * vh.data()[j];
  }
  double imag_u = 0.0, imag_v = 0.0;
  WpoState out{ifft2(ut, &imag_u), ifft2(vt, &imag_v)};
  if (max_imag != nullptr) *max_imag = std::max(imag_u, imag_v);
  return out;
}

WpoState wpo_adjoint(const WpoState& grad_out, const WaveParams& params, const WpoOptions& opts) {
  require_state(grad_out, "wpo_adjoint");
  params.validate();
  const PropagationKernel k = kernel_coefficients(params, periodic_grid(grad_out.u.dims(), opts));
  const SpectralField gu = fft2(grad_out.u);
  const SpectralField gv = fft2(grad_out.v);
  SpectralField au(gu.dims());
  SpectralField av(gu.dims());
  const std::size_t plane = gu.dims().plane();
  for (std::size_t j = 0; j < gu.size(); ++j) {
    const std::size_t i = j % plane;
    au.data()[j] = k.cu[i] * gu.data()[j] + k.du[i] * gv.data()[j];
    av.data()[j] = k.cv[i] * gu.data()[j] + k.dv[i] * gv.data()[j];
  }
  return {ifft2(au), ifft2(av)};
}

WaveParamGrads wpo_physical_grads(const WpoState& state, const WpoState& grad_out,
                                  const WaveParams& params, const WpoOptions& opts) {
  require_state(state, "wpo_physical_grads");
  require_state(grad_out, "wpo_physical_grads");
  params.validate();
  const FrequencyGrid grid = periodic_grid(state.u.dims(), opts);
  const std::size_t plane = state.u.dims().plane();
  const double v = params.velocity;

  // Per-bin Jacobians of the transition matrix, with ∂/∂v = 2v|ω|²·∂/∂ω₀².
  std::vector<ModeMatrix> jv(plane), ja(plane), jt(plane);
  for (std::size_t y = 0; y < grid.height(); ++y) {
    for (std::size_t x = 0; x < grid.width(); ++x) {
      const std::size_t i = y * grid.width() + x;
      const double s = grid.spatial_sq(y, x);
      const ModeJacobian j = mode_jacobian(v * v * s, params.damping, params.time);
      const double f = 2.0 * v * s;
      jv[i] = {f * j.d_omega0_sq.cu, f * j.d_omega0_sq.cv, f * j.d_omega0_sq.du,
               f * j.d_omega0_sq.dv};
      ja[i] = j.d_damping;
      jt[i] = j.d_time;
    }
  }

  const SpectralField uh = fft2(state.u);
  const SpectralField vh = fft2(state.v);
  const SpectralField gu = fft2(grad_out.u);
  const SpectralField gv = fft2(grad_out.v);
  const double norm = 1.0 / static_cast<double>(plane);

  auto contract = [&](const std::vector<ModeMatrix>& jm) {
    const double pu = spectral_pairing(
        gu, uh, vh, [&](std::size_t i) { return jm[i].cu; },
        [&](std::size_t i) { return jm[i].cv; });
    const double pv = spectral_pairing(
        gv, uh, vh, [&](std::size_t i) { return jm[i].du; },
        [&](std::size_t i) { return jm[i].dv; });
    return norm * (pu + pv);
  };
  return {contract(jv), contract(ja), contract(jt)};
}

RawParamGrads wpo_param_grads(const WpoState& state, const WpoState& grad_out,
                              const WpoLayerParams& layer, const WpoOptions& opts) {
  const WaveParamGrads g = wpo_physical_grads(state, grad_out, layer.physical(), opts);
  return {g.d_velocity * sigmoid(layer.raw_v), g.d_damping * sigmoid(layer.raw_alpha),
          g.d_time * sigmoid(layer.raw_t)};
}

double modal_energy(const WpoState& state, const WaveParams& params, const WpoOptions& opts) {
  require_state(state, "modal_energy");
  const FrequencyGrid grid = periodic_grid(state.u.dims(), opts);
  const SpectralField uh = fft2(state.u);
  const SpectralField vh = fft2(state.v);
  const std::size_t plane = uh.dims().plane();
  const double v2 = params.velocity * params.velocity;
  double e = 0.0;
  for (std::size_t j = 0; j < uh.size(); ++j) {
    const std::size_t i = j % plane;
    const double w0 = v2 * grid.spatial_sq(i / grid.width(), i % grid.width());
    e += std::norm(vh.data()[j]) + w0 * std::norm(uh.data()[j]);
  }
  return e / static_cast<double>(plane);
}

FeatureField heat_forward(const FeatureField& u, double conductivity, double t,
                          const WpoOptions& opts) {
  const std::vector<double> h = heat_kernel(conductivity, t, periodic_grid(u.dims(), opts));
  SpectralField uh = fft2(u);
  const std::size_t plane = uh.dims().plane();
  for (std::size_t j = 0; j < uh.size(); ++j) uh.data()[j] *= h[j % plane];
  return ifft2(uh);
}

HeatParamGrads heat_param_grads(const FeatureField& u, const FeatureField& grad_out,
                                double conductivity, double t, const WpoOptions& opts) {
  const FrequencyGrid grid = periodic_grid(u.dims(), opts);
  const std::vector<double> h = heat_kernel(conductivity, t, grid);
  const std::size_t plane = u.dims().plane();
  std::vector<double> s(plane);
  for (std::size_t i = 0; i < plane; ++i) s[i] = grid.spatial_sq(i / grid.width(), i % grid.width());
  const SpectralField uh = fft2(u);
  const SpectralField gh = fft2(grad_out);
  const SpectralField zero(uh.dims());
  const double norm = 1.0 / static_cast<double>(plane);
  const auto none = [](std::size_t) { return 0.0; };
  const double dk = spectral_pairing(
      gh, uh, zero, [&](std::size_t i) { return -s[i] * t * h[i]; }, none);
  const double dt = spectral_pairing(
      gh, uh, zero, [&](std::size_t i) { return -s[i] * conductivity * h[i]; }, none);
  return {norm * dk, norm * dt};
}

}  // namespace wavekit
