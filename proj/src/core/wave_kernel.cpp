#include "wavekit/wave_kernel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wavekit/transforms.hpp"

namespace wavekit {

void WaveParams::validate() const {
  if (!std::isfinite(velocity) || !std::isfinite(damping) || !std::isfinite(time)) {
    throw std::invalid_argument("wave params must be finite");
  }
  if (!(velocity > 0.0)) throw std::invalid_argument("wave velocity must be > 0");
  if (damping < 0.0) throw std::invalid_argument("wave damping must be >= 0");
  if (time < 0.0) throw std::invalid_argument("propagation time must be >= 0");
}

double FrequencyGrid::spatial_sq(std::size_t y, std::size_t x) const {
  const double wx = omega_x[x];
  const double wy = omega_y[y];
  if (symbol == LaplacianSymbol::kFivePoint) {
    const double sx = 2.0 * std::sin(0.5 * wx);
    const double sy = 2.0 * std::sin(0.5 * wy);
    return sx * sx + sy * sy;
  }
  return wx * wx + wy * wy;
}

namespace {

std::vector<double> axis_frequencies(std::size_t n, Boundary boundary) {
  std::vector<double> w(n);
  const double pi = std::numbers::pi;
  if (boundary == Boundary::kDirichlet) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = static_cast<double>(i + 1) * pi / static_cast<double>(n + 1);
    }
    return w;
  }
  // Signed index: 0, 1, ..., ⌈n/2⌉-1, -⌊n/2⌋, ..., -1.
  const auto ni = static_cast<long long>(n);
  const long long upper = (ni + 1) / 2;
  for (long long k = 0; k < ni; ++k) {
    const long long s = k < upper ? k : k - ni;
    w[static_cast<std::size_t>(k)] = 2.0 * pi * static_cast<double>(s) / static_cast<double>(n);
  }
  return w;
}

// E·C, E·S and E·dS/dz with E = e^{-γt}, z = ω₀² − γ²,
// C = cos(√z t), S = sin(√z t)/√z (hyperbolic for z < 0). C and S are entire
// in z; near z = 0 the power series is used, which also covers the critical
// limits C → 1, S → t.
struct ModeFunctions {
  double ec;
  double es;
  double ed;
};

constexpr double kSeriesThreshold = 0.5;

ModeFunctions mode_functions(double z, double gamma, double t) {
  const double x = z * t * t;
  if (std::abs(x) < kSeriesThreshold) {
    const double e = std::exp(-gamma * t);
    // C = Σ(-x)^k/(2k)!, S = t·Σ(-x)^k/(2k+1)!, dS/dz = -t³·Σ_{k≥1} k(-x)^{k-1}/(2k+1)!
    double c = 0.0, s = 0.0, d = 0.0;
    double pow_k = 1.0;      // (-x)^k
    double pow_prev = 0.0;   // (-x)^{k-1}
    double fact_even = 1.0;  // (2k)!
    double fact_odd = 1.0;   // (2k+1)!
    for (int k = 0; k < 24; ++k) {
      if (k > 0) fact_even = fact_odd * (2 * k);
      fact_odd = fact_even * (2 * k + 1);
      c += pow_k / fact_even;
      s += pow_k / fact_odd;
      if (k > 0) d -= k * pow_prev / fact_odd;
      pow_prev = pow_k;
      pow_k *= -x;
    }
    const double t3 = t * t * t;
    return {e * c, e * t * s, e * t3 * d};
  }
  if (z > 0.0) {
    const double e = std::exp(-gamma * t);
    const double w = std::sqrt(z);
    const double c = std::cos(w * t);
    const double s = std::sin(w * t) / w;
    return {e * c, e * s, e * (t * c - s) / (2.0 * z)};
  }
  // Overdamped: μ = sqrt(γ² − ω₀²) ≤ γ, so both exponents are non-positive.
  const double mu = std::sqrt(-z);
  const double slow = std::exp((mu - gamma) * t);
  const double fast = std::exp(-(mu + gamma) * t);
  const double ec = 0.5 * (slow + fast);
  const double es = 0.5 * (slow - fast) / mu;
  return {ec, es, (t * ec - es) / (2.0 * z)};
}

}  // namespace

FrequencyGrid frequency_grid(std::size_t height, std::size_t width, Boundary boundary,
                             LaplacianSymbol symbol) {
  const std::size_t min_dim = boundary == Boundary::kDirichlet ? 2 : 1;
  if (height < min_dim || width < min_dim) {
    throw std::invalid_argument("frequency_grid: grid too small for boundary condition");
  }
  FrequencyGrid g;
  g.omega_x = axis_frequencies(width, boundary);
  g.omega_y = axis_frequencies(height, boundary);
  g.boundary = boundary;
  g.symbol = symbol;
  return g;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::kUnderdamped:
      return "underdamped";
    case Regime::kCritical:
      return "critical";
    case Regime::kOverdamped:
      return "overdamped";
  }
  return "unknown";
}

double critical_band(double damping) {
  const double g = 0.5 * damping;
  return 1e-9 * std::max(1.0, g * g);
}

Regime classify_regime(const WaveParams& params, double omega0_sq) {
  const double g = params.gamma();
  const double diff = omega0_sq - g * g;
  const double band = critical_band(params.damping);
  if (diff > band) return Regime::kUnderdamped;
  if (diff < -band) return Regime::kOverdamped;
  return Regime::kCritical;
}

double damped_frequency(const WaveParams& params, double omega0_sq) {
  const Regime r = classify_regime(params, omega0_sq);
  if (r != Regime::kUnderdamped) {
    std::ostringstream os;
    os << "damped_frequency: mode with omega0^2=" << omega0_sq << " is " << to_string(r)
       << " for alpha=" << params.damping;
    throw RegimeError(os.str());
  }
  const double g = params.gamma();
  return std::sqrt(omega0_sq - g * g);
}

ModeMatrix operator*(const ModeMatrix& a, const ModeMatrix& b) {
  return {a.cu * b.cu + a.cv * b.du, a.cu * b.cv + a.cv * b.dv,
          a.du * b.cu + a.dv * b.du, a.du * b.cv + a.dv * b.dv};
}

ModeMatrix mode_matrix(double omega0_sq, double damping, double t) {
  const double g = 0.5 * damping;
  const ModeFunctions f = mode_functions(omega0_sq - g * g, g, t);
  return {f.ec + g * f.es, f.es, -omega0_sq * f.es, f.ec - g * f.es};
}

ModeJacobian mode_jacobian(double omega0_sq, double damping, double t) {
  const double g = 0.5 * damping;
  const ModeFunctions f = mode_functions(omega0_sq - g * g, g, t);
  ModeJacobian j;
  j.value = {f.ec + g * f.es, f.es, -omega0_sq * f.es, f.ec - g * f.es};

  // Partials in (z, γ) with z = ω₀² − γ² held fixed for the γ part.
  const double dec_dz = -0.5 * t * f.es;
  const double des_dz = f.ed;
  const double dec_dg = -t * f.ec;
  const double des_dg = -t * f.es;

  // ∂/∂ω₀² at fixed γ equals ∂/∂z; ∂/∂γ at fixed ω₀² is ∂/∂γ|z − 2γ·∂/∂z.
  j.d_omega0_sq = {dec_dz + g * des_dz, des_dz, -f.es - omega0_sq * des_dz,
                   dec_dz - g * des_dz};
  const double dec = dec_dg - 2.0 * g * dec_dz;
  const double des = des_dg - 2.0 * g * des_dz;
  const ModeMatrix d_gamma{dec + f.es + g * des, des, -omega0_sq * des, dec - f.es - g * des};
  j.d_damping = {0.5 * d_gamma.cu, 0.5 * d_gamma.cv, 0.5 * d_gamma.du, 0.5 * d_gamma.dv};

  // v̂ = ∂û/∂t and v̂_t = −ω₀²û − 2γv̂.
  const ModeMatrix& m = j.value;
  j.d_time = {m.du, m.dv, -omega0_sq * m.cu - 2.0 * g * m.du, -omega0_sq * m.cv - 2.0 * g * m.dv};
  return j;
}

PropagationKernel kernel_coefficients(const WaveParams& params, const FrequencyGrid& grid) {
  params.validate();
  PropagationKernel k;
  k.height = grid.height();
  k.width = grid.width();
  const std::size_t n = k.height * k.width;
  k.cu.resize(n);
  k.cv.resize(n);
  k.du.resize(n);
  k.dv.resize(n);
  k.regime.resize(n);
  const double v2 = params.velocity * params.velocity;
  for (std::size_t y = 0; y < k.height; ++y) {
    for (std::size_t x = 0; x < k.width; ++x) {
      const std::size_t i = y * k.width + x;
      const double w0 = v2 * grid.spatial_sq(y, x);
      const ModeMatrix m = mode_matrix(w0, params.damping, params.time);
      k.cu[i] = m.cu;
      k.cv[i] = m.cv;
      k.du[i] = m.du;
      k.dv[i] = m.dv;
      k.regime[i] = classify_regime(params, w0);
      if (!std::isfinite(m.cu) || !std::isfinite(m.cv) || !std::isfinite(m.du) ||
          !std::isfinite(m.dv)) {
        std::ostringstream os;
        os << "kernel_coefficients: non-finite coefficient at bin (y=" << y << ", x=" << x
           << ") in " << to_string(k.regime[i]) << " regime";
        throw std::logic_error(os.str());
      }
    }
  }
  return k;
}

std::vector<double> heat_kernel(double conductivity, double t, const FrequencyGrid& grid) {
  if (!(conductivity > 0.0) || !std::isfinite(conductivity)) {
    throw std::invalid_argument("heat_kernel: conductivity must be > 0");
  }
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("heat_kernel: time must be >= 0");
  }
  std::vector<double> out(grid.height() * grid.width());
  for (std::size_t y = 0; y < grid.height(); ++y) {
    for (std::size_t x = 0; x < grid.width(); ++x) {
      out[y * grid.width() + x] = std::exp(-conductivity * grid.spatial_sq(y, x) * t);
    }
  }
  return out;
}

FeatureField modal_solution(const FeatureField& u0, const FeatureField& v0,
                            const WaveParams& params, LaplacianSymbol symbol) {
  params.validate();
  if (!(u0.dims() == v0.dims())) {
    throw FieldError("modal_solution: u0 " + u0.dims().str() + " and v0 " + v0.dims().str() +
                     " differ");
  }
  const FrequencyGrid grid = frequency_grid(u0.height(), u0.width(), Boundary::kDirichlet, symbol);
  const double v2 = params.velocity * params.velocity;
  const double g = params.gamma();
  const double t = params.time;

  std::vector<double> omega_d(grid.height() * grid.width());
  for (std::size_t y = 0; y < grid.height(); ++y) {
    for (std::size_t x = 0; x < grid.width(); ++x) {
      const double w0 = v2 * grid.spatial_sq(y, x);
      if (classify_regime(params, w0) != Regime::kUnderdamped) {
        std::ostringstream os;
        os << "modal_solution: mode (n=" << x + 1 << ", m=" << y + 1 << ") is "
           << to_string(classify_regime(params, w0)) << "; only underdamped modes are defined";
        throw RegimeError(os.str());
      }
      omega_d[y * grid.width() + x] = std::sqrt(w0 - g * g);
    }
  }

  const FeatureField a = dst2(u0);
  const FeatureField b_src = dst2(v0);
  FeatureField q(u0.dims());
  const double envelope = std::exp(-g * t);
  const std::size_t plane = u0.dims().plane();
  for (std::size_t c = 0; c < u0.channels(); ++c) {
    for (std::size_t i = 0; i < plane; ++i) {
      const std::size_t j = c * plane + i;
      const double wd = omega_d[i];
      const double amp_a = a.data()[j];
      const double amp_b = (b_src.data()[j] + g * amp_a) / wd;
      q.data()[j] = envelope * (amp_a * std::cos(wd * t) + amp_b * std::sin(wd * t));
    }
  }
  return idst2(q);
}

SpectralRetention spectral_retention(const WaveParams& params, double conductivity,
                                     double omega_sq) {
  params.validate();
  if (!(conductivity > 0.0)) throw std::invalid_argument("conductivity must be > 0");
  if (!(omega_sq >= 0.0)) throw std::invalid_argument("omega_sq must be >= 0");
  const double w0 = params.velocity * params.velocity * omega_sq;
  SpectralRetention r;
  r.wave_gain = std::abs(mode_matrix(w0, params.damping, params.time).cu);
  r.heat_gain = std::exp(-conductivity * omega_sq * params.time);
  r.ratio = r.wave_gain / std::max(r.heat_gain, std::numeric_limits<double>::min());
  r.wave_envelope = std::exp(-params.gamma() * params.time);
  r.regime = classify_regime(params, w0);
  return r;
}

}  // namespace wavekit
