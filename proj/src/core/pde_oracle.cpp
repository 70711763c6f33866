#include "wavekit/pde_oracle.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "wavekit/transforms.hpp"

namespace wavekit {
namespace {

std::size_t checked_steps(double dt, std::size_t steps, double t) {
  const double span = dt * static_cast<double>(steps);
  if (std::abs(span - t) > 1e-12 * std::max(1.0, t)) {
    std::ostringstream os;
    os << "fd_wave_solve: steps*dt = " << span << " does not match propagation time " << t;
    throw std::invalid_argument(os.str());
  }
  return steps;
}

FeatureField padded(const FeatureField& u) {
  FeatureField p(u.height() + 2, u.width() + 2, u.channels());
  for (std::size_t c = 0; c < u.channels(); ++c) {
    for (std::size_t y = 0; y < u.height(); ++y) {
      for (std::size_t x = 0; x < u.width(); ++x) p.at(c, y + 1, x + 1) = u.at(c, y, x);
    }
  }
  return p;
}

void notify(const FdConfig& cfg, std::size_t step, const FeatureField& u) {
  if (!cfg.observer) return;
  if (cfg.boundary == Boundary::kDirichlet) {
    cfg.observer(step, padded(u));
  } else {
    cfg.observer(step, u);
  }
}

void require_finite_state(const FeatureField& u, std::size_t step) {
  for (double v : u.data()) {
    if (!std::isfinite(v)) {
      throw BlowUpError("numerical blow-up at step " + std::to_string(step), step);
    }
  }
}

}  // namespace

double wave_max_dt(double velocity) { return 0.9 / (velocity * std::numbers::sqrt2); }

double heat_max_dt(double conductivity) { return 0.9 / (4.0 * conductivity); }

FeatureField laplacian5(const FeatureField& u, Boundary boundary) {
  FeatureField out(u.dims());
  const std::size_t h = u.height();
  const std::size_t w = u.width();
  const bool periodic = boundary == Boundary::kPeriodic;
  for (std::size_t c = 0; c < u.channels(); ++c) {
    auto in = u.channel(c);
    auto dst = out.channel(c);
    for (std::size_t y = 0; y < h; ++y) {
      const bool has_up = y > 0 || periodic;
      const bool has_down = y + 1 < h || periodic;
      const std::size_t yu = y == 0 ? h - 1 : y - 1;
      const std::size_t yd = y + 1 == h ? 0 : y + 1;
      for (std::size_t x = 0; x < w; ++x) {
        const bool has_left = x > 0 || periodic;
        const bool has_right = x + 1 < w || periodic;
        const std::size_t xl = x == 0 ? w - 1 : x - 1;
        const std::size_t xr = x + 1 == w ? 0 : x + 1;
        double s = -4.0 * in[y * w + x];
        if (has_up) s += in[yu * w + x];
        if (has_down) s += in[yd * w + x];
        if (has_left) s += in[y * w + xl];
        if (has_right) s += in[y * w + xr];
        dst[y * w + x] = s;
      }
    }
  }
  return out;
}

WaveSolution fd_wave_solve(const FeatureField& u0, const FeatureField& v0,
                           const WaveParams& params, const FdConfig& cfg) {
  params.validate();
  if (!(u0.dims() == v0.dims())) throw FieldError("fd_wave_solve: u0/v0 dimension mismatch");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("fd_wave_solve: dt must be > 0");
  if (cfg.steps == 0) throw std::invalid_argument("fd_wave_solve: steps must be >= 1");
  const double max_dt = wave_max_dt(params.velocity);
  if (cfg.dt > max_dt) {
    std::ostringstream os;
    os << "fd_wave_solve: dt=" << cfg.dt << " violates CFL; maximal admissible dt is " << max_dt;
    throw CflError(os.str(), max_dt);
  }
  const std::size_t steps = checked_steps(cfg.dt, cfg.steps, params.time);

  const double dt = cfg.dt;
  const double v2dt2 = params.velocity * params.velocity * dt * dt;
  const double a = params.damping;
  const double half_adt = 0.5 * a * dt;
  const double inv = 1.0 / (1.0 + half_adt);

  FeatureField older = u0;  // uⁿ⁻¹
  FeatureField prev = u0;   // uⁿ
  FeatureField cur(u0.dims());
  {
    const FeatureField lap = laplacian5(u0, cfg.boundary);
    auto d = cur.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
      d[i] = u0.data()[i] + dt * v0.data()[i] +
             0.5 * (v2dt2 * lap.data()[i] - a * dt * dt * v0.data()[i]);
    }
  }
  require_finite_state(cur, 1);
  notify(cfg, 1, cur);

  // After iteration n: older = uⁿ⁻¹, prev = uⁿ, cur = uⁿ⁺¹.
  for (std::size_t n = 1; n <= steps; ++n) {
    const FeatureField lap = laplacian5(cur, cfg.boundary);
    FeatureField next(u0.dims());
    auto nx = next.data();
    auto uc = cur.data();
    auto up = prev.data();
    auto l = lap.data();
    for (std::size_t i = 0; i < nx.size(); ++i) {
      nx[i] = (v2dt2 * l[i] + 2.0 * uc[i] - (1.0 - half_adt) * up[i]) * inv;
    }
    require_finite_state(next, n + 1);
    older = std::move(prev);
    prev = std::move(cur);
    cur = std::move(next);
    if (n + 1 <= steps) notify(cfg, n + 1, cur);
  }
  // prev = uᴺ, cur = uᴺ⁺¹, older = uᴺ⁻¹.
  FeatureField vel(u0.dims());
  for (std::size_t i = 0; i < vel.size(); ++i) {
    vel.data()[i] = (cur.data()[i] - older.data()[i]) / (2.0 * dt);
  }
  return {std::move(prev), std::move(vel)};
}

FeatureField fd_heat_solve(const FeatureField& u0, double conductivity, const FdConfig& cfg) {
  if (!(conductivity > 0.0)) throw std::invalid_argument("fd_heat_solve: k must be > 0");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("fd_heat_solve: dt must be > 0");
  const double max_dt = heat_max_dt(conductivity);
  if (cfg.dt > max_dt) {
    std::ostringstream os;
    os << "fd_heat_solve: dt=" << cfg.dt << " violates stability; maximal admissible dt is "
       << max_dt;
    throw CflError(os.str(), max_dt);
  }
  FeatureField u = u0;
  const double kdt = conductivity * cfg.dt;
  for (std::size_t n = 1; n <= cfg.steps; ++n) {
    const FeatureField lap = laplacian5(u, cfg.boundary);
    auto d = u.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += kdt * lap.data()[i];
    require_finite_state(u, n);
    notify(cfg, n, u);
  }
  return u;
}

double leapfrog_energy(const FeatureField& u_prev, const FeatureField& u_next, double velocity,
                       double dt, Boundary boundary) {
  const FeatureField lap = laplacian5(u_prev, boundary);
  double kinetic = 0.0;
  double potential = 0.0;
  for (std::size_t i = 0; i < u_prev.size(); ++i) {
    const double du = (u_next.data()[i] - u_prev.data()[i]) / dt;
    kinetic += du * du;
    potential -= u_next.data()[i] * lap.data()[i];
  }
  return kinetic + velocity * velocity * potential;
}

double rel_l2(const FeatureField& a, const FeatureField& b) {
  if (!(a.dims() == b.dims())) {
    throw FieldError("rel_l2: dimension mismatch " + a.dims().str() + " vs " + b.dims().str());
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    num += d * d;
    den += b.data()[i] * b.data()[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-30);
}

FeatureField closed_form_discrete(const FeatureField& u0, const FeatureField& v0,
                                  const WaveParams& params, Boundary boundary) {
  params.validate();
  if (!(u0.dims() == v0.dims())) throw FieldError("closed_form_discrete: dimension mismatch");
  const FrequencyGrid grid =
      frequency_grid(u0.height(), u0.width(), boundary, LaplacianSymbol::kFivePoint);
  const PropagationKernel k = kernel_coefficients(params, grid);
  const std::size_t plane = u0.dims().plane();
  if (boundary == Boundary::kDirichlet) {
    const FeatureField a = dst2(u0);
    const FeatureField b = dst2(v0);
    FeatureField q(u0.dims());
    for (std::size_t j = 0; j < q.size(); ++j) {
      const std::size_t i = j % plane;
      q.data()[j] = k.cu[i] * a.data()[j] + k.cv[i] * b.data()[j];
    }
    return idst2(q);
  }
  const SpectralField uh = fft2(u0);
  const SpectralField vh = fft2(v0);
  SpectralField out(u0.dims());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const std::size_t i = j % plane;
    out.data()[j] = k.cu[i] * uh.data()[j] + k.cv[i] * vh.data()[j];
  }
  return ifft2(out);
}

FeatureField band_limit(const FeatureField& field, double keep_fraction) {
  if (!(keep_fraction >= 0.0 && keep_fraction <= 1.0)) {
    throw std::invalid_argument("band_limit: keep_fraction must lie in [0, 1]");
  }
  SpectralField s = fft2(field);
  const std::size_t h = field.height(), w = field.width();
  const auto limit = [&](std::size_t n) {
    return static_cast<long long>(std::floor(keep_fraction * static_cast<double>(n / 2)));
  };
  const auto signed_index = [](std::size_t k, std::size_t n) {
    const auto ki = static_cast<long long>(k), ni = static_cast<long long>(n);
    return ki < (ni + 1) / 2 ? ki : ki - ni;
  };
  const long long ly = limit(h), lx = limit(w);
  for (std::size_t c = 0; c < field.channels(); ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        if (std::llabs(signed_index(y, h)) > ly || std::llabs(signed_index(x, w)) > lx) {
          s.at(c, y, x) = 0.0;
        }
      }
    }
  }
  return ifft2(s);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope: need at least two paired samples");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceStudy convergence_study(const FeatureField& u0, const FeatureField& v0,
                                   const WaveParams& params, const std::vector<double>& dt_list,
                                   Boundary boundary) {
  const FeatureField reference = closed_form_discrete(u0, v0, params, boundary);
  ConvergenceStudy study;
  std::vector<double> dts, errs;
  for (double dt : dt_list) {
    const double ratio = params.time / dt;
    const auto steps = static_cast<std::size_t>(std::llround(ratio));
    if (steps == 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-9) {
      throw std::invalid_argument("convergence_study: dt does not divide propagation time");
    }
    FdConfig cfg;
    cfg.dt = params.time / static_cast<double>(steps);
    cfg.steps = steps;
    cfg.boundary = boundary;
    const WaveSolution sol = fd_wave_solve(u0, v0, params, cfg);
    const double err = rel_l2(sol.u, reference);
    study.rows.push_back({cfg.dt, steps, err});
    dts.push_back(cfg.dt);
    errs.push_back(err);
  }
  if (dts.size() >= 2) study.slope = loglog_slope(dts, errs);
  return study;
}

}  // namespace wavekit
