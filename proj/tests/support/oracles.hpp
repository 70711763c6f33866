#pragma once

// Reference computations used only by tests. Everything here is written from
// the defining sums and ODEs, independent of the FFT and closed-form paths.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "wavekit/tensor.hpp"

namespace wavekit::testing {

/// Direct O(N²) DFT of one channel, X[ky,kx] = Σ x·exp(-2πi(ky·y/H + kx·x/W)).
inline std::vector<std::complex<double>> naive_dft2(const FeatureField& f, std::size_t c) {
  const std::size_t h = f.height(), w = f.width();
  std::vector<std::complex<double>> out(h * w);
  const double pi2 = 2.0 * std::numbers::pi;
  for (std::size_t ky = 0; ky < h; ++ky) {
    for (std::size_t kx = 0; kx < w; ++kx) {
      std::complex<double> s{0.0, 0.0};
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          const double ph = -pi2 * (static_cast<double>(ky * y) / static_cast<double>(h) +
                                    static_cast<double>(kx * x) / static_cast<double>(w));
          s += f.at(c, y, x) * std::complex<double>(std::cos(ph), std::sin(ph));
        }
      }
      out[ky * w + kx] = s;
    }
  }
  return out;
}

/// Sine basis function on the Dirichlet interior grid, n along x, m along y.
inline double sine_mode(std::size_t n, std::size_t m, std::size_t y, std::size_t x,
                        std::size_t h, std::size_t w) {
  const double pi = std::numbers::pi;
  return std::sin(pi * static_cast<double>(n * (x + 1)) / static_cast<double>(w + 1)) *
         std::sin(pi * static_cast<double>(m * (y + 1)) / static_cast<double>(h + 1));
}

/// Amplitude of mode (n, m) by direct inner product ⟨f, φ⟩/⟨φ, φ⟩.
inline double projection(const FeatureField& f, std::size_t c, std::size_t n, std::size_t m) {
  double num = 0.0, den = 0.0;
  for (std::size_t y = 0; y < f.height(); ++y) {
    for (std::size_t x = 0; x < f.width(); ++x) {
      const double phi = sine_mode(n, m, y, x, f.height(), f.width());
      num += f.at(c, y, x) * phi;
      den += phi * phi;
    }
  }
  return num / den;
}

struct ScalarState {
  double u;
  double v;
};

/// Classical RK4 on u'' + α·u' + ω₀²·u = 0 from (u0, v0) over time t.
inline ScalarState rk4_damped_oscillator(double omega0_sq, double alpha, double u0, double v0,
                                         double t, double dt) {
  const auto steps = static_cast<long>(std::llround(t / dt));
  const double h = steps > 0 ? t / static_cast<double>(steps) : 0.0;
  double u = u0, v = v0;
  auto acc = [&](double uu, double vv) { return -omega0_sq * uu - alpha * vv; };
  for (long i = 0; i < steps; ++i) {
    const double k1u = v, k1v = acc(u, v);
    const double k2u = v + 0.5 * h * k1v, k2v = acc(u + 0.5 * h * k1u, v + 0.5 * h * k1v);
    const double k3u = v + 0.5 * h * k2v, k3v = acc(u + 0.5 * h * k2u, v + 0.5 * h * k2v);
    const double k4u = v + h * k3v, k4v = acc(u + h * k3u, v + h * k3v);
    u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  return {u, v};
}

/// Zeroes the upper third of the periodic spectrum of every channel (by
/// direct DFT synthesis): keeps modes with |s_x| ≤ kx_max and |s_y| ≤ ky_max.
inline FeatureField band_limit_naive(const FeatureField& f, long kmax) {
  FeatureField out(f.dims());
  const std::size_t h = f.height(), w = f.width();
  const double pi2 = 2.0 * std::numbers::pi;
  for (std::size_t c = 0; c < f.channels(); ++c) {
    const auto spec = naive_dft2(f, c);
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        std::complex<double> s{0.0, 0.0};
        for (std::size_t ky = 0; ky < h; ++ky) {
          const long sy = ky <= h / 2 ? static_cast<long>(ky) : static_cast<long>(ky) - static_cast<long>(h);
          if (std::labs(sy) > kmax) continue;
          for (std::size_t kx = 0; kx < w; ++kx) {
            const long sx = kx <= w / 2 ? static_cast<long>(kx) : static_cast<long>(kx) - static_cast<long>(w);
            if (std::labs(sx) > kmax) continue;
            const double ph = pi2 * (static_cast<double>(ky * y) / static_cast<double>(h) +
                                     static_cast<double>(kx * x) / static_cast<double>(w));
            s += spec[ky * w + kx] * std::complex<double>(std::cos(ph), std::sin(ph));
          }
        }
        out.at(c, y, x) = s.real() / static_cast<double>(h * w);
      }
    }
  }
  return out;
}

}  // namespace wavekit::testing
