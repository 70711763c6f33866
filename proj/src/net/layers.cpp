#include "wavekit/net/layers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wavekit::net {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw FieldError(what);
}

void require_same(const FeatureField& a, const FeatureField& b, const char* op) {
  require(a.dims() == b.dims(), std::string(op) + ": " + a.dims().str() + " vs " + b.dims().str());
}

// (H/p)×(W/p)×(C·p²) gather of patch vectors.
FeatureField unfold(const FeatureField& x, std::size_t p) {
  require(p > 0 && x.height() % p == 0 && x.width() % p == 0,
          "patch_merge: " + x.dims().str() + " not divisible by patch " + std::to_string(p));
  const std::size_t oh = x.height() / p, ow = x.width() / p;
  FeatureField out(oh, ow, x.channels() * p * p);
  for (std::size_t c = 0; c < x.channels(); ++c)
    for (std::size_t dy = 0; dy < p; ++dy)
      for (std::size_t dx = 0; dx < p; ++dx) {
        const std::size_t k = (c * p + dy) * p + dx;
        for (std::size_t y = 0; y < oh; ++y)
          for (std::size_t xx = 0; xx < ow; ++xx) out.at(k, y, xx) = x.at(c, y * p + dy, xx * p + dx);
      }
  return out;
}

FeatureField fold(const FeatureField& cols, const Dims& dims, std::size_t p) {
  FeatureField out(dims);
  const std::size_t oh = dims.height / p, ow = dims.width / p;
  for (std::size_t c = 0; c < dims.channels; ++c)
    for (std::size_t dy = 0; dy < p; ++dy)
      for (std::size_t dx = 0; dx < p; ++dx) {
        const std::size_t k = (c * p + dy) * p + dx;
        for (std::size_t y = 0; y < oh; ++y)
          for (std::size_t xx = 0; xx < ow; ++xx) out.at(c, y * p + dy, xx * p + dx) = cols.at(k, y, xx);
      }
  return out;
}

}  // namespace

Linear Linear::zeros(std::size_t in, std::size_t out) {
  return {in, out, std::vector<double>(in * out, 0.0), std::vector<double>(out, 0.0)};
}

FeatureField pointwise(const FeatureField& x, const Linear& l) {
  require(x.channels() == l.in, "pointwise: input has " + std::to_string(x.channels()) +
                                    " channels, layer expects " + std::to_string(l.in));
  FeatureField y(x.height(), x.width(), l.out);
  const std::size_t n = x.dims().plane();
  for (std::size_t o = 0; o < l.out; ++o) {
    auto dst = y.channel(o);
    std::fill(dst.begin(), dst.end(), l.bias[o]);
    for (std::size_t i = 0; i < l.in; ++i) {
      const double w = l.weight[o * l.in + i];
      auto src = x.channel(i);
      for (std::size_t q = 0; q < n; ++q) dst[q] += w * src[q];
    }
  }
  return y;
}

FeatureField pointwise_backward(const FeatureField& x, const FeatureField& dy, const Linear& l,
                                Linear& grad) {
  require(dy.channels() == l.out && dy.dims().plane() == x.dims().plane(),
          "pointwise_backward: gradient " + dy.dims().str() + " does not match layer output");
  FeatureField dx(x.dims());
  const std::size_t n = x.dims().plane();
  for (std::size_t o = 0; o < l.out; ++o) {
    auto g = dy.channel(o);
    double gb = 0.0;
    for (std::size_t q = 0; q < n; ++q) gb += g[q];
    grad.bias[o] += gb;
    for (std::size_t i = 0; i < l.in; ++i) {
      auto src = x.channel(i);
      auto dst = dx.channel(i);
      const double w = l.weight[o * l.in + i];
      double gw = 0.0;
      for (std::size_t q = 0; q < n; ++q) {
        gw += g[q] * src[q];
        dst[q] += w * g[q];
      }
      grad.weight[o * l.in + i] += gw;
    }
  }
  return dx;
}

FeatureField patch_merge(const FeatureField& x, std::size_t p, const Linear& l) {
  return pointwise(unfold(x, p), l);
}

FeatureField patch_merge_backward(const FeatureField& x, const FeatureField& dy, std::size_t p,
                                  const Linear& l, Linear& grad) {
  return fold(pointwise_backward(unfold(x, p), dy, l, grad), x.dims(), p);
}

LayerNormWeights LayerNormWeights::identity(std::size_t channels) {
  return {std::vector<double>(channels, 1.0), std::vector<double>(channels, 0.0)};
}

FeatureField layer_norm(const FeatureField& x, const LayerNormWeights& w, LayerNormCache* cache) {
  const std::size_t n = x.dims().plane(), ch = x.channels();
  require(w.gamma.size() == ch && w.beta.size() == ch, "layer_norm: weight size mismatch");
  FeatureField xhat(x.dims());
  std::vector<double> inv_std(n);
  const auto xd = x.data();
  auto hd = xhat.data();
  for (std::size_t q = 0; q < n; ++q) {
    double mean = 0.0;
    for (std::size_t c = 0; c < ch; ++c) mean += xd[c * n + q];
    mean /= static_cast<double>(ch);
    double var = 0.0;
    for (std::size_t c = 0; c < ch; ++c) {
      const double d = xd[c * n + q] - mean;
      var += d * d;
    }
    var /= static_cast<double>(ch);
    inv_std[q] = 1.0 / std::sqrt(var + kLayerNormEps);
    for (std::size_t c = 0; c < ch; ++c) hd[c * n + q] = (xd[c * n + q] - mean) * inv_std[q];
  }
  FeatureField y(x.dims());
  auto yd = y.data();
  for (std::size_t c = 0; c < ch; ++c)
    for (std::size_t q = 0; q < n; ++q) yd[c * n + q] = w.gamma[c] * hd[c * n + q] + w.beta[c];
  if (cache != nullptr) *cache = {std::move(xhat), std::move(inv_std)};
  return y;
}

FeatureField layer_norm_backward(const FeatureField& dy, const LayerNormCache& cache,
                                 const LayerNormWeights& w, LayerNormWeights& grad) {
  require_same(dy, cache.xhat, "layer_norm_backward");
  const std::size_t n = dy.dims().plane(), ch = dy.channels();
  const auto g = dy.data();
  const auto h = cache.xhat.data();
  FeatureField dx(dy.dims());
  auto out = dx.data();
  for (std::size_t c = 0; c < ch; ++c) {
    double gg = 0.0, gbeta = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      gg += g[c * n + q] * h[c * n + q];
      gbeta += g[c * n + q];
    }
    grad.gamma[c] += gg;
    grad.beta[c] += gbeta;
  }
  const double inv_ch = 1.0 / static_cast<double>(ch);
  for (std::size_t q = 0; q < n; ++q) {
    double mean_d = 0.0, mean_dh = 0.0;
    for (std::size_t c = 0; c < ch; ++c) {
      const double d = g[c * n + q] * w.gamma[c];
      mean_d += d;
      mean_dh += d * h[c * n + q];
    }
    mean_d *= inv_ch;
    mean_dh *= inv_ch;
    for (std::size_t c = 0; c < ch; ++c) {
      const double d = g[c * n + q] * w.gamma[c];
      out[c * n + q] = cache.inv_std[q] * (d - mean_d - h[c * n + q] * mean_dh);
    }
  }
  return dx;
}

DepthwiseConv DepthwiseConv::zeros(std::size_t channels) {
  return {std::vector<double>(channels * 9, 0.0), std::vector<double>(channels, 0.0)};
}

FeatureField depthwise3x3(const FeatureField& x, const DepthwiseConv& w) {
  const std::size_t h = x.height(), wd = x.width();
  require(w.kernel.size() == 9 * x.channels() && w.bias.size() == x.channels(),
          "depthwise3x3: weight size mismatch");
  FeatureField y(x.dims());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    const double* k = &w.kernel[9 * c];
    for (std::size_t yy = 0; yy < h; ++yy)
      for (std::size_t xx = 0; xx < wd; ++xx) {
        double s = w.bias[c];
        for (int i = -1; i <= 1; ++i) {
          const auto sy = static_cast<std::ptrdiff_t>(yy) + i;
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) continue;
          for (int j = -1; j <= 1; ++j) {
            const auto sx = static_cast<std::ptrdiff_t>(xx) + j;
            if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(wd)) continue;
            s += k[(i + 1) * 3 + (j + 1)] * x.at(c, sy, sx);
          }
        }
        y.at(c, yy, xx) = s;
      }
  }
  return y;
}

FeatureField depthwise3x3_backward(const FeatureField& x, const FeatureField& dy,
                                   const DepthwiseConv& w, DepthwiseConv& grad) {
  require_same(x, dy, "depthwise3x3_backward");
  const std::size_t h = x.height(), wd = x.width();
  FeatureField dx(x.dims());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    const double* k = &w.kernel[9 * c];
    double* gk = &grad.kernel[9 * c];
    for (std::size_t yy = 0; yy < h; ++yy)
      for (std::size_t xx = 0; xx < wd; ++xx) {
        const double g = dy.at(c, yy, xx);
        grad.bias[c] += g;
        for (int i = -1; i <= 1; ++i) {
          const auto sy = static_cast<std::ptrdiff_t>(yy) + i;
          if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(h)) continue;
          for (int j = -1; j <= 1; ++j) {
            const auto sx = static_cast<std::ptrdiff_t>(xx) + j;
            if (sx < 0 || sx >= static_cast<std::ptrdiff_t>(wd)) continue;
            const int t = (i + 1) * 3 + (j + 1);
            gk[t] += g * x.at(c, sy, sx);
            dx.at(c, sy, sx) += g * k[t];
          }
        }
      }
  }
  return dx;
}

double gelu(double x) { return 0.5 * x * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double gelu_grad(double x) {
  const double cdf = 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
  const double pdf = std::exp(-0.5 * x * x) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
  return cdf + x * pdf;
}

FeatureField gelu(const FeatureField& x) {
  FeatureField y(x.dims());
  std::transform(x.data().begin(), x.data().end(), y.data().begin(),
                 [](double v) { return gelu(v); });
  return y;
}

FeatureField gelu_backward(const FeatureField& x, const FeatureField& dy) {
  require_same(x, dy, "gelu_backward");
  FeatureField dx(x.dims());
  for (std::size_t i = 0; i < x.size(); ++i) dx.data()[i] = dy.data()[i] * gelu_grad(x.data()[i]);
  return dx;
}

FeatureField spectral_mixer(const FeatureField& u, const WpoLayerParams& p, bool heat) {
  if (heat) return heat_forward(u, softplus(p.raw_v), softplus(p.raw_t));
  return wpo_forward({u, FeatureField(u.dims())}, p.physical()).u;
}

FeatureField spectral_mixer_backward(const FeatureField& u, const FeatureField& dy,
                                     const WpoLayerParams& p, bool heat, WpoLayerParams& grad) {
  if (heat) {
    const double k = softplus(p.raw_v), t = softplus(p.raw_t);
    const HeatParamGrads g = heat_param_grads(u, dy, k, t);
    grad.raw_v += g.d_conductivity * sigmoid(p.raw_v);
    grad.raw_t += g.d_time * sigmoid(p.raw_t);
    return heat_forward(dy, k, t);
  }
  const FeatureField zero(u.dims());
  const RawParamGrads g = wpo_param_grads({u, zero}, {dy, zero}, p);
  grad.raw_v += g.d_raw_v;
  grad.raw_alpha += g.d_raw_alpha;
  grad.raw_t += g.d_raw_t;
  return wpo_adjoint({dy, zero}, p.physical()).u;
}

std::vector<double> global_average_pool(const FeatureField& x) {
  std::vector<double> out(x.channels());
  const double inv = 1.0 / static_cast<double>(x.dims().plane());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    double s = 0.0;
    for (double v : x.channel(c)) s += v;
    out[c] = s * inv;
  }
  return out;
}

FeatureField global_average_pool_backward(const Dims& dims, const std::vector<double>& dy) {
  require(dy.size() == dims.channels, "global_average_pool_backward: channel mismatch");
  FeatureField dx(dims);
  const double inv = 1.0 / static_cast<double>(dims.plane());
  for (std::size_t c = 0; c < dims.channels; ++c) {
    auto dst = dx.channel(c);
    std::fill(dst.begin(), dst.end(), dy[c] * inv);
  }
  return dx;
}

double softmax_cross_entropy(const std::vector<double>& logits, std::size_t label,
                             std::vector<double>* dlogits) {
  if (label >= logits.size()) throw std::out_of_range("softmax_cross_entropy: label out of range");
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - m);
  const double log_z = m + std::log(z);
  if (dlogits != nullptr) {
    dlogits->resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) (*dlogits)[i] = std::exp(logits[i] - log_z);
    (*dlogits)[label] -= 1.0;
  }
  return log_z - logits[label];
}

}  // namespace wavekit::net
