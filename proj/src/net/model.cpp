#include "wavekit/net/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace wavekit::net {
namespace {

void fail(const std::string& what) { throw std::invalid_argument("model config: " + what); }

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : gen_(seed) {}
  // Portable [−a, a) draw from the top 53 bits.
  double operator()(double a) {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return a * (2.0 * u - 1.0);
  }

 private:
  std::mt19937_64 gen_;
};

Linear init_linear(std::size_t in, std::size_t out, Uniform& rng) {
  Linear l = Linear::zeros(in, out);
  const double a = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& w : l.weight) w = rng(a);
  return l;
}

}  // namespace

void ModelConfig::validate() const {
  if (patch_size == 0) fail("patch_size must be positive");
  if (stage_dims.empty()) fail("stage_dims must not be empty");
  if (stage_dims.size() != stage_depths.size()) fail("stage_dims and stage_depths differ in length");
  for (std::size_t d : stage_dims)
    if (d == 0) fail("stage dims must be positive");
  for (std::size_t d : stage_depths)
    if (d == 0) fail("stage depths must be >= 1");
  if (ffn_expansion == 0) fail("ffn_expansion must be positive");
  if (num_classes < 2) fail("num_classes must be >= 2");
  if (input_channels == 0) fail("input_channels must be positive");
  const std::size_t factor = patch_size << (stage_dims.size() - 1);
  if (input_height == 0 || input_width == 0 || input_height % factor != 0 ||
      input_width % factor != 0) {
    fail("input " + std::to_string(input_height) + "x" + std::to_string(input_width) +
         " must be divisible by " + std::to_string(factor));
  }
}

ModelWeights zero_weights(const ModelConfig& cfg) {
  cfg.validate();
  ModelWeights w;
  w.patch = Linear::zeros(cfg.input_channels * cfg.patch_size * cfg.patch_size, cfg.stage_dims[0]);
  for (std::size_t s = 0; s < cfg.stage_dims.size(); ++s) {
    const std::size_t d = cfg.stage_dims[s];
    std::vector<BlockWeights> blocks;
    for (std::size_t b = 0; b < cfg.stage_depths[s]; ++b) {
      BlockWeights blk;
      blk.dw = DepthwiseConv::zeros(d);
      blk.ln1 = {std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
      blk.ln2 = blk.ln1;
      blk.fc1 = Linear::zeros(d, d * cfg.ffn_expansion);
      blk.fc2 = Linear::zeros(d * cfg.ffn_expansion, d);
      blocks.push_back(std::move(blk));
    }
    w.stages.push_back(std::move(blocks));
    if (s + 1 < cfg.stage_dims.size()) w.downsample.push_back(Linear::zeros(4 * d, cfg.stage_dims[s + 1]));
  }
  w.head = Linear::zeros(cfg.stage_dims.back(), cfg.num_classes);
  return w;
}

ModelWeights init_weights(const ModelConfig& cfg, std::uint64_t seed) {
  ModelWeights w = zero_weights(cfg);
  Uniform rng(seed);
  w.patch = init_linear(w.patch.in, w.patch.out, rng);
  const WpoLayerParams wave = WpoLayerParams::from_physical({1.0, 0.1, 1.0});
  for (std::size_t s = 0; s < w.stages.size(); ++s) {
    for (BlockWeights& blk : w.stages[s]) {
      const std::size_t d = blk.dw.bias.size();
      for (std::size_t c = 0; c < d; ++c)
        for (std::size_t t = 0; t < 9; ++t) blk.dw.kernel[9 * c + t] = (t == 4 ? 1.0 : 0.0) + rng(0.01);
      blk.ln1 = LayerNormWeights::identity(d);
      blk.ln2 = LayerNormWeights::identity(d);
      blk.wpo = wave;
      blk.fc1 = init_linear(blk.fc1.in, blk.fc1.out, rng);
      blk.fc2 = init_linear(blk.fc2.in, blk.fc2.out, rng);
    }
    if (s < w.downsample.size()) w.downsample[s] = init_linear(w.downsample[s].in, w.downsample[s].out, rng);
  }
  w.head = init_linear(w.head.in, w.head.out, rng);
  return w;
}

std::size_t parameter_count(const ModelWeights& w) {
  std::size_t n = 0;
  for_each_param(w, [&](const ParamRef&, std::span<const double> v) { n += v.size(); });
  return n;
}

void axpy(ModelWeights& a, double scale, const ModelWeights& b) {
  std::vector<std::span<const double>> src;
  for_each_param(b, [&](const ParamRef&, std::span<const double> v) { src.push_back(v); });
  std::size_t i = 0;
  for_each_param(a, [&](const ParamRef& ref, std::span<double> v) {
    if (i >= src.size() || src[i].size() != v.size()) {
      throw std::invalid_argument("axpy: shape mismatch at " + ref.name);
    }
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += scale * src[i][j];
    ++i;
  });
  if (i != src.size()) throw std::invalid_argument("axpy: parameter count mismatch");
}

FeatureField block_forward(const FeatureField& x, const BlockWeights& w, bool heat,
                           BlockCache* cache) {
  BlockCache local;
  BlockCache& c = cache != nullptr ? *cache : local;
  c.x = x;
  c.y1 = x + depthwise3x3(x, w.dw);
  c.n1 = layer_norm(c.y1, w.ln1, &c.ln1);
  c.y2 = c.y1 + spectral_mixer(c.n1, w.wpo, heat);
  c.n2 = layer_norm(c.y2, w.ln2, &c.ln2);
  c.h = pointwise(c.n2, w.fc1);
  c.act = gelu(c.h);
  return c.y2 + pointwise(c.act, w.fc2);
}

FeatureField block_backward(const FeatureField& dy, const BlockCache& c, const BlockWeights& w,
                            bool heat, BlockWeights& grad) {
  const FeatureField d_act = pointwise_backward(c.act, dy, w.fc2, grad.fc2);
  const FeatureField d_h = gelu_backward(c.h, d_act);
  const FeatureField d_n2 = pointwise_backward(c.n2, d_h, w.fc1, grad.fc1);
  const FeatureField dy2 = dy + layer_norm_backward(d_n2, c.ln2, w.ln2, grad.ln2);
  const FeatureField d_n1 = spectral_mixer_backward(c.n1, dy2, w.wpo, heat, grad.wpo);
  const FeatureField dy1 = dy2 + layer_norm_backward(d_n1, c.ln1, w.ln1, grad.ln1);
  return dy1 + depthwise3x3_backward(c.x, dy1, w.dw, grad.dw);
}

std::vector<double> model_forward(const FeatureField& image, const ModelWeights& w,
                                  const ModelConfig& cfg, ForwardCache* cache) {
  if (!(image.dims() == cfg.input_dims())) {
    throw FieldError("model_forward: image " + image.dims().str() + " expected " +
                     cfg.input_dims().str());
  }
  ForwardCache local;
  ForwardCache& c = cache != nullptr ? *cache : local;
  c.image = image;
  c.blocks.assign(w.stages.size(), {});
  c.stage_outputs.clear();
  FeatureField x = patch_merge(image, cfg.patch_size, w.patch);
  for (std::size_t s = 0; s < w.stages.size(); ++s) {
    if (s > 0) x = patch_merge(c.stage_outputs.back(), 2, w.downsample[s - 1]);
    c.blocks[s].resize(w.stages[s].size());
    for (std::size_t b = 0; b < w.stages[s].size(); ++b) {
      x = block_forward(x, w.stages[s][b], cfg.heat_baseline, &c.blocks[s][b]);
    }
    c.stage_outputs.push_back(x);
  }
  c.pooled = global_average_pool(x);
  std::vector<double> logits(w.head.bias);
  for (std::size_t o = 0; o < w.head.out; ++o)
    for (std::size_t i = 0; i < w.head.in; ++i) logits[o] += w.head.weight[o * w.head.in + i] * c.pooled[i];
  return logits;
}

ModelGradient model_backward(const FeatureField& image, std::size_t label, const ModelWeights& w,
                             const ModelConfig& cfg, double loss_scale) {
  ForwardCache c;
  ModelGradient out;
  out.logits = model_forward(image, w, cfg, &c);
  std::vector<double> dlogits;
  out.loss = loss_scale * softmax_cross_entropy(out.logits, label, &dlogits);
  for (double& d : dlogits) d *= loss_scale;
  out.grads = zero_weights(cfg);
  ModelWeights& g = out.grads;

  std::vector<double> dpooled(w.head.in, 0.0);
  for (std::size_t o = 0; o < w.head.out; ++o) {
    g.head.bias[o] += dlogits[o];
    for (std::size_t i = 0; i < w.head.in; ++i) {
      g.head.weight[o * w.head.in + i] += dlogits[o] * c.pooled[i];
      dpooled[i] += dlogits[o] * w.head.weight[o * w.head.in + i];
    }
  }
  FeatureField dx = global_average_pool_backward(c.stage_outputs.back().dims(), dpooled);
  for (std::size_t s = w.stages.size(); s-- > 0;) {
    for (std::size_t b = w.stages[s].size(); b-- > 0;) {
      dx = block_backward(dx, c.blocks[s][b], w.stages[s][b], cfg.heat_baseline, g.stages[s][b]);
    }
    if (s > 0) {
      dx = patch_merge_backward(c.stage_outputs[s - 1], dx, 2, w.downsample[s - 1], g.downsample[s - 1]);
    }
  }
  patch_merge_backward(image, dx, cfg.patch_size, w.patch, g.patch);
  return out;
}

}  // namespace wavekit::net
