#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wavekit/net/layers.hpp"

namespace wavekit::net {

struct ModelConfig {
  std::size_t patch_size = 4;
  std::vector<std::size_t> stage_dims{16, 32};
  std::vector<std::size_t> stage_depths{2, 2};
  std::size_t ffn_expansion = 4;
  std::size_t num_classes = 4;
  std::size_t input_height = 32;
  std::size_t input_width = 32;
  std::size_t input_channels = 1;
  bool heat_baseline = false;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
  Dims input_dims() const { return {input_height, input_width, input_channels}; }
};

struct BlockWeights {
  DepthwiseConv dw;
  LayerNormWeights ln1;
  LayerNormWeights ln2;
  WpoLayerParams wpo;
  Linear fc1;
  Linear fc2;
};

struct ModelWeights {
  Linear patch;
  std::vector<std::vector<BlockWeights>> stages;
  std::vector<Linear> downsample;  ///< one per stage transition
  Linear head;
};

/// Zero-valued weights with the shapes `cfg` implies.
ModelWeights zero_weights(const ModelConfig& cfg);

/// uniform(±1/√fan_in) projections with zero biases, identity layer norms,
/// depthwise kernels at centre 1 plus uniform(±0.01) noise, and wave params
/// at v = 1, α = 0.1, t = 1.
ModelWeights init_weights(const ModelConfig& cfg, std::uint64_t seed);

struct ParamRef {
  std::string name;
  std::vector<std::size_t> shape;
};

/// Calls f(ParamRef, span) for every parameter tensor in a fixed order.
template <typename Weights, typename F>
void for_each_param(Weights& w, F&& f) {
  auto linear = [&](const std::string& prefix, auto& l) {
    f(ParamRef{prefix + ".weight", {l.out, l.in}}, std::span(l.weight));
    f(ParamRef{prefix + ".bias", {l.out}}, std::span(l.bias));
  };
  linear("patch", w.patch);
  for (std::size_t s = 0; s < w.stages.size(); ++s) {
    for (std::size_t b = 0; b < w.stages[s].size(); ++b) {
      auto& blk = w.stages[s][b];
      const std::string p = "stage" + std::to_string(s) + ".block" + std::to_string(b);
      const std::size_t dim = blk.dw.bias.size();
      f(ParamRef{p + ".dw.kernel", {dim, 3, 3}}, std::span(blk.dw.kernel));
      f(ParamRef{p + ".dw.bias", {dim}}, std::span(blk.dw.bias));
      f(ParamRef{p + ".ln1.gamma", {dim}}, std::span(blk.ln1.gamma));
      f(ParamRef{p + ".ln1.beta", {dim}}, std::span(blk.ln1.beta));
      f(ParamRef{p + ".wpo.raw_v", {1}}, std::span(&blk.wpo.raw_v, 1));
      f(ParamRef{p + ".wpo.raw_alpha", {1}}, std::span(&blk.wpo.raw_alpha, 1));
      f(ParamRef{p + ".wpo.raw_t", {1}}, std::span(&blk.wpo.raw_t, 1));
      f(ParamRef{p + ".ln2.gamma", {dim}}, std::span(blk.ln2.gamma));
      f(ParamRef{p + ".ln2.beta", {dim}}, std::span(blk.ln2.beta));
      linear(p + ".fc1", blk.fc1);
      linear(p + ".fc2", blk.fc2);
    }
    if (s < w.downsample.size()) linear("down" + std::to_string(s), w.downsample[s]);
  }
  linear("head", w.head);
}

std::size_t parameter_count(const ModelWeights& w);

/// a += scale·b, shapes must match.
void axpy(ModelWeights& a, double scale, const ModelWeights& b);

struct BlockCache {
  FeatureField x, y1, n1, y2, n2, h, act;
  LayerNormCache ln1, ln2;
};

/// y1 = x + DWConv(x); y2 = y1 + Mixer(LN1(y1)); y3 = y2 + fc2(gelu(fc1(LN2(y2)))).
FeatureField block_forward(const FeatureField& x, const BlockWeights& w, bool heat,
                           BlockCache* cache = nullptr);
FeatureField block_backward(const FeatureField& dy, const BlockCache& cache, const BlockWeights& w,
                            bool heat, BlockWeights& grad);

struct ForwardCache {
  FeatureField image;
  std::vector<std::vector<BlockCache>> blocks;
  std::vector<FeatureField> stage_outputs;
  std::vector<double> pooled;
};

std::vector<double> model_forward(const FeatureField& image, const ModelWeights& w,
                                  const ModelConfig& cfg, ForwardCache* cache = nullptr);

struct ModelGradient {
  double loss = 0.0;
  std::vector<double> logits;
  ModelWeights grads;
};

/// Exact reverse-mode gradient of loss_scale·CE(model(image), label).
ModelGradient model_backward(const FeatureField& image, std::size_t label, const ModelWeights& w,
                             const ModelConfig& cfg, double loss_scale = 1.0);

}  // namespace wavekit::net
