#pragma once

#include <cstddef>
#include <vector>

#include "wavekit/tensor.hpp"
#include "wavekit/wpo.hpp"

// Building blocks of the toy backbone. Every backward function accumulates
// parameter gradients into `grad` and returns the input gradient.
namespace wavekit::net {

/// Affine map applied per pixel across channels. weight is out×in, row-major.
struct Linear {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  static Linear zeros(std::size_t in, std::size_t out);
};

FeatureField pointwise(const FeatureField& x, const Linear& l);
FeatureField pointwise_backward(const FeatureField& x, const FeatureField& dy, const Linear& l,
                                Linear& grad);

/// Non-overlapping p×p patches, flattened in (channel, row, column) order,
/// then projected by `l`. Output is (H/p)×(W/p)×l.out.
FeatureField patch_merge(const FeatureField& x, std::size_t p, const Linear& l);
FeatureField patch_merge_backward(const FeatureField& x, const FeatureField& dy, std::size_t p,
                                  const Linear& l, Linear& grad);

struct LayerNormWeights {
  std::vector<double> gamma;
  std::vector<double> beta;

  static LayerNormWeights identity(std::size_t channels);
};

struct LayerNormCache {
  FeatureField xhat;
  std::vector<double> inv_std;  ///< per pixel
};

inline constexpr double kLayerNormEps = 1e-5;

/// Normalizes across channels at every pixel.
FeatureField layer_norm(const FeatureField& x, const LayerNormWeights& w,
                        LayerNormCache* cache = nullptr);
FeatureField layer_norm_backward(const FeatureField& dy, const LayerNormCache& cache,
                                 const LayerNormWeights& w, LayerNormWeights& grad);

/// Per-channel 3×3 convolution with zero padding. kernel is C×3×3.
struct DepthwiseConv {
  std::vector<double> kernel;
  std::vector<double> bias;

  static DepthwiseConv zeros(std::size_t channels);
};

FeatureField depthwise3x3(const FeatureField& x, const DepthwiseConv& w);
FeatureField depthwise3x3_backward(const FeatureField& x, const FeatureField& dy,
                                   const DepthwiseConv& w, DepthwiseConv& grad);

/// x·Φ(x) with the exact normal CDF.
double gelu(double x);
double gelu_grad(double x);
FeatureField gelu(const FeatureField& x);
FeatureField gelu_backward(const FeatureField& x, const FeatureField& dy);

/// Global spatial mixing inside a block. The wave variant propagates
/// (u, 0) and keeps the position output; the heat variant reads k from
/// raw_v and t from raw_t, leaving raw_alpha unused.
FeatureField spectral_mixer(const FeatureField& u, const WpoLayerParams& p, bool heat);
FeatureField spectral_mixer_backward(const FeatureField& u, const FeatureField& dy,
                                     const WpoLayerParams& p, bool heat, WpoLayerParams& grad);

/// Spatial mean per channel.
std::vector<double> global_average_pool(const FeatureField& x);
FeatureField global_average_pool_backward(const Dims& dims, const std::vector<double>& dy);

/// Returns the cross-entropy loss and writes softmax − onehot into dlogits.
double softmax_cross_entropy(const std::vector<double>& logits, std::size_t label,
                             std::vector<double>* dlogits = nullptr);

}  // namespace wavekit::net
