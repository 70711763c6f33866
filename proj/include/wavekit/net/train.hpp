#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "wavekit/net/model.hpp"

namespace wavekit::net {

/// Four grating classes: {low, high} frequency × {0°, 90°}. Label = 2·high + vertical.
struct SyntheticSpec {
  std::size_t size = 32;
  double low_cycles = 2.0;
  double high_cycles = 12.0;
  double noise = 0.2;
  std::uint64_t seed = 0;
  std::size_t train_count = 512;
  std::size_t test_count = 256;

  void validate() const;
};

inline constexpr std::size_t kSyntheticClasses = 4;

struct Sample {
  FeatureField image;
  std::size_t label = 0;
};

struct Dataset {
  std::vector<Sample> train;
  std::vector<Sample> test;
};

/// sin(2πf·s/size + φ) along x (0°) or y (90°), φ uniform per sample, plus
/// uniform(±noise). Labels cycle 0..3 so both splits are class-balanced.
Dataset make_synthetic(const SyntheticSpec& spec);

struct Evaluation {
  double accuracy = 0.0;
  std::vector<double> class_accuracy;
};

Evaluation evaluate(const std::vector<Sample>& samples, const ModelWeights& w,
                    const ModelConfig& cfg);

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;  ///< mean over the epoch's samples
  Evaluation test;
  double seconds = 0.0;
};

struct TrainOptions {
  std::size_t epochs = 20;
  double lr = 0.05;
  double momentum = 0.9;
  std::size_t batch = 32;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool train_wave_params = true;
  std::optional<WaveParams> initial_wave;  ///< overrides the (1, 0.1, 1) init in every block
  double clip_norm = 1.0;  ///< rescale the batch gradient to this global L2 norm; 0 = off
  double time_budget_seconds = 0.0;  ///< stop after the epoch that crosses it; 0 = none
  std::function<void(const EpochStats&)> on_epoch;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  ModelWeights weights;
  double seconds = 0.0;
};

/// Mini-batch SGD with momentum on mean cross-entropy. Per-sample gradients
/// are reduced in sample order, so results do not depend on `workers`.
TrainReport sgd_train(const Dataset& data, const ModelConfig& cfg, const TrainOptions& opts);

}  // namespace wavekit::net
