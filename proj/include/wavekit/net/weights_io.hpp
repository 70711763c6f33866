#pragma once

#include <filesystem>

#include "json.hpp"
#include "wavekit/net/model.hpp"

namespace wavekit::net {

nlohmann::json config_to_json(const ModelConfig& cfg);

/// Missing keys keep their defaults; unknown keys and wrong types throw
/// std::invalid_argument.
ModelConfig config_from_json(const nlohmann::json& j);

/// Writes one WFT1 file per parameter tensor plus manifest.json:
///   {"format": "wavekit-weights", "version": 1, "config": {...},
///    "tensors": [{"name", "file", "shape"}, ...]}
/// Tensors are stored as 1×rows×cols with rows = shape[0] and cols the rest.
void save_weights(const std::filesystem::path& dir, const ModelWeights& w, const ModelConfig& cfg);

struct LoadedModel {
  ModelConfig config;
  ModelWeights weights;
};

LoadedModel load_weights(const std::filesystem::path& dir);

}  // namespace wavekit::net
