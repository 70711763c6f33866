#include "wavekit/net/weights_io.hpp"

#include <fstream>
#include <stdexcept>

#include "wavekit/json_reader.hpp"
#include "wavekit/tensor_io.hpp"

namespace wavekit::net {
namespace {

constexpr const char* kFormat = "wavekit-weights";

Dims storage_dims(const std::vector<std::size_t>& shape) {
  std::size_t cols = 1;
  for (std::size_t i = 1; i < shape.size(); ++i) cols *= shape[i];
  return {shape.empty() ? 1 : shape[0], cols, 1};
}

}  // namespace

nlohmann::json config_to_json(const ModelConfig& cfg) {
  return {{"patch_size", cfg.patch_size},         {"stage_dims", cfg.stage_dims},
          {"stage_depths", cfg.stage_depths},     {"ffn_expansion", cfg.ffn_expansion},
          {"num_classes", cfg.num_classes},       {"input_height", cfg.input_height},
          {"input_width", cfg.input_width},       {"input_channels", cfg.input_channels},
          {"heat_baseline", cfg.heat_baseline}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  JsonReader r(j, "model");
  r.get("patch_size", cfg.patch_size);
  r.get("stage_dims", cfg.stage_dims);
  r.get("stage_depths", cfg.stage_depths);
  r.get("ffn_expansion", cfg.ffn_expansion);
  r.get("num_classes", cfg.num_classes);
  r.get("input_height", cfg.input_height);
  r.get("input_width", cfg.input_width);
  r.get("input_channels", cfg.input_channels);
  r.get("heat_baseline", cfg.heat_baseline);
  r.finish();
  cfg.validate();
  return cfg;
}

void save_weights(const std::filesystem::path& dir, const ModelWeights& w, const ModelConfig& cfg) {
  std::filesystem::create_directories(dir);
  nlohmann::json tensors = nlohmann::json::array();
  for_each_param(w, [&](const ParamRef& ref, std::span<const double> v) {
    const std::string file = ref.name + ".wft";
    save_tensor(FeatureField(storage_dims(ref.shape), std::vector<double>(v.begin(), v.end())), dir / file);
    tensors.push_back({{"name", ref.name}, {"file", file}, {"shape", ref.shape}});
  });
  const nlohmann::json manifest = {
      {"format", kFormat}, {"version", 1}, {"config", config_to_json(cfg)}, {"tensors", tensors}};
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
  if (!out) throw std::runtime_error("save_weights: cannot write " + (dir / "manifest.json").string());
}

LoadedModel load_weights(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("load_weights: cannot open " + (dir / "manifest.json").string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("load_weights: manifest is not JSON: ") + e.what());
  }
  JsonReader r(manifest, "manifest");
  std::string format;
  int version = 0;
  r.get("format", format);
  r.get("version", version);
  if (format != kFormat || version != 1) {
    throw std::invalid_argument("load_weights: unsupported format '" + format + "' v" + std::to_string(version));
  }
  const nlohmann::json* cfg_json = r.child("config");
  const nlohmann::json* list = r.child("tensors");
  r.finish();
  if (cfg_json == nullptr || list == nullptr || !list->is_array()) {
    throw std::invalid_argument("load_weights: manifest needs config and tensors");
  }
  LoadedModel m{config_from_json(*cfg_json), {}};
  m.weights = zero_weights(m.config);
  std::size_t i = 0;
  for_each_param(m.weights, [&](const ParamRef& ref, std::span<double> v) {
    if (i >= list->size()) throw std::invalid_argument("load_weights: missing tensor " + ref.name);
    const nlohmann::json& entry = (*list)[i++];
    JsonReader e(entry, "manifest.tensors[" + ref.name + "]");
    std::string name, file;
    std::vector<std::size_t> shape;
    e.get("name", name);
    e.get("file", file);
    e.get("shape", shape);
    e.finish();
    if (name != ref.name || shape != ref.shape) {
      throw std::invalid_argument("load_weights: expected " + ref.name + ", found " + name);
    }
    const FeatureField t = load_tensor(dir / file);
    if (!(t.dims() == storage_dims(shape))) {
      throw std::invalid_argument("load_weights: " + file + " has dims " + t.dims().str());
    }
    std::copy(t.data().begin(), t.data().end(), v.begin());
  });
  if (i != list->size()) throw std::invalid_argument("load_weights: manifest lists extra tensors");
  return m;
}

}  // namespace wavekit::net
