#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "json.hpp"

namespace wavekit {

/// Reads typed fields out of a JSON object and rejects keys nobody asked for.
///
///   JsonReader r(j, "bench");
///   r.get("repeats", cfg.repeats);
///   r.finish();  // throws on any key not read above
class JsonReader {
 public:
  JsonReader(const nlohmann::json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) throw std::invalid_argument(context_ + ": expected a JSON object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  /// Leaves `out` untouched when the key is absent.
  template <typename T>
  bool get(const std::string& key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return false;
    if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
      if (!it->is_number_unsigned()) {
        throw std::invalid_argument(context_ + "." + key + ": expected a non-negative integer, got " + it->dump());
      }
    }
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw std::invalid_argument(context_ + "." + key + ": wrong type (" + it->dump() + ")");
    }
    return true;
  }

  const nlohmann::json* child(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw std::invalid_argument(context_ + ": unknown key '" + it.key() + "'");
    }
  }

  const std::string& context() const { return context_; }

 private:
  const nlohmann::json& j_;
  std::string context_;
  std::set<std::string> seen_;
};

}  // namespace wavekit
