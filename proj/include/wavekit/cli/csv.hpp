#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace wavekit::cli {

/// Shortest decimal that round-trips the double exactly.
std::string fmt(double v);

/// CSV with a '#' preamble:
///   # tool: wavekit <version>
///   # command: <name>
///   # seed: <seed>
///   # config: <resolved config, compact JSON>
/// followed by the column header and rows.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& command,
            const nlohmann::json& config, std::uint64_t seed, const std::vector<std::string>& columns);

  void row(const std::vector<std::string>& cells);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace wavekit::cli
