#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace wavekit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitTolerance = 1;
inline constexpr int kExitConfig = 2;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunContext {
  std::filesystem::path config_dir = ".";  ///< relative input paths resolve against this
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;       ///< overrides the config's "seed"
  std::size_t workers = 1;
  std::ostream* log = nullptr;             ///< human-readable summary; null = silent
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand. Returns kExitOk or kExitTolerance; configuration
/// problems throw (ConfigError, std::invalid_argument and friends).
int run_command(const std::string& name, const nlohmann::json& config, const RunContext& ctx);

/// WAVEKIT_WORKERS (when set) wins over the flag. Both must be positive integers.
std::size_t resolve_workers(std::size_t flag, const char* env);

/// Full command line: wavekit <subcommand> --config <file.json> [--out <dir>]
/// [--seed <u64>] [--workers <n>]. Returns the process exit code.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wavekit::cli
