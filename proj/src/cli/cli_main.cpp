#include <cstdlib>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "wavekit/cli/commands.hpp"
#include "wavekit/version.hpp"

namespace wavekit::cli {

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral wave-propagation toolkit", "wavekit"};
  app.set_version_flag("--version", std::string("wavekit ") + kVersion);
  std::string sub, config;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string names;
  for (const auto& n : subcommands()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("subcommand", sub, "one of: " + names)->required();
  app.add_option("--config", config, "JSON configuration file")->required();
  app.add_option("--out", out_dir, "output directory (created if missing)");
  auto* seed_opt = app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--workers", workers, "worker threads; WAVEKIT_WORKERS overrides");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunContext ctx;
    ctx.workers = resolve_workers(workers, std::getenv("WAVEKIT_WORKERS"));
    if (seed_opt->count() > 0) ctx.seed = seed;
    ctx.out_dir = out_dir;
    ctx.config_dir = std::filesystem::path(config).parent_path();
    if (ctx.config_dir.empty()) ctx.config_dir = ".";
    ctx.log = &out;
    std::ifstream in(config);
    if (!in) throw ConfigError("cannot open config " + config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config " + config + " is not valid JSON: " + e.what());
    }
    const int code = run_command(sub, j, ctx);
    if (code == kExitTolerance) err << "wavekit " << sub << ": tolerance check failed\n";
    return code;
  } catch (const std::exception& e) {
    err << "wavekit " << sub << ": " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace wavekit::cli
