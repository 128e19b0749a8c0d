#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "soh/app.hpp"
#include "soh/errors.hpp"
#include "soh/io.hpp"

namespace fs = std::filesystem;

namespace {

// Reads, parses and validates the config, then applies SOH_* overrides.
soh::config::Config load(const std::string& path, soh::app::RunRequest& req) {
  soh::config::Config cfg = soh::config::Config::defaults();
  if (!path.empty()) {
    const auto text = soh::io::read_text(path);
    req.inputs[fs::path(path).filename().string()] = soh::io::sha256_hex(text);
    cfg = soh::config::parse_config(text);
  }
  soh::config::apply_env_overrides(cfg, soh::config::process_environment());
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Self-organized hydrodynamics solver suite"};
  cli.set_version_flag("--version", soh::app::version());
  cli.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::string run_dir;
  std::optional<long> threads;
  std::optional<long> seed;

  const char* blurbs[] = {
      "Assemble the closure coefficients and write the residual certificate",
      "Integrate the macroscopic equations",
      "Integrate the kinetic model at one epsilon",
      "Run the epsilon sweep against the macroscopic reference",
      "Recompute diagnostics for an existing run directory",
  };
  for (std::size_t i = 0; i < std::size(soh::app::kSubcommands); ++i) {
    auto* sub = cli.add_subcommand(soh::app::kSubcommands[i], blurbs[i]);
    sub->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory")->required();
    sub->add_option("--threads", threads, "Worker threads (recorded; solvers are single-threaded)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Seed recorded in the manifest");
    if (std::string(soh::app::kSubcommands[i]) == "check") {
      sub->add_option("--run", run_dir, "Run directory to check")->required()->check(CLI::ExistingDirectory);
    }
  }

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  }

  soh::app::RunRequest req;
  req.subcommand = cli.get_subcommands().front()->get_name();
  req.out = out;
  req.run_dir = run_dir;
  try {
    req.config = load(config_path, req);
    if (threads) req.config.set("run.threads", *threads);
    if (seed) req.config.set("run.seed", *seed);
  } catch (const soh::Error& e) {
    std::cerr << "soh: " << e.what() << "\n";
    fs::create_directories(out);
    soh::io::write_atomic(fs::path(out) / "error.json", soh::io::error_json(e).dump(2) + "\n");
    return soh::exit_status_for(e.code());
  }
  return soh::app::dispatch(req);
}
