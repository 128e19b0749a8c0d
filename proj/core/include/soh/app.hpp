#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "soh/config.hpp"
#include "soh/io.hpp"

namespace soh::app {

namespace fs = std::filesystem;

inline constexpr const char* kSubcommands[] = {"coeffs", "macro", "kinetic", "limit", "check"};

struct RunRequest {
  std::string subcommand;
  config::Config config = config::Config::defaults();
  fs::path out;
  fs::path run_dir;                            // `check` only
  std::map<std::string, std::string> inputs;  // name -> SHA-256 of input files
};

/// Runs one subcommand: manifest first, then every output written atomically,
/// then the manifest again with the output index. Errors are written to
/// `<out>/error.json` and mapped to the exit status (2 config, 3 numeric,
/// 4 invariant). Returns the exit status.
int dispatch(const RunRequest& request);

const char* version();

/// Coefficient set as JSON (also stored in manifests).
io::Json coefficients_json(const vmf::CoefficientSet& cs);

/// Initial macro state for a config (preset or init.file) on `grid`.
macro::MacroState initial_macro_state(const config::Config& cfg, const TorusGrid& grid);

/// Macro snapshot fields: rho_hat, phi, psi, v1, v2, v3, rho, omega1..3.
io::Snapshot macro_snapshot(const TorusGrid& grid, const macro::MacroState& s);
/// Inverse of macro_snapshot, resampled onto `grid` when the shapes differ.
macro::MacroState macro_state_from_snapshot(const io::Snapshot& snap, const TorusGrid& grid);

}  // namespace soh::app
