#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "soh/errors.hpp"
#include "soh/torus.hpp"

namespace soh::io {

using Json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr const char* kSnapshotFormat = "soh-snapshot";
inline constexpr int kSnapshotVersion = 1;

std::string sha256_hex(std::span<const std::byte> bytes);
std::string sha256_hex(std::string_view text);
std::string sha256_file(const fs::path& path);
std::string sha256_doubles(std::span<const double> values);

/// Writes to a sibling temporary and renames over `path`. Throws Io.
void write_atomic(const fs::path& path, std::string_view content);
std::string read_text(const fs::path& path);

/// Shortest round-trip decimal form.
std::string format_double(double x);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
std::string to_csv(const Table& table);
/// Throws SchemaMismatch on ragged rows or non-numeric cells.
Table parse_csv(std::string_view text);

/// Raw little-endian float64 fields, row-major, concatenated in `names` order,
/// plus a JSON header next to it (`<stem>.json`, `<stem>.bin`).
struct Snapshot {
  double t = 0.0;
  std::vector<std::size_t> shape;
  double box_length = 0.0;
  std::vector<std::string> names;
  std::map<std::string, Field> fields;
  Json extra = Json::object();
};

Json snapshot_header(const Snapshot& snap, const std::string& data_file);
/// Returns the (json, bin) paths written.
std::pair<fs::path, fs::path> write_snapshot(const fs::path& dir, const std::string& stem, const Snapshot& snap);
/// Reads `<stem>.json` and its data file. Throws SchemaMismatch, Io.
Snapshot read_snapshot(const fs::path& header_path);

std::vector<std::size_t> grid_shape(const TorusGrid& grid);

/// Machine-readable error record.
Json error_json(const Error& e);
Json error_json(ErrorCode code, const std::string& message);

/// Run manifest. `outputs` maps relative file names to SHA-256 digests.
struct Manifest {
  std::string subcommand;
  Json config = Json::object();
  Json coefficients = Json::object();
  std::string version;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  std::string created;
  Json extra = Json::object();
};

Json to_json(const Manifest& m);
Manifest manifest_from_json(const Json& j);
std::string serialize(const Manifest& m);

/// Column documentation for every CSV a run writes.
Json schema_document();

}  // namespace soh::io
