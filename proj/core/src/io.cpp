#include "soh/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <openssl/evp.h>

namespace soh::io {
namespace {

std::string hex(const unsigned char* data, unsigned int n) {
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < n; ++i) out << std::setw(2) << static_cast<int>(data[i]);
  return out.str();
}

std::vector<char> le_bytes(std::span<const double> values) {
  std::vector<char> out(values.size() * sizeof(double));
  std::memcpy(out.data(), values.data(), out.size());
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < values.size(); ++i) std::reverse(out.begin() + 8 * i, out.begin() + 8 * (i + 1));
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::span<const std::byte> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "SHA-256 digest failed");
  }
  return hex(digest, len);
}

std::string sha256_hex(std::string_view text) { return sha256_hex(std::as_bytes(std::span(text.data(), text.size()))); }

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text(path)); }

std::string sha256_doubles(std::span<const double> values) {
  const auto bytes = le_bytes(values);
  return sha256_hex(std::as_bytes(std::span(bytes.data(), bytes.size())));
}

void write_atomic(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::random_device rd;
  const fs::path tmp = path.string() + ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp, ec);
      throw Error(ErrorCode::Io, "write failed for " + path.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::Io, "rename to " + path.string() + " failed");
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

Table parse_csv(std::string_view text) {
  Table t;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::size_t c = 0;
    while (true) {
      const auto comma = line.find(',', c);
      cells.push_back(line.substr(c, comma == std::string_view::npos ? std::string_view::npos : comma - c));
      if (comma == std::string_view::npos) break;
      c = comma + 1;
    }
    if (header) {
      for (auto cell : cells) t.columns.emplace_back(cell);
      header = false;
      continue;
    }
    if (cells.size() != t.columns.size()) throw Error(ErrorCode::SchemaMismatch, "ragged CSV row");
    std::vector<double> row;
    for (auto cell : cells) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw Error(ErrorCode::SchemaMismatch, "non-numeric CSV cell '" + std::string(cell) + "'");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<std::size_t> grid_shape(const TorusGrid& grid) {
  return std::vector<std::size_t>(grid.dim(), static_cast<std::size_t>(grid.n()));
}

Json snapshot_header(const Snapshot& snap, const std::string& data_file) {
  Json h;
  h["format"] = kSnapshotFormat;
  h["version"] = kSnapshotVersion;
  h["dtype"] = "float64";
  h["endianness"] = "little";
  h["order"] = "row-major";
  h["shape"] = snap.shape;
  h["box_length"] = snap.box_length;
  h["time"] = snap.t;
  h["fields"] = snap.names;
  h["data_file"] = data_file;
  h["extra"] = snap.extra;
  return h;
}

std::pair<fs::path, fs::path> write_snapshot(const fs::path& dir, const std::string& stem, const Snapshot& snap) {
  std::size_t count = 1;
  for (auto s : snap.shape) count *= s;
  std::vector<double> data;
  data.reserve(count * snap.names.size());
  for (const auto& name : snap.names) {
    const auto it = snap.fields.find(name);
    if (it == snap.fields.end() || it->second.size() != count) {
      throw Error(ErrorCode::SchemaMismatch, "field '" + name + "' missing or of the wrong size");
    }
    data.insert(data.end(), it->second.begin(), it->second.end());
  }
  const auto bytes = le_bytes(data);
  const fs::path bin = dir / (stem + ".bin");
  const fs::path json = dir / (stem + ".json");
  write_atomic(bin, std::string_view(bytes.data(), bytes.size()));
  write_atomic(json, snapshot_header(snap, bin.filename().string()).dump(2) + "\n");
  return {json, bin};
}

Snapshot read_snapshot(const fs::path& header_path) {
  Json h;
  try {
    h = Json::parse(read_text(header_path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::SchemaMismatch, header_path.string() + ": " + e.what());
  }
  Snapshot snap;
  try {
    if (h.at("format") != kSnapshotFormat || h.at("version") != kSnapshotVersion || h.at("dtype") != "float64" ||
        h.at("endianness") != "little") {
      throw Error(ErrorCode::SchemaMismatch, header_path.string() + ": unsupported snapshot header");
    }
    snap.t = h.at("time").get<double>();
    snap.shape = h.at("shape").get<std::vector<std::size_t>>();
    snap.box_length = h.at("box_length").get<double>();
    snap.names = h.at("fields").get<std::vector<std::string>>();
    snap.extra = h.value("extra", Json::object());
    std::size_t count = 1;
    for (auto s : snap.shape) count *= s;
    const auto raw = read_text(header_path.parent_path() / h.at("data_file").get<std::string>());
    if (raw.size() != count * snap.names.size() * sizeof(double)) {
      throw Error(ErrorCode::SchemaMismatch, header_path.string() + ": data size does not match the header");
    }
    std::vector<double> values(count * snap.names.size());
    std::memcpy(values.data(), raw.data(), raw.size());
    if constexpr (std::endian::native == std::endian::big) {
      auto* b = reinterpret_cast<char*>(values.data());
      for (std::size_t i = 0; i < values.size(); ++i) std::reverse(b + 8 * i, b + 8 * (i + 1));
    }
    for (std::size_t f = 0; f < snap.names.size(); ++f) {
      snap.fields[snap.names[f]] = Field(values.begin() + f * count, values.begin() + (f + 1) * count);
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, header_path.string() + ": " + e.what());
  }
  return snap;
}

Json error_json(ErrorCode code, const std::string& message) {
  Json j;
  j["error"] = std::string(error_code_name(code));
  j["message"] = message;
  j["exit_status"] = exit_status_for(code);
  return j;
}

Json error_json(const Error& e) { return error_json(e.code(), e.what()); }

Json to_json(const Manifest& m) {
  Json j;
  j["subcommand"] = m.subcommand;
  j["config"] = m.config;
  j["coefficients"] = m.coefficients;
  j["version"] = m.version;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["created"] = m.created;
  j["extra"] = m.extra;
  return j;
}

Manifest manifest_from_json(const Json& j) {
  Manifest m;
  try {
    m.subcommand = j.at("subcommand").get<std::string>();
    m.config = j.at("config");
    m.coefficients = j.at("coefficients");
    m.version = j.at("version").get<std::string>();
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    m.created = j.at("created").get<std::string>();
    m.extra = j.value("extra", Json::object());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("manifest: ") + e.what());
  }
  return m;
}

std::string serialize(const Manifest& m) { return to_json(m).dump(2) + "\n"; }

Json schema_document() {
  auto cols = [](std::initializer_list<std::pair<const char*, const char*>> list) {
    Json c = Json::object();
    for (const auto& [k, v] : list) c[k] = v;
    return c;
  };
  Json s;
  s["coefficients.csv"] = cols({{"kappa", "concentration nu / D"},
                                {"c1", "polarization <cos theta>_M"},
                                {"c2", "GCI-weighted self-advection coefficient"},
                                {"c3", "GCI-weighted pressure coefficient"},
                                {"c4", "Q-tensor amplitude of the VMF"},
                                {"k0", "second moment of the sensing kernel"},
                                {"gamma", "orientation diffusion coefficient"},
                                {"lambda0", "flow-alignment base coefficient"},
                                {"lambda_tilde", "effective flow-alignment coefficient"}});
  s["series.csv"] = cols({{"t", "time"},
                          {"mass", "integral of rho over the torus"},
                          {"E", "energy functional (H^s)"},
                          {"D", "dissipation functional (H^s)"},
                          {"div_norm", "L2 norm of the spectral divergence of v"},
                          {"max_W", "max of 1 + phi^2 + psi^2"}});
  s["kinetic_series.csv"] = cols({{"t", "time"},
                                  {"mass", "integral of f over torus and sphere"},
                                  {"kinetic_energy", "Re ||v||_{L2}^2"},
                                  {"dissipation", "minus the integral of int Q(f) f / M dw over the torus"},
                                  {"max_local_dissipation", "max over x of int Q(f) f / M dw (should be <= 0)"},
                                  {"div_norm", "L2 norm of the spectral divergence of v"}});
  s["study.csv"] = cols({{"eps", "kinetic scaling parameter"},
                         {"sup_norm_vR", "sup over samples of ||v_R||_{H^s}"},
                         {"sup_norm_fR", "sup over samples of the weighted remainder norm of f_R"},
                         {"err_rho", "sup over samples of ||rho^eps - rho_0||_{L2}"},
                         {"err_j", "sup over samples of ||j^eps - c1 rho_0 Omega_0||_{L2}"},
                         {"sup_energy", "sup over samples of the remainder energy functional"},
                         {"phi0_defect", "sup over samples of max_x |int f_R| + |int w f_R|"},
                         {"ok", "1 if the run finished, 0 if it failed"}});
  s["remainder.csv"] = cols({{"t", "sample time"},
                             {"err_rho", "||rho^eps - rho_0||_{L2}"},
                             {"err_j", "||j^eps - c1 rho_0 Omega_0||_{L2}"},
                             {"norm_vR", "||v_R||_{H^s}"},
                             {"norm_fR", "weighted remainder norm of f_R"},
                             {"energy", "remainder energy functional"},
                             {"phi0_defect", "max_x |int f_R| + |int w f_R|"}});
  s["diagnostics.csv"] = cols({{"t", "time"},
                               {"E", "energy functional (macro) or Re ||v||_{H^s}^2 (kinetic)"},
                               {"D", "dissipation functional (macro) or minus the integrated Q f / M (kinetic)"},
                               {"mass", "integral of rho"},
                               {"divergence", "L2 norm of div v"},
                               {"scalar_defect", "L2 norm of int h0 dw (NaN where no stencil)"},
                               {"vector_defect", "L2 norm of the GCI projection of h0 (NaN where no stencil)"},
                               {"envelope", "Gronwall bound at t"}});
  return s;
}

}  // namespace soh::io
