#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include "doctest.h"
#include "soh/errors.hpp"
#include "soh/io.hpp"

using namespace soh;
using namespace soh::io;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("soh_io_test_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvariantViolation;
}

}  // namespace

TEST_CASE("SHA-256 known vectors") {
  CHECK(sha256_hex(std::string_view("")) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex(std::string_view("abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex(std::string_view("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")) ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  const std::vector<double> one{1.0};
  std::string bytes(8, '\0');
  std::memcpy(bytes.data(), one.data(), 8);
  CHECK(sha256_doubles(one) == sha256_hex(std::string_view(bytes)));
}

TEST_CASE("double formatting round-trips") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = uni(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("CSV round trip and schema errors") {
  Table t;
  t.columns = {"t", "mass", "E"};
  t.rows = {{0.0, 1.0, 0.5}, {0.1, 1.0000000000000002, 1.0 / 3.0}};
  const auto text = to_csv(t);
  CHECK(text.rfind("t,mass,E\n", 0) == 0);
  const auto back = parse_csv(text);
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);
  CHECK(code_of([] { parse_csv("a,b\n1,2\n3\n"); }) == ErrorCode::SchemaMismatch);
  CHECK(code_of([] { parse_csv("a,b\n1,x\n"); }) == ErrorCode::SchemaMismatch);
}

TEST_CASE("snapshot round trip and byte layout") {
  TempDir dir;
  Snapshot s;
  s.t = 0.25;
  s.shape = {2, 3};
  s.box_length = 6.0;
  s.names = {"rho", "phi"};
  s.fields["rho"] = {1, 2, 3, 4, 5, 6};
  s.fields["phi"] = {-1, -2, -3, -4, -5, 0.125};
  s.extra["note"] = "x";
  const auto [json, bin] = write_snapshot(dir.path, "snap_000001", s);
  CHECK(fs::file_size(bin) == 12 * sizeof(double));

  // little-endian float64, fields concatenated in name order
  const auto raw = read_text(bin);
  double seventh = 0.0;
  std::memcpy(&seventh, raw.data() + 6 * sizeof(double), sizeof(double));
  if constexpr (std::endian::native == std::endian::little) CHECK(seventh == -1.0);
  CHECK(static_cast<unsigned char>(raw[7]) == 0x3f);  // high byte of 1.0 comes last

  const auto back = read_snapshot(json);
  CHECK(back.t == 0.25);
  CHECK(back.shape == s.shape);
  CHECK(back.names == s.names);
  CHECK(back.fields.at("phi") == s.fields.at("phi"));
  CHECK(back.extra["note"] == "x");

  const auto header = Json::parse(read_text(json));
  CHECK(header["format"] == kSnapshotFormat);
  CHECK(header["dtype"] == "float64");
  CHECK(header["data_file"] == "snap_000001.bin");

  Snapshot bad = s;
  bad.fields["phi"].pop_back();
  CHECK(code_of([&] { write_snapshot(dir.path, "bad", bad); }) == ErrorCode::SchemaMismatch);
  fs::resize_file(bin, 8);
  CHECK(code_of([&] { read_snapshot(json); }) == ErrorCode::SchemaMismatch);
}

TEST_CASE("manifest serialization is byte-stable") {
  Manifest m;
  m.subcommand = "macro";
  m.config = Json::parse(R"({"grid": {"n": 32}, "params": {"nu": 1.0}})");
  m.coefficients = Json::parse(R"({"c1": 0.3130352854993313})");
  m.version = "0.1.0";
  m.inputs["config"] = std::string(64, 'a');
  m.outputs["series.csv"] = std::string(64, 'b');
  m.created = "2026-01-01T00:00:00Z";
  const auto text = serialize(m);
  const auto again = serialize(manifest_from_json(Json::parse(text)));
  CHECK(text == again);
  CHECK(code_of([] { manifest_from_json(Json::parse(R"({"subcommand": "x"})")); }) == ErrorCode::SchemaMismatch);
}

TEST_CASE("atomic writes replace whole files") {
  TempDir dir;
  const auto p = dir.path / "out.txt";
  write_atomic(p, "first");
  write_atomic(p, "second");
  CHECK(read_text(p) == "second");
  CHECK(sha256_file(p) == sha256_hex(std::string_view("second")));
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++entries;
  CHECK(entries == 1);
  CHECK(code_of([&] { read_text(dir.path / "missing"); }) == ErrorCode::Io);
}

TEST_CASE("schema documents every CSV") {
  const auto s = schema_document();
  for (const char* name : {"coefficients.csv", "series.csv", "kinetic_series.csv", "remainder.csv", "study.csv",
                           "diagnostics.csv"}) {
    CHECK(s.contains(name));
  }
  const auto e = error_json(ErrorCode::RangeError, "bad");
  CHECK(e["message"] == "bad");
}
