#include <string>

#include "doctest.h"
#include "soh/config.hpp"
#include "soh/errors.hpp"
#include "soh/io.hpp"

using namespace soh;
using namespace soh::config;

namespace {

Error error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an Error");
  return Error(ErrorCode::InvariantViolation, "");
}

constexpr const char* kGoldenHash = "24ed757d38135fc99cce06b3594864d90b509889cd5407acc4d0eebf3d9faaa9";

}  // namespace

TEST_CASE("an empty file yields the defaults") {
  const auto c = parse_config("");
  CHECK(c.to_json() == Config::defaults().to_json());
  CHECK(c.integer("grid.n") == 64);
  CHECK(c.real("params.nu") == 1.0);
  CHECK(c.text("init.preset") == "benchmark");
  CHECK(c.list("limit.epsilons") == std::vector<double>{0.2, 0.1, 0.05});
  CHECK(c.boolean("time.imex"));
}

TEST_CASE("the shipped benchmark config hashes to the golden digest") {
  const auto text = io::read_text(std::string(SOH_SOURCE_DIR) + "/configs/benchmark.conf");
  const auto c = parse_config(text);
  CHECK(io::sha256_hex(c.to_json().dump()) == kGoldenHash);
  CHECK(io::sha256_hex(Config::defaults().to_json().dump()) == kGoldenHash);
}

TEST_CASE("sections, dotted keys, comments and value kinds") {
  const auto c = parse_config(
      "# header\n"
      "grid.n = 32\n"
      "[params]\n"
      "nu = 2.5   # trailing comment\n"
      "Re = 3\n"
      "[limit]\n"
      "epsilons = [0.4, 0.2, 0.1, 0.05]\n"
      "[time]\n"
      "imex = false\n"
      "[init]\n"
      "preset = \"uniform\"\n");
  CHECK(c.integer("grid.n") == 32);
  CHECK(c.real("params.nu") == 2.5);
  CHECK(c.real("params.Re") == 3.0);
  CHECK(c.list("limit.epsilons").size() == 4);
  CHECK_FALSE(c.boolean("time.imex"));
  CHECK(c.text("init.preset") == "uniform");
  // inside a section a dotted key is still prefixed
  CHECK(error_of([] { parse_config("[params]\ngrid.n = 32\n"); }).code() == ErrorCode::UnknownKey);
}

TEST_CASE("parse errors carry the position") {
  const auto e = error_of([] { parse_config("[grid]\nn = 64\ndim = \n"); });
  CHECK(e.code() == ErrorCode::ParseError);
  CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  CHECK(error_of([] { parse_config("[grid\n"); }).code() == ErrorCode::ParseError);
  CHECK(error_of([] { parse_config("time.imex = 3\n"); }).code() == ErrorCode::ParseError);
  CHECK(error_of([] { parse_config("init.preset = \"open\n"); }).code() == ErrorCode::ParseError);
}

TEST_CASE("unknown keys and range errors") {
  CHECK(error_of([] { parse_config("params.mu = 1\n"); }).code() == ErrorCode::UnknownKey);
  const auto e = error_of([] { parse_config("[params]\nnu = -1\n"); });
  CHECK(e.code() == ErrorCode::RangeError);
  CHECK(std::string(e.what()).find("params.nu") != std::string::npos);
  CHECK(error_of([] { parse_config("grid.n = 12\n"); }).code() == ErrorCode::RangeError);
  CHECK(error_of([] { parse_config("limit.epsilons = [0.1, 0.2, 0.05]\n"); }).code() == ErrorCode::RangeError);
}

TEST_CASE("environment overrides") {
  auto c = parse_config("params.nu = 2\n");
  apply_env_overrides(c, {"PATH=/usr/bin", "SOH_PARAMS__NU=3.5", "SOH_GRID__N=16", "SOH_PARAMS__RE=4",
                          "SOH_LIMIT__EPSILONS=[0.3, 0.2, 0.1]"});
  CHECK(c.real("params.nu") == 3.5);
  CHECK(c.integer("grid.n") == 16);
  CHECK(c.real("params.Re") == 4.0);
  CHECK(c.list("limit.epsilons").size() == 3);
  CHECK(error_of([&] { apply_env_overrides(c, {"SOH_NOPE=1"}); }).code() == ErrorCode::UnknownKey);
  CHECK(error_of([&] { apply_env_overrides(c, {"SOH_PARAMS__NU=-2"}); }).code() == ErrorCode::RangeError);
}

TEST_CASE("typed views") {
  auto c = parse_config("[params]\nnu = 2\nD = 4\nRe = 10\n[sphere]\nL = 8\n[limit]\ngrid_n = 16\nreference_n = 32\n");
  const auto p = model_params(c);
  CHECK(p.kappa() == 0.5);
  CHECK(p.reynolds == 10.0);
  CHECK(torus_grid(c).point_count() == 64u * 64u);
  const auto l = limit_config(c);
  CHECK(l.grid_n == 16);
  CHECK(l.sphere_degree == 8);
  CHECK(solver_config(c).dt == 1e-3);
  CHECK(kinetic_config(c).current_floor == 1e-8);
  CHECK(error_of([&] { c.real("params.kernel"); }).code() == ErrorCode::ParseError);
}
