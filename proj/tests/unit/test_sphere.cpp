#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "soh/errors.hpp"
#include "soh/sphere.hpp"

using namespace soh;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("low-degree harmonics match closed forms") {
  const Vec3 w = Vec3(0.3, -0.5, 0.8).normalized();
  const double c1 = std::sqrt(3.0 / (4 * kPi));
  CHECK(real_spherical_harmonic(0, 0, w) == doctest::Approx(1.0 / std::sqrt(4 * kPi)));
  CHECK(real_spherical_harmonic(1, 0, w) == doctest::Approx(c1 * w.z()));
  CHECK(real_spherical_harmonic(1, 1, w) == doctest::Approx(c1 * w.x()));
  CHECK(real_spherical_harmonic(1, -1, w) == doctest::Approx(c1 * w.y()));
  const double c2 = std::sqrt(5.0 / (16 * kPi));
  CHECK(real_spherical_harmonic(2, 0, w) == doctest::Approx(c2 * (3 * w.z() * w.z() - 1)));
  const double c22 = std::sqrt(15.0 / (16 * kPi));
  CHECK(real_spherical_harmonic(2, 2, w) == doctest::Approx(c22 * (w.x() * w.x() - w.y() * w.y())));
  CHECK(real_spherical_harmonic(2, -2, w) == doctest::Approx(c22 * 2 * w.x() * w.y()));

  const auto all = real_spherical_harmonics(4, w);
  REQUIRE(all.size() == static_cast<std::size_t>(sh_count(4)));
  for (int l = 0; l <= 4; ++l)
    for (int m = -l; m <= l; ++m) CHECK(all[sh_index(l, m)] == doctest::Approx(real_spherical_harmonic(l, m, w)));
}

TEST_CASE("quadrature weights and orthonormality") {
  const SphereGrid grid(10);
  CHECK(grid.weights().sum() == doctest::Approx(4 * kPi).epsilon(1e-13));
  CHECK((grid.weights().array() > 0).all());
  for (Eigen::Index i = 0; i < grid.node_count(); ++i) CHECK(std::abs(grid.node(i).norm() - 1) < 1e-14);
  const Eigen::MatrixXd gram = grid.synthesis().transpose() * grid.weights().asDiagonal() * grid.synthesis();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
  CHECK((gram - id).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(grid.coeff_count() == sh_count(10));
}

TEST_CASE("constant and linear functions occupy their own bands") {
  const SphereGrid grid(6);
  std::vector<double> one(grid.node_count(), 1.0), z(grid.node_count());
  for (Eigen::Index i = 0; i < grid.node_count(); ++i) z[i] = grid.node(i).z();
  const auto s1 = grid.transform(one);
  CHECK(s1(0, 0) == doctest::Approx(std::sqrt(4 * kPi)));
  for (std::size_t k = 1; k < s1.size(); ++k) CHECK(std::abs(s1.coeffs()[k]) < 1e-13);
  const auto sz = grid.transform(z);
  for (int l = 0; l <= 6; ++l)
    for (int m = -l; m <= l; ++m) {
      if (l == 1 && m == 0) continue;
      CHECK(std::abs(sz(l, m)) < 1e-13);
    }
  CHECK(sz(1, 0) == doctest::Approx(std::sqrt(4 * kPi / 3)));
}

TEST_CASE("random band-limited round trip and Parseval") {
  const SphereGrid grid(8);
  std::mt19937 rng(21);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 10; ++trial) {
    SphereSpectrum spec(8);
    for (auto& c : spec.coeffs()) c = gauss(rng);
    const auto values = grid.inverse_transform(spec);
    const auto back = grid.transform(values);
    double err = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) err = std::max(err, std::abs(back.coeffs()[k] - spec.coeffs()[k]));
    CHECK(err < 1e-10);
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) sq[i] = values[i] * values[i];
    CHECK(grid.integrate(sq) == doctest::Approx(spec.norm() * spec.norm()).epsilon(1e-10));
  }
}

TEST_CASE("Laplace-Beltrami eigenvalues") {
  SphereSpectrum spec(4);
  for (auto& c : spec.coeffs()) c = 1.0;
  const auto lap = laplace_beltrami(spec);
  CHECK(lap(0, 0) == 0.0);
  CHECK(lap(1, -1) == -2.0);
  CHECK(lap(3, 2) == -12.0);
  CHECK(lap(4, 0) == -20.0);
}

TEST_CASE("surface gradient table matches finite differences along a great circle") {
  const SphereGrid grid(5);
  const Eigen::Index i = grid.node_count() / 3;
  const Vec3 w = grid.node(i);
  const Vec3 t = Vec3(1, 2, 3).cross(w).normalized();
  const double h = 1e-5;
  for (int l = 0; l <= 5; ++l)
    for (int m = -l; m <= l; ++m) {
      const Vec3 wp = std::cos(h) * w + std::sin(h) * t;
      const Vec3 wm = std::cos(h) * w - std::sin(h) * t;
      const double fd = (real_spherical_harmonic(l, m, wp) - real_spherical_harmonic(l, m, wm)) / (2 * h);
      const int col = sh_index(l, m);
      const Vec3 g(grid.gradient()[0](i, col), grid.gradient()[1](i, col), grid.gradient()[2](i, col));
      CHECK(std::abs(g.dot(t) - fd) < 1e-7);
      CHECK(std::abs(g.dot(w)) < 1e-12);
    }
}

TEST_CASE("size mismatches raise DegreeMismatch") {
  const SphereGrid grid(4);
  std::vector<double> wrong(grid.node_count() + 1, 0.0);
  try {
    (void)grid.transform(wrong);
    FAIL("expected DegreeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegreeMismatch);
  }
  CHECK_THROWS_AS(grid.inverse_transform(SphereSpectrum(5)), Error);
  CHECK_THROWS_AS(SphereGrid(6, 4), Error);
}
