#include <cmath>
#include <random>

#include "doctest.h"
#include "soh/errors.hpp"
#include "soh/geometry.hpp"
#include "soh/gauss_legendre.hpp"

using namespace soh;

namespace {

Vec3 omega_at(double phi, double psi) { return stereo_to_sphere(StereoPoint(phi, psi)).vec(); }

// Central differences of the chart, step h.
struct FdJacobians {
  Vec3 d_phi, d_psi, d_phiphi, d_phipsi, d_psipsi;
};

FdJacobians finite_differences(double phi, double psi, double h) {
  FdJacobians j;
  j.d_phi = (omega_at(phi + h, psi) - omega_at(phi - h, psi)) / (2 * h);
  j.d_psi = (omega_at(phi, psi + h) - omega_at(phi, psi - h)) / (2 * h);
  j.d_phiphi = (omega_at(phi + h, psi) - 2 * omega_at(phi, psi) + omega_at(phi - h, psi)) / (h * h);
  j.d_psipsi = (omega_at(phi, psi + h) - 2 * omega_at(phi, psi) + omega_at(phi, psi - h)) / (h * h);
  j.d_phipsi = (omega_at(phi + h, psi + h) - omega_at(phi + h, psi - h) - omega_at(phi - h, psi + h) +
                omega_at(phi - h, psi - h)) /
               (4 * h * h);
  return j;
}

}  // namespace

TEST_CASE("stereographic map fixed points") {
  CHECK((omega_at(0, 0) - Vec3(0, 0, -1)).norm() < 1e-15);
  CHECK((omega_at(1, 0) - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK((omega_at(3, 4) - Vec3(3.0 / 13, 4.0 / 13, 12.0 / 13)).norm() < 1e-15);

  const auto p = sphere_to_stereo(UnitVector3(3.0 / 13, 4.0 / 13, 12.0 / 13));
  CHECK(p.phi() == doctest::Approx(3).epsilon(1e-13));
  CHECK(p.psi() == doctest::Approx(4).epsilon(1e-13));
  CHECK(p.w() == 1 + p.phi() * p.phi() + p.psi() * p.psi());

  const auto south = sphere_to_stereo(UnitVector3(0, 0, -1));
  CHECK(south.phi() == 0.0);
  CHECK(south.psi() == 0.0);
}

TEST_CASE("north pole is rejected") {
  CHECK_THROWS_AS(sphere_to_stereo(UnitVector3(0, 0, 1)), Error);
  try {
    sphere_to_stereo(UnitVector3(1e-10, 0, 1));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PoleSingular);
  }
  CHECK_THROWS_AS(UnitVector3(0, 0, 0), Error);
}

TEST_CASE("unit norm and round trip on random points") {
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss(0.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const double phi = gauss(rng), psi = gauss(rng);
    const auto om = stereo_to_sphere(StereoPoint(phi, psi));
    CHECK(std::abs(om.vec().norm() - 1.0) < 1e-12);
    const auto back = stereo_to_sphere(sphere_to_stereo(om));
    CHECK((back.vec() - om.vec()).norm() < 1e-12);
  }
  const UnitVector3 u(Vec3(1e3, -2e-3, 5.0));
  CHECK(std::abs(u.vec().norm() - 1.0) < 1e-15);
}

TEST_CASE("jacobians at the origin") {
  const auto j = stereo_jacobians(StereoPoint(0, 0));
  CHECK((j.d_phi - Vec3(2, 0, 0)).norm() < 1e-15);
  CHECK((j.d_psi - Vec3(0, 2, 0)).norm() < 1e-15);
}

TEST_CASE("jacobians agree with finite differences") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const double phi = uni(rng), psi = uni(rng);
    const auto j = stereo_jacobians(StereoPoint(phi, psi));
    const auto fd = finite_differences(phi, psi, 1e-4);
    CHECK((j.d_phi - fd.d_phi).norm() < 1e-7);
    CHECK((j.d_psi - fd.d_psi).norm() < 1e-7);
    CHECK((j.d_phiphi - fd.d_phiphi).norm() < 1e-5);
    CHECK((j.d_phipsi - fd.d_phipsi).norm() < 1e-5);
    CHECK((j.d_psipsi - fd.d_psipsi).norm() < 1e-5);
  }
}

TEST_CASE("finite difference error is second order") {
  const double phi = 0.7, psi = -0.4;
  const Vec3 exact = stereo_jacobians(StereoPoint(phi, psi)).d_phi;
  double prev = 0.0;
  for (double h : {1e-1, 5e-2, 2.5e-2, 1.25e-2}) {
    const double err = (finite_differences(phi, psi, h).d_phi - exact).norm();
    if (prev > 0) CHECK(std::log2(prev / err) >= 1.9);
    prev = err;
  }
}

TEST_CASE("dot-product identities of the chart") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const double phi = uni(rng), psi = uni(rng);
    const StereoPoint p(phi, psi);
    const double w = p.w(), w3 = w * w * w;
    const auto j = stereo_jacobians(p);
    const Vec3 om = stereo_to_sphere(p).vec();
    CHECK(std::abs(j.d_phi.norm() - 2 / w) < 1e-12);
    CHECK(std::abs(j.d_psi.norm() - 2 / w) < 1e-12);
    CHECK(std::abs(j.d_phi.dot(j.d_psi)) < 1e-12);
    CHECK(std::abs(j.d_phi.dot(om)) < 1e-12);
    CHECK(std::abs(j.d_psi.dot(om)) < 1e-12);
    CHECK(std::abs(j.d_phi.dot(j.d_phiphi) + 8 * phi / w3) < 1e-10);
    CHECK(std::abs(j.d_phi.dot(j.d_phipsi) + 8 * psi / w3) < 1e-10);
    CHECK(std::abs(j.d_phi.dot(j.d_psipsi) - 8 * phi / w3) < 1e-10);
    CHECK(std::abs(j.d_psi.dot(j.d_phiphi) - 8 * psi / w3) < 1e-10);
    CHECK(std::abs(j.d_psi.dot(j.d_phipsi) + 8 * phi / w3) < 1e-10);
    CHECK(std::abs(j.d_psi.dot(j.d_psipsi) + 8 * psi / w3) < 1e-10);
  }
}

TEST_CASE("a 16 phi / W^3 coefficient for Omega_phi . Omega_psipsi contradicts finite differences") {
  const double phi = 0.8, psi = 0.3;
  const double w = 1 + phi * phi + psi * psi;
  const auto fd = finite_differences(phi, psi, 1e-4);
  const double measured = fd.d_phi.dot(fd.d_psipsi);
  CHECK(std::abs(measured - 8 * phi / (w * w * w)) < 1e-6);
  CHECK(std::abs(measured - 16 * phi / (w * w * w)) > 1e-2);
}

TEST_CASE("tangential projector") {
  const UnitVector3 ez(0, 0, 1);
  CHECK((tangential_projector(ez, Vec3(1, 2, 3)) - Vec3(1, 2, 0)).norm() < 1e-15);
  CHECK(tangential_projector(ez, ez.vec()).norm() < 1e-15);

  std::mt19937 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.5);
  for (int i = 0; i < 500; ++i) {
    const StereoPoint p(gauss(rng), gauss(rng));
    const auto om = stereo_to_sphere(p);
    const Vec3 a(gauss(rng), gauss(rng), gauss(rng));
    const Vec3 pa = tangential_projector(om, a);
    CHECK(std::abs(pa.dot(om.vec())) < 1e-12);
    CHECK((tangential_projector(om, pa) - pa).norm() < 1e-12);
    CHECK((tangential_projector_stereo(p, a) - pa).norm() < 1e-10);
  }
}

TEST_CASE("Gauss-Legendre rules") {
  for (int n : {1, 2, 5, 16, 64}) {
    const auto gl = gauss_legendre(n);
    double sum = 0.0;
    for (double w : gl.weights) sum += w;
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::is_sorted(gl.nodes.begin(), gl.nodes.end()));
    // exact through degree 2n - 1
    const int k = 2 * n - 2;
    double mom = 0.0;
    for (int i = 0; i < n; ++i) mom += gl.weights[i] * std::pow(gl.nodes[i], k);
    CHECK(mom == doctest::Approx(2.0 / (k + 1)).epsilon(1e-13));
  }
  const auto p = legendre_values(3, 0.5);
  CHECK(p[2] == doctest::Approx(0.5 * (3 * 0.25 - 1)));
  CHECK(p[3] == doctest::Approx(0.5 * (5 * 0.125 - 3 * 0.5)));
  const std::vector<double> c{0.0, 0.0, 1.0};
  CHECK(legendre_series(c, 0.3) == doctest::Approx(0.5 * (3 * 0.09 - 1)));
  CHECK(legendre_series_derivative(c, 0.3) == doctest::Approx(3 * 0.3));
}
