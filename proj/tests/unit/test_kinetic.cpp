#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "soh/errors.hpp"
#include "soh/kinetic.hpp"
#include "soh/limit.hpp"
#include "soh/macro.hpp"

using namespace soh;
using namespace soh::kinetic;

namespace {

vmf::CoefficientSet coeffs_at(double kappa) {
  vmf::ModelParams p;
  p.nu = kappa;
  return vmf::assemble_coefficients(p);
}

double langevin(double k) { return 1.0 / std::tanh(k) - 1.0 / k; }

std::array<Field, 3> constant_direction(const TorusGrid& g, const Vec3& om) {
  const Vec3 u = om.normalized();
  std::array<Field, 3> r;
  for (int d = 0; d < 3; ++d) r[d].assign(g.point_count(), u(d));
  return r;
}

// Positive node values exp(random degree-3 harmonic) projected onto the model's coefficients.
Distribution random_positive(const KineticModel& m, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 0.5);
  const auto& sph = m.sphere();
  Eigen::MatrixXd values(m.grid().point_count(), sph.node_count());
  for (Eigen::Index p = 0; p < values.rows(); ++p) {
    std::vector<double> a(sh_count(3));
    for (auto& x : a) x = gauss(rng);
    a[sh_index(1, 0)] += 1.5;
    for (Eigen::Index n = 0; n < values.cols(); ++n) {
      const auto y = real_spherical_harmonics(3, sph.node(n));
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * y[k];
      values(p, n) = std::exp(s);
    }
  }
  return m.from_nodes(values);
}

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

TEST_CASE("moments of the equilibrium") {
  const TorusGrid g(2, 8);
  for (double kappa : {0.5, 1.0, 2.0, 5.0}) {
    const auto cs = coeffs_at(kappa);
    const KineticModel m(g, 12, cs);
    Field rho(g.point_count());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = 1.0 + 0.3 * std::cos(g.coordinate(i, 0));
    const Vec3 om = Vec3(0.3, -0.5, 0.8).normalized();
    const auto f = m.equilibrium(rho, constant_direction(g, om));
    const auto mf = m.moments(f);
    // kinetic Q_f coefficient against the closed form
    const double ck = 1e-9;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      CHECK(std::abs(mf.rho[i] - rho[i]) < 1e-12);
      for (int d = 0; d < 3; ++d) {
        CHECK(std::abs(mf.j[d][i] - rho[i] * langevin(kappa) * om(d)) < ck);
        for (int e = 0; e < 3; ++e) {
          const double expect = rho[i] * cs.c4 * (om(d) * om(e) - (d == e ? 1.0 / 3 : 0.0));
          CHECK(std::abs(mf.q[d][e][i] - expect) < ck);
        }
      }
      CHECK(mf.defined[i]);
    }
    CHECK(m.total_mass(f) == doctest::Approx(g.integrate(rho)).epsilon(1e-13));
  }
}

TEST_CASE("collision annihilates the equilibrium at small concentration") {
  const TorusGrid g(2, 8);
  for (double kappa : {0.5, 1.0, 2.0}) {
    const KineticModel m(g, 12, coeffs_at(kappa));
    Field rho(g.point_count(), 2.5);
    const auto f = m.equilibrium(rho, constant_direction(g, Vec3(1, 1, 0)));
    const auto q = m.collision(f);
    for (Eigen::Index p = 0; p < q.rows(); ++p) CHECK(q.row(p).norm() < 1e-8 * rho[p]);
  }
}

TEST_CASE("dissipation is nonpositive and equals minus D times the Fisher information") {
  const TorusGrid g(2, 8);
  std::mt19937 rng(17);
  for (double kappa : {0.5, 1.0, 3.0}) {
    const auto cs = coeffs_at(kappa);
    const KineticModel m(g, 8, cs);
    for (int trial = 0; trial < 3; ++trial) {
      const auto f = random_positive(m, rng);
      const auto diss = m.collision_dissipation(f);
      const auto fisher = m.relative_fisher_information(f);
      for (std::size_t i = 0; i < diss.size(); ++i) {
        CHECK(diss[i] <= 1e-12);
        CHECK(fisher[i] >= 0.0);
        CHECK(std::abs(diss[i] + cs.params.d_noise * fisher[i]) < 1e-9 * (1.0 + fisher[i]));
      }
    }
  }
}

TEST_CASE("force field is tangent to the sphere") {
  const TorusGrid g(2, 16);
  const auto cs = coeffs_at(1.0);
  const KineticModel m(g, 8, cs);
  const auto s = limit::prepare_well_prepared_data(m, macro::benchmark_state(g), 0.1);
  const auto force = m.force_term(s.f, s.v);
  double worst = 0.0;
  for (Eigen::Index p = 0; p < force[0].rows(); ++p)
    for (Eigen::Index n = 0; n < force[0].cols(); ++n) {
      const Vec3 w = m.sphere().node(n);
      worst = std::max(worst, std::abs(force[0](p, n) * w.x() + force[1](p, n) * w.y() + force[2](p, n) * w.z()));
    }
  CHECK(worst < 1e-13);
}

TEST_CASE("uniform equilibrium is stationary") {
  const TorusGrid g(2, 8);
  const auto cs = coeffs_at(1.0);
  const KineticModel m(g, 12, cs);
  KineticState s;
  s.f = m.equilibrium(Field(g.point_count(), 1.0), constant_direction(g, Vec3(0.2, 0.4, -1.0)));
  for (auto& c : s.v.c) c.assign(g.point_count(), 0.0);
  s.epsilon = 0.1;
  KineticConfig c;
  c.dt = 1e-3;
  c.t_end = 0.1;
  const auto e = m.run(s, c);
  CHECK((e.f - s.f).cwiseAbs().maxCoeff() / c.t_end < 1e-8);
}

TEST_CASE("mass conservation and solenoidal velocity on the benchmark") {
  const TorusGrid g(2, 16);
  const KineticModel m(g, 8, coeffs_at(1.0));
  const auto s0 = limit::prepare_well_prepared_data(m, macro::benchmark_state(g), 0.1);
  KineticConfig c;
  c.dt = 0.5 * m.stable_dt(s0, c);
  c.t_end = 200 * c.dt;
  c.output_every = 50;
  int calls = 0;
  const double m0 = m.total_mass(s0.f);
  const auto s1 = m.run(s0, c, [&](const KineticState& s) {
    ++calls;
    CHECK(g.divergence_norm(s.v) < 1e-10);
  });
  CHECK(calls == 5);
  CHECK(std::abs(m.total_mass(s1.f) - m0) / m0 < 1e-9);
  CHECK(s1.t == doctest::Approx(c.t_end).epsilon(1e-14));
}

TEST_CASE("stable step shrinks with epsilon and oversize steps are refused") {
  const TorusGrid g(2, 8);
  const KineticModel m(g, 6, coeffs_at(1.0));
  auto s = limit::prepare_well_prepared_data(m, macro::benchmark_state(g), 0.2);
  KineticConfig c;
  const double wide = m.stable_dt(s, c);
  s.epsilon = 0.02;
  const double narrow = m.stable_dt(s, c);
  CHECK(narrow < wide);
  c.dt = 2 * narrow;
  CHECK(code_of([&] { m.step(s, c); }) == ErrorCode::CflViolation);
}

TEST_CASE("isotropic data has no mean direction") {
  const TorusGrid g(2, 8);
  const KineticModel m(g, 4, coeffs_at(1.0));
  Distribution f = Distribution::Zero(g.point_count(), m.coeff_count());
  f.col(0).setConstant(std::sqrt(4 * std::numbers::pi));
  const auto mf = m.moments(f);
  CHECK_FALSE(mf.defined[0]);
  CHECK(mf.rho[0] == doctest::Approx(4 * std::numbers::pi));
  CHECK(code_of([&] { m.collision(f); }) == ErrorCode::DegenerateCurrent);
}

TEST_CASE("zero-length runs return the input") {
  const TorusGrid g(2, 8);
  const KineticModel m(g, 4, coeffs_at(1.0));
  const auto s = limit::prepare_well_prepared_data(m, macro::benchmark_state(g), 0.2);
  KineticConfig c;
  c.t_end = 0.0;
  const auto r = m.run(s, c);
  CHECK((r.f - s.f).cwiseAbs().maxCoeff() == 0.0);
}
