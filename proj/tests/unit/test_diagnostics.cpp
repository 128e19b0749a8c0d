#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "soh/diagnostics.hpp"
#include "soh/errors.hpp"

using namespace soh;
using namespace soh::diagnostics;

namespace {

constexpr double kPi = std::numbers::pi;

std::array<Field, 3> constant_direction(const TorusGrid& g, const Vec3& om) {
  const Vec3 u = om.normalized();
  std::array<Field, 3> r;
  for (int d = 0; d < 3; ++d) r[d].assign(g.point_count(), u(d));
  return r;
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

TEST_CASE("Sobolev norms of single modes") {
  const TorusGrid g(2, 16);
  Field s(g.point_count()), c(g.point_count(), 2.0);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(g.coordinate(i, 1));
  CHECK(sobolev_norm(g, s, 0) == doctest::Approx(std::sqrt(2.0) * kPi));
  CHECK(sobolev_norm(g, s, 2) == doctest::Approx(std::sqrt(8.0) * kPi));
  CHECK(sobolev_norm(g, c, 3) == doctest::Approx(4 * kPi));
  CHECK(gradient_sobolev_norm_sq(g, c, 2) < 1e-24);
  CHECK(gradient_sobolev_norm_sq(g, s, 1) == doctest::Approx(4 * kPi * kPi));
  CHECK(code_of([&] { sobolev_norm(g, s, -1); }) == ErrorCode::RangeError);
}

TEST_CASE("weighted norm of multiples of the equilibrium") {
  const TorusGrid g(2, 8);
  const SphereGrid sphere(16);
  for (double kappa : {0.0, 1.0, 4.0}) {
    const auto om = constant_direction(g, Vec3(0.1, -0.7, 0.3));
    const auto m = vmf_table(sphere, om, kappa);
    // the table is a probability density at every point
    for (Eigen::Index p = 0; p < m.rows(); ++p) CHECK(m.row(p).dot(sphere.weights()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(weighted_norm(g, sphere, m, om, kappa) == doctest::Approx(2 * kPi).epsilon(1e-12));
    const Eigen::MatrixXd tripled = 3.0 * m;
    CHECK(weighted_norm(g, sphere, tripled, om, kappa) == doctest::Approx(6 * kPi).epsilon(1e-12));
  }
}

TEST_CASE("macro energy of simple states") {
  const TorusGrid g(2, 16);
  const auto cs = vmf::assemble_coefficients(vmf::ModelParams{});
  auto st = macro::uniform_state(g, 1.0, 0.0, 0.0);
  auto e = energy_functionals_macro(g, st, cs);
  CHECK(e.energy == 0.0);
  CHECK(e.dissipation == 0.0);

  const double amp = 0.3;
  for (std::size_t i = 0; i < g.point_count(); ++i) {
    st.v[0][i] = amp * std::sin(g.coordinate(i, 1));
    st.phi[i] = amp * std::cos(g.coordinate(i, 0));
  }
  e = energy_functionals_macro(g, st, cs);
  const double mode = 8 * kPi * kPi * amp * amp;  // (1 + 1)^2 2 pi^2 amp^2
  CHECK(e.parts[1] == doctest::Approx(mode));
  CHECK(e.parts[3] == doctest::Approx(cs.params.reynolds * mode));
  CHECK(e.energy == doctest::Approx(e.parts[0] + e.parts[1] + e.parts[2] + e.parts[3]));
  CHECK(e.dissipation == doctest::Approx((cs.gamma + 1.0) * mode));
  CHECK(energy_functionals_macro(g, st, cs, 0).energy == doctest::Approx((1 + cs.params.reynolds) * 2 * kPi * kPi * amp * amp));
}

TEST_CASE("kinetic remainder energy") {
  const TorusGrid g(2, 8);
  const auto cs = vmf::assemble_coefficients(vmf::ModelParams{});
  const kinetic::KineticModel model(g, 12, cs);
  const auto om = constant_direction(g, Vec3(0.0, 0.6, -0.8));
  VectorField zero;
  for (auto& c : zero.c) c.assign(g.point_count(), 0.0);

  // f_R = M0: only the purely angular terms survive and nothing dissipates
  const auto f = model.equilibrium(Field(g.point_count(), 1.0), om);
  const auto e = energy_functionals_kinetic(model, zero, f, om, 0.1);
  CHECK(e.terms.at({0, 0}) == doctest::Approx(4 * kPi * kPi).epsilon(1e-9));
  CHECK(e.terms.at({1, 0}) < 1e-20);
  CHECK(e.terms.at({0, 1}) > 0.0);
  CHECK(e.velocity == 0.0);
  CHECK(e.terms.size() == 6);
  // at s = 0 only f_R / M0 = 1 is differentiated
  const auto e0 = energy_functionals_kinetic(model, zero, f, om, 0.1, 0);
  CHECK(e0.terms.size() == 1);
  CHECK(e0.dissipation < 1e-8);

  // f_R = 0 and a shear remainder velocity
  VectorField v = zero;
  for (std::size_t i = 0; i < g.point_count(); ++i) v[0][i] = 0.2 * std::sin(g.coordinate(i, 1));
  const auto ev = energy_functionals_kinetic(model, v, kinetic::Distribution::Zero(g.point_count(), model.coeff_count()),
                                             om, 0.5);
  CHECK(ev.energy == doctest::Approx(8 * kPi * kPi * 0.04));
  CHECK(ev.dissipation == doctest::Approx(8 * kPi * kPi * 0.04));

  // eta0 weights scale the mixed terms
  const auto half = energy_functionals_kinetic(model, zero, f, om, 0.1, 2, 0.5);
  double expect = 0.0;
  for (const auto& [kl, val] : e.terms) expect += std::pow(0.5, kl.first + kl.second) * val;
  CHECK(half.energy == doctest::Approx(expect).epsilon(1e-12));
  CHECK(code_of([&] { energy_functionals_kinetic(model, zero, f, om, 0.0); }) == ErrorCode::RangeError);
}

TEST_CASE("consistency defect vanishes on uniform data") {
  const TorusGrid g(2, 16);
  const auto cs = vmf::assemble_coefficients(vmf::ModelParams{});
  const auto gci = vmf::solve_gci(cs.kappa);
  std::vector<macro::MacroState> states;
  for (int k = 0; k < 5; ++k) {
    auto s = macro::uniform_state(g, 0.8, 0.3, -1.2);
    s.t = 0.01 * k;
    states.push_back(s);
  }
  const auto d = gci_projections_h0(g, states, cs, gci);
  CHECK(d.scalar_norm < 1e-12);
  CHECK(d.vector_norm < 1e-12);
  states[4].t = 0.05;
  CHECK(code_of([&] { gci_projections_h0(g, states, cs, gci); }) == ErrorCode::TimeMismatch);
}

TEST_CASE("surface divergence of tangent fields matches a finite-difference trace") {
  std::mt19937 rng(9);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 w = Vec3(gauss(rng), gauss(rng), gauss(rng)).normalized();
    const Vec3 t(gauss(rng), gauss(rng), gauss(rng));
    Mat3 b;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b(i, j) = gauss(rng);
    // degree-zero extension off the sphere: the surface divergence is the full trace
    auto field = [&](const Vec3& x) {
      const Vec3 u = x.normalized();
      const Vec3 a = t + b * u;
      return Vec3(a - a.dot(u) * u);
    };
    const double h = 1e-5;
    double trace = 0.0;
    for (int d = 0; d < 3; ++d) {
      const Vec3 e = Vec3::Unit(d);
      trace += (field(w + h * e)(d) - field(w - h * e)(d)) / (2 * h);
    }
    CHECK(std::abs(tangent_field_divergence(w, t, b) - trace) < 1e-7);
  }
}

TEST_CASE("envelope controls") {
  std::vector<double> t, decay, jump;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.01 * i);
    decay.push_back(std::exp(-t.back()));
    jump.push_back(i < 50 ? 1.0 : 10.0);
  }
  const auto ok = gronwall_envelope(t, decay);
  CHECK(ok.pass);
  CHECK(ok.margin >= 0.0);
  CHECK(ok.bound.size() == t.size());
  CHECK(ok.bound[0] == decay[0]);

  const auto bad = gronwall_envelope(t, jump);
  CHECK_FALSE(bad.pass);
  CHECK(bad.margin < 0.0);

  const std::vector<double> short_t{0.0, 0.1, 0.2}, short_e{1.0, 1.0, 1.0};
  CHECK(code_of([&] { gronwall_envelope(short_t, short_e); }) == ErrorCode::FitFailed);
  auto neg = decay;
  neg[7] = -1.0;
  CHECK(code_of([&] { gronwall_envelope(t, neg); }) == ErrorCode::FitFailed);
}

TEST_CASE("weighted Poincare inequality on random mean-zero functions") {
  const SphereGrid sphere(8);
  std::mt19937 rng(4);
  std::normal_distribution<double> gauss;
  for (double kappa : {0.0, 1.0, 3.0}) {
    const Vec3 om = Vec3(0.2, 0.9, -0.4).normalized();
    const double lam = vmf::estimate_poincare_constant(kappa, UnitVector3(om), 8);
    for (int trial = 0; trial < 30; ++trial) {
      Eigen::VectorXd u(sphere.coeff_count());
      for (auto& x : u) x = gauss(rng);
      const auto [lhs, grad] = poincare_sides(sphere, u, om, kappa);
      CHECK(lhs <= lam * grad * (1 + 1e-10));
    }
  }
  // equality for a degree-one function at zero concentration
  Eigen::VectorXd y1 = Eigen::VectorXd::Zero(sphere.coeff_count());
  y1(sh_index(1, 0)) = 1.0;
  const auto [lhs, grad] = poincare_sides(sphere, y1, Vec3::UnitZ(), 0.0);
  CHECK(lhs / grad == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(code_of([&] { poincare_sides(sphere, Eigen::VectorXd::Zero(3), Vec3::UnitZ(), 1.0); }) ==
        ErrorCode::DegreeMismatch);
}
