#include <cmath>
#include <numbers>

#include "doctest.h"
#include "soh/errors.hpp"
#include "soh/macro.hpp"

using namespace soh;
using namespace soh::macro;

namespace {

const vmf::CoefficientSet& default_coeffs() {
  static const auto cs = vmf::assemble_coefficients(vmf::ModelParams{});
  return cs;
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (double x : f) m = std::max(m, std::abs(x));
  return m;
}

// Amplitude of sin(k x_axis) in f.
double sine_amplitude(const TorusGrid& g, const Field& f, int k, int axis) {
  Field prod(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * std::sin(k * g.coordinate(i, axis));
  return 2.0 * g.integrate(prod) / g.volume();
}

double state_distance(const TorusGrid& g, const MacroState& a, const MacroState& b) {
  double s = 0.0;
  auto add = [&](const Field& x, const Field& y) {
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  };
  add(a.rho_hat, b.rho_hat);
  add(a.phi, b.phi);
  add(a.psi, b.psi);
  for (int d = 0; d < 3; ++d) add(a.v[d], b.v[d]);
  return std::sqrt(s * g.cell_volume());
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

TEST_CASE("uniform states are equilibria") {
  const TorusGrid g(2, 16);
  const auto& cs = default_coeffs();
  const auto s = uniform_state(g, 1.3, 0.4, -0.2);
  CHECK(max_abs(rhs_rho_hat(g, s, cs)) < 1e-15);
  CHECK(max_abs(rhs_phi(g, s, cs)) < 1e-15);
  CHECK(max_abs(rhs_psi(g, s, cs)) < 1e-15);
  const auto rv = rhs_velocity(g, s, cs);
  for (int d = 0; d < 3; ++d) CHECK(max_abs(rv[d]) < 1e-15);

  SolverConfig c;
  c.dt = 1e-2;
  const auto next = step(g, s, cs, c);
  CHECK(state_distance(g, next, s) < 1e-14);
  CHECK(code_of([&] { uniform_state(g, -1.0, 0, 0); }) == ErrorCode::RangeError);
}

TEST_CASE("density tendency special cases") {
  const TorusGrid g(2, 16);
  auto s = uniform_state(g, 1.0, 0.0, 0.0);
  for (std::size_t i = 0; i < s.rho_hat.size(); ++i) s.rho_hat[i] = 1e-3 * std::sin(g.coordinate(i, 0));
  // Omega = -e3 is orthogonal to a gradient along e1
  CHECK(max_abs(rhs_rho_hat(g, s, default_coeffs())) < 1e-15);

  vmf::ModelParams still;
  still.a = 0.0;
  const auto cs0 = vmf::assemble_coefficients(still);
  const auto b = benchmark_state(g);
  auto quiet = b;
  for (auto& c : quiet.v.c) std::fill(c.begin(), c.end(), 0.0);
  CHECK(max_abs(rhs_rho_hat(g, quiet, cs0)) < 1e-15);
}

TEST_CASE("orientation is unit length") {
  const TorusGrid g(2, 32);
  const auto s = benchmark_state(g);
  const auto om = orientation(s);
  for (std::size_t i = 0; i < s.phi.size(); ++i) {
    const double n = std::sqrt(om[0][i] * om[0][i] + om[1][i] * om[1][i] + om[2][i] * om[2][i]);
    CHECK(std::abs(n - 1.0) < 1e-15);
  }
  CHECK(max_w(s) == doctest::Approx(1.05));
  CHECK(max_stereo_radius_sq(s) == doctest::Approx(0.05));
}

TEST_CASE("stress divergence equals the direct divergence of rho Q") {
  const TorusGrid g(2, 64);
  const auto& cs = default_coeffs();
  const auto s = benchmark_state(g);
  const auto om = orientation(s);
  const std::size_t np = g.point_count();
  Field rho(np);
  for (std::size_t p = 0; p < np; ++p) rho[p] = std::exp(s.rho_hat[p]);
  VectorField direct;
  for (auto& c : direct.c) c.assign(np, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < g.dim(); ++j) {
      Field q(np);
      for (std::size_t p = 0; p < np; ++p) q[p] = rho[p] * cs.c4 * (om[i][p] * om[j][p] - (i == j ? 1.0 / 3 : 0.0));
      const auto dq = g.derivative(q, j);
      for (std::size_t p = 0; p < np; ++p) direct[i][p] += dq[p] / rho[p];
    }
  const auto g_term = stress_divergence(g, s, cs);
  for (int d = 0; d < 3; ++d) {
    Field diff(np);
    for (std::size_t p = 0; p < np; ++p) diff[p] = g_term[d][p] - direct[d][p];
    CHECK(max_abs(diff) < 1e-10);
  }
}

TEST_CASE("single-mode linear decay rates") {
  const TorusGrid g(2, 32);
  const auto& cs = default_coeffs();
  SolverConfig c;
  c.dt = 1e-3;
  c.t_end = 0.2;
  const int k = 2;
  const double amp = 1e-4;

  auto phi_mode = uniform_state(g, 1.0, 0.0, 0.0);
  for (std::size_t i = 0; i < g.point_count(); ++i) phi_mode.phi[i] = amp * std::sin(k * g.coordinate(i, 1));
  const auto a = run_macro(g, phi_mode, cs, c);
  const double rate_phi = -std::log(sine_amplitude(g, a.phi, k, 1) / amp) / c.t_end;
  CHECK(std::abs(rate_phi / (cs.gamma * k * k) - 1.0) < 0.01);

  auto psi_mode = uniform_state(g, 1.0, 0.0, 0.0);
  for (std::size_t i = 0; i < g.point_count(); ++i) psi_mode.psi[i] = amp * std::sin(k * g.coordinate(i, 0));
  const auto b = run_macro(g, psi_mode, cs, c);
  const double rate_psi = -std::log(sine_amplitude(g, b.psi, k, 0) / amp) / c.t_end;
  CHECK(std::abs(rate_psi / (cs.gamma * k * k) - 1.0) < 0.01);

  auto v_mode = uniform_state(g, 1.0, 0.0, 0.0);
  for (std::size_t i = 0; i < g.point_count(); ++i) v_mode.v[0][i] = amp * std::sin(k * g.coordinate(i, 1));
  const auto v = run_macro(g, v_mode, cs, c);
  const double rate_v = -std::log(sine_amplitude(g, v.v[0], k, 1) / amp) / c.t_end;
  CHECK(std::abs(rate_v / (k * k / cs.params.reynolds) - 1.0) < 0.01);
}

TEST_CASE("Taylor-Green vortex without stress coupling") {
  vmf::ModelParams p;
  p.b = 0.0;
  const auto cs = vmf::assemble_coefficients(p);
  const TorusGrid g(2, 32);
  auto s = uniform_state(g, 1.0, 0.0, 0.0);
  const double amp = 1e-4;
  for (std::size_t i = 0; i < g.point_count(); ++i) {
    const double x = g.coordinate(i, 0), y = g.coordinate(i, 1);
    s.v[0][i] = amp * std::sin(x) * std::cos(y);
    s.v[1][i] = -amp * std::cos(x) * std::sin(y);
  }
  const auto pr = recover_pressure(g, s, cs);
  Field expected(g.point_count());
  for (std::size_t i = 0; i < g.point_count(); ++i) {
    expected[i] = 0.25 * amp * amp * (std::cos(2 * g.coordinate(i, 0)) + std::cos(2 * g.coordinate(i, 1)));
    expected[i] -= pr[i];
  }
  CHECK(max_abs(expected) < 1e-18);

  SolverConfig c;
  c.dt = 1e-2;
  c.t_end = 0.5;
  const auto e = run_macro(g, s, cs, c);
  const double factor = std::exp(-2.0 * c.t_end / p.reynolds);
  for (std::size_t i = 0; i < g.point_count(); ++i) {
    CHECK(std::abs(e.v[0][i] - factor * s.v[0][i]) < 1e-12 * amp);
  }
}

TEST_CASE("benchmark run conserves mass and stays solenoidal") {
  const TorusGrid g(2, 32);
  const auto& cs = default_coeffs();
  SolverConfig c;
  c.dt = 2e-3;
  c.t_end = 0.4;
  c.output_every = 50;
  const auto s0 = benchmark_state(g);
  const double m0 = mass(g, s0);
  int calls = 0;
  double last_t = -1.0;
  const auto s1 = run_macro(g, s0, cs, c, [&](const MacroState& s) {
    ++calls;
    CHECK(s.t > last_t);
    last_t = s.t;
    CHECK(g.divergence_norm(s.v) < 1e-10);
  });
  CHECK(calls == 5);
  CHECK(s1.t == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(std::abs(mass(g, s1) - m0) / m0 < 1e-9);
  const auto pr = recover_pressure(g, s1, cs);
  CHECK(std::abs(g.integrate(pr)) < 1e-12);
}

TEST_CASE("last step lands on t_end and zero-length runs return the input") {
  const TorusGrid g(2, 16);
  SolverConfig c;
  c.dt = 0.03;
  c.t_end = 0.1;
  const auto s = run_macro(g, benchmark_state(g), default_coeffs(), c);
  CHECK(s.t == doctest::Approx(0.1).epsilon(1e-15));
  c.t_end = 0.0;
  const auto b = benchmark_state(g);
  const auto z = run_macro(g, b, default_coeffs(), c);
  CHECK(state_distance(g, z, b) == 0.0);
}

TEST_CASE("time self-convergence is third order") {
  const TorusGrid g(2, 32);
  const auto& cs = default_coeffs();
  SolverConfig c;
  c.t_end = 0.1;
  MacroState r[3];
  const double dts[3] = {0.01, 0.005, 0.0025};
  for (int k = 0; k < 3; ++k) {
    c.dt = dts[k];
    r[k] = run_macro(g, benchmark_state(g), cs, c);
  }
  const double order = std::log2(state_distance(g, r[0], r[1]) / state_distance(g, r[1], r[2]));
  CHECK(order >= 2.8);
}

TEST_CASE("step guards") {
  const TorusGrid g(2, 16);
  const auto& cs = default_coeffs();
  SolverConfig c;
  c.dt = 5.0;
  CHECK(code_of([&] { step(g, benchmark_state(g), cs, c); }) == ErrorCode::CflViolation);

  auto far = uniform_state(g, 1.0, 0.0, 0.0);
  far.phi[3] = 200.0;
  CHECK(code_of([&] { check_pole_gauge(far); }) == ErrorCode::PoleGaugeExceeded);
  c.dt = 1e-3;
  CHECK(code_of([&] { step(g, far, cs, c); }) == ErrorCode::PoleGaugeExceeded);

  SolverConfig explicit_cfg;
  explicit_cfg.imex = false;
  CHECK(stable_dt(g, benchmark_state(g), cs, explicit_cfg) < stable_dt(g, benchmark_state(g), cs, SolverConfig{}));
}

TEST_CASE("central stencil weights") {
  const std::vector<double> t3{0.0, 0.1, 0.2};
  const auto w3 = central_weights(t3);
  CHECK(w3[0] == doctest::Approx(-5.0));
  CHECK(w3[2] == doctest::Approx(5.0));
  const std::vector<double> t5{1.0, 1.5, 2.0, 2.5, 3.0};
  const auto w5 = central_weights(t5);
  // exact on t^4: d/dt at 2 is 32
  double d = 0.0;
  for (int i = 0; i < 5; ++i) d += w5[i] * std::pow(t5[i], 4);
  CHECK(d == doctest::Approx(32.0).epsilon(1e-12));
  const std::vector<double> uneven{0.0, 0.1, 0.25};
  CHECK(code_of([&] { central_weights(uneven); }) == ErrorCode::TimeMismatch);
}

TEST_CASE("vector-form residuals") {
  const TorusGrid g(2, 16);
  const auto& cs = default_coeffs();
  std::vector<MacroState> u;
  for (int i = 0; i < 3; ++i) {
    auto s = uniform_state(g, 1.2, -0.3, 0.5);
    s.t = 0.1 * i;
    u.push_back(s);
  }
  const auto r = cross_check_vector_form(g, u, cs);
  CHECK(r.rho < 1e-12);
  CHECK(r.omega < 1e-12);
  CHECK(r.v < 1e-12);

  // five-point residuals shrink under dt halving with the corrected coupling only
  const TorusGrid g32(2, 32);
  auto residual = [&](double dt, PsiCoupling coupling) {
    SolverConfig c;
    c.dt = dt;
    c.t_end = 0.05;
    std::vector<MacroState> st{run_macro(g32, benchmark_state(g32), cs, c, {}, coupling)};
    for (int k = 1; k < 5; ++k) st.push_back(step(g32, st.back(), cs, c, coupling));
    return cross_check_vector_form(g32, st, cs).omega;
  };
  CHECK(residual(2e-3, PsiCoupling::Corrected) / residual(1e-3, PsiCoupling::Corrected) >= 4.0);
  CHECK(residual(2e-3, PsiCoupling::Printed) / residual(1e-3, PsiCoupling::Printed) < 1.5);
}
