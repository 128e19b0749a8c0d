#include "soh/macro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "soh/errors.hpp"

namespace soh::macro {
namespace {

using Pack = std::array<Field, 6>;

Vec3 at(const std::array<Field, 3>& f, std::size_t i) { return Vec3(f[0][i], f[1][i], f[2][i]); }

void put(std::array<Field, 3>& f, std::size_t i, const Vec3& a) {
  for (int d = 0; d < 3; ++d) f[d][i] = a(d);
}

std::array<Field, 3> zeros3(std::size_t n) { return {Field(n, 0.0), Field(n, 0.0), Field(n, 0.0)}; }

// Pointwise geometry and spatial derivatives shared by every tendency.
struct Kinematics {
  Field w;
  std::array<Field, 3> om, om_phi, om_psi;
  std::array<Field, 3> grad_rho, grad_phi, grad_psi;
  Field lap_phi, lap_psi;
  std::array<std::array<Field, 3>, 3> grad_v;  // [i][j] = d_i v_j
};

Kinematics kinematics(const TorusGrid& grid, const MacroState& s) {
  const std::size_t np = grid.point_count();
  Kinematics k;
  k.w.resize(np);
  k.om = zeros3(np);
  k.om_phi = zeros3(np);
  k.om_psi = zeros3(np);
  for (std::size_t i = 0; i < np; ++i) {
    const StereoPoint p(s.phi[i], s.psi[i]);
    k.w[i] = p.w();
    const double w = p.w();
    put(k.om, i, Vec3(2.0 * p.phi() / w, 2.0 * p.psi() / w, (p.phi() * p.phi() + p.psi() * p.psi() - 1.0) / w));
    const auto jac = stereo_jacobians(p);
    put(k.om_phi, i, jac.d_phi);
    put(k.om_psi, i, jac.d_psi);
  }
  const auto rho_s = grid.forward(s.rho_hat);
  const auto phi_s = grid.forward(s.phi);
  const auto psi_s = grid.forward(s.psi);
  for (int d = 0; d < 3; ++d) {
    k.grad_rho[d] = grid.derivative_of(rho_s, d);
    k.grad_phi[d] = grid.derivative_of(phi_s, d);
    k.grad_psi[d] = grid.derivative_of(psi_s, d);
  }
  k.lap_phi = grid.laplacian_of(phi_s);
  k.lap_psi = grid.laplacian_of(psi_s);
  for (int j = 0; j < 3; ++j) {
    const auto vs = grid.forward(s.v[j]);
    for (int i = 0; i < 3; ++i) k.grad_v[i][j] = grid.derivative_of(vs, i);
  }
  return k;
}

Mat3 velocity_gradient(const Kinematics& k, std::size_t p) {
  Mat3 g;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) g(i, j) = k.grad_v[i][j][p];
  }
  return g;
}

// c4 (Omega Omega^T - I / 3)
Mat3 order_tensor(double c4, const Vec3& om) { return c4 * (om * om.transpose() - Mat3::Identity() / 3.0); }

// div(rho Q(Omega)) / rho written through the chart.
Vec3 stress_term(double c4, const Vec3& om, const Vec3& om_phi, const Vec3& om_psi, const Vec3& gr, const Vec3& gp,
                 const Vec3& gs) {
  return order_tensor(c4, om) * gr + c4 * (om.dot(gp) * om_phi + om.dot(gs) * om_psi) +
         c4 * (om_phi.dot(gp) + om_psi.dot(gs)) * om;
}

Field dealiased(const TorusGrid& grid, const Field& f) { return grid.dealias(f); }

// Dealias, Leray-project, optionally add Lap v / Re, all in one spectral pass.
VectorField project_velocity(const TorusGrid& grid, const VectorField& forcing, const VectorField* v, double inv_re) {
  std::array<ComplexField, 3> s;
  for (int d = 0; d < 3; ++d) {
    s[d] = grid.forward(forcing[d]);
    grid.dealias_spectrum(s[d]);
  }
  const std::size_t nm = grid.spectral_count();
  for (std::size_t i = 0; i < nm; ++i) {
    double kk = 0.0;
    std::complex<double> kdot = 0.0;
    for (int d = 0; d < grid.dim(); ++d) {
      const double kd = grid.wavenumber(i, d);
      kk += kd * kd;
      kdot += kd * s[d][i];
    }
    if (kk == 0.0) continue;
    for (int d = 0; d < grid.dim(); ++d) s[d][i] -= grid.wavenumber(i, d) * kdot / kk;
  }
  if (v != nullptr) {
    for (int d = 0; d < 3; ++d) {
      const auto vs = grid.forward((*v)[d]);
      for (std::size_t i = 0; i < nm; ++i) s[d][i] -= inv_re * grid.wavenumber_sq(i) * vs[i];
    }
  }
  VectorField out;
  for (int d = 0; d < 3; ++d) out[d] = grid.inverse(s[d]);
  return out;
}

Pack pack(const MacroState& s) { return {s.rho_hat, s.phi, s.psi, s.v[0], s.v[1], s.v[2]}; }
Pack pack(Rhs&& r) {
  return {std::move(r.rho_hat), std::move(r.phi), std::move(r.psi), std::move(r.v[0]), std::move(r.v[1]),
          std::move(r.v[2])};
}

MacroState unpack(Pack&& p, double t) {
  MacroState s;
  s.rho_hat = std::move(p[0]);
  s.phi = std::move(p[1]);
  s.psi = std::move(p[2]);
  for (int d = 0; d < 3; ++d) s.v[d] = std::move(p[3 + d]);
  s.t = t;
  return s;
}

// x + a y
Pack axpy(const Pack& x, double a, const Pack& y) {
  Pack r = x;
  for (int f = 0; f < 6; ++f) {
    for (std::size_t i = 0; i < r[f].size(); ++i) r[f][i] += a * y[f][i];
  }
  return r;
}

// exp(-c_f |k|^2 tau) per component.
Pack propagate(const TorusGrid& grid, const Pack& x, double tau, const std::array<double, 6>& diffusivity) {
  Pack r = x;
  for (int f = 0; f < 6; ++f) {
    if (diffusivity[f] == 0.0 || tau == 0.0) continue;
    auto s = grid.forward(x[f]);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= std::exp(-diffusivity[f] * grid.wavenumber_sq(i) * tau);
    r[f] = grid.inverse(s);
  }
  return r;
}

double max_in_plane_speed(const TorusGrid& grid, const std::array<Field, 3>& om, const VectorField& v, double scale) {
  double m = 0.0;
  for (std::size_t i = 0; i < grid.point_count(); ++i) {
    double s2 = 0.0;
    for (int d = 0; d < grid.dim(); ++d) {
      const double u = scale * om[d][i] + v[d][i];
      s2 += u * u;
    }
    m = std::max(m, s2);
  }
  return std::sqrt(m);
}

}  // namespace

std::array<Field, 3> orientation(const MacroState& state) {
  const std::size_t np = state.phi.size();
  auto om = zeros3(np);
  for (std::size_t i = 0; i < np; ++i) put(om, i, stereo_to_sphere(StereoPoint(state.phi[i], state.psi[i])).vec());
  return om;
}

double mass(const TorusGrid& grid, const MacroState& state) {
  Field rho(state.rho_hat.size());
  std::transform(state.rho_hat.begin(), state.rho_hat.end(), rho.begin(), [](double r) { return std::exp(r); });
  return grid.integrate(rho);
}

double max_w(const MacroState& state) { return 1.0 + max_stereo_radius_sq(state); }

double max_stereo_radius_sq(const MacroState& state) {
  double m = 0.0;
  for (std::size_t i = 0; i < state.phi.size(); ++i) m = std::max(m, state.phi[i] * state.phi[i] + state.psi[i] * state.psi[i]);
  return m;
}

void check_pole_gauge(const MacroState& state, double bound) {
  const double r2 = max_stereo_radius_sq(state);
  if (!(r2 <= bound)) {
    throw Error(ErrorCode::PoleGaugeExceeded, "max(phi^2 + psi^2) = " + std::to_string(r2) + " exceeds the gauge bound");
  }
}

Rhs evaluate_rhs(const TorusGrid& grid, const MacroState& s, const vmf::CoefficientSet& cs, const RhsOptions& options) {
  const auto& pm = cs.params;
  const double a = pm.a;
  const double gamma = cs.gamma;
  const double inv_re = 1.0 / pm.reynolds;
  const auto k = kinematics(grid, s);
  const std::size_t np = grid.point_count();

  Rhs r;
  r.rho_hat.resize(np);
  r.phi.resize(np);
  r.psi.resize(np);
  VectorField forcing;
  for (auto& c : forcing.c) c.resize(np);

  for (std::size_t i = 0; i < np; ++i) {
    const double w = k.w[i];
    const double phi = s.phi[i];
    const double psi = s.psi[i];
    const Vec3 om = at(k.om, i);
    const Vec3 om_phi = at(k.om_phi, i);
    const Vec3 om_psi = at(k.om_psi, i);
    const Vec3 gr = at(k.grad_rho, i);
    const Vec3 gp = at(k.grad_phi, i);
    const Vec3 gs = at(k.grad_psi, i);
    const Vec3 v(s.v[0][i], s.v[1][i], s.v[2][i]);
    const Mat3 gv = velocity_gradient(k, i);
    const Mat3 strain = 0.5 * (gv + gv.transpose());
    const Mat3 spin = 0.5 * (gv - gv.transpose());
    const Vec3 m_om = (cs.lambda_tilde * strain + spin) * om;

    const Vec3 u = a * cs.c1 * om + v;
    const Vec3 vv = a * cs.c2 * om + v;
    const double div_om = om_phi.dot(gp) + om_psi.dot(gs);
    r.rho_hat[i] = -u.dot(gr) - a * cs.c1 * div_om;

    const double gp2 = gp.squaredNorm();
    const double gs2 = gs.squaredNorm();
    const double gpgs = gp.dot(gs);
    const double w2 = w * w;
    const double h_phi = a / (4.0 * cs.kappa) * w2 * om_phi.dot(gr) - 2.0 * gamma * gr.dot(gp) +
                         2.0 * gamma * phi / w * gp2 + 4.0 * gamma * psi / w * gpgs - 2.0 * gamma * phi / w * gs2 -
                         0.25 * w2 * om_phi.dot(m_om);
    const Vec3& psi_dir = options.psi_coupling == PsiCoupling::Corrected ? om_psi : om_phi;
    const double h_psi = a / (4.0 * cs.kappa) * w2 * om_psi.dot(gr) - 2.0 * gamma * gr.dot(gs) -
                         2.0 * gamma * psi / w * gp2 + 4.0 * gamma * phi / w * gpgs + 2.0 * gamma * psi / w * gs2 -
                         0.25 * w2 * psi_dir.dot(m_om);
    r.phi[i] = -vv.dot(gp) - h_phi;
    r.psi[i] = -vv.dot(gs) - h_psi;
    if (options.include_linear) {
      r.phi[i] += gamma * k.lap_phi[i];
      r.psi[i] += gamma * k.lap_psi[i];
    }

    const Vec3 g = stress_term(cs.c4, om, om_phi, om_psi, gr, gp, gs);
    const Vec3 adv = gv.transpose() * v;
    const Vec3 f = -adv - pm.b * inv_re * std::exp(s.rho_hat[i]) * g;
    for (int d = 0; d < 3; ++d) forcing[d][i] = f(d);
  }
  r.rho_hat = dealiased(grid, r.rho_hat);
  r.phi = dealiased(grid, r.phi);
  r.psi = dealiased(grid, r.psi);
  r.v = project_velocity(grid, forcing, options.include_linear ? &s.v : nullptr, inv_re);
  return r;
}

Field rhs_rho_hat(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs) {
  return evaluate_rhs(grid, state, cs).rho_hat;
}

Field rhs_phi(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs) {
  return evaluate_rhs(grid, state, cs).phi;
}

Field rhs_psi(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs, PsiCoupling coupling) {
  RhsOptions opt;
  opt.psi_coupling = coupling;
  return evaluate_rhs(grid, state, cs, opt).psi;
}

VectorField rhs_velocity(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs) {
  return evaluate_rhs(grid, state, cs).v;
}

VectorField stress_divergence(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs) {
  const auto k = kinematics(grid, state);
  VectorField out;
  for (auto& c : out.c) c.resize(grid.point_count());
  for (std::size_t i = 0; i < grid.point_count(); ++i) {
    const Vec3 g = stress_term(cs.c4, at(k.om, i), at(k.om_phi, i), at(k.om_psi, i), at(k.grad_rho, i),
                               at(k.grad_phi, i), at(k.grad_psi, i));
    for (int d = 0; d < 3; ++d) out[d][i] = g(d);
  }
  return out;
}

double stable_dt(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs,
                 const SolverConfig& config) {
  const double dx = grid.spacing();
  const auto om = orientation(state);
  const double su = max_in_plane_speed(grid, om, state.v, cs.params.a * cs.c1);
  const double sv = max_in_plane_speed(grid, om, state.v, cs.params.a * cs.c2);
  double bound = std::numeric_limits<double>::infinity();
  if (su > 0.0) bound = std::min(bound, dx / su);
  if (sv > 0.0) bound = std::min(bound, dx / sv);
  if (!config.imex) {
    const double d = grid.dim();
    if (cs.gamma > 0.0) bound = std::min(bound, dx * dx / (2.0 * d * cs.gamma));
    bound = std::min(bound, cs.params.reynolds * dx * dx / (2.0 * d));
  }
  return config.cfl_safety * bound;
}

namespace {

MacroState advance(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs,
                   const SolverConfig& config, double dt, PsiCoupling coupling) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  const double limit = stable_dt(grid, state, cs, config);
  if (dt > limit) {
    throw Error(ErrorCode::CflViolation, "dt = " + std::to_string(dt) + " exceeds the stable step " + std::to_string(limit));
  }
  RhsOptions opt;
  opt.psi_coupling = coupling;
  opt.include_linear = !config.imex;
  std::array<double, 6> diff{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  if (config.imex) {
    const double inv_re = 1.0 / cs.params.reynolds;
    diff = {0.0, cs.gamma, cs.gamma, inv_re, inv_re, inv_re};
  }
  auto nonlinear = [&](const Pack& u) { return pack(evaluate_rhs(grid, unpack(Pack(u), 0.0), cs, opt)); };

  const Pack u0 = pack(state);
  const Pack n0 = nonlinear(u0);
  const Pack ua = propagate(grid, axpy(u0, dt / 3.0, n0), dt / 3.0, diff);
  const Pack na = nonlinear(ua);
  const Pack ub = axpy(propagate(grid, u0, 2.0 * dt / 3.0, diff), 2.0 * dt / 3.0, propagate(grid, na, dt / 3.0, diff));
  const Pack nb = nonlinear(ub);
  Pack u1 = axpy(propagate(grid, u0, dt, diff), 0.25 * dt, propagate(grid, n0, dt, diff));
  u1 = axpy(u1, 0.75 * dt, propagate(grid, nb, dt / 3.0, diff));

  MacroState next = unpack(std::move(u1), state.t + dt);
  check_pole_gauge(next, config.pole_bound);
  const double div = grid.divergence_norm(next.v);
  if (!(div < config.divergence_tolerance)) {
    throw Error(ErrorCode::ConstraintViolation, "velocity divergence " + std::to_string(div) + " above tolerance");
  }
  return next;
}

}  // namespace

MacroState step(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs,
                const SolverConfig& config, PsiCoupling coupling) {
  return advance(grid, state, cs, config, config.dt, coupling);
}

MacroState run_macro(const TorusGrid& grid, const MacroState& initial, const vmf::CoefficientSet& cs,
                     const SolverConfig& config, const Observer& observer, PsiCoupling coupling) {
  check_pole_gauge(initial, config.pole_bound);
  MacroState state = initial;
  if (observer) observer(state);
  const double t0 = initial.t;
  const double span = config.t_end - t0;
  if (span <= 0.0) return state;
  const auto steps = static_cast<long>(std::ceil(span / config.dt - 1e-9));
  for (long n = 1; n <= steps; ++n) {
    const double target = (n == steps) ? config.t_end : t0 + n * config.dt;
    state = advance(grid, state, cs, config, target - state.t, coupling);
    state.t = target;
    const bool emit = (config.output_every > 0 && n % config.output_every == 0) || n == steps;
    if (observer && emit) observer(state);
  }
  return state;
}

std::vector<double> central_weights(std::span<const double> times) {
  const std::size_t n = times.size();
  if (n != 3 && n != 5) throw Error(ErrorCode::InvalidArgument, "central stencil needs 3 or 5 samples");
  const double h = times[1] - times[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (!(h > 0.0) || std::abs((times[i] - times[i - 1]) - h) > 1e-9 * std::max(1.0, h)) {
      throw Error(ErrorCode::TimeMismatch, "stencil samples must be equally spaced in time");
    }
  }
  if (n == 3) return {-0.5 / h, 0.0, 0.5 / h};
  return {1.0 / (12.0 * h), -8.0 / (12.0 * h), 0.0, 8.0 / (12.0 * h), -1.0 / (12.0 * h)};
}

VectorFormResidual cross_check_vector_form(const TorusGrid& grid, std::span<const MacroState> states,
                                           const vmf::CoefficientSet& cs) {
  std::vector<double> times;
  for (const auto& s : states) times.push_back(s.t);
  const auto wts = central_weights(times);
  const MacroState& current = states[states.size() / 2];
  const auto& pm = cs.params;
  const std::size_t np = grid.point_count();
  const auto om = orientation(current);
  Field rho(np);
  for (std::size_t i = 0; i < np; ++i) rho[i] = std::exp(current.rho_hat[i]);

  // d/dt by central differences
  Field drho(np, 0.0);
  std::array<Field, 3> dom = zeros3(np);
  VectorField dv;
  for (auto& c : dv.c) c.assign(np, 0.0);
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (wts[k] == 0.0) continue;
    const auto omk = orientation(states[k]);
    for (std::size_t i = 0; i < np; ++i) {
      drho[i] += wts[k] * std::exp(states[k].rho_hat[i]);
      for (int d = 0; d < 3; ++d) {
        dom[d][i] += wts[k] * omk[d][i];
        dv[d][i] += wts[k] * states[k].v[d][i];
      }
    }
  }

  // mass flux
  VectorField flux;
  for (auto& c : flux.c) c.resize(np);
  for (std::size_t i = 0; i < np; ++i) {
    for (int d = 0; d < 3; ++d) flux[d][i] = rho[i] * (pm.a * cs.c1 * om[d][i] + current.v[d][i]);
  }
  Field r_rho = grid.divergence(flux);
  for (std::size_t i = 0; i < np; ++i) r_rho[i] += drho[i];

  // orientation
  std::array<std::array<Field, 3>, 3> grad_om;  // [component][axis]
  std::array<Field, 3> lap_rho_om;
  for (int c = 0; c < 3; ++c) {
    grad_om[c] = grid.gradient(om[c]);
    Field ro(np);
    for (std::size_t i = 0; i < np; ++i) ro[i] = rho[i] * om[c][i];
    lap_rho_om[c] = grid.laplacian(ro);
  }
  const auto grad_rho = grid.gradient(rho);
  std::array<std::array<Field, 3>, 3> grad_v;  // [i][j] = d_i v_j
  for (int j = 0; j < 3; ++j) {
    const auto g = grid.gradient(current.v[j]);
    for (int i = 0; i < 3; ++i) grad_v[i][j] = g[i];
  }
  std::array<Field, 3> r_om = zeros3(np);
  for (std::size_t p = 0; p < np; ++p) {
    const Vec3 o = at(om, p);
    const Vec3 v(current.v[0][p], current.v[1][p], current.v[2][p]);
    const Vec3 vv = pm.a * cs.c2 * o + v;
    Vec3 transport = Vec3::Zero();
    for (int c = 0; c < 3; ++c) {
      for (int d = 0; d < 3; ++d) transport(c) += vv(d) * grad_om[c][d][p];
    }
    Mat3 gv;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) gv(i, j) = grad_v[i][j][p];
    }
    const Mat3 m = cs.lambda_tilde * 0.5 * (gv + gv.transpose()) + 0.5 * (gv - gv.transpose());
    const UnitVector3 u(o);
    const Vec3 res = rho[p] * at(dom, p) + rho[p] * transport +
                     pm.a / cs.kappa * tangential_projector(u, at(grad_rho, p)) -
                     cs.gamma * tangential_projector(u, at(lap_rho_om, p)) -
                     rho[p] * tangential_projector(u, m * o);
    put(r_om, p, res);
  }

  // momentum, pressure removed by projection
  VectorField stress;
  for (auto& c : stress.c) c.assign(np, 0.0);
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < grid.dim(); ++i) {
      Field q(np);
      for (std::size_t p = 0; p < np; ++p) {
        q[p] = rho[p] * cs.c4 * (om[i][p] * om[j][p] - (i == j ? 1.0 / 3.0 : 0.0));
      }
      const auto dq = grid.derivative(q, i);
      for (std::size_t p = 0; p < np; ++p) stress[j][p] += dq[p];
    }
  }
  VectorField mom;
  for (int j = 0; j < 3; ++j) {
    const auto lap = grid.laplacian(current.v[j]);
    mom[j].resize(np);
    for (std::size_t p = 0; p < np; ++p) {
      double adv = 0.0;
      for (int i = 0; i < 3; ++i) adv += current.v[i][p] * grad_v[i][j][p];
      mom[j][p] = pm.reynolds * (dv[j][p] + adv) - lap[p] + pm.b * stress[j][p];
    }
  }
  mom = grid.leray_project(mom);

  auto vec_norm = [&](const auto& f) {
    double s = 0.0;
    for (int d = 0; d < 3; ++d) {
      const double n = grid.l2_norm(f[d]);
      s += n * n;
    }
    return std::sqrt(s);
  };
  VectorFormResidual out;
  out.rho = grid.l2_norm(r_rho);
  out.omega = vec_norm(r_om);
  out.v = vec_norm(mom.c);
  return out;
}

Field recover_pressure(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs) {
  const auto& pm = cs.params;
  const auto k = kinematics(grid, state);
  const auto g = stress_divergence(grid, state, cs);
  const std::size_t np = grid.point_count();
  std::array<ComplexField, 3> fs;
  for (int j = 0; j < 3; ++j) {
    Field f(np);
    for (std::size_t p = 0; p < np; ++p) {
      double adv = 0.0;
      for (int i = 0; i < 3; ++i) adv += state.v[i][p] * k.grad_v[i][j][p];
      f[p] = -pm.reynolds * adv - pm.b * std::exp(state.rho_hat[p]) * g[j][p];
    }
    fs[j] = grid.forward(f);
  }
  ComplexField ps(grid.spectral_count(), 0.0);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double kk = grid.wavenumber_sq(i);
    if (kk == 0.0) continue;
    std::complex<double> kdot = 0.0;
    for (int d = 0; d < grid.dim(); ++d) kdot += grid.wavenumber(i, d) * fs[d][i];
    ps[i] = -std::complex<double>(0.0, 1.0) * kdot / kk;
  }
  return grid.inverse(ps);
}

MacroState benchmark_state(const TorusGrid& grid) {
  const std::size_t np = grid.point_count();
  MacroState s;
  s.rho_hat.resize(np);
  s.phi.resize(np);
  s.psi.resize(np);
  for (auto& c : s.v.c) c.resize(np);
  for (std::size_t i = 0; i < np; ++i) {
    const double x1 = grid.coordinate(i, 0);
    const double x2 = grid.coordinate(i, 1);
    s.rho_hat[i] = std::log(1.0 + 0.1 * std::cos(x1));
    s.phi[i] = 0.2 * std::sin(x2);
    s.psi[i] = 0.1 * std::cos(x1);
    s.v[0][i] = 0.05 * std::sin(x2);
    s.v[1][i] = 0.05 * std::sin(x1);
    s.v[2][i] = 0.0;
  }
  s.rho_hat = grid.dealias(s.rho_hat);
  check_pole_gauge(s);
  return s;
}

MacroState uniform_state(const TorusGrid& grid, double rho, double phi, double psi) {
  if (!(rho > 0.0)) throw Error(ErrorCode::RangeError, "density must be positive");
  const std::size_t np = grid.point_count();
  MacroState s;
  s.rho_hat.assign(np, std::log(rho));
  s.phi.assign(np, phi);
  s.psi.assign(np, psi);
  for (auto& c : s.v.c) c.assign(np, 0.0);
  check_pole_gauge(s);
  return s;
}

}  // namespace soh::macro
