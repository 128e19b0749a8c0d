#include "soh/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "soh/errors.hpp"
#include "soh/gauss_legendre.hpp"

namespace soh::kinetic {
namespace {

constexpr double kPi = std::numbers::pi;

Vec3 at(const std::array<Field, 3>& f, std::size_t i) { return Vec3(f[0][i], f[1][i], f[2][i]); }

// Z e^{-kappa}, so that M = exp(kappa (w.Omega - 1)) / scaled_z.
double scaled_z(double kappa) {
  if (kappa == 0.0) return 4.0 * kPi;
  return 2.0 * kPi * (-std::expm1(-2.0 * kappa)) / kappa;
}

void require_current(const MeanField& m) {
  for (std::size_t i = 0; i < m.rho.size(); ++i) {
    if (!(m.rho[i] > 0.0)) throw Error(ErrorCode::NegativeMass, "rho_f <= 0 at grid point " + std::to_string(i));
    if (!m.defined[i]) {
      throw Error(ErrorCode::DegenerateCurrent, "|j_f| below floor at grid point " + std::to_string(i));
    }
  }
}

std::span<const double> column(const Eigen::MatrixXd& m, Eigen::Index c) {
  return {m.data() + c * m.rows(), static_cast<std::size_t>(m.rows())};
}

}  // namespace

KineticModel::KineticModel(const TorusGrid& grid, int degree, const vmf::CoefficientSet& cs)
    : grid_(grid),
      cs_(cs),
      degree_(degree),
      sphere_(degree, degree + 2),
      fine_(degree, degree + 10 + 3 * static_cast<int>(std::ceil(std::min(cs.kappa, vmf::kKappaMax)))) {
  if (degree < 2) throw Error(ErrorCode::RangeError, "sphere.L must be >= 2");
  const auto& y = sphere_.synthesis();
  const auto& w = sphere_.weights();
  const auto& nodes = sphere_.nodes();
  synthesis_t_ = y.transpose();
  analysis_t_ = sphere_.analysis().transpose();
  for (int d = 0; d < 3; ++d) {
    weighted_grad_[d] = w.asDiagonal() * sphere_.gradient()[d];
    transport_[d] = (y.transpose() * (w.array() * nodes.col(d).array()).matrix().asDiagonal() * y).transpose();
    j_vec_[d] = y.transpose() * (w.array() * nodes.col(d).array()).matrix();
  }
  rho_vec_ = y.transpose() * w;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      Eigen::ArrayXd g = nodes.col(a).array() * nodes.col(b).array();
      if (a == b) g -= 1.0 / 3.0;
      q_vec_[a][b] = y.transpose() * (w.array() * g).matrix();
    }
  }
  eigen_.resize(sphere_.coeff_count());
  for (Eigen::Index c = 0; c < eigen_.size(); ++c) {
    const int l = sphere_.coeff_degree()[c];
    eigen_(c) = static_cast<double>(l) * (l + 1);
  }
}

Eigen::MatrixXd KineticModel::to_nodes(const Distribution& f) const { return f * synthesis_t_; }

Distribution KineticModel::from_nodes(const Eigen::MatrixXd& values) const { return values * analysis_t_; }

MeanField KineticModel::moments(const Distribution& f, double floor) const {
  if (f.cols() != coeff_count() || f.rows() != static_cast<Eigen::Index>(grid_.point_count())) {
    throw Error(ErrorCode::DegreeMismatch, "distribution shape does not match the kinetic model");
  }
  const std::size_t np = grid_.point_count();
  MeanField m;
  auto to_field = [](const Eigen::VectorXd& v) { return Field(v.data(), v.data() + v.size()); };
  m.rho = to_field(f * rho_vec_);
  for (int d = 0; d < 3; ++d) {
    m.j[d] = to_field(f * j_vec_[d]);
    m.omega_f[d].assign(np, 0.0);
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) m.q[a][b] = to_field(f * q_vec_[a][b]);
  }
  m.defined.assign(np, 0);
  for (std::size_t i = 0; i < np; ++i) {
    const Vec3 j = at(m.j, i);
    const double nj = j.norm();
    if (m.rho[i] > 0.0 && nj >= floor * m.rho[i] && nj > 0.0) {
      m.defined[i] = 1;
      for (int d = 0; d < 3; ++d) m.omega_f[d][i] = j(d) / nj;
    }
  }
  return m;
}

Distribution KineticModel::collision(const Distribution& f, double floor) const {
  const auto m = moments(f, floor);
  require_current(m);
  const Eigen::MatrixXd fn = to_nodes(f);
  const double nu = cs_.params.nu;
  Distribution q = -cs_.params.d_noise * (f * eigen_.asDiagonal());
  for (int d = 0; d < 3; ++d) {
    Eigen::Map<const Eigen::VectorXd> od(m.omega_f[d].data(), m.omega_f[d].size());
    q += ((nu * od).asDiagonal() * fn) * weighted_grad_[d];
  }
  return q;
}

namespace {

// M_{Omega_f(x)} at every (point, node) and the cosines w . Omega_f(x).
struct LocalVmf {
  Eigen::MatrixXd mu;
  Eigen::MatrixXd m;
};

LocalVmf local_vmf(const SphereGrid& sphere, const MeanField& mf, double kappa) {
  const auto& nodes = sphere.nodes();
  const std::size_t np = mf.rho.size();
  LocalVmf out;
  out.mu.resize(np, nodes.rows());
  for (std::size_t i = 0; i < np; ++i) out.mu.row(i) = (nodes * at(mf.omega_f, i)).transpose();
  out.m = ((kappa * (out.mu.array() - 1.0)).exp() / scaled_z(kappa)).matrix();
  return out;
}

}  // namespace

Field KineticModel::collision_dissipation(const Distribution& f, double floor) const {
  const auto mf = moments(f, floor);
  require_current(mf);
  const auto lv = local_vmf(fine_, mf, cs_.kappa);
  const Eigen::MatrixXd fn = f * fine_.synthesis().transpose();
  // Q = D Lap f - nu (Omega . grad f - 2 (w . Omega) f), pointwise
  Eigen::MatrixXd q = -cs_.params.d_noise * (f * eigen_.asDiagonal()) * fine_.synthesis().transpose();
  q += 2.0 * cs_.params.nu * lv.mu.cwiseProduct(fn);
  for (int d = 0; d < 3; ++d) {
    Eigen::Map<const Eigen::VectorXd> od(mf.omega_f[d].data(), mf.omega_f[d].size());
    q -= cs_.params.nu * (od.asDiagonal() * (f * fine_.gradient()[d].transpose()));
  }
  const Eigen::VectorXd d = (q.array() * fn.array() / lv.m.array()).matrix() * fine_.weights();
  return Field(d.data(), d.data() + d.size());
}

Field KineticModel::relative_fisher_information(const Distribution& f, double floor) const {
  const auto mf = moments(f, floor);
  require_current(mf);
  const auto lv = local_vmf(fine_, mf, cs_.kappa);
  const Eigen::MatrixXd fn = f * fine_.synthesis().transpose();
  const auto& nodes = fine_.nodes();
  const std::size_t np = grid_.point_count();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(np, nodes.rows());
  // M grad(f / M) = grad f - kappa f P_w Omega
  for (int d = 0; d < 3; ++d) {
    Eigen::MatrixXd proj(np, nodes.rows());
    for (std::size_t i = 0; i < np; ++i) {
      proj.row(i) = (mf.omega_f[d][i] - lv.mu.row(i).array() * nodes.col(d).transpose().array()).matrix();
    }
    const Eigen::MatrixXd g = f * fine_.gradient()[d].transpose() - cs_.kappa * fn.cwiseProduct(proj);
    acc += g.cwiseProduct(g);
  }
  const Eigen::VectorXd out = (acc.array() / lv.m.array()).matrix() * fine_.weights();
  return Field(out.data(), out.data() + out.size());
}

std::array<Eigen::MatrixXd, 3> KineticModel::force_term(const Distribution& f, const VectorField& v,
                                                         double floor) const {
  const auto m = moments(f, floor);
  require_current(m);
  const std::size_t np = grid_.point_count();
  const auto& nodes = sphere_.nodes();
  const auto& pm = cs_.params;
  std::array<Field, 3> lap_j;
  for (int d = 0; d < 3; ++d) lap_j[d] = grid_.laplacian(m.j[d]);
  std::array<std::array<Field, 3>, 3> gv;
  for (int j = 0; j < 3; ++j) {
    const auto g = grid_.gradient(v[j]);
    for (int i = 0; i < 3; ++i) gv[i][j] = g[i];
  }
  std::array<Eigen::MatrixXd, 3> out;
  for (auto& o : out) o.resize(np, nodes.rows());
  for (std::size_t i = 0; i < np; ++i) {
    const Vec3 om = at(m.omega_f, i);
    const double nj = at(m.j, i).norm();
    const Vec3 lj = at(lap_j, i);
    const Vec3 align = pm.nu * cs_.k0 / nj * (lj - om.dot(lj) * om);
    Mat3 g;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) g(r, c) = gv[r][c][i];
    }
    const Mat3 b = pm.lambda * 0.5 * (g + g.transpose()) + 0.5 * (g - g.transpose());
    for (Eigen::Index n = 0; n < nodes.rows(); ++n) {
      const Vec3 w = nodes.row(n).transpose();
      Vec3 t = align + b * w;
      t -= w.dot(t) * w;
      for (int d = 0; d < 3; ++d) out[d](i, n) = t(d);
    }
  }
  return out;
}

Distribution KineticModel::equilibrium(const Field& rho, const std::array<Field, 3>& omega) const {
  const double kappa = cs_.kappa;
  // zonal Legendre moments z_l = int M_Omega P_l(w . Omega) dw
  const auto rule = gauss_legendre(96 + degree_ + static_cast<int>(2.0 * std::min(kappa, vmf::kKappaMax)));
  std::vector<double> z(degree_ + 1, 0.0);
  double norm = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double e = rule.weights[q] * std::exp(kappa * (rule.nodes[q] - 1.0));
    const auto p = legendre_values(degree_, rule.nodes[q]);
    norm += e;
    for (int l = 0; l <= degree_; ++l) z[l] += e * p[l];
  }
  const std::size_t np = grid_.point_count();
  Distribution f(np, coeff_count());
  for (std::size_t i = 0; i < np; ++i) {
    const auto y = real_spherical_harmonics(degree_, at(omega, i));
    for (int l = 0; l <= degree_; ++l) {
      // addition theorem: P_l(w . Omega) = 4 pi / (2l + 1) sum_m Y_lm(w) Y_lm(Omega)
      const double zl = z[l] / norm;
      for (int mm = -l; mm <= l; ++mm) f(i, sh_index(l, mm)) = rho[i] * zl * y[sh_index(l, mm)];
    }
  }
  return f;
}

double KineticModel::total_mass(const Distribution& f) const {
  const Eigen::VectorXd r = f * rho_vec_;
  return grid_.integrate(std::span<const double>(r.data(), r.size()));
}

double KineticModel::stable_dt(const KineticState& state, const KineticConfig& config) const {
  const auto m = moments(state.f, config.current_floor);
  require_current(m);
  const std::size_t np = grid_.point_count();
  const auto& pm = cs_.params;
  double vmax = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    double s2 = 0.0;
    for (int d = 0; d < grid_.dim(); ++d) s2 += state.v[d][i] * state.v[d][i];
    vmax = std::max(vmax, s2);
  }
  const double speed = std::abs(pm.a) + std::sqrt(vmax);
  std::array<Field, 3> lap_j;
  for (int d = 0; d < 3; ++d) lap_j[d] = grid_.laplacian(m.j[d]);
  std::array<std::array<Field, 3>, 3> gv;
  for (int j = 0; j < 3; ++j) {
    const auto g = grid_.gradient(state.v[j]);
    for (int i = 0; i < 3; ++i) gv[i][j] = g[i];
  }
  double rate = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    const double nj = at(m.j, i).norm();
    const double align = pm.nu * cs_.k0 / nj * at(lap_j, i).norm() + pm.nu / state.epsilon;
    double gnorm = 0.0;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) gnorm += gv[r][c][i] * gv[r][c][i];
    }
    rate = std::max(rate, align + (std::abs(pm.lambda) + 1.0) * std::sqrt(gnorm));
  }
  double bound = std::numeric_limits<double>::infinity();
  if (speed > 0.0) bound = grid_.spacing() / speed;
  if (rate > 0.0) bound = std::min(bound, 1.0 / (rate * (degree_ + 1)));
  return config.cfl_safety * bound;
}

KineticModel::Tendency KineticModel::explicit_rhs(const KineticState& state, double floor) const {
  const auto& f = state.f;
  const auto m = moments(f, floor);
  require_current(m);
  const std::size_t np = grid_.point_count();
  const auto& pm = cs_.params;
  const auto& nodes = sphere_.nodes();
  const Eigen::Index nn = nodes.rows();
  const Eigen::Index nc = coeff_count();

  std::array<Field, 3> lap_j;
  for (int d = 0; d < 3; ++d) lap_j[d] = grid_.laplacian(m.j[d]);
  std::array<std::array<Field, 3>, 3> gv;  // [i][j] = d_i v_j
  for (int j = 0; j < 3; ++j) {
    const auto g = grid_.gradient(state.v[j]);
    for (int i = 0; i < 3; ++i) gv[i][j] = g[i];
  }

  // Angular flux f P_w[a(x) + B(x) w] with a = nu k0/|j| P Lap j + (nu/eps) Omega_f;
  // the gradient tables are tangent, so P_w drops out of the weak form.
  Eigen::MatrixXd avec(np, 3);
  std::array<Eigen::MatrixXd, 3> bmat;  // bmat[d](x, e) = B_de(x)
  for (auto& b : bmat) b.resize(np, 3);
  for (std::size_t i = 0; i < np; ++i) {
    const Vec3 om = at(m.omega_f, i);
    const double nj = at(m.j, i).norm();
    const Vec3 lj = at(lap_j, i);
    const Vec3 a = pm.nu * cs_.k0 / nj * (lj - om.dot(lj) * om) + pm.nu / state.epsilon * om;
    avec.row(i) = a.transpose();
    Mat3 g;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) g(r, c) = gv[r][c][i];
    }
    const Mat3 b = pm.lambda * 0.5 * (g + g.transpose()) + 0.5 * (g - g.transpose());
    for (int d = 0; d < 3; ++d) bmat[d].row(i) = b.row(d);
  }
  const Eigen::MatrixXd fn = to_nodes(f);
  Distribution angular = Distribution::Zero(np, nc);
  const Eigen::RowVectorXd ones = Eigen::RowVectorXd::Ones(nn);
  for (int d = 0; d < 3; ++d) {
    Eigen::MatrixXd t = avec.col(d) * ones;
    t.noalias() += bmat[d] * nodes.transpose();
    angular.noalias() += fn.cwiseProduct(t) * weighted_grad_[d];
  }

  // Spatial flux (v + a w) f, in divergence form so the mean of every column is untouched.
  std::vector<Distribution> flux;
  for (int d = 0; d < grid_.dim(); ++d) {
    Eigen::Map<const Eigen::VectorXd> vd(state.v[d].data(), np);
    flux.push_back(vd.asDiagonal() * f + pm.a * (f * transport_[d]));
  }
  Tendency out;
  out.f.resize(np, nc);
  for (Eigen::Index c = 0; c < nc; ++c) {
    auto s = grid_.forward(column(angular, c));
    for (int d = 0; d < grid_.dim(); ++d) {
      const auto fs = grid_.forward(column(flux[d], c));
      for (std::size_t k = 0; k < s.size(); ++k) s[k] -= std::complex<double>(0.0, grid_.wavenumber(k, d)) * fs[k];
    }
    grid_.dealias_spectrum(s);
    const auto col = grid_.inverse(s);
    std::copy(col.begin(), col.end(), out.f.data() + c * static_cast<Eigen::Index>(np));
  }

  // Fluid: -v.grad v - (b / Re) div Q_f, projected.
  VectorField forcing;
  const double coupling = pm.b / pm.reynolds;
  for (int j = 0; j < 3; ++j) {
    forcing[j].assign(np, 0.0);
    for (int i = 0; i < grid_.dim(); ++i) {
      const auto dq = grid_.derivative(m.q[i][j], i);
      for (std::size_t p = 0; p < np; ++p) forcing[j][p] -= coupling * dq[p];
    }
    for (std::size_t p = 0; p < np; ++p) {
      double adv = 0.0;
      for (int i = 0; i < 3; ++i) adv += state.v[i][p] * gv[i][j][p];
      forcing[j][p] -= adv;
    }
  }
  out.v = grid_.leray_project_dealiased(forcing);
  return out;
}

namespace {

struct Pack {
  Distribution f;
  VectorField v;
};

Pack axpy(const Pack& x, double a, const Pack& y) {
  Pack r{x.f + a * y.f, x.v};
  for (int d = 0; d < 3; ++d) {
    for (std::size_t i = 0; i < r.v[d].size(); ++i) r.v[d][i] += a * y.v[d][i];
  }
  return r;
}

struct PhiValues {
  double e0, p1, p2, p3;
};

// phi_k(z) = sum_n z^n / (n + k)!, z <= 0
PhiValues phi_functions(double z) {
  if (std::abs(z) < 1.0) {
    PhiValues r{std::exp(z), 0.0, 0.0, 0.0};
    double term = 1.0;  // z^n / n!
    for (int n = 0; n < 30; ++n) {
      r.p1 += term / (n + 1);
      r.p2 += term / ((n + 1.0) * (n + 2));
      r.p3 += term / ((n + 1.0) * (n + 2) * (n + 3));
      term *= z / (n + 1);
    }
    return r;
  }
  const double e = std::exp(z);
  const double p1 = (e - 1.0) / z;
  const double p2 = (p1 - 1.0) / z;
  const double p3 = (p2 - 0.5) / z;
  return {e, p1, p2, p3};
}

}  // namespace

KineticState KineticModel::advance(const KineticState& state, const KineticConfig& config, double dt) const {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  const double limit = stable_dt(state, config);
  if (dt > limit) {
    throw Error(ErrorCode::CflViolation, "dt = " + std::to_string(dt) + " exceeds the stable step " + std::to_string(limit));
  }
  const double eps = state.epsilon;
  const double diff = cs_.params.d_noise / eps;
  const double inv_re = 1.0 / cs_.params.reynolds;
  const double h = dt;

  // Applies g(c h) with c the linear rate of every (l, m) slot and Fourier mode.
  auto apply = [&](const Pack& x, double scale, auto g) {
    Pack r;
    Eigen::VectorXd fs(eigen_.size());
    for (Eigen::Index c = 0; c < fs.size(); ++c) fs(c) = g(-diff * eigen_(c) * scale * h);
    r.f = x.f * fs.asDiagonal();
    for (int d = 0; d < 3; ++d) {
      auto s = grid_.forward(x.v[d]);
      for (std::size_t k = 0; k < s.size(); ++k) s[k] *= g(-inv_re * grid_.wavenumber_sq(k) * scale * h);
      r.v[d] = grid_.inverse(s);
    }
    return r;
  };
  auto nonlinear = [&](const Pack& u) {
    KineticState s{u.f, u.v, eps, 0.0};
    auto t = explicit_rhs(s, config.current_floor);
    return Pack{std::move(t.f), std::move(t.v)};
  };
  auto e0 = [](double z) { return phi_functions(z).e0; };
  auto p1 = [](double z) { return phi_functions(z).p1; };
  auto w_u = [](double z) { const auto p = phi_functions(z); return p.p1 - 3.0 * p.p2 + 4.0 * p.p3; };
  auto w_a = [](double z) { const auto p = phi_functions(z); return 4.0 * (p.p2 - 2.0 * p.p3); };
  auto w_b = [](double z) { const auto p = phi_functions(z); return 4.0 * p.p3 - p.p2; };

  const Pack u0{state.f, state.v};
  const Pack nu = nonlinear(u0);
  const Pack ua = axpy(apply(u0, 0.5, e0), 0.5 * h, apply(nu, 0.5, p1));
  const Pack na = nonlinear(ua);
  const Pack eu = apply(u0, 1.0, e0);
  const Pack ub = axpy(eu, h, apply(axpy(axpy(na, 1.0, na), -1.0, nu), 1.0, p1));
  const Pack nb = nonlinear(ub);
  Pack u1 = axpy(eu, h, apply(nu, 1.0, w_u));
  u1 = axpy(u1, h, apply(na, 1.0, w_a));
  u1 = axpy(u1, h, apply(nb, 1.0, w_b));

  KineticState next{std::move(u1.f), std::move(u1.v), eps, state.t + dt};
  const Eigen::VectorXd rho = next.f * rho_vec_;
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    if (!(rho(i) > 0.0)) throw Error(ErrorCode::NegativeMass, "rho_f <= 0 after step at grid point " + std::to_string(i));
  }
  const double div = grid_.divergence_norm(next.v);
  if (!(div < config.divergence_tolerance)) {
    throw Error(ErrorCode::ConstraintViolation, "velocity divergence " + std::to_string(div) + " above tolerance");
  }
  return next;
}

KineticState KineticModel::step(const KineticState& state, const KineticConfig& config) const {
  return advance(state, config, config.dt);
}

KineticState KineticModel::run(const KineticState& initial, const KineticConfig& config, const Observer& observer) const {
  KineticState state = initial;
  if (observer) observer(state);
  const double t0 = initial.t;
  const double span = config.t_end - t0;
  if (span <= 0.0) return state;
  const auto steps = static_cast<long>(std::ceil(span / config.dt - 1e-9));
  for (long n = 1; n <= steps; ++n) {
    const double target = (n == steps) ? config.t_end : t0 + n * config.dt;
    state = advance(state, config, target - state.t);
    state.t = target;
    const bool emit = (config.output_every > 0 && n % config.output_every == 0) || n == steps;
    if (observer && emit) observer(state);
  }
  return state;
}

}  // namespace soh::kinetic
