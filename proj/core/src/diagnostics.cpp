#include "soh/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "soh/errors.hpp"
#include "soh/gauss_legendre.hpp"

namespace soh::diagnostics {
namespace {

constexpr double kPi = std::numbers::pi;

Vec3 at(const std::array<Field, 3>& f, std::size_t i) { return Vec3(f[0][i], f[1][i], f[2][i]); }

double scaled_z(double kappa) {
  if (kappa == 0.0) return 4.0 * kPi;
  return 2.0 * kPi * (-std::expm1(-2.0 * kappa)) / kappa;
}

// Orthonormal pair completing Omega to a right-handed frame.
std::pair<Vec3, Vec3> complement(const Vec3& om) {
  const Vec3 seed = std::abs(om.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = (seed - seed.dot(om) * om).normalized();
  return {e1, om.cross(e1)};
}

}  // namespace

double sobolev_norm(const TorusGrid& grid, std::span<const double> field, int s) {
  if (s < 0) throw Error(ErrorCode::RangeError, "Sobolev index must be >= 0");
  return std::sqrt(grid.sobolev_norm_sq(field, s));
}

double gradient_sobolev_norm_sq(const TorusGrid& grid, std::span<const double> field, int s) {
  double total = 0.0;
  for (int i = 0; i < grid.dim(); ++i) total += grid.sobolev_norm_sq(grid.derivative(field, i), s);
  return total;
}

Eigen::MatrixXd vmf_table(const SphereGrid& sphere, const std::array<Field, 3>& omega0, double kappa) {
  const auto& nodes = sphere.nodes();
  const std::size_t np = omega0[0].size();
  Eigen::MatrixXd mu(np, nodes.rows());
  for (std::size_t i = 0; i < np; ++i) mu.row(i) = (nodes * at(omega0, i)).transpose();
  return ((kappa * (mu.array() - 1.0)).exp() / scaled_z(kappa)).matrix();
}

namespace {

double weighted_sq(const TorusGrid& grid, const SphereGrid& sphere, const Eigen::MatrixXd& g,
                   const Eigen::MatrixXd& m) {
  return ((g.array().square() / m.array()).matrix() * sphere.weights()).sum() * grid.cell_volume();
}

// int int |grad_w X - kappa X P_w Omega0|^2 / M0, i.e. ||grad_w (X / M0)||_M^2.
double weighted_gradient_sq(const TorusGrid& grid, const SphereGrid& sphere, const Eigen::MatrixXd& x,
                            const std::array<Field, 3>& omega0, const Eigen::MatrixXd& m, double kappa) {
  const auto& nodes = sphere.nodes();
  const std::size_t np = grid.point_count();
  const Eigen::MatrixXd xn = x * sphere.synthesis().transpose();
  Eigen::MatrixXd mu(np, nodes.rows());
  for (std::size_t i = 0; i < np; ++i) mu.row(i) = (nodes * at(omega0, i)).transpose();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(np, nodes.rows());
  for (int d = 0; d < 3; ++d) {
    Eigen::MatrixXd proj(np, nodes.rows());
    for (std::size_t i = 0; i < np; ++i) {
      proj.row(i) = (omega0[d][i] - mu.row(i).array() * nodes.col(d).transpose().array()).matrix();
    }
    const Eigen::MatrixXd g = x * sphere.gradient()[d].transpose() - kappa * xn.cwiseProduct(proj);
    acc += g.cwiseProduct(g);
  }
  return ((acc.array() / m.array()).matrix() * sphere.weights()).sum() * grid.cell_volume();
}

}  // namespace

double weighted_norm(const TorusGrid& grid, const SphereGrid& sphere, const Eigen::MatrixXd& g,
                     const std::array<Field, 3>& omega0, double kappa) {
  return std::sqrt(weighted_sq(grid, sphere, g, vmf_table(sphere, omega0, kappa)));
}

MacroEnergy energy_functionals_macro(const TorusGrid& grid, const macro::MacroState& state,
                                     const vmf::CoefficientSet& cs, int s) {
  MacroEnergy out;
  const double re = cs.params.reynolds;
  out.parts[0] = grid.sobolev_norm_sq(state.rho_hat, s);
  out.parts[1] = grid.sobolev_norm_sq(state.phi, s);
  out.parts[2] = grid.sobolev_norm_sq(state.psi, s);
  double v2 = 0.0;
  double dv = 0.0;
  for (int d = 0; d < 3; ++d) {
    v2 += grid.sobolev_norm_sq(state.v[d], s);
    dv += gradient_sobolev_norm_sq(grid, state.v[d], s);
  }
  out.parts[3] = re * v2;
  out.energy = out.parts[0] + out.parts[1] + out.parts[2] + out.parts[3];
  out.dissipation = cs.gamma * (gradient_sobolev_norm_sq(grid, state.phi, s) +
                                gradient_sobolev_norm_sq(grid, state.psi, s)) + dv;
  return out;
}

KineticEnergy energy_functionals_kinetic(const kinetic::KineticModel& model, const VectorField& v_r,
                                         const kinetic::Distribution& f_r, const std::array<Field, 3>& omega0,
                                         double epsilon, int s, double eta0) {
  if (s < 0) throw Error(ErrorCode::RangeError, "Sobolev index must be >= 0");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::RangeError, "epsilon must be positive");
  const auto& grid = model.grid();
  const auto& sphere = model.fine_sphere();
  const double kappa = model.coefficients().kappa;
  const std::size_t np = grid.point_count();
  const Eigen::Index nc = model.coeff_count();
  const Eigen::MatrixXd m = vmf_table(sphere, omega0, kappa);

  KineticEnergy out;
  for (int d = 0; d < 3; ++d) {
    out.velocity += grid.sobolev_norm_sq(v_r[d], s);
    out.dissipation += gradient_sobolev_norm_sq(grid, v_r[d], s);
  }
  out.energy = out.velocity;

  std::vector<ComplexField> spectra(nc);
  for (Eigen::Index c = 0; c < nc; ++c) {
    spectra[c] = grid.forward(std::span<const double>(f_r.data() + c * static_cast<Eigen::Index>(np), np));
  }
  Eigen::VectorXd lambda(nc);
  for (Eigen::Index c = 0; c < nc; ++c) {
    const int l = sphere.coeff_degree()[c];
    lambda(c) = static_cast<double>(l) * (l + 1);
  }

  const int dim = grid.dim();
  for (int k = 0; k <= s; ++k) {
    // every ordered tuple of k axes
    std::vector<int> axes(k, 0);
    const long tuples = static_cast<long>(std::llround(std::pow(dim, k)));
    for (long t = 0; t < tuples; ++t) {
      long code = t;
      for (int q = 0; q < k; ++q) {
        axes[q] = static_cast<int>(code % dim);
        code /= dim;
      }
      kinetic::Distribution dx(np, nc);
      for (Eigen::Index c = 0; c < nc; ++c) {
        ComplexField spec = spectra[c];
        for (std::size_t j = 0; j < spec.size(); ++j) {
          std::complex<double> factor = 1.0;
          for (int q = 0; q < k; ++q) factor *= std::complex<double>(0.0, grid.wavenumber(j, axes[q]));
          spec[j] *= factor;
        }
        const Field col = grid.inverse(spec);
        std::copy(col.begin(), col.end(), dx.data() + c * static_cast<Eigen::Index>(np));
      }
      for (int l = 0; k + l <= s; ++l) {
        const kinetic::Distribution x = dx * lambda.array().pow(0.5 * l).matrix().asDiagonal();
        const double e = weighted_sq(grid, sphere, x * sphere.synthesis().transpose(), m);
        const double dd = weighted_gradient_sq(grid, sphere, x, omega0, m, kappa);
        const double w = std::pow(eta0, k + l);
        out.terms[{k, l}] += e;
        out.energy += w * e;
        out.dissipation += w * dd / epsilon;
      }
    }
  }
  return out;
}

double tangent_field_divergence(const Vec3& w, const Vec3& t, const Mat3& b) {
  return -2.0 * w.dot(t) + b.trace() - 3.0 * w.dot(b * w);
}

ConsistencyDefect gci_projections_h0(const TorusGrid& grid, std::span<const macro::MacroState> states,
                                     const vmf::CoefficientSet& cs, const vmf::GciSolution& gci) {
  std::vector<double> times;
  for (const auto& s : states) times.push_back(s.t);
  const auto weights = macro::central_weights(times);
  const auto& mid = states[states.size() / 2];
  const std::size_t np = grid.point_count();
  const auto& pm = cs.params;
  const double kappa = cs.kappa;
  const double c1 = cs.c1;

  Field rho(np);
  for (std::size_t i = 0; i < np; ++i) rho[i] = std::exp(mid.rho_hat[i]);
  const auto omega = macro::orientation(mid);
  Field rho_t(np, 0.0);
  std::array<Field, 3> omega_t;
  for (auto& c : omega_t) c.assign(np, 0.0);
  for (std::size_t s = 0; s < states.size(); ++s) {
    const auto om = macro::orientation(states[s]);
    for (std::size_t i = 0; i < np; ++i) {
      rho_t[i] += weights[s] * std::exp(states[s].rho_hat[i]);
      for (int d = 0; d < 3; ++d) omega_t[d][i] += weights[s] * om[d][i];
    }
  }
  const auto grad_rho = grid.gradient(rho);
  std::array<std::array<Field, 3>, 3> grad_omega;  // [i][j] = d_i Omega_j
  std::array<std::array<Field, 3>, 3> grad_v;
  std::array<Field, 3> lap_j;
  for (int j = 0; j < 3; ++j) {
    const auto go = grid.gradient(omega[j]);
    const auto gv = grid.gradient(mid.v[j]);
    for (int i = 0; i < 3; ++i) {
      grad_omega[i][j] = go[i];
      grad_v[i][j] = gv[i];
    }
    Field jj(np);
    for (std::size_t p = 0; p < np; ++p) jj[p] = c1 * rho[p] * omega[j][p];
    lap_j[j] = grid.laplacian(jj);
  }

  // Quadrature in a frame aligned with Omega(x): Gauss-Legendre in the cosine,
  // uniform in the azimuth (the integrands are trigonometric of degree <= 5 there).
  const auto rule = gauss_legendre(64 + 3 * static_cast<int>(std::ceil(kappa)));
  constexpr int kAzimuth = 12;
  const std::size_t nmu = rule.nodes.size();
  std::vector<double> mv(nmu);
  std::vector<double> hv(nmu);
  for (std::size_t q = 0; q < nmu; ++q) {
    mv[q] = std::exp(kappa * (rule.nodes[q] - 1.0)) / scaled_z(kappa);
    hv[q] = gci.h(rule.nodes[q]);
  }

  ConsistencyDefect out;
  out.scalar.assign(np, 0.0);
  for (auto& c : out.vector) c.assign(np, 0.0);
  for (std::size_t p = 0; p < np; ++p) {
    const Vec3 om = at(omega, p);
    const auto [e1, e2] = complement(om);
    const Vec3 omt(omega_t[0][p], omega_t[1][p], omega_t[2][p]);
    Mat3 gv;
    Mat3 go;
    Vec3 gr;
    for (int i = 0; i < 3; ++i) {
      gr(i) = grad_rho[i][p];
      for (int j = 0; j < 3; ++j) {
        gv(i, j) = grad_v[i][j][p];
        go(i, j) = grad_omega[i][j][p];
      }
    }
    const Mat3 b = pm.lambda * 0.5 * (gv + gv.transpose()) + 0.5 * (gv - gv.transpose());
    const Vec3 lj = at(lap_j, p);
    const Vec3 t = pm.nu * cs.k0 / (c1 * rho[p]) * (lj - om.dot(lj) * om);
    const Vec3 v = at(mid.v.c, p);
    double scalar = 0.0;
    Vec3 vec = Vec3::Zero();
    for (std::size_t q = 0; q < nmu; ++q) {
      const double mu = rule.nodes[q];
      const double sn = std::sqrt(std::max(0.0, 1.0 - mu * mu));
      double ring = 0.0;
      Vec3 ring_vec = Vec3::Zero();
      for (int k = 0; k < kAzimuth; ++k) {
        const double th = 2.0 * kPi * k / kAzimuth;
        const Vec3 w = mu * om + sn * (std::cos(th) * e1 + std::sin(th) * e2);
        // h0 / M
        double h0 = rho_t[p] + rho[p] * kappa * w.dot(omt);
        const Vec3 u = v + pm.a * w;
        const Vec3 dlog = go * w;  // d_i (w . Omega)
        h0 += u.dot(gr + rho[p] * kappa * dlog);
        Vec3 force = t + b * w;
        force -= w.dot(force) * w;
        h0 += rho[p] * (tangent_field_divergence(w, t, b) + kappa * force.dot(om));
        ring += h0;
        ring_vec += h0 * (w - mu * om);
      }
      const double wq = rule.weights[q] * mv[q] * 2.0 * kPi / kAzimuth;
      scalar += wq * ring;
      vec += wq * hv[q] * ring_vec;
    }
    out.scalar[p] = scalar;
    for (int d = 0; d < 3; ++d) out.vector[d][p] = vec(d);
  }
  out.scalar_norm = grid.l2_norm(out.scalar);
  double v2 = 0.0;
  for (int d = 0; d < 3; ++d) v2 += std::pow(grid.l2_norm(out.vector[d]), 2);
  out.vector_norm = std::sqrt(v2);
  return out;
}

namespace {

double bound_rate(double c, double e, double integral, int s) {
  return c * (1.0 + std::exp(c * integral)) * e * (1.0 + std::pow(e, 3 * s));
}

}  // namespace

Envelope gronwall_envelope(std::span<const double> t, std::span<const double> energy,
                           std::span<const double> dissipation, int s) {
  const std::size_t n = t.size();
  if (energy.size() != n || (!dissipation.empty() && dissipation.size() != n)) {
    throw Error(ErrorCode::FitFailed, "series lengths differ");
  }
  if (n < 4) throw Error(ErrorCode::FitFailed, "need at least 4 samples");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(energy[i]) || energy[i] < 0.0) {
      throw Error(ErrorCode::FitFailed, "non-finite or negative sample at index " + std::to_string(i));
    }
    if (i > 0 && !(t[i] > t[i - 1])) throw Error(ErrorCode::FitFailed, "time grid is not increasing");
  }
  std::vector<double> integral(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    integral[i] = integral[i - 1] + 0.5 * (t[i] - t[i - 1]) * (std::sqrt(energy[i]) + std::sqrt(energy[i - 1]));
  }
  const double cutoff = t[0] + 0.1 * (t[n - 1] - t[0]);
  std::size_t fit_end = 0;
  while (fit_end < n && t[fit_end] <= cutoff) ++fit_end;
  if (fit_end < 3) throw Error(ErrorCode::FitFailed, "fewer than 3 samples in the fitting window");

  std::vector<double> target(fit_end);
  double scale = 0.0;
  for (std::size_t i = 0; i < fit_end; ++i) {
    double de;
    if (i == 0) {
      de = (energy[1] - energy[0]) / (t[1] - t[0]);
    } else if (i + 1 == n) {
      de = (energy[i] - energy[i - 1]) / (t[i] - t[i - 1]);
    } else {
      de = (energy[i + 1] - energy[i - 1]) / (t[i + 1] - t[i - 1]);
    }
    target[i] = de + (dissipation.empty() ? 0.0 : dissipation[i]);
    const double base = energy[i] * (1.0 + std::pow(energy[i], 3 * s));
    if (base > 0.0) scale = std::max(scale, std::abs(target[i]) / base);
  }
  auto loss = [&](double c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < fit_end; ++i) {
      const double r = target[i] - bound_rate(c, energy[i], integral[i], s);
      acc += r * r;
    }
    return acc;
  };
  const double c_max = 2.0 * scale + 1.0;
  const auto [c_fit, l_fit] = boost::math::tools::brent_find_minima(loss, 0.0, c_max, 40);
  if (!std::isfinite(c_fit) || !std::isfinite(l_fit)) throw Error(ErrorCode::FitFailed, "least-squares fit diverged");

  Envelope env;
  env.constant = c_fit;
  env.t.assign(t.begin(), t.end());
  env.energy.assign(energy.begin(), energy.end());
  env.bound.assign(n, std::numeric_limits<double>::infinity());
  double bnd = energy[0];
  double j = 0.0;
  env.bound[0] = bnd;
  constexpr int kSubsteps = 32;
  auto rhs = [&](double e, double jj) { return std::array<double, 2>{bound_rate(c_fit, e, jj, s), std::sqrt(e)}; };
  for (std::size_t i = 1; i < n && std::isfinite(bnd); ++i) {
    const double h = (t[i] - t[i - 1]) / kSubsteps;
    for (int k = 0; k < kSubsteps && std::isfinite(bnd); ++k) {
      const auto k1 = rhs(bnd, j);
      const auto k2 = rhs(bnd + 0.5 * h * k1[0], j + 0.5 * h * k1[1]);
      const auto k3 = rhs(bnd + 0.5 * h * k2[0], j + 0.5 * h * k2[1]);
      const auto k4 = rhs(bnd + h * k3[0], j + h * k3[1]);
      bnd += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
      j += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    }
    env.bound[i] = std::isfinite(bnd) ? bnd : std::numeric_limits<double>::infinity();
  }
  env.pass = true;
  env.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = fit_end; i < n; ++i) {
    const double b = env.bound[i];
    if (!std::isfinite(b)) continue;
    if (energy[i] > b * (1.0 + 1e-12) + 1e-300) env.pass = false;
    if (b > 0.0) env.margin = std::min(env.margin, (b - energy[i]) / b);
  }
  if (!std::isfinite(env.margin)) env.margin = 1.0;
  return env;
}

std::pair<double, double> poincare_sides(const SphereGrid& sphere, const Eigen::VectorXd& u, const Vec3& omega,
                                         double kappa) {
  if (u.size() != sphere.coeff_count()) throw Error(ErrorCode::DegreeMismatch, "coefficient count mismatch");
  const auto& nodes = sphere.nodes();
  const Eigen::ArrayXd m = (kappa * ((nodes * omega).array() - 1.0)).exp() / scaled_z(kappa);
  const Eigen::ArrayXd w = sphere.weights().array() * m;
  Eigen::ArrayXd un = (sphere.synthesis() * u).array();
  un -= (w * un).sum() / w.sum();
  Eigen::ArrayXd g2 = Eigen::ArrayXd::Zero(un.size());
  for (int d = 0; d < 3; ++d) g2 += (sphere.gradient()[d] * u).array().square();
  return {std::sqrt((w * un.square()).sum()), std::sqrt((w * g2).sum())};
}

}  // namespace soh::diagnostics
