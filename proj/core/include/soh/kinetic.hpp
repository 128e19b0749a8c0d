#pragma once

#include <array>
#include <functional>

#include <Eigen/Dense>

#include "soh/sphere.hpp"
#include "soh/torus.hpp"
#include "soh/vmf.hpp"

namespace soh::kinetic {

/// f(x, .) as real harmonic coefficients: one row per torus point, one column
/// per (l, m) slot. Each column is therefore an ordinary torus field.
using Distribution = Eigen::MatrixXd;

struct KineticState {
  Distribution f;
  VectorField v;
  double epsilon = 1.0;
  double t = 0.0;
};

struct KineticConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double cfl_safety = 0.9;
  int output_every = 100;
  double current_floor = 1e-8;  // relative to rho_f
  double divergence_tolerance = 1e-10;
};

/// Local moments. `omega_f` is filled only where |j| >= floor * rho (see `defined`).
struct MeanField {
  Field rho;
  std::array<Field, 3> j;
  std::array<Field, 3> omega_f;
  std::array<std::array<Field, 3>, 3> q;  // int (w w - I/3) f
  std::vector<unsigned char> defined;
};

/// Spectral tables for one (torus grid, sphere degree, coefficient set) triple.
/// The sphere quadrature runs at degree L + 2, which makes every Galerkin
/// product in the kinetic equation exact.
class KineticModel {
 public:
  KineticModel(const TorusGrid& grid, int degree, const vmf::CoefficientSet& cs);

  const TorusGrid& grid() const { return grid_; }
  const SphereGrid& sphere() const { return sphere_; }
  /// Quadrature for integrands carrying 1 / M (exact up to the Taylor tail of e^{-kappa mu}).
  const SphereGrid& fine_sphere() const { return fine_; }
  const vmf::CoefficientSet& coefficients() const { return cs_; }
  int degree() const { return degree_; }
  Eigen::Index coeff_count() const { return sphere_.coeff_count(); }

  /// Node values, (points x sphere nodes).
  Eigen::MatrixXd to_nodes(const Distribution& f) const;
  /// Quadrature projection of node values onto the coefficients.
  Distribution from_nodes(const Eigen::MatrixXd& values) const;

  MeanField moments(const Distribution& f, double floor = 1e-8) const;

  /// Q(f) = -div_w(nu P Omega_f f) + D Lap_w f. Throws DegenerateCurrent.
  Distribution collision(const Distribution& f, double floor = 1e-8) const;

  /// int Q(f) f / M_{Omega_f} dw at each torus point. Q(f) is evaluated
  /// pointwise (no degree truncation) on a finer quadrature than the solver's.
  Field collision_dissipation(const Distribution& f, double floor = 1e-8) const;

  /// int M |grad_w (f / M)|^2 dw at each point (M = M_{Omega_f}).
  Field relative_fisher_information(const Distribution& f, double floor = 1e-8) const;

  /// P_w[nu k0 / |j| P_{Omega_f} Lap_x j + (lambda S(v) + A(v)) w] at (point, node).
  std::array<Eigen::MatrixXd, 3> force_term(const Distribution& f, const VectorField& v, double floor = 1e-8) const;

  /// Coefficients of rho(x) M_{Omega(x)} (exact zonal projection).
  Distribution equilibrium(const Field& rho, const std::array<Field, 3>& omega) const;

  double total_mass(const Distribution& f) const;

  double stable_dt(const KineticState& state, const KineticConfig& config) const;

  /// One exponential RK3 step (Cox-Matthews): angular diffusion exact per
  /// (l, m), viscosity exact per Fourier mode, drift/force/transport explicit.
  /// Exponential stages keep exact equilibria of the full system fixed.
  /// Throws CflViolation, DegenerateCurrent, NegativeMass, ConstraintViolation.
  KineticState step(const KineticState& state, const KineticConfig& config) const;

  using Observer = std::function<void(const KineticState&)>;
  KineticState run(const KineticState& initial, const KineticConfig& config, const Observer& observer = {}) const;

  struct Tendency {
    Distribution f;
    VectorField v;
  };
  /// Explicit part of the right-hand side (everything except the diagonal terms).
  Tendency explicit_rhs(const KineticState& state, double floor) const;

 private:
  KineticState advance(const KineticState& state, const KineticConfig& config, double dt) const;

  TorusGrid grid_;
  vmf::CoefficientSet cs_;
  int degree_;
  SphereGrid sphere_;
  SphereGrid fine_;  // diagnostics quadrature
  Eigen::MatrixXd synthesis_t_;                  // Y^T (coeffs x nodes)
  Eigen::MatrixXd analysis_t_;                   // (Y^T W)^T (nodes x coeffs)
  std::array<Eigen::MatrixXd, 3> weighted_grad_;  // diag(w) G_d (nodes x coeffs)
  std::array<Eigen::MatrixXd, 3> transport_;      // (int w_d Y_c Y_c')^T
  Eigen::VectorXd rho_vec_;
  std::array<Eigen::VectorXd, 3> j_vec_;
  std::array<std::array<Eigen::VectorXd, 3>, 3> q_vec_;
  Eigen::VectorXd eigen_;                        // l (l + 1) per coefficient
};

}  // namespace soh::kinetic
