#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "soh/geometry.hpp"
#include "soh/torus.hpp"
#include "soh/vmf.hpp"

namespace soh::macro {

/// Macroscopic unknowns in stereographic variables: rho_hat = ln rho, the
/// chart coordinates (phi, psi) of the orientation, and the fluid velocity.
struct MacroState {
  Field rho_hat;
  Field phi;
  Field psi;
  VectorField v;
  double t = 0.0;
};

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double cfl_safety = 0.9;
  bool imex = true;
  int output_every = 100;  // steps between observer calls
  double pole_bound = kPoleGaugeBound;
  double divergence_tolerance = 1e-10;
};

/// Which direction multiplies the strain/vorticity coupling of the psi equation.
/// `Printed` reproduces the misprinted Omega_phi (x) Omega and exists only so
/// the vector-form cross-check can tell the two apart.
enum class PsiCoupling { Corrected, Printed };

struct RhsOptions {
  PsiCoupling psi_coupling = PsiCoupling::Corrected;
  bool include_linear = true;  // false drops gamma Lap phi, gamma Lap psi, Lap v / Re
};

struct Rhs {
  Field rho_hat;
  Field phi;
  Field psi;
  VectorField v;
};

/// Unit orientation reconstructed pointwise from (phi, psi).
std::array<Field, 3> orientation(const MacroState& state);
double mass(const TorusGrid& grid, const MacroState& state);
double max_w(const MacroState& state);
double max_stereo_radius_sq(const MacroState& state);

Field rhs_rho_hat(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs);
Field rhs_phi(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs);
Field rhs_psi(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs,
              PsiCoupling coupling = PsiCoupling::Corrected);
/// Leray-projected velocity tendency.
VectorField rhs_velocity(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs);
/// All four tendencies with shared intermediate fields; the result is dealiased.
Rhs evaluate_rhs(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs,
                 const RhsOptions& options = {});

/// The stress divergence div(rho Q(Omega)) / rho assembled in stereographic form.
VectorField stress_divergence(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs);

/// Largest dt allowed by the advective bound (and the explicit diffusive bound when !imex).
double stable_dt(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs,
                 const SolverConfig& config);

/// One integrating-factor RK3 step. Throws CflViolation, PoleGaugeExceeded,
/// ConstraintViolation (divergence of v above tolerance).
MacroState step(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs,
                const SolverConfig& config, PsiCoupling coupling = PsiCoupling::Corrected);

using Observer = std::function<void(const MacroState&)>;

/// Steps to config.t_end (the last step is shortened to land on it). The
/// observer sees the initial state, every `output_every`-th state and the final one.
MacroState run_macro(const TorusGrid& grid, const MacroState& initial, const vmf::CoefficientSet& cs,
                     const SolverConfig& config, const Observer& observer = {},
                     PsiCoupling coupling = PsiCoupling::Corrected);

/// Residual norms of the original vector-form equations evaluated on the
/// middle of 3 or 5 equally spaced states (second- or fourth-order central
/// time differences).
struct VectorFormResidual {
  double rho = 0.0;
  double omega = 0.0;
  double v = 0.0;
};

VectorFormResidual cross_check_vector_form(const TorusGrid& grid, std::span<const MacroState> states,
                                           const vmf::CoefficientSet& cs);

/// Central-difference weights for 3 or 5 equally spaced samples; throws
/// TimeMismatch on uneven spacing.
std::vector<double> central_weights(std::span<const double> times);

/// Zero-mean pressure from the unprojected momentum balance.
Field recover_pressure(const TorusGrid& grid, const MacroState& state, const vmf::CoefficientSet& cs);

/// rho = 1 + 0.1 cos x1, (phi, psi) = (0.2 sin x2, 0.1 cos x1), v = 0.05 (sin x2, sin x1, 0).
MacroState benchmark_state(const TorusGrid& grid);
MacroState uniform_state(const TorusGrid& grid, double rho, double phi, double psi);
/// Throws PoleGaugeExceeded when max(phi^2 + psi^2) exceeds the bound.
void check_pole_gauge(const MacroState& state, double bound = kPoleGaugeBound);

}  // namespace soh::macro
