#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "soh/kinetic.hpp"
#include "soh/macro.hpp"
#include "soh/sphere.hpp"
#include "soh/torus.hpp"
#include "soh/vmf.hpp"

namespace soh::diagnostics {

inline constexpr int kDefaultSobolevIndex = 2;

double sobolev_norm(const TorusGrid& grid, std::span<const double> field, int s);
/// sum_i ||d_i u||^2_{H^s}
double gradient_sobolev_norm_sq(const TorusGrid& grid, std::span<const double> field, int s);

/// (int int |g / M|^2 M dw dx)^{1/2} with M = M_{Omega0(x)}; g given at the
/// nodes of `sphere`, one row per torus point.
double weighted_norm(const TorusGrid& grid, const SphereGrid& sphere, const Eigen::MatrixXd& g,
                     const std::array<Field, 3>& omega0, double kappa);

/// exp(kappa (w . Omega0(x) - 1)) / (Z e^{-kappa}) at (point, node).
Eigen::MatrixXd vmf_table(const SphereGrid& sphere, const std::array<Field, 3>& omega0, double kappa);

struct MacroEnergy {
  double energy = 0.0;       // ||rho_hat||^2 + ||phi||^2 + ||psi||^2 + Re ||v||^2, all H^s
  double dissipation = 0.0;  // gamma ||grad phi||^2 + gamma ||grad psi||^2 + ||grad v||^2, all H^s
  std::array<double, 4> parts{};  // the four energy summands
};

MacroEnergy energy_functionals_macro(const TorusGrid& grid, const macro::MacroState& state,
                                     const vmf::CoefficientSet& cs, int s = kDefaultSobolevIndex);

struct KineticEnergy {
  double energy = 0.0;
  double dissipation = 0.0;
  double velocity = 0.0;                       // ||v_R||^2_{H^s}
  std::map<std::pair<int, int>, double> terms;  // (k, l) -> ||grad_x^k grad_w^l f_R / M0||_M^2
};

/// Remainder functionals with eta0^(k + l) weights. Angular derivatives of
/// order l use the spectral surrogate (l'(l' + 1))^{l/2} per harmonic degree l'.
KineticEnergy energy_functionals_kinetic(const kinetic::KineticModel& model, const VectorField& v_r,
                                         const kinetic::Distribution& f_r, const std::array<Field, 3>& omega0,
                                         double epsilon, int s = kDefaultSobolevIndex, double eta0 = 1.0);

struct EnergyReport {
  double t = 0.0;
  double e_macro = 0.0;
  double d_macro = 0.0;
  double e_kinetic = 0.0;
  double d_kinetic = 0.0;
  double eta0 = 1.0;
  std::map<std::pair<int, int>, double> breakdown;
};

/// Pointwise defects of the first-order consistency term
/// h0 = d_t f0 + (v + a w) . grad_x f0 + div_w(F0 f0), f0 = rho M_Omega.
struct ConsistencyDefect {
  Field scalar;                  // int h0 dw
  std::array<Field, 3> vector;   // int h0 h(w . Omega) P_{Omega perp} w dw
  double scalar_norm = 0.0;      // L2 over the torus
  double vector_norm = 0.0;
};

/// `states` are 3 or 5 equally spaced macro states; the defect is evaluated at
/// the middle one. Throws TimeMismatch.
ConsistencyDefect gci_projections_h0(const TorusGrid& grid, std::span<const macro::MacroState> states,
                                     const vmf::CoefficientSet& cs, const vmf::GciSolution& gci);

/// Divergence of P_w(T + B w) on the unit sphere: -2 w.T + tr B - 3 w.B w.
double tangent_field_divergence(const Vec3& w, const Vec3& t, const Mat3& b);

struct Envelope {
  std::vector<double> t;
  std::vector<double> energy;
  std::vector<double> bound;
  double constant = 0.0;  // fitted C
  double margin = 0.0;    // min over the checked window of (bound - E) / bound
  bool pass = false;
};

/// Fits C on the first 10% of the series against
/// dE/dt + D <= C [1 + exp(C int_0^t E^{1/2})] E (1 + E^{3s}),
/// integrates that bound from E(0) and checks E(t) <= bound(t) afterwards.
/// `dissipation` may be empty. Throws FitFailed.
Envelope gronwall_envelope(std::span<const double> t, std::span<const double> energy,
                           std::span<const double> dissipation = {}, int s = kDefaultSobolevIndex);

/// Both sides of the weighted Poincare inequality for u (degree <= L
/// coefficients on `sphere`) after removing its M-mean:
/// first = ||u - <u>_M||_{L2(M)}, second = ||grad u||_{L2(M)}.
std::pair<double, double> poincare_sides(const SphereGrid& sphere, const Eigen::VectorXd& u, const Vec3& omega,
                                         double kappa);

}  // namespace soh::diagnostics
