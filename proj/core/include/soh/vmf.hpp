#pragma once

#include <string>
#include <utility>
#include <vector>

#include "soh/geometry.hpp"

namespace soh::vmf {

/// Radial sensing kernel K(r) used in the second-moment constant k0.
class SensingKernel {
 public:
  enum class Kind { Gaussian, TopHat, Exponential, Tabulated };

  static SensingKernel gaussian(double sigma = 1.0);
  static SensingKernel tophat(double radius = 1.0);
  static SensingKernel exponential(double length = 1.0);
  /// Piecewise-linear interpolation of (r, K) samples, zero beyond the last radius.
  static SensingKernel tabulated(std::vector<double> radii, std::vector<double> values);

  Kind kind() const { return kind_; }
  double scale() const { return scale_; }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& values() const { return values_; }
  std::string name() const;

  double operator()(double r) const;
  /// Radius beyond which K vanishes (infinity for unbounded support).
  double support() const;

 private:
  Kind kind_ = Kind::Gaussian;
  double scale_ = 1.0;
  std::vector<double> radii_;
  std::vector<double> values_;
};

struct ModelParams {
  double a = 1.0;               // self-propulsion speed
  double b = 0.2;               // stress coupling
  double nu = 1.0;              // alignment frequency
  double d_noise = 1.0;         // angular diffusion
  double lambda = 1.0;          // shape parameter of the Jeffery coupling
  double sensing_radius = 1.0;  // R
  double reynolds = 1.0;        // Re
  SensingKernel kernel = SensingKernel::gaussian();

  double kappa() const { return nu / d_noise; }
  /// Throws RangeError unless nu, D, Re, R > 0.
  void validate() const;
};

/// Generalized collision invariant g(mu) = sqrt(1 - mu^2) h(mu), with h a
/// Legendre series of degree N, together with its residual certificate.
struct GciSolution {
  double kappa = 0.0;
  int galerkin_degree = 0;
  std::vector<double> mu_nodes;
  std::vector<double> mu_weights;
  std::vector<double> g_values;
  std::vector<double> h_values;
  std::vector<double> legendre_coeffs;  // h = sum_k c_k P_k
  double residual_norm = 0.0;           // relative, V-weighted L2
  double max_scaled_residual = 0.0;     // max |residual| / (e^{kappa mu} sqrt(1-mu^2)) at nodes
  int sign = 0;                         // realized sign of h on the nodes (+1 or -1)

  double h(double mu) const;
  double dh(double mu) const;
};

struct CoefficientSet {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double k0 = 0.0;
  double kappa = 0.0;
  double gamma = 0.0;
  double lambda0 = 0.0;
  double lambda_tilde = 0.0;
  ModelParams params;

  /// Recompute gamma, lambda0, lambda_tilde, kappa from the primary fields.
  void refresh_derived();
  /// True when the stored derived fields equal a fresh recomputation exactly.
  bool derived_consistent() const;
};

inline constexpr double kKappaMin = 1e-3;
inline constexpr double kKappaMax = 100.0;
inline constexpr int kDefaultGciDegree = 64;
inline constexpr double kGciTolerance = 1e-8;

/// Z(kappa) = 4 pi sinh(kappa) / kappa, 4 pi at kappa = 0.
double vmf_normalization(double kappa);

/// M_Omega(omega) = exp(kappa omega . Omega) / Z.
double vmf_density(double kappa, const UnitVector3& omega, const UnitVector3& Omega);

/// Ratio of exp(kappa cos)-weighted moments of cos(theta), by quadrature.
double compute_c1(double kappa);

/// 1 - 3 int sin^3 e^{kappa cos} / (2 int sin e^{kappa cos}), by quadrature.
double compute_c4(double kappa);

/// Galerkin solve of the GCI equation. Throws KappaOutOfRange outside
/// [1e-3, 100], SolveFailed if the system is singular, the residual exceeds
/// `tolerance`, or h changes sign.
GciSolution solve_gci(double kappa, int degree = kDefaultGciDegree, double tolerance = kGciTolerance);

/// (c2, c3) from a certified GCI. Throws DegenerateDenominator.
std::pair<double, double> compute_c2_c3(const GciSolution& gci);

/// (R^2 / 6) * int r^4 K / int r^2 K over (0, inf). Throws NonIntegrableKernel.
double compute_k0(const SensingKernel& kernel, double radius);

CoefficientSet assemble_coefficients(const ModelParams& params, int degree = kDefaultGciDegree);

/// Lambda = lambda_1^{-1/2}, lambda_1 the smallest nonzero eigenvalue of the
/// M_Omega-weighted Dirichlet form on harmonics of degree <= L.
double estimate_poincare_constant(double kappa, const UnitVector3& Omega, int degree);

}  // namespace soh::vmf
