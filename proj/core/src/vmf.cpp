#include "soh/vmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "soh/errors.hpp"
#include "soh/gauss_legendre.hpp"
#include "soh/sphere.hpp"

namespace soh::vmf {
namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre size for exp(kappa mu)-weighted moments.
int moment_rule_size(double kappa) { return 64 + static_cast<int>(2.0 * std::min(kappa, kKappaMax)); }

// int_{-1}^{1} f(mu) e^{kappa (mu - 1)} dmu
template <class F>
double scaled_moment(double kappa, F&& f) {
  const auto gl = gauss_legendre(moment_rule_size(kappa));
  double s = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double mu = gl.nodes[i];
    s += gl.weights[i] * f(mu) * std::exp(kappa * (mu - 1.0));
  }
  return s;
}

// P_k, P'_k, P''_k for k = 0..n at x.
void legendre_with_derivatives(int n, double x, std::vector<double>& p, std::vector<double>& dp,
                               std::vector<double>& ddp) {
  p = legendre_values(n, x);
  dp.assign(n + 1, 0.0);
  ddp.assign(n + 1, 0.0);
  if (n >= 1) dp[1] = 1.0;
  for (int k = 1; k < n; ++k) {
    dp[k + 1] = dp[k - 1] + (2.0 * k + 1.0) * p[k];
    ddp[k + 1] = ddp[k - 1] + (2.0 * k + 1.0) * dp[k];
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// kernels

SensingKernel SensingKernel::gaussian(double sigma) {
  SensingKernel k;
  k.kind_ = Kind::Gaussian;
  k.scale_ = sigma;
  return k;
}

SensingKernel SensingKernel::tophat(double radius) {
  SensingKernel k;
  k.kind_ = Kind::TopHat;
  k.scale_ = radius;
  return k;
}

SensingKernel SensingKernel::exponential(double length) {
  SensingKernel k;
  k.kind_ = Kind::Exponential;
  k.scale_ = length;
  return k;
}

SensingKernel SensingKernel::tabulated(std::vector<double> radii, std::vector<double> values) {
  if (radii.size() < 2 || radii.size() != values.size()) {
    throw Error(ErrorCode::InvalidArgument, "tabulated kernel needs >= 2 matching (r, K) samples");
  }
  if (!std::is_sorted(radii.begin(), radii.end()) || radii.front() < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "tabulated kernel radii must be ascending and nonnegative");
  }
  SensingKernel k;
  k.kind_ = Kind::Tabulated;
  k.radii_ = std::move(radii);
  k.values_ = std::move(values);
  return k;
}

std::string SensingKernel::name() const {
  switch (kind_) {
    case Kind::Gaussian: return "gaussian";
    case Kind::TopHat: return "tophat";
    case Kind::Exponential: return "exponential";
    case Kind::Tabulated: return "tabulated";
  }
  return "unknown";
}

double SensingKernel::operator()(double r) const {
  switch (kind_) {
    case Kind::Gaussian: return std::exp(-0.5 * r * r / (scale_ * scale_));
    case Kind::TopHat: return r <= scale_ ? 1.0 : 0.0;
    case Kind::Exponential: return std::exp(-r / scale_);
    case Kind::Tabulated: {
      if (r < radii_.front() || r > radii_.back()) return 0.0;
      auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
      if (it == radii_.end()) return values_.back();
      const auto i = static_cast<std::size_t>(it - radii_.begin());
      const double t = (r - radii_[i - 1]) / (radii_[i] - radii_[i - 1]);
      return (1.0 - t) * values_[i - 1] + t * values_[i];
    }
  }
  return 0.0;
}

double SensingKernel::support() const {
  switch (kind_) {
    case Kind::TopHat: return scale_;
    case Kind::Tabulated: return radii_.back();
    default: return std::numeric_limits<double>::infinity();
  }
}

void ModelParams::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::RangeError, std::string(key) + " must be > 0");
  };
  positive(nu, "params.nu");
  positive(d_noise, "params.D");
  positive(reynolds, "params.Re");
  positive(sensing_radius, "params.R");
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::RangeError, "params.a, params.b, params.lambda must be finite");
  }
}

// ---------------------------------------------------------------------------
// VMF moments

double vmf_normalization(double kappa) {
  if (kappa == 0.0) return 4.0 * kPi;
  return 4.0 * kPi * std::sinh(kappa) / kappa;
}

double vmf_density(double kappa, const UnitVector3& omega, const UnitVector3& Omega) {
  if (kappa < 0.0) throw Error(ErrorCode::KappaOutOfRange, "kappa must be >= 0");
  if (kappa == 0.0) return 1.0 / (4.0 * kPi);
  // exp(kappa (mu - 1)) / (Z e^{-kappa}) keeps the exponent bounded
  const double mu = omega.dot(Omega.vec());
  const double z_scaled = 2.0 * kPi * (1.0 - std::exp(-2.0 * kappa)) / kappa;
  return std::exp(kappa * (mu - 1.0)) / z_scaled;
}

double compute_c1(double kappa) {
  if (kappa < 0.0) throw Error(ErrorCode::KappaOutOfRange, "kappa must be >= 0");
  if (kappa == 0.0) return 0.0;
  const double num = scaled_moment(kappa, [](double mu) { return mu; });
  const double den = scaled_moment(kappa, [](double) { return 1.0; });
  return num / den;
}

double compute_c4(double kappa) {
  if (kappa < 0.0) throw Error(ErrorCode::KappaOutOfRange, "kappa must be >= 0");
  if (kappa == 0.0) return 0.0;
  const double num = scaled_moment(kappa, [](double mu) { return 1.0 - mu * mu; });
  const double den = scaled_moment(kappa, [](double) { return 1.0; });
  return 1.0 - 1.5 * num / den;
}

// ---------------------------------------------------------------------------
// generalized collision invariant

double GciSolution::h(double mu) const { return legendre_series(legendre_coeffs, mu); }
double GciSolution::dh(double mu) const { return legendre_series_derivative(legendre_coeffs, mu); }

GciSolution solve_gci(double kappa, int degree, double tolerance) {
  if (!(kappa >= kKappaMin && kappa <= kKappaMax)) {
    throw Error(ErrorCode::KappaOutOfRange, "GCI solve needs kappa in [1e-3, 100], got " + std::to_string(kappa));
  }
  if (degree < 8) throw Error(ErrorCode::InvalidArgument, "GCI Galerkin degree must be >= 8");

  // Weak form with g = sqrt(1-mu^2) p, test sqrt(1-mu^2) q:
  //   int e^{k mu} [B(p) B(q) + p q] = -int e^{k mu} (1-mu^2) q,
  //   B(p) = (1-mu^2) p' - mu p.
  // Everything is scaled by e^{-kappa}.
  const int n = degree;
  const auto rule = gauss_legendre(n + 8);
  const int nq = static_cast<int>(rule.nodes.size());
  Eigen::MatrixXd basis(nq, n + 1);
  Eigen::MatrixXd bterm(nq, n + 1);
  Eigen::VectorXd weight(nq);
  Eigen::VectorXd source(nq);
  std::vector<double> p, dp, ddp;
  for (int i = 0; i < nq; ++i) {
    const double mu = rule.nodes[i];
    legendre_with_derivatives(n, mu, p, dp, ddp);
    for (int k = 0; k <= n; ++k) {
      basis(i, k) = p[k];
      bterm(i, k) = (1.0 - mu * mu) * dp[k] - mu * p[k];
    }
    const double e = std::exp(kappa * (mu - 1.0));
    weight(i) = rule.weights[i] * e;
    source(i) = -rule.weights[i] * e * (1.0 - mu * mu);
  }
  const Eigen::MatrixXd a = bterm.transpose() * weight.asDiagonal() * bterm +
                            basis.transpose() * weight.asDiagonal() * basis;
  const Eigen::VectorXd rhs = basis.transpose() * source;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SolveFailed, "GCI Galerkin matrix is not positive definite");
  const Eigen::VectorXd c = llt.solve(rhs);
  if (!c.allFinite()) throw Error(ErrorCode::SolveFailed, "GCI Galerkin solve produced non-finite coefficients");

  GciSolution sol;
  sol.kappa = kappa;
  sol.galerkin_degree = n;
  sol.legendre_coeffs.assign(c.data(), c.data() + c.size());
  sol.mu_nodes = rule.nodes;
  sol.mu_weights = rule.weights;
  sol.g_values.resize(nq);
  sol.h_values.resize(nq);
  int positive = 0;
  int negative = 0;
  for (int i = 0; i < nq; ++i) {
    const double mu = rule.nodes[i];
    const double h = basis.row(i).dot(c);
    sol.h_values[i] = h;
    sol.g_values[i] = std::sqrt(1.0 - mu * mu) * h;
    if (h > 0.0) ++positive;
    if (h < 0.0) ++negative;
  }
  if (positive > 0 && negative > 0) throw Error(ErrorCode::SolveFailed, "GCI h changes sign on the node set");
  sol.sign = negative > 0 ? -1 : 1;

  // Strong-form residual divided by e^{kappa mu} sqrt(1 - mu^2):
  //   r = p + (1-mu^2) - (1-mu^2) B' - (kappa (1-mu^2) - mu) B
  const auto check = gauss_legendre(2 * n + 16);
  double res2 = 0.0;
  double src2 = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < check.nodes.size(); ++i) {
    const double mu = check.nodes[i];
    const double om = 1.0 - mu * mu;
    legendre_with_derivatives(n, mu, p, dp, ddp);
    double pv = 0.0, dpv = 0.0, ddpv = 0.0;
    for (int k = 0; k <= n; ++k) {
      pv += c(k) * p[k];
      dpv += c(k) * dp[k];
      ddpv += c(k) * ddp[k];
    }
    const double b = om * dpv - mu * pv;
    const double db = om * ddpv - 3.0 * mu * dpv - pv;
    const double r = pv + om - om * db - (kappa * om - mu) * b;
    const double e = std::exp(kappa * (mu - 1.0));
    res2 += check.weights[i] * e * e * r * r;
    src2 += check.weights[i] * e * e * om * om;
    worst = std::max(worst, std::abs(r));
  }
  sol.residual_norm = std::sqrt(res2 / src2);
  sol.max_scaled_residual = worst;
  if (!(sol.residual_norm < tolerance)) {
    throw Error(ErrorCode::SolveFailed, "GCI residual " + std::to_string(sol.residual_norm) + " above tolerance");
  }
  return sol;
}

std::pair<double, double> compute_c2_c3(const GciSolution& gci) {
  double den = 0.0;
  double n2 = 0.0;
  double n3 = 0.0;
  for (std::size_t i = 0; i < gci.mu_nodes.size(); ++i) {
    const double mu = gci.mu_nodes[i];
    const double w = gci.mu_weights[i] * (1.0 - mu * mu) * std::exp(gci.kappa * (mu - 1.0)) * gci.h_values[i];
    den += w;
    n2 += w * mu;
    n3 += w * mu * mu;
  }
  if (std::abs(den) < 1e-14) throw Error(ErrorCode::DegenerateDenominator, "h-weighted denominator vanishes");
  return {n2 / den, 2.0 * n3 / den};
}

// ---------------------------------------------------------------------------
// k0

double compute_k0(const SensingKernel& kernel, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::RangeError, "sensing radius must be > 0");
  auto moment = [&](int power) {
    auto f = [&](double r) {
      const double k = kernel(r);
      return k == 0.0 ? 0.0 : std::pow(r, power) * k;
    };
    double value = 0.0;
    const double support = kernel.support();
    if (std::isinf(support)) {
      boost::math::quadrature::exp_sinh<double> integrator;
      value = integrator.integrate(f);
    } else if (kernel.kind() == SensingKernel::Kind::Tabulated) {
      const auto& r = kernel.radii();
      for (std::size_t i = 1; i < r.size(); ++i) {
        value += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, r[i - 1], r[i]);
      }
    } else {
      value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, support);
    }
    return value;
  };
  if (kernel.kind() == SensingKernel::Kind::Tabulated) {
    for (double v : kernel.values()) {
      if (v < 0.0) throw Error(ErrorCode::NonIntegrableKernel, "sensing kernel must be nonnegative");
    }
  }
  double m2 = 0.0;
  double m4 = 0.0;
  try {
    m2 = moment(2);
    m4 = moment(4);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::NonIntegrableKernel, e.what());
  }
  if (!std::isfinite(m2) || !std::isfinite(m4) || !(m2 > 0.0)) {
    throw Error(ErrorCode::NonIntegrableKernel, "kernel moments are not finite and positive");
  }
  return radius * radius / 6.0 * (m4 / m2);
}

// ---------------------------------------------------------------------------
// assembled coefficients

void CoefficientSet::refresh_derived() {
  kappa = params.nu / params.d_noise;
  gamma = k0 * params.nu * (c2 + 2.0 / kappa);
  lambda0 = (6.0 / kappa) * c2 + c3 - 1.0;
  lambda_tilde = params.lambda * lambda0;
}

bool CoefficientSet::derived_consistent() const {
  CoefficientSet fresh = *this;
  fresh.refresh_derived();
  return fresh.kappa == kappa && fresh.gamma == gamma && fresh.lambda0 == lambda0 &&
         fresh.lambda_tilde == lambda_tilde;
}

CoefficientSet assemble_coefficients(const ModelParams& params, int degree) {
  params.validate();
  CoefficientSet cs;
  cs.params = params;
  cs.kappa = params.kappa();
  cs.c1 = compute_c1(cs.kappa);
  cs.c4 = compute_c4(cs.kappa);
  const auto gci = solve_gci(cs.kappa, degree);
  std::tie(cs.c2, cs.c3) = compute_c2_c3(gci);
  cs.k0 = compute_k0(params.kernel, params.sensing_radius);
  cs.refresh_derived();
  return cs;
}

// ---------------------------------------------------------------------------
// weighted Poincare constant

double estimate_poincare_constant(double kappa, const UnitVector3& Omega, int degree) {
  if (degree < 4) throw Error(ErrorCode::InvalidArgument, "Poincare estimate needs L >= 4");
  if (kappa < 0.0) throw Error(ErrorCode::KappaOutOfRange, "kappa must be >= 0");
  const int quad = 2 * degree + 24 + static_cast<int>(2.0 * kappa);
  const SphereGrid grid(degree, quad);
  const Eigen::Index nn = grid.node_count();
  Eigen::VectorXd wm(nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    wm(i) = grid.weights()(i) * std::exp(kappa * (grid.node(i).dot(Omega.vec()) - 1.0));
  }
  const auto& y = grid.synthesis();
  const auto& g = grid.gradient();
  Eigen::MatrixXd mass = y.transpose() * wm.asDiagonal() * y;
  Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(y.cols(), y.cols());
  for (int d = 0; d < 3; ++d) stiff += g[d].transpose() * wm.asDiagonal() * g[d];
  mass = 0.5 * (mass + mass.transpose()).eval();
  stiff = 0.5 * (stiff + stiff.transpose()).eval();

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(stiff, mass, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigensolveFailed, "weighted Dirichlet eigensolve failed");
  const auto& ev = es.eigenvalues();
  if (ev.size() < 2 || std::abs(ev(0)) > 1e-8 || !(ev(1) > 1e-8)) {
    throw Error(ErrorCode::EigensolveFailed, "unexpected spectrum of the weighted Dirichlet form");
  }
  return 1.0 / std::sqrt(ev(1));
}

}  // namespace soh::vmf
