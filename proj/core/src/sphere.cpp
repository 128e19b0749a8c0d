#include "soh/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "soh/errors.hpp"
#include "soh/gauss_legendre.hpp"

namespace soh {
namespace {

constexpr double kPi = std::numbers::pi;

// Normalized associated Legendre functions q_l^m(mu) (sphere-orthonormal with
// the azimuthal factor 1/sqrt(2 pi) folded in) and their theta derivatives.
// Layout: [l * (L + 1) + m], 0 <= m <= l.
struct LegendreTable {
  int degree;
  std::vector<double> q;
  std::vector<double> dq_dtheta;

  double value(int l, int m) const { return q[l * (degree + 1) + m]; }
  double dtheta(int l, int m) const { return dq_dtheta[l * (degree + 1) + m]; }
};

LegendreTable legendre_table(int degree, double mu) {
  const int stride = degree + 1;
  LegendreTable t{degree, std::vector<double>(stride * stride, 0.0),
                  std::vector<double>(stride * stride, 0.0)};
  const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
  auto q = [&](int l, int m) -> double& { return t.q[l * stride + m]; };

  q(0, 0) = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 1; m <= degree; ++m) q(m, m) = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * q(m - 1, m - 1);
  for (int m = 0; m < degree; ++m) q(m + 1, m) = std::sqrt(2.0 * m + 3.0) * mu * q(m, m);
  for (int m = 0; m <= degree; ++m) {
    for (int l = m + 2; l <= degree; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (1.0 * l * l - 1.0 * m * m));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - 1.0 * m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      q(l, m) = a * (mu * q(l - 1, m) - b * q(l - 2, m));
    }
  }
  // d/dtheta q_l^m = (l mu q_l^m - c q_{l-1}^m) / sin(theta)
  if (s > 0.0) {
    for (int l = 0; l <= degree; ++l) {
      for (int m = 0; m <= l; ++m) {
        const double c = (l > m) ? std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) * (1.0 * l * l - 1.0 * m * m)) : 0.0;
        const double prev = (l > m) ? q(l - 1, m) : 0.0;
        t.dq_dtheta[l * stride + m] = (l * mu * q(l, m) - c * prev) / s;
      }
    }
  }
  return t;
}

}  // namespace

SphereSpectrum::SphereSpectrum(int degree, std::vector<double> coeffs)
    : degree_(degree), coeffs_(std::move(coeffs)) {
  if (static_cast<int>(coeffs_.size()) != sh_count(degree)) {
    throw Error(ErrorCode::DegreeMismatch, "coefficient count does not match (L+1)^2");
  }
}

double SphereSpectrum::norm() const {
  double s = 0.0;
  for (double c : coeffs_) s += c * c;
  return std::sqrt(s);
}

double real_spherical_harmonic(int l, int m, const Vec3& omega) {
  const Vec3 u = omega.normalized();
  const auto t = legendre_table(l, std::clamp(u.z(), -1.0, 1.0));
  const double az = std::atan2(u.y(), u.x());
  const int am = std::abs(m);
  if (m == 0) return t.value(l, 0);
  if (m > 0) return std::numbers::sqrt2 * t.value(l, am) * std::cos(am * az);
  return std::numbers::sqrt2 * t.value(l, am) * std::sin(am * az);
}

std::vector<double> real_spherical_harmonics(int degree, const Vec3& omega) {
  const Vec3 u = omega.normalized();
  const auto t = legendre_table(degree, std::clamp(u.z(), -1.0, 1.0));
  const double az = std::atan2(u.y(), u.x());
  std::vector<double> out(sh_count(degree));
  for (int l = 0; l <= degree; ++l) {
    out[sh_index(l, 0)] = t.value(l, 0);
    for (int m = 1; m <= l; ++m) {
      out[sh_index(l, m)] = std::numbers::sqrt2 * t.value(l, m) * std::cos(m * az);
      out[sh_index(l, -m)] = std::numbers::sqrt2 * t.value(l, m) * std::sin(m * az);
    }
  }
  return out;
}

SphereSpectrum laplace_beltrami(const SphereSpectrum& spec) {
  SphereSpectrum out(spec.degree());
  for (int l = 0; l <= spec.degree(); ++l) {
    for (int m = -l; m <= l; ++m) out(l, m) = -static_cast<double>(l * (l + 1)) * spec(l, m);
  }
  return out;
}

SphereGrid::SphereGrid(int degree, int quad_degree)
    : degree_(degree), quad_degree_(quad_degree < 0 ? degree : quad_degree) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "sphere degree must be >= 0");
  if (quad_degree_ < degree_) throw Error(ErrorCode::DegreeMismatch, "quadrature degree below spectral degree");

  n_theta_ = quad_degree_ + 1;
  n_phi_ = 2 * quad_degree_ + 2;
  const auto gl = gauss_legendre(n_theta_);
  const Eigen::Index nn = static_cast<Eigen::Index>(n_theta_) * n_phi_;
  const int nc = sh_count(degree_);

  nodes_.resize(nn, 3);
  weights_.resize(nn);
  synthesis_.resize(nn, nc);
  for (auto& g : gradient_) g.resize(nn, nc);
  coeff_degree_.resize(nc);
  for (int l = 0; l <= degree_; ++l) {
    for (int m = -l; m <= l; ++m) coeff_degree_[sh_index(l, m)] = l;
  }

  const double dphi = 2.0 * kPi / n_phi_;
  for (int j = 0; j < n_theta_; ++j) {
    const double mu = gl.nodes[j];
    const double s = std::sqrt(1.0 - mu * mu);
    const auto table = legendre_table(degree_, mu);
    for (int k = 0; k < n_phi_; ++k) {
      const double az = k * dphi;
      const double ca = std::cos(az);
      const double sa = std::sin(az);
      const Eigen::Index i = static_cast<Eigen::Index>(j) * n_phi_ + k;
      nodes_.row(i) << s * ca, s * sa, mu;
      weights_(i) = gl.weights[j] * dphi;
      const Vec3 e_theta(mu * ca, mu * sa, -s);
      const Vec3 e_phi(-sa, ca, 0.0);
      for (int l = 0; l <= degree_; ++l) {
        for (int m = -l; m <= l; ++m) {
          const int am = std::abs(m);
          const double q = table.value(l, am);
          const double dq = table.dtheta(l, am);
          double y = 0.0;
          double y_theta = 0.0;
          double y_phi = 0.0;  // d/dphi
          if (m == 0) {
            y = q;
            y_theta = dq;
          } else {
            const double c = std::cos(am * az);
            const double sn = std::sin(am * az);
            const double r2 = std::numbers::sqrt2;
            if (m > 0) {
              y = r2 * q * c;
              y_theta = r2 * dq * c;
              y_phi = -r2 * q * am * sn;
            } else {
              y = r2 * q * sn;
              y_theta = r2 * dq * sn;
              y_phi = r2 * q * am * c;
            }
          }
          const int col = sh_index(l, m);
          synthesis_(i, col) = y;
          const Vec3 g = y_theta * e_theta + (y_phi / s) * e_phi;
          for (int d = 0; d < 3; ++d) gradient_[d](i, col) = g(d);
        }
      }
    }
  }
  analysis_ = synthesis_.transpose() * weights_.asDiagonal();
}

SphereSpectrum SphereGrid::transform(std::span<const double> values) const {
  if (static_cast<Eigen::Index>(values.size()) != node_count()) {
    throw Error(ErrorCode::DegreeMismatch, "value count does not match the sphere quadrature");
  }
  Eigen::Map<const Eigen::VectorXd> v(values.data(), node_count());
  Eigen::VectorXd c = analysis_ * v;
  return SphereSpectrum(degree_, std::vector<double>(c.data(), c.data() + c.size()));
}

std::vector<double> SphereGrid::inverse_transform(const SphereSpectrum& spec) const {
  if (spec.degree() != degree_) throw Error(ErrorCode::DegreeMismatch, "spectrum degree differs from grid degree");
  Eigen::Map<const Eigen::VectorXd> c(spec.coeffs().data(), coeff_count());
  Eigen::VectorXd v = synthesis_ * c;
  return std::vector<double>(v.data(), v.data() + v.size());
}

double SphereGrid::integrate(std::span<const double> values) const {
  if (static_cast<Eigen::Index>(values.size()) != node_count()) {
    throw Error(ErrorCode::DegreeMismatch, "value count does not match the sphere quadrature");
  }
  Eigen::Map<const Eigen::VectorXd> v(values.data(), node_count());
  return weights_.dot(v);
}

}  // namespace soh
