#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "soh/geometry.hpp"

namespace soh {

/// Flat index of the real harmonic (l, m), -l <= m <= l.
constexpr int sh_index(int l, int m) { return l * l + l + m; }
constexpr int sh_count(int degree) { return (degree + 1) * (degree + 1); }

/// Coefficients of a real function on S^2 in the orthonormal real harmonic
/// basis (no Condon-Shortley phase): m > 0 pairs with sqrt(2) cos(m phi),
/// m < 0 with sqrt(2) sin(|m| phi).
class SphereSpectrum {
 public:
  SphereSpectrum() = default;
  explicit SphereSpectrum(int degree) : degree_(degree), coeffs_(sh_count(degree), 0.0) {}
  SphereSpectrum(int degree, std::vector<double> coeffs);

  int degree() const { return degree_; }
  std::size_t size() const { return coeffs_.size(); }
  double& operator()(int l, int m) { return coeffs_[sh_index(l, m)]; }
  double operator()(int l, int m) const { return coeffs_[sh_index(l, m)]; }
  std::span<double> coeffs() { return coeffs_; }
  std::span<const double> coeffs() const { return coeffs_; }

  /// Euclidean norm of the coefficient vector (= L2 norm on the sphere).
  double norm() const;

 private:
  int degree_ = 0;
  std::vector<double> coeffs_;
};

/// Direct evaluation of a real orthonormal harmonic at a point.
double real_spherical_harmonic(int l, int m, const Vec3& omega);

/// All harmonics of degree <= L at one point, in sh_index order.
std::vector<double> real_spherical_harmonics(int degree, const Vec3& omega);

/// Multiplies coefficient (l, m) by -l(l+1).
SphereSpectrum laplace_beltrami(const SphereSpectrum& spec);

/// Tensor-product quadrature (Gauss-Legendre in mu = cos(theta) x uniform
/// azimuth) together with synthesis, analysis and surface-gradient tables for
/// harmonics up to `degree`.
///
/// The node grid is sized for `quad_degree` >= degree: (quad_degree + 1)
/// latitudes and 2 quad_degree + 2 longitudes, exact for products of total
/// degree <= 2 quad_degree + 1.
class SphereGrid {
 public:
  explicit SphereGrid(int degree, int quad_degree = -1);

  int degree() const { return degree_; }
  int quad_degree() const { return quad_degree_; }
  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  Eigen::Index node_count() const { return weights_.size(); }
  Eigen::Index coeff_count() const { return synthesis_.cols(); }

  /// Node coordinates, one row per node.
  const Eigen::MatrixX3d& nodes() const { return nodes_; }
  Vec3 node(Eigen::Index i) const { return nodes_.row(i).transpose(); }
  const Eigen::VectorXd& weights() const { return weights_; }

  /// Y(node, coeff).
  const Eigen::MatrixXd& synthesis() const { return synthesis_; }
  /// Y^T diag(w): coefficients = analysis * values.
  const Eigen::MatrixXd& analysis() const { return analysis_; }
  /// Cartesian components of the surface gradient of each harmonic at each node.
  const std::array<Eigen::MatrixXd, 3>& gradient() const { return gradient_; }
  /// l for each coefficient slot.
  const std::vector<int>& coeff_degree() const { return coeff_degree_; }

  /// Throws DegreeMismatch if values.size() != node_count().
  SphereSpectrum transform(std::span<const double> values) const;
  /// Throws DegreeMismatch if spec.degree() != degree().
  std::vector<double> inverse_transform(const SphereSpectrum& spec) const;

  double integrate(std::span<const double> values) const;

 private:
  int degree_;
  int quad_degree_;
  int n_theta_;
  int n_phi_;
  Eigen::MatrixX3d nodes_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd synthesis_;
  Eigen::MatrixXd analysis_;
  std::array<Eigen::MatrixXd, 3> gradient_;
  std::vector<int> coeff_degree_;
};

}  // namespace soh
