#pragma once

#include <Eigen/Dense>

namespace soh {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Default tolerance around the north pole inside which the stereographic
/// inverse is rejected.
inline constexpr double kPoleTolerance = 1e-8;

/// Default bound on max(phi^2 + psi^2) accepted for a stereographic field.
inline constexpr double kPoleGaugeBound = 1e4;

/// A direction on S^2. Construction renormalizes; a zero vector is rejected.
class UnitVector3 {
 public:
  UnitVector3() : v_(0.0, 0.0, 1.0) {}
  explicit UnitVector3(const Vec3& v);
  UnitVector3(double x, double y, double z) : UnitVector3(Vec3(x, y, z)) {}

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }
  double dot(const Vec3& a) const { return v_.dot(a); }

 private:
  Vec3 v_;
};

/// Stereographic coordinates of a point on S^2 minus the north pole, with the
/// conformal factor W = 1 + phi^2 + psi^2 cached.
class StereoPoint {
 public:
  StereoPoint(double phi, double psi) : phi_(phi), psi_(psi), w_(1.0 + phi * phi + psi * psi) {}

  double phi() const { return phi_; }
  double psi() const { return psi_; }
  double w() const { return w_; }

 private:
  double phi_;
  double psi_;
  double w_;
};

/// First and second derivatives of Omega(phi, psi).
struct StereoJacobians {
  Vec3 d_phi;
  Vec3 d_psi;
  Vec3 d_phiphi;
  Vec3 d_phipsi;
  Vec3 d_psipsi;
};

/// Omega = (2 phi / W, 2 psi / W, (phi^2 + psi^2 - 1) / W).
UnitVector3 stereo_to_sphere(const StereoPoint& p);

/// Inverse of stereo_to_sphere. Throws PoleSingular within `pole_tolerance`
/// of (0, 0, 1).
StereoPoint sphere_to_stereo(const UnitVector3& omega, double pole_tolerance = kPoleTolerance);

StereoJacobians stereo_jacobians(const StereoPoint& p);

/// P_{Omega^perp} a = a - (Omega . a) Omega.
Vec3 tangential_projector(const UnitVector3& omega, const Vec3& a);

/// Same projection written in the stereographic frame,
/// (W^2/4)(Omega_phi . a) Omega_phi + (W^2/4)(Omega_psi . a) Omega_psi.
Vec3 tangential_projector_stereo(const StereoPoint& p, const Vec3& a);

}  // namespace soh
