#include "soh/geometry.hpp"

#include <cmath>

#include "soh/errors.hpp"

namespace soh {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::SolveFailed: return "SolveFailed";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::NonIntegrableKernel: return "NonIntegrableKernel";
    case ErrorCode::EigensolveFailed: return "EigensolveFailed";
    case ErrorCode::KappaOutOfRange: return "KappaOutOfRange";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::FitFailed: return "FitFailed";
    case ErrorCode::PoleSingular: return "PoleSingular";
    case ErrorCode::PoleGaugeExceeded: return "PoleGaugeExceeded";
    case ErrorCode::DegenerateCurrent: return "DegenerateCurrent";
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::TimeMismatch: return "TimeMismatch";
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

int exit_status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::UnknownKey:
    case ErrorCode::RangeError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::Io:
    case ErrorCode::SchemaMismatch:
      return 2;
    case ErrorCode::PoleSingular:
    case ErrorCode::PoleGaugeExceeded:
    case ErrorCode::DegenerateCurrent:
    case ErrorCode::NegativeMass:
    case ErrorCode::TimeMismatch:
    case ErrorCode::ConstraintViolation:
    case ErrorCode::InvariantViolation:
      return 4;
    default:
      return 3;
  }
}

UnitVector3::UnitVector3(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::InvalidArgument, "cannot normalize a zero or non-finite vector");
  }
  v_ = v / n;
}

UnitVector3 stereo_to_sphere(const StereoPoint& p) {
  const double w = p.w();
  return UnitVector3(Vec3(2.0 * p.phi() / w, 2.0 * p.psi() / w,
                          (p.phi() * p.phi() + p.psi() * p.psi() - 1.0) / w));
}

StereoPoint sphere_to_stereo(const UnitVector3& omega, double pole_tolerance) {
  const double gap = 1.0 - omega.z();
  if (std::abs(gap) < pole_tolerance) {
    throw Error(ErrorCode::PoleSingular, "direction lies at the projection pole (0,0,1)");
  }
  return StereoPoint(omega.x() / gap, omega.y() / gap);
}

StereoJacobians stereo_jacobians(const StereoPoint& p) {
  const double f = p.phi();
  const double s = p.psi();
  const double w = p.w();
  const double w2 = w * w;
  const double w3 = w2 * w;
  const double f2 = f * f;
  const double s2 = s * s;

  StereoJacobians j;
  j.d_phi = Vec3(2.0 * (1.0 - f2 + s2), -4.0 * f * s, 4.0 * f) / w2;
  j.d_psi = Vec3(-4.0 * f * s, 2.0 * (1.0 + f2 - s2), 4.0 * s) / w2;
  j.d_phiphi = 4.0 / w3 * Vec3(f * (f2 - 3.0 * s2 - 3.0), s * (3.0 * f2 - s2 - 1.0), -(3.0 * f2 - s2 - 1.0));
  j.d_phipsi = 4.0 / w3 * Vec3(s * (3.0 * f2 - s2 - 1.0), -f * (f2 - 3.0 * s2 + 1.0), -4.0 * f * s);
  j.d_psipsi = 4.0 / w3 * Vec3(-f * (f2 - 3.0 * s2 + 1.0), -s * (3.0 * f2 - s2 + 3.0), f2 - 3.0 * s2 + 1.0);
  return j;
}

Vec3 tangential_projector(const UnitVector3& omega, const Vec3& a) {
  return a - omega.dot(a) * omega.vec();
}

Vec3 tangential_projector_stereo(const StereoPoint& p, const Vec3& a) {
  const auto j = stereo_jacobians(p);
  const double q = 0.25 * p.w() * p.w();
  return q * j.d_phi.dot(a) * j.d_phi + q * j.d_psi.dot(a) * j.d_psi;
}

}  // namespace soh
