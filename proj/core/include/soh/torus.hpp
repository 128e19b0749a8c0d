#pragma once

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace soh {

using Field = std::vector<double>;
using ComplexField = std::vector<std::complex<double>>;

/// Three-component field; components beyond the grid dimension still exist
/// (vectors stay 3D when the fields depend on fewer coordinates).
struct VectorField {
  std::array<Field, 3> c;

  Field& operator[](int i) { return c[i]; }
  const Field& operator[](int i) const { return c[i]; }
};

/// Periodic box [0, length)^d sampled with n points per axis, row-major with
/// the last axis fastest. Spectra use the real-to-complex half layout.
class TorusGrid {
 public:
  TorusGrid(int dim, int n, double length = 6.283185307179586);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / n_; }
  double volume() const;
  double cell_volume() const;
  std::size_t point_count() const { return points_; }
  std::size_t spectral_count() const { return modes_; }

  /// Coordinate `axis` of grid point `idx`.
  double coordinate(std::size_t idx, int axis) const;

  ComplexField forward(std::span<const double> field) const;
  /// Normalized inverse (inverse(forward(u)) == u).
  Field inverse(const ComplexField& spec) const;

  /// Physical wavenumber component along `axis` of spectral slot `idx`.
  /// Nyquist entries are zero so odd derivatives stay real.
  double wavenumber(std::size_t idx, int axis) const { return k_[axis][idx]; }
  /// |k|^2 including Nyquist entries.
  double wavenumber_sq(std::size_t idx) const { return k2_[idx]; }
  /// Multiplicity of a half-spectrum slot in Parseval sums: 1 on the k_last = 0
  /// and Nyquist planes, 2 elsewhere (the conjugate partner is implicit).
  double mode_weight(std::size_t idx) const { return weight_[idx]; }
  /// Two-thirds rule mask.
  bool keep(std::size_t idx) const { return keep_[idx] != 0; }

  Field derivative(std::span<const double> field, int axis) const;
  /// Derivative / Laplacian of a field given by its spectrum.
  Field derivative_of(const ComplexField& spec, int axis) const;
  Field laplacian_of(const ComplexField& spec) const;
  /// Gradient with three components; components for axes >= dim are zero.
  std::array<Field, 3> gradient(std::span<const double> field) const;
  Field laplacian(std::span<const double> field) const;
  /// Zero every mode outside the two-thirds box.
  Field dealias(std::span<const double> field) const;
  void dealias_spectrum(ComplexField& spec) const;

  /// Fourier projection onto divergence-free fields, k = 0 untouched.
  VectorField leray_project(const VectorField& u) const;
  /// Two-thirds truncation followed by the Leray projection.
  VectorField leray_project_dealiased(const VectorField& u) const;
  Field divergence(const VectorField& u) const;
  /// L2 norm of the spectral divergence.
  double divergence_norm(const VectorField& u) const;

  /// Squared H^s norm: sum of (1 + |k|^2)^s |u_k|^2, scaled so s = 0 gives the L2 norm squared.
  double sobolev_norm_sq(std::span<const double> field, int s) const;

  double integrate(std::span<const double> field) const;
  double l2_norm(std::span<const double> field) const;

  /// Spectral resampling of a field given on `from` onto this grid
  /// (truncation or zero padding; dimensions and box must agree).
  Field resample(const TorusGrid& from, std::span<const double> field) const;

 private:
  struct Plans;

  VectorField project(const VectorField& u, bool truncate) const;

  int dim_;
  int n_;
  double length_;
  std::size_t points_;
  std::size_t modes_;
  std::array<std::vector<double>, 3> k_;
  std::vector<double> k2_;
  std::vector<double> weight_;
  std::vector<unsigned char> keep_;
  std::vector<std::array<int, 3>> index_;  // signed integer wavenumbers per slot
  std::shared_ptr<Plans> plans_;
};

}  // namespace soh
