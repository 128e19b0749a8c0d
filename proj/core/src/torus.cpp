#include "soh/torus.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>

#include "soh/errors.hpp"

namespace soh {

struct TorusGrid::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  ~Plans() {
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

TorusGrid::TorusGrid(int dim, int n, double length) : dim_(dim), n_(n), length_(length) {
  if (dim < 1 || dim > 3) throw Error(ErrorCode::RangeError, "grid.dim must be 1, 2 or 3");
  if (n < 8 || (n & (n - 1)) != 0) throw Error(ErrorCode::RangeError, "grid.n must be a power of two >= 8");
  if (!(length > 0.0)) throw Error(ErrorCode::RangeError, "box length must be positive");

  const int half = n / 2 + 1;
  points_ = 1;
  for (int d = 0; d < dim; ++d) points_ *= static_cast<std::size_t>(n);
  modes_ = points_ / static_cast<std::size_t>(n) * half;

  for (auto& k : k_) k.assign(modes_, 0.0);
  k2_.assign(modes_, 0.0);
  weight_.assign(modes_, 0.0);
  keep_.assign(modes_, 0);
  index_.assign(modes_, {0, 0, 0});

  const double scale = 2.0 * std::numbers::pi / length_;
  for (std::size_t idx = 0; idx < modes_; ++idx) {
    std::size_t rem = idx;
    std::array<int, 3> ii{0, 0, 0};
    ii[dim - 1] = static_cast<int>(rem % half);
    rem /= half;
    for (int d = dim - 2; d >= 0; --d) {
      ii[d] = static_cast<int>(rem % n);
      rem /= n;
    }
    bool keep = true;
    double k2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      const int signed_k = (d == dim - 1) ? ii[d] : (ii[d] <= n / 2 ? ii[d] : ii[d] - n);
      index_[idx][d] = signed_k;
      const bool nyquist = std::abs(signed_k) == n / 2;
      const double kk = signed_k * scale;
      k_[d][idx] = nyquist ? 0.0 : kk;
      k2 += kk * kk;
      if (3 * std::abs(signed_k) >= n) keep = false;
    }
    k2_[idx] = k2;
    keep_[idx] = keep ? 1 : 0;
    const int last = ii[dim - 1];
    weight_[idx] = (last == 0 || last == n / 2) ? 1.0 : 2.0;
  }

  plans_ = std::make_shared<Plans>();
  std::vector<int> dims(dim, n);
  double* in = fftw_alloc_real(points_);
  fftw_complex* out = fftw_alloc_complex(modes_);
  plans_->r2c = fftw_plan_dft_r2c(dim, dims.data(), in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans_->c2r = fftw_plan_dft_c2r(dim, dims.data(), out, in, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(in);
  fftw_free(out);
}

double TorusGrid::volume() const { return std::pow(length_, dim_); }
double TorusGrid::cell_volume() const { return volume() / static_cast<double>(points_); }

double TorusGrid::coordinate(std::size_t idx, int axis) const {
  if (axis >= dim_) return 0.0;
  std::size_t rem = idx;
  for (int d = dim_ - 1; d > axis; --d) rem /= n_;
  return static_cast<double>(rem % n_) * spacing();
}

ComplexField TorusGrid::forward(std::span<const double> field) const {
  if (field.size() != points_) throw Error(ErrorCode::InvalidArgument, "field size does not match torus grid");
  ComplexField out(modes_);
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(field.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

Field TorusGrid::inverse(const ComplexField& spec) const {
  if (spec.size() != modes_) throw Error(ErrorCode::InvalidArgument, "spectrum size does not match torus grid");
  ComplexField work = spec;  // c2r destroys its input
  Field out(points_);
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(work.data()), out.data());
  const double norm = 1.0 / static_cast<double>(points_);
  for (double& v : out) v *= norm;
  return out;
}

Field TorusGrid::derivative(std::span<const double> field, int axis) const {
  if (axis >= dim_) return Field(points_, 0.0);
  auto s = forward(field);
  for (std::size_t i = 0; i < modes_; ++i) s[i] *= std::complex<double>(0.0, k_[axis][i]);
  return inverse(s);
}

Field TorusGrid::derivative_of(const ComplexField& spec, int axis) const {
  if (axis >= dim_) return Field(points_, 0.0);
  ComplexField t(modes_);
  for (std::size_t i = 0; i < modes_; ++i) t[i] = spec[i] * std::complex<double>(0.0, k_[axis][i]);
  return inverse(t);
}

Field TorusGrid::laplacian_of(const ComplexField& spec) const {
  ComplexField t(modes_);
  for (std::size_t i = 0; i < modes_; ++i) t[i] = -k2_[i] * spec[i];
  return inverse(t);
}

std::array<Field, 3> TorusGrid::gradient(std::span<const double> field) const {
  std::array<Field, 3> g;
  const auto s = forward(field);
  for (int d = 0; d < 3; ++d) {
    if (d >= dim_) {
      g[d].assign(points_, 0.0);
      continue;
    }
    ComplexField t(modes_);
    for (std::size_t i = 0; i < modes_; ++i) t[i] = s[i] * std::complex<double>(0.0, k_[d][i]);
    g[d] = inverse(t);
  }
  return g;
}

Field TorusGrid::laplacian(std::span<const double> field) const {
  auto s = forward(field);
  for (std::size_t i = 0; i < modes_; ++i) s[i] *= -k2_[i];
  return inverse(s);
}

void TorusGrid::dealias_spectrum(ComplexField& spec) const {
  for (std::size_t i = 0; i < modes_; ++i) {
    if (!keep_[i]) spec[i] = 0.0;
  }
}

Field TorusGrid::dealias(std::span<const double> field) const {
  auto s = forward(field);
  dealias_spectrum(s);
  return inverse(s);
}

VectorField TorusGrid::leray_project(const VectorField& u) const { return project(u, false); }

VectorField TorusGrid::leray_project_dealiased(const VectorField& u) const { return project(u, true); }

VectorField TorusGrid::project(const VectorField& u, bool truncate) const {
  std::array<ComplexField, 3> s;
  for (int d = 0; d < 3; ++d) {
    s[d] = forward(u[d]);
    if (truncate) dealias_spectrum(s[d]);
  }
  for (std::size_t i = 0; i < modes_; ++i) {
    double kk = 0.0;
    for (int d = 0; d < dim_; ++d) kk += k_[d][i] * k_[d][i];
    if (kk == 0.0) continue;
    std::complex<double> kdotu = 0.0;
    for (int d = 0; d < dim_; ++d) kdotu += k_[d][i] * s[d][i];
    for (int d = 0; d < dim_; ++d) s[d][i] -= k_[d][i] * kdotu / kk;
  }
  VectorField out;
  for (int d = 0; d < 3; ++d) out[d] = inverse(s[d]);
  return out;
}

Field TorusGrid::divergence(const VectorField& u) const {
  ComplexField acc(modes_, 0.0);
  for (int d = 0; d < dim_; ++d) {
    const auto s = forward(u[d]);
    for (std::size_t i = 0; i < modes_; ++i) acc[i] += std::complex<double>(0.0, k_[d][i]) * s[i];
  }
  return inverse(acc);
}

double TorusGrid::divergence_norm(const VectorField& u) const { return l2_norm(divergence(u)); }

double TorusGrid::sobolev_norm_sq(std::span<const double> field, int s) const {
  if (s < 0) throw Error(ErrorCode::InvalidArgument, "Sobolev index must be >= 0");
  const auto spec = forward(field);
  double acc = 0.0;
  for (std::size_t i = 0; i < modes_; ++i) acc += weight_[i] * std::pow(1.0 + k2_[i], s) * std::norm(spec[i]);
  const double np = static_cast<double>(points_);
  return acc * volume() / (np * np);
}

double TorusGrid::integrate(std::span<const double> field) const {
  double s = 0.0;
  for (double v : field) s += v;
  return s * cell_volume();
}

double TorusGrid::l2_norm(std::span<const double> field) const {
  double s = 0.0;
  for (double v : field) s += v * v;
  return std::sqrt(s * cell_volume());
}

Field TorusGrid::resample(const TorusGrid& from, std::span<const double> field) const {
  if (from.dim_ != dim_ || from.length_ != length_) {
    throw Error(ErrorCode::InvalidArgument, "resample needs matching dimension and box length");
  }
  if (from.n_ == n_) return Field(field.begin(), field.end());
  const auto src = from.forward(field);
  ComplexField dst(modes_, 0.0);
  const int nf = from.n_;
  const int half_from = nf / 2 + 1;
  const double scale = static_cast<double>(points_) / static_cast<double>(from.points_);
  for (std::size_t idx = 0; idx < modes_; ++idx) {
    bool ok = true;
    std::size_t flat = 0;
    for (int d = 0; d < dim_; ++d) {
      const int k = index_[idx][d];
      // Nyquist slots are ambiguous on either grid; drop them.
      if (2 * std::abs(k) >= nf || 2 * std::abs(k) >= n_) {
        ok = false;
        break;
      }
      const int slot = (d == dim_ - 1) ? k : (k >= 0 ? k : nf + k);
      flat = flat * static_cast<std::size_t>(d == dim_ - 1 ? half_from : nf) + static_cast<std::size_t>(slot);
    }
    if (ok) dst[idx] = src[flat] * scale;
  }
  return inverse(dst);
}

}  // namespace soh
