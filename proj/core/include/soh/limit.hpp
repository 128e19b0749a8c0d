#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "soh/errors.hpp"
#include "soh/kinetic.hpp"
#include "soh/macro.hpp"
#include "soh/vmf.hpp"

namespace soh::limit {

struct LimitConfig {
  std::vector<double> epsilons{0.2, 0.1, 0.05};
  double t_end = 0.5;
  double sample_interval = 0.05;
  int dim = 2;
  int grid_n = 32;
  double box_length = 6.283185307179586;
  int sphere_degree = 12;
  int reference_n = 64;
  double reference_dt = 1e-3;
  double kinetic_dt = 0.0;  // 0: largest step dividing the sample interval below 0.8 x the stable step
  double cfl_safety = 0.9;
  double current_floor = 1e-8;
  int sobolev_index = 2;
  double eta0 = 1.0;

  /// Throws RangeError.
  void validate() const;
};

/// rho0 M_{Omega0} (+ sqrt(eps) perturbation) and v0. The perturbation must
/// carry no mass and no current at any point (ConstraintViolation otherwise).
/// Throws PoleGaugeExceeded.
kinetic::KineticState prepare_well_prepared_data(const kinetic::KineticModel& model, const macro::MacroState& initial,
                                                 double epsilon,
                                                 const std::optional<kinetic::Distribution>& perturbation = {});

struct Remainder {
  kinetic::Distribution f_r;
  VectorField v_r;
  double phi0_defect = 0.0;  // max over x of |int f_R| + |int w f_R|
};

/// f_R = (f - rho0 M_{Omega0}) / sqrt(eps), v_R = (v - v0) / sqrt(eps).
/// Throws TimeMismatch when the times differ by more than `time_tolerance`.
Remainder extract_remainder(const kinetic::KineticModel& model, const kinetic::KineticState& state,
                            const macro::MacroState& reference, double time_tolerance);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_stderr = 0.0;  // 0 with two points
  int points = 0;
};

/// Least squares of log y against log x. Throws FitFailed.
SlopeFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y);

struct EpsilonRun {
  double epsilon = 0.0;
  bool ok = false;
  std::string error;
  int exit_status = 0;
  double dt = 0.0;
  std::string init_hash;  // SHA-256 of the initial f (same across the sweep)
  std::vector<double> t;
  std::vector<double> err_rho;
  std::vector<double> err_j;
  std::vector<double> norm_vr;
  std::vector<double> norm_fr;
  std::vector<double> energy;
  std::vector<double> phi0_defect;

  double sup(const std::vector<double>& series) const;
};

struct ConvergenceStudy {
  LimitConfig config;
  std::vector<EpsilonRun> runs;
  std::optional<SlopeFit> fit_rho;
  std::optional<SlopeFit> fit_j;
  double energy_spread = 0.0;     // max / min over finished runs of sup_t E
  double remainder_spread = 0.0;  // same for sup_t (||v_R|| + ||f_R||)
};

/// Reference macro trajectory sampled every `sample_interval`, resampled onto
/// the kinetic grid.
std::vector<macro::MacroState> reference_trajectory(const LimitConfig& config, const macro::MacroState& initial_fine,
                                                    const vmf::CoefficientSet& cs);

using RunObserver = std::function<void(const EpsilonRun&, const kinetic::KineticState&)>;

/// `initial_fine` lives on the reference grid. Per-epsilon failures are
/// recorded in the run and the study continues.
ConvergenceStudy run_convergence_study(const LimitConfig& config, const macro::MacroState& initial_fine,
                                       const vmf::CoefficientSet& cs, const RunObserver& observer = {});

/// Macro state on the kinetic grid by spectral resampling.
macro::MacroState resample_state(const TorusGrid& to, const TorusGrid& from, const macro::MacroState& state);

}  // namespace soh::limit
