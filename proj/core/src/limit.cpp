#include "soh/limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "soh/diagnostics.hpp"
#include "soh/io.hpp"

namespace soh::limit {
namespace {

// Number of whole steps of `step` that tile `span`; throws RangeError otherwise.
long tiles(double span, double step, const char* what) {
  const double q = span / step;
  const long n = std::lround(q);
  if (n < 1 || std::abs(q - static_cast<double>(n)) > 1e-9 * std::max(1.0, q)) {
    throw Error(ErrorCode::RangeError, std::string(what) + " must be a whole multiple of its step");
  }
  return n;
}

Field exp_field(const Field& f) {
  Field out(f.size());
  std::transform(f.begin(), f.end(), out.begin(), [](double x) { return std::exp(x); });
  return out;
}

}  // namespace

void LimitConfig::validate() const {
  if (epsilons.size() < 3) throw Error(ErrorCode::RangeError, "limit.epsilons needs at least 3 entries");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw Error(ErrorCode::RangeError, "limit.epsilons entries must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw Error(ErrorCode::RangeError, "limit.epsilons must be strictly decreasing");
    }
  }
  if (!(t_end > 0.0)) throw Error(ErrorCode::RangeError, "limit.t_end must be positive");
  if (!(sample_interval > 0.0)) throw Error(ErrorCode::RangeError, "limit.sample_interval must be positive");
  tiles(t_end, sample_interval, "limit.t_end");
  tiles(sample_interval, reference_dt, "limit.sample_interval");
  if (dim < 1 || dim > 3) throw Error(ErrorCode::RangeError, "grid.dim must be 1, 2 or 3");
  if (grid_n < 8 || reference_n < grid_n) throw Error(ErrorCode::RangeError, "limit.reference_n must be >= grid.n >= 8");
  if (sphere_degree < 2) throw Error(ErrorCode::RangeError, "sphere.L must be >= 2");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw Error(ErrorCode::RangeError, "time.cfl_safety must be in (0, 1]");
  if (kinetic_dt < 0.0) throw Error(ErrorCode::RangeError, "limit.kinetic_dt must be >= 0");
  if (sobolev_index < 0) throw Error(ErrorCode::RangeError, "diagnostics.s must be >= 0");
  if (!(eta0 > 0.0)) throw Error(ErrorCode::RangeError, "diagnostics.eta0 must be positive");
}

macro::MacroState resample_state(const TorusGrid& to, const TorusGrid& from, const macro::MacroState& state) {
  macro::MacroState out;
  out.t = state.t;
  out.rho_hat = to.resample(from, state.rho_hat);
  out.phi = to.resample(from, state.phi);
  out.psi = to.resample(from, state.psi);
  for (int d = 0; d < 3; ++d) out.v[d] = to.resample(from, state.v[d]);
  return out;
}

kinetic::KineticState prepare_well_prepared_data(const kinetic::KineticModel& model, const macro::MacroState& initial,
                                                 double epsilon,
                                                 const std::optional<kinetic::Distribution>& perturbation) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::RangeError, "epsilon must be positive");
  macro::check_pole_gauge(initial);
  kinetic::KineticState s;
  s.f = model.equilibrium(exp_field(initial.rho_hat), macro::orientation(initial));
  s.v = initial.v;
  s.epsilon = epsilon;
  s.t = initial.t;
  if (perturbation) {
    const auto& p = *perturbation;
    if (p.rows() != s.f.rows() || p.cols() != s.f.cols()) {
      throw Error(ErrorCode::DegreeMismatch, "perturbation shape does not match the kinetic model");
    }
    const auto m = model.moments(p, 0.0);
    const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
    for (std::size_t i = 0; i < m.rho.size(); ++i) {
      const double defect = std::abs(m.rho[i]) + std::hypot(m.j[0][i], m.j[1][i], m.j[2][i]);
      if (defect > 1e-10 * scale) {
        throw Error(ErrorCode::ConstraintViolation,
                    "perturbation carries mass or current at grid point " + std::to_string(i));
      }
    }
    s.f += std::sqrt(epsilon) * p;
  }
  return s;
}

Remainder extract_remainder(const kinetic::KineticModel& model, const kinetic::KineticState& state,
                            const macro::MacroState& reference, double time_tolerance) {
  if (std::abs(state.t - reference.t) > time_tolerance) {
    throw Error(ErrorCode::TimeMismatch, "kinetic t = " + std::to_string(state.t) + " vs macro t = " +
                                             std::to_string(reference.t));
  }
  const double root = std::sqrt(state.epsilon);
  Remainder r;
  r.f_r = (state.f - model.equilibrium(exp_field(reference.rho_hat), macro::orientation(reference))) / root;
  for (int d = 0; d < 3; ++d) {
    r.v_r[d].resize(state.v[d].size());
    for (std::size_t i = 0; i < state.v[d].size(); ++i) r.v_r[d][i] = (state.v[d][i] - reference.v[d][i]) / root;
  }
  const auto m = model.moments(r.f_r, 0.0);
  for (std::size_t i = 0; i < m.rho.size(); ++i) {
    r.phi0_defect = std::max(r.phi0_defect, std::abs(m.rho[i]) + std::hypot(m.j[0][i], m.j[1][i], m.j[2][i]));
  }
  return r;
}

SlopeFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::FitFailed, "need at least two (x, y) pairs");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(ErrorCode::FitFailed, "log-log fit needs positive finite values");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::FitFailed, "x values coincide");
  SlopeFit fit;
  fit.points = static_cast<int>(n);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    sse += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  if (n > 2) fit.slope_stderr = std::sqrt(sse / (n - 2) / sxx);
  return fit;
}

double EpsilonRun::sup(const std::vector<double>& series) const {
  double s = 0.0;
  for (double v : series) s = std::max(s, v);
  return s;
}

std::vector<macro::MacroState> reference_trajectory(const LimitConfig& config, const macro::MacroState& initial_fine,
                                                    const vmf::CoefficientSet& cs) {
  const TorusGrid fine(config.dim, config.reference_n, config.box_length);
  const TorusGrid coarse(config.dim, config.grid_n, config.box_length);
  macro::SolverConfig sc;
  sc.dt = config.reference_dt;
  sc.t_end = config.t_end;
  sc.cfl_safety = config.cfl_safety;
  sc.output_every = static_cast<int>(tiles(config.sample_interval, config.reference_dt, "limit.sample_interval"));
  std::vector<macro::MacroState> out;
  macro::run_macro(fine, initial_fine, cs, sc,
                   [&](const macro::MacroState& s) { out.push_back(resample_state(coarse, fine, s)); });
  return out;
}

ConvergenceStudy run_convergence_study(const LimitConfig& config, const macro::MacroState& initial_fine,
                                       const vmf::CoefficientSet& cs, const RunObserver& observer) {
  config.validate();
  ConvergenceStudy study;
  study.config = config;
  const auto reference = reference_trajectory(config, initial_fine, cs);
  const TorusGrid grid(config.dim, config.grid_n, config.box_length);
  const kinetic::KineticModel model(grid, config.sphere_degree, cs);
  const long samples = tiles(config.t_end, config.sample_interval, "limit.t_end");
  if (reference.size() != static_cast<std::size_t>(samples + 1)) {
    throw Error(ErrorCode::TimeMismatch, "reference trajectory has the wrong number of samples");
  }

  for (double eps : config.epsilons) {
    EpsilonRun run;
    run.epsilon = eps;
    try {
      const auto initial = prepare_well_prepared_data(model, reference.front(), eps);
      run.init_hash = io::sha256_doubles(std::span<const double>(initial.f.data(), initial.f.size()));
      kinetic::KineticConfig kc;
      kc.t_end = config.t_end;
      kc.cfl_safety = config.cfl_safety;
      kc.current_floor = config.current_floor;
      const double target = config.kinetic_dt > 0.0 ? config.kinetic_dt : 0.8 * model.stable_dt(initial, kc);
      const long per_sample = std::max(1L, static_cast<long>(std::ceil(config.sample_interval / target - 1e-9)));
      kc.dt = config.sample_interval / per_sample;
      kc.output_every = static_cast<int>(per_sample);
      run.dt = kc.dt;

      model.run(initial, kc, [&](const kinetic::KineticState& s) {
        const auto idx = static_cast<std::size_t>(std::lround(s.t / config.sample_interval));
        const auto& ref = reference.at(idx);
        const auto rem = extract_remainder(model, s, ref, 0.5 * kc.dt);
        const auto m = model.moments(s.f, 0.0);
        const Field rho0 = exp_field(ref.rho_hat);
        const auto om0 = macro::orientation(ref);
        Field dr(rho0.size());
        std::array<Field, 3> dj;
        for (auto& c : dj) c.resize(rho0.size());
        for (std::size_t i = 0; i < rho0.size(); ++i) {
          dr[i] = m.rho[i] - rho0[i];
          for (int d = 0; d < 3; ++d) dj[d][i] = m.j[d][i] - cs.c1 * rho0[i] * om0[d][i];
        }
        const auto e = diagnostics::energy_functionals_kinetic(model, rem.v_r, rem.f_r, om0, eps,
                                                               config.sobolev_index, config.eta0);
        run.t.push_back(s.t);
        run.err_rho.push_back(grid.l2_norm(dr));
        run.err_j.push_back(std::sqrt(std::pow(grid.l2_norm(dj[0]), 2) + std::pow(grid.l2_norm(dj[1]), 2) +
                                      std::pow(grid.l2_norm(dj[2]), 2)));
        run.norm_vr.push_back(std::sqrt(e.velocity));
        run.norm_fr.push_back(std::sqrt(std::max(0.0, e.energy - e.velocity)));
        run.energy.push_back(e.energy);
        run.phi0_defect.push_back(rem.phi0_defect);
        if (observer) observer(run, s);
      });
      run.ok = true;
    } catch (const Error& e) {
      run.ok = false;
      run.error = e.what();
      run.exit_status = exit_status_for(e.code());
    }
    study.runs.push_back(std::move(run));
  }

  std::vector<double> eps_ok, rho_ok, j_ok;
  double e_min = std::numeric_limits<double>::infinity(), e_max = 0.0;
  double r_min = std::numeric_limits<double>::infinity(), r_max = 0.0;
  for (const auto& r : study.runs) {
    if (!r.ok) continue;
    eps_ok.push_back(r.epsilon);
    rho_ok.push_back(r.sup(r.err_rho));
    j_ok.push_back(r.sup(r.err_j));
    const double se = r.sup(r.energy);
    double sr = 0.0;
    for (std::size_t i = 0; i < r.t.size(); ++i) sr = std::max(sr, r.norm_vr[i] + r.norm_fr[i]);
    e_min = std::min(e_min, se);
    e_max = std::max(e_max, se);
    r_min = std::min(r_min, sr);
    r_max = std::max(r_max, sr);
  }
  if (eps_ok.size() >= 2) {
    try {
      study.fit_rho = fit_log_log(eps_ok, rho_ok);
      study.fit_j = fit_log_log(eps_ok, j_ok);
    } catch (const Error&) {
      study.fit_rho.reset();
      study.fit_j.reset();
    }
    study.energy_spread = e_min > 0.0 ? e_max / e_min : std::numeric_limits<double>::infinity();
    study.remainder_spread = r_min > 0.0 ? r_max / r_min : std::numeric_limits<double>::infinity();
  }
  return study;
}

}  // namespace soh::limit
