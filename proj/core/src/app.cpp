#include "soh/app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <limits>

#include "soh/diagnostics.hpp"
#include "soh/kinetic.hpp"
#include "soh/limit.hpp"
#include "soh/macro.hpp"

#ifndef SOH_VERSION_STRING
#define SOH_VERSION_STRING "0.0.0"
#endif

namespace soh::app {
namespace {

using io::Json;

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string stem(const char* prefix, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06zu", prefix, index);
  return buf;
}

// Output directory bookkeeping: every completed file lands in the index.
class Run {
 public:
  Run(const RunRequest& req, const vmf::CoefficientSet* cs) : out_(req.out) {
    manifest_.subcommand = req.subcommand;
    manifest_.config = req.config.to_json();
    if (cs) manifest_.coefficients = coefficients_json(*cs);
    manifest_.version = version();
    manifest_.inputs = req.inputs;
    manifest_.created = utc_now();
    fs::create_directories(out_);
    flush();
  }

  void text(const std::string& name, const std::string& content) {
    io::write_atomic(out_ / name, content);
    manifest_.outputs[name] = io::sha256_hex(content);
  }
  void json(const std::string& name, const Json& j) { text(name, j.dump(2) + "\n"); }
  void csv(const std::string& name, const io::Table& t) { text(name, io::to_csv(t)); }
  void snapshot(const std::string& sub, const std::string& name, const io::Snapshot& s) {
    const auto [j, b] = io::write_snapshot(out_ / sub, name, s);
    manifest_.outputs[(fs::path(sub) / j.filename()).generic_string()] = io::sha256_file(j);
    manifest_.outputs[(fs::path(sub) / b.filename()).generic_string()] = io::sha256_file(b);
  }
  Json& extra() { return manifest_.extra; }
  void finish() {
    json("schema.json", io::schema_document());
    flush();
  }

 private:
  void flush() { io::write_atomic(out_ / "manifest.json", io::serialize(manifest_)); }

  fs::path out_;
  io::Manifest manifest_;
};

vmf::CoefficientSet coefficients_for(const config::Config& cfg) {
  return vmf::assemble_coefficients(config::model_params(cfg), static_cast<int>(cfg.integer("sphere.gci_degree")));
}

int run_coeffs(const RunRequest& req) {
  const auto cs = coefficients_for(req.config);
  Run run(req, &cs);
  const int degree = static_cast<int>(req.config.integer("sphere.gci_degree"));
  const auto gci = vmf::solve_gci(cs.kappa, degree);
  const auto half = vmf::assemble_coefficients(cs.params, std::max(8, degree / 2));
  io::Table t{{"kappa", "c1", "c2", "c3", "c4", "k0", "gamma", "lambda0", "lambda_tilde"},
              {{cs.kappa, cs.c1, cs.c2, cs.c3, cs.c4, cs.k0, cs.gamma, cs.lambda0, cs.lambda_tilde}}};
  run.csv("coefficients.csv", t);
  Json cert;
  cert["kappa"] = cs.kappa;
  cert["galerkin_degree"] = gci.galerkin_degree;
  cert["residual_norm"] = gci.residual_norm;
  cert["max_scaled_residual"] = gci.max_scaled_residual;
  cert["tolerance"] = vmf::kGciTolerance;
  cert["sign"] = gci.sign;
  cert["c2_refinement_gap"] = std::abs(cs.c2 - half.c2);
  cert["c3_refinement_gap"] = std::abs(cs.c3 - half.c3);
  cert["poincare_constant"] = vmf::estimate_poincare_constant(
      cs.kappa, UnitVector3(Vec3(0.0, 0.0, 1.0)), static_cast<int>(req.config.integer("sphere.L")));
  cert["certified"] = gci.residual_norm < vmf::kGciTolerance;
  run.json("certificate.json", cert);
  run.finish();
  return 0;
}

int run_macro_cmd(const RunRequest& req) {
  const auto& cfg = req.config;
  const auto cs = coefficients_for(cfg);
  Run run(req, &cs);
  const auto grid = config::torus_grid(cfg);
  const auto initial = initial_macro_state(cfg, grid);
  const auto sc = config::solver_config(cfg);
  const int s = static_cast<int>(cfg.integer("diagnostics.s"));
  const bool snaps = cfg.boolean("output.snapshots");
  io::Table series{{"t", "mass", "E", "D", "div_norm", "max_W"}, {}};
  std::size_t index = 0;
  const auto final_state = macro::run_macro(grid, initial, cs, sc, [&](const macro::MacroState& st) {
    const auto e = diagnostics::energy_functionals_macro(grid, st, cs, s);
    series.rows.push_back({st.t, macro::mass(grid, st), e.energy, e.dissipation, grid.divergence_norm(st.v),
                           macro::max_w(st)});
    if (snaps) run.snapshot("snapshots", stem("snap", index), macro_snapshot(grid, st));
    ++index;
  });
  run.csv("series.csv", series);
  run.extra()["final_t"] = final_state.t;
  run.extra()["samples"] = index;
  run.finish();
  return 0;
}

io::Snapshot kinetic_snapshot(const kinetic::KineticModel& model, const kinetic::KineticState& st) {
  const auto& grid = model.grid();
  const auto m = model.moments(st.f, 0.0);
  io::Snapshot snap;
  snap.t = st.t;
  snap.shape = io::grid_shape(grid);
  snap.box_length = grid.length();
  snap.names = {"rho", "j1", "j2", "j3", "omega1", "omega2", "omega3", "v1", "v2", "v3"};
  snap.fields["rho"] = m.rho;
  for (int d = 0; d < 3; ++d) {
    snap.fields["j" + std::to_string(d + 1)] = m.j[d];
    snap.fields["omega" + std::to_string(d + 1)] = m.omega_f[d];
    snap.fields["v" + std::to_string(d + 1)] = st.v[d];
  }
  snap.extra["epsilon"] = st.epsilon;
  snap.extra["sphere_degree"] = model.degree();
  return snap;
}

// Full distribution, (points..., coefficients) row-major.
io::Snapshot distribution_snapshot(const kinetic::KineticModel& model, const kinetic::KineticState& st) {
  io::Snapshot snap;
  snap.t = st.t;
  snap.shape = io::grid_shape(model.grid());
  snap.shape.push_back(static_cast<std::size_t>(model.coeff_count()));
  snap.box_length = model.grid().length();
  snap.names = {"f"};
  const Eigen::MatrixXd rowmajor = st.f.transpose();
  snap.fields["f"] = Field(rowmajor.data(), rowmajor.data() + rowmajor.size());
  snap.extra["epsilon"] = st.epsilon;
  snap.extra["sphere_degree"] = model.degree();
  snap.extra["layout"] = "real spherical harmonics, slot l*l + l + m";
  return snap;
}

kinetic::Distribution distribution_from_snapshot(const io::Snapshot& snap, const kinetic::KineticModel& model) {
  const auto np = static_cast<Eigen::Index>(model.grid().point_count());
  const auto& f = snap.fields.at("f");
  if (static_cast<Eigen::Index>(f.size()) != np * model.coeff_count()) {
    throw Error(ErrorCode::SchemaMismatch, "distribution snapshot does not match the kinetic model");
  }
  Eigen::Map<const Eigen::MatrixXd> cm(f.data(), model.coeff_count(), np);
  return cm.transpose();
}

std::vector<double> kinetic_row(const kinetic::KineticModel& model, const kinetic::KineticState& st,
                                const vmf::CoefficientSet& cs, double floor) {
  const auto& grid = model.grid();
  double kin = 0.0;
  for (int d = 0; d < 3; ++d) kin += std::pow(grid.l2_norm(st.v[d]), 2);
  const auto dis = model.collision_dissipation(st.f, floor);
  const double total = -grid.integrate(dis);
  const double worst = *std::max_element(dis.begin(), dis.end());
  return {st.t, model.total_mass(st.f), cs.params.reynolds * kin, total, worst, grid.divergence_norm(st.v)};
}

int run_kinetic_cmd(const RunRequest& req) {
  const auto& cfg = req.config;
  const auto cs = coefficients_for(cfg);
  Run run(req, &cs);
  const auto grid = config::torus_grid(cfg);
  const kinetic::KineticModel model(grid, static_cast<int>(cfg.integer("sphere.L")), cs);
  macro::MacroState macro0;
  const auto& wp = cfg.text("init.well_prepared");
  if (!wp.empty()) {
    macro0 = macro_state_from_snapshot(io::read_snapshot(wp), grid);
  } else {
    macro0 = initial_macro_state(cfg, grid);
  }
  const auto initial = limit::prepare_well_prepared_data(model, macro0, cfg.real("kinetic.epsilon"));
  run.extra()["init_hash"] = io::sha256_doubles(std::span<const double>(initial.f.data(), initial.f.size()));
  const auto kc = config::kinetic_config(cfg);
  const bool snaps = cfg.boolean("output.snapshots");
  io::Table series{{"t", "mass", "kinetic_energy", "dissipation", "max_local_dissipation", "div_norm"}, {}};
  std::size_t index = 0;
  const auto final_state = model.run(initial, kc, [&](const kinetic::KineticState& st) {
    series.rows.push_back(kinetic_row(model, st, cs, kc.current_floor));
    if (snaps) {
      run.snapshot("snapshots", stem("snap", index), kinetic_snapshot(model, st));
      run.snapshot("snapshots", stem("dist", index), distribution_snapshot(model, st));
    }
    ++index;
  });
  run.csv("kinetic_series.csv", series);
  run.extra()["final_t"] = final_state.t;
  run.extra()["samples"] = index;
  run.finish();
  return 0;
}

int run_limit_cmd(const RunRequest& req) {
  const auto& cfg = req.config;
  const auto cs = coefficients_for(cfg);
  Run run(req, &cs);
  const auto lc = config::limit_config(cfg);
  const TorusGrid fine(lc.dim, lc.reference_n, lc.box_length);
  const auto initial = initial_macro_state(cfg, fine);
  const TorusGrid coarse(lc.dim, lc.grid_n, lc.box_length);
  const kinetic::KineticModel model(coarse, lc.sphere_degree, cs);
  const auto study = limit::run_convergence_study(lc, initial, cs, [&](const limit::EpsilonRun& r,
                                                                       const kinetic::KineticState& st) {
    if (std::abs(st.t - lc.t_end) < 0.5 * r.dt) {
      run.snapshot("eps_" + io::format_double(r.epsilon), "final", kinetic_snapshot(model, st));
    }
  });

  io::Table table{{"eps", "sup_norm_vR", "sup_norm_fR", "err_rho", "err_j", "sup_energy", "phi0_defect", "ok"}, {}};
  Json failed = Json::array();
  Json hashes = Json::object();
  for (const auto& r : study.runs) {
    const std::string dir = "eps_" + io::format_double(r.epsilon);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (r.ok) {
      table.rows.push_back({r.epsilon, r.sup(r.norm_vr), r.sup(r.norm_fr), r.sup(r.err_rho), r.sup(r.err_j),
                            r.sup(r.energy), r.sup(r.phi0_defect), 1.0});
    } else {
      table.rows.push_back({r.epsilon, nan, nan, nan, nan, nan, nan, 0.0});
      failed.push_back({{"eps", r.epsilon}, {"error", r.error}, {"exit_status", r.exit_status}});
    }
    hashes[dir] = r.init_hash;
    io::Table rem{{"t", "err_rho", "err_j", "norm_vR", "norm_fR", "energy", "phi0_defect"}, {}};
    for (std::size_t i = 0; i < r.t.size(); ++i) {
      rem.rows.push_back({r.t[i], r.err_rho[i], r.err_j[i], r.norm_vr[i], r.norm_fr[i], r.energy[i], r.phi0_defect[i]});
    }
    run.csv(dir + "/remainder.csv", rem);
    Json meta = {{"eps", r.epsilon}, {"dt", r.dt}, {"ok", r.ok}, {"init_hash", r.init_hash}, {"error", r.error}};
    run.json(dir + "/run.json", meta);
  }
  run.csv("study.csv", table);
  Json fit;
  auto put = [](const std::optional<limit::SlopeFit>& f) {
    if (!f) return Json(nullptr);
    return Json{{"slope", f->slope}, {"intercept", f->intercept}, {"r2", f->r2}, {"slope_stderr", f->slope_stderr},
                {"points", f->points}};
  };
  fit["quantity"] = "sup_t ||rho^eps - rho_0||_L2 against eps";
  const auto rho = put(study.fit_rho);
  fit["slope"] = rho.is_null() ? Json(nullptr) : rho["slope"];
  fit["intercept"] = rho.is_null() ? Json(nullptr) : rho["intercept"];
  fit["r2"] = rho.is_null() ? Json(nullptr) : rho["r2"];
  fit["rho"] = rho;
  fit["j"] = put(study.fit_j);
  fit["energy_spread"] = study.energy_spread;
  fit["remainder_spread"] = study.remainder_spread;
  fit["failed"] = failed;
  run.json("fit.json", fit);
  run.extra()["init_hashes"] = hashes;
  run.finish();
  return study.fit_rho ? 0 : exit_status_for(ErrorCode::FitFailed);
}

int run_check_cmd(const RunRequest& req) {
  const fs::path dir = req.run_dir;
  const auto manifest = io::manifest_from_json(Json::parse(io::read_text(dir / "manifest.json")));
  config::Config cfg = config::Config::defaults();
  // flatten the stored tree back into dotted keys
  std::function<void(const Json&, const std::string&)> walk = [&](const Json& node, const std::string& prefix) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
      if (it->is_object()) {
        walk(*it, key);
      } else if (it->is_boolean()) {
        cfg.set(key, it->get<bool>());
      } else if (it->is_number_integer()) {
        cfg.set(key, it->get<long>());
      } else if (it->is_number()) {
        cfg.set(key, it->get<double>());
      } else if (it->is_string()) {
        cfg.set(key, it->get<std::string>());
      } else if (it->is_array()) {
        cfg.set(key, it->get<std::vector<double>>());
      }
    }
  };
  walk(manifest.config, "");
  cfg.validate();
  const auto cs = coefficients_for(cfg);
  RunRequest self = req;
  self.config = cfg;
  self.inputs["manifest.json"] = io::sha256_file(dir / "manifest.json");
  Run run(self, &cs);
  const auto grid = config::torus_grid(cfg);
  const int s = static_cast<int>(cfg.integer("diagnostics.s"));

  std::vector<fs::path> snaps;
  if (fs::exists(dir / "snapshots")) {
    for (const auto& e : fs::directory_iterator(dir / "snapshots")) {
      const auto name = e.path().filename().string();
      if (name.rfind("snap_", 0) == 0 && e.path().extension() == ".json") snaps.push_back(e.path());
    }
  }
  std::sort(snaps.begin(), snaps.end());
  if (snaps.empty()) throw Error(ErrorCode::SchemaMismatch, dir.string() + " has no snapshots to check");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  io::Table table{{"t", "E", "D", "mass", "divergence", "scalar_defect", "vector_defect", "envelope"}, {}};
  Json checks;
  bool pass = true;
  std::vector<double> ts, es, ds;
  double mass0 = 0.0, mass_drift = 0.0, div_max = 0.0;

  if (manifest.subcommand == "macro") {
    std::vector<macro::MacroState> states;
    for (const auto& p : snaps) states.push_back(macro_state_from_snapshot(io::read_snapshot(p), grid));
    const auto gci = vmf::solve_gci(cs.kappa, static_cast<int>(cfg.integer("sphere.gci_degree")));
    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto e = diagnostics::energy_functionals_macro(grid, states[i], cs, s);
      const double m = macro::mass(grid, states[i]);
      if (i == 0) mass0 = m;
      mass_drift = std::max(mass_drift, std::abs(m - mass0) / std::abs(mass0));
      const double div = grid.divergence_norm(states[i].v);
      div_max = std::max(div_max, div);
      double sd = nan, vd = nan;
      if (i > 0 && i + 1 < states.size()) {
        try {
          const auto d = diagnostics::gci_projections_h0(grid, std::span(states).subspan(i - 1, 3), cs, gci);
          sd = d.scalar_norm;
          vd = d.vector_norm;
        } catch (const Error& err) {
          if (err.code() != ErrorCode::TimeMismatch) throw;
        }
      }
      ts.push_back(states[i].t);
      es.push_back(e.energy);
      ds.push_back(e.dissipation);
      table.rows.push_back({states[i].t, e.energy, e.dissipation, m, div, sd, vd, nan});
    }
  } else if (manifest.subcommand == "kinetic") {
    const kinetic::KineticModel model(grid, static_cast<int>(cfg.integer("sphere.L")), cs);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& p : snaps) {
      const auto snap = io::read_snapshot(p);
      auto dist_path = p;
      dist_path.replace_filename("dist" + p.filename().string().substr(4));
      kinetic::KineticState st;
      st.t = snap.t;
      st.f = distribution_from_snapshot(io::read_snapshot(dist_path), model);
      for (int d = 0; d < 3; ++d) st.v[d] = snap.fields.at("v" + std::to_string(d + 1));
      const double m = model.total_mass(st.f);
      if (ts.empty()) mass0 = m;
      mass_drift = std::max(mass_drift, std::abs(m - mass0) / std::abs(mass0));
      const double div = grid.divergence_norm(st.v);
      div_max = std::max(div_max, div);
      const auto dis = model.collision_dissipation(st.f, cfg.real("kinetic.current_floor"));
      worst = std::max(worst, *std::max_element(dis.begin(), dis.end()));
      double e = 0.0;
      for (int d = 0; d < 3; ++d) e += cs.params.reynolds * grid.sobolev_norm_sq(st.v[d], s);
      ts.push_back(st.t);
      es.push_back(e);
      ds.push_back(-grid.integrate(dis));
      table.rows.push_back({st.t, e, ds.back(), m, div, nan, nan, nan});
    }
    checks["dissipation_sign"] = {{"max", worst}, {"tolerance", 1e-12}, {"pass", worst <= 1e-12}};
    pass = pass && worst <= 1e-12;
  } else {
    throw Error(ErrorCode::SchemaMismatch, "check supports macro and kinetic runs, not " + manifest.subcommand);
  }
  checks["mass_drift"] = {{"value", mass_drift}, {"tolerance", 1e-9}, {"pass", mass_drift < 1e-9}};
  checks["divergence"] = {{"max", div_max}, {"tolerance", 1e-10}, {"pass", div_max < 1e-10}};
  pass = pass && mass_drift < 1e-9 && div_max < 1e-10;
  if (manifest.subcommand == "macro") {
    try {
      const auto env = diagnostics::gronwall_envelope(ts, es, ds, s);
      for (std::size_t i = 0; i < table.rows.size(); ++i) table.rows[i][7] = env.bound[i];
      checks["envelope"] = {{"constant", env.constant}, {"margin", env.margin}, {"pass", env.pass}};
      pass = pass && env.pass;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::FitFailed) throw;
      checks["envelope"] = {{"evaluated", false}, {"reason", e.what()}};
    }
  }
  run.csv("diagnostics.csv", table);
  run.json("check.json", {{"run", manifest.subcommand}, {"checks", checks}, {"pass", pass}});
  run.finish();
  return pass ? 0 : exit_status_for(ErrorCode::InvariantViolation);
}

}  // namespace

const char* version() { return SOH_VERSION_STRING; }

io::Json coefficients_json(const vmf::CoefficientSet& cs) {
  return {{"kappa", cs.kappa},   {"c1", cs.c1},         {"c2", cs.c2},
          {"c3", cs.c3},         {"c4", cs.c4},         {"k0", cs.k0},
          {"gamma", cs.gamma},   {"lambda0", cs.lambda0}, {"lambda_tilde", cs.lambda_tilde}};
}

macro::MacroState initial_macro_state(const config::Config& cfg, const TorusGrid& grid) {
  const auto& file = cfg.text("init.file");
  if (!file.empty()) return macro_state_from_snapshot(io::read_snapshot(file), grid);
  if (cfg.text("init.preset") == "uniform") {
    return macro::uniform_state(grid, cfg.real("init.rho"), cfg.real("init.phi"), cfg.real("init.psi"));
  }
  return macro::benchmark_state(grid);
}

io::Snapshot macro_snapshot(const TorusGrid& grid, const macro::MacroState& s) {
  io::Snapshot snap;
  snap.t = s.t;
  snap.shape = io::grid_shape(grid);
  snap.box_length = grid.length();
  snap.names = {"rho_hat", "phi", "psi", "v1", "v2", "v3", "rho", "omega1", "omega2", "omega3"};
  snap.fields["rho_hat"] = s.rho_hat;
  snap.fields["phi"] = s.phi;
  snap.fields["psi"] = s.psi;
  Field rho(s.rho_hat.size());
  std::transform(s.rho_hat.begin(), s.rho_hat.end(), rho.begin(), [](double x) { return std::exp(x); });
  snap.fields["rho"] = rho;
  const auto om = macro::orientation(s);
  for (int d = 0; d < 3; ++d) {
    snap.fields["v" + std::to_string(d + 1)] = s.v[d];
    snap.fields["omega" + std::to_string(d + 1)] = om[d];
  }
  return snap;
}

macro::MacroState macro_state_from_snapshot(const io::Snapshot& snap, const TorusGrid& grid) {
  for (const char* name : {"rho_hat", "phi", "psi", "v1", "v2", "v3"}) {
    if (!snap.fields.count(name)) throw Error(ErrorCode::SchemaMismatch, std::string("snapshot lacks field ") + name);
  }
  if (snap.shape.empty() || static_cast<int>(snap.shape.size()) != grid.dim()) {
    throw Error(ErrorCode::SchemaMismatch, "snapshot dimension does not match grid.dim");
  }
  for (auto n : snap.shape) {
    if (n != snap.shape[0]) throw Error(ErrorCode::SchemaMismatch, "snapshot grid is not square");
  }
  if (std::abs(snap.box_length - grid.length()) > 1e-12 * grid.length()) {
    throw Error(ErrorCode::SchemaMismatch, "snapshot box length does not match grid.length");
  }
  const TorusGrid from(grid.dim(), static_cast<int>(snap.shape[0]), snap.box_length);
  macro::MacroState s;
  s.t = snap.t;
  s.rho_hat = grid.resample(from, snap.fields.at("rho_hat"));
  s.phi = grid.resample(from, snap.fields.at("phi"));
  s.psi = grid.resample(from, snap.fields.at("psi"));
  for (int d = 0; d < 3; ++d) s.v[d] = grid.resample(from, snap.fields.at("v" + std::to_string(d + 1)));
  return s;
}

int dispatch(const RunRequest& request) {
  const auto known = std::find(std::begin(kSubcommands), std::end(kSubcommands), request.subcommand);
  try {
    if (known == std::end(kSubcommands)) {
      throw Error(ErrorCode::InvalidArgument, "unknown subcommand '" + request.subcommand + "'");
    }
    if (request.out.empty()) throw Error(ErrorCode::InvalidArgument, "--out is required");
    if (request.subcommand == "coeffs") return run_coeffs(request);
    if (request.subcommand == "macro") return run_macro_cmd(request);
    if (request.subcommand == "kinetic") return run_kinetic_cmd(request);
    if (request.subcommand == "limit") return run_limit_cmd(request);
    return run_check_cmd(request);
  } catch (const Error& e) {
    std::cerr << "soh " << request.subcommand << ": " << e.what() << "\n";
    try {
      if (!request.out.empty()) io::write_atomic(request.out / "error.json", io::error_json(e).dump(2) + "\n");
    } catch (const Error&) {
    }
    return exit_status_for(e.code());
  } catch (const io::Json::exception& e) {
    const Error wrapped(ErrorCode::SchemaMismatch, e.what());
    std::cerr << "soh " << request.subcommand << ": " << wrapped.what() << "\n";
    if (!request.out.empty()) io::write_atomic(request.out / "error.json", io::error_json(wrapped).dump(2) + "\n");
    return exit_status_for(wrapped.code());
  } catch (const fs::filesystem_error& e) {
    const Error wrapped(ErrorCode::Io, e.what());
    std::cerr << "soh " << request.subcommand << ": " << wrapped.what() << "\n";
    return exit_status_for(wrapped.code());
  }
}

}  // namespace soh::app
