// scenario.cpp — builtin registry, config parsing and task dispatch.
#include "pairwave/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cctype>
#include <filesystem>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pairwave/bound_states.hpp"
#include "pairwave/collective_spin.hpp"
#include "pairwave/coupling.hpp"
#include "pairwave/exact_dynamics.hpp"
#include "pairwave/master_equation.hpp"
#include "pairwave/single_cavity.hpp"

namespace pairwave::scenario {

namespace {

using nlohmann::json;

// -- json field access with named errors --------------------------------------

double jd(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw ValidationError(std::string("config field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

double jd_req(const json& j, const char* key) {
  if (!j.contains(key))
    throw ValidationError(std::string("config field '") + key + "' is required");
  return jd(j, key, 0.0);
}

int ji(const json& j, const char* key, int fallback) {
  double v = jd(j, key, fallback);
  if (v != std::floor(v))
    throw ValidationError(std::string("config field '") + key + "' must be an integer");
  return static_cast<int>(v);
}

std::string js(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string())
    throw ValidationError(std::string("config field '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

std::vector<double> jv(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw ValidationError(std::string("config field '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : j.at(key)) {
    if (!e.is_number())
      throw ValidationError(std::string("config field '") + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

LatticeParams lattice_of(const json& run) {
  const json j = run.value("lattice", json::object());
  LatticeParams lat;
  lat.omega_c = jd(j, "omega_c", lat.omega_c);
  lat.J = jd(j, "J", lat.J);
  lat.U = jd(j, "U", lat.U);
  lat.dimension = ji(j, "dimension", lat.dimension);
  lat.N_c = ji(j, "N_c", lat.N_c);
  lat.kappa = jd(j, "kappa", lat.kappa);
  lat.validate();
  return lat;
}

EmitterEnsemble ensemble_of(const json& run, const LatticeParams& lat) {
  const json j = run.value("ensemble", json::object());
  EmitterEnsemble ens;
  if (j.contains("positions")) {
    ens.positions.clear();
    for (double p : jv(j, "positions")) ens.positions.push_back(static_cast<int>(p));
    ens.N = static_cast<int>(ens.positions.size());
  }
  ens.N = ji(j, "N", ens.N);
  ens.omega_e = jd(j, "omega_e", ens.omega_e);
  ens.g = jd(j, "g", ens.g);
  ens.T1 = jd(j, "T1", ens.T1);
  ens.T2 = jd(j, "T2", ens.T2);
  ens.validate(lat);
  return ens;
}

single_cavity::CavityModel cavity_of(const json& run) {
  const json j = run.value("cavity", json::object());
  single_cavity::CavityModel md;
  md.omega_c = jd(j, "omega_c", md.omega_c);
  md.omega_e = jd(j, "omega_e", md.omega_e);
  md.U = jd(j, "U", md.U);
  md.g = jd(j, "g", md.g);
  md.kappa1 = jd(j, "kappa1", md.kappa1);
  md.kappa2 = jd(j, "kappa2", md.kappa2);
  md.n_ph_max = ji(j, "n_ph_max", md.n_ph_max);
  md.N = ji(j, "N", md.N);
  md.validate();
  return md;
}

collective_spin::Model model_of(const json& run) {
  std::string m = js(run, "model", "two-photon");
  if (m == "two-photon") return collective_spin::Model::two_photon;
  if (m == "one-photon") return collective_spin::Model::one_photon;
  throw ValidationError("config field 'model' must be 'two-photon' or 'one-photon'");
}

double interp(const std::vector<double>& t, const std::vector<double>& y, double tq) {
  if (tq <= t.front()) return y.front();
  if (tq >= t.back()) return y.back();
  auto it = std::upper_bound(t.begin(), t.end(), tq);
  std::size_t i = static_cast<std::size_t>(it - t.begin());
  double w = (tq - t[i - 1]) / (t[i] - t[i - 1]);
  return (1.0 - w) * y[i - 1] + w * y[i];
}

void lattice_comments(io::Table& tbl, const LatticeParams& lat) {
  tbl.comments.emplace_back("U_over_J", io::format_sig(lat.U));
  tbl.comments.emplace_back("kappa_over_J", io::format_sig(lat.kappa));
  tbl.comments.emplace_back("N_c", std::to_string(lat.N_c));
}

// -- tasks --------------------------------------------------------------------

io::Table task_bound_band(const json& run) {
  LatticeParams lat = lattice_of(run);
  int n_K = ji(run, "n_K", 256);
  auto band = bound_states::tabulate_band(lat, n_K);
  io::Table tbl;
  lattice_comments(tbl, lat);
  tbl.columns = {"K", "energy", "lambda", "psi0", "v_g", "rho_tilde"};
  for (std::size_t i = 0; i < band.K_grid.size(); ++i)
    tbl.rows.push_back({band.K_grid[i], band.states[i].energy, band.states[i].lambda_K,
                        band.states[i].psi0, band.group_velocity[i], band.dos[i]});
  return tbl;
}

io::Table task_binding_depth(const json& run) {
  LatticeParams lat = lattice_of(run);
  std::vector<double> U_values = jv(run, "U_values");
  std::vector<double> K_vec(static_cast<std::size_t>(lat.dimension), 0.0);
  io::Table tbl;
  tbl.comments.emplace_back("dimension", std::to_string(lat.dimension));
  tbl.columns = {"U_over_J", "binding_depth"};
  for (double U : U_values) {
    lat.U = U;
    auto depth = bound_states::binding_depth_nd(K_vec, lat);
    tbl.rows.push_back({U, depth ? *depth : std::nan("")});
  }
  return tbl;
}

io::Table task_coupling_table(const json& run) {
  LatticeParams lat = lattice_of(run);
  EmitterEnsemble ens = ensemble_of(run, lat);
  int r_max = ji(run, "r_max", 40);
  io::Table tbl;
  lattice_comments(tbl, lat);
  if (run.contains("U_values")) {
    double K = jd_req(run, "K");
    std::vector<double> U_values = jv(run, "U_values");
    tbl.comments.emplace_back("K", io::format_sig(K));
    tbl.columns = {"r"};
    for (double U : U_values) tbl.columns.push_back("f_U" + io::format_sig(U));
    for (int r = 0; r <= r_max; ++r) {
      std::vector<double> row = {double(r)};
      for (double U : U_values) {
        LatticeParams l = lat;
        l.U = U;
        row.push_back(coupling::pair_coupling_f(K, r, l, ens));
      }
      tbl.rows.push_back(row);
    }
    return tbl;
  }
  auto table = coupling::tabulate_coupling(lat, ens, r_max);
  tbl.comments.emplace_back("K0", io::format_sig(table.K0));
  tbl.comments.emplace_back("Gamma0_over_J", io::format_sig(table.Gamma0));
  tbl.columns = {"r", "f"};
  for (int r = 0; r <= r_max; ++r) tbl.rows.push_back({double(r), table.f(r)});
  return tbl;
}

io::Table task_exact_dynamics(const json& run) {
  LatticeParams lat = lattice_of(run);
  EmitterEnsemble ens = ensemble_of(run, lat);
  exact_dynamics::EvolveOptions opt;
  opt.t_final = jd_req(run, "t_final");
  opt.dt = jd(run, "dt", 0.0);
  opt.sample_dt = jd(run, "sample_dt", std::max(opt.t_final / 2000.0, 0.5));
  std::string model = js(run, "model", "momentum");
  exact_dynamics::TimeSeries ts;
  if (model == "momentum")
    ts = exact_dynamics::evolve_momentum_model(ens, lat, opt);
  else if (model == "realspace")
    ts = exact_dynamics::evolve_realspace_model(ens, lat, opt);
  else if (model == "single")
    ts = exact_dynamics::evolve_single_emitter(ens, lat, opt);
  else
    throw ValidationError("config field 'model' must be momentum, realspace or single");

  io::Table tbl;
  lattice_comments(tbl, lat);
  tbl.comments.emplace_back("g_over_J", io::format_sig(ens.g));
  tbl.comments.emplace_back("omega_e_over_J", io::format_sig(ens.omega_e));
  tbl.columns = {"t", "P_e", "norm_e", "norm_1ph", "norm_2ph"};

  std::string overlay = js(run, "overlay", "");
  double rate = 0.0;
  if (overlay == "pair") {
    rate = coupling::decay_rate_two_emitters(ens, lat);
    tbl.comments.emplace_back("overlay_rate_over_J", io::format_sig(rate));
    tbl.columns.push_back("overlay");
  } else if (overlay == "single") {
    rate = coupling::single_emitter_rate(ens, lat).Gamma1;
    tbl.comments.emplace_back("overlay_rate_over_J", io::format_sig(rate));
    tbl.columns.push_back("overlay");
  } else if (!overlay.empty()) {
    throw ValidationError("config field 'overlay' must be 'pair' or 'single'");
  }
  if (run.contains("fit_window")) {
    std::vector<double> w = jv(run, "fit_window");
    if (w.size() != 2) throw ValidationError("config field 'fit_window' must be [t_lo, t_hi]");
    auto fit = exact_dynamics::fit_decay_rate(ts, w[0], w[1]);
    tbl.comments.emplace_back("fitted_rate_over_J", io::format_sig(fit.rate));
    tbl.comments.emplace_back("fit_residual", io::format_sig(fit.residual));
  }
  for (std::size_t k = 0; k < ts.t.size(); ++k) {
    std::vector<double> row = {ts.t[k], ts.P_e[k], ts.norm_e[k], ts.norm_1ph[k], ts.norm_2ph[k]};
    if (!overlay.empty()) row.push_back(std::exp(-rate * ts.t[k]));
    tbl.rows.push_back(row);
  }
  return tbl;
}

io::Table task_master_equation(const json& run) {
  LatticeParams lat = lattice_of(run);
  EmitterEnsemble ens = ensemble_of(run, lat);
  auto gen = master_equation::build_generator(ens, lat);
  master_equation::EvolveOptions opt;
  opt.t_final = jd_req(run, "t_final");
  opt.dt = jd(run, "dt", 0.0);
  opt.n_samples = ji(run, "n_samples", 400);
  auto rho0 = master_equation::fully_excited(ens.N);
  bool channels = std::isfinite(ens.T1) || std::isfinite(ens.T2);
  auto tr = channels
                ? master_equation::evolve_with_local_channels(gen, ens.T1, ens.T2, rho0, opt)
                : master_equation::evolve_density_matrix(gen, rho0, opt);

  io::Table tbl;
  lattice_comments(tbl, lat);
  tbl.comments.emplace_back("Gamma0_over_J", io::format_sig(gen.Gamma0));
  tbl.columns = {"t", "P_e", "purity"};
  for (int s = 0; s <= ens.N; ++s) tbl.columns.push_back("sector" + std::to_string(s));

  bool semi = run.value("semianalytic", false);
  double plateau = std::nan("");
  if (semi) {
    auto trap = master_equation::semianalytic_trap(ens, lat);
    if (trap.P_e_infinity) plateau = *trap.P_e_infinity;
    tbl.comments.emplace_back("ReA_rank", std::to_string(trap.rank));
    tbl.comments.emplace_back("alpha_over_beta", io::format_sig(trap.alpha_over_beta));
    tbl.columns.push_back("P_e_infinity");
  }
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    std::vector<double> row = {tr.t[k], tr.P_e[k], tr.purity[k]};
    for (int s = 0; s <= ens.N; ++s) row.push_back(tr.sector_pop[k][s]);
    if (semi) row.push_back(plateau);
    tbl.rows.push_back(row);
  }
  return tbl;
}

io::Table task_eigenmodes(const json& run) {
  LatticeParams lat = lattice_of(run);
  EmitterEnsemble ens = ensemble_of(run, lat);
  auto gen = master_equation::build_generator(ens, lat);
  int sector = ji(run, "sector", 2);
  auto rep = master_equation::eigen_analysis(gen, sector);
  io::Table tbl;
  tbl.comments.emplace_back("sector", std::to_string(sector));
  tbl.comments.emplace_back("Gamma0_over_J", io::format_sig(gen.Gamma0));
  tbl.columns = {"mode", "re_energy", "im_energy", "rate", "dark", "subradiant"};
  for (std::size_t i = 0; i < rep.modes.size(); ++i) {
    const auto& md = rep.modes[i];
    tbl.rows.push_back({double(i), md.eigenvalue.real(), md.eigenvalue.imag(), md.rate,
                        md.dark ? 1.0 : 0.0, md.subradiant ? 1.0 : 0.0});
  }
  return tbl;
}

io::Table task_collective_chain(const json& run) {
  int N = ji(run, "N", 100);
  double Gamma = jd(run, "Gamma", 1.0);
  auto model = model_of(run);
  collective_spin::RateOptions opt;
  opt.t_final = jd(run, "t_final", 0.0);
  int n_out = ji(run, "n_samples", 400);
  auto tr = collective_spin::evolve_rate_equations(N, Gamma, model, opt);
  io::Table tbl;
  tbl.comments.emplace_back("N", std::to_string(N));
  tbl.comments.emplace_back("Gamma", io::format_sig(Gamma));
  tbl.columns = {"t", "Sz", "Sz2", "corr"};
  std::size_t last = tr.t.size() - 1;
  for (int k = 0; k <= n_out; ++k) {
    std::size_t i = static_cast<std::size_t>(std::llround(double(k) / n_out * last));
    double var = tr.Sz2[i] - tr.Sz[i] * tr.Sz[i];
    tbl.rows.push_back({tr.t[i], tr.Sz[i], tr.Sz2[i], 4.0 * var / (double(N) * N)});
  }
  return tbl;
}

io::Table task_half_decay_snapshot(const json& run) {
  int N = ji(run, "N", 100);
  double Gamma = jd(run, "Gamma", 1.0);
  auto model = model_of(run);
  auto tr = collective_spin::evolve_rate_equations(N, Gamma, model, {});
  auto snap = collective_spin::half_decay_snapshot(tr);
  io::Table tbl;
  tbl.comments.emplace_back("N", std::to_string(N));
  tbl.comments.emplace_back("T_h", io::format_sig(snap.T_h));
  tbl.columns = {"m", "p"};
  for (int i = 0; i <= N; ++i) tbl.rows.push_back({i - 0.5 * N, snap.p[i]});
  return tbl;
}

io::Table task_mean_field(const json& run) {
  int N = ji(run, "N", 1200);
  double Gamma = jd(run, "Gamma", 1.0);
  auto model = model_of(run);
  collective_spin::RateOptions ropt;
  ropt.t_final = jd(run, "t_final", 0.0);
  auto tr = collective_spin::evolve_rate_equations(N, Gamma, model, ropt);
  double t_final = tr.t.back();
  auto mf = collective_spin::mean_field_evolve(N, Gamma, model, t_final,
                                               jd(run, "epsilon", 0.0));
  int n_out = ji(run, "n_samples", 400);
  io::Table tbl;
  tbl.comments.emplace_back("N", std::to_string(N));
  tbl.comments.emplace_back("Gamma", io::format_sig(Gamma));
  tbl.columns = {"t", "Sz_rate_equations", "Sz_mean_field"};
  for (int k = 0; k <= n_out; ++k) {
    double t = t_final * k / n_out;
    tbl.rows.push_back({t, interp(tr.t, tr.Sz, t), collective_spin::series_at(mf, t)});
  }
  return tbl;
}

io::Table task_trajectories(const json& run, std::uint64_t seed) {
  int N = ji(run, "N", 100);
  double Gamma = jd(run, "Gamma", 1.0);
  auto model = model_of(run);
  int n_traj = ji(run, "n_traj", 10000);
  int n_examples = ji(run, "n_examples", 5);
  int n_out = ji(run, "n_samples", 400);
  if (run.contains("seed")) seed = static_cast<std::uint64_t>(jd_req(run, "seed"));
  auto stats = collective_spin::sample_trajectories(N, Gamma, model, n_traj, seed);
  double t_final = jd(run, "t_final", 0.0);
  if (t_final <= 0.0) t_final = 1.5 * stats.analytic_mean_total;

  const double S = 0.5 * N;
  const int step = model == collective_spin::Model::two_photon ? 2 : 1;
  io::Table tbl;
  tbl.comments.emplace_back("N", std::to_string(N));
  tbl.comments.emplace_back("n_traj", std::to_string(n_traj));
  tbl.comments.emplace_back("mean_T_e", io::format_sig(stats.mean_T_e));
  tbl.comments.emplace_back("mean_T_t", io::format_sig(stats.mean_T_t));
  tbl.comments.emplace_back("T_t_over_T_e", io::format_sig(stats.mean_T_t / stats.mean_T_e));
  tbl.columns = {"t", "mean_2Sz_over_N", "corr"};
  for (int e = 0; e < n_examples; ++e) tbl.columns.push_back("example" + std::to_string(e + 1));

  for (int k = 0; k <= n_out; ++k) {
    double t = t_final * k / n_out;
    double sum = 0.0, sum2 = 0.0;
    for (const auto& tr : stats.trajectories) {
      auto it = std::upper_bound(tr.event_t.begin(), tr.event_t.end(), t);
      double m = S - step * double(it - tr.event_t.begin());
      sum += m;
      sum2 += m * m;
    }
    double mean = sum / n_traj, var = sum2 / n_traj - mean * mean;
    std::vector<double> row = {t, mean / S, 4.0 * var / (double(N) * N)};
    for (int e = 0; e < n_examples && e < n_traj; ++e) {
      const auto& tr = stats.trajectories[static_cast<std::size_t>(e)];
      auto it = std::upper_bound(tr.event_t.begin(), tr.event_t.end(), t);
      row.push_back((S - step * double(it - tr.event_t.begin())) / S);
    }
    tbl.rows.push_back(row);
  }
  return tbl;
}

io::Table task_correlation_sweep(const json& run) {
  double Gamma = jd(run, "Gamma", 1.0);
  auto model = model_of(run);
  io::Table tbl;
  tbl.comments.emplace_back("Gamma", io::format_sig(Gamma));
  tbl.columns = {"N", "C"};
  for (double Nv : jv(run, "N_values")) {
    int N = static_cast<int>(Nv);
    tbl.rows.push_back({double(N), collective_spin::correlation_parameter(N, Gamma, model)});
  }
  return tbl;
}

io::Table task_single_cavity(const json& run) {
  auto md = cavity_of(run);
  single_cavity::EvolveOptions opt;
  opt.t_final = jd_req(run, "t_final");
  opt.n_samples = ji(run, "n_samples", 300);
  opt.check_cutoff = run.value("check_cutoff", false);
  auto full = single_cavity::evolve_full_cavity(md, opt);
  auto eff = single_cavity::evolve_effective_cavity(md, opt);
  auto rep = single_cavity::validity_bound(md, md.N);
  io::Table tbl;
  tbl.comments.emplace_back("N", std::to_string(md.N));
  tbl.comments.emplace_back("Gamma_eff", io::format_sig(rep.Gamma));
  tbl.comments.emplace_back("validity_ratio", io::format_sig(rep.ratio));
  tbl.columns = {"t", "Sz_full", "Sz_effective"};
  for (int n = 0; n <= md.n_ph_max; ++n) tbl.columns.push_back("p_n" + std::to_string(n));
  for (std::size_t k = 0; k < full.t.size(); ++k) {
    std::vector<double> row = {full.t[k], full.Sz[k], eff.Sz[k]};
    for (int n = 0; n <= md.n_ph_max; ++n) row.push_back(full.fock_pop(Eigen::Index(k), n));
    tbl.rows.push_back(row);
  }
  return tbl;
}

io::Table task_validity_sweep(const json& run) {
  auto md = cavity_of(run);
  io::Table tbl;
  tbl.columns = {"N", "Gamma_eff", "ratio", "pass"};
  for (double Nv : jv(run, "N_values")) {
    int N = static_cast<int>(Nv);
    auto rep = single_cavity::validity_bound(md, N);
    tbl.rows.push_back({double(N), rep.Gamma, rep.ratio, rep.pass ? 1.0 : 0.0});
  }
  return tbl;
}

io::Table run_task(const json& run, std::uint64_t seed) {
  std::string task = js(run, "task", "");
  if (task == "bound-band") return task_bound_band(run);
  if (task == "binding-depth") return task_binding_depth(run);
  if (task == "coupling-table") return task_coupling_table(run);
  if (task == "exact-dynamics") return task_exact_dynamics(run);
  if (task == "master-equation") return task_master_equation(run);
  if (task == "eigenmodes") return task_eigenmodes(run);
  if (task == "collective-chain") return task_collective_chain(run);
  if (task == "half-decay-snapshot") return task_half_decay_snapshot(run);
  if (task == "mean-field") return task_mean_field(run);
  if (task == "trajectories") return task_trajectories(run, seed);
  if (task == "correlation-sweep") return task_correlation_sweep(run);
  if (task == "single-cavity") return task_single_cavity(run);
  if (task == "validity-sweep") return task_validity_sweep(run);
  throw ValidationError("config field 'task' has unknown value '" + task + "'");
}

// -- builtin registry ---------------------------------------------------------

// N_c and kappa are sized per run so the emitted pair is absorbed before it
// wraps around the ring and re-excites the emitters (revival at N_c / v_g).
json waveguide_run(const std::string& label, double U, double omega_e, double g,
                   std::vector<int> positions, double t_final, const char* overlay,
                   int N_c = 601, double kappa = 3e-4) {
  json ens = {{"omega_e", omega_e}, {"g", g}, {"positions", positions}};
  json run = {{"task", "exact-dynamics"},
              {"label", label},
              {"model", positions.size() == 1 ? "single" : "momentum"},
              {"lattice", {{"U", U}, {"N_c", N_c}, {"kappa", kappa}}},
              {"ensemble", ens},
              {"t_final", t_final},
              {"dt", 0.1},
              {"overlay", overlay}};
  return run;
}

json me_run(const std::string& label, std::vector<int> positions, double t_final, bool semi) {
  return {{"task", "master-equation"},
          {"label", label},
          {"lattice", {{"U", 1.0}, {"N_c", 601}}},
          {"ensemble", {{"omega_e", -2.04}, {"g", 0.02}, {"positions", positions}}},
          {"t_final", t_final},
          {"semianalytic", semi}};
}

struct BuiltinDef {
  BuiltinInfo info;
  json runs;
};

std::vector<BuiltinDef> make_builtins() {
  std::vector<BuiltinDef> defs;

  defs.push_back({{"fig1c", "pair vs single emitter decay below the band, three parameter sets",
                   "~7 min"},
                  json::array({
                      waveguide_run("U1_g0.02_r0_N2", 1.0, -2.04, 0.02, {300, 300}, 6000, "pair"),
                      waveguide_run("U1_g0.02_r5_N2", 1.0, -2.04, 0.02, {298, 303}, 6000, "pair"),
                      waveguide_run("U4_g0.1_r0_N2", 4.0, -2.45, 0.1, {600, 600}, 4000, "pair",
                                    1201, 1e-3),
                      waveguide_run("U1_g0.02_N1", 1.0, -2.04, 0.02, {300}, 6000, "single"),
                      waveguide_run("U4_g0.1_N1", 4.0, -2.45, 0.1, {600}, 4000, "single", 1201,
                                    1e-3),
                  })});

  defs.push_back({{"fig2b", "pair coupling f_{K=0}(r) for U/J in {0.5, 1, 2, 4}", "seconds"},
                  json::array({{{"task", "coupling-table"},
                                {"label", "f_K0"},
                                {"K", 0.0},
                                {"U_values", {0.5, 1.0, 2.0, 4.0}},
                                {"r_max", 40},
                                {"lattice", {{"U", 1.0}}},
                                {"ensemble",
                                 {{"omega_e", -2.04}, {"g", 0.02}, {"positions", {300, 300}}}}}})});

  defs.push_back({{"fig3a", "N = 4 subradiant trapping for equal spacings, with the semi-analytic plateau",
                   "~1 min"},
                  json::array({
                      me_run("x1", {300, 301, 302, 303}, 2e5, true),
                      me_run("x2", {300, 302, 304, 306}, 2e5, true),
                  })});

  defs.push_back({{"fig4a", "collective-spin <S_z>(t): two-photon cascade vs superradiance, N = 100",
                   "seconds"},
                  json::array({
                      {{"task", "collective-chain"}, {"label", "two_photon"}, {"N", 100},
                       {"Gamma", 1.0}, {"model", "two-photon"}},
                      {{"task", "collective-chain"}, {"label", "one_photon"}, {"N", 100},
                       {"Gamma", 1.0}, {"model", "one-photon"}},
                  })});

  defs.push_back({{"fig4b", "population snapshots p_m at the half-decay time, N = 100", "seconds"},
                  json::array({
                      {{"task", "half-decay-snapshot"}, {"label", "two_photon"}, {"N", 100},
                       {"Gamma", 1.0}, {"model", "two-photon"}},
                      {{"task", "half-decay-snapshot"}, {"label", "one_photon"}, {"N", 100},
                       {"Gamma", 1.0}, {"model", "one-photon"}},
                  })});

  defs.push_back({{"fig4c", "stochastic trajectories of the two-photon cascade, N = 100", "~1 min"},
                  json::array({{{"task", "trajectories"}, {"label", "two_photon"}, {"N", 100},
                                {"Gamma", 1.0}, {"model", "two-photon"}, {"n_traj", 10000}}})});

  defs.push_back({{"fig4d", "stochastic trajectories of regular superradiance, N = 100", "~1 min"},
                  json::array({{{"task", "trajectories"}, {"label", "one_photon"}, {"N", 100},
                                {"Gamma", 1.0}, {"model", "one-photon"}, {"n_traj", 10000}}})});

  defs.push_back({{"sm-bound", "bound-pair band structure and d > 1 binding depths", "~1 min"},
                  json::array({
                      {{"task", "bound-band"}, {"label", "band_U1"}, {"lattice", {{"U", 1.0}}}},
                      {{"task", "bound-band"}, {"label", "band_U4"}, {"lattice", {{"U", 4.0}}}},
                      {{"task", "binding-depth"}, {"label", "depth_2d"},
                       {"lattice", {{"U", 1.0}, {"dimension", 2}, {"N_c", 41}}},
                       {"U_values", {0.2, 0.3, 0.5, 0.8, 1.0, 1.5, 2.0}}},
                      {{"task", "binding-depth"}, {"label", "depth_3d"},
                       {"lattice", {{"U", 8.0}, {"dimension", 3}, {"N_c", 21}}},
                       {"U_values", {5.0, 6.0, 7.0, 7.5, 8.0, 9.0, 10.0}}},
                  })});

  defs.push_back({{"sm-dynamics", "pair decay vs the rate formula at increasing coupling",
                   "~7 min"},
                  json::array({
                      waveguide_run("U1_g0.02", 1.0, -2.04, 0.02, {300, 300}, 6000, "pair"),
                      waveguide_run("U1_g0.035", 1.0, -2.04, 0.035, {300, 300}, 3000, "pair"),
                      waveguide_run("U1_g0.05", 1.0, -2.04, 0.05, {300, 300}, 1500, "pair"),
                      waveguide_run("U4_g0.05", 4.0, -2.45, 0.05, {600, 600}, 5000, "pair", 1201,
                                    1e-3),
                      waveguide_run("U4_g0.1", 4.0, -2.45, 0.1, {600, 600}, 4000, "pair", 1201,
                                    1e-3),
                      waveguide_run("U4_g0.2", 4.0, -2.45, 0.2, {600, 600}, 400, "pair", 1201,
                                    1e-3),
                  })});

  json scat_common = {{"U", 1.0}, {"N_c", 601}, {"kappa", 3e-4}};
  defs.push_back({{"sm-scattering", "real-space (with scattering states) vs momentum model",
                   "~3 min"},
                  json::array({
                      {{"task", "exact-dynamics"}, {"label", "realspace"}, {"model", "realspace"},
                       {"lattice", scat_common},
                       {"ensemble", {{"omega_e", -2.04}, {"g", 0.035}, {"positions", {300, 300}}}},
                       {"t_final", 600.0}},
                      {{"task", "exact-dynamics"}, {"label", "momentum"}, {"model", "momentum"},
                       {"lattice", scat_common},
                       {"ensemble", {{"omega_e", -2.04}, {"g", 0.035}, {"positions", {300, 300}}}},
                       {"t_final", 600.0}, {"overlay", "pair"}},
                  })});

  defs.push_back({{"sm-subradiance", "N = 4 unequal spacing: slow plateau decay and H_eff modes",
                   "~1 min"},
                  json::array({
                      me_run("unequal", {300, 301, 304, 311}, 2e6, false),
                      {{"task", "eigenmodes"}, {"label", "modes_x1"}, {"sector", 2},
                       {"lattice", {{"U", 1.0}, {"N_c", 601}}},
                       {"ensemble",
                        {{"omega_e", -2.04}, {"g", 0.02}, {"positions", {300, 301, 302, 303}}}}},
                  })});

  defs.push_back({{"sm-meanfield", "mean field vs rate equations for both decay models, N = 1200",
                   "~2 min"},
                  json::array({
                      {{"task", "mean-field"}, {"label", "two_photon"}, {"N", 1200},
                       {"Gamma", 1.0}, {"model", "two-photon"}},
                      {{"task", "mean-field"}, {"label", "one_photon"}, {"N", 1200},
                       {"Gamma", 1.0}, {"model", "one-photon"}},
                  })});

  json t1t2_ens = {{"omega_e", -2.04}, {"g", 0.035}, {"positions", {300, 300}}};
  json t1t2_runA = {{"task", "master-equation"}, {"label", "T1_20000_T2_10000"},
                    {"lattice", {{"U", 1.0}, {"N_c", 601}}},
                    {"ensemble", {{"omega_e", -2.04}, {"g", 0.035}, {"positions", {300, 300}},
                                  {"T1", 20000.0}, {"T2", 10000.0}}},
                    {"t_final", 10000.0}};
  json t1t2_runB = {{"task", "master-equation"}, {"label", "T1_10000_T2_5000"},
                    {"lattice", {{"U", 1.0}, {"N_c", 601}}},
                    {"ensemble", {{"omega_e", -2.04}, {"g", 0.035}, {"positions", {300, 300}},
                                  {"T1", 10000.0}, {"T2", 5000.0}}},
                    {"t_final", 10000.0}};
  defs.push_back({{"sm-t1t2", "two-emitter decay with and without local T1/T2 channels", "~1 min"},
                  json::array({
                      {{"task", "master-equation"}, {"label", "bare"},
                       {"lattice", {{"U", 1.0}, {"N_c", 601}}},
                       {"ensemble", t1t2_ens}, {"t_final", 10000.0}},
                      t1t2_runA,
                      t1t2_runB,
                  })});

  defs.push_back({{"sm-cavity", "single nonlinear cavity: full vs effective decay and the validity sweep",
                   "~2 min"},
                  json::array({
                      {{"task", "single-cavity"}, {"label", "benchmark"}, {"t_final", 1500.0},
                       {"n_samples", 300}, {"check_cutoff", true}, {"cavity", json::object()}},
                      {{"task", "validity-sweep"}, {"label", "validity"}, {"cavity", json::object()},
                       {"N_values", {10, 20, 30, 40, 50, 75, 100, 150, 200}}},
                  })});

  return defs;
}

const std::vector<BuiltinDef>& builtin_defs() {
  static const std::vector<BuiltinDef> defs = make_builtins();
  return defs;
}

std::string safe_label(const json& run) {
  std::string label = js(run, "label", "");
  if (label.empty()) throw ValidationError("config field 'label' is required for every run");
  for (char c : label)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.')
      throw ValidationError("config field 'label' must be filename-safe: '" + label + "'");
  return label;
}

void validate_spec(const json& spec) {
  if (!spec.contains("runs") || !spec.at("runs").is_array() || spec.at("runs").empty())
    throw ValidationError("config must contain a non-empty 'runs' array (or a top-level 'task')");
  std::vector<std::string> labels;
  for (const auto& run : spec.at("runs")) {
    if (!run.is_object()) throw ValidationError("every entry of 'runs' must be an object");
    labels.push_back(safe_label(run));
    js(run, "task", "");  // type check
  }
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
    throw ValidationError("run labels must be unique within a scenario");
}

}  // namespace

const std::vector<BuiltinInfo>& builtins() {
  static const std::vector<BuiltinInfo> infos = [] {
    std::vector<BuiltinInfo> out;
    for (const auto& def : builtin_defs()) out.push_back(def.info);
    return out;
  }();
  return infos;
}

Scenario from_builtin(const std::string& name) {
  for (const auto& def : builtin_defs())
    if (def.info.name == name) {
      Scenario sc;
      sc.name = name;
      sc.spec = {{"name", name}, {"runs", def.runs}};
      return sc;
    }
  throw ValidationError("unknown builtin scenario '" + name + "'");
}

Scenario from_config(const std::string& path) {
  std::string bytes = io::read_file(path);
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ValidationError("config '" + path + "' must be a JSON object");
  Scenario sc;
  sc.name = js(j, "name", std::filesystem::path(path).stem().string());
  sc.seed = static_cast<std::uint64_t>(jd(j, "seed", 1.0));
  sc.workers = ji(j, "workers", 1);
  json runs;
  if (j.contains("runs")) {
    runs = j.at("runs");
  } else if (j.contains("task")) {
    json run = j;
    run.erase("name");
    run.erase("seed");
    run.erase("workers");
    if (!run.contains("label")) run["label"] = sc.name;
    runs = json::array({run});
  }
  sc.spec = {{"name", sc.name}, {"runs", runs}};
  validate_spec(sc.spec);
  return sc;
}

std::string scenario_hash(const Scenario& sc) {
  return io::hex64(io::fnv1a64(sc.spec.dump() + ":" + std::to_string(sc.seed)));
}

io::RunManifest run_scenario(const Scenario& sc, const std::string& out_dir) {
  validate_spec(sc.spec);
  if (sc.workers < 1) throw ValidationError("workers must be >= 1");
#ifdef _OPENMP
  omp_set_num_threads(sc.workers);
#endif
  const std::string hash = scenario_hash(sc);
  const auto t0 = std::chrono::steady_clock::now();

  // compute everything before touching the file system: a failing run must not
  // leave partial outputs behind
  std::vector<std::pair<std::string, std::string>> artifacts;
  for (const auto& run : sc.spec.at("runs")) {
    io::Table tbl = run_task(run, sc.seed);
    std::vector<std::pair<std::string, std::string>> head = {
        {"scenario", sc.name},
        {"scenario_hash", hash},
        {"version", io::tool_version},
        {"task", js(run, "task", "")},
        {"units", "energies in J, time in 1/J"},
    };
    tbl.comments.insert(tbl.comments.begin(), head.begin(), head.end());
    artifacts.emplace_back(safe_label(run) + ".csv", io::render_csv(tbl));
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw io::IoError("cannot create output directory '" + out_dir + "': " + ec.message());

  io::RunManifest manifest;
  manifest.scenario = sc.name;
  manifest.scenario_hash = hash;
  for (const auto& [file, bytes] : artifacts) {
    io::write_file(out_dir + "/" + file, bytes);
    manifest.outputs.push_back({file, io::hex64(io::fnv1a64(bytes))});
  }
  manifest.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  io::write_file(out_dir + "/manifest.json", io::render_manifest(manifest));
  return manifest;
}

}  // namespace pairwave::scenario
