// collective_spin.cpp — death-chain rate equations, mean-field ODE, jump
// trajectories and the correlation parameter for the same-site limit.
#include "pairwave/collective_spin.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pairwave::collective_spin {

namespace {

int chain_step(Model model) { return model == Model::two_photon ? 2 : 1; }

double rate_of(Model model, double m, int N, double Gamma) {
  return model == Model::two_photon ? two_photon_rate(m, N, Gamma)
                                    : one_photon_rate(m, N, Gamma);
}

// index of the absorbing state (i = m + S)
int terminal_index(int N, Model model) {
  return (model == Model::two_photon && N % 2 == 1) ? 1 : 0;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Eigen::VectorXd chain_rates(int N, double Gamma, Model model) {
  double S = 0.5 * N;
  Eigen::VectorXd r(N + 1);
  for (int i = 0; i <= N; ++i) r[i] = rate_of(model, i - S, N, Gamma);
  return r;
}

// one RK4 step of p' = -r p + (shifted influx)
void chain_rhs(const Eigen::VectorXd& r, int step, const Eigen::VectorXd& q,
               Eigen::VectorXd& dq) {
  const int n = static_cast<int>(q.size());
  for (int i = 0; i < n; ++i) {
    double in = (i + step < n) ? r[i + step] * q[i + step] : 0.0;
    dq[i] = -r[i] * q[i] + in;
  }
}

void chain_rk4(const Eigen::VectorXd& r, int step, double h, Eigen::VectorXd& q,
               Eigen::VectorXd& k1, Eigen::VectorXd& k2, Eigen::VectorXd& k3,
               Eigen::VectorXd& k4, Eigen::VectorXd& tmp) {
  chain_rhs(r, step, q, k1);
  tmp = q + 0.5 * h * k1;
  chain_rhs(r, step, tmp, k2);
  tmp = q + 0.5 * h * k2;
  chain_rhs(r, step, tmp, k3);
  tmp = q + h * k3;
  chain_rhs(r, step, tmp, k4);
  q += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
}

}  // namespace

double two_photon_rate(double m, int N, double Gamma) {
  double S = 0.5 * N;
  if (m - 2.0 < -S - 1e-9) return 0.0;
  double a = S * (S + 1.0) - m * (m - 1.0);
  double b = S * (S + 1.0) - (m - 1.0) * (m - 2.0);
  return Gamma * a * b;
}

double one_photon_rate(double m, int N, double Gamma) {
  double S = 0.5 * N;
  if (m - 1.0 < -S - 1e-9) return 0.0;
  return Gamma * (S * (S + 1.0) - m * (m - 1.0));
}

RateTrajectory evolve_rate_equations(int N, double Gamma, Model model,
                                     const RateOptions& opt) {
  if (N < 1) throw ValidationError("evolve_rate_equations: N must be >= 1");
  if (!(Gamma > 0.0)) throw ValidationError("evolve_rate_equations: Gamma must be > 0");
  const int step = chain_step(model);
  const double S = 0.5 * N;
  const Eigen::VectorXd r = chain_rates(N, Gamma, model);
  const int term = terminal_index(N, model);
  const double rmax = r.maxCoeff();

  RateTrajectory tr;
  tr.N = N;
  tr.Gamma = Gamma;
  tr.model = model;
  tr.terminal_m = term - S;

  // no decay channel (N = 1 two-photon): constant trajectory
  if (rmax <= 0.0) {
    if (!(opt.t_final > 0.0))
      throw ValidationError("evolve_rate_equations: t_final required when no channel decays");
    tr.terminal_m = S;
    tr.dt = opt.t_final / opt.n_samples;
    Eigen::VectorXd p0 = Eigen::VectorXd::Zero(N + 1);
    p0[N] = 1.0;
    for (int k = 0; k <= opt.n_samples; ++k) {
      double tk = k * tr.dt;
      tr.t.push_back(tk);
      tr.Sz.push_back(S);
      tr.Sz2.push_back(S * S);
      tr.sample_t.push_back(tk);
      tr.p.push_back(p0);
    }
    return tr;
  }

  // horizon: chain mean first passage plus the absorption tail of the slowest link
  double sum_inv = 0.0, r_min = rmax;
  for (int i = N; i > term; i -= step) {
    sum_inv += 1.0 / r[i];
    r_min = std::min(r_min, r[i]);
  }
  const double horizon = opt.t_final > 0.0
                             ? opt.t_final
                             : sum_inv + (std::log(1.0 / opt.terminal_tol) + 5.0) / r_min;

  std::vector<double> samples = opt.sample_at;
  if (samples.empty())
    for (int k = 1; k <= opt.n_samples; ++k)
      samples.push_back(horizon * k / opt.n_samples);

  double dt = opt.dt > 0.0 ? opt.dt : 0.25 / rmax;
  for (int attempt = 0;; ++attempt) {
    tr.t.clear();
    tr.Sz.clear();
    tr.Sz2.clear();
    tr.sample_t.clear();
    tr.p.clear();
    tr.t_cross = -1.0;
    tr.dt = dt;
    tr.dt_reductions = attempt;

    Eigen::VectorXd p = Eigen::VectorXd::Zero(N + 1);
    p[N] = 1.0;
    Eigen::VectorXd k1(N + 1), k2(N + 1), k3(N + 1), k4(N + 1), tmp(N + 1), prev(N + 1);
    auto record = [&](double tk) {
      double sz = 0.0, sz2 = 0.0;
      for (int i = 0; i <= N; ++i) {
        double m = i - S;
        sz += m * p[i];
        sz2 += m * m * p[i];
      }
      tr.t.push_back(tk);
      tr.Sz.push_back(sz);
      tr.Sz2.push_back(sz2);
    };
    record(0.0);
    tr.sample_t.push_back(0.0);
    tr.p.push_back(p);

    double t = 0.0;
    std::size_t next_sample = 0;
    bool ok = true;
    while (t < horizon * (1.0 - 1e-12)) {
      double h = std::min(dt, horizon - t);
      bool at_sample = false;
      if (next_sample < samples.size() && samples[next_sample] <= t + h * (1.0 + 1e-12)) {
        h = samples[next_sample] - t;
        at_sample = true;
      }
      if (h <= 0.0) {  // degenerate / duplicate sample time
        if (at_sample) {
          tr.sample_t.push_back(samples[next_sample++]);
          tr.p.push_back(p);
        }
        continue;
      }
      prev = p;
      chain_rk4(r, step, h, p, k1, k2, k3, k4, tmp);
      t += h;
      if (std::abs(p.sum() - 1.0) > 1e-9 || p.minCoeff() < -1e-8) {
        ok = false;
        break;
      }
      record(t);
      if (tr.t_cross < 0.0 && tr.Sz.back() < 0.0 && tr.Sz[tr.Sz.size() - 2] >= 0.0) {
        tr.t_cross = tr.t[tr.t.size() - 2];
        tr.p_cross = prev;
      }
      if (at_sample) {
        tr.sample_t.push_back(samples[next_sample++]);
        tr.p.push_back(p);
      }
      if (opt.t_final <= 0.0 && p[term] > 1.0 - opt.terminal_tol) break;
    }
    if (ok) {
      if (tr.sample_t.back() < tr.t.back()) {
        tr.sample_t.push_back(tr.t.back());
        tr.p.push_back(p);
      }
      return tr;
    }
    if (attempt >= 6)
      throw NumericsError("evolve_rate_equations: probability conservation kept failing");
    dt *= 0.5;
  }
}

HalfDecaySnapshot half_decay_snapshot(const RateTrajectory& tr) {
  if (tr.t_cross < 0.0) throw PhysicsError("half_decay_snapshot: <S_z> never crosses zero");
  const int N = tr.N;
  const double S = 0.5 * N;
  const int step = chain_step(tr.model);
  const Eigen::VectorXd r = chain_rates(N, tr.Gamma, tr.model);
  Eigen::VectorXd k1(N + 1), k2(N + 1), k3(N + 1), k4(N + 1), tmp(N + 1);
  auto sz_of = [&](const Eigen::VectorXd& q) {
    double sz = 0.0;
    for (int i = 0; i <= N; ++i) sz += (i - S) * q[i];
    return sz;
  };
  auto advanced = [&](const Eigen::VectorXd& q, double h) {
    Eigen::VectorXd out = q;
    chain_rk4(r, step, h, out, k1, k2, k3, k4, tmp);
    return out;
  };

  // walk in fine substeps to bracket the root, then bisect within one substep
  Eigen::VectorXd p = tr.p_cross;
  double t = tr.t_cross, h = tr.dt / 64.0;
  for (int it = 0; it < 130; ++it) {
    Eigen::VectorXd next = advanced(p, h);
    if (sz_of(next) >= 0.0) {
      p = std::move(next);
      t += h;
      continue;
    }
    double lo = 0.0, hi = h;
    for (int b = 0; b < 60; ++b) {
      double mid = 0.5 * (lo + hi);
      (sz_of(advanced(p, mid)) >= 0.0 ? lo : hi) = mid;
    }
    return {t + hi, advanced(p, hi)};
  }
  throw NumericsError("half_decay_snapshot: failed to re-bracket the crossing");
}

double decay_time(const RateTrajectory& tr, double fraction) {
  const double target = -fraction * 0.5 * tr.N;
  for (std::size_t k = 1; k < tr.t.size(); ++k)
    if (tr.Sz[k] <= target) {
      double w = (tr.Sz[k - 1] - target) / (tr.Sz[k - 1] - tr.Sz[k]);
      return tr.t[k - 1] + w * (tr.t[k] - tr.t[k - 1]);
    }
  throw PhysicsError("decay_time: <S_z> never reaches the requested level");
}

MeanFieldSeries mean_field_evolve(int N, double Gamma, Model model, double t_final,
                                  double epsilon) {
  if (N < 1) throw ValidationError("mean_field_evolve: N must be >= 1");
  if (Gamma < 0.0) throw ValidationError("mean_field_evolve: Gamma must be >= 0");
  if (!(t_final > 0.0)) throw ValidationError("mean_field_evolve: t_final must be > 0");
  const double S = 0.5 * N;
  const double eps = epsilon > 0.0 ? epsilon : 1e-3 * S;
  auto f = [&](double z) {
    double a = S * (S + 1.0) - z * z + z;
    if (model == Model::one_photon) return -Gamma * a;
    return -2.0 * Gamma * a * (S * (S + 1.0) - z * z + 3.0 * z - 2.0);
  };
  auto rk4 = [&](double z, double h) {
    double q1 = f(z);
    double q2 = f(z + 0.5 * h * q1);
    double q3 = f(z + 0.5 * h * q2);
    double q4 = f(z + h * q3);
    return z + (h / 6.0) * (q1 + 2.0 * (q2 + q3) + q4);
  };

  MeanFieldSeries out;
  double z = S - eps, t = 0.0;
  out.t.push_back(t);
  out.Sz.push_back(z);
  const double tol = 1e-12 * std::max(S, 1.0);
  double dt = t_final * 1e-6;
  while (t < t_final * (1.0 - 1e-12)) {
    double h = std::min(dt, t_final - t);
    double full = rk4(z, h);
    double half = rk4(rk4(z, 0.5 * h), 0.5 * h);
    double err = std::abs(half - full) / 15.0;
    if (err > tol && h > t_final * 1e-12) {
      dt = 0.5 * h;
      continue;
    }
    z = half + (half - full) / 15.0;
    t += h;
    out.t.push_back(t);
    out.Sz.push_back(z);
    if (err < tol / 32.0) dt = 2.0 * h;
  }
  return out;
}

double series_at(const MeanFieldSeries& s, double t) {
  if (t <= s.t.front()) return s.Sz.front();
  if (t >= s.t.back()) return s.Sz.back();
  auto it = std::upper_bound(s.t.begin(), s.t.end(), t);
  std::size_t k = it - s.t.begin();
  double w = (t - s.t[k - 1]) / (s.t[k] - s.t[k - 1]);
  return (1.0 - w) * s.Sz[k - 1] + w * s.Sz[k];
}

TrajectoryStats sample_trajectories(int N, double Gamma, Model model, int n_traj,
                                    std::uint64_t seed) {
  if (N < 1) throw ValidationError("sample_trajectories: N must be >= 1");
  if (!(Gamma > 0.0)) throw ValidationError("sample_trajectories: Gamma must be > 0");
  if (n_traj < 1) throw ValidationError("sample_trajectories: n_traj must be >= 1");
  const double S = 0.5 * N;
  const int step = chain_step(model);
  const Eigen::VectorXd r = chain_rates(N, Gamma, model);
  const int term = terminal_index(N, model);

  TrajectoryStats stats;
  stats.trajectories.resize(n_traj);
  for (int i = N; i > term; i -= step)
    if (r[i] > 0.0) stats.analytic_mean_total += 1.0 / r[i];

#pragma omp parallel for schedule(static)
  for (int j = 0; j < n_traj; ++j) {
    JumpTrajectory& traj = stats.trajectories[j];
    traj.stream = splitmix64(seed + 0x632BE59BD9B4E019ULL * std::uint64_t(j));
    traj.model = model;
    traj.m_initial = S;
    std::mt19937_64 rng(traj.stream);
    double t = 0.0;
    for (int i = N; i > term; i -= step) {
      std::exponential_distribution<double> wait(r[i]);
      double w = wait(rng);
      t += w;
      traj.event_t.push_back(t);
      if (i == N) traj.T_e = w;
      if (std::abs(i - S) < 0.5 * S) traj.T_t += w;  // bulk transit
    }
  }
  for (const auto& traj : stats.trajectories) {
    stats.mean_T_e += traj.T_e;
    stats.mean_T_t += traj.T_t;
    if (!traj.event_t.empty()) stats.mean_total += traj.event_t.back();
  }
  stats.mean_T_e /= n_traj;
  stats.mean_T_t /= n_traj;
  stats.mean_total /= n_traj;
  return stats;
}

Eigen::VectorXd mean_Sz(const std::vector<JumpTrajectory>& set, int N,
                        const std::vector<double>& t_grid) {
  if (set.empty()) throw ValidationError("mean_Sz: empty trajectory set");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(t_grid.size());
  for (const auto& traj : set) {
    const int step = chain_step(traj.model);
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      auto it = std::upper_bound(traj.event_t.begin(), traj.event_t.end(), t_grid[k]);
      out[k] += traj.m_initial - step * double(it - traj.event_t.begin());
    }
  }
  return out / double(set.size());
}

double correlation_parameter(const RateTrajectory& tr) {
  double c = 0.0;
  for (std::size_t k = 0; k < tr.t.size(); ++k)
    c = std::max(c, 4.0 * (tr.Sz2[k] - tr.Sz[k] * tr.Sz[k]) / (double(tr.N) * tr.N));
  return c;
}

double correlation_parameter(int N, double Gamma, Model model) {
  RateOptions opt;
  opt.terminal_tol = 1e-6;
  opt.n_samples = 2;  // only the dense moment grid matters here
  auto tr = evolve_rate_equations(N, Gamma, model, opt);
  double c = correlation_parameter(tr);
  for (int it = 0; it < 4; ++it) {
    opt.dt = tr.dt * 0.5;
    auto fine = evolve_rate_equations(N, Gamma, model, opt);
    double c2 = correlation_parameter(fine);
    if (std::abs(c2 - c) < 1e-3) return c2;
    c = c2;
    tr = std::move(fine);
  }
  throw NumericsError("correlation_parameter: maximum did not stabilise to 1e-3");
}

}  // namespace pairwave::collective_spin
