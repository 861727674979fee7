// collective_spin.hpp — Same-site (Dicke) limit: two-photon cascade vs regular
// superradiance. Rate equations over spin projections m = -S..S, mean-field
// dynamics, stochastic jump trajectories and the correlation parameter.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "pairwave/types.hpp"

namespace pairwave::collective_spin {

enum class Model { two_photon, one_photon };

// Collective lowering rates out of |S, m>, S = N/2; zero when the target
// projection would fall below -S.
double two_photon_rate(double m, int N, double Gamma);  // m -> m - 2
double one_photon_rate(double m, int N, double Gamma);  // m -> m - 1

struct RateTrajectory {
  int N = 0;
  double Gamma = 0.0;
  Model model = Model::two_photon;
  double dt = 0.0;                 // step actually used
  int dt_reductions = 0;           // automatic halvings after a conservation failure
  std::vector<double> t;           // dense step grid
  std::vector<double> Sz, Sz2;     // moments on the dense grid
  std::vector<double> sample_t;    // sparse population snapshot times
  std::vector<Eigen::VectorXd> p;  // p[k][i] = p_m at sample_t[k], m = i - N/2
  double terminal_m = 0.0;         // -S, or -S + 1 for the odd-N two-photon chain
  double t_cross = -1.0;           // last dense time with <S_z> >= 0 (-1: no crossing)
  Eigen::VectorXd p_cross;         // populations at t_cross
};

struct RateOptions {
  double t_final = 0.0;  // 0: run until the terminal population reaches 1 - terminal_tol
  double dt = 0.0;       // 0: 0.25 / max chain rate
  int n_samples = 400;
  double terminal_tol = 1e-10;
  std::vector<double> sample_at;  // nonempty: exact snapshot times, ascending
};

// Pure death chain p_m' = -R_m p_m + R_{m+step} p_{m+step} from the fully
// excited state, fixed-step RK4. Probability-conservation failures halve the
// step automatically; persistent failure raises NumericsError.
RateTrajectory evolve_rate_equations(int N, double Gamma, Model model,
                                     const RateOptions& opt = {});

struct HalfDecaySnapshot {
  double T_h = 0.0;
  Eigen::VectorXd p;
};

// Populations at the instant <S_z> crosses zero (root-refined within one step).
// Throws PhysicsError when the trajectory never crosses.
HalfDecaySnapshot half_decay_snapshot(const RateTrajectory& tr);

// First time <S_z> drops to -fraction * S (linear interpolation on the dense
// grid); throws PhysicsError if the level is never reached.
double decay_time(const RateTrajectory& tr, double fraction = 0.9);

struct MeanFieldSeries {
  std::vector<double> t, Sz;
};

// Closed <S_z> evolution seeded at S - epsilon (epsilon = 0 picks 1e-3 * S);
// adaptive step-doubling RK4. Note the two-photon flow terminates at the
// fixed point <S_z> = -S + 1, one lowering step above the true ground state.
MeanFieldSeries mean_field_evolve(int N, double Gamma, Model model, double t_final,
                                  double epsilon = 0.0);
double series_at(const MeanFieldSeries& s, double t);  // linear interpolation

struct JumpTrajectory {
  std::uint64_t stream = 0;  // per-trajectory RNG stream id
  Model model = Model::two_photon;
  double m_initial = 0.0;       // = S; m drops by the chain step at each event
  std::vector<double> event_t;  // jump times, ascending
  double T_e = 0.0;             // dwell time in the initial state m = S
  double T_t = 0.0;             // time spent transiting the bulk, |m| < S / 2
};

struct TrajectoryStats {
  std::vector<JumpTrajectory> trajectories;
  double mean_T_e = 0.0, mean_T_t = 0.0, mean_total = 0.0;
  double analytic_mean_total = 0.0;  // sum of inverse rates along the chain
};

// Exact next-event sampling of the death chain. Stream i derives from
// (seed, i) alone, so results are independent of scheduling order.
TrajectoryStats sample_trajectories(int N, double Gamma, Model model, int n_traj,
                                    std::uint64_t seed);

// trajectory-averaged <S_z> on an arbitrary time grid
Eigen::VectorXd mean_Sz(const std::vector<JumpTrajectory>& set, int N,
                        const std::vector<double>& t_grid);

// C = max_t 4 Var S_z / N^2 over the trajectory's dense grid
double correlation_parameter(const RateTrajectory& tr);
// same, re-evolving with the step halved until the maximum is stable to 1e-3
double correlation_parameter(int N, double Gamma, Model model);

}  // namespace pairwave::collective_spin
