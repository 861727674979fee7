// exact_dynamics.hpp — Exact two-excitation dynamics: momentum-space reduced
// model (bound pairs + single-photon manifolds) and the full real-space model
// including two-photon scattering states. Oracle for all Markovian results.
#pragma once

#include <vector>

#include "pairwave/types.hpp"

namespace pairwave::exact_dynamics {

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> P_e;        // (2|c_e|^2 + sum |c_ik|^2) / 2
  std::vector<double> norm_e;     // |c_e|^2
  std::vector<double> norm_1ph;   // single-photon manifold population
  std::vector<double> norm_2ph;   // two-photon manifold population
};

struct EvolveOptions {
  double t_final = 1000.0;
  double dt = 0.0;        // 0: pick the model default (0.05 momentum, 0.025 real-space)
  double sample_dt = 2.0; // observable sampling interval
};

// SM coupled equations for c_e, c_{1k}, c_{2k}, c_K with kappa entering as
// -i kappa/2 per photon; exact diagonal phases via a Lawson (integrating-factor)
// 4th-order step. Aborts with NumericsError if the kappa = 0 norm drifts > 1e-6.
TimeSeries evolve_momentum_model(const EmitterEnsemble& ens, const LatticeParams& lat,
                                 const EvolveOptions& opt);

// Position-basis model with the full two-photon amplitude Psi(n, m) — bound and
// scattering content with no truncation. N_c is meant to stay <= ~1001.
TimeSeries evolve_realspace_model(const EmitterEnsemble& ens, const LatticeParams& lat,
                                  const EvolveOptions& opt);

// Single emitter, single-excitation sector (c_e, c_k): residual decay of the
// dressed emitter below the band.
TimeSeries evolve_single_emitter(const EmitterEnsemble& ens, const LatticeParams& lat,
                                 const EvolveOptions& opt);

struct DecayFit {
  double rate = 0.0;      // least-squares slope of -log P_e
  double residual = 0.0;  // RMS of the log-linear fit residuals
  bool flagged = false;   // non-monotone / non-positive data inside the window
};

// Log-linear fit of P_e over t in [t_lo, t_hi].
DecayFit fit_decay_rate(const TimeSeries& series, double t_lo, double t_hi);

}  // namespace pairwave::exact_dynamics
