// coupling.hpp — Effective emitter-pair coupling f_K, pair decay rate, the
// four-index amplitude tensor, single-emitter residuals and Markov diagnostics.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pairwave/types.hpp"

namespace pairwave::coupling {

// f_{K0}(r) tabulated over separations, with the rate scale Gamma0 = 2 g^4 rho(K0) / J^3.
struct CouplingTable {
  double K0 = 0.0;
  std::vector<double> f_values;  // r = 0 .. r_max
  double Gamma0 = 0.0;

  double f(int r) const { return f_values.at(static_cast<std::size_t>(std::abs(r))); }
};

// A_{ij,kl} flattened over ordered pairs p = i*N + j (rows) and q = k*N + l (columns).
struct AmplitudeTensor {
  int N = 0;
  Eigen::MatrixXcd pair_matrix;  // N^2 x N^2

  std::complex<double> operator()(int i, int j, int k, int l) const {
    return pair_matrix(i * N + j, k * N + l);
  }
};

struct PhotonicFraction {
  double sin2_theta = 0.0;  // photonic weight of the dressed emitter state
  double E_bound = 0.0;     // dressed-state energy below the band
};

struct SingleEmitterRate {
  double Gamma1 = 0.0;
  bool precondition_ok = true;  // kappa << delta0, g flagged here, not thrown
};

struct MarkovDiagnostic {
  double lhs = 0.0;  // g^2 / J^2
  double rhs = 0.0;  // v_g(K0) / J, divided by Delta n for extended ensembles
  double ratio = 0.0;
  bool valid = false;  // ratio < 0.1
};

// Closed-form k-sum for f_K(r) in the continuum limit; the evaluation grid is
// doubled until the relative change drops below 1e-6 (independent of lat.N_c).
double pair_coupling_f(double K, int r, const LatticeParams& lat, const EmitterEnsemble& ens);

// f_{K0}(r) for r = 0..r_max at the ensemble's resonant momentum.
CouplingTable tabulate_coupling(const LatticeParams& lat, const EmitterEnsemble& ens, int r_max);

// Gamma = (2 g^4 / J^3) |f_{K0}(n1 - n2)|^2 rho(K0) for a two-emitter ensemble.
double decay_rate_two_emitters(const EmitterEnsemble& ens, const LatticeParams& lat);

// A_{ij,kl} = f(n_i - n_j) f(n_k - n_l) e^{i K0 |(n_k + n_l) - (n_i + n_j)| / 2}.
AmplitudeTensor amplitude_tensor(const EmitterEnsemble& ens, const LatticeParams& lat);

// Dressed bound state of a single far-detuned emitter below the band.
PhotonicFraction photonic_fraction(const EmitterEnsemble& ens, const LatticeParams& lat);

// Gamma_1 = 1/T1 + sin^2(theta) * kappa.
SingleEmitterRate single_emitter_rate(const EmitterEnsemble& ens, const LatticeParams& lat);

// Markov validity: g^2/J^2 versus the pair group velocity (per-site for
// extended ensembles with N > 2).
MarkovDiagnostic markov_check(const EmitterEnsemble& ens, const LatticeParams& lat);

}  // namespace pairwave::coupling
