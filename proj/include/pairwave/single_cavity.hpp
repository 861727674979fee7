// single_cavity.hpp — single nonlinear cavity with engineered two-photon loss:
// full emitter-Fock master equation in the collective-spin basis versus the
// effective collective two-photon master equation, plus the Markov validity
// diagnostic.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "pairwave/types.hpp"

namespace pairwave::single_cavity {

// All rates and frequencies share one unit system (kappa2-units by default).
struct CavityModel {
  double omega_c = 15.0;  // cavity frequency
  double omega_e = 0.0;   // emitter frequency; Delta = omega_c - omega_e
  double U = 30.0;        // Kerr nonlinearity, H has -U/2 n(n-1)
  double g = 0.12;        // emitter-cavity coupling
  double kappa1 = 0.01;   // residual one-photon loss
  double kappa2 = 1.0;    // engineered two-photon loss
  int n_ph_max = 4;       // Fock cutoff
  int N = 50;             // emitters, maximal collective spin S = N/2

  double Delta() const { return omega_c - omega_e; }
  bool kappa1_small() const { return kappa1 <= 0.1 * kappa2; }  // flagged regime

  void validate() const {
    if (N < 1) throw ValidationError("CavityModel: N must be >= 1");
    if (n_ph_max < 2) throw ValidationError("CavityModel: n_ph_max must be >= 2");
    if (!(kappa2 > 0.0)) throw ValidationError("CavityModel: kappa2 must be > 0");
    if (kappa1 < 0.0) throw ValidationError("CavityModel: kappa1 must be >= 0");
    if (g < 0.0) throw ValidationError("CavityModel: g must be >= 0");
    if (!(U > 0.0)) throw ValidationError("CavityModel: U must be > 0");
  }
};

struct CavityTrajectory {
  std::vector<double> t;
  std::vector<double> Sz;
  Eigen::MatrixXd fock_pop;  // n_samples x (n_ph_max + 1); empty for the effective model
};

struct EvolveOptions {
  double t_final = 0.0;     // required
  double dt = 0.0;          // 0: automatic from the spectral scale
  int n_samples = 400;
  bool check_cutoff = true;  // full model: re-run with n_ph_max + 1, require the
                             // <S_z> shift < 1e-4 relative to the range N/2
};

// Exact master equation with two-photon (kappa2) and one-photon (kappa1)
// cavity loss, from all emitters excited and the cavity in vacuum. The total
// quanta (excited emitters + photons) is block-conserved, so the state is
// evolved sector by sector. Trace is monitored to 1e-8 and block positivity
// to -1e-7; violations or a failed cutoff check raise NumericsError.
CavityTrajectory evolve_full_cavity(const CavityModel& model, const EvolveOptions& opt);

struct EffectiveRate {
  std::complex<double> A;  // collective two-photon emission amplitude
  double Gamma = 0.0;      // = 2 Re A, the collective chain rate
};

// A = -G^2 / (2i(omega_e - omega_c + U/2) - kappa2), G = sqrt(2) g^2 / Delta.
EffectiveRate effective_rate(const CavityModel& model);

// Effective collective two-photon master equation on the (N+1)-dim Dicke basis.
CavityTrajectory evolve_effective_cavity(const CavityModel& model, const EvolveOptions& opt);

struct ValidityReport {
  double Gamma = 0.0;  // 2 Re A
  double ratio = 0.0;  // Gamma N^3 / kappa2
  bool pass = false;   // ratio <= 1
};

ValidityReport validity_bound(const CavityModel& model, int N);

}  // namespace pairwave::single_cavity
