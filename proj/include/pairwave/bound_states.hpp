// bound_states.hpp — Two-photon bound-state band structure on 1D/2D/3D lattices:
// closed forms in 1D, numerically solved binding condition in higher dimensions.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "pairwave/types.hpp"

namespace pairwave::bound_states {

// One bound pair at center-of-mass momentum K (1D).
struct BoundState {
  double K = 0.0;         // center-of-mass momentum, (-pi, pi]
  double energy = 0.0;    // E_K^b
  double lambda_K = 0.0;  // bound-state size in sites (0 at K = +-pi)
  double psi0 = 1.0;      // on-site amplitude psi_K(0)
};

// Tabulated band with group velocity and normalized density of states.
struct BoundStateBand {
  std::vector<double> K_grid;
  std::vector<BoundState> states;
  std::vector<double> group_velocity;  // v_g(K)
  std::vector<double> dos;             // rho_tilde(K) = J / v_g
};

// E_K^b = 2 omega_c - sqrt(U^2 + 16 J_K^2), J_K = J cos(K/2).
double bound_energy_1d(double K, const LatticeParams& lat);

// psi_K(r) = sqrt(tanh(1/lambda_K)) e^{-|r|/lambda_K}, 1/lambda_K = asinh(U/(4 J_K)).
// K = +-pi degenerates to psi = delta_{r,0}.
double bound_wavefunction_1d(double K, int r, const LatticeParams& lat);

// Full record (energy, size, on-site amplitude) at one K.
BoundState bound_state_1d(double K, const LatticeParams& lat);

// v_g = 4 J^2 sin K / sqrt(U^2 + 16 J^2 cos^2(K/2)); rho_tilde = J / v_g.
// Throws PhysicsError at the band edges K = 0, pi where the DOS diverges.
std::pair<double, double> group_velocity_and_dos(double K, const LatticeParams& lat);

// Residual of the binding condition 1/U + (2pi)^-d Int d^dq / (E' + 4 Sum J_Ka cos q_a)
// with E' = E - 2 omega_c, evaluated by tensor-product trapezoid quadrature with
// grid doubling. Throws PhysicsError if E touches the scattering continuum.
double binding_residual(double E, const std::vector<double>& K_vec, const LatticeParams& lat);

// Binding depth b > 0 below the continuum floor, E = 2 omega_c - 4 Sum J_Ka - b,
// in d = 2, 3; nullopt if no bound state exists at this (K_vec, U). Robust down
// to exponentially small b (which would underflow when folded into E itself).
std::optional<double> binding_depth_nd(const std::vector<double>& K_vec,
                                       const LatticeParams& lat);

// Bound-state energy in d = 2, 3 from the binding condition; nullopt if no bound
// state exists at this (K_vec, U).
std::optional<double> solve_bound_energy_nd(const std::vector<double>& K_vec,
                                            const LatticeParams& lat);

// Real-space bound-state wavefunction on the relative-coordinate grid
// r in [-r_max, r_max]^d (row-major flattening), normalized to Sum |psi|^2 = 1.
std::vector<double> bound_wavefunction_nd(const std::vector<double>& K_vec,
                                          const LatticeParams& lat, int r_max);

// K_0 in (0, pi) with E_{K_0}^b = 2 omega_e; throws PhysicsError when 2 omega_e
// falls outside the open bound-state band (the message names the band edges).
double resonant_K0(double omega_e, const LatticeParams& lat);

// Uniform tabulation over K in (0, pi), band-edge points excluded.
BoundStateBand tabulate_band(const LatticeParams& lat, int n_K);

}  // namespace pairwave::bound_states
