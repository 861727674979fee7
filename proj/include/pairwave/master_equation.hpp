// master_equation.hpp — Markovian open-system dynamics over emitter pairs:
// effective non-Hermitian Hamiltonian, recycling dissipator, density-matrix
// evolution, eigenmode analysis and semi-analytic trap populations.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "pairwave/types.hpp"

namespace pairwave::master_equation {

// Pair-resolved generator. Unordered pairs p = {i < j} carry jump operators
// L_p = sigma_i^- sigma_j^-; the complex pair amplitude matrix is
// A_pq = f_p f_q e^{i K0 |S_q - S_p| / 2} (S_p: pair site-sum) and
// H_eff = -(i Gamma0 / 2) sum_pq A_pq L_q^+ L_p, dissipator rates
// Gamma_pq = Gamma0 Re A_pq.
struct Generator {
  int N = 0;
  double Gamma0 = 0.0;
  std::vector<std::pair<int, int>> pairs;  // i < j
  Eigen::MatrixXcd A;                      // n_pair x n_pair (complex symmetric)
  Eigen::MatrixXd Gamma;                   // Gamma0 * Re A
  Eigen::MatrixXcd H_eff;                  // 2^N x 2^N, sector block diagonal
};

struct METrajectory {
  std::vector<double> t;
  std::vector<double> P_e;     // mean excited population per emitter
  std::vector<double> purity;  // tr rho^2
  std::vector<Eigen::VectorXd> sector_pop;  // populations by excitation number 0..N
};

struct Eigenmode {
  std::complex<double> eigenvalue;
  double rate = 0.0;  // -2 Im(eigenvalue)
  Eigen::VectorXcd amplitudes;
  bool dark = false;        // rate < 1e-12 Gamma0
  bool subradiant = false;  // rate < 1e-2 Gamma0
};

struct EigenmodeReport {
  int sector = 0;
  std::vector<int> basis_states;  // computational-basis bitmasks of the sector
  std::vector<Eigenmode> modes;   // sorted by rate ascending
  bool defective = false;         // Schur fallback used
};

struct TrapReport {
  Eigen::VectorXd w;  // eigenvalues of Re A, descending
  int rank = 0;
  std::vector<std::complex<double>> T_eigenvalues;  // two-excitation modes, rate-ascending
  std::vector<double> R_G;  // decay rate of T_i to the ground sector
  std::vector<double> R_E;  // pumping of T_i from the fully excited state
  Eigen::VectorXcd dark_state;     // pair-basis amplitudes of D2 (empty if none)
  double alpha_over_beta = 0.0;    // f(x)/f(3x) for equal spacing
  std::optional<double> P_e_infinity;  // only when rank == 2
};

struct EvolveOptions {
  double t_final = 0.0;  // required
  double dt = 0.0;       // 0: automatic from the generator's rate scale
  int n_samples = 400;
};

// Builds pairs, A, Gamma and H_eff. N = 1 yields an identically zero
// generator. Throws PhysicsError if Re A has an eigenvalue < -1e-9 * scale.
Generator build_generator(const EmitterEnsemble& ens, const LatticeParams& lat);

// Dense RK4 evolution of rho from rho0; positivity is checked at every sample
// (min eigenvalue >= -1e-7) and violations abort with NumericsError.
METrajectory evolve_density_matrix(const Generator& gen, const Eigen::MatrixXcd& rho0,
                                   const EvolveOptions& opt);

// Same evolution with per-emitter amplitude damping (rate 1/T1) and pure
// dephasing (coherence decay 1/T2) added.
METrajectory evolve_with_local_channels(const Generator& gen, double T1, double T2,
                                        const Eigen::MatrixXcd& rho0, const EvolveOptions& opt);

// Eigenpairs of the H_eff block at fixed excitation number.
EigenmodeReport eigen_analysis(const Generator& gen, int sector);

// Semi-analytic trapped population for N = 4: spectral decomposition of Re A,
// transition rates of the two-excitation eigenstates and, for rank-2 decay
// matrices, the closed-form P_e(infinity).
TrapReport semianalytic_trap(const EmitterEnsemble& ens, const LatticeParams& lat);

// density matrix of the fully excited product state
Eigen::MatrixXcd fully_excited(int N);

}  // namespace pairwave::master_equation
