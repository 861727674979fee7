// types.hpp — Parameter records, invariants and error taxonomy shared by all modules.
#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pairwave {

// Thrown when a config or parameter record violates a structural constraint.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when inputs are structurally fine but physically out of range
// (off-resonant emitters, energy inside a continuum, ...).
struct PhysicsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a numerical procedure fails to converge to its contract.
struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// Photonic lattice: tight-binding band of width 4J with on-site two-photon
// attraction U and a uniform per-cavity loss kappa. All energies in units of J,
// time in 1/J. J is kept as a field only for unit bookkeeping.
struct LatticeParams {
  double omega_c = 0.0;  // cavity frequency (reference; detunings are what matter)
  double J = 1.0;        // hopping
  double U = 1.0;        // on-site attraction, > 0
  int dimension = 1;     // hypercubic lattice dimension in {1,2,3}
  int N_c = 601;         // sites per dimension, odd
  double kappa = 0.0;    // per-cavity photon loss

  double band_min() const { return omega_c - 2.0 * J; }
  double band_max() const { return omega_c + 2.0 * J; }

  void validate() const {
    if (!(J > 0.0)) throw ValidationError("LatticeParams: J must be > 0");
    if (!(U > 0.0)) throw ValidationError("LatticeParams: U must be > 0");
    if (dimension < 1 || dimension > 3)
      throw ValidationError("LatticeParams: dimension must be in {1,2,3}");
    if (N_c < 3 || N_c % 2 == 0)
      throw ValidationError("LatticeParams: N_c must be odd and >= 3");
    if (kappa < 0.0) throw ValidationError("LatticeParams: kappa must be >= 0");
  }
};

// Two-level emitters side-coupled to lattice sites. omega_e must sit below the
// single-photon band so that delta_k = omega_c - 2J cos k - omega_e > 0.
struct EmitterEnsemble {
  int N = 2;
  std::vector<int> positions;  // sites n_i, ascending
  double omega_e = -2.04;      // emitter frequency
  double g = 0.02;             // emitter-photon coupling
  double T1 = infinity;        // bare decay time (optional channel)
  double T2 = infinity;        // bare dephasing time (optional channel)

  void validate(const LatticeParams& lat) const {
    if (N < 1) throw ValidationError("EmitterEnsemble: N must be >= 1");
    if (static_cast<int>(positions.size()) != N)
      throw ValidationError("EmitterEnsemble: positions.size() != N");
    for (std::size_t i = 0; i + 1 < positions.size(); ++i)
      if (positions[i] > positions[i + 1])
        throw ValidationError("EmitterEnsemble: positions must be ascending");
    for (int n : positions)
      if (n < 0 || n >= lat.N_c)
        throw ValidationError("EmitterEnsemble: position outside [0, N_c)");
    if (!(g > 0.0)) throw ValidationError("EmitterEnsemble: g must be > 0");
    if (!(omega_e < lat.band_min()))
      throw ValidationError("EmitterEnsemble: omega_e must lie below the band, omega_e < omega_c - 2J");
    if (!(T1 > 0.0) || !(T2 > 0.0))
      throw ValidationError("EmitterEnsemble: T1, T2 must be positive (or infinite)");
  }

  // detuning of emitter below the lower band edge
  double delta0(const LatticeParams& lat) const { return lat.band_min() - omega_e; }
};

}  // namespace pairwave
