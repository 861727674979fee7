// coupling.cpp — k-space sums for f_K and derived rates/diagnostics.
#include "pairwave/coupling.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "pairwave/bound_states.hpp"

namespace pairwave::coupling {

namespace {

constexpr double kPi = 3.14159265358979323846;

// single sum (2 sqrt2 / n) Sum_k J cos[(k - K/2) r] L_{k,K} / delta_k on an n-point grid
double f_sum(double K, int r, const LatticeParams& lat, const EmitterEnsemble& ens, int n) {
  double JK = std::abs(lat.J * std::cos(0.5 * K));
  if (JK < 1e-14 * lat.J) {
    // K = +-pi: the bound pair is fully localized, L = psi(0) delta-like in real
    // space; the k-sum reduces to L = psi0 = 1 for all k
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      double k = -kPi + 2.0 * kPi * j / n;
      double delta_k = lat.omega_c - 2.0 * lat.J * std::cos(k) - ens.omega_e;
      s += lat.J * std::cos((k - 0.5 * K) * r) / delta_k;
    }
    return 2.0 * std::sqrt(2.0) * s / n;
  }
  double inv_lambda = std::asinh(lat.U / (4.0 * JK));
  double psi0 = std::sqrt(std::tanh(inv_lambda));
  double sh = std::sinh(inv_lambda), ch = std::cosh(inv_lambda);
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    double k = -kPi + 2.0 * kPi * j / n;
    double delta_k = lat.omega_c - 2.0 * lat.J * std::cos(k) - ens.omega_e;
    double L = sh * psi0 / (ch - std::cos(k - 0.5 * K));
    s += lat.J * std::cos((k - 0.5 * K) * r) * L / delta_k;
  }
  return 2.0 * std::sqrt(2.0) * s / n;
}

}  // namespace

double pair_coupling_f(double K, int r, const LatticeParams& lat, const EmitterEnsemble& ens) {
  ens.validate(lat);  // guarantees delta_k > 0 on the whole band
  // initial resolution must resolve the near-edge scale delta0
  double delta0 = ens.delta0(lat);
  int n = 257;
  while (2.0 * kPi / n > 0.1 * delta0 / lat.J && n < (1 << 20)) n *= 2;
  double prev = f_sum(K, r, lat, ens, n);
  for (int iter = 0; iter < 14; ++iter) {
    n *= 2;
    double cur = f_sum(K, r, lat, ens, n);
    double change = std::abs(cur - prev) / std::max(1e-300, std::abs(cur));
    prev = cur;
    if (change < 1e-6) return cur;
  }
  std::ostringstream os;
  os << "pair_coupling_f: k-grid not converged at n = " << n;
  throw NumericsError(os.str());
}

CouplingTable tabulate_coupling(const LatticeParams& lat, const EmitterEnsemble& ens, int r_max) {
  CouplingTable tab;
  tab.K0 = bound_states::resonant_K0(ens.omega_e, lat);
  auto [vg, rho] = bound_states::group_velocity_and_dos(tab.K0, lat);
  (void)vg;
  tab.Gamma0 = 2.0 * std::pow(ens.g, 4) * rho / std::pow(lat.J, 3);
  tab.f_values.reserve(r_max + 1);
  for (int r = 0; r <= r_max; ++r) tab.f_values.push_back(pair_coupling_f(tab.K0, r, lat, ens));
  return tab;
}

double decay_rate_two_emitters(const EmitterEnsemble& ens, const LatticeParams& lat) {
  if (ens.N != 2) throw ValidationError("decay_rate_two_emitters: needs N = 2");
  int r = ens.positions[1] - ens.positions[0];
  auto tab = tabulate_coupling(lat, ens, std::abs(r));
  return tab.Gamma0 * tab.f(r) * tab.f(r);
}

AmplitudeTensor amplitude_tensor(const EmitterEnsemble& ens, const LatticeParams& lat) {
  ens.validate(lat);
  int max_sep = 0;
  for (int i = 0; i < ens.N; ++i)
    for (int j = 0; j < ens.N; ++j)
      max_sep = std::max(max_sep, std::abs(ens.positions[i] - ens.positions[j]));
  auto tab = tabulate_coupling(lat, ens, max_sep);

  AmplitudeTensor A;
  A.N = ens.N;
  A.pair_matrix.resize(ens.N * ens.N, ens.N * ens.N);
  for (int i = 0; i < ens.N; ++i)
    for (int j = 0; j < ens.N; ++j)
      for (int k = 0; k < ens.N; ++k)
        for (int l = 0; l < ens.N; ++l) {
          double fij = tab.f(ens.positions[i] - ens.positions[j]);
          double fkl = tab.f(ens.positions[k] - ens.positions[l]);
          double centers = std::abs(double(ens.positions[k] + ens.positions[l]) -
                                    double(ens.positions[i] + ens.positions[j]));
          std::complex<double> phase(std::cos(0.5 * tab.K0 * centers),
                                     std::sin(0.5 * tab.K0 * centers));
          A.pair_matrix(i * ens.N + j, k * ens.N + l) = fij * fkl * phase;
        }
  return A;
}

PhotonicFraction photonic_fraction(const EmitterEnsemble& ens, const LatticeParams& lat) {
  if (ens.N != 1) throw ValidationError("photonic_fraction: needs N = 1");
  ens.validate(lat);
  const double delta0 = ens.delta0(lat), g = ens.g, J = lat.J;
  // pole condition for the dressed state, x = omega_c - E - 2J in (0, delta0):
  // delta0 - x = g^2 / sqrt(x (x + 4J)). Two roots may exist; the emitter-like
  // branch sits near x = delta0.
  auto F = [&](double x) { return delta0 - x - g * g / std::sqrt(x * (x + 4.0 * J)); };
  double hi = delta0 * (1.0 - 1e-14), lo = hi;
  bool bracketed = false;
  for (int i = 1; i <= 2000; ++i) {
    lo = delta0 * (1.0 - double(i) / 2000.0) + 1e-300;
    if (F(lo) > 0.0) {
      bracketed = true;
      break;
    }
  }
  if (!bracketed) throw NumericsError("photonic_fraction: no bracket for the dressed-state pole");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (F(mid) > 0.0 ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  PhotonicFraction out;
  out.E_bound = lat.omega_c - 2.0 * J - x;
  double Ec = out.E_bound - lat.omega_c;  // = -(2J + x)
  double sin2 =
      g * g / (g * g + Ec * Ec * std::pow(1.0 - 4.0 * J * J / (Ec * Ec), 1.5));
  out.sin2_theta = sin2;
  return out;
}

SingleEmitterRate single_emitter_rate(const EmitterEnsemble& ens, const LatticeParams& lat) {
  auto pf = photonic_fraction(ens, lat);
  SingleEmitterRate out;
  double T1_inv = std::isinf(ens.T1) ? 0.0 : 1.0 / ens.T1;
  out.Gamma1 = T1_inv + pf.sin2_theta * lat.kappa;
  out.precondition_ok = lat.kappa < 0.1 * std::min({ens.delta0(lat), ens.g, lat.J});
  return out;
}

MarkovDiagnostic markov_check(const EmitterEnsemble& ens, const LatticeParams& lat) {
  ens.validate(lat);
  double K0 = bound_states::resonant_K0(ens.omega_e, lat);
  auto [vg, rho] = bound_states::group_velocity_and_dos(K0, lat);
  (void)rho;
  MarkovDiagnostic d;
  d.lhs = ens.g * ens.g / (lat.J * lat.J);
  d.rhs = vg / lat.J;
  int span = ens.positions.back() - ens.positions.front();
  if (ens.N > 2 && span > 1) d.rhs /= span;  // extended-ensemble retardation penalty
  d.ratio = d.lhs / d.rhs;
  d.valid = d.ratio < 0.1;
  return d;
}

}  // namespace pairwave::coupling
