// test_coupling.cpp — f_K closed form vs the time-integral definition, rates,
// amplitude tensor structure, single-emitter residuals.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "pairwave/bound_states.hpp"
#include "pairwave/coupling.hpp"

using namespace pairwave;
using namespace pairwave::coupling;
using cplx = std::complex<double>;

namespace {
constexpr double kPi = 3.14159265358979323846;

LatticeParams lattice(double U) {
  LatticeParams lat;
  lat.U = U;
  return lat;
}

EmitterEnsemble two_emitters(double omega_e, double g, int n1, int n2) {
  EmitterEnsemble ens;
  ens.N = 2;
  ens.positions = {std::min(n1, n2), std::max(n1, n2)};
  ens.omega_e = omega_e;
  ens.g = g;
  return ens;
}

// Independent evaluation of f_K(n1, n2) from its time-integral definition:
// free real-space propagation of a photon created at n1, overlapped against the
// two-photon bound state, integrated over tau with an exponential regulator.
// Richardson-extrapolated in the regulator to remove the O(eps^2) bias.
double f_time_integral_oracle(double K, int n1, int n2, const LatticeParams& lat,
                              double omega_e) {
  const int Nc = 401, mid = Nc / 2;
  std::vector<double> psi(Nc);  // bound-state relative wavefunction, minimal image
  for (int d = 0; d < Nc; ++d) {
    int r = d <= Nc / 2 ? d : d - Nc;
    psi[d] = bound_states::bound_wavefunction_1d(K, r, lat);
  }
  auto bracket = [&](const std::vector<cplx>& G, int na) {
    // Sum_m G_m sqrt(2) e^{-i K (na + m)/2} psi(na - m)
    cplx s = 0.0;
    for (int m = 0; m < Nc; ++m) {
      int d = ((na - m) % Nc + Nc) % Nc;
      double ph = -0.5 * K * (na + m);
      s += G[m] * psi[d] * cplx(std::cos(ph), std::sin(ph));
    }
    return std::sqrt(2.0) * s;
  };
  auto run = [&](double eps) {
    const double tau_max = 25.0 / eps, dt = 0.025;
    const int n_steps = static_cast<int>(tau_max / dt) + 1;
    // two wavepackets: photon created at n1 (for the n2-bracket) and vice versa
    std::vector<cplx> Ga(Nc, 0.0), Gb(Nc, 0.0);
    int pa = mid, pb = mid + (n2 - n1);
    Ga[pa] = 1.0;  // photon at n1
    Gb[pb] = 1.0;  // photon at n2
    auto rhs = [&](const std::vector<cplx>& c, std::vector<cplx>& out) {
      // dc/dtau = +i H1 c, H1 = omega_c - J (shift + shift^-1)
      for (int n = 0; n < Nc; ++n) {
        cplx h = lat.omega_c * c[n] - lat.J * (c[(n + 1) % Nc] + c[(n + Nc - 1) % Nc]);
        out[n] = cplx(0.0, 1.0) * h;
      }
    };
    std::vector<cplx> k1(Nc), k2(Nc), k3(Nc), k4(Nc), tmp(Nc);
    auto rk4 = [&](std::vector<cplx>& c) {
      rhs(c, k1);
      for (int n = 0; n < Nc; ++n) tmp[n] = c[n] + 0.5 * dt * k1[n];
      rhs(tmp, k2);
      for (int n = 0; n < Nc; ++n) tmp[n] = c[n] + 0.5 * dt * k2[n];
      rhs(tmp, k3);
      for (int n = 0; n < Nc; ++n) tmp[n] = c[n] + dt * k3[n];
      rhs(tmp, k4);
      for (int n = 0; n < Nc; ++n) c[n] += dt / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
    };
    // Simpson weights over the tau grid (n_steps made even)
    cplx integral = 0.0;
    int n_panels = n_steps % 2 == 0 ? n_steps : n_steps + 1;
    std::vector<cplx> vals(n_panels + 1);
    for (int s = 0; s <= n_panels; ++s) {
      double tau = s * dt;
      cplx damp = std::exp(cplx(-eps * tau, -omega_e * tau));
      vals[s] = damp * (bracket(Ga, pb) + bracket(Gb, pa));
      if (s < n_panels) rk4(Ga), rk4(Gb);
    }
    for (int s = 0; s + 2 <= n_panels; s += 2)
      integral += dt / 3.0 * (vals[s] + 4.0 * vals[s + 1] + vals[s + 2]);
    double ph = 0.5 * K * (pa + pb);
    // -i sqrt(N_c) J e^{iK(n1+n2)/2} Int ...; the sqrt(N_c) already cancelled
    // against the sqrt(2/N_c) Wick factor inside bracket()
    cplx f = cplx(0.0, -1.0) * lat.J * cplx(std::cos(ph), std::sin(ph)) * integral;
    return f.real();
  };
  double e1 = 0.05, e2 = 0.1;
  double f1 = run(e1), f2 = run(e2);
  return (e2 * e2 * f1 - e1 * e1 * f2) / (e2 * e2 - e1 * e1);
}

}  // namespace

TEST_CASE("f is real-even in r and independent of the stored N_c") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dU(0.5, 5.0), dK(0.1, 3.0), dw(-3.2, -2.1);
  for (int t = 0; t < 5; ++t) {
    auto lat = lattice(dU(rng));
    auto ens = two_emitters(dw(rng), 0.02, 300, 300);
    double K = dK(rng);
    for (int r : {1, 4, 9})
      CHECK(pair_coupling_f(K, r, lat, ens) == doctest::Approx(pair_coupling_f(K, -r, lat, ens)));
  }
  auto latA = lattice(1.0);
  auto latB = lattice(1.0);
  latB.N_c = 1201;
  auto ens = two_emitters(-2.04, 0.02, 300, 300);
  CHECK(pair_coupling_f(0.3, 2, latA, ens) ==
        doctest::Approx(pair_coupling_f(0.3, 2, latB, ens)).epsilon(1e-12));
}

TEST_CASE("f closed form vs time-integral oracle") {
  // moderate detuning keeps the regulator extrapolation fast and tight
  auto lat = lattice(4.0);
  double omega_e = -2.5;
  auto ens = two_emitters(omega_e, 0.02, 200, 200);
  for (int r : {0, 3}) {
    auto e = two_emitters(omega_e, 0.02, 200, 200 + r);
    double K = 1.0;
    double closed = pair_coupling_f(K, r, lat, e);
    double oracle = f_time_integral_oracle(K, 200, 200 + r, lat, omega_e);
    CHECK(oracle == doctest::Approx(closed).epsilon(1e-3));
  }
  (void)ens;
}

TEST_CASE("two-emitter decay rate") {
  auto lat = lattice(1.0);
  auto ens = two_emitters(-2.04, 0.02, 300, 300);
  double G1 = decay_rate_two_emitters(ens, lat);
  CHECK(G1 > 0.0);
  // exact g^4 proportionality of the closed form
  auto ens2 = ens;
  ens2.g = 0.04;
  CHECK(decay_rate_two_emitters(ens2, lat) == doctest::Approx(16.0 * G1).epsilon(1e-10));
  // separation decays the rate; decay length tracks the bound-state size scale
  auto sep = two_emitters(-2.04, 0.02, 300, 305);
  CHECK(decay_rate_two_emitters(sep, lat) < G1);
  // frozen characteristic value: f(0)^2 rho(K0) at U=1, omega_e = -2.04
  auto tab = tabulate_coupling(lat, ens, 0);
  auto [vg, rho] = bound_states::group_velocity_and_dos(tab.K0, lat);
  (void)vg;
  CHECK(tab.f_values[0] * tab.f_values[0] * rho == doctest::Approx(700.8).epsilon(0.01));
}

TEST_CASE("amplitude tensor structure") {
  auto lat = lattice(1.0);
  // N = 2 same site: all 16 entries equal f(0)^2
  auto ens = two_emitters(-2.04, 0.02, 300, 300);
  auto A2 = amplitude_tensor(ens, lat);
  double f0 = tabulate_coupling(lat, ens, 0).f_values[0];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          CHECK(A2(i, j, k, l).real() == doctest::Approx(f0 * f0).epsilon(1e-12));
          CHECK(A2(i, j, k, l).imag() == doctest::Approx(0.0));
        }

  // N = 4, equal spacing x
  EmitterEnsemble e4;
  e4.N = 4;
  int x = 2;
  e4.positions = {300, 300 + x, 300 + 2 * x, 300 + 3 * x};
  e4.omega_e = -2.04;
  e4.g = 0.02;
  auto A4 = amplitude_tensor(e4, lat);
  auto tab = tabulate_coupling(lat, e4, 3 * x);
  // pair centers coincide for (1,4) and (2,3): zero phase
  CHECK(A4(0, 3, 1, 2).imag() == doctest::Approx(0.0));
  CHECK(A4(0, 3, 1, 2).real() == doctest::Approx(tab.f(3 * x) * tab.f(x)).epsilon(1e-12));
  // pair-index symmetries
  CHECK(A4(0, 2, 1, 3) == A4(2, 0, 1, 3));
  CHECK(A4(0, 2, 1, 3) == A4(0, 2, 3, 1));
  // unit-modulus factorization
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      double fij = tab.f(e4.positions[i] - e4.positions[1]);
      double fkl = tab.f(e4.positions[k] - e4.positions[2]);
      if (std::abs(fij * fkl) > 1e-14)
        CHECK(std::abs(A4(i, 1, k, 2) / (fij * fkl)) == doctest::Approx(1.0).epsilon(1e-10));
    }
  // Re A is rank 2 for equal spacing and PSD in general
  Eigen::MatrixXd ReA = A4.pair_matrix.real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (ReA + ReA.transpose()));
  auto ev = es.eigenvalues();
  double scale = ev.cwiseAbs().maxCoeff();
  int rank = 0;
  for (int i = 0; i < ev.size(); ++i) {
    CHECK(ev(i) > -1e-10 * scale);  // PSD
    if (std::abs(ev(i)) > 1e-10 * scale) ++rank;
  }
  CHECK(rank == 2);
}

TEST_CASE("photonic fraction and single-emitter rate") {
  LatticeParams lat = lattice(1.0);
  lat.kappa = 3e-4;
  EmitterEnsemble e1;
  e1.N = 1;
  e1.positions = {300};
  e1.g = 0.02;
  e1.omega_e = -2.04;  // delta0 = 0.04
  auto pf = photonic_fraction(e1, lat);
  CHECK(pf.sin2_theta == doctest::Approx(0.012405).epsilon(1e-3));
  CHECK(pf.E_bound < lat.band_min());
  // dressed state stays near the bare emitter for weak coupling
  CHECK(std::abs(pf.E_bound - e1.omega_e) < 0.01);
  auto rate = single_emitter_rate(e1, lat);
  CHECK(rate.Gamma1 == doctest::Approx(pf.sin2_theta * lat.kappa).epsilon(1e-12));
  CHECK(rate.Gamma1 == doctest::Approx(3.72e-6).epsilon(0.01));
  CHECK(rate.precondition_ok);

  // limit delta0 >> g, delta0 << 2J: sin^2 -> g^2 / (4 sqrt(J delta0^3))
  EmitterEnsemble e2 = e1;
  e2.g = 1e-4;
  e2.omega_e = -2.01;  // delta0 = 0.01
  auto pf2 = photonic_fraction(e2, lattice(1.0));
  CHECK(pf2.sin2_theta ==
        doctest::Approx(e2.g * e2.g / (4.0 * std::sqrt(std::pow(0.01, 3)))).epsilon(0.1));
  // far-detuned limit: sin^2 -> g^2 / delta0^2
  EmitterEnsemble e3 = e1;
  e3.g = 0.1;
  e3.omega_e = -52.0;  // delta0 = 50
  auto pf3 = photonic_fraction(e3, lattice(1.0));
  CHECK(pf3.sin2_theta == doctest::Approx(e3.g * e3.g / 2500.0).epsilon(0.1));
  // T1 contribution
  EmitterEnsemble e4 = e1;
  e4.T1 = 1e6;
  CHECK(single_emitter_rate(e4, lat).Gamma1 ==
        doctest::Approx(1e-6 + pf.sin2_theta * lat.kappa).epsilon(1e-10));
  // kappa = 0, no T1: zero rate
  CHECK(single_emitter_rate(e1, lattice(1.0)).Gamma1 == doctest::Approx(0.0));
}

TEST_CASE("Markov diagnostic") {
  auto lat = lattice(1.0);
  auto ens = two_emitters(-2.04, 0.02, 300, 300);
  auto d = markov_check(ens, lat);
  CHECK(d.lhs == doctest::Approx(4e-4));
  CHECK(d.valid);
  CHECK(d.ratio < 0.01);
  auto strong = two_emitters(-2.04, 0.9, 300, 300);
  CHECK(!markov_check(strong, lat).valid);
  // Delta n penalty applies only for N > 2 extended ensembles
  EmitterEnsemble e4;
  e4.N = 4;
  e4.positions = {300, 304, 308, 312};
  e4.omega_e = -2.04;
  e4.g = 0.02;
  auto d4 = markov_check(e4, lat);
  CHECK(d4.rhs == doctest::Approx(d.rhs / 12.0).epsilon(1e-12));
}
