// test_master_equation.cpp — Lindblad structure, calibration and trap analysis.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>

#include "pairwave/coupling.hpp"
#include "pairwave/exact_dynamics.hpp"
#include "pairwave/master_equation.hpp"

using namespace pairwave;
using namespace pairwave::master_equation;

namespace {

LatticeParams lattice(double U, int Nc = 601) {
  LatticeParams lat;
  lat.U = U;
  lat.N_c = Nc;
  return lat;
}

EmitterEnsemble ensemble(std::vector<int> pos, double omega_e, double g) {
  EmitterEnsemble ens;
  ens.N = static_cast<int>(pos.size());
  ens.positions = std::move(pos);
  ens.omega_e = omega_e;
  ens.g = g;
  return ens;
}

exact_dynamics::TimeSeries as_series(const METrajectory& tr) {
  exact_dynamics::TimeSeries s;
  s.t = tr.t;
  s.P_e = tr.P_e;
  return s;
}

Eigen::MatrixXcd random_density(int dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::MatrixXcd M(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) M(i, j) = std::complex<double>(dist(rng), dist(rng));
  Eigen::MatrixXcd rho = M * M.adjoint();
  return rho / rho.trace();
}

}  // namespace

TEST_CASE("generator structure") {
  auto lat = lattice(1.0);
  auto gen = build_generator(ensemble({100, 102, 104, 106}, -2.04, 0.02), lat);
  REQUIRE(gen.pairs.size() == 6);
  CHECK(gen.Gamma0 > 0.0);

  // H_eff conserves excitation number exactly
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b)
      if (std::popcount(unsigned(a)) != std::popcount(unsigned(b)))
        CHECK(std::abs(gen.H_eff(a, b)) == 0.0);

  // anti-Hermitian part negative semidefinite
  Eigen::MatrixXcd D = (gen.H_eff - gen.H_eff.adjoint()) / std::complex<double>(0.0, 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(D);
  CHECK(es.eigenvalues().maxCoeff() < 1e-9 * gen.Gamma0);

  // N = 1: no pair operator
  auto g1 = build_generator(ensemble({100}, -2.04, 0.02), lat);
  CHECK(g1.pairs.empty());
  CHECK(g1.H_eff.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trace preservation and parity on random states") {
  auto lat = lattice(1.0);
  auto gen = build_generator(ensemble({100, 103, 105, 111}, -2.04, 0.02), lat);
  EvolveOptions opt;
  opt.t_final = 2000.0;
  for (unsigned seed : {1u, 2u}) {
    auto tr = evolve_density_matrix(gen, random_density(16, seed), opt);
    for (std::size_t i = 0; i < tr.t.size(); ++i)
      CHECK(tr.sector_pop[i].sum() == doctest::Approx(1.0).epsilon(1e-10));
  }
  // from the fully excited state only even sectors are ever populated
  opt.t_final = 3e4;
  auto tr = evolve_density_matrix(gen, fully_excited(4), opt);
  for (const auto& sec : tr.sector_pop) {
    CHECK(std::abs(sec[1]) < 1e-12);
    CHECK(std::abs(sec[3]) < 1e-12);
  }
  CHECK(tr.sector_pop.back()[0] > 0.01);  // ground sector actually fills
  // ground state is stationary
  Eigen::MatrixXcd ground = Eigen::MatrixXcd::Zero(16, 16);
  ground(0, 0) = 1.0;
  EvolveOptions short_opt;
  short_opt.t_final = 1000.0;
  auto gtr = evolve_density_matrix(gen, ground, short_opt);
  for (double p : gtr.P_e) CHECK(std::abs(p) < 1e-14);
}

TEST_CASE("N = 2 same site: ME rate equals the pair decay rate") {
  auto lat = lattice(1.0);
  auto ens = ensemble({300, 300}, -2.04, 0.02);
  double Gamma = coupling::decay_rate_two_emitters(ens, lat);
  auto gen = build_generator(ens, lat);
  EvolveOptions opt;
  opt.t_final = 2.0 / Gamma;
  opt.dt = opt.t_final / 20000.0;
  auto tr = evolve_density_matrix(gen, fully_excited(2), opt);
  auto fit = exact_dynamics::fit_decay_rate(as_series(tr), 0.0, opt.t_final);
  CHECK(fit.rate == doctest::Approx(Gamma).epsilon(1e-8));
  CHECK(fit.residual < 1e-10);
}

TEST_CASE("N = 2: ME rate within 10% of the exact two-excitation dynamics") {
  auto lat = lattice(4.0);
  auto ens = ensemble({300, 300}, -2.45, 0.05);
  double Gamma_me = coupling::decay_rate_two_emitters(ens, lat);  // = ME rate (previous case)
  exact_dynamics::EvolveOptions opt;
  opt.t_final = 600.0;
  auto s = exact_dynamics::evolve_momentum_model(ens, lat, opt);
  auto fit = exact_dynamics::fit_decay_rate(s, 149.5, 600.5);
  CHECK(Gamma_me == doctest::Approx(fit.rate).epsilon(0.10));
}

TEST_CASE("eigen analysis: sectors, dark state, SM block") {
  auto lat = lattice(1.0);
  int x = 2;
  auto ens = ensemble({100, 102, 104, 106}, -2.04, 0.02);
  auto gen = build_generator(ens, lat);
  auto tab = coupling::tabulate_coupling(lat, ens, 3 * x);
  double fx = tab.f(x), f3x = tab.f(3 * x);

  // single-excitation sector is unaffected by two-photon decay
  auto one = eigen_analysis(gen, 1);
  for (const auto& m : one.modes) {
    CHECK(std::abs(m.rate) < 1e-14 * gen.Gamma0);
    CHECK(m.dark);
  }

  // the {|egge>, |geeg>} block matches -(i Gamma0/2) [[f(3x)^2, f f3],[f f3, f^2]]
  const int b_egge = 0b1001, b_geeg = 0b0110;
  std::complex<double> mi2(0.0, -0.5 * gen.Gamma0);
  CHECK(std::abs(gen.H_eff(b_egge, b_egge) - mi2 * f3x * f3x) < 1e-12 * gen.Gamma0);
  CHECK(std::abs(gen.H_eff(b_geeg, b_geeg) - mi2 * fx * fx) < 1e-12 * gen.Gamma0);
  CHECK(std::abs(gen.H_eff(b_egge, b_geeg) - mi2 * fx * f3x) < 1e-12 * gen.Gamma0);
  // ... and decouples from the other four two-excitation states
  auto two = eigen_analysis(gen, 2);
  int i_egge = -1, i_geeg = -1;
  for (std::size_t i = 0; i < two.basis_states.size(); ++i) {
    if (two.basis_states[i] == b_egge) i_egge = static_cast<int>(i);
    if (two.basis_states[i] == b_geeg) i_geeg = static_cast<int>(i);
  }
  REQUIRE(i_egge >= 0);
  REQUIRE(i_geeg >= 0);

  // exactly one dark two-excitation mode with amplitude ratio f(x)/f(3x) >= 1
  int n_dark = 0;
  for (const auto& m : two.modes) n_dark += m.dark ? 1 : 0;
  CHECK(n_dark == 1);
  const auto& dark = two.modes.front();
  CHECK(dark.dark);
  double ratio = std::abs(dark.amplitudes[i_egge] / dark.amplitudes[i_geeg]);
  CHECK(ratio == doctest::Approx(fx / f3x).epsilon(1e-8));
  CHECK(ratio >= 1.0);
  CHECK(!two.defective);
}

TEST_CASE("semianalytic trap population") {
  auto lat = lattice(1.0);
  auto ens = ensemble({100, 102, 104, 106}, -2.04, 0.02);
  auto rep = semianalytic_trap(ens, lat);
  REQUIRE(rep.rank == 2);
  REQUIRE(rep.P_e_infinity.has_value());
  auto tab = coupling::tabulate_coupling(lat, ens, 6);
  CHECK(rep.alpha_over_beta == doctest::Approx(tab.f(2) / tab.f(6)).epsilon(1e-8));
  // dark state decays nowhere but is pumped from the excited manifold
  CHECK(std::abs(rep.R_G.front()) < 1e-12 * rep.w[0]);
  CHECK(rep.R_E.front() > 1e-3 * rep.w[0] / rep.w.sum());

  // long-time ME plateau matches the closed form (slowest bright mode needs t ~ 1e7)
  auto gen = build_generator(ens, lat);
  EvolveOptions opt;
  opt.t_final = 1e7;
  auto tr = evolve_density_matrix(gen, fully_excited(4), opt);
  CHECK(std::abs(tr.P_e.back() - *rep.P_e_infinity) < 1e-3);
  CHECK(*rep.P_e_infinity > 0.01);  // genuinely trapped population

  // unequal spacing: no exact dark state, only a subradiant one
  auto gen2 = build_generator(ensemble({100, 102, 105, 109}, -2.04, 0.02), lat);
  auto two = eigen_analysis(gen2, 2);
  CHECK(!two.modes.front().dark);
  CHECK(two.modes.front().subradiant);
}

TEST_CASE("local T1/T2 channels") {
  auto lat = lattice(1.0);
  auto ens = ensemble({300, 300}, -2.04, 0.02);
  auto gen = build_generator(ens, lat);
  double Gamma = coupling::decay_rate_two_emitters(ens, lat);
  EvolveOptions opt;
  opt.t_final = 3.0 / Gamma;

  // infinite T1, T2 reduce to the bare evolution
  auto a = evolve_density_matrix(gen, fully_excited(2), opt);
  auto b = evolve_with_local_channels(gen, infinity, infinity, fully_excited(2), opt);
  for (std::size_t i = 0; i < a.t.size(); ++i)
    CHECK(a.P_e[i] == doctest::Approx(b.P_e[i]).epsilon(1e-12));

  // weak local channels barely change the decay but populate odd sectors
  auto c = evolve_with_local_channels(gen, 1.0 / (0.1 * Gamma), 1.0 / (0.2 * Gamma),
                                      fully_excited(2), opt);
  double dev = 0.0, odd = 0.0;
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    dev = std::max(dev, std::abs(a.P_e[i] - c.P_e[i]));
    odd = std::max(odd, c.sector_pop[i][1]);
  }
  CHECK(dev < 0.06);
  CHECK(odd > 1e-3);

  // pure dephasing: populations frozen, purity decays
  Generator zero = gen;
  zero.H_eff.setZero();
  zero.Gamma.setZero();
  Eigen::VectorXcd plus(4);
  plus << 0.5, 0.5, 0.5, 0.5;
  Eigen::MatrixXcd rho0 = plus * plus.adjoint();
  EvolveOptions dopt;
  dopt.t_final = 10.0;
  auto d = evolve_with_local_channels(zero, infinity, 1.0, rho0, dopt);
  for (std::size_t i = 0; i < d.t.size(); ++i)
    CHECK(d.P_e[i] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(d.purity.back() < 0.3);
  CHECK(d.purity.front() == doctest::Approx(1.0).epsilon(1e-12));
}
