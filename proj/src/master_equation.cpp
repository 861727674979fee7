// master_equation.cpp — pair-operator Lindblad generator and dense evolution.
#include "pairwave/master_equation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "pairwave/coupling.hpp"

namespace pairwave::master_equation {

namespace {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
constexpr cd kI(0.0, 1.0);

int popcount(int b) { return std::popcount(static_cast<unsigned>(b)); }

// scatter lists for L_p rho L_q^+: pairs (a_cleared, a) with mask bits set in a
std::vector<std::pair<int, int>> jump_index(int N, int mask) {
  std::vector<std::pair<int, int>> idx;
  idx.reserve(1 << (N - 2));
  for (int a = 0; a < (1 << N); ++a)
    if ((a & mask) == mask) idx.emplace_back(a ^ mask, a);
  return idx;
}

struct LocalChannels {
  bool active = false;
  Eigen::MatrixXd coef;             // elementwise damping/dephasing coefficients
  std::vector<int> masks;           // per-emitter bits (for the T1 feeding term)
  double g1 = 0.0;
};

void apply_generator(const Generator& gen, const std::vector<std::vector<std::pair<int, int>>>& nz,
                     const LocalChannels& loc, const Mat& rho, Mat& drho) {
  drho.noalias() = -kI * (gen.H_eff * rho);
  drho.noalias() += kI * (rho * gen.H_eff.adjoint());
  const int np = static_cast<int>(gen.pairs.size());
  for (int p = 0; p < np; ++p)
    for (int q = 0; q < np; ++q) {
      double w = gen.Gamma(p, q);
      if (w == 0.0) continue;
      for (auto [a2, a] : nz[p])
        for (auto [b2, b] : nz[q]) drho(a2, b2) += w * rho(a, b);
    }
  if (loc.active) {
    drho.array() += loc.coef.array() * rho.array();
    if (loc.g1 > 0.0)
      for (int m : loc.masks)
        for (int a = 0; a < rho.rows(); ++a) {
          if (a & m) continue;
          for (int b = 0; b < rho.cols(); ++b)
            if (!(b & m)) drho(a, b) += loc.g1 * rho(a | m, b | m);
        }
  }
}

METrajectory evolve_impl(const Generator& gen, const LocalChannels& loc, const Mat& rho0,
                         const EvolveOptions& opt) {
  const int dim = 1 << gen.N;
  if (rho0.rows() != dim || rho0.cols() != dim)
    throw ValidationError("evolve_density_matrix: rho0 dimension mismatch");
  if (std::abs(rho0.trace().real() - 1.0) > 1e-9 || std::abs(rho0.trace().imag()) > 1e-9)
    throw ValidationError("evolve_density_matrix: trace(rho0) != 1");
  if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
    throw ValidationError("evolve_density_matrix: rho0 not Hermitian");
  if (!(opt.t_final > 0.0)) throw ValidationError("evolve_density_matrix: t_final must be > 0");
  if (opt.n_samples < 2) throw ValidationError("evolve_density_matrix: n_samples must be >= 2");

  std::vector<std::vector<std::pair<int, int>>> nz;
  for (auto [i, j] : gen.pairs) nz.push_back(jump_index(gen.N, (1 << i) | (1 << j)));

  double rate_scale = 2.0 * gen.Gamma.diagonal().sum() + (loc.active ? -loc.coef.minCoeff() : 0.0);
  double dt = opt.dt;
  if (dt <= 0.0) {
    dt = opt.t_final / (4.0 * opt.n_samples);
    if (rate_scale > 0.0) dt = std::min(dt, 0.2 / rate_scale);
  }
  const int n_steps = static_cast<int>(std::ceil(opt.t_final / dt - 1e-9));
  const int stride = std::max(1, n_steps / opt.n_samples);

  Mat rho = rho0, k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), w(dim, dim);
  METrajectory out;
  auto record = [&](double t) {
    out.t.push_back(t);
    double pe = 0.0;
    Eigen::VectorXd sec = Eigen::VectorXd::Zero(gen.N + 1);
    for (int b = 0; b < dim; ++b) {
      double pop = rho(b, b).real();
      pe += pop * popcount(b);
      sec[popcount(b)] += pop;
    }
    out.P_e.push_back(pe / gen.N);
    out.purity.push_back((rho * rho).trace().real());
    out.sector_pop.push_back(sec);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()),
                                          Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-7)
      throw NumericsError("evolve_density_matrix: positivity violated beyond 1e-7");
  };
  record(0.0);
  for (int s = 1; s <= n_steps; ++s) {
    apply_generator(gen, nz, loc, rho, k1);
    w = rho + (0.5 * dt) * k1;
    apply_generator(gen, nz, loc, w, k2);
    w = rho + (0.5 * dt) * k2;
    apply_generator(gen, nz, loc, w, k3);
    w = rho + dt * k3;
    apply_generator(gen, nz, loc, w, k4);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (s % stride == 0 || s == n_steps) record(s * dt);
  }
  return out;
}

}  // namespace

Generator build_generator(const EmitterEnsemble& ens, const LatticeParams& lat) {
  ens.validate(lat);
  if (ens.N > 12) throw ValidationError("build_generator: dense representation limited to N <= 12");
  Generator gen;
  gen.N = ens.N;
  const int dim = 1 << ens.N;
  gen.H_eff = Mat::Zero(dim, dim);
  for (int i = 0; i < ens.N; ++i)
    for (int j = i + 1; j < ens.N; ++j) gen.pairs.emplace_back(i, j);
  const int np = static_cast<int>(gen.pairs.size());
  gen.A = Mat::Zero(np, np);
  gen.Gamma = Eigen::MatrixXd::Zero(np, np);
  if (np == 0) return gen;  // N = 1: no pair operator, generator is zero

  int max_sep = ens.positions.back() - ens.positions.front();
  auto tab = coupling::tabulate_coupling(lat, ens, max_sep);
  gen.Gamma0 = tab.Gamma0;
  std::vector<double> f(np), S(np);
  for (int p = 0; p < np; ++p) {
    auto [i, j] = gen.pairs[p];
    f[p] = tab.f(ens.positions[i] - ens.positions[j]);
    S[p] = ens.positions[i] + ens.positions[j];
  }
  for (int p = 0; p < np; ++p)
    for (int q = 0; q < np; ++q)
      gen.A(p, q) = f[p] * f[q] * std::polar(1.0, 0.5 * tab.K0 * std::abs(S[q] - S[p]));
  gen.Gamma = gen.Gamma0 * gen.A.real();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gen.Gamma, Eigen::EigenvaluesOnly);
  double scale = std::max(1e-300, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-9 * scale)
    throw PhysicsError("build_generator: Re A is not positive semidefinite");

  // H_eff = -(i Gamma0 / 2) sum_pq A_pq L_q^+ L_p
  for (int p = 0; p < np; ++p) {
    auto [i, j] = gen.pairs[p];
    int mp = (1 << i) | (1 << j);
    for (int q = 0; q < np; ++q) {
      auto [iq, jq] = gen.pairs[q];
      int mq = (1 << iq) | (1 << jq);
      cd coef = -0.5 * kI * gen.Gamma0 * gen.A(p, q);
      for (int b = 0; b < dim; ++b)
        if ((b & mp) == mp && !((b ^ mp) & mq)) gen.H_eff((b ^ mp) | mq, b) += coef;
    }
  }
  return gen;
}

METrajectory evolve_density_matrix(const Generator& gen, const Mat& rho0,
                                   const EvolveOptions& opt) {
  return evolve_impl(gen, LocalChannels{}, rho0, opt);
}

METrajectory evolve_with_local_channels(const Generator& gen, double T1, double T2, const Mat& rho0,
                                        const EvolveOptions& opt) {
  if (!(T1 > 0.0) || !(T2 > 0.0))
    throw ValidationError("evolve_with_local_channels: T1, T2 must be positive (or infinite)");
  LocalChannels loc;
  loc.g1 = std::isinf(T1) ? 0.0 : 1.0 / T1;
  double gphi = std::isinf(T2) ? 0.0 : 0.5 / T2;
  loc.active = loc.g1 > 0.0 || gphi > 0.0;
  if (!loc.active) return evolve_impl(gen, loc, rho0, opt);
  const int dim = 1 << gen.N;
  loc.coef = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < gen.N; ++i) {
    loc.masks.push_back(1 << i);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) {
        int na = (a >> i) & 1, nb = (b >> i) & 1;
        double za = na ? -1.0 : 1.0, zb = nb ? -1.0 : 1.0;
        loc.coef(a, b) += -0.5 * loc.g1 * (na + nb) + gphi * (za * zb - 1.0);
      }
  }
  return evolve_impl(gen, loc, rho0, opt);
}

EigenmodeReport eigen_analysis(const Generator& gen, int sector) {
  if (sector < 0 || sector > gen.N) throw ValidationError("eigen_analysis: sector out of range");
  EigenmodeReport rep;
  rep.sector = sector;
  for (int b = 0; b < (1 << gen.N); ++b)
    if (popcount(b) == sector) rep.basis_states.push_back(b);
  const int d = static_cast<int>(rep.basis_states.size());
  Mat B(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) B(r, c) = gen.H_eff(rep.basis_states[r], rep.basis_states[c]);

  Eigen::ComplexEigenSolver<Mat> es(B);
  Mat vecs;
  Eigen::VectorXcd vals;
  if (es.info() == Eigen::Success) {
    vals = es.eigenvalues();
    vecs = es.eigenvectors();
  } else {
    Eigen::ComplexSchur<Mat> schur(B);
    vals = schur.matrixT().diagonal();
    vecs = schur.matrixU();
    rep.defective = true;
  }
  double g0 = std::max(gen.Gamma0, 1e-300);
  for (int m = 0; m < d; ++m) {
    Eigenmode mode;
    mode.eigenvalue = vals[m];
    mode.rate = -2.0 * vals[m].imag();
    mode.amplitudes = vecs.col(m);
    mode.dark = std::abs(mode.rate) < 1e-12 * g0;
    mode.subradiant = std::abs(mode.rate) < 1e-2 * g0;
    rep.modes.push_back(std::move(mode));
  }
  std::sort(rep.modes.begin(), rep.modes.end(),
            [](const Eigenmode& a, const Eigenmode& b) { return a.rate < b.rate; });
  return rep;
}

TrapReport semianalytic_trap(const EmitterEnsemble& ens, const LatticeParams& lat) {
  if (ens.N != 4) throw ValidationError("semianalytic_trap: needs N = 4");
  auto gen = build_generator(ens, lat);
  const int np = 6;
  TrapReport rep;

  // spectral decomposition of the decay matrix over pair states
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gen.Gamma);
  Eigen::VectorXd w = es.eigenvalues().reverse();
  Eigen::MatrixXd Y = es.eigenvectors().rowwise().reverse();
  rep.w = w;
  double wmax = std::max(1e-300, w.cwiseAbs().maxCoeff());
  for (int m = 0; m < np; ++m)
    if (w[m] > 1e-10 * wmax) ++rep.rank;

  // two-excitation block of H_eff in the pair basis is -(i Gamma0/2) A
  Eigen::ComplexEigenSolver<Mat> hs(-0.5 * kI * gen.Gamma0 * gen.A);
  std::vector<int> order(np);
  for (int m = 0; m < np; ++m) order[m] = m;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return -2.0 * hs.eigenvalues()[a].imag() < -2.0 * hs.eigenvalues()[b].imag();
  });

  // pair decayed from |eeee>: complement pair within {0,1,2,3}
  std::vector<int> comp(np);
  for (int p = 0; p < np; ++p) {
    auto [i, j] = gen.pairs[p];
    int cm = 0b1111 ^ ((1 << i) | (1 << j));
    for (int q = 0; q < np; ++q) {
      auto [iq, jq] = gen.pairs[q];
      if (((1 << iq) | (1 << jq)) == cm) comp[p] = q;
    }
  }
  Mat Ybar(np, np);  // column m: |Ybar_m>
  for (int m = 0; m < np; ++m)
    for (int p = 0; p < np; ++p) Ybar(comp[p], m) = Y(p, m);

  double wsum = std::max(1e-300, w.sum());
  for (int mi = 0; mi < np; ++mi) {
    Eigen::VectorXcd T = hs.eigenvectors().col(order[mi]).normalized();
    rep.T_eigenvalues.push_back(hs.eigenvalues()[order[mi]]);
    double rg = 0.0, re = 0.0;
    for (int m = 0; m < np; ++m) {
      double ovG = std::norm(T.dot(Y.col(m).cast<cd>()));
      double ovE = std::norm(T.dot(Ybar.col(m).cast<cd>()));
      rg += w[m] * ovG;
      re += w[m] * ovE / wsum;
    }
    rep.R_G.push_back(rg);
    rep.R_E.push_back(re);
  }

  // dark state: slowest mode with a vanishing rate
  double rate0 = -2.0 * hs.eigenvalues()[order[0]].imag();
  if (std::abs(rate0) < 1e-10 * wmax) {
    rep.dark_state = hs.eigenvectors().col(order[0]).normalized();
    int p03 = 2, p12 = 3;  // pairs {0,3} and {1,2} in lexicographic order
    if (std::abs(rep.dark_state[p12]) > 1e-300)
      rep.alpha_over_beta = std::abs(rep.dark_state[p03] / rep.dark_state[p12]);
    if (rep.rank == 2) {
      double ov = std::norm(rep.dark_state.dot(Ybar.col(0).cast<cd>()));
      rep.P_e_infinity = w[0] * ov / (2.0 * (w[0] + w[1]));
    }
  }
  return rep;
}

Eigen::MatrixXcd fully_excited(int N) {
  const int dim = 1 << N;
  Mat rho = Mat::Zero(dim, dim);
  rho(dim - 1, dim - 1) = cd(1.0, 0.0);
  return rho;
}

}  // namespace pairwave::master_equation
