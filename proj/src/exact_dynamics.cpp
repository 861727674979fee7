// exact_dynamics.cpp — Lawson-RK4 momentum-space model, plain RK4 real-space
// model, single-emitter dynamics and log-linear rate fits.
#include "pairwave/exact_dynamics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "pairwave/bound_states.hpp"

namespace pairwave::exact_dynamics {

namespace {

constexpr double kPi = 3.14159265358979323846;
using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
constexpr cd kMi(0.0, -1.0);  // -i

// ring momenta 2 pi j / N mapped to (-pi, pi]
std::vector<double> ring_momenta(int N) {
  std::vector<double> k(N);
  for (int j = 0; j < N; ++j) {
    double kj = 2.0 * kPi * j / N;
    k[j] = (kj > kPi) ? kj - 2.0 * kPi : kj;
  }
  return k;
}

int sample_stride(double dt, double sample_dt) {
  int s = static_cast<int>(std::lround(sample_dt / dt));
  return s < 1 ? 1 : s;
}

// one Lawson (integrating-factor) RK4 step for u' = -i Lambda u + N(u) with
// E1 = exp(-i Lambda dt), E2 = exp(-i Lambda dt/2) and N the coupling map
template <typename Rhs>
void lawson_step(const Vec& E1, const Vec& E2, double dt, Rhs&& rhs, Vec& u, Vec& y1, Vec& y2,
                 Vec& y3, Vec& y4, Vec& w) {
  rhs(u, y1);
  w = E2.cwiseProduct(u + (0.5 * dt) * y1);
  rhs(w, y2);
  w = E2.cwiseProduct(u) + (0.5 * dt) * y2;
  rhs(w, y3);
  w = E1.cwiseProduct(u) + dt * E2.cwiseProduct(y3);
  rhs(w, y4);
  u = E1.cwiseProduct(u) +
      (dt / 6.0) * (E1.cwiseProduct(y1) + 2.0 * E2.cwiseProduct(y2 + y3) + y4);
}

struct BoundTable {
  Eigen::VectorXd psi0, inv_lambda;  // per K; inv_lambda = +inf marks K = +-pi
};

BoundTable bound_table(const std::vector<double>& K, const LatticeParams& lat) {
  int N = static_cast<int>(K.size());
  BoundTable t;
  t.psi0.resize(N);
  t.inv_lambda.resize(N);
  for (int j = 0; j < N; ++j) {
    double JK = std::abs(lat.J * std::cos(0.5 * K[j]));
    if (JK < 1e-14 * lat.J) {
      t.psi0[j] = 1.0;
      t.inv_lambda[j] = infinity;
    } else {
      double il = std::asinh(lat.U / (4.0 * JK));
      t.psi0[j] = std::sqrt(std::tanh(il));
      t.inv_lambda[j] = il;
    }
  }
  return t;
}

double psi_of(const BoundTable& t, int j, int abs_r) {
  if (std::isinf(t.inv_lambda[j])) return abs_r == 0 ? 1.0 : 0.0;
  return t.psi0[j] * std::exp(-abs_r * t.inv_lambda[j]);
}

}  // namespace

TimeSeries evolve_momentum_model(const EmitterEnsemble& ens, const LatticeParams& lat,
                                 const EvolveOptions& opt) {
  lat.validate();
  ens.validate(lat);
  if (ens.N != 2) throw ValidationError("evolve_momentum_model: needs N = 2");
  if (lat.dimension != 1) throw ValidationError("evolve_momentum_model: 1D only");
  if (!(opt.t_final > 0.0) || !(opt.sample_dt > 0.0))
    throw ValidationError("evolve_momentum_model: t_final, sample_dt must be > 0");
  double dt = opt.dt > 0.0 ? opt.dt : 0.05;

  const int Nc = lat.N_c;
  const int n1 = ens.positions[0], n2 = ens.positions[1];
  const double g = ens.g;
  auto k = ring_momenta(Nc);
  auto bt = bound_table(k, lat);

  // relative-coordinate truncation of the bound-state cloud
  double lam_max = 1.0 / std::asinh(lat.U / (4.0 * lat.J));
  int r_cut = std::max(8, static_cast<int>(std::ceil(16.2 * lam_max)));
  r_cut = std::min(r_cut, (Nc - 1) / 2);
  const int n_s = 2 * r_cut + 1;

  // diagonal phases
  Vec lambda(1 + 3 * Nc);
  lambda[0] = cd(0.0, 0.0);
  for (int j = 0; j < Nc; ++j) {
    cd dk(lat.omega_c - 2.0 * lat.J * std::cos(k[j]) - ens.omega_e, -0.5 * lat.kappa);
    lambda[1 + j] = dk;
    lambda[1 + Nc + j] = dk;
    lambda[1 + 2 * Nc + j] =
        cd(bound_states::bound_energy_1d(k[j], lat) - 2.0 * ens.omega_e, -lat.kappa);
  }
  Vec E1(lambda.size()), E2(lambda.size());
  for (int i = 0; i < lambda.size(); ++i) {
    E2[i] = std::exp(kMi * lambda[i] * (0.5 * dt));
    E1[i] = E2[i] * E2[i];
  }

  // phase tables: W[a](ri, j) = e^{i K_j (n_a - r/2)} psi_{K_j}(|r|) for the
  // bound-pair channel, V[a](ri, j) = e^{i k_j (r - n_a)} for the photon channel
  Mat W[2], V[2];
  Vec ph[2];  // e^{i k_j n_a}
  const int na[2] = {n1, n2};
  for (int a = 0; a < 2; ++a) {
    W[a].resize(n_s, Nc);
    V[a].resize(n_s, Nc);
    ph[a].resize(Nc);
    for (int j = 0; j < Nc; ++j) ph[a][j] = std::polar(1.0, k[j] * na[a]);
    for (int ri = 0; ri < n_s; ++ri) {
      int r = ri - r_cut;
      for (int j = 0; j < Nc; ++j) {
        W[a](ri, j) = std::polar(psi_of(bt, j, std::abs(r)), k[j] * (na[a] - 0.5 * r));
        V[a](ri, j) = std::polar(1.0, k[j] * (r - na[a]));
      }
    }
  }

  const double pre = g / std::sqrt(double(Nc));
  const double s2n = g * std::sqrt(2.0) / Nc;
  Vec T0(n_s), T1(n_s), F0(n_s), F1(n_s);
  auto rhs = [&](const Vec& u, Vec& du) {
    auto c1 = u.segment(1, Nc);
    auto c2 = u.segment(1 + Nc, Nc);
    auto cK = u.segment(1 + 2 * Nc, Nc);
    // i dc_e = (g/sqrt Nc) sum_k [e^{i k n2} c_1k + e^{i k n1} c_2k]
    du[0] = kMi * pre * (ph[1].cwiseProduct(c1).sum() + ph[0].cwiseProduct(c2).sum());
    // bound-pair feed into the photon channels through M(k, n_a, K)
    T0.noalias() = W[0] * cK;
    T1.noalias() = W[1] * cK;
    du.segment(1, Nc) = kMi * (pre * u[0] * ph[1].conjugate() + s2n * (V[0].transpose() * T0));
    du.segment(1 + Nc, Nc) =
        kMi * (pre * u[0] * ph[0].conjugate() + s2n * (V[1].transpose() * T1));
    // photon channels feed the bound pairs through M*(k, n_a, K)
    F0.noalias() = V[0].conjugate() * c1;
    F1.noalias() = V[1].conjugate() * c2;
    du.segment(1 + 2 * Nc, Nc) = kMi * s2n * (W[0].adjoint() * F0 + W[1].adjoint() * F1);
  };

  Vec u = Vec::Zero(1 + 3 * Nc);
  u[0] = cd(1.0, 0.0);
  Vec y1(u.size()), y2(u.size()), y3(u.size()), y4(u.size()), w(u.size());

  TimeSeries out;
  const int n_steps = static_cast<int>(std::ceil(opt.t_final / dt - 1e-9));
  const int stride = sample_stride(dt, opt.sample_dt);
  auto record = [&](double t) {
    double we = std::norm(u[0]);
    double w1 = u.segment(1, 2 * Nc).squaredNorm();
    double w2 = u.segment(1 + 2 * Nc, Nc).squaredNorm();
    out.t.push_back(t);
    out.P_e.push_back((2.0 * we + w1) / 2.0);
    out.norm_e.push_back(we);
    out.norm_1ph.push_back(w1);
    out.norm_2ph.push_back(w2);
    if (lat.kappa == 0.0 && std::abs(we + w1 + w2 - 1.0) > 1e-6)
      throw NumericsError("evolve_momentum_model: norm drift exceeds 1e-6 at kappa = 0");
  };
  record(0.0);
  for (int s = 1; s <= n_steps; ++s) {
    lawson_step(E1, E2, dt, rhs, u, y1, y2, y3, y4, w);
    if (s % stride == 0 || s == n_steps) record(s * dt);
  }
  return out;
}

TimeSeries evolve_realspace_model(const EmitterEnsemble& ens, const LatticeParams& lat,
                                  const EvolveOptions& opt) {
  lat.validate();
  ens.validate(lat);
  if (ens.N != 2) throw ValidationError("evolve_realspace_model: needs N = 2");
  if (lat.dimension != 1) throw ValidationError("evolve_realspace_model: 1D only");
  if (!(opt.t_final > 0.0) || !(opt.sample_dt > 0.0))
    throw ValidationError("evolve_realspace_model: t_final, sample_dt must be > 0");
  double dt = opt.dt > 0.0 ? opt.dt : 0.025;

  const int Nc = lat.N_c;
  const int n1 = ens.positions[0], n2 = ens.positions[1];
  const double g = ens.g, J = lat.J, U = lat.U;
  const cd d1(lat.omega_c - ens.omega_e, -0.5 * lat.kappa);
  const cd d2(2.0 * (lat.omega_c - ens.omega_e), -lat.kappa);
  const double gs = g / std::sqrt(2.0), g2 = g * std::sqrt(2.0);

  const Eigen::Index len = 1 + 2 * Nc + Eigen::Index(Nc) * Nc;
  auto rhs = [&](const Vec& u, Vec& du) {
    const cd ce = u[0];
    const cd* c1 = u.data() + 1;
    const cd* c2 = u.data() + 1 + Nc;
    const cd* P = u.data() + 1 + 2 * Nc;
    cd* dc1 = du.data() + 1;
    cd* dc2 = du.data() + 1 + Nc;
    cd* D = du.data() + 1 + 2 * Nc;
    du[0] = kMi * g * (c1[n2] + c2[n1]);
    for (int n = 0; n < Nc; ++n) {
      int np = (n + 1 == Nc) ? 0 : n + 1, nm = (n == 0) ? Nc - 1 : n - 1;
      dc1[n] = kMi * (d1 * c1[n] - J * (c1[np] + c1[nm]) + g2 * P[std::size_t(n) * Nc + n1]);
      dc2[n] = kMi * (d1 * c2[n] - J * (c2[np] + c2[nm]) + g2 * P[std::size_t(n) * Nc + n2]);
    }
    dc1[n2] += kMi * g * ce;
    dc2[n1] += kMi * g * ce;
    // two-photon stencil, column m contiguous (Psi stored column-major)
    for (int m = 0; m < Nc; ++m) {
      const cd* pm = P + std::size_t(m) * Nc;
      const cd* pl = P + std::size_t(m == 0 ? Nc - 1 : m - 1) * Nc;
      const cd* pr = P + std::size_t(m + 1 == Nc ? 0 : m + 1) * Nc;
      cd* o = D + std::size_t(m) * Nc;
      o[0] = kMi * (d2 * pm[0] - J * (pm[1] + pm[Nc - 1] + pl[0] + pr[0]));
      for (int n = 1; n < Nc - 1; ++n)
        o[n] = kMi * (d2 * pm[n] - J * (pm[n + 1] + pm[n - 1] + pl[n] + pr[n]));
      o[Nc - 1] = kMi * (d2 * pm[Nc - 1] - J * (pm[0] + pm[Nc - 2] + pl[Nc - 1] + pr[Nc - 1]));
      o[m] += kMi * (-U) * pm[m];
    }
    // emission sources: row/column n_i of Psi
    cd* colA = D + std::size_t(n1) * Nc;
    cd* colB = D + std::size_t(n2) * Nc;
    for (int n = 0; n < Nc; ++n) {
      cd s1 = kMi * gs * c1[n], s2 = kMi * gs * c2[n];
      colA[n] += s1;
      D[std::size_t(n) * Nc + n1] += s1;
      colB[n] += s2;
      D[std::size_t(n) * Nc + n2] += s2;
    }
  };

  Vec u = Vec::Zero(len);
  u[0] = cd(1.0, 0.0);
  Vec k1(len), k2(len), k3(len), k4(len), w(len);

  TimeSeries out;
  const int n_steps = static_cast<int>(std::ceil(opt.t_final / dt - 1e-9));
  const int stride = sample_stride(dt, opt.sample_dt);
  auto record = [&](double t) {
    double we = std::norm(u[0]);
    double w1 = u.segment(1, 2 * Nc).squaredNorm();
    double w2 = u.tail(Eigen::Index(Nc) * Nc).squaredNorm();
    out.t.push_back(t);
    out.P_e.push_back((2.0 * we + w1) / 2.0);
    out.norm_e.push_back(we);
    out.norm_1ph.push_back(w1);
    out.norm_2ph.push_back(w2);
    if (lat.kappa == 0.0 && std::abs(we + w1 + w2 - 1.0) > 1e-6)
      throw NumericsError("evolve_realspace_model: norm drift exceeds 1e-6 at kappa = 0");
  };
  record(0.0);
  for (int s = 1; s <= n_steps; ++s) {
    rhs(u, k1);
    w = u + (0.5 * dt) * k1;
    rhs(w, k2);
    w = u + (0.5 * dt) * k2;
    rhs(w, k3);
    w = u + dt * k3;
    rhs(w, k4);
    u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (s % stride == 0 || s == n_steps) record(s * dt);
  }
  return out;
}

TimeSeries evolve_single_emitter(const EmitterEnsemble& ens, const LatticeParams& lat,
                                 const EvolveOptions& opt) {
  lat.validate();
  ens.validate(lat);
  if (ens.N != 1) throw ValidationError("evolve_single_emitter: needs N = 1");
  if (lat.dimension != 1) throw ValidationError("evolve_single_emitter: 1D only");
  if (!(opt.t_final > 0.0) || !(opt.sample_dt > 0.0))
    throw ValidationError("evolve_single_emitter: t_final, sample_dt must be > 0");
  double dt = opt.dt > 0.0 ? opt.dt : 0.1;

  const int Nc = lat.N_c;
  const int n0 = ens.positions[0];
  auto k = ring_momenta(Nc);
  Vec lambda(1 + Nc), phn(Nc);
  lambda[0] = cd(0.0, 0.0);
  for (int j = 0; j < Nc; ++j) {
    lambda[1 + j] =
        cd(lat.omega_c - 2.0 * lat.J * std::cos(k[j]) - ens.omega_e, -0.5 * lat.kappa);
    phn[j] = std::polar(1.0, k[j] * n0);
  }
  Vec E1(lambda.size()), E2(lambda.size());
  for (int i = 0; i < lambda.size(); ++i) {
    E2[i] = std::exp(kMi * lambda[i] * (0.5 * dt));
    E1[i] = E2[i] * E2[i];
  }
  const double pre = ens.g / std::sqrt(double(Nc));
  auto rhs = [&](const Vec& u, Vec& du) {
    du[0] = kMi * pre * phn.cwiseProduct(u.segment(1, Nc)).sum();
    du.segment(1, Nc) = (kMi * pre * u[0]) * phn.conjugate();
  };

  Vec u = Vec::Zero(1 + Nc);
  u[0] = cd(1.0, 0.0);
  Vec y1(u.size()), y2(u.size()), y3(u.size()), y4(u.size()), w(u.size());
  TimeSeries out;
  const int n_steps = static_cast<int>(std::ceil(opt.t_final / dt - 1e-9));
  const int stride = sample_stride(dt, opt.sample_dt);
  auto record = [&](double t) {
    double we = std::norm(u[0]);
    double w1 = u.segment(1, Nc).squaredNorm();
    out.t.push_back(t);
    out.P_e.push_back(we);
    out.norm_e.push_back(we);
    out.norm_1ph.push_back(w1);
    out.norm_2ph.push_back(0.0);
    if (lat.kappa == 0.0 && std::abs(we + w1 - 1.0) > 1e-6)
      throw NumericsError("evolve_single_emitter: norm drift exceeds 1e-6 at kappa = 0");
  };
  record(0.0);
  for (int s = 1; s <= n_steps; ++s) {
    lawson_step(E1, E2, dt, rhs, u, y1, y2, y3, y4, w);
    if (s % stride == 0 || s == n_steps) record(s * dt);
  }
  return out;
}

DecayFit fit_decay_rate(const TimeSeries& series, double t_lo, double t_hi) {
  if (!(t_lo < t_hi)) throw ValidationError("fit_decay_rate: needs t_lo < t_hi");
  std::vector<double> ts, ys;
  DecayFit fit;
  double prev = -1.0;
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    if (series.t[i] < t_lo || series.t[i] > t_hi) continue;
    double p = series.P_e[i];
    if (!(p > 0.0)) {
      fit.flagged = true;
      continue;
    }
    if (prev > 0.0 && p > prev * 1.01) fit.flagged = true;
    prev = p;
    ts.push_back(series.t[i]);
    ys.push_back(std::log(p));
  }
  if (ts.size() < 4) throw ValidationError("fit_decay_rate: fewer than 4 samples in window");
  double n = double(ts.size()), st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sy += ys[i];
    stt += ts[i] * ts[i];
    sty += ts[i] * ys[i];
  }
  double slope = (n * sty - st * sy) / (n * stt - st * st);
  double icpt = (sy - slope * st) / n;
  fit.rate = -slope;
  double ss = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double r = ys[i] - (icpt + slope * ts[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace pairwave::exact_dynamics
