// single_cavity.cpp — quanta-sector evolution of the full cavity master
// equation and the effective collective two-photon model.
#include "pairwave/single_cavity.hpp"

#include <cmath>

namespace pairwave::single_cavity {

namespace {

using Cx = std::complex<double>;

// lowering amplitude of S_-^2 out of |S, m>
double c2_of(double S, double m) {
  double a = S * (S + 1.0) - m * (m - 1.0);
  double b = S * (S + 1.0) - (m - 1.0) * (m - 2.0);
  return (m - 2.0 < -S - 1e-9) ? 0.0 : std::sqrt(a * b);
}

// Quanta sectors Q = (excited emitters) + (photons): the block Hamiltonian is
// tridiagonal in the photon number n in [n_lo, min(n_ph_max, Q)], with the
// projection fixed as m = (Q - n) - S. Blocks are stored flat, column-major.
struct Sectors {
  int n_sec = 0, total = 0;
  std::vector<int> off, dim, n_lo;
  std::vector<std::vector<double>> m;    // projection per entry
  std::vector<std::vector<Cx>> lam;      // H diagonal incl. -i/2 loss
  std::vector<std::vector<double>> hop;  // g-coupling to the next photon level
  std::vector<std::vector<double>> w2, w1;  // recycling weights (0 if cut off)
};

Sectors build_sectors(const CavityModel& md) {
  const double S = 0.5 * md.N;
  Sectors sc;
  sc.n_sec = md.N + 1;
  sc.off.resize(sc.n_sec);
  sc.dim.resize(sc.n_sec);
  sc.n_lo.resize(sc.n_sec);
  sc.m.resize(sc.n_sec);
  sc.lam.resize(sc.n_sec);
  sc.hop.resize(sc.n_sec);
  sc.w2.resize(sc.n_sec);
  sc.w1.resize(sc.n_sec);
  for (int Q = 0; Q <= md.N; ++Q) {
    int n_lo = std::max(0, Q - md.N), n_hi = std::min(md.n_ph_max, Q);
    int d = n_hi - n_lo + 1;
    sc.off[Q] = sc.total;
    sc.dim[Q] = d;
    sc.n_lo[Q] = n_lo;
    sc.total += d * d;
    sc.m[Q].resize(d);
    sc.lam[Q].resize(d);
    sc.hop[Q].assign(d > 1 ? d - 1 : 0, 0.0);
    sc.w2[Q].resize(d);
    sc.w1[Q].resize(d);
    for (int i = 0; i < d; ++i) {
      int n = n_lo + i;
      double m = (Q - n) - S;
      sc.m[Q][i] = m;
      // frame rotating at omega_e per quantum: only Delta and U remain
      double e = md.Delta() * n - 0.5 * md.U * n * (n - 1.0);
      double loss = 0.5 * md.kappa2 * n * (n - 1.0) + 0.5 * md.kappa1 * n;
      sc.lam[Q][i] = Cx(e, -loss);
      if (i + 1 < d)  // g (a^+ S_- + a S_+) to (n+1, m-1)
        sc.hop[Q][i] = md.g * std::sqrt(double(n + 1)) *
                       std::sqrt(S * (S + 1.0) - m * (m - 1.0));
      sc.w2[Q][i] = (n + 2 <= md.n_ph_max && Q + 2 <= md.N)
                        ? std::sqrt(double(n + 2) * (n + 1))
                        : 0.0;
      sc.w1[Q][i] = (n + 1 <= md.n_ph_max && Q + 1 <= md.N) ? std::sqrt(double(n + 1)) : 0.0;
    }
  }
  return sc;
}

void cavity_rhs(const CavityModel& md, const Sectors& sc, const Cx* x, Cx* dx) {
  for (int Q = 0; Q < sc.n_sec; ++Q) {
    const int d = sc.dim[Q];
    const Cx* r = x + sc.off[Q];
    Cx* o = dx + sc.off[Q];
    const Cx* lam = sc.lam[Q].data();
    const double* h = sc.hop[Q].data();
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) {
        Cx hr = lam[i] * r[i + j * d];
        if (i > 0) hr += h[i - 1] * r[i - 1 + j * d];
        if (i + 1 < d) hr += h[i] * r[i + 1 + j * d];
        Cx rh = std::conj(lam[j]) * r[i + j * d];
        if (j > 0) rh += h[j - 1] * r[i + (j - 1) * d];
        if (j + 1 < d) rh += h[j] * r[i + (j + 1) * d];
        o[i + j * d] = Cx(0.0, -1.0) * (hr - rh);
      }
    if (Q + 2 < sc.n_sec) {
      const int du = sc.dim[Q + 2], shift = sc.n_lo[Q] + 2 - sc.n_lo[Q + 2];
      const Cx* u = x + sc.off[Q + 2];
      const double* w = sc.w2[Q].data();
      for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
          if (w[i] != 0.0 && w[j] != 0.0)
            o[i + j * d] += md.kappa2 * w[i] * w[j] * u[(i + shift) + (j + shift) * du];
    }
    if (Q + 1 < sc.n_sec && md.kappa1 > 0.0) {
      const int du = sc.dim[Q + 1], shift = sc.n_lo[Q] + 1 - sc.n_lo[Q + 1];
      const Cx* u = x + sc.off[Q + 1];
      const double* w = sc.w1[Q].data();
      for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
          if (w[i] != 0.0 && w[j] != 0.0)
            o[i + j * d] += md.kappa1 * w[i] * w[j] * u[(i + shift) + (j + shift) * du];
    }
  }
}

double auto_dt(const CavityModel& md) {
  const double S = 0.5 * md.N;
  double e_min = 0.0, e_max = 0.0, loss = 0.0;
  for (int n = 0; n <= md.n_ph_max; ++n) {
    double e = md.Delta() * n - 0.5 * md.U * n * (n - 1.0);
    e_min = std::min(e_min, e);
    e_max = std::max(e_max, e);
    loss = std::max(loss, md.kappa2 * n * (n - 1.0) + md.kappa1 * n);
  }
  double coup = 2.0 * md.g * std::sqrt(double(md.n_ph_max)) * std::sqrt(S * (S + 1.0));
  return 0.5 / (e_max - e_min + 2.0 * coup + 2.0 * loss + md.kappa2);
}

struct FullRun {
  std::vector<double> t, Sz;
  Eigen::MatrixXd fock;
};

FullRun run_full(const CavityModel& md, const EvolveOptions& opt, double dt) {
  const Sectors sc = build_sectors(md);
  const double sample_dt = opt.t_final / opt.n_samples;
  const int sub = std::max(1, int(std::ceil(sample_dt / dt - 1e-12)));
  dt = sample_dt / sub;

  Eigen::VectorXcd rho = Eigen::VectorXcd::Zero(sc.total);
  rho[sc.off[md.N]] = 1.0;  // all excited, cavity vacuum (n_lo = 0 in that sector)
  Eigen::VectorXcd k1(sc.total), k2(sc.total), k3(sc.total), k4(sc.total), tmp(sc.total);

  FullRun out;
  out.fock.resize(opt.n_samples + 1, md.n_ph_max + 1);
  auto record = [&](double tk) {
    double sz = 0.0, tr = 0.0;
    Eigen::VectorXd fock = Eigen::VectorXd::Zero(md.n_ph_max + 1);
    for (int Q = 0; Q < sc.n_sec; ++Q) {
      const int d = sc.dim[Q];
      for (int i = 0; i < d; ++i) {
        double pop = rho[sc.off[Q] + i * (d + 1)].real();
        tr += pop;
        sz += sc.m[Q][i] * pop;
        fock[sc.n_lo[Q] + i] += pop;
      }
      Eigen::Map<const Eigen::MatrixXcd> blk(rho.data() + sc.off[Q], d, d);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(blk);
      if (es.eigenvalues().minCoeff() < -1e-7)
        throw NumericsError("evolve_full_cavity: positivity violated");
    }
    if (std::abs(tr - 1.0) > 1e-8)
      throw NumericsError("evolve_full_cavity: trace drifted beyond 1e-8");
    out.fock.row(out.t.size()) = fock.transpose();
    out.t.push_back(tk);
    out.Sz.push_back(sz);
  };
  record(0.0);

  for (int k = 1; k <= opt.n_samples; ++k) {
    for (int q = 0; q < sub; ++q) {
      cavity_rhs(md, sc, rho.data(), k1.data());
      tmp = rho + (0.5 * dt) * k1;
      cavity_rhs(md, sc, tmp.data(), k2.data());
      tmp = rho + (0.5 * dt) * k2;
      cavity_rhs(md, sc, tmp.data(), k3.data());
      tmp = rho + dt * k3;
      cavity_rhs(md, sc, tmp.data(), k4.data());
      rho += (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
    }
    record(k * sample_dt);
  }
  return out;
}

}  // namespace

CavityTrajectory evolve_full_cavity(const CavityModel& model, const EvolveOptions& opt) {
  model.validate();
  if (!(opt.t_final > 0.0)) throw ValidationError("evolve_full_cavity: t_final must be > 0");

  const double dt = opt.dt > 0.0 ? opt.dt : auto_dt(model);
  FullRun run = run_full(model, opt, dt);
  if (opt.check_cutoff) {
    CavityModel wider = model;
    wider.n_ph_max += 1;
    FullRun check = run_full(wider, opt, dt);  // same step: shift is pure truncation
    double dev = 0.0;
    for (std::size_t k = 0; k < run.Sz.size(); ++k)
      dev = std::max(dev, std::abs(run.Sz[k] - check.Sz[k]));
    // threshold scales with the observable range N/2
    if (dev >= 1e-4 * std::max(1.0, 0.5 * model.N))
      throw NumericsError("evolve_full_cavity: Fock cutoff not converged (shift " +
                          std::to_string(dev) + ")");
  }

  CavityTrajectory tr;
  tr.t = std::move(run.t);
  tr.Sz = std::move(run.Sz);
  tr.fock_pop = std::move(run.fock);
  return tr;
}

EffectiveRate effective_rate(const CavityModel& model) {
  model.validate();
  if (model.Delta() == 0.0)
    throw PhysicsError("effective_rate: Delta = 0, no adiabatic elimination");
  double G = std::sqrt(2.0) * model.g * model.g / model.Delta();
  double delta = model.omega_e - model.omega_c + 0.5 * model.U;
  EffectiveRate er;
  er.A = G * G / Cx(model.kappa2, -2.0 * delta);
  er.Gamma = 2.0 * er.A.real();
  return er;
}

CavityTrajectory evolve_effective_cavity(const CavityModel& model, const EvolveOptions& opt) {
  model.validate();
  if (!(opt.t_final > 0.0))
    throw ValidationError("evolve_effective_cavity: t_final must be > 0");
  const auto er = effective_rate(model);
  const int D = model.N + 1;
  const double S = 0.5 * model.N;
  Eigen::VectorXd c(D);  // S_-^2 amplitude out of each projection
  for (int i = 0; i < D; ++i) c[i] = c2_of(S, i - S);

  double dt = opt.dt;
  if (dt <= 0.0) dt = 0.05 / (std::abs(er.A) * c.cwiseAbs2().maxCoeff() + 1e-300);
  const double sample_dt = opt.t_final / opt.n_samples;
  const int sub = std::max(1, int(std::ceil(sample_dt / dt - 1e-12)));
  dt = sample_dt / sub;

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(D, D);
  rho(D - 1, D - 1) = 1.0;
  auto rhs = [&](const Eigen::MatrixXcd& r, Eigen::MatrixXcd& dr) {
    for (int j = 0; j < D; ++j)
      for (int i = 0; i < D; ++i) {
        Cx v = -(er.A * (c[i] * c[i]) + std::conj(er.A) * (c[j] * c[j])) * r(i, j);
        if (i + 2 < D && j + 2 < D)
          v += 2.0 * er.A.real() * c[i + 2] * c[j + 2] * r(i + 2, j + 2);
        dr(i, j) = v;
      }
  };

  CavityTrajectory tr;
  auto record = [&](double tk) {
    double sz = 0.0, trace = 0.0;
    for (int i = 0; i < D; ++i) {
      sz += (i - S) * rho(i, i).real();
      trace += rho(i, i).real();
    }
    if (std::abs(trace - 1.0) > 1e-8)
      throw NumericsError("evolve_effective_cavity: trace drifted beyond 1e-8");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    if (es.eigenvalues().minCoeff() < -1e-7)
      throw NumericsError("evolve_effective_cavity: positivity violated");
    tr.t.push_back(tk);
    tr.Sz.push_back(sz);
  };
  record(0.0);

  Eigen::MatrixXcd q1(D, D), q2(D, D), q3(D, D), q4(D, D), tmp(D, D);
  for (int k = 1; k <= opt.n_samples; ++k) {
    for (int q = 0; q < sub; ++q) {
      rhs(rho, q1);
      tmp = rho + (0.5 * dt) * q1;
      rhs(tmp, q2);
      tmp = rho + (0.5 * dt) * q2;
      rhs(tmp, q3);
      tmp = rho + dt * q3;
      rhs(tmp, q4);
      rho += (dt / 6.0) * (q1 + 2.0 * (q2 + q3) + q4);
    }
    record(k * sample_dt);
  }
  return tr;
}

ValidityReport validity_bound(const CavityModel& model, int N) {
  if (N < 1) throw ValidationError("validity_bound: N must be >= 1");
  ValidityReport rep;
  rep.Gamma = model.g > 0.0 ? effective_rate(model).Gamma : 0.0;
  rep.ratio = rep.Gamma * double(N) * N * N / model.kappa2;
  rep.pass = rep.ratio <= 1.0;
  return rep;
}

}  // namespace pairwave::single_cavity
