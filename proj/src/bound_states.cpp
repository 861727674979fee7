// bound_states.cpp — closed forms in 1D; graded quadrature + bisection for d > 1.
#include "pairwave/bound_states.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pairwave::bound_states {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Gauss-Legendre nodes/weights on [-1, 1] (Newton on the Legendre recurrence).
struct GaussRule {
  std::vector<double> x, w;
  explicit GaussRule(int n) : x(n), w(n) {
    for (int i = 0; i < n; ++i) {
      double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double p0 = 0, p1 = 0;
      for (int it = 0; it < 100; ++it) {
        p0 = 1.0;
        p1 = t;
        for (int j = 2; j <= n; ++j) {
          double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        double dt = p1 / dp;
        t -= dt;
        if (std::abs(dt) < 1e-15) break;
      }
      // recompute derivative at the converged node
      p0 = 1.0;
      p1 = t;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      x[i] = t;
      w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
  }
};

// integrate f over [a, b] with an n-point Gauss rule
template <class F>
double gauss(const F& f, double a, double b, const GaussRule& gr) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a), s = 0.0;
  for (std::size_t i = 0; i < gr.x.size(); ++i) s += gr.w[i] * f(mid + half * gr.x[i]);
  return s * half;
}

double j_of_K(double K, const LatticeParams& lat) { return lat.J * std::cos(0.5 * K); }

// effective per-axis hoppings J_{K_alpha}, with near-zero axes dropped
std::vector<double> effective_hoppings(const std::vector<double>& K_vec,
                                       const LatticeParams& lat) {
  std::vector<double> Js;
  for (double K : K_vec) {
    double JK = std::abs(j_of_K(K, lat));
    if (JK > 1e-14 * lat.J) Js.push_back(JK);
  }
  return Js;
}

// 1/pi Int_0^q0 dq h(q) with the q ~ sqrt(binding depth) region resolved by a
// sinh substitution; the integrand's near-edge scale is sqrt(c).
template <class F>
double graded_half_line(const F& h, double c, double q0, const GaussRule& gr) {
  double u_max = std::asinh(q0 / std::sqrt(c));
  auto g = [&](double u) {
    double q = std::sqrt(c) * std::sinh(u);
    return h(q) * std::sqrt(c) * std::cosh(u);
  };
  return gauss(g, 0.0, u_max, gr);
}

// I(b) = (2pi)^-d Int d^dq / (A - 4 Sum J_a cos q_a), A = 4 Sum J_a + b, for the
// reduced dimension list Js (innermost axis integrated analytically). Strictly
// decreasing in the binding depth b > 0; diverges as b -> 0 in 2D, finite in 3D.
double binding_integral(const std::vector<double>& Js, double b) {
  const int d = static_cast<int>(Js.size());
  if (d == 0) return 1.0 / b;  // no dispersive axis left: A = b
  if (d == 1) return 1.0 / std::sqrt(b * (b + 8.0 * Js[0]));
  static const GaussRule gr(200);
  // depth above the continuum floor, cancellation-free: s = b + 4 Sum J_a (1 - cos q_a)
  auto depth1 = [](double b0, double J, double q) {
    double s = std::sin(0.5 * q);
    return b0 + 8.0 * J * s * s;
  };
  if (d == 2) {
    const double J1 = Js[0], J2 = Js[1];
    auto h = [&](double q) {
      double s = depth1(b, J1, q);
      return 1.0 / std::sqrt(s * (s + 8.0 * J2));
    };
    const double q0 = 0.5, c = std::max(b, 1e-300) / (2.0 * J1);
    double I = graded_half_line(h, c, q0, gr) + gauss(h, q0, kPi, gr);
    return I / kPi;
  }
  // d == 3: tensor product of the graded 1D node sets over (q1, q2)
  const double J1 = Js[0], J2 = Js[1], J3 = Js[2];
  auto nodes_1d = [&](double J) {
    std::vector<std::pair<double, double>> nw;  // (q, weight)
    const double q0 = 0.5, c = std::max(b, 1e-300) / (2.0 * J);
    double u_max = std::asinh(q0 / std::sqrt(c));
    for (std::size_t i = 0; i < gr.x.size(); ++i) {
      double u = 0.5 * u_max * (1.0 + gr.x[i]);
      double q = std::sqrt(c) * std::sinh(u);
      nw.emplace_back(q, 0.5 * u_max * gr.w[i] * std::sqrt(c) * std::cosh(u));
    }
    double mid = 0.5 * (q0 + kPi), half = 0.5 * (kPi - q0);
    for (std::size_t i = 0; i < gr.x.size(); ++i)
      nw.emplace_back(mid + half * gr.x[i], half * gr.w[i]);
    return nw;
  };
  auto n1 = nodes_1d(J1), n2 = nodes_1d(J2);
  double I = 0.0;
  for (const auto& [q1, w1] : n1) {
    double s1 = depth1(b, J1, q1);
    double part = 0.0;
    for (const auto& [q2, w2] : n2) {
      double s = depth1(s1, J2, q2);
      part += w2 / std::sqrt(s * (s + 8.0 * J3));
    }
    I += w1 * part;
  }
  return I / (kPi * kPi);
}

}  // namespace

double bound_energy_1d(double K, const LatticeParams& lat) {
  double JK = j_of_K(K, lat);
  return 2.0 * lat.omega_c - std::sqrt(lat.U * lat.U + 16.0 * JK * JK);
}

double bound_wavefunction_1d(double K, int r, const LatticeParams& lat) {
  double JK = std::abs(j_of_K(K, lat));
  if (JK < 1e-14 * lat.J) return r == 0 ? 1.0 : 0.0;  // K = +-pi: fully localized
  double inv_lambda = std::asinh(lat.U / (4.0 * JK));
  return std::sqrt(std::tanh(inv_lambda)) * std::exp(-std::abs(r) * inv_lambda);
}

BoundState bound_state_1d(double K, const LatticeParams& lat) {
  BoundState bs;
  bs.K = K;
  bs.energy = bound_energy_1d(K, lat);
  double JK = std::abs(j_of_K(K, lat));
  bs.lambda_K = JK < 1e-14 * lat.J ? 0.0 : 1.0 / std::asinh(lat.U / (4.0 * JK));
  bs.psi0 = bound_wavefunction_1d(K, 0, lat);
  return bs;
}

std::pair<double, double> group_velocity_and_dos(double K, const LatticeParams& lat) {
  if (!(K > 0.0 && K < kPi))
    throw PhysicsError("group_velocity_and_dos: K at a band edge (divergent DOS); detune K into (0, pi)");
  double JK = j_of_K(K, lat);
  double vg = 4.0 * lat.J * lat.J * std::sin(K) / std::sqrt(lat.U * lat.U + 16.0 * JK * JK);
  return {vg, lat.J / vg};
}

double binding_residual(double E, const std::vector<double>& K_vec, const LatticeParams& lat) {
  if (static_cast<int>(K_vec.size()) != lat.dimension)
    throw ValidationError("binding_residual: K_vec size must equal lattice dimension");
  const int d = lat.dimension;
  const double Ep = E - 2.0 * lat.omega_c;
  std::vector<double> Js;
  double sumJ = 0.0;
  for (double K : K_vec) {
    Js.push_back(j_of_K(K, lat));
    sumJ += std::abs(Js.back());
  }
  if (Ep + 4.0 * sumJ >= 0.0)
    throw PhysicsError("binding_residual: pole in integrand (E inside the two-photon continuum)");

  // tensor-product trapezoid (= grid mean for a periodic integrand), doubled
  // until the relative change settles
  auto eval = [&](int n) {
    double s = 0.0;
    std::vector<int> idx(d, 0);
    std::vector<double> cosq(n);
    for (int i = 0; i < n; ++i) cosq[i] = std::cos(2.0 * kPi * i / n - kPi);
    long total = 1;
    for (int a = 0; a < d; ++a) total *= n;
    for (long t = 0; t < total; ++t) {
      long rem = t;
      double den = Ep;
      for (int a = 0; a < d; ++a) {
        den += 4.0 * Js[a] * cosq[rem % n];
        rem /= n;
      }
      s += 1.0 / den;
    }
    return s / total;
  };
  const int n_max = d == 1 ? 1 << 16 : (d == 2 ? 1 << 11 : 1 << 7);
  double prev = eval(16), achieved = infinity;
  for (int n = 32; n <= n_max; n *= 2) {
    double cur = eval(n);
    achieved = std::abs(cur - prev) / std::max(1.0, std::abs(cur));
    prev = cur;
    if (achieved < 1e-7) return 1.0 / lat.U + cur;
  }
  std::ostringstream os;
  os << "binding_residual: quadrature not converged, achieved tolerance " << achieved;
  throw NumericsError(os.str());
}

std::optional<double> binding_depth_nd(const std::vector<double>& K_vec,
                                       const LatticeParams& lat) {
  if (lat.dimension < 2 || lat.dimension > 3)
    throw ValidationError("binding_depth_nd: dimension must be 2 or 3");
  if (static_cast<int>(K_vec.size()) != lat.dimension)
    throw ValidationError("binding_depth_nd: K_vec size must equal lattice dimension");
  std::vector<double> Js = effective_hoppings(K_vec, lat);
  std::sort(Js.begin(), Js.end());  // put the largest hopping on the analytic axis
  double sumJ = 0.0;
  for (double J : Js) sumJ += J;

  // root of I(b) = 1/U in x = ln b; I is strictly decreasing in b
  const double target = 1.0 / lat.U;
  double x_lo = std::log(1e-60), x_hi = std::log(lat.U + 16.0 * (sumJ + lat.J));
  if (binding_integral(Js, std::exp(x_lo)) < target) return std::nullopt;  // shallow limit too weak
  while (binding_integral(Js, std::exp(x_hi)) > target) x_hi += 1.0;
  for (int it = 0; it < 160; ++it) {
    double x = 0.5 * (x_lo + x_hi);
    (binding_integral(Js, std::exp(x)) > target ? x_lo : x_hi) = x;
  }
  return std::exp(0.5 * (x_lo + x_hi));
}

std::optional<double> solve_bound_energy_nd(const std::vector<double>& K_vec,
                                            const LatticeParams& lat) {
  auto b = binding_depth_nd(K_vec, lat);
  if (!b) return std::nullopt;
  double sumJ = 0.0;
  for (double J : effective_hoppings(K_vec, lat)) sumJ += J;
  return 2.0 * lat.omega_c - 4.0 * sumJ - *b;
}

std::vector<double> bound_wavefunction_nd(const std::vector<double>& K_vec,
                                          const LatticeParams& lat, int r_max) {
  const int d = lat.dimension;
  if (static_cast<int>(K_vec.size()) != d)
    throw ValidationError("bound_wavefunction_nd: K_vec size must equal lattice dimension");
  double E;
  if (d == 1) {
    E = bound_energy_1d(K_vec[0], lat);
  } else {
    auto opt = solve_bound_energy_nd(K_vec, lat);
    if (!opt) throw PhysicsError("bound_wavefunction_nd: no bound state at this (K, U)");
    E = *opt;
  }
  const double Ep = E - 2.0 * lat.omega_c;
  std::vector<double> Js;
  for (double K : K_vec) Js.push_back(j_of_K(K, lat));

  const int side = 2 * r_max + 1;
  long n_pts = 1;
  for (int a = 0; a < d; ++a) n_pts *= side;

  // psi(r) ~ grid mean of cos(q . r) / (E' + 4 Sum J_a cos q_a); double the grid
  // until the profile settles (aliasing decays with the bound-state size)
  auto eval = [&](int n, std::vector<double>& out) {
    std::vector<double> q(n), cq(n);
    for (int i = 0; i < n; ++i) {
      q[i] = 2.0 * kPi * i / n - kPi;
      cq[i] = std::cos(q[i]);
    }
    std::fill(out.begin(), out.end(), 0.0);
    long total = 1;
    for (int a = 0; a < d; ++a) total *= n;
    for (long t = 0; t < total; ++t) {
      long rem = t;
      double den = Ep, phase_base[3] = {0, 0, 0};
      for (int a = 0; a < d; ++a) {
        int i = static_cast<int>(rem % n);
        den += 4.0 * Js[a] * cq[i];
        phase_base[a] = q[i];
        rem /= n;
      }
      double inv = 1.0 / den;
      for (long p = 0; p < n_pts; ++p) {
        long prem = p;
        double phase = 0.0;
        for (int a = 0; a < d; ++a) {
          phase += phase_base[a] * (static_cast<int>(prem % side) - r_max);
          prem /= side;
        }
        out[p] += std::cos(phase) * inv;
      }
    }
    double norm = 0.0;
    for (double v : out) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : out) v /= norm;
  };

  std::vector<double> cur(n_pts), prev(n_pts);
  int n0 = std::max(64, 8 * r_max + 64);
  eval(n0, prev);
  const int n_cap = d == 1 ? 1 << 15 : (d == 2 ? 1 << 11 : 1 << 8);
  for (int n = 2 * n0; n <= n_cap; n *= 2) {
    eval(n, cur);
    double diff = 0.0;
    for (long p = 0; p < n_pts; ++p) diff = std::max(diff, std::abs(cur[p] - prev[p]));
    std::swap(cur, prev);
    if (diff < 1e-9) break;
  }
  // fix overall sign: on-site amplitude positive
  long center = 0;
  for (int a = 0; a < d; ++a) center = center * side + r_max;
  if (prev[center] < 0.0)
    for (double& v : prev) v = -v;
  return prev;
}

double resonant_K0(double omega_e, const LatticeParams& lat) {
  const double target = 2.0 * (omega_e - lat.omega_c);
  const double lo = bound_energy_1d(0.0, lat) - 2.0 * lat.omega_c;  // band bottom
  const double hi = -lat.U;                                         // band top (K = pi)
  if (!(target > lo && target < hi)) {
    std::ostringstream os;
    os << "resonant_K0: 2*omega_e = " << 2.0 * omega_e
       << " lies outside the open bound band (" << lo + 2.0 * lat.omega_c << ", "
       << hi + 2.0 * lat.omega_c << ")";
    throw PhysicsError(os.str());
  }
  auto Eprime = [&](double K) {
    double JK = j_of_K(K, lat);
    return -std::sqrt(lat.U * lat.U + 16.0 * JK * JK);
  };
  double a = 0.0, b = kPi;  // Eprime increasing in K
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (a + b);
    if (std::abs(Eprime(mid) - target) < 1e-12) return mid;
    (Eprime(mid) < target ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

BoundStateBand tabulate_band(const LatticeParams& lat, int n_K) {
  if (n_K < 1) throw ValidationError("tabulate_band: n_K must be >= 1");
  BoundStateBand band;
  for (int j = 1; j <= n_K; ++j) {
    double K = kPi * j / (n_K + 1);
    band.K_grid.push_back(K);
    band.states.push_back(bound_state_1d(K, lat));
    auto [vg, rho] = group_velocity_and_dos(K, lat);
    band.group_velocity.push_back(vg);
    band.dos.push_back(rho);
  }
  return band;
}

}  // namespace pairwave::bound_states
