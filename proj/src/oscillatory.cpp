#include "equiheat/oscillatory.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "equiheat/errors.hpp"
#include "equiheat/fit.hpp"
#include "equiheat/heat.hpp"

namespace equiheat {

namespace {

// psi(eps xi): smooth, 1 near the origin, supported in |eps xi| <= 2.
double psi_bump(double u) {
  double a = std::abs(u);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  return smooth_step(2.0 - a);
}

// T(y) = int w(xi) e^{i y xi} psi(eps xi) dxi for the Gaussian weight
// w = e^{-xi^2}, by Gauss-Hermite with the node count scaled to resolve the
// oscillation (frequency y against nodes reaching ~sqrt(2n)).
double xi_transform(double y, double eps, int base_nodes, int cap) {
  int need = std::max(base_nodes, static_cast<int>(0.55 * y * y) + 32);
  if (need > cap)
    throw BudgetError("xi-transform: oscillation too fast for the node budget (need " +
                          std::to_string(need) + " Gauss-Hermite nodes)",
                      cap, need);
  const QuadRule& gh = gauss_hermite_cached(need);
  KahanSum s;
  for (std::size_t k = 0; k < gh.size(); ++k) {
    double damp = (eps > 0.0) ? psi_bump(eps * gh.nodes[k]) : 1.0;
    s.add(gh.weights[k] * std::cos(y * gh.nodes[k]) * damp);
  }
  return s.value();
}

// V~(s) = normalized average of v(theta1, s - theta1) over the first factor.
struct KkAverage {
  const OscAmplitude* amp = nullptr;
  double period = kTwoPi;
  int n_inner = 256;
  double restrict_window = 0.0;
  double vmax = 1.0;

  complexd at(double s) const {
    if (restrict_window > 0.0 && std::abs(wrap_angle(s)) > restrict_window) return 0.0;
    complexd acc = 0.0;
    for (int j = 0; j < n_inner; ++j) {
      double th1 = period * j / n_inner;
      acc += amp->kk(th1, s - th1);
    }
    return acc / static_cast<double>(n_inner);
  }
};

KkAverage kk_average(const SpaceModel& space, const OscAmplitude& a,
                     double restrict_window = 0.0) {
  if (!a.kk) throw DomainError("oscillatory amplitude: kk factor required");
  KkAverage avg;
  avg.amp = &a;
  avg.period = space.k_period();
  avg.restrict_window = restrict_window;
  double m = 0.0;
  for (int i = 0; i < 64; ++i) m = std::max(m, std::abs(avg.at(avg.period * i / 64)));
  avg.vmax = m;
  return avg;
}

double base_mass(const SpaceModel& space, const OscAmplitude& a) {
  if (!a.base) throw DomainError("oscillatory amplitude: base factor required");
  switch (space.kind()) {
    case SpaceKind::T1: {
      auto gl = gauss_legendre(192, -kPi, kPi);
      KahanSum m;
      for (std::size_t i = 0; i < gl.size(); ++i) m.add(gl.weights[i] * a.base({gl.nodes[i]}));
      return m.value();
    }
    case SpaceKind::S2: {
      auto gl = gauss_legendre(96, 0.0, kPi);
      auto tr = periodic_trapezoid(64, kTwoPi);
      KahanSum m;
      for (std::size_t i = 0; i < gl.size(); ++i)
        for (std::size_t j = 0; j < tr.size(); ++j)
          m.add(gl.weights[i] * tr.weights[j] * a.base({gl.nodes[i], tr.nodes[j]}));
      return m.value();
    }
    default:
      throw DomainError("integral_direct: bundled for t1 and s2 models");
  }
}

// One resolution level of the collapsed s-integral.
complexd s_integral(const SpaceModel& space, const KkAverage& avg, double mu, int s_nodes,
                    double window, double eps, int gh_base, int gh_cap, double* tail_bound) {
  double period = avg.period;
  double w = std::min(window * mu, 0.5 * period);
  auto gl = gauss_legendre(s_nodes, -w, w);
  complexd acc = 0.0;
  for (std::size_t i = 0; i < gl.size(); ++i) {
    double s = gl.nodes[i];
    double y = wrap_angle(s) / mu;
    acc += gl.weights[i] * avg.at(s) * xi_transform(y, eps, gh_base, gh_cap);
  }
  acc /= period;
  if (tail_bound) {
    double drop = (w < 0.5 * period)
                      ? avg.vmax * (period - 2.0 * w) / period * std::sqrt(kPi) *
                            std::exp(-0.25 * (w / mu) * (w / mu))
                      : 0.0;
    *tail_bound = drop;
  }
  return acc;
}

}  // namespace

complexd integral_direct(const SpaceModel& space, const OscAmplitude& a, double mu,
                         double* est_error, const DirectOptions& opts) {
  if (mu <= 0.0) throw DomainError("integral_direct: mu must be positive");
  if (space.kind() != SpaceKind::T1 && space.kind() != SpaceKind::S2)
    throw DomainError("integral_direct: bundled for t1 and s2 models");

  double mass = base_mass(space, a);
  // transverse xi-directions contribute their plain Gaussian integral
  double transverse = 1.0;
  for (int i = 0; i < space.dim() - 1; ++i)
    transverse *= xi_transform(0.0, opts.eps_regularization, opts.gh_base_nodes, opts.gh_node_cap);

  KkAverage avg = kk_average(space, a, opts.kk_restrict);
  double tail = 0.0;
  complexd s1 = s_integral(space, avg, mu, opts.s_nodes, opts.window, opts.eps_regularization,
                           opts.gh_base_nodes, opts.gh_node_cap, &tail);
  complexd s2 = s_integral(space, avg, mu, 2 * opts.s_nodes, opts.window, opts.eps_regularization,
                           2 * opts.gh_base_nodes, opts.gh_node_cap, nullptr);
  if (est_error) *est_error = std::abs(s2 - s1) * std::abs(mass) * transverse + tail;
  return mass * transverse * s2;
}

complexd integral_direct_reference(const SpaceModel& space, const OscAmplitude& a, double mu,
                                   int theta_nodes, int xi_nodes, int base_nodes) {
  if (space.kind() != SpaceKind::T1 && space.kind() != SpaceKind::S2)
    throw DomainError("integral_direct_reference: bundled for t1 and s2 models");
  // base mass on a separate grid
  double mass = 0.0;
  if (space.kind() == SpaceKind::T1) {
    auto gl = gauss_legendre(base_nodes, -kPi, kPi);
    for (std::size_t i = 0; i < gl.size(); ++i) mass += gl.weights[i] * a.base({gl.nodes[i]});
  } else {
    auto gl = gauss_legendre(base_nodes, 0.0, kPi);
    auto tr = periodic_trapezoid(base_nodes, kTwoPi);
    for (std::size_t i = 0; i < gl.size(); ++i)
      for (std::size_t j = 0; j < tr.size(); ++j)
        mass += gl.weights[i] * tr.weights[j] * a.base({gl.nodes[i], tr.nodes[j]});
  }
  double period = space.k_period();
  const QuadRule& gh = gauss_hermite_cached(xi_nodes);
  double transverse = 1.0;
  if (space.kind() == SpaceKind::S2) {
    double t0 = 0.0;
    for (std::size_t k = 0; k < gh.size(); ++k) t0 += gh.weights[k];
    transverse = t0;
  }
  complexd acc = 0.0;
  for (int i = 0; i < theta_nodes; ++i)
    for (int j = 0; j < theta_nodes; ++j) {
      double th1 = period * i / theta_nodes, th = period * j / theta_nodes;
      double s = wrap_angle(th1 + th);
      complexd xi_sum = 0.0;
      for (std::size_t k = 0; k < gh.size(); ++k)
        xi_sum += gh.weights[k] * std::polar(1.0, s * gh.nodes[k] / mu);
      acc += a.kk(th1, th) * xi_sum / static_cast<double>(theta_nodes) /
             static_cast<double>(theta_nodes);
    }
  return mass * transverse * acc;
}

// --- stationary-phase leading coefficient -------------------------------------

namespace {

// Configuration point of the total space T*M x KK at a Reg C sample.
struct RegCAnchor {
  CotangentPoint pt;
  double th1 = 0.0, th = 0.0;      // circle K
  GroupElement k1, k;              // su2 K
};

// Coordinate layout of total-space tangents: [dbase(n) | dxi(n) | kk(2 k_dim)]
int total_dim(const SpaceModel& space) { return 2 * space.dim() + space.kk_dim(); }

double kk_metric_scale(const SpaceModel& space) {
  // metric on each K-factor scaled so its volume equals the normalized Haar
  if (space.kind() == SpaceKind::SU2Both)
    return std::pow(16.0 * kPi * kPi, -2.0 / 3.0);  // s^2 with s^3 vol = 1
  double period = space.k_period();
  return 1.0 / (period * period);
}

double total_inner(const SpaceModel& space, const RegCAnchor& z, const std::vector<double>& A,
                   const std::vector<double>& B) {
  int n = space.dim();
  PhaseTangent a, b;
  a.dbase.assign(A.begin(), A.begin() + n);
  a.dxi.assign(A.begin() + n, A.begin() + 2 * n);
  b.dbase.assign(B.begin(), B.begin() + n);
  b.dxi.assign(B.begin() + n, B.begin() + 2 * n);
  double ip = sasaki_inner(space, z.pt, a, b);
  double s2 = kk_metric_scale(space);
  for (int i = 2 * n; i < total_dim(space); ++i) ip += s2 * A[i] * B[i];
  return ip;
}

// Phase at a displaced configuration; delta uses the coordinate layout.
double phi_value(const SpaceModel& space, const RegCAnchor& z, const std::vector<double>& delta) {
  int n = space.dim();
  switch (space.kind()) {
    case SpaceKind::T1: {
      double xi = z.pt.xi[0] + delta[n + 0];
      double s = wrap_angle(z.th1 + delta[2 * n + 0] + z.th + delta[2 * n + 1]);
      return s * xi;
    }
    case SpaceKind::S2: {
      double xi_phi = z.pt.xi[1] + delta[n + 1];
      double s = wrap_angle(z.th1 + delta[2 * n + 0] + z.th + delta[2 * n + 1]);
      return s * xi_phi;
    }
    case SpaceKind::SU2Both: {
      const GroupModel& g = space.group();
      std::vector<double> u1{delta[2 * n + 0], delta[2 * n + 1], delta[2 * n + 2]};
      std::vector<double> u{delta[2 * n + 3], delta[2 * n + 4], delta[2 * n + 5]};
      GroupElement k1 = g.multiply(z.k1, g.exp(u1));
      GroupElement k = g.multiply(z.k, g.exp(u));
      std::vector<double> disp = g.log(g.multiply(k1, k));
      double phi = 0.0;
      for (int i = 0; i < 3; ++i) phi += (z.pt.xi[i] + delta[n + i]) * disp[i];
      return phi;
    }
    default:
      throw DomainError("leading_L0: bundled for t1, s2, su2 models");
  }
}

std::vector<std::vector<double>> regc_tangents(const SpaceModel& space, const RegCAnchor& z) {
  int N = total_dim(space);
  int n = space.dim();
  std::vector<std::vector<double>> ts;
  auto unit = [&](int i) {
    std::vector<double> v(N, 0.0);
    v[i] = 1.0;
    return v;
  };
  switch (space.kind()) {
    case SpaceKind::T1:
      ts.push_back(unit(0));  // x
      {
        std::vector<double> h(N, 0.0);
        h[2 * n + 0] = 1.0;
        h[2 * n + 1] = -1.0;  // anti-diagonal H direction
        ts.push_back(h);
      }
      break;
    case SpaceKind::S2:
      ts.push_back(unit(0));      // Theta
      ts.push_back(unit(1));      // phi
      ts.push_back(unit(n + 0));  // xi_Theta = c
      {
        std::vector<double> h(N, 0.0);
        h[2 * n + 0] = 1.0;
        h[2 * n + 1] = -1.0;
        ts.push_back(h);
      }
      break;
    case SpaceKind::SU2Both: {
      for (int i = 0; i < 3; ++i) ts.push_back(unit(i));  // zero-section base dirs
      // H = {(k e^{su}, e^{-su} k^{-1})}: second-factor right-exp velocity is
      // -Ad(k) u
      // Through (a, a^{-1}) the curve (a e^{su}, e^{-su} a^{-1}) has
      // right-exponential velocities (u, -Ad(a) u); Ad(a) rotates the algebra
      // vector by the quaternion a = k1.
      const GroupModel& g = space.group();
      for (int i = 0; i < 3; ++i) {
        std::vector<double> u(3, 0.0);
        u[i] = 1.0;
        GroupElement x = g.exp({u[0] * 1e-6, u[1] * 1e-6, u[2] * 1e-6});
        GroupElement ad = g.multiply(z.k1, g.multiply(x, g.inverse(z.k1)));
        auto adu = g.log(ad);
        std::vector<double> h(N, 0.0);
        h[2 * n + i] = 1.0;
        for (int c = 0; c < 3; ++c) h[2 * n + 3 + c] = -adu[c] * 1e6;
        ts.push_back(h);
      }
      break;
    }
    default:
      throw DomainError("leading_L0: bundled for t1, s2, su2 models");
  }
  return ts;
}

double h_volume(const SpaceModel& space) {
  // Riemannian volume of the anti-diagonal H under the normalized KK metric.
  if (space.kind() == SpaceKind::SU2Both) return 2.0 * std::sqrt(2.0);
  return std::sqrt(2.0);
}

double hessian_normal_det(const SpaceModel& space, const RegCAnchor& z, double fd_step) {
  const int N = total_dim(space);
  auto tangents = regc_tangents(space, z);
  // Gram-Schmidt: tangents first, then coordinate directions fill the normals.
  std::vector<std::vector<double>> basis;
  auto push_orthonormal = [&](std::vector<double> v) {
    for (const auto& b : basis) {
      double c = total_inner(space, z, v, b);
      for (int i = 0; i < N; ++i) v[i] -= c * b[i];
    }
    double nn = std::sqrt(std::max(total_inner(space, z, v, v), 0.0));
    if (nn < 1e-9) return false;
    for (int i = 0; i < N; ++i) v[i] /= nn;
    basis.push_back(v);
    return true;
  };
  for (const auto& t : tangents)
    if (!push_orthonormal(t))
      throw NumericError("leading_L0: degenerate Reg C tangent frame");
  std::size_t n_tan = basis.size();
  for (int i = 0; i < N && basis.size() < static_cast<std::size_t>(N); ++i) {
    std::vector<double> v(N, 0.0);
    v[i] = 1.0;
    push_orthonormal(v);
  }
  if (basis.size() != static_cast<std::size_t>(N))
    throw NumericError("leading_L0: could not complete the normal frame");
  const int r = N - static_cast<int>(n_tan);

  Eigen::MatrixXd H(r, r);
  for (int a = 0; a < r; ++a)
    for (int b = a; b < r; ++b) {
      const auto& na = basis[n_tan + a];
      const auto& nb = basis[n_tan + b];
      double hab;
      if (a == b) {
        hab = fd_second_derivative(
            [&](double h) {
              std::vector<double> d(N);
              for (int i = 0; i < N; ++i) d[i] = h * na[i];
              return phi_value(space, z, d);
            },
            fd_step);
      } else {
        hab = fd_mixed_second(
            [&](double h1, double h2) {
              std::vector<double> d(N);
              for (int i = 0; i < N; ++i) d[i] = h1 * na[i] + h2 * nb[i];
              return phi_value(space, z, d);
            },
            fd_step);
      }
      H(a, b) = hab;
      H(b, a) = hab;
    }
  double det = std::abs(H.determinant());
  if (det < 1e-12)
    throw NumericError("leading_L0: near-singular transverse Hessian (stratum boundary?)");
  return det;
}

double amplitude_on_regc(const SpaceModel& space, const OscAmplitude& a, const RegCAnchor& z) {
  double u;
  if (a.phase_space) {
    u = a.phase_space(z.pt);
  } else {
    double xi2 = 0.0;
    for (double c : z.pt.xi) xi2 += c * c;
    double b = 1.0;
    if (a.base) {
      if (space.kind() == SpaceKind::SU2Both)
        b = a.base({z.pt.p.v[0], z.pt.p.v[1], z.pt.p.v[2], z.pt.p.v[3]});
      else
        b = a.base(z.pt.base);
    }
    u = b * std::exp(-xi2);
  }
  complexd v = 1.0;
  if (space.kind() == SpaceKind::SU2Both) {
    if (a.kk_su2) v = a.kk_su2(z.k1, z.k);
  } else if (a.kk) {
    v = a.kk(z.th1, z.th);
  }
  return u * v.real();
}

}  // namespace

double leading_L0(const SpaceModel& space, const OscAmplitude& a,
                  const CriticalGeometry& geometry, double fd_step) {
  if (geometry.samples.empty())
    throw DomainError("leading_L0: geometry has no Reg Xi samples (run the sampler first)");
  const double volH = h_volume(space);
  KahanSum acc;
  const bool su2 = space.kind() == SpaceKind::SU2Both;
  const std::size_t n_h = su2 ? geometry.h_pairs.size() : geometry.h_angles.size();
  for (const auto& s : geometry.samples) {
    // for circle K the phase only sees theta1 + theta, so the transverse
    // Hessian is the same at every H node of a given Reg Xi sample
    double cached_det = 0.0;
    for (std::size_t j = 0; j < n_h; ++j) {
      RegCAnchor z;
      z.pt = s.pt;
      if (su2) {
        z.k1 = geometry.h_pairs[j].first;
        z.k = geometry.h_pairs[j].second;
      } else {
        z.th1 = geometry.h_angles[j][0];
        z.th = geometry.h_angles[j][1];
      }
      double det;
      if (!su2 && j > 0) {
        det = cached_det;
      } else {
        det = hessian_normal_det(space, z, fd_step);
        cached_det = det;
      }
      double amp = amplitude_on_regc(space, a, z);
      acc.add(s.weight * geometry.h_weights[j] * volH * amp / std::sqrt(det));
    }
  }
  return acc.value();
}

OscResult asymptotic_compare(const SpaceModel& space, const OscAmplitude& a,
                             const CriticalGeometry& geometry,
                             const std::vector<double>& mu_grid) {
  if (mu_grid.size() < 4) throw DomainError("asymptotic_compare: need a mu grid");
  double mmax = *std::max_element(mu_grid.begin(), mu_grid.end());
  double mmin = *std::min_element(mu_grid.begin(), mu_grid.end());
  if (mmax / mmin < 100.0)
    throw DomainError("asymptotic_compare: mu grid must span at least two decades");

  OscResult res;
  res.kappa = geometry.kappa;
  res.lambda_chain = geometry.lambda_chain;
  res.leading_l0 = leading_L0(space, a, geometry);

  std::vector<double> logmu, logI;
  for (double mu : mu_grid) {
    double err = 0.0;
    complexd I = integral_direct(space, a, mu, &err);
    res.points.push_back({mu, I, err});
    double lead = std::pow(kTwoPi * mu, res.kappa) * res.leading_l0;
    res.ratios.push_back(std::abs(lead) > 0 ? (I.real() / lead) : 0.0);
    if (std::abs(I) > 0) {
      logmu.push_back(std::log(mu));
      logI.push_back(std::log(std::abs(I)));
    }
  }
  if (logmu.size() >= 3) {
    LineFit lf = fit_line(logmu, logI);
    res.kappa_slope = lf.slope;
    res.kappa_slope_sigma = lf.slope_sigma;
  }
  // remainder fit |ratio - 1| ~ C mu (log 1/mu)^{Lambda-1}; also report which
  // log power the residuals prefer (0 or 1)
  std::vector<double> lm, le;
  for (std::size_t i = 0; i < mu_grid.size(); ++i) {
    double e = std::abs(res.ratios[i] - 1.0);
    if (e > 1e-14) {
      lm.push_back(std::log(mu_grid[i]));
      le.push_back(std::log(e));
    }
  }
  if (lm.size() >= 3) {
    double best_res = 1e300;
    for (int L = 1; L <= 2; ++L) {
      std::vector<double> adj(le);
      for (std::size_t i = 0; i < lm.size(); ++i)
        adj[i] -= (L - 1) * std::log(std::log(1.0 / std::exp(lm[i])));
      LineFit lf = fit_line(lm, adj);
      if (lf.residual_norm < best_res) {
        best_res = lf.residual_norm;
        res.preferred_log_power = L - 1;
        res.remainder_constant = std::exp(lf.intercept);
      }
    }
  }
  return res;
}

// --- smoothing-symbol machinery -----------------------------------------------

complexd symbol_value(const SpaceModel& space, int chart,
                      const std::function<complexd(const GroupElement&)>& f,
                      const std::vector<double>& x, const std::vector<double>& xi,
                      int g_bandwidth) {
  const GroupModel& g = space.group();
  SpacePoint p = space.chart_point(chart, x);
  HaarRule rule = g.haar_rule(g_bandwidth);
  complexd acc = parallel_sum_complex(rule.size(), [&](std::size_t i) -> complexd {
    SpacePoint q = space.g_act(rule.nodes[i], p);
    double aprime = space.partition_prime(chart, q);
    if (aprime <= 0.0 || !space.chart_contains(chart, q)) return 0.0;
    auto xq = space.chart_coords(chart, q);
    double phase = 0.0;
    for (std::size_t c = 0; c < xi.size(); ++c) phase += (xq[c] - x[c]) * xi[c];
    return rule.weights[i] * aprime * f(rule.nodes[i]) * std::polar(1.0, phase);
  });
  return acc;
}

SymbolDecayReport symbol_probe(const SpaceModel& space, int chart,
                               const std::function<complexd(const GroupElement&)>& f,
                               const std::vector<double>& x, double xi_max, int n_xi, int n_max,
                               int g_bandwidth) {
  SymbolDecayReport rep;
  const int dim = space.dim();
  std::vector<std::vector<double>> dirs;
  if (dim == 1) {
    dirs.push_back({1.0});
  } else if (dim == 2) {
    dirs.push_back({1.0, 0.0});
    dirs.push_back({std::sqrt(0.5), std::sqrt(0.5)});
  } else {
    dirs.push_back({1.0, 0.0, 0.0});
    dirs.push_back({0.0, 1.0, 0.0});
    dirs.push_back({std::sqrt(1.0 / 3), std::sqrt(1.0 / 3), std::sqrt(1.0 / 3)});
  }
  for (int i = 0; i <= n_xi; ++i) {
    double r = xi_max * i / n_xi;
    double worst = 0.0;
    for (const auto& d : dirs) {
      std::vector<double> xi(dim);
      for (int c = 0; c < dim; ++c) xi[c] = r * d[c];
      int bw = g_bandwidth + static_cast<int>(4.0 * r);
      worst = std::max(worst, std::abs(symbol_value(space, chart, f, x, xi, bw)));
    }
    rep.xi_norm.push_back(r);
    rep.abs_value.push_back(worst);
  }
  // C_N = sup over the grid of |a| (1+|xi|^2)^N; finiteness of every C_N up
  // to n_max together with the superpolynomial smallness of the tail is the
  // empirical witness of the S^{-infty} class membership
  rep.c_n.assign(n_max + 1, 0.0);
  for (int N = 0; N <= n_max; ++N)
    for (std::size_t i = 0; i < rep.xi_norm.size(); ++i)
      rep.c_n[N] = std::max(rep.c_n[N],
                            rep.abs_value[i] * std::pow(1.0 + rep.xi_norm[i] * rep.xi_norm[i], N));
  double head = rep.abs_value.front();
  for (std::size_t i = 0; i < rep.xi_norm.size() / 4; ++i)
    head = std::max(head, rep.abs_value[i]);
  // decay witness: the outer quarter of the grid sits at least three orders
  // below the head, and the tail does not rebound
  double tail_max = 0.0;
  for (std::size_t i = rep.xi_norm.size() * 3 / 4; i < rep.xi_norm.size(); ++i)
    tail_max = std::max(tail_max, rep.abs_value[i]);
  if (!(tail_max <= 1e-3 * head)) {
    rep.decay_ok = false;
    rep.worst_xi = rep.xi_norm.back();
  }
  return rep;
}

// --- rescaled b-amplitude ------------------------------------------------------

namespace {

double beta_cutoff_value(const BetaCutoff& beta, double r) {
  double flat = beta.radius * beta.flat_fraction;
  if (r <= flat) return 1.0;
  if (r >= beta.radius) return 0.0;
  return smooth_step((beta.radius - r) / (beta.radius - flat));
}

}  // namespace

complexd b_amplitude(const SpaceModel& space, double t, const SpacePoint& p,
                     const std::vector<double>& eta, double theta1, double theta,
                     const BetaCutoff& beta, int quad_nodes) {
  const GroupModel& g = space.group();
  if (beta.radius >= g.injectivity_radius())
    throw DomainError("b_amplitude: cutoff must stay inside the injectivity radius");
  auto series = build_heat_series(g, t);
  const double vol = g.riemannian_volume();

  if (space.kind() == SpaceKind::T1) {
    // moved point must stay inside the enlarged chart
    double s = theta1 + theta;
    SpacePoint moved = space.kk_act(theta1, theta, p);
    if (space.partition_prime(0, moved) <= 0.0) return 0.0;
    double x = space.chart_coords(0, p)[0];
    auto gl = gauss_legendre(quad_nodes, -beta.radius, beta.radius);
    complexd acc = 0.0;
    for (std::size_t i = 0; i < gl.size(); ++i) {
      double psi = gl.nodes[i];
      GroupElement el;
      el.data = {std::fmod(psi + s + 2 * kTwoPi, kTwoPi), 0, 0, 0};
      SpacePoint q = space.g_act(el, p);
      double ap = space.partition_prime(0, q);
      if (ap <= 0.0 || !space.chart_contains(0, q)) continue;
      double xq = space.chart_coords(0, q)[0];
      GroupElement gpsi;
      gpsi.data = {std::fmod(psi + 2 * kTwoPi, kTwoPi), 0, 0, 0};
      double ft = heat_kernel_eval(g, series, gpsi) / vol;
      acc += gl.weights[i] * ap * ft * beta_cutoff_value(beta, std::abs(psi)) *
             std::polar(1.0, (xq - x) * eta[0]);
    }
    double xm = space.chart_coords(0, moved)[0];
    return std::polar(1.0, -(xm - x) * eta[0]) * acc;
  }

  if (space.kind() == SpaceKind::SU2Torus) {
    // normal coordinates anchored at p: phi(p h) = log h; the enlarged-chart
    // cutoffs are radial bumps in |h|
    GroupElement z = g.torus_element(theta1 + theta);
    double moved_dist = g.distance(z);
    double prime_flat = 0.67 * kTwoPi, prime_zero = 0.90 * kTwoPi;
    auto alpha_prime = [&](double r) {
      return smooth_step((prime_zero - r) / (prime_zero - prime_flat));
    };
    if (alpha_prime(moved_dist) <= 0.0) return 0.0;
    auto disp_m = g.log(z);
    double phase_m = 0.0;
    for (int c = 0; c < 3; ++c) phase_m += disp_m[c] * eta[c];
    // polar quadrature over the cutoff ball in exp coordinates
    int n_r = std::max(48, quad_nodes / 12);
    auto gl_r = gauss_legendre(n_r, 0.0, beta.radius);
    auto gl_u = gauss_legendre(24, -1.0, 1.0);
    auto tr = periodic_trapezoid(24, kTwoPi);
    complexd acc = 0.0;
    for (int ir = 0; ir < n_r; ++ir)
      for (std::size_t iu = 0; iu < gl_u.size(); ++iu)
        for (std::size_t ip = 0; ip < tr.size(); ++ip) {
          double r = gl_r.nodes[ir], cu = gl_u.nodes[iu], su = std::sqrt(1.0 - cu * cu);
          std::vector<double> zeta{r * su * std::cos(tr.nodes[ip]),
                                   r * su * std::sin(tr.nodes[ip]), r * cu};
          GroupElement ge = g.exp(zeta);
          // k1 g k with torus pair (theta1, theta): element z(th1) g z(th)
          GroupElement arg = g.multiply(g.torus_element(theta1),
                                        g.multiply(ge, g.torus_element(theta)));
          double dist_arg = g.distance(arg);
          double ap = alpha_prime(dist_arg);
          if (ap <= 0.0) continue;
          auto disp = g.log(arg);
          double phase = 0.0;
          for (int c = 0; c < 3; ++c) phase += disp[c] * eta[c];
          double ft = heat_kernel_eval(g, series, ge) / vol;
          double w = gl_r.weights[ir] * gl_u.weights[iu] * tr.weights[ip] * r * r *
                     g.volume_jacobian(zeta);
          acc += w * ap * ft * beta_cutoff_value(beta, r) * std::polar(1.0, phase - phase_m);
        }
    return acc;
  }
  throw DomainError("b_amplitude: bundled for t1 and su2_torus models");
}

BAmplitudeReport b_amplitude_probe(const SpaceModel& space, const std::vector<double>& t_grid,
                                   const std::vector<double>& eta_norms, int kk_samples,
                                   const BetaCutoff& beta) {
  BAmplitudeReport rep;
  SpacePoint p = space.reference_point();
  const int dim = space.group_dim();
  double period = space.k_period();
  for (double t : t_grid) {
    double sup_t = 0.0;
    double sq = std::sqrt(t);
    for (double en : eta_norms)
      for (int ks = 0; ks < kk_samples; ++ks) {
        double th1 = period * (ks + 0.3) / kk_samples;
        double th = -th1 + 0.15 * period * std::cos(1.7 * ks) / kk_samples;
        std::vector<double> eta(dim, 0.0);
        eta[0] = en / sq;  // b is probed at xi / t^{1/2}
        complexd b = b_amplitude(space, t, p, eta, th1, th, beta);
        sup_t = std::max(sup_t, std::abs(b));
      }
    rep.t_values.push_back(t);
    rep.sup_at_t.push_back(sup_t);
    rep.sup_abs = std::max(rep.sup_abs, sup_t);
  }
  std::size_t half = t_grid.size() / 2;
  for (std::size_t i = half; i < t_grid.size(); ++i)
    rep.sup_small_t = std::max(rep.sup_small_t, rep.sup_at_t[i]);
  // t -> 0 limit at xi = 0: alpha'(p) c0(e) \int e^{-|zeta|^2/4} dzeta = alpha'(p)
  double tmin = *std::min_element(t_grid.begin(), t_grid.end());
  std::vector<double> zero(dim, 0.0);
  complexd b0 = b_amplitude(space, tmin, p, zero, 0.25 * period, -0.25 * period, beta);
  double limit = (space.kind() == SpaceKind::T1) ? space.partition_prime(0, p) : 1.0;
  rep.limit_gap = std::abs(b0.real() - limit) / std::max(std::abs(limit), 1e-12);
  // bounded = no upward trend of sup_t as t -> 0 (log-log slope not negative)
  std::vector<double> lt, ls;
  for (std::size_t i = 0; i < rep.t_values.size(); ++i)
    if (rep.sup_at_t[i] > 0) {
      lt.push_back(std::log(rep.t_values[i]));
      ls.push_back(std::log(rep.sup_at_t[i]));
    }
  if (lt.size() >= 3) {
    LineFit lf = fit_line(lt, ls);
    rep.bounded = lf.slope > -0.05;
  }
  return rep;
}

}  // namespace equiheat
