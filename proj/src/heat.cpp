#include "equiheat/heat.hpp"

#include <algorithm>
#include <cmath>

#include "equiheat/errors.hpp"

namespace equiheat {

namespace {

void require_q2(int q) {
  if (q != 2)
    throw NotInstantiatedError("order q = " + std::to_string(q) +
                               " semigroup kernels are not instantiated (only q = 2)");
}

// Certified bound on sum_{lambda > Lambda} d_rho^2 e^{-t lambda}. Since
// |d_rho chi_rho(g)| <= d_rho^2, it also bounds the dropped tail of p_t(g)
// at every g.
double tail_bound_after(const GroupModel& m, double t, double lambda_max) {
  switch (m.kind()) {
    case GroupKind::U1: {
      int N = static_cast<int>(std::floor(std::sqrt(lambda_max)));
      double head = std::exp(-t * (N + 1.0) * (N + 1.0));
      double ratio = std::exp(-t * (2.0 * N + 3.0));
      return 2.0 * head / (1.0 - ratio);
    }
    case GroupKind::T2: {
      // 2D tail <= full product sum minus the included square; bound the
      // included part from below by the disc. Use the crude but certified
      // shell bound sum_{max(|n1|,|n2|) > N} <= 4 (N+1) S1 tail-ish; simplest:
      // S(t)^2 - (partial over |n_i| <= N)^2 with S accurate to machine eps.
      int N = static_cast<int>(std::floor(std::sqrt(lambda_max)));
      KahanSum s1;
      s1.add(1.0);
      for (int n = 1; n * n <= lambda_max * 4 + 400; ++n) {
        double term = 2.0 * std::exp(-t * n * n);
        s1.add(term);
        if (term < 1e-18) break;
      }
      KahanSum p1;
      p1.add(1.0);
      for (int n = 1; n <= N; ++n) p1.add(2.0 * std::exp(-t * n * n));
      double S = s1.value(), P = p1.value();
      double full_tail = S * S - P * P;  // everything outside the square
      return std::max(full_tail, 0.0) + 1e-300;
    }
    case GroupKind::SU2:
    case GroupKind::SO3: {
      // terms (2j+1)^2 e^{-t j(j+1)} = n^2 e^{-t (n^2-1)/4}, n = 2j+1.
      double jmax = 0.5 * (std::sqrt(1.0 + 4.0 * lambda_max) - 1.0);
      int two_j = static_cast<int>(std::floor(2.0 * jmax + 1e-9));
      double n0 = two_j + 2.0;  // first dropped n
      auto term = [&](double n) { return n * n * std::exp(-t * (n * n - 1.0) / 4.0); };
      double r = ((n0 + 1.0) / n0) * ((n0 + 1.0) / n0) * std::exp(-t * (2.0 * n0 + 1.0) / 4.0);
      if (r >= 1.0) return 1e300;  // cutoff too small to certify
      return term(n0) / (1.0 - r);
    }
  }
  return 1e300;
}

double sum_at_identity(const GroupModel& m, double t, double lambda_max) {
  auto reps = m.irreps(lambda_max);
  KahanSum s;
  for (const auto& r : reps) s.add(static_cast<double>(r.dimension) * r.dimension * std::exp(-t * r.casimir));
  return s.value();
}

}  // namespace

HeatKernelSeries build_heat_series(const GroupModel& model, double t, const HeatOptions& opts) {
  require_q2(opts.q);
  if (t <= 0.0) throw DomainError("heat kernel: t must be positive");

  // Grow the cutoff until the certified tail is below rel_tol * p_t(e).
  double lambda = std::max(4.0, 8.0 / t);
  double value_e = 0.0, tail = 0.0;
  for (;;) {
    tail = tail_bound_after(model, t, lambda);
    value_e = sum_at_identity(model, t, lambda);
    if (tail <= opts.rel_tol * value_e) break;
    lambda *= 2.0;
    if (lambda > opts.lambda_cap) {
      // Estimate the cutoff that would be required.
      double need = lambda;
      while (tail_bound_after(model, t, need) > opts.rel_tol * value_e && need < 1e12) need *= 2.0;
      throw TruncationError("heat kernel cutoff exceeds configured cap at t = " +
                                std::to_string(t) + " (required lambda_max ~ " +
                                std::to_string(need) + ")",
                            need, opts.lambda_cap);
    }
  }

  HeatKernelSeries s;
  s.t = t;
  s.lambda_max = lambda;
  s.tail_bound = tail;
  s.terms = model.irreps(lambda);
  return s;
}

double heat_kernel_eval(const GroupModel& model, const HeatKernelSeries& series,
                        const GroupElement& g) {
  // For SU(2)/SO(3) all characters come from one Chebyshev recurrence in the
  // class parameter; summing term-by-term keeps the code uniform.
  KahanSum re;
  for (const auto& rho : series.terms) {
    complexd chi = model.character(rho, g);
    re.add(rho.dimension * std::exp(-series.t * rho.casimir) * chi.real());
  }
  return re.value();
}

double heat_kernel_eval(const GroupModel& model, double t, const GroupElement& g,
                        const HeatOptions& opts) {
  return heat_kernel_eval(model, build_heat_series(model, t, opts), g);
}

double heat_density_eval(const GroupModel& model, double t, const GroupElement& g,
                         const HeatOptions& opts) {
  return heat_kernel_eval(model, t, g, opts) / model.riemannian_volume();
}

namespace {

// Envelope fit over the grid. Points whose evaluated |value| falls below the
// certified numerical floor (truncation tail plus cancellation roundoff of
// the series) carry no information about the Gaussian envelope and are
// excluded; the true kernel there is smaller than anything representable.
BoundFitResult fit_envelope(const std::vector<double>& t_grid, const std::vector<double>& r_grid,
                            const std::vector<std::vector<double>>& values,
                            const std::vector<double>& floors, int d) {
  BoundFitResult res;
  res.q = 2;
  double a0 = 0.0;
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    a0 = std::max(a0, values[i][0] * std::pow(t_grid[i], 0.5 * d));
  res.envelope_a0 = a0;
  double rmax = *std::max_element(r_grid.begin(), r_grid.end());

  const double cap = 10.0 * a0;
  for (double b = 0.5; b >= 0.0; b -= 0.002) {
    double omega = b * rmax * rmax;
    double a = 0.0;
    double worst_t = t_grid[0], worst_r = r_grid[0];
    for (std::size_t i = 0; i < t_grid.size(); ++i)
      for (std::size_t j = 0; j < r_grid.size(); ++j) {
        double t = t_grid[i], r = r_grid[j];
        if (std::abs(values[i][j]) <= floors[i]) continue;
        double need = std::abs(values[i][j]) * std::pow(t, 0.5 * d) * std::exp(-omega * t) *
                      std::exp(b * r * r / t);
        if (need > a) {
          a = need;
          worst_t = t;
          worst_r = r;
        }
      }
    if (a <= cap || b <= 1e-12) {
      res.a = a;
      res.b = std::max(b, 0.0);
      res.omega = omega;
      res.feasible = a <= cap;
      res.worst_t = worst_t;
      res.worst_r = worst_r;
      double slack = 1e300;
      for (std::size_t i = 0; i < t_grid.size(); ++i)
        for (std::size_t j = 0; j < r_grid.size(); ++j) {
          if (std::abs(values[i][j]) <= floors[i]) continue;
          double t = t_grid[i], r = r_grid[j];
          double bound = res.a * std::pow(t, -0.5 * d) * std::exp(res.omega * t) *
                         std::exp(-res.b * r * r / t);
          slack = std::min(slack, std::log(bound) - std::log(std::abs(values[i][j])));
        }
      res.min_slack = slack;
      return res;
    }
  }
  res.feasible = false;
  return res;
}

}  // namespace

BoundFitResult gaussian_bound_fit(const GroupModel& model, const std::vector<double>& t_grid,
                                  const std::vector<double>& r_grid, const HeatOptions& opts) {
  require_q2(opts.q);
  if (t_grid.empty() || r_grid.empty()) throw DomainError("gaussian_bound_fit: empty grid");
  if (std::abs(r_grid.front()) > 1e-12)
    throw DomainError("gaussian_bound_fit: r_grid must start at 0 (diagonal envelope)");
  std::vector<std::vector<double>> values(t_grid.size());
  std::vector<double> floors(t_grid.size());
  std::vector<double> dir(model.dim(), 0.0);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    auto series = build_heat_series(model, t_grid[i], opts);
    values[i].resize(r_grid.size());
    for (std::size_t j = 0; j < r_grid.size(); ++j) {
      dir[0] = r_grid[j];
      values[i][j] = heat_kernel_eval(model, series, model.exp(dir));
    }
    floors[i] = series.tail_bound + 1e-12 * values[i][0];
  }
  return fit_envelope(t_grid, r_grid, values, floors, model.dim());
}

BoundFitResult gaussian_bound_fit_k_averaged(const GroupModel& su2,
                                             const std::vector<double>& t_grid,
                                             const std::vector<double>& r_grid,
                                             const HeatOptions& opts) {
  if (su2.kind() != GroupKind::SU2)
    throw DomainError("gaussian_bound_fit_k_averaged: needs the su2 model");
  SigmaSpec triv;
  triv.K = KDesignation::TorusInSU2;
  triv.sigma = IrrepInfo{{0}, 1, 0.0};
  // Base points: g(r) = exp(r X_1) moves the coset gK a base distance r/2 on
  // the unit sphere SU(2)/U(1) (the submersion halves radial speed at e).
  std::vector<std::vector<double>> values(t_grid.size());
  std::vector<double> floors(t_grid.size());
  std::vector<double> base_dist(r_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    values[i].resize(r_grid.size());
    auto series = build_heat_series(su2, t_grid[i], opts);
    auto f = [&](const GroupElement& g) {
      return complexd(heat_kernel_eval(su2, series, g), 0.0);
    };
    int bw = static_cast<int>(2.0 * std::sqrt(series.lambda_max) + 8.0);
    for (std::size_t j = 0; j < r_grid.size(); ++j) {
      GroupElement g = su2.exp({r_grid[j], 0.0, 0.0});
      values[i][j] = h_sigma_kernel(su2, f, triv, g, bw).real();
      // d(gK, K) on the unit 2-sphere: polar angle of R(g) z-hat.
      double w = g.data[0], x = g.data[1], y = g.data[2], z = g.data[3];
      double zz = w * w + z * z - x * x - y * y;  // (R(g) e_z)_z
      base_dist[j] = std::acos(std::clamp(zz, -1.0, 1.0));
    }
    floors[i] = series.tail_bound + 1e-12 * values[i][0];
  }
  return fit_envelope(t_grid, base_dist, values, floors, su2.dim());
}

LanglandsExpansion langlands_probe(const GroupModel& model, const std::vector<double>& t_grid,
                                   const std::vector<double>& r_grid, const HeatOptions& opts) {
  require_q2(opts.q);
  LanglandsExpansion ex;
  ex.d = model.dim();
  ex.c0_e = std::pow(4.0 * kPi, -0.5 * model.dim());
  ex.t_values = t_grid;
  ex.r_values = r_grid;
  std::vector<double> dir(model.dim(), 0.0);
  double worst = 0.0;
  for (double t : t_grid) {
    if (t > 0.1 + 1e-12) throw DomainError("langlands_probe: grid must satisfy t <= 0.1");
    auto series = build_heat_series(model, t, opts);
    for (double r : r_grid) {
      if (r >= model.injectivity_radius())
        throw DomainError("langlands_probe: grid must stay inside the injectivity radius");
      if (r * r / (4.0 * t) > 600.0)
        throw DomainError(
            "langlands_probe: |g|^2/4t too large to evaluate the normalized ratio "
            "(the kernel underflows); shrink the r-grid with sqrt(t)");
      dir[0] = r;
      double ft = heat_kernel_eval(model, series, model.exp(dir)) / model.riemannian_volume();
      double ratio = ft * std::pow(t, 0.5 * model.dim()) * std::exp(r * r / (4.0 * t));
      ex.ratios.push_back(ratio);
      if (!std::isfinite(ratio)) throw NumericError("langlands_probe: non-finite ratio");
    }
  }
  // Deviation is judged on the smallest t in the grid (the limit statement).
  double tmin = *std::min_element(t_grid.begin(), t_grid.end());
  std::size_t row = 0;
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    if (t_grid[i] == tmin) row = i;
  for (std::size_t j = 0; j < r_grid.size(); ++j) {
    double ratio = ex.ratios[row * r_grid.size() + j];
    worst = std::max(worst, std::abs(ratio - ex.c0_e) / ex.c0_e);
  }
  ex.worst_rel_error = worst;
  return ex;
}

namespace {

struct KRule {
  std::vector<GroupElement> nodes;
  std::vector<double> weights;
  std::vector<complexd> chi_conj;  // conj chi_sigma at each node
};

KRule k_rule(const GroupModel& model, const SigmaSpec& spec, int bandwidth) {
  KRule r;
  if (spec.K == KDesignation::FullGroup) {
    HaarRule h = model.haar_rule(bandwidth);
    r.nodes = std::move(h.nodes);
    r.weights = std::move(h.weights);
    r.chi_conj.resize(r.nodes.size());
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
      r.chi_conj[i] = std::conj(model.character(spec.sigma, r.nodes[i]));
    return r;
  }
  // Maximal torus of SU(2): alpha in [0, 4 pi), weight-n character e^{i n alpha}.
  if (model.kind() != GroupKind::SU2 && model.kind() != GroupKind::SO3)
    throw DomainError("torus K designation requires su2/so3");
  int n_nodes = std::max(8, 2 * bandwidth + 2);
  auto tr = periodic_trapezoid(n_nodes, 2.0 * kTwoPi);
  int weight = spec.sigma.label.at(0);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    r.nodes.push_back(model.torus_element(tr.nodes[i]));
    r.weights.push_back(1.0 / n_nodes);
    r.chi_conj.push_back(std::polar(1.0, -weight * tr.nodes[i]));
  }
  return r;
}

}  // namespace

complexd h_sigma_kernel(const GroupModel& model,
                        const std::function<complexd(const GroupElement&)>& f,
                        const SigmaSpec& sigma, const GroupElement& g, int k_bandwidth) {
  KRule rule = k_rule(model, sigma, k_bandwidth);
  const double d2 = static_cast<double>(sigma.sigma.dimension) * sigma.sigma.dimension;
  const std::size_t n = rule.nodes.size();
  std::vector<GroupElement> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[i] = model.inverse(rule.nodes[i]);
  complexd acc = parallel_sum_complex(n * n, [&](std::size_t idx) {
    std::size_t i = idx / n, j = idx % n;  // i ~ k1, j ~ k
    GroupElement arg = model.multiply(inv[i], model.multiply(g, inv[j]));
    return f(arg) * rule.chi_conj[i] * rule.chi_conj[j] * (rule.weights[i] * rule.weights[j]);
  });
  return d2 * acc;
}

complexd bundle_kernel(const GroupModel& su2, int charge, double t, const GroupElement& g,
                       int k_nodes, const HeatOptions& opts) {
  if (su2.kind() != GroupKind::SU2) throw DomainError("bundle_kernel: needs the su2 model");
  auto series = build_heat_series(su2, t, opts);
  // torus frequencies reach 2 j_max + |charge|; the trapezoid count must exceed
  // twice that (frequencies live in half-integers over [0, 4 pi))
  int two_jmax = static_cast<int>(std::sqrt(1.0 + 4.0 * series.lambda_max));
  k_nodes = std::max(k_nodes, 2 * (two_jmax + std::abs(charge)) + 4);
  auto tr = periodic_trapezoid(k_nodes, 2.0 * kTwoPi);
  const double lambda_sigma = static_cast<double>(charge) * charge;
  complexd acc = parallel_sum_complex(
      static_cast<std::size_t>(k_nodes) * k_nodes, [&](std::size_t idx) {
        std::size_t i = idx / k_nodes, j = idx % k_nodes;  // i ~ k, j ~ k1
        GroupElement k = su2.torus_element(tr.nodes[i]);
        GroupElement k1 = su2.torus_element(tr.nodes[j]);
        GroupElement arg = su2.multiply(su2.inverse(k), su2.multiply(g, k1));
        double p = heat_kernel_eval(su2, series, arg);
        complexd pi_sigma = std::polar(1.0, charge * (tr.nodes[i] - tr.nodes[j]));
        return p * pi_sigma / static_cast<double>(k_nodes) / static_cast<double>(k_nodes);
      });
  return std::exp(t * lambda_sigma) * acc;
}

double convolve_at(const GroupModel& model, const HeatKernelSeries& f, const HeatKernelSeries& h,
                   const GroupElement& g, int bandwidth) {
  HaarRule rule = model.haar_rule(bandwidth);
  return parallel_sum(rule.size(), [&](std::size_t i) {
    GroupElement u = rule.nodes[i];
    GroupElement arg = model.multiply(g, model.inverse(u));
    return heat_kernel_eval(model, f, arg) * heat_kernel_eval(model, h, u) * rule.weights[i];
  });
}

}  // namespace equiheat
