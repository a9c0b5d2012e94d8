#include "equiheat/selberg.hpp"

#include <algorithm>
#include <cmath>

#include "equiheat/errors.hpp"

namespace equiheat {

FiniteLattice make_cyclic_lattice(const GroupModel& su2, int order) {
  if (su2.kind() != GroupKind::SU2) throw DomainError("lattice: needs the su2 model");
  if (order < 1) throw DomainError("lattice: order must be >= 1");
  FiniteLattice L;
  L.name = "z" + std::to_string(order);
  L.order = order;
  L.covolume = 1.0 / order;
  for (int m = 0; m < order; ++m) {
    // gamma_m = diag(e^{2 pi i m/N}, e^{-2 pi i m/N}) = z(4 pi m / N)
    L.elements.push_back(su2.torus_element(2.0 * kTwoPi * m / order));
  }
  for (int m = 0; m < order; ++m) {
    L.classes.push_back({m});  // abelian: singleton classes
    L.centralizer_order.push_back(order);
    double w = L.elements[m].data[0];
    L.central_in_g.push_back(std::abs(std::abs(w) - 1.0) < 1e-12);
  }
  return L;
}

std::vector<std::pair<IrrepInfo, int>> lattice_multiplicities(const GroupModel& su2,
                                                              const FiniteLattice& lattice,
                                                              double lambda_cutoff) {
  std::vector<std::pair<IrrepInfo, int>> out;
  for (const auto& rho : su2.irreps(lambda_cutoff)) {
    complexd acc = 0.0;
    for (const auto& g : lattice.elements) acc += su2.character(rho, g);
    acc /= static_cast<double>(lattice.order);
    double m = acc.real();
    int mi = static_cast<int>(std::lround(m));
    if (std::abs(m - mi) > 1e-10 || std::abs(acc.imag()) > 1e-10)
      throw NumericError("lattice_multiplicities: non-integer character average for " +
                         lattice.name);
    out.emplace_back(rho, mi);
  }
  return out;
}

complexd orbital_integral(const GroupModel& su2, const GroupElement& gamma,
                          const std::function<complexd(const GroupElement&)>& f, int nodes) {
  // G_gamma = maximal torus T_z for non-central gamma; T\G is parametrized by
  // the flag direction: cosets T g <-> R(g^{-1}) z-hat on the unit sphere, with
  // the normalized quotient measure = the uniform sphere measure.
  auto gl = gauss_legendre(nodes, -1.0, 1.0);
  auto tr = periodic_trapezoid(2 * nodes, kTwoPi);
  KahanSum re, im;
  for (int i = 0; i < nodes; ++i)
    for (std::size_t j = 0; j < tr.size(); ++j) {
      double z = gl.nodes[i], s = std::sqrt(1.0 - z * z);
      double phi = tr.nodes[j];
      // coset representative: rotation taking z-hat to (s cos phi, s sin phi, z)
      double half = 0.5 * std::acos(std::clamp(z, -1.0, 1.0));
      // axis = z-hat x target, normalized
      double ax = -std::sin(phi), ay = std::cos(phi);
      GroupElement rep;
      rep.data = {std::cos(half), std::sin(half) * ax, std::sin(half) * ay, 0.0};
      GroupElement arg =
          su2.multiply(su2.inverse(rep), su2.multiply(gamma, rep));
      complexd v = f(arg) * (gl.weights[i] * tr.weights[j] / (2.0 * kTwoPi));
      re.add(v.real());
      im.add(v.imag());
    }
  return {re.value(), im.value()};
}

SelbergReport selberg_sides(const GroupModel& su2, const FiniteLattice& lattice, double t,
                            int orbital_nodes, const HeatOptions& opts) {
  SelbergReport rep;
  rep.t = t;
  auto series = build_heat_series(su2, t, opts);
  rep.truncation = series.tail_bound;

  // spectral side: sum_rho m_rho d_rho e^{-t lambda_rho}
  auto mults = lattice_multiplicities(su2, lattice, series.lambda_max);
  KahanSum spectral;
  for (const auto& [rho, m] : mults) {
    double term = m * rho.dimension * std::exp(-t * rho.casimir);
    rep.spectral_terms.push_back(term);
    spectral.add(term);
  }
  rep.spectral = spectral.value();

  // geometric side: vol(Gamma_gamma \ G_gamma) * orbital integral per class
  auto f = [&](const GroupElement& g) {
    return complexd(heat_kernel_eval(su2, series, g), 0.0);
  };
  KahanSum geometric;
  for (std::size_t c = 0; c < lattice.classes.size(); ++c) {
    const GroupElement& gamma = lattice.elements[lattice.classes[c][0]];
    double contrib;
    if (lattice.central_in_g[c]) {
      // G_gamma = G: the orbital integral collapses to f(gamma), and
      // vol(Gamma_gamma\G_gamma) = vol(Gamma\G) = 1/|Gamma|
      contrib = lattice.covolume * heat_kernel_eval(su2, series, gamma);
    } else {
      // G_gamma = maximal torus (normalized mass 1): vol = 1/|Gamma_gamma|
      double vol = 1.0 / lattice.centralizer_order[c];
      contrib = vol * orbital_integral(su2, gamma, f, orbital_nodes).real() *
                static_cast<double>(lattice.classes[c].size());
    }
    rep.class_contributions.push_back(contrib);
    geometric.add(contrib);
  }
  rep.geometric = geometric.value();
  rep.residual = std::abs(rep.spectral - rep.geometric) / std::abs(rep.spectral);
  return rep;
}

complexd kernel_periodization(const GroupModel& group, const FiniteLattice& lattice,
                              const std::function<complexd(const GroupElement&)>& f,
                              const GroupElement& g, const GroupElement& h) {
  complexd acc = 0.0;
  GroupElement gi = group.inverse(g);
  for (const auto& gamma : lattice.elements)
    acc += f(group.multiply(gi, group.multiply(gamma, h)));
  return acc;
}

LinePeriodizationResult line_heat_periodization(double t, double x, double y, double tol) {
  if (t <= 0) throw DomainError("line_heat_periodization: t must be positive");
  LinePeriodizationResult res;
  double pref = 1.0 / std::sqrt(4.0 * kPi * t);
  auto f = [&](double u) { return pref * std::exp(-u * u / (4.0 * t)); };
  double base = wrap_angle(y - x);
  KahanSum acc;
  acc.add(f(base));
  res.terms = 1;
  for (int m = 1;; ++m) {
    double a = f(base + kTwoPi * m), b = f(base - kTwoPi * m);
    acc.add(a);
    acc.add(b);
    res.terms += 2;
    // Gaussian majorant tail: (|u| >= r) mass < e^{-r^2/4t} / normalization
    double r = kTwoPi * (m + 1) - std::abs(base);
    double ratio = std::exp(-kTwoPi * (2.0 * r + kTwoPi) / (4.0 * t));
    double tail = 2.0 * f(r) / std::max(1e-300, 1.0 - ratio);
    if (tail < tol * std::max(acc.value(), 1e-300)) {
      res.tail_bound = tail;
      break;
    }
    if (m > 100000)
      throw BudgetError("line_heat_periodization: tail bound above tolerance at max radius",
                        tail, tol);
  }
  res.value = acc.value();
  // critical-exponent probe: the smallest probed s with a convergent
  // Poincare majorant; on 2 pi Z every s > 0 converges, so the estimate is
  // the bottom of the scan
  double delta = 0.0;
  for (double s : {0.4, 0.2, 0.1, 0.05}) {
    double tail = 0.0;
    poincare_series_probe(s, 64, &tail);
    if (tail < 1.0)
      delta = 0.0;
    else
      delta = std::max(delta, s);
  }
  res.critical_exponent_estimate = delta;
  return res;
}

double poincare_series_probe(double s, int max_terms, double* tail_bound) {
  if (s <= 0) throw DomainError("poincare_series_probe: s must be positive");
  KahanSum acc;
  acc.add(1.0);
  for (int m = 1; m <= max_terms; ++m) {
    acc.add(2.0 * std::exp(-s * kTwoPi * m));
  }
  if (tail_bound) {
    double q = std::exp(-s * kTwoPi);
    *tail_bound = 2.0 * std::pow(q, max_terms + 1) / (1.0 - q);
  }
  return acc.value();
}

double bundle_heat_trace_spectral(int charge, double t, double* tail_bound) {
  if (t <= 0) throw DomainError("bundle_heat_trace: t must be positive");
  int n = std::abs(charge);
  KahanSum acc;
  double tail = 0.0;
  for (int l = n;; ++l) {
    double term = (2.0 * l + 1.0) * std::exp(-t * (l * (l + 1.0) - n * n));
    acc.add(term);
    double ratio = std::exp(-2.0 * t * (l + 2.0)) * (2.0 * l + 5.0) / (2.0 * l + 3.0);
    if (ratio < 1.0) {
      double next = (2.0 * l + 3.0) * std::exp(-t * ((l + 1.0) * (l + 2.0) - n * n));
      tail = next / (1.0 - ratio);
      if (tail < 1e-12 * acc.value()) break;
    }
    if (l > 200000) throw TruncationError("bundle trace cutoff exceeded", l, 200000);
  }
  if (tail_bound) *tail_bound = tail;
  return acc.value();
}

double bundle_heat_trace_kernel(const GroupModel& su2, int charge, double t,
                                const HeatOptions& opts) {
  // tr e^{-t Delta_sigma} = tr_{V_sigma} h_t^sigma(e) for Gamma = {e}
  return bundle_kernel(su2, charge, t, su2.identity(), 128, opts).real();
}

}  // namespace equiheat
