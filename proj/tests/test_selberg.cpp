#include <cmath>

#include "doctest.h"
#include "equiheat/errors.hpp"
#include "equiheat/selberg.hpp"
#include "equiheat/traces.hpp"
#include "equiheat/symplectic.hpp"

using namespace equiheat;

namespace {

// series oracle: sum over integer j of (2j+1)^2 e^{-t j(j+1)}
double z2_selberg_oracle(double t) {
  double s = 0.0;
  for (int j = 0; j < 200; ++j) {
    double term = (2.0 * j + 1.0) * (2.0 * j + 1.0) * std::exp(-t * j * (j + 1.0));
    s += term;
    if (term < 1e-18 * s) break;
  }
  return s;
}

// weight-space counting oracle for Z_N: m_j = #{mu in {-j..j} : N | 2 mu}
int weight_count_oracle(int order, int two_j) {
  int count = 0;
  for (int two_mu = -two_j; two_mu <= two_j; two_mu += 2)
    if (two_mu % order == 0) ++count;
  return count;
}

}  // namespace

TEST_CASE("cyclic lattices: structure and covolume") {
  GroupModel su2 = GroupModel::make("su2");
  for (int order : {1, 2, 3, 4, 6}) {
    FiniteLattice L = make_cyclic_lattice(su2, order);
    CHECK(L.order == order);
    CHECK(static_cast<int>(L.elements.size()) == order);
    CHECK(L.covolume == doctest::Approx(1.0 / order));
    int class_total = 0;
    for (const auto& c : L.classes) class_total += static_cast<int>(c.size());
    CHECK(class_total == order);
    for (int co : L.centralizer_order) CHECK(order % co == 0);
    // group closure: gamma_1^order = identity
    GroupElement acc = su2.identity();
    for (int i = 0; i < order; ++i) acc = su2.multiply(acc, L.elements[1 % order]);
    CHECK(su2.distance(acc) < 1e-10);
  }
}

TEST_CASE("lattice multiplicities: trivial lattice and Z2 parity") {
  GroupModel su2 = GroupModel::make("su2");
  FiniteLattice e = make_cyclic_lattice(su2, 1);
  for (const auto& [rho, m] : lattice_multiplicities(su2, e, 12.0))
    CHECK(m == rho.dimension);  // m_rho = dim V_rho for the trivial lattice
  FiniteLattice z2 = make_cyclic_lattice(su2, 2);
  for (const auto& [rho, m] : lattice_multiplicities(su2, z2, 12.0)) {
    bool integer_spin = rho.label[0] % 2 == 0;
    CHECK(m == (integer_spin ? rho.dimension : 0));
  }
}

TEST_CASE("lattice multiplicities match the weight-counting oracle") {
  GroupModel su2 = GroupModel::make("su2");
  for (int order : {3, 4, 5}) {
    FiniteLattice L = make_cyclic_lattice(su2, order);
    for (const auto& [rho, m] : lattice_multiplicities(su2, L, 20.0))
      CHECK(m == weight_count_oracle(order, rho.label[0]));
  }
}

TEST_CASE("selberg: trivial lattice reduces to the kernel at the identity") {
  GroupModel su2 = GroupModel::make("su2");
  FiniteLattice e = make_cyclic_lattice(su2, 1);
  SelbergReport rep = selberg_sides(su2, e, 0.4);
  double pte = heat_kernel_eval(su2, 0.4, su2.identity());
  CHECK(rep.geometric == doctest::Approx(pte).epsilon(1e-12));
  CHECK(rep.spectral == doctest::Approx(pte).epsilon(1e-12));
  CHECK(rep.residual < 1e-12);
}

TEST_CASE("selberg: z2 at t = 0.5 hits the series oracle on both sides") {
  GroupModel su2 = GroupModel::make("su2");
  FiniteLattice z2 = make_cyclic_lattice(su2, 2);
  SelbergReport rep = selberg_sides(su2, z2, 0.5);
  double oracle = z2_selberg_oracle(0.5);
  // frozen from the oracle: 5.6807650732 (direct summation)
  CHECK(oracle == doctest::Approx(5.680765073188618).epsilon(1e-12));
  CHECK(rep.spectral == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(rep.geometric == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(rep.residual < 1e-8);
}

TEST_CASE("selberg residual below 1e-8 for Z2, Z3, Z4 across t") {
  GroupModel su2 = GroupModel::make("su2");
  for (int order : {2, 3, 4}) {
    FiniteLattice L = make_cyclic_lattice(su2, order);
    for (double t : {0.3, 0.5, 1.0}) {
      SelbergReport rep = selberg_sides(su2, L, t);
      CHECK(rep.residual < 1e-8);
    }
  }
}

TEST_CASE("orbital integrals of class functions collapse to point values") {
  GroupModel su2 = GroupModel::make("su2");
  GroupElement gamma = su2.torus_element(2.0 * kTwoPi / 3.0);
  auto series = build_heat_series(su2, 0.4);
  auto f = [&](const GroupElement& g) {
    return complexd(heat_kernel_eval(su2, series, g), 0.0);
  };
  complexd orb = orbital_integral(su2, gamma, f, 32);
  CHECK(orb.real() == doctest::Approx(heat_kernel_eval(su2, series, gamma)).epsilon(1e-10));
  CHECK(std::abs(orb.imag()) < 1e-12);
}

TEST_CASE("kernel periodization: finite lattice sums exactly") {
  GroupModel su2 = GroupModel::make("su2");
  FiniteLattice z3 = make_cyclic_lattice(su2, 3);
  auto series = build_heat_series(su2, 0.5);
  auto f = [&](const GroupElement& g) {
    return complexd(heat_kernel_eval(su2, series, g), 0.0);
  };
  std::mt19937_64 rng(3);
  GroupElement g = su2.random_element(rng), h = su2.random_element(rng);
  complexd got = kernel_periodization(su2, z3, f, g, h);
  complexd expect = 0.0;
  for (const auto& gamma : z3.elements)
    expect += f(su2.multiply(su2.inverse(g), su2.multiply(gamma, h)));
  CHECK(std::abs(got - expect) < 1e-13);
}

TEST_CASE("line heat periodization matches the circle kernel") {
  // k_f(0,0) for f the line heat kernel equals p_t(0)/(2 pi) on the circle
  GroupModel u1 = GroupModel::make("u1");
  for (double t : {0.05, 0.3, 1.0}) {
    LinePeriodizationResult res = line_heat_periodization(t, 0.0, 0.0);
    double pt0 = heat_kernel_eval(u1, t, u1.identity());
    CHECK(kTwoPi * res.value == doctest::Approx(pt0).epsilon(1e-10));
    CHECK(res.tail_bound < 1e-12 * res.value);
    CHECK(res.critical_exponent_estimate == doctest::Approx(0.0));
  }
  // off-diagonal too
  LinePeriodizationResult res = line_heat_periodization(0.2, 0.3, 1.0);
  GroupElement g;
  g.data = {0.7, 0, 0, 0};
  CHECK(kTwoPi * res.value ==
        doctest::Approx(heat_kernel_eval(u1, 0.2, g)).epsilon(1e-10));
}

TEST_CASE("poincare series on 2 pi Z converges for every probed s") {
  for (double s : {0.05, 0.1, 0.5, 1.0}) {
    double tail = 0.0;
    double value = poincare_series_probe(s, 200, &tail);
    CHECK(value > 1.0);
    CHECK(tail < 1e-8 * value);
    // geometric-series oracle: 1 + 2 q/(1-q), q = e^{-2 pi s}
    double q = std::exp(-kTwoPi * s);
    CHECK(value == doctest::Approx(1.0 + 2.0 * q / (1.0 - q)).epsilon(1e-8));
  }
}

TEST_CASE("bundle heat trace: classical sphere and charge-1 oracle") {
  GroupModel su2 = GroupModel::make("su2");
  // n = 0, t = 0.2: the classical S^2 heat trace
  double cls = 0.0;
  for (int l = 0; l < 200; ++l) cls += (2.0 * l + 1.0) * std::exp(-0.2 * l * (l + 1.0));
  CHECK(bundle_heat_trace_spectral(0, 0.2) == doctest::Approx(cls).epsilon(1e-12));
  // n = 1, t = 1: three-term oracle 3 e^{-1} + 5 e^{-5} + 7 e^{-11} + ...
  double three = 3.0 * std::exp(-1.0) + 5.0 * std::exp(-5.0) + 7.0 * std::exp(-11.0);
  CHECK(bundle_heat_trace_spectral(1, 1.0) == doctest::Approx(three).epsilon(1e-4));
  CHECK(bundle_heat_trace_spectral(1, 1.0) ==
        doctest::Approx(1.137445020843252).epsilon(1e-12));  // frozen full sum
}

TEST_CASE("bundle trace routes agree within 1e-6") {
  GroupModel su2 = GroupModel::make("su2");
  for (int n : {0, 1, 2}) {
    for (double t : {0.5, 0.2, 0.05}) {
      double spectral = bundle_heat_trace_spectral(n, t);
      double kernel = bundle_heat_trace_kernel(su2, n, t);
      CHECK(std::abs(kernel - spectral) < 1e-6 * spectral);
    }
  }
}

TEST_CASE("bundle trace small-t fit: exponent 1, coefficient Area/4pi = 1") {
  for (int n : {0, 1, 2}) {
    TraceCurve curve;
    for (int k = 0; k <= 10; ++k) {
      double t = 0.1 * std::pow(2.0, -k);
      double tail = 0.0;
      double v = bundle_heat_trace_spectral(n, t, &tail) * std::exp(-t * n * n);
      curve.t.push_back(t);
      curve.value.push_back(v);
      curve.bound.push_back(tail);
    }
    PowerLawFit fit = fit_small_time_extrapolated(curve);
    CHECK(fit.alpha == doctest::Approx(1.0).epsilon(0.02));
    CHECK(fit.coefficient == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("theorem-5 structure: multiplicity x gaussian volume matches the spectral coefficient") {
  // leading coefficient of e^{-t lambda_sigma} tr = [int_H tr pi_sigma] vol~ / (2 pi)^2
  SpaceModel st = SpaceModel::make("su2_torus");
  CriticalGeometry geo = analyze_geometry(st, 4000, 7);
  for (int n : {0, 1, 2}) {
    double factor = h_bundle_trace_factor(st, geo, {{n}});
    CHECK(factor == doctest::Approx(1.0).epsilon(1e-12));  // 1x1 blocks
    double predicted = factor * geo.vol_estimate / std::pow(kTwoPi, 2);
    CHECK(predicted == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("m_rho integrality is enforced") {
  GroupModel su2 = GroupModel::make("su2");
  FiniteLattice L = make_cyclic_lattice(su2, 4);
  // character averages must land on integers within 1e-10; the bundled
  // lattices satisfy it by construction
  auto mults = lattice_multiplicities(su2, L, 30.0);
  for (const auto& [rho, m] : mults) {
    complexd avg = 0.0;
    for (const auto& g : L.elements) avg += su2.character(rho, g);
    avg /= 4.0;
    CHECK(std::abs(avg.real() - m) < 1e-10);
    CHECK(std::abs(avg.imag()) < 1e-10);
  }
}
