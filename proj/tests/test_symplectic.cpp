#include <cmath>
#include <random>

#include "doctest.h"
#include "equiheat/errors.hpp"
#include "equiheat/oscillatory.hpp"
#include "equiheat/symplectic.hpp"

using namespace equiheat;

namespace {

CotangentPoint t1_point(double x, double xi) {
  CotangentPoint pt;
  pt.chart = kChartBundled;
  pt.p.v[0] = x;
  pt.base = {x};
  pt.xi = {xi};
  return pt;
}

CotangentPoint s2_point(double theta, double phi, double xi_t, double xi_p) {
  CotangentPoint pt;
  pt.chart = kChartBundled;
  pt.base = {theta, phi};
  pt.xi = {xi_t, xi_p};
  pt.p.v = {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
            std::cos(theta), 0.0};
  return pt;
}

}  // namespace

TEST_CASE("momentum pairing: zero covector and flat translations") {
  SpaceModel t1 = SpaceModel::make("t1");
  CHECK(momentum_eval(t1, t1_point(0.4, 0.0), 0) == doctest::Approx(0.0));
  CHECK(momentum_eval(t1, t1_point(0.4, 1.7), 0) == doctest::Approx(1.7));
  CHECK(momentum_eval(t1, t1_point(0.4, 1.7), 1) == doctest::Approx(1.7));
}

TEST_CASE("momentum pairing on the equator of s2") {
  SpaceModel s2 = SpaceModel::make("s2");
  // xi = c dphi at the equator pairs with the z-rotation field to c
  double c = 0.83;
  CotangentPoint pt = s2_point(0.5 * kPi, 0.7, 0.0, c);
  CHECK(momentum_eval(s2, pt, 0) == doctest::Approx(c).epsilon(1e-12));
  CHECK(momentum_eval(s2, pt, 1) == doctest::Approx(c).epsilon(1e-12));
  // xi = c dTheta annihilates the rotation field
  CotangentPoint zero = s2_point(0.5 * kPi, 0.7, c, 0.0);
  CHECK(std::abs(momentum_eval(s2, zero, 0)) < 1e-14);
}

TEST_CASE("momentum is chart-consistent across the stereographic overlap") {
  SpaceModel s2 = SpaceModel::make("s2");
  // a covector given in chart 0 transforms covariantly to chart 1; the
  // momentum pairing must agree
  SpacePoint p;
  double th = 0.5 * kPi + 0.3, ph = 1.2;
  p.v = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th), 0.0};
  auto x0 = s2.chart_coords(0, p);
  auto x1 = s2.chart_coords(1, p);
  CotangentPoint a;
  a.chart = 0;
  a.p = p;
  a.base = x0;
  a.xi = {0.9, -0.4};
  // transform components: xi1 = (d(phi0 o phi1^{-1}))^T xi0 via finite differences
  double h = 1e-6;
  CotangentPoint b;
  b.chart = 1;
  b.p = p;
  b.base = x1;
  b.xi = {0.0, 0.0};
  for (int j = 0; j < 2; ++j) {
    // columns of the Jacobian d x0 / d x1
    auto x1p = x1, x1m = x1;
    x1p[j] += h;
    x1m[j] -= h;
    auto x0p = s2.chart_coords(0, s2.chart_point(1, x1p));
    auto x0m = s2.chart_coords(0, s2.chart_point(1, x1m));
    for (int i = 0; i < 2; ++i) b.xi[j] += a.xi[i] * (x0p[i] - x0m[i]) / (2.0 * h);
  }
  for (int gen = 0; gen < 2; ++gen)
    CHECK(momentum_eval(s2, a, gen) == doctest::Approx(momentum_eval(s2, b, gen)).epsilon(1e-6));
}

TEST_CASE("fhat equals the gaussian closed form") {
  // oracle: F(p, xi) = exp(-sum_l <xi, X_l~(p)>^2)  (Fourier transform of the
  // quarter Gaussian), computed here from the model momenta
  SpaceModel s2 = SpaceModel::make("s2");
  for (double c : {0.0, 0.5, 1.5, 3.0}) {
    CotangentPoint pt = s2_point(1.1, 0.4, c, 0.0);
    auto v = g_momentum(s2, pt);
    double v2 = 0.0;
    for (double x : v) v2 += x * x;
    CHECK(v2 == doctest::Approx(c * c).epsilon(1e-12));  // hand-computed |J_G|^2 = c^2
    CHECK(fhat(s2, pt) == doctest::Approx(std::exp(-v2)).epsilon(1e-9));
  }
  SpaceModel su2 = SpaceModel::make("su2_torus");
  CotangentPoint pt;
  pt.chart = kChartLeftTrivialized;
  pt.p.v = {1.0, 0.0, 0.0, 0.0};
  pt.xi = {0.7, -0.3, 0.0};
  CHECK(fhat(su2, pt) == doctest::Approx(std::exp(-(0.49 + 0.09))).epsilon(1e-9));
}

TEST_CASE("isotropy analysis: kappa, Lambda, principal isotropy") {
  SpaceModel t1 = SpaceModel::make("t1");
  CriticalGeometry g1 = isotropy_analysis(t1);
  CHECK(g1.kappa == 1);
  CHECK(g1.lambda_chain == 1);

  SpaceModel s2 = SpaceModel::make("s2");
  CriticalGeometry g2 = isotropy_analysis(s2);
  CHECK(g2.kappa == 1);
  CHECK(g2.lambda_chain == 2);  // generic stratum + poles

  SpaceModel su2 = SpaceModel::make("su2");
  CriticalGeometry g3 = isotropy_analysis(su2);
  CHECK(g3.kappa == 3);
  CHECK(g3.lambda_chain == 1);

  SpaceModel st = SpaceModel::make("su2_torus");
  CriticalGeometry g4 = isotropy_analysis(st);
  CHECK(g4.kappa == 1);

  SpaceModel t2 = SpaceModel::make("t2");
  CriticalGeometry g5 = isotropy_analysis(t2);
  CHECK(g5.kappa == 2);

  // kappa = dim KK - dim H on all bundled models
  CHECK(g1.kappa == 2 - 1);
  CHECK(g2.kappa == 2 - 1);
  CHECK(g3.kappa == 6 - 3);
  CHECK(g4.kappa == 2 - 1);
  CHECK(g5.kappa == 4 - 2);
}

TEST_CASE("sampled zero level: momentum vanishes, weights positive") {
  for (const char* name : {"t1", "s2", "su2", "su2_torus"}) {
    SpaceModel sp = SpaceModel::make(name);
    CriticalGeometry geo = isotropy_analysis(sp);
    sample_regular_zero_level(sp, geo, name[1] == 'u' ? 1500 : 1024);
    CHECK(geo.samples.size() >= 1000);
    for (std::size_t i = 0; i < geo.samples.size(); i += 97) {
      auto J = momentum_map(sp, geo.samples[i].pt);
      for (double j : J) CHECK(std::abs(j) < 1e-10);
      CHECK(geo.samples[i].weight > 0.0);
      CHECK(geo.samples[i].orbit_volume > 0.0);
    }
  }
}

TEST_CASE("orbit volumes: t1 circle, s2 monotone growth, pole error") {
  SpaceModel t1 = SpaceModel::make("t1");
  CHECK(orbit_volume(t1, t1_point(0.3, 0.0)) == doctest::Approx(kTwoPi).epsilon(1e-12));

  SpaceModel s2 = SpaceModel::make("s2");
  double prev = 0.0;
  for (double c : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    double vol = orbit_volume(s2, s2_point(1.0, 0.3, c, 0.0));
    // hand value: 2 pi sqrt(sin^2 + c^2 cos^2)
    double expect = kTwoPi * std::sqrt(std::pow(std::sin(1.0), 2) +
                                       c * c * std::pow(std::cos(1.0), 2));
    CHECK(vol == doctest::Approx(expect).epsilon(1e-10));
    CHECK(vol >= prev);
    prev = vol;
  }
  CHECK_THROWS_AS(orbit_volume(s2, s2_point(1e-9, 0.3, 1.0, 0.0)), NumericError);

  // su2 both-sided: zero-section orbit is the whole group
  SpaceModel su2 = SpaceModel::make("su2");
  CotangentPoint pt;
  pt.chart = kChartLeftTrivialized;
  pt.p.v = {1, 0, 0, 0};
  pt.xi = {0, 0, 0};
  CHECK(orbit_volume(su2, pt) == doctest::Approx(16.0 * kPi * kPi).epsilon(1e-10));

  // su2_torus: 4 pi sqrt(1 + |lambda_perp|^2 / 4)
  SpaceModel st = SpaceModel::make("su2_torus");
  CotangentPoint q;
  q.chart = kChartLeftTrivialized;
  q.p.v = {1, 0, 0, 0};
  q.xi = {1.2, -0.5, 0.0};
  double l2 = 1.2 * 1.2 + 0.25;
  CHECK(orbit_volume(st, q) ==
        doctest::Approx(2.0 * kTwoPi * std::sqrt(1.0 + 0.25 * l2)).epsilon(1e-10));
}

TEST_CASE("gaussian volumes hit the spectrally implied targets") {
  // t1 and t2: exactly 1 under the normalization
  SpaceModel t1 = SpaceModel::make("t1");
  CriticalGeometry g1 = analyze_geometry(t1, 1024, 7);
  CHECK(g1.vol_estimate == doctest::Approx(1.0).epsilon(1e-10));

  SpaceModel t2 = SpaceModel::make("t2");
  CriticalGeometry g2 = analyze_geometry(t2, 1200, 7);
  CHECK(g2.vol_estimate == doctest::Approx(1.0).epsilon(1e-10));

  // s2: pi^(3/2), the Euler-Maclaurin constant times 2 pi
  SpaceModel s2 = SpaceModel::make("s2");
  CriticalGeometry g3 = analyze_geometry(s2, 4096, 7);
  CHECK(g3.vol_estimate == doctest::Approx(std::pow(kPi, 1.5)).epsilon(0.02));
  CHECK(std::abs(g3.vol_estimate - std::pow(kPi, 1.5)) < 0.001 * std::pow(kPi, 1.5));

  // su2 both-sided: exactly 1
  SpaceModel su2 = SpaceModel::make("su2");
  CriticalGeometry g4 = analyze_geometry(su2, 2000, 7);
  CHECK(g4.vol_estimate == doctest::Approx(1.0).epsilon(0.01));

  // su2_torus: 4 pi^2 (the bundle picture of theorem-5 form)
  SpaceModel st = SpaceModel::make("su2_torus");
  CriticalGeometry g5 = analyze_geometry(st, 4000, 7);
  CHECK(g5.vol_estimate == doctest::Approx(4.0 * kPi * kPi).epsilon(0.02));
}

TEST_CASE("gaussian volume stability and linearity") {
  SpaceModel s2 = SpaceModel::make("s2");
  CriticalGeometry a = analyze_geometry(s2, 2048, 7);
  CriticalGeometry b = analyze_geometry(s2, 4096, 7);
  CHECK(std::abs(a.vol_estimate - b.vol_estimate) <=
        a.vol_error + b.vol_error + 1e-10 * std::abs(a.vol_estimate));
  // doubling the partition amplitudes doubles the output (linearity)
  CriticalGeometry c = isotropy_analysis(s2, 7);
  sample_regular_zero_level(s2, c, 2048);
  gaussian_volume(s2, c, {}, 2.0);
  CHECK(c.vol_estimate == doctest::Approx(2.0 * a.vol_estimate).epsilon(1e-6));

  // MC variants: budget doubling stays within the error bar
  SpaceModel st = SpaceModel::make("su2_torus");
  CriticalGeometry m1 = analyze_geometry(st, 2000, 11);
  CriticalGeometry m2 = analyze_geometry(st, 4000, 11);
  CHECK(std::abs(m1.vol_estimate - m2.vol_estimate) <= m1.vol_error + m2.vol_error);
}

TEST_CASE("h multiplicity is 1 for every bundled sigma") {
  for (const char* name : {"t1", "s2", "su2", "su2_torus"}) {
    SpaceModel sp = SpaceModel::make(name);
    CriticalGeometry geo = isotropy_analysis(sp);
    for (const auto& sigma : sp.bundled_sigmas())
      CHECK(h_multiplicity(sp, geo, sigma) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("disintegration identity on t1 (quadrature route)") {
  SpaceModel t1 = SpaceModel::make("t1");
  CriticalGeometry geo = analyze_geometry(t1, 2048, 7);
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    double a1 = u(rng), a2 = u(rng), b1 = u(rng), b2 = u(rng);
    OscAmplitude amp;
    amp.base = [a1, a2](const std::vector<double>& x) {
      return 1.0 + 0.5 * a1 * std::cos(x[0]) + 0.3 * a2 * std::sin(2.0 * x[0]);
    };
    amp.kk = [b1, b2](double th1, double th) {
      return complexd(1.0 + 0.4 * b1 * std::cos(th1 - th) + 0.2 * b2 * std::cos(th1 + th), 0.0);
    };
    double lhs = leading_L0(t1, amp, geo);
    double rhs_u = reg_xi_integral(t1, geo, [&](const CotangentPoint& pt) {
      double xi2 = pt.xi[0] * pt.xi[0];
      return amp.base(pt.base) * std::exp(-xi2);
    });
    complexd rhs_v = h_average(t1, geo, amp.kk);
    CHECK(lhs == doctest::Approx(rhs_u * rhs_v.real()).epsilon(1e-6));
  }
}

TEST_CASE("disintegration identity on s2") {
  SpaceModel s2 = SpaceModel::make("s2");
  CriticalGeometry geo = analyze_geometry(s2, 4096, 7);
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 5; ++rep) {
    double a1 = u(rng), b1 = u(rng);
    OscAmplitude amp;
    amp.base = [a1](const std::vector<double>& x) {
      // smooth band bump in Theta, uniform in phi
      double t = (x[0] - 0.5 * kPi) / 0.9;
      double bump = std::exp(-3.0 * t * t);
      return bump * (1.0 + 0.4 * a1 * std::cos(x[0]));
    };
    amp.kk = [b1](double th1, double th) {
      return complexd(1.0 + 0.5 * b1 * std::cos(th1 - th), 0.0);
    };
    double lhs = leading_L0(s2, amp, geo);
    double rhs_u = reg_xi_integral(s2, geo, [&](const CotangentPoint& pt) {
      double xi2 = pt.xi[0] * pt.xi[0] + pt.xi[1] * pt.xi[1];
      return amp.base(pt.base) * std::exp(-xi2);
    });
    complexd rhs_v = h_average(s2, geo, amp.kk);
    CHECK(lhs == doctest::Approx(rhs_u * rhs_v.real()).epsilon(1e-3));
  }
}

TEST_CASE("disintegration identity on su2 both-sided") {
  SpaceModel su2 = SpaceModel::make("su2");
  CriticalGeometry geo = analyze_geometry(su2, 1200, 7);
  OscAmplitude amp;
  amp.phase_space = [](const CotangentPoint& pt) {
    return 1.0 + 0.3 * pt.p.v[0];  // smooth function of the base point
  };
  amp.kk_su2 = [&](const GroupElement& k1, const GroupElement& k) {
    (void)k1;
    (void)k;
    return complexd(1.0, 0.0);
  };
  double lhs = leading_L0(su2, amp, geo);
  double rhs_u = reg_xi_integral(su2, geo, amp.phase_space);
  CHECK(lhs == doctest::Approx(rhs_u).epsilon(1e-2));
}

TEST_CASE("sampler rejects misuse") {
  SpaceModel s2 = SpaceModel::make("s2");
  CriticalGeometry geo = isotropy_analysis(s2);
  CHECK_THROWS_AS(sample_regular_zero_level(s2, geo, 10), DomainError);
  CriticalGeometry empty;
  CHECK_THROWS_AS(gaussian_volume(s2, empty), DomainError);
}
