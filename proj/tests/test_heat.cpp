#include <cmath>
#include <random>

#include "doctest.h"
#include "equiheat/errors.hpp"
#include "equiheat/heat.hpp"

using namespace equiheat;

namespace {

// independent oracle: direct summation of sum_{n in Z} e^{-t n^2 + i n theta}
double u1_series_oracle(double t, double theta) {
  double s = 1.0;
  for (int n = 1; n < 4000; ++n) {
    double term = 2.0 * std::exp(-t * n * n) * std::cos(n * theta);
    s += term;
    if (std::exp(-t * n * n) < 1e-18) break;
  }
  return s;
}

// independent oracle: wrapped Gaussian via Poisson summation
double u1_wrapped_gaussian(double t, double theta) {
  double s = 0.0;
  for (int m = -40; m <= 40; ++m) {
    double u = theta + kTwoPi * m;
    s += std::exp(-u * u / (4.0 * t));
  }
  return kTwoPi * s / std::sqrt(4.0 * kPi * t);
}

GroupElement angle(double theta) {
  GroupElement g;
  g.data = {theta, 0, 0, 0};
  return g;
}

}  // namespace

TEST_CASE("u1 heat kernel against the direct-summation oracle") {
  GroupModel u1 = GroupModel::make("u1");
  double oracle = u1_series_oracle(1.0, 0.0);
  // frozen from two independent routes (direct sum and Poisson summation)
  CHECK(oracle == doctest::Approx(1.7726372048266521).epsilon(1e-13));
  CHECK(u1_wrapped_gaussian(1.0, 0.0) == doctest::Approx(oracle).epsilon(1e-13));
  CHECK(heat_kernel_eval(u1, 1.0, u1.identity()) == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("heat kernel tends to 1 for large t") {
  for (const char* name : {"u1", "t2", "su2", "so3"}) {
    GroupModel g = GroupModel::make(name);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 5; ++i) {
      double v = heat_kernel_eval(g, 40.0, g.random_element(rng));
      CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("u1 small-time kernel equals the wrapped gaussian") {
  GroupModel u1 = GroupModel::make("u1");
  for (double theta : {0.0, 0.4, 2.0}) {
    double got = heat_kernel_eval(u1, 0.01, angle(theta));
    CHECK(got == doctest::Approx(u1_wrapped_gaussian(0.01, theta)).epsilon(1e-10));
  }
}

TEST_CASE("certified tail bound covers the true truncation error") {
  GroupModel su2 = GroupModel::make("su2");
  auto series = build_heat_series(su2, 0.3);
  double v = heat_kernel_eval(su2, series, su2.identity());
  CHECK(series.tail_bound < 1e-12 * v);
  // recompute with a much larger cutoff; difference within the bound
  HeatOptions tight;
  tight.rel_tol = 1e-15;
  double v2 = heat_kernel_eval(su2, build_heat_series(su2, 0.3, tight), su2.identity());
  CHECK(std::abs(v2 - v) <= series.tail_bound + 1e-13 * v);
}

TEST_CASE("error paths: bad t, order q, truncation cap") {
  GroupModel u1 = GroupModel::make("u1");
  CHECK_THROWS_AS(build_heat_series(u1, -1.0), DomainError);
  HeatOptions q3;
  q3.q = 3;
  CHECK_THROWS_AS(build_heat_series(u1, 1.0, q3), NotInstantiatedError);
  HeatOptions capped;
  capped.lambda_cap = 100.0;
  try {
    build_heat_series(u1, 1e-5, capped);
    CHECK(false);
  } catch (const TruncationError& e) {
    CHECK(e.required_cutoff > e.cap);
  }
}

TEST_CASE("semigroup law under haar-quadrature convolution") {
  for (const char* name : {"u1", "su2"}) {
    GroupModel g = GroupModel::make(name);
    double t = 0.3, s = 0.2;
    auto f1 = build_heat_series(g, t);
    auto f2 = build_heat_series(g, s);
    auto sum = build_heat_series(g, t + s);
    int jmax = static_cast<int>(std::sqrt(f1.lambda_max)) + 2;
    int bw = (g.kind() == GroupKind::U1) ? 2 * jmax + 4 : 4 * jmax + 8;
    std::mt19937_64 rng(5);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      GroupElement x = g.random_element(rng);
      worst = std::max(worst,
                       std::abs(convolve_at(g, f1, f2, x, bw) - heat_kernel_eval(g, sum, x)));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("positivity of the kernel over the sampled grid") {
  // positivity is asserted down to the certified numerical floor of the
  // series (truncation tail + cancellation roundoff): values far from e at
  // small t underflow to noise around zero
  for (const char* name : {"u1", "su2", "so3"}) {
    GroupModel g = GroupModel::make(name);
    std::mt19937_64 rng(9);
    for (double t : {1e-3, 0.05, 1.0, 10.0}) {
      auto series = build_heat_series(g, t);
      double floor = series.tail_bound + 1e-12 * heat_kernel_eval(g, series, g.identity());
      for (int i = 0; i < 8; ++i)
        CHECK(heat_kernel_eval(g, series, g.random_element(rng)) > -floor);
    }
  }
}

TEST_CASE("gaussian bound fit: u1 reaches the true quarter") {
  GroupModel u1 = GroupModel::make("u1");
  std::vector<double> tg, rg;
  for (int k = 0; k <= 10; ++k) tg.push_back(std::pow(2.0, -k));
  for (int i = 0; i <= 6; ++i) rg.push_back(0.9 * kPi * i / 6.0);
  auto fit = gaussian_bound_fit(u1, tg, rg);
  CHECK(fit.feasible);
  CHECK(fit.b >= 0.24);
  CHECK(fit.min_slack >= -1e-12);  // bound actually holds on the grid
}

TEST_CASE("gaussian bound fit succeeds with b >= 0.2 on all models") {
  for (const char* name : {"u1", "t2", "su2", "so3"}) {
    GroupModel g = GroupModel::make(name);
    std::vector<double> tg, rg;
    for (int k = 0; k <= 10; ++k) tg.push_back(std::pow(2.0, -k));
    for (int i = 0; i <= 6; ++i) rg.push_back(0.9 * g.injectivity_radius() * i / 6.0);
    auto fit = gaussian_bound_fit(g, tg, rg);
    CHECK(fit.feasible);
    CHECK(fit.b >= 0.2);
    CHECK(fit.min_slack >= -1e-12);
  }
}

TEST_CASE("su2 envelope holds at the spec probe point") {
  GroupModel su2 = GroupModel::make("su2");
  std::vector<double> tg{1.0, 0.5, 0.2, 0.05, 0.01, 1e-3};
  std::vector<double> rg{0.0, 0.5, 1.0, 2.0, 4.0, 5.65};
  auto fit = gaussian_bound_fit(su2, tg, rg);
  double t = 0.05;
  double p = heat_kernel_eval(su2, t, su2.exp({1.0, 0.0, 0.0}));
  double bound = fit.a * std::pow(t, -1.5) * std::exp(fit.omega * t) * std::exp(-fit.b / t);
  CHECK(p <= bound);
}

TEST_CASE("k-averaged kernel obeys the base-distance gaussian bound") {
  GroupModel su2 = GroupModel::make("su2");
  std::vector<double> tg{0.5, 0.2, 0.1, 0.05};
  std::vector<double> rg{0.0, 0.4, 0.9, 1.5};
  auto fit = gaussian_bound_fit_k_averaged(su2, tg, rg);
  CHECK(fit.feasible);
  CHECK(fit.b > 0.1);
  CHECK(fit.min_slack >= -1e-12);
}

TEST_CASE("langlands probe: u1 diagonal limit (4 pi)^(-1/2)") {
  GroupModel u1 = GroupModel::make("u1");
  auto ex = langlands_probe(u1, {1e-2, 1e-3}, {0.0});
  CHECK(ex.c0_e == doctest::Approx(0.28209479177387814).epsilon(1e-12));
  CHECK(ex.worst_rel_error < 1e-6);
  // t^{1/2} p_t(e) / vol -> (4 pi)^{-1/2}
  double ratio = heat_kernel_eval(u1, 1e-3, u1.identity()) * std::sqrt(1e-3) / kTwoPi;
  CHECK(ratio == doctest::Approx(ex.c0_e).epsilon(1e-8));
}

TEST_CASE("langlands probe: su2 off-diagonal ratio within 2 percent") {
  GroupModel su2 = GroupModel::make("su2");
  auto ex = langlands_probe(su2, {1e-3}, {0.0, 0.2});
  CHECK(ex.worst_rel_error < 0.02);
  double ratio = ex.ratios.back();
  CHECK(ratio == doctest::Approx(std::pow(4.0 * kPi, -1.5)).epsilon(0.02));
}

TEST_CASE("h sigma kernel: u1 fourier projection oracle") {
  GroupModel u1 = GroupModel::make("u1");
  double t = 0.4;
  auto series = build_heat_series(u1, t);
  auto f = [&](const GroupElement& g) {
    return complexd(heat_kernel_eval(u1, series, g), 0.0);
  };
  int bw = 2 * static_cast<int>(std::sqrt(series.lambda_max)) + 8;
  for (int m : {0, 1, 3}) {
    SigmaSpec spec;
    spec.K = KDesignation::FullGroup;
    spec.sigma = IrrepInfo{{m}, 1, static_cast<double>(m) * m};
    for (double theta : {0.0, 0.9}) {
      complexd got = h_sigma_kernel(u1, f, spec, angle(theta), bw);
      // Fourier projection: H^sigma_{p_t} = e^{-t m^2} conj(chi_m); acting by
      // convolution it projects exactly onto the weight-m modes
      complexd expect = std::exp(-t * m * m) * std::conj(u1.character(spec.sigma, angle(theta)));
      CHECK(std::abs(got - expect) < 1e-10);
    }
    // operator check: pi(H) e_n = delta_{nm} e^{-t m^2} e_n via quadrature
    complexd mode = u1.haar_integrate(
        [&](const GroupElement& th) {
          complexd H = h_sigma_kernel(u1, f, spec, th, bw);
          return H * std::polar(1.0, m * th.data[0]);  // e_m(x + th) / e_m(x)
        },
        bw + std::abs(m) + 2);
    CHECK(std::abs(mode - std::exp(-t * m * m)) < 1e-9);
  }
}

TEST_CASE("h sigma kernel: trivial sigma with bi-K-invariant f is the identity map") {
  GroupModel su2 = GroupModel::make("su2");
  SigmaSpec triv;
  triv.K = KDesignation::TorusInSU2;
  triv.sigma = IrrepInfo{{0}, 1, 0.0};
  // f(g) = w^2 + z^2 is invariant under both-sided torus translations
  auto f = [](const GroupElement& g) {
    return complexd(g.data[0] * g.data[0] + g.data[3] * g.data[3], 0.0);
  };
  std::mt19937_64 rng(21);
  for (int i = 0; i < 5; ++i) {
    GroupElement g = su2.random_element(rng);
    CHECK(std::abs(h_sigma_kernel(su2, f, triv, g, 8) - f(g)) < 1e-12);
  }
}

TEST_CASE("h sigma kernel on su2: peter-weyl block formula") {
  GroupModel su2 = GroupModel::make("su2");
  double t = 1.0;
  auto series = build_heat_series(su2, t);
  auto f = [&](const GroupElement& g) {
    return complexd(heat_kernel_eval(su2, series, g), 0.0);
  };
  SigmaSpec spec;
  spec.K = KDesignation::FullGroup;
  spec.sigma = IrrepInfo{{1}, 2, 0.75};  // spin 1/2
  // k-degree of the integrand: 2 j_max from the series plus 1 from chi_sigma
  int two_jmax = static_cast<int>(std::sqrt(1.0 + 4.0 * series.lambda_max));
  int bw = two_jmax + 3;
  std::mt19937_64 rng(33);
  for (int i = 0; i < 3; ++i) {
    GroupElement g = su2.random_element(rng);
    // H^sigma_{p_t} = d_sigma e^{-t lambda_sigma} chi_sigma (PW projection)
    complexd expect = 2.0 * std::exp(-0.75 * t) * su2.character(spec.sigma, g);
    complexd got = h_sigma_kernel(su2, f, spec, g, bw);
    CHECK(std::abs(got - expect) < 1e-9);
  }
}

TEST_CASE("h sigma kernel commutes with the spectral decomposition") {
  // coefficients outside the sigma block vanish; checked by quadrature with a
  // band-limited f so the nested rule stays small
  GroupModel su2 = GroupModel::make("su2");
  IrrepInfo half{{1}, 2, 0.75}, one{{2}, 3, 2.0};
  auto f = [&](const GroupElement& g) {
    return su2.character(half, g) + 0.7 * su2.character(one, g);
  };
  SigmaSpec spec;
  spec.K = KDesignation::FullGroup;
  spec.sigma = half;
  // H^sigma_f = c_sigma chi_sigma for f = sum c_j chi_j
  std::mt19937_64 rng(37);
  for (int i = 0; i < 3; ++i) {
    GroupElement g = su2.random_element(rng);
    CHECK(std::abs(h_sigma_kernel(su2, f, spec, g, 6) - su2.character(half, g)) < 1e-11);
  }
  complexd outside = su2.haar_integrate(
      [&](const GroupElement& g) {
        return h_sigma_kernel(su2, f, spec, g, 6) * std::conj(su2.character(one, g));
      },
      8);
  CHECK(std::abs(outside) < 1e-10);
  complexd inside = su2.haar_integrate(
      [&](const GroupElement& g) {
        return h_sigma_kernel(su2, f, spec, g, 6) * std::conj(su2.character(half, g));
      },
      8);
  CHECK(std::abs(inside - 1.0) < 1e-10);
}

TEST_CASE("bundle kernel: weight-space oracle at the identity for trivial charge") {
  GroupModel su2 = GroupModel::make("su2");
  double t = 0.4;
  double expect = 0.0;  // sum over integer j of (2j+1) e^{-t j(j+1)}
  for (int l = 0; l < 60; ++l) expect += (2.0 * l + 1.0) * std::exp(-t * l * (l + 1.0));
  complexd got = bundle_kernel(su2, 0, t, su2.identity());
  CHECK(got.real() == doctest::Approx(expect).epsilon(1e-10));
  CHECK(std::abs(got.imag()) < 1e-12);
}

TEST_CASE("bundle kernel covariance and casimir prefactor") {
  GroupModel su2 = GroupModel::make("su2");
  double t = 0.5;
  int n = 1;
  std::mt19937_64 rng(41);
  GroupElement g = su2.random_element(rng);
  double a1 = 1.234, a2 = -0.81;
  GroupElement k = su2.torus_element(a1), k1 = su2.torus_element(a2);
  complexd lhs = bundle_kernel(su2, n, t, g);
  GroupElement arg = su2.multiply(su2.inverse(k), su2.multiply(g, k1));
  complexd rhs = std::polar(1.0, n * a1) * bundle_kernel(su2, n, t, arg) *
                 std::polar(1.0, -n * a2);
  CHECK(std::abs(lhs - rhs) < 1e-9);
  // the e^{t lambda_sigma} prefactor carries lambda_sigma = n^2: removing it
  // must reproduce the torus-projected series sum directly
  double direct = 0.0;
  for (int l = std::abs(n); l < 80; ++l)
    direct += (2.0 * l + 1.0) * std::exp(-t * l * (l + 1.0));
  complexd h = bundle_kernel(su2, n, t, su2.identity());
  CHECK(h.real() * std::exp(-t * n * n) == doctest::Approx(direct).epsilon(1e-9));
}
