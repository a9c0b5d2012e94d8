#include "equiheat/experiments.hpp"

#include <chrono>
#include <cmath>

#include "equiheat/errors.hpp"
#include "equiheat/oscillatory.hpp"
#include "equiheat/selberg.hpp"
#include "equiheat/symplectic.hpp"
#include "equiheat/traces.hpp"

namespace equiheat {

namespace {

SigmaLabel sigma_from_config(const SpaceModel& space, const ExperimentConfig& cfg) {
  SigmaLabel sigma;
  if (cfg.has("sigma"))
    sigma.v = cfg.get_int_list("sigma");
  else
    sigma.v.assign(space.kind() == SpaceKind::T2 ? 2 : 1, 0);
  if (space.kind() == SpaceKind::T2 && sigma.v.size() != 2)
    throw ValidationError("sigma", "t2 needs two components");
  return sigma;
}

void run_trace(const ExperimentConfig& cfg, ExperimentReport& rep) {
  SpaceModel space = SpaceModel::make(cfg.get("space", cfg.get("model", "s2")));
  SigmaLabel sigma = sigma_from_config(space, cfg);
  double t0 = cfg.get_double("t0", 0.1);
  int kmax = cfg.get_int("kmax", 12);
  if (kmax < 7) throw ValidationError("kmax", "grid must span >= 2 decades (kmax >= 7)");
  auto grid = dyadic_grid(t0, kmax);
  TraceCurve curve = spectral_trace_curve(space, sigma, grid);
  PowerLawFit fit = fit_small_time(curve, cfg.get_int("log_factor", 0) != 0);

  CriticalGeometry geo = analyze_geometry(space, cfg.get_int("budget", 4096), cfg.get_seed());
  LeadingPrediction pred = predicted_leading(space, sigma, geo);

  rep.add_output("alpha", fit.alpha, fit.alpha_sigma);
  rep.add_output("coefficient", fit.coefficient, fit.coefficient_sigma);
  rep.add_output("predicted_exponent", pred.exponent);
  rep.add_output("predicted_coefficient", pred.coefficient, geo.vol_error);
  rep.add_output("kappa", geo.kappa);
  rep.add_output("lambda_chain", geo.lambda_chain);
  rep.add_check("exponent_law", fit.alpha, pred.exponent,
                cfg.get_double("alpha_tol", 0.02));
  rep.add_check("coefficient_law", fit.coefficient, pred.coefficient,
                cfg.get_double("coeff_tol", 0.02 * std::abs(pred.coefficient) + 1e-12));

  ReportTable t;
  t.columns = {"t", "value", "bound"};
  for (std::size_t i = 0; i < curve.t.size(); ++i)
    t.rows.push_back({curve.t[i], curve.value[i], curve.bound[i]});
  rep.tables["trace_curve"] = t;
}

void run_oscillatory(const ExperimentConfig& cfg, ExperimentReport& rep) {
  SpaceModel space = SpaceModel::make(cfg.get("space", cfg.get("model", "t1")));
  OscAmplitude amp;
  amp.base = [](const std::vector<double>& x) {
    double r2 = 0.0;
    for (double c : x) r2 += (c - 0.6) * (c - 0.6);
    return std::exp(-2.0 * r2);
  };
  amp.kk = [](double th1, double th) {
    return complexd(1.0 + 0.4 * std::cos(th1 - th), 0.0);
  };
  double mu_min = cfg.get_double("mu_min", 1e-3);
  double mu_max = cfg.get_double("mu_max", 1e-1);
  int n_mu = cfg.get_int("mu_points", 9);
  if (!(mu_min > 0) || mu_max <= mu_min) throw ValidationError("mu_min", "need 0 < mu_min < mu_max");
  std::vector<double> mu;
  for (int i = 0; i < n_mu; ++i)
    mu.push_back(mu_min * std::pow(mu_max / mu_min, i / double(n_mu - 1)));

  CriticalGeometry geo = analyze_geometry(space, cfg.get_int("budget", 2048), cfg.get_seed());
  OscResult osc = asymptotic_compare(space, amp, geo, mu);

  rep.add_output("L0", osc.leading_l0);
  rep.add_output("kappa_slope", osc.kappa_slope, osc.kappa_slope_sigma);
  rep.add_output("remainder_constant", osc.remainder_constant);
  double worst = 0.0;
  for (double r : osc.ratios) worst = std::max(worst, std::abs(r - 1.0));
  rep.add_check("kappa_slope", osc.kappa_slope, geo.kappa, cfg.get_double("slope_tol", 0.01));
  rep.add_check("ratio_at_smallest_mu", osc.ratios.front(), 1.0,
                cfg.get_double("ratio_tol", 1e-3));

  ReportTable t;
  t.columns = {"mu", "re", "im", "ratio", "err"};
  for (std::size_t i = 0; i < osc.points.size(); ++i)
    t.rows.push_back({osc.points[i].mu, osc.points[i].value.real(), osc.points[i].value.imag(),
                      osc.ratios[i], osc.points[i].est_error});
  rep.tables["oscillatory"] = t;
}

void run_gaussian_volume(const ExperimentConfig& cfg, ExperimentReport& rep) {
  SpaceModel space = SpaceModel::make(cfg.get("space", cfg.get("model", "s2")));
  CriticalGeometry geo =
      analyze_geometry(space, cfg.get_int("budget", 4096), cfg.get_seed());
  rep.add_output("gaussian_volume", geo.vol_estimate, geo.vol_error);
  rep.add_output("kappa", geo.kappa);
  rep.add_output("lambda_chain", geo.lambda_chain);
  rep.add_output("discarded_ambiguous", geo.discarded_ambiguous);
  double target = cfg.get_double("target", std::nan(""));
  if (!std::isnan(target))
    rep.add_check("gaussian_volume", geo.vol_estimate, target,
                  cfg.get_double("tol", 0.02 * std::abs(target)));
}

void run_selberg(const ExperimentConfig& cfg, ExperimentReport& rep) {
  GroupModel su2 = GroupModel::make("su2");
  std::string lat = cfg.get("lattice", "z2");
  if (lat.size() < 2 || lat[0] != 'z') throw ValidationError("lattice", "expected zN");
  int order = std::stoi(lat.substr(1));
  FiniteLattice lattice = make_cyclic_lattice(su2, order);
  double t = cfg.get_double("t", 0.5);
  SelbergReport sr = selberg_sides(su2, lattice, t);
  rep.add_output("spectral", sr.spectral, sr.truncation);
  rep.add_output("geometric", sr.geometric, sr.truncation);
  rep.add_output("residual", sr.residual);
  rep.add_check("selberg_residual", sr.residual, 0.0, cfg.get_double("tol", 1e-8));
  ReportTable t1;
  t1.columns = {"class", "contribution"};
  for (std::size_t i = 0; i < sr.class_contributions.size(); ++i)
    t1.rows.push_back({static_cast<double>(i), sr.class_contributions[i]});
  rep.tables["selberg_classes"] = t1;
}

void run_bundle_heat(const ExperimentConfig& cfg, ExperimentReport& rep) {
  GroupModel su2 = GroupModel::make("su2");
  int charge = cfg.get_int("charge", 1);
  double t = cfg.get_double("t", 0.2);
  double tail = 0.0;
  double spectral = bundle_heat_trace_spectral(charge, t, &tail);
  double kernel = bundle_heat_trace_kernel(su2, charge, t);
  rep.add_output("spectral_route", spectral, tail);
  rep.add_output("kernel_route", kernel);
  rep.add_check("route_agreement", kernel, spectral, cfg.get_double("route_tol", 1e-6));

  // small-t fit of e^{-t lambda_sigma} tr: exponent 1, coefficient Area/4pi = 1
  auto grid = dyadic_grid(cfg.get_double("t0", 0.1), cfg.get_int("kmax", 10));
  TraceCurve curve;
  for (double tt : grid) {
    double tb = 0.0;
    double v = bundle_heat_trace_spectral(charge, tt, &tb) * std::exp(-tt * charge * charge);
    curve.t.push_back(tt);
    curve.value.push_back(v);
    curve.bound.push_back(tb);
  }
  PowerLawFit fit = fit_small_time(curve, false);
  rep.add_output("exponent", fit.alpha, fit.alpha_sigma);
  rep.add_output("coefficient", fit.coefficient, fit.coefficient_sigma);
  rep.add_check("bundle_exponent", fit.alpha, 1.0, cfg.get_double("exp_tol", 0.02));
  rep.add_check("bundle_coefficient", fit.coefficient, 1.0, cfg.get_double("coeff_tol", 0.02));
  ReportTable ct;
  ct.columns = {"t", "value", "bound"};
  for (std::size_t i = 0; i < curve.t.size(); ++i)
    ct.rows.push_back({curve.t[i], curve.value[i], curve.bound[i]});
  rep.tables["bundle_trace"] = ct;
}

void run_probes(const ExperimentConfig& cfg, ExperimentReport& rep) {
  GroupModel model = GroupModel::make(cfg.get("model", "u1"));
  HeatOptions opts;
  // semigroup residual at (t, s)
  double t = cfg.get_double("t", 0.3), s = cfg.get_double("s", 0.2);
  auto f = build_heat_series(model, t, opts);
  auto h = build_heat_series(model, s, opts);
  auto sum = build_heat_series(model, t + s, opts);
  int bw = model.kind() == GroupKind::U1 || model.kind() == GroupKind::T2
               ? 2 * static_cast<int>(std::sqrt(f.lambda_max)) + 8
               : 4 * static_cast<int>(std::sqrt(f.lambda_max)) + 8;
  double worst = 0.0;
  std::vector<double> dir(model.dim(), 0.0);
  for (double r : {0.0, 0.4, 1.1}) {
    dir[0] = r;
    GroupElement g = model.exp(dir);
    double conv = convolve_at(model, f, h, g, bw);
    double exact = heat_kernel_eval(model, sum, g);
    worst = std::max(worst, std::abs(conv - exact));
  }
  rep.add_output("semigroup_residual", worst);
  rep.add_check("semigroup", worst, 0.0, cfg.get_double("semigroup_tol", 1e-8));

  // Gaussian envelope and Langlands limit
  std::vector<double> tg, rg;
  for (int k = 0; k <= 10; ++k) tg.push_back(1.0 * std::pow(2.0, -k));
  int n_r = 7;
  for (int i = 0; i < n_r; ++i)
    rg.push_back(model.injectivity_radius() * 0.9 * i / (n_r - 1.0));
  BoundFitResult bound = gaussian_bound_fit(model, tg, rg, opts);
  rep.add_output("gaussian_bound_b", bound.b);
  rep.add_output("gaussian_bound_a", bound.a);
  rep.add_output("gaussian_bound_omega", bound.omega);
  rep.add_check("gaussian_bound_b", bound.b, 0.25, 0.05);

  std::vector<double> tp{1e-2, 3e-3, 1e-3};
  // ratio grid scales with sqrt(t): the normalized kernel is evaluable only
  // while |g|^2/4t stays within the floating-point range of the series
  double tmin = tp.back();
  double rmax = std::min(0.25, std::sqrt(40.0 * tmin));
  std::vector<double> rp{0.0, 0.5 * rmax, rmax};
  LanglandsExpansion lang = langlands_probe(model, tp, rp, opts);
  rep.add_output("langlands_limit_rel_error", lang.worst_rel_error);
  rep.add_check("langlands_limit", lang.worst_rel_error, 0.0,
                cfg.get_double("langlands_tol", 0.02));

  ReportTable kt;
  kt.columns = {"t", "|g|", "value", "tail_bound"};
  for (double tt : tg) {
    auto series = build_heat_series(model, tt, opts);
    for (double r : rg) {
      dir[0] = r;
      kt.rows.push_back(
          {tt, r, heat_kernel_eval(model, series, model.exp(dir)), series.tail_bound});
    }
  }
  rep.tables["kernel"] = kt;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.inputs = config;
  std::string kind = config.get("kind");
  if (kind == "trace")
    run_trace(config, rep);
  else if (kind == "oscillatory")
    run_oscillatory(config, rep);
  else if (kind == "gaussian-volume")
    run_gaussian_volume(config, rep);
  else if (kind == "selberg")
    run_selberg(config, rep);
  else if (kind == "bundle-heat")
    run_bundle_heat(config, rep);
  else if (kind == "probes")
    run_probes(config, rep);
  else
    throw ValidationError("kind", "unknown experiment kind '" + kind + "'");
  rep.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace equiheat
