#include "equiheat/traces.hpp"

#include <cmath>

#include "equiheat/errors.hpp"
#include "equiheat/symplectic.hpp"

namespace equiheat {

std::vector<double> dyadic_grid(double t0, int kmax) {
  std::vector<double> t;
  for (int k = 0; k <= kmax; ++k) t.push_back(t0 * std::pow(2.0, -k));
  return t;
}

TraceCurve spectral_trace_curve(const SpaceModel& space, const SigmaLabel& sigma,
                                const std::vector<double>& t_grid) {
  TraceCurve c;
  for (double t : t_grid) {
    double tail = 0.0;
    double v = space.spectral_trace(sigma, t, &tail);
    c.t.push_back(t);
    c.value.push_back(v);
    c.bound.push_back(tail);
  }
  return c;
}

double kernel_diagonal_trace(const SpaceModel& space,
                             const std::function<complexd(const GroupElement&)>& f,
                             int base_budget, int stabilizer_nodes) {
  // Schwartz-kernel diagonal of pi(f): k_f(p, p) = [ \int_{G_p} f ] / vol(M).
  // In chart iota the localized kernel is K^iota(x, x) = k_f(p, p)/j_iota(p),
  // and the trace is assembled with the partition of unity over charts.
  auto quad = space.base_quadrature(base_budget);
  KahanSum acc;
  for (const auto& [p, w] : quad) {
    auto stab = space.stabilizer_rule(p, stabilizer_nodes);
    KahanSum fiber;
    for (const auto& [h, wh] : stab) fiber.add(f(h).real() * wh);
    double kdiag = fiber.value() / space.riemannian_volume();
    double chart_sum = 0.0;
    for (int c = 0; c < space.num_charts(); ++c) {
      double alpha = space.partition(c, p);
      if (alpha <= 0.0) continue;
      double kc = kdiag / space.chart_jacobian(c, p);  // K_{A_f^iota} on the diagonal
      chart_sum += alpha * kc * space.chart_jacobian(c, p);
    }
    acc.add(w * chart_sum);
  }
  return acc.value();
}

PowerLawFit fit_small_time(const TraceCurve& curve, bool with_log_factor) {
  if (curve.t.size() < 8) throw DomainError("fit_small_time: need at least 8 grid points");
  double tmax = *std::max_element(curve.t.begin(), curve.t.end());
  double tmin = *std::min_element(curve.t.begin(), curve.t.end());
  if (tmax / tmin < 100.0)
    throw DomainError("fit_small_time: grid must span at least two decades");
  std::vector<double> rel;
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    double r = curve.value[i] > 0 ? curve.bound[i] / curve.value[i] : 1.0;
    rel.push_back(std::max(r, 1e-13));
  }
  return fit_power_law(curve.t, curve.value, rel, with_log_factor);
}

PowerLawFit fit_small_time_extrapolated(const TraceCurve& curve) {
  const std::size_t n = curve.t.size();
  if (n < 4) throw DomainError("fit_small_time_extrapolated: need at least 4 dyadic points");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (std::abs(curve.t[i] / curve.t[i + 1] - 2.0) > 1e-9)
      throw DomainError("fit_small_time_extrapolated: grid must be dyadic (t_{k+1} = t_k/2)");
  const double rho = std::pow(2.0, -0.5);  // remainder scale t^{1/q}, q = 2
  auto local_alpha = [&](std::size_t k) {
    // y = c t^{-alpha}: halving t multiplies y by 2^{alpha}
    return std::log2(curve.value[k + 1] / curve.value[k]);
  };
  double aK = local_alpha(n - 2);
  double aK1 = local_alpha(n - 3);
  double alpha = (aK - rho * aK1) / (1.0 - rho);
  auto coeff_at = [&](std::size_t k) { return curve.value[k] * std::pow(curve.t[k], alpha); };
  double cK = coeff_at(n - 1);
  double cK1 = coeff_at(n - 2);
  double coeff = (cK - rho * cK1) / (1.0 - rho);

  PowerLawFit fit;
  fit.alpha = alpha;
  fit.coefficient = coeff;
  fit.alpha_sigma = std::abs(alpha - aK);  // size of the extrapolation step
  fit.coefficient_sigma = std::abs(coeff - cK);
  fit.with_log_factor = false;
  double resid = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double model = coeff * std::pow(curve.t[i], -alpha);
    resid = std::max(resid, std::abs(std::log(curve.value[i] / model)));
  }
  fit.residual_norm = resid;
  return fit;
}

LeadingPrediction predicted_leading(const SpaceModel& space, const SigmaLabel& sigma,
                                    const CriticalGeometry& geometry) {
  if (geometry.samples.empty() || geometry.h_weights.empty())
    throw DomainError("predicted_leading: geometry incomplete (missing H or Reg Xi data)");
  LeadingPrediction out;
  out.kappa = geometry.kappa;
  out.lambda_chain = geometry.lambda_chain;
  out.exponent = 0.5 * (space.dim() - geometry.kappa);
  out.multiplicity = h_multiplicity(space, geometry, sigma);
  double d_sigma = space.sigma_dimension(sigma);
  out.d_sigma_sq = d_sigma * d_sigma;
  out.gaussian_volume = geometry.vol_estimate;
  out.coefficient = out.d_sigma_sq * out.multiplicity * geometry.vol_estimate /
                    std::pow(kTwoPi, space.dim() - geometry.kappa);
  return out;
}

}  // namespace equiheat
