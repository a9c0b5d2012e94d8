#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "equiheat/fit.hpp"
#include "equiheat/heat.hpp"
#include "equiheat/space.hpp"

namespace equiheat {

/// Equivariant trace values on a dyadic t-grid with per-point truncation bounds.
struct TraceCurve {
  std::vector<double> t;
  std::vector<double> value;
  std::vector<double> bound;  ///< certified absolute truncation bound per point
};

/// Dyadic grid t = t0 2^{-k}, k = 0..kmax (decreasing t).
std::vector<double> dyadic_grid(double t0, int kmax);

/// tr(P_sigma e^{-t Delta} P_sigma) over the grid, exact spectral sums.
TraceCurve spectral_trace_curve(const SpaceModel& space, const SigmaLabel& sigma,
                                const std::vector<double>& t_grid);

/// Trace of pi(f) via the kernel diagonal assembled chart by chart:
///   sum_iota  int alpha_iota(p) K_{A_f^iota}(phi(p), phi(p)) j_iota(p) dM(p).
/// f is a function on the acting group G; the localized kernel diagonal is
/// K^iota(x, x) = k_f(p, p) / j_iota(p) with k_f(p,p) the Schwartz-kernel
/// diagonal of pi(f), computed from the stabilizer average
/// k_f(p,p) = [ \int_{G_p} f ] / vol(M).
double kernel_diagonal_trace(const SpaceModel& space,
                             const std::function<complexd(const GroupElement&)>& f,
                             int base_budget = 48, int stabilizer_nodes = 128);

/// Small-time power-law fit of a trace curve (see fit.hpp for the model).
PowerLawFit fit_small_time(const TraceCurve& curve, bool with_log_factor);

/// Remainder-aware variant for dyadic grids: local slopes alpha_k =
/// log2(y(t_k)/y(t_{k+1})) carry a remainder C rho^k with rho = 2^{-1/q}
/// (the t^{1/q} scale of the trace remainder), which one Richardson step
/// cancels. Coefficient extrapolated the same way with the exponent pinned.
PowerLawFit fit_small_time_extrapolated(const TraceCurve& curve);

/// The leading-term prediction assembled from the critical geometry:
/// exponent (n - kappa)/q, coefficient
///   d_{sigma (x) sigma} [(pi_sigma (x) pi_sigma)|_H : 1] vol~(Xi/KK) / (2 pi)^{n-kappa}.
struct LeadingPrediction {
  double exponent = 0.0;
  double coefficient = 0.0;
  double multiplicity = 0.0;  ///< [(pi_sigma (x) pi_sigma)|_H : 1]
  double d_sigma_sq = 0.0;
  double gaussian_volume = 0.0;
  int kappa = 0;
  int lambda_chain = 1;
};

struct CriticalGeometry;  // defined in symplectic.hpp

LeadingPrediction predicted_leading(const SpaceModel& space, const SigmaLabel& sigma,
                                    const CriticalGeometry& geometry);

}  // namespace equiheat
