#pragma once

#include <functional>
#include <vector>

#include "equiheat/group.hpp"

namespace equiheat {

/// Options for heat-kernel series construction. The general order-q API is
/// part of the data model but only q = 2 (Riemannian heat kernels) is
/// instantiated; any other q raises NotInstantiatedError.
struct HeatOptions {
  double rel_tol = 1e-12;
  double lambda_cap = 4.0e6;
  int q = 2;
};

/// Truncated Peter-Weyl series of p_t with a certified tail bound. The value
/// p_t(g) = sum_rho d_rho e^{-t lambda_rho} chi_rho(g) is taken with respect
/// to normalized (mass-1) Haar measure; the Riemannian-density kernel used in
/// the Gaussian/Langlands analysis is f_t = p_t / vol(G).
struct HeatKernelSeries {
  double t = 0.0;
  double lambda_max = 0.0;   ///< cutoff actually used
  double tail_bound = 0.0;   ///< absolute bound on the dropped tail, valid at every g
  std::vector<IrrepInfo> terms;
};

HeatKernelSeries build_heat_series(const GroupModel& model, double t,
                                   const HeatOptions& opts = {});

double heat_kernel_eval(const GroupModel& model, const HeatKernelSeries& series,
                        const GroupElement& g);
double heat_kernel_eval(const GroupModel& model, double t, const GroupElement& g,
                        const HeatOptions& opts = {});

/// f_t(g) = p_t(g) / vol(G): density with respect to the Riemannian volume,
/// the normalization in which f_t ~ (4 pi t)^{-d/2} e^{-|g|^2/4t} near e.
double heat_density_eval(const GroupModel& model, double t, const GroupElement& g,
                         const HeatOptions& opts = {});

/// Fit of the Gaussian upper bound |p_t(g)| <= a t^{-d/2} e^{omega t} e^{-b |g|^2 / t}.
struct BoundFitResult {
  double a = 0.0;
  double b = 0.0;
  double omega = 0.0;
  int q = 2;
  double envelope_a0 = 0.0;  ///< diagonal envelope max_t p_t(e) t^{d/2}
  double min_slack = 0.0;    ///< min over grid of log(bound) - log(value)
  bool feasible = false;
  double worst_t = 0.0;      ///< grid point realizing the minimal slack
  double worst_r = 0.0;
};

/// Scans b downward from 0.5 and returns the largest b whose envelope
/// constant stays within a factor 10 of the diagonal envelope; omega is set
/// to b * max|g|^2 to absorb the compact-group wrap-around at t ~ 1.
BoundFitResult gaussian_bound_fit(const GroupModel& model, const std::vector<double>& t_grid,
                                  const std::vector<double>& r_grid,
                                  const HeatOptions& opts = {});

/// Same bound for the K-averaged kernel H^sigma_{p_t} on SU(2) with K the
/// maximal torus and sigma trivial, against the base distance d(gK, K).
BoundFitResult gaussian_bound_fit_k_averaged(const GroupModel& su2,
                                             const std::vector<double>& t_grid,
                                             const std::vector<double>& r_grid,
                                             const HeatOptions& opts = {});

/// Small-time expansion probe: ratio(t, g) = f_t(g) t^{d/2} e^{|g|^2/4t}
/// tends to c_0(e) = (4 pi)^{-d/2} (b = 1/4, q = 2 fixed by the metric).
struct LanglandsExpansion {
  int d = 1;
  int q = 2;
  double b = 0.25;
  double c0_e = 0.0;             ///< (4 pi)^{-d/2}
  double worst_rel_error = 0.0;  ///< max grid deviation of ratio from c0_e
  std::vector<double> t_values;
  std::vector<double> r_values;
  std::vector<double> ratios;    ///< row-major over (t, r)
};

LanglandsExpansion langlands_probe(const GroupModel& model, const std::vector<double>& t_grid,
                                   const std::vector<double>& r_grid,
                                   const HeatOptions& opts = {});

/// Designation of the compact subgroup K used by the isotypic kernels.
enum class KDesignation {
  FullGroup,   ///< K = G
  TorusInSU2,  ///< K = {exp(alpha X_3)} in SU(2), weight labels
};

struct SigmaSpec {
  KDesignation K = KDesignation::FullGroup;
  IrrepInfo sigma;  ///< irrep of K (for the torus: label {n}, dim 1, casimir n^2)
};

/// Isotypic smoothing kernel H^sigma_f(g) =
///   d_sigma^2 \int_K \int_K f(k1^{-1} g k^{-1}) conj(chi(k1)) conj(chi(k)) dk dk1,
/// evaluated by double Haar quadrature over K at the given bandwidth.
complexd h_sigma_kernel(const GroupModel& model,
                        const std::function<complexd(const GroupElement&)>& f,
                        const SigmaSpec& sigma, const GroupElement& g, int k_bandwidth);

/// Homogeneous-bundle kernel on SU(2) with K = U(1), charge n (1x1 block):
/// h_t^sigma(g) = e^{t n^2} \int\int p_t(k^{-1} g k1) pi_sigma(k k1^{-1}) dk1 dk.
complexd bundle_kernel(const GroupModel& su2, int charge, double t, const GroupElement& g,
                       int k_nodes = 128, const HeatOptions& opts = {});

/// Haar-quadrature convolution (f * h)(g) = \int f(g u^{-1}) h(u) du.
double convolve_at(const GroupModel& model, const HeatKernelSeries& f,
                   const HeatKernelSeries& h, const GroupElement& g, int bandwidth);

}  // namespace equiheat
