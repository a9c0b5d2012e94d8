#pragma once

#include <functional>
#include <vector>

#include "equiheat/symplectic.hpp"

namespace equiheat {

/// Product amplitude a(p', p, xi, k1, k) = base(p) w(xi) v(k1, k) with a
/// Gaussian xi-weight w(xi) = e^{-|xi|^2}. Compact base support inside the
/// bundled chart; the (k1, k)-factor is smooth on KK.
struct OscAmplitude {
  std::function<double(const std::vector<double>&)> base;  ///< on bundled chart coords
  std::function<complexd(double, double)> kk;              ///< v(theta1, theta), circle K
  std::function<complexd(const GroupElement&, const GroupElement&)> kk_su2;  ///< su2 pairs
  /// optional phase-space factor u(p, xi) replacing base * e^{-|xi|^2}
  /// (accepted by leading_L0 and the disintegration integrals)
  std::function<double(const CotangentPoint&)> phase_space;
};

struct OscPoint {
  double mu = 0.0;
  complexd value;
  double est_error = 0.0;
};

struct OscResult {
  std::vector<OscPoint> points;
  double leading_l0 = 0.0;
  int kappa = 0;
  int lambda_chain = 1;
  std::vector<double> ratios;  ///< I(mu) / ((2 pi mu)^kappa L0)
  double kappa_slope = 0.0;    ///< log-log slope of |I(mu)|
  double kappa_slope_sigma = 0.0;
  double remainder_constant = 0.0;  ///< C in |ratio-1| ~ C mu (log 1/mu)^{Lambda-1}
  int preferred_log_power = 0;      ///< residual-preferred log power of the remainder
};

struct DirectOptions {
  int s_nodes = 512;          ///< fine nodes across the stationary window
  double window = 40.0;       ///< |wrap(s)| <= window * mu carries the mass
  int gh_base_nodes = 96;     ///< Gauss-Hermite nodes for the xi-transform
  int gh_node_cap = 4096;     ///< hard cap (error report beyond)
  double eps_regularization = 0.0;  ///< psi(eps xi) damping for diagnostics
  double kk_restrict = 0.0;   ///< restrict |wrap(theta1+theta)| <= this (0 = off)
};

/// I(mu) = int_KK int_{T^*W} e^{i Phi/mu} a dLiouville dKK for the bundled
/// models (t1, s2). Fubini over the product structure with the oscillatory
/// xi-direction handled by Gauss-Hermite transforms; node counts scale with
/// 1/mu up to the cap, and the certified drop outside the stationary window
/// enters the error estimate.
complexd integral_direct(const SpaceModel& space, const OscAmplitude& a, double mu,
                         double* est_error = nullptr, const DirectOptions& opts = {});

/// Slow reference evaluation by nested product quadrature (all variables at
/// once); practical for mu >= 0.05. Used as an independent cross-check.
complexd integral_direct_reference(const SpaceModel& space, const OscAmplitude& a, double mu,
                                   int theta_nodes = 96, int xi_nodes = 256, int base_nodes = 64);

/// Stationary-phase leading coefficient
///   L0 = int_{Reg C} a / |det Phi''_{N Reg C}|^{1/2} d(Reg C)
/// over the bundled parametrization of Reg C = Reg Xi x H; the transverse
/// Hessian is computed by central finite differences (step 1e-5, one
/// Richardson level) in orthonormal normal frames of the Liouville-compatible
/// total metric.
double leading_L0(const SpaceModel& space, const OscAmplitude& a,
                  const CriticalGeometry& geometry, double fd_step = 1e-5);

OscResult asymptotic_compare(const SpaceModel& space, const OscAmplitude& a,
                             const CriticalGeometry& geometry,
                             const std::vector<double>& mu_grid);

/// Smoothing symbol a_f^iota(x, xi) = e^{-i x xi} int_G e^{i phi^g(x) xi}
/// c_iota(x, g) f(g) dg by group quadrature (t1 charts / su2 exp charts).
complexd symbol_value(const SpaceModel& space, int chart,
                      const std::function<complexd(const GroupElement&)>& f,
                      const std::vector<double>& x, const std::vector<double>& xi,
                      int g_bandwidth = 64);

struct SymbolDecayReport {
  std::vector<double> xi_norm;
  std::vector<double> abs_value;
  std::vector<double> c_n;     ///< fitted constants, |a| <= C_N (1+|xi|^2)^{-N}, N = 0..4
  bool decay_ok = true;
  double worst_xi = 0.0;      ///< offending |xi| when the fit fails to verify
};

/// Fits C_N on an inner grid and verifies the bound on the outer grid.
SymbolDecayReport symbol_probe(const SpaceModel& space, int chart,
                               const std::function<complexd(const GroupElement&)>& f,
                               const std::vector<double>& x, double xi_max, int n_xi,
                               int n_max = 4, int g_bandwidth = 64);

struct BetaCutoff {
  double radius = 3.0;       ///< support radius R (inside the injectivity radius)
  double flat_fraction = 0.5;  ///< beta == 1 on radius R * flat_fraction
};

/// Rescaled amplitude b^iota_{f_t}(x, xi/t^{1/2}; k1, k) of the localized
/// trace, evaluated by quadrature over the cutoff neighborhood. Circle-K
/// arguments for t1/s2/su2_torus. Returns 0 when k1 k . p leaves the
/// enlarged chart (the amplitude vanishes there).
complexd b_amplitude(const SpaceModel& space, double t, const SpacePoint& p,
                     const std::vector<double>& eta, double theta1, double theta,
                     const BetaCutoff& beta = {}, int quad_nodes = 768);

struct BAmplitudeReport {
  double sup_abs = 0.0;           ///< sup over the probed grids
  double sup_small_t = 0.0;       ///< sup over the smaller half of the t-grid
  double limit_gap = 0.0;         ///< |b(t_min, xi=0) - Gaussian limit| (relative)
  std::vector<double> t_values;
  std::vector<double> sup_at_t;
  bool bounded = true;
};

/// Uniform-bound report: sup_t sup_{xi, k} |b(x, xi/sqrt(t); k1, k)| and the
/// t -> 0 Gaussian limit comparison at xi = 0.
BAmplitudeReport b_amplitude_probe(const SpaceModel& space, const std::vector<double>& t_grid,
                                   const std::vector<double>& eta_norms, int kk_samples,
                                   const BetaCutoff& beta = {});

}  // namespace equiheat
