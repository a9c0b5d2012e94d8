#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "equiheat/space.hpp"

namespace equiheat {

/// Coordinate system tags for CotangentPoint: nonnegative values are atlas
/// chart ids; the two bundled systems below are used by the symplectic and
/// oscillatory machinery.
inline constexpr int kChartBundled = -2;        ///< t1/t2: angle coords; s2: spherical (Theta, phi)
inline constexpr int kChartLeftTrivialized = -1;  ///< su2 spaces: (p, lambda) with lambda in g*

/// Point of T*M: base point with covector components in the chosen system.
struct CotangentPoint {
  int chart = kChartBundled;
  SpacePoint p;
  std::vector<double> base;  ///< coords of p (empty for left-trivialized points)
  std::vector<double> xi;    ///< covector components (left-trivialized: lambda)
};

/// Tangent of T*M at a CotangentPoint, components in the same system.
/// For left-trivialized points dbase is the left-trivialized base velocity.
struct PhaseTangent {
  std::vector<double> dbase;
  std::vector<double> dxi;
};

/// Sasaki inner product on T*M (base metric plus dual metric on the vertical
/// part, vertical = covariant derivative of the covector component).
double sasaki_inner(const SpaceModel& space, const CotangentPoint& pt, const PhaseTangent& a,
                    const PhaseTangent& b);

/// Momentum pairing J_X(p, xi) = xi(X~_p) for the KK-generator with index a
/// (0 .. kk_dim-1; the first k_dim indices span the first factor).
double momentum_eval(const SpaceModel& space, const CotangentPoint& pt, int a);
std::vector<double> momentum_map(const SpaceModel& space, const CotangentPoint& pt);

/// Pairings <xi, X_l~> with the fundamental fields of the full transitive
/// G-action (l = 0 .. group_dim-1); these drive the Gaussian factor F-hat.
std::vector<double> g_momentum(const SpaceModel& space, const CotangentPoint& pt);

struct FhatOptions {
  int nodes = 24;            ///< Gauss-Hermite nodes per Lie-algebra direction
  double tol = 1e-10;        ///< node-doubling convergence target
  int max_doublings = 3;
  bool jacobian_weighted = false;  ///< include Psi^*(d_G) and the wrapped |exp zeta|
};

/// Gaussian factor of the leading heat coefficient,
///   F(p, xi) = (4 pi)^{-d/2} \int e^{i <xi, zeta~_p>} e^{-|zeta|^2/4} dzeta,
/// evaluated by product Gauss-Hermite rules over the Lie algebra of G
/// (the zeta-box where the Gaussian is below 1e-14 is covered by the rule).
double fhat(const SpaceModel& space, const CotangentPoint& pt, const FhatOptions& opts = {},
            int* doublings_used = nullptr);

/// Weighted sample of Reg Xi: weight realizes the Sasaki-induced density.
struct ZeroLevelSample {
  CotangentPoint pt;
  double weight = 0.0;
  double orbit_volume = 0.0;
};

/// Momentum geometry report: kappa, Lambda, principal isotropy H with its
/// normalized rule, Reg Xi samples with orbit volumes, Gaussian volume.
struct CriticalGeometry {
  std::string space;
  int kappa = 0;
  int lambda_chain = 1;
  std::string principal_isotropy;
  int distinct_isotropy_types = 1;
  int discarded_ambiguous = 0;
  std::vector<ZeroLevelSample> samples;
  // anti-diagonal H rule: circle-K spaces store angle pairs (theta1, theta);
  // the su2 both-sided space stores group pairs (k, k^{-1})
  std::vector<std::array<double, 2>> h_angles;
  std::vector<std::pair<GroupElement, GroupElement>> h_pairs;
  std::vector<double> h_weights;
  double vol_estimate = 0.0;
  double vol_error = 0.0;
  int budget = 0;
  std::uint64_t seed = 0;
};

/// kappa from the numerical rank of the lifted fundamental fields at random
/// regular points, Lambda from isotropy types over a stratified sample, and
/// the principal isotropy group with an explicit parametrization.
CriticalGeometry isotropy_analysis(const SpaceModel& space, std::uint64_t seed = 7,
                                   double rank_tol_low = 1e-8, double rank_tol_high = 1e-6);

/// Fill geometry.samples with >= budget weighted points of Reg Xi (momentum
/// zero within 1e-10, principal stratum only; ambiguous points are discarded
/// and counted).
void sample_regular_zero_level(const SpaceModel& space, CriticalGeometry& geometry, int budget);

/// Riemannian volume of the KK-orbit through pt in T*M (Gram-determinant of
/// the lifted fundamental frame along the bundled orbit parametrization).
double orbit_volume(const SpaceModel& space, const CotangentPoint& pt, int nodes = 256);

/// Gaussian volume vol~(Xi/KK) = sum_iota int_{Reg Xi} F alpha_iota j_iota
/// d(Reg Xi) / vol O; fills vol_estimate and vol_error. alpha_scale scales
/// the partition functions (linearity probe).
void gaussian_volume(const SpaceModel& space, CriticalGeometry& geometry,
                     const FhatOptions& opts = {}, double alpha_scale = 1.0);

/// isotropy_analysis + sample_regular_zero_level + gaussian_volume.
CriticalGeometry analyze_geometry(const SpaceModel& space, int budget, std::uint64_t seed = 7,
                                  const FhatOptions& opts = {});

/// int_{Reg Xi} u(p, xi) d(Reg Xi) / vol O  over the sampled geometry.
double reg_xi_integral(const SpaceModel& space, const CriticalGeometry& geometry,
                       const std::function<double(const CotangentPoint&)>& u);

/// Normalized average of v over the principal isotropy H (circle-K spaces).
complexd h_average(const SpaceModel& space, const CriticalGeometry& geometry,
                   const std::function<complexd(double, double)>& v);

/// Multiplicity [(pi_sigma (x) pi_sigma)|_H : 1] via character averaging on H.
double h_multiplicity(const SpaceModel& space, const CriticalGeometry& geometry,
                      const SigmaLabel& sigma);

/// Bundle-kernel form factor int_H tr pi_sigma(k k1^{-1}) in the coordinates
/// of the bundle kernel (where H is the diagonal pairing).
double h_bundle_trace_factor(const SpaceModel& space, const CriticalGeometry& geometry,
                             const SigmaLabel& sigma);

}  // namespace equiheat
