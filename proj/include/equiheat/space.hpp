#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "equiheat/group.hpp"

namespace equiheat {

enum class SpaceKind { T1, T2, S2, SU2Both, SU2Torus };

/// Point on a model space. T1: v[0] = x in [0, 2pi); T2: v[0], v[1];
/// S2: unit vector (v[0], v[1], v[2]); SU(2) spaces: unit quaternion.
struct SpacePoint {
  std::array<double, 4> v{0.0, 0.0, 0.0, 0.0};
};

/// Label of a K-irrep: circle K: {m}; T2: {m1, m2}; SU(2): {2j}.
struct SigmaLabel {
  std::vector<int> v;
};

/// Compact homogeneous model space with its acting group G, the designated
/// compact K (whose double KK = K x K acts through (k1, k) . p = k1 k . p),
/// a two-chart atlas with smooth bump partition, and the exact
/// eigen-decomposition with isotypic tables.
///
/// Bundled configurations:
///   t1         M = T^1,  K = G = U(1)
///   t2         M = T^2,  K = G = T^2
///   s2         M = unit S^2, G = SU(2) acting by rotations, K = SO(2)
///   su2        M = SU(2) (radius-2 sphere), G acts by right translation, K = G
///   su2_torus  M = SU(2), K = U(1) maximal torus (bundle geometry)
class SpaceModel {
 public:
  static SpaceModel make(const std::string& name);

  const std::string& name() const { return name_; }
  SpaceKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int group_dim() const { return group_.dim(); }
  int k_dim() const { return k_dim_; }
  int kk_dim() const { return 2 * k_dim_; }
  double riemannian_volume() const { return volume_; }
  const GroupModel& group() const { return group_; }
  bool circle_k() const { return k_dim_ == 1 && kind_ != SpaceKind::T2; }
  /// Period of the K-circle parameter (2 pi for t1/s2, 4 pi for su2_torus).
  double k_period() const { return k_period_; }

  // --- exact spectra -------------------------------------------------------
  /// tr(P_sigma e^{-t Laplacian} P_sigma) with certified relative tail < 1e-12.
  double spectral_trace(const SigmaLabel& sigma, double t, double* tail_bound = nullptr,
                        double l_cap = 2.0e5) const;
  /// Smallest t for which the trace is certifiable under the given cap.
  double min_time(double l_cap = 2.0e5) const;
  std::vector<SigmaLabel> bundled_sigmas() const;

  // --- atlas ---------------------------------------------------------------
  int num_charts() const { return 2 * (kind_ == SpaceKind::T2 ? 2 : 1); }
  bool chart_contains(int c, const SpacePoint& p) const;
  std::vector<double> chart_coords(int c, const SpacePoint& p) const;
  SpacePoint chart_point(int c, const std::vector<double>& x) const;
  double partition(int c, const SpacePoint& p) const;        ///< alpha_iota
  double partition_prime(int c, const SpacePoint& p) const;  ///< alpha'_iota
  double chart_jacobian(int c, const SpacePoint& p) const;   ///< j_iota = dx/dM

  // --- base quadrature over M; weights sum to vol(M) -----------------------
  std::vector<std::pair<SpacePoint, double>> base_quadrature(int per_dim) const;

  // --- G-action -------------------------------------------------------------
  SpacePoint g_act(const GroupElement& g, const SpacePoint& p) const;
  /// Normalized quadrature over the stabilizer G_p (nodes in G, weights sum 1).
  std::vector<std::pair<GroupElement, double>> stabilizer_rule(const SpacePoint& p,
                                                               int nodes) const;

  // --- KK-action -------------------------------------------------------------
  /// Circle-K spaces: the pair (theta1, theta) acts through theta1 + theta.
  SpacePoint kk_act(double theta1, double theta, const SpacePoint& p) const;
  /// su2 (both-sided): quaternion pair.
  SpacePoint kk_act(const GroupElement& k1, const GroupElement& k, const SpacePoint& p) const;
  complexd k_character(const SigmaLabel& sigma, double theta) const;  ///< circle K
  /// Dimension of sigma as K-irrep (1 for circle K, 2j+1 for su2).
  int sigma_dimension(const SigmaLabel& sigma) const;

  SpacePoint reference_point() const;
  SpacePoint random_point(std::mt19937_64& rng) const;

 private:
  std::string name_;
  SpaceKind kind_ = SpaceKind::T1;
  int dim_ = 1;
  int k_dim_ = 1;
  double k_period_ = kTwoPi;
  double volume_ = kTwoPi;
  GroupModel group_ = GroupModel::make("u1");
};

/// C-infinity step: 0 for s <= 0, 1 for s >= 1, smooth and monotone between.
double smooth_step(double s);

}  // namespace equiheat
