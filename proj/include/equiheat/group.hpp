#pragma once

#include <array>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "equiheat/numerics.hpp"

namespace equiheat {

enum class GroupKind { U1, T2, SU2, SO3 };

/// Element of a bundled compact group. Tori store angles in data[0..rank),
/// SU(2) stores a unit quaternion (w, x, y, z), SO(3) a unit quaternion with
/// the canonical sign (w >= 0).
struct GroupElement {
  std::array<double, 4> data{1.0, 0.0, 0.0, 0.0};
};

/// Irreducible representation data: integer label vector, dimension,
/// Casimir eigenvalue under the fixed metric normalization.
struct IrrepInfo {
  std::vector<int> label;  ///< U1: {n}; T2: {n1,n2}; SU2: {2j}; SO3: {j}
  int dimension = 1;
  double casimir = 0.0;
};

/// Haar quadrature rule: group nodes with positive weights summing to 1.
struct HaarRule {
  std::vector<GroupElement> nodes;
  std::vector<double> weights;
  int exact_degree = 0;  ///< certified polynomial exactness degree
  std::size_t size() const { return nodes.size(); }
};

/// Compact model group with bi-invariant metric normalized so that the
/// Casimir eigenvalue is n^2 on U(1) weight n and j(j+1) on SU(2) spin j.
/// Under this normalization SU(2) is the round 3-sphere of radius 2
/// (volume 16 pi^2) and U(1) the circle of circumference 2 pi.
class GroupModel {
 public:
  static GroupModel make(const std::string& name);  // "u1" | "t2" | "su2" | "so3"

  const std::string& name() const { return name_; }
  GroupKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int rank() const { return rank_; }
  double injectivity_radius() const { return injectivity_radius_; }
  double riemannian_volume() const { return riemannian_volume_; }
  const std::vector<std::string>& basis_labels() const { return basis_labels_; }

  GroupElement identity() const;
  GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;

  /// Canonical coordinates: exp(sum zeta_i X_i) for the orthonormal basis X_i.
  GroupElement exp(const std::vector<double>& zeta) const;
  /// Inverse of exp; throws DomainError outside the injectivity radius.
  std::vector<double> log(const GroupElement& g) const;

  /// Geodesic distance |g| = d(g, e) of the bi-invariant metric.
  double distance(const GroupElement& g) const;
  double distance(const GroupElement& g, const GroupElement& h) const;

  /// Haar volume density in canonical coordinates, Psi^*(dVol) = j(zeta) dzeta
  /// relative to Lebesgue; j(0) = 1.
  double volume_jacobian(const std::vector<double>& zeta) const;

  /// All irreps with Casimir eigenvalue <= lambda_max, sorted by eigenvalue.
  std::vector<IrrepInfo> irreps(double lambda_max) const;

  complexd character(const IrrepInfo& rho, const GroupElement& g) const;

  /// Product quadrature exact for polynomials of matrix coefficients up to
  /// total degree `bandwidth` (tori: trigonometric degree; SU2/SO3:
  /// polynomial degree on the quaternion sphere).
  HaarRule haar_rule(int bandwidth) const;

  complexd haar_integrate(const std::function<complexd(const GroupElement&)>& f,
                          int bandwidth = 32) const;

  GroupElement random_element(std::mt19937_64& rng) const;

  /// Maximal torus of SU(2): z(alpha) = exp(alpha X_3), alpha in [0, 4 pi).
  GroupElement torus_element(double alpha) const;

 private:
  std::string name_;
  GroupKind kind_ = GroupKind::U1;
  int dim_ = 1;
  int rank_ = 1;
  double injectivity_radius_ = kPi;
  double riemannian_volume_ = kTwoPi;
  std::vector<std::string> basis_labels_;
};

/// Spin-j label helpers for SU(2)/SO(3) irreps.
inline double su2_spin(const IrrepInfo& rho) { return rho.label.at(0) / 2.0; }

}  // namespace equiheat
