#include "equiheat/group.hpp"

#include <algorithm>
#include <cmath>

#include "equiheat/errors.hpp"

namespace equiheat {

namespace {

std::array<double, 4> qmul(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
          a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
          a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

std::array<double, 4> qconj(const std::array<double, 4>& a) {
  return {a[0], -a[1], -a[2], -a[3]};
}

void qnormalize(std::array<double, 4>& q) {
  double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  for (auto& c : q) c /= n;
}

// Canonical representative for SO(3) = SU(2)/{±1}: w > 0, ties broken by the
// first nonzero imaginary component.
void so3_canonicalize(std::array<double, 4>& q) {
  bool flip = false;
  if (q[0] < 0.0)
    flip = true;
  else if (q[0] == 0.0) {
    for (int i = 1; i < 4; ++i) {
      if (q[i] < 0.0) {
        flip = true;
        break;
      }
      if (q[i] > 0.0) break;
    }
  }
  if (flip)
    for (auto& c : q) c = -c;
}

/// Chebyshev U_k(w) = character of spin k/2 at class parameter w = Re q.
double chebyshev_u(int k, double w) {
  double u0 = 1.0, u1 = 2.0 * w;
  if (k == 0) return u0;
  if (k == 1) return u1;
  for (int i = 2; i <= k; ++i) {
    double u2 = 2.0 * w * u1 - u0;
    u0 = u1;
    u1 = u2;
  }
  return u1;
}

}  // namespace

GroupModel GroupModel::make(const std::string& name) {
  GroupModel m;
  m.name_ = name;
  if (name == "u1") {
    m.kind_ = GroupKind::U1;
    m.dim_ = 1;
    m.rank_ = 1;
    m.injectivity_radius_ = kPi;
    m.riemannian_volume_ = kTwoPi;
    m.basis_labels_ = {"X_1"};
  } else if (name == "t2") {
    m.kind_ = GroupKind::T2;
    m.dim_ = 2;
    m.rank_ = 2;
    m.injectivity_radius_ = kPi;
    m.riemannian_volume_ = kTwoPi * kTwoPi;
    m.basis_labels_ = {"X_1", "X_2"};
  } else if (name == "su2") {
    m.kind_ = GroupKind::SU2;
    m.dim_ = 3;
    m.rank_ = 1;
    // Round 3-sphere of radius 2: antipode -1 sits at distance 2 pi.
    m.injectivity_radius_ = kTwoPi;
    m.riemannian_volume_ = 16.0 * kPi * kPi;
    m.basis_labels_ = {"X_1", "X_2", "X_3"};
  } else if (name == "so3") {
    m.kind_ = GroupKind::SO3;
    m.dim_ = 3;
    m.rank_ = 1;
    m.injectivity_radius_ = kPi;
    m.riemannian_volume_ = 8.0 * kPi * kPi;
    m.basis_labels_ = {"X_1", "X_2", "X_3"};
  } else {
    throw DomainError("unknown group model '" + name + "' (expected u1|t2|su2|so3)");
  }
  return m;
}

GroupElement GroupModel::identity() const {
  GroupElement e;
  if (kind_ == GroupKind::U1 || kind_ == GroupKind::T2) e.data = {0.0, 0.0, 0.0, 0.0};
  return e;
}

GroupElement GroupModel::multiply(const GroupElement& a, const GroupElement& b) const {
  GroupElement r;
  switch (kind_) {
    case GroupKind::U1:
      r.data = {std::fmod(a.data[0] + b.data[0], kTwoPi), 0, 0, 0};
      if (r.data[0] < 0) r.data[0] += kTwoPi;
      break;
    case GroupKind::T2:
      for (int i = 0; i < 2; ++i) {
        r.data[i] = std::fmod(a.data[i] + b.data[i], kTwoPi);
        if (r.data[i] < 0) r.data[i] += kTwoPi;
      }
      break;
    case GroupKind::SU2:
      r.data = qmul(a.data, b.data);
      qnormalize(r.data);
      break;
    case GroupKind::SO3:
      r.data = qmul(a.data, b.data);
      qnormalize(r.data);
      so3_canonicalize(r.data);
      break;
  }
  return r;
}

GroupElement GroupModel::inverse(const GroupElement& a) const {
  GroupElement r;
  switch (kind_) {
    case GroupKind::U1:
    case GroupKind::T2:
      for (int i = 0; i < rank_; ++i) {
        r.data[i] = std::fmod(-a.data[i], kTwoPi);
        if (r.data[i] < 0) r.data[i] += kTwoPi;
      }
      break;
    case GroupKind::SU2:
      r.data = qconj(a.data);
      break;
    case GroupKind::SO3:
      r.data = qconj(a.data);
      so3_canonicalize(r.data);
      break;
  }
  return r;
}

GroupElement GroupModel::exp(const std::vector<double>& zeta) const {
  if (static_cast<int>(zeta.size()) != dim_)
    throw DomainError("exp: zeta has wrong dimension for " + name_);
  GroupElement g;
  if (kind_ == GroupKind::U1 || kind_ == GroupKind::T2) {
    g.data = {0, 0, 0, 0};
    for (int i = 0; i < rank_; ++i) {
      g.data[i] = std::fmod(zeta[i], kTwoPi);
      if (g.data[i] < 0) g.data[i] += kTwoPi;
    }
    return g;
  }
  // SU(2)/SO(3): orthonormal basis X_i = e_i / 2 (quaternion units halved),
  // so exp(zeta) = cos(|zeta|/2) + sin(|zeta|/2) zeta-hat and |exp(zeta)| =
  // |zeta| inside the injectivity radius.
  double r = std::sqrt(zeta[0] * zeta[0] + zeta[1] * zeta[1] + zeta[2] * zeta[2]);
  if (r < 1e-300) {
    g.data = {1, 0, 0, 0};
  } else {
    double c = std::cos(0.5 * r), s = std::sin(0.5 * r) / r;
    g.data = {c, s * zeta[0], s * zeta[1], s * zeta[2]};
  }
  if (kind_ == GroupKind::SO3) so3_canonicalize(g.data);
  return g;
}

std::vector<double> GroupModel::log(const GroupElement& g) const {
  if (kind_ == GroupKind::U1 || kind_ == GroupKind::T2) {
    std::vector<double> zeta(rank_);
    for (int i = 0; i < rank_; ++i) {
      zeta[i] = wrap_angle(g.data[i]);
      if (std::abs(zeta[i]) >= kPi - 1e-14)
        throw DomainError("log: element at/beyond the injectivity radius of " + name_);
    }
    return zeta;
  }
  double w = g.data[0];
  double s = std::sqrt(g.data[1] * g.data[1] + g.data[2] * g.data[2] + g.data[3] * g.data[3]);
  double half = std::atan2(s, w);  // in [0, pi]
  if (2.0 * half >= injectivity_radius_ - 1e-12)
    throw DomainError("log: element at/beyond the injectivity radius of " + name_);
  if (s < 1e-300) return {0.0, 0.0, 0.0};
  double scale = 2.0 * half / s;
  return {scale * g.data[1], scale * g.data[2], scale * g.data[3]};
}

double GroupModel::distance(const GroupElement& g) const {
  switch (kind_) {
    case GroupKind::U1:
      return std::abs(wrap_angle(g.data[0]));
    case GroupKind::T2: {
      double a = wrap_angle(g.data[0]), b = wrap_angle(g.data[1]);
      return std::sqrt(a * a + b * b);
    }
    case GroupKind::SU2: {
      double s =
          std::sqrt(g.data[1] * g.data[1] + g.data[2] * g.data[2] + g.data[3] * g.data[3]);
      return 2.0 * std::atan2(s, g.data[0]);
    }
    case GroupKind::SO3: {
      double s =
          std::sqrt(g.data[1] * g.data[1] + g.data[2] * g.data[2] + g.data[3] * g.data[3]);
      return 2.0 * std::atan2(s, std::abs(g.data[0]));
    }
  }
  return 0.0;
}

double GroupModel::distance(const GroupElement& g, const GroupElement& h) const {
  return distance(multiply(inverse(g), h));
}

double GroupModel::volume_jacobian(const std::vector<double>& zeta) const {
  if (kind_ == GroupKind::U1 || kind_ == GroupKind::T2) return 1.0;
  double r = std::sqrt(zeta[0] * zeta[0] + zeta[1] * zeta[1] + zeta[2] * zeta[2]);
  if (r < 1e-8) return 1.0 - r * r / 12.0;
  double x = std::sin(0.5 * r) / (0.5 * r);
  return x * x;
}

std::vector<IrrepInfo> GroupModel::irreps(double lambda_max) const {
  if (lambda_max <= 0) throw DomainError("irreps: lambda_max must be positive");
  std::vector<IrrepInfo> out;
  switch (kind_) {
    case GroupKind::U1: {
      int nmax = static_cast<int>(std::floor(std::sqrt(lambda_max)));
      for (int n = -nmax; n <= nmax; ++n)
        out.push_back({{n}, 1, static_cast<double>(n) * n});
      break;
    }
    case GroupKind::T2: {
      int nmax = static_cast<int>(std::floor(std::sqrt(lambda_max)));
      for (int n1 = -nmax; n1 <= nmax; ++n1)
        for (int n2 = -nmax; n2 <= nmax; ++n2) {
          double lam = static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2;
          if (lam <= lambda_max) out.push_back({{n1, n2}, 1, lam});
        }
      break;
    }
    case GroupKind::SU2: {
      for (int k = 0;; ++k) {  // k = 2j
        double j = 0.5 * k;
        double lam = j * (j + 1.0);
        if (lam > lambda_max) break;
        out.push_back({{k}, k + 1, lam});
      }
      break;
    }
    case GroupKind::SO3: {
      for (int j = 0;; ++j) {
        double lam = static_cast<double>(j) * (j + 1.0);
        if (lam > lambda_max) break;
        out.push_back({{2 * j}, 2 * j + 1, lam});
      }
      break;
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const IrrepInfo& a, const IrrepInfo& b) { return a.casimir < b.casimir; });
  return out;
}

complexd GroupModel::character(const IrrepInfo& rho, const GroupElement& g) const {
  switch (kind_) {
    case GroupKind::U1:
      return std::polar(1.0, rho.label[0] * g.data[0]);
    case GroupKind::T2:
      return std::polar(1.0, rho.label[0] * g.data[0] + rho.label[1] * g.data[1]);
    case GroupKind::SU2:
    case GroupKind::SO3:
      return complexd(chebyshev_u(rho.label[0], g.data[0]), 0.0);
  }
  return 0.0;
}

HaarRule GroupModel::haar_rule(int bandwidth) const {
  if (bandwidth < 1) bandwidth = 1;
  HaarRule rule;
  rule.exact_degree = bandwidth;
  if (kind_ == GroupKind::U1) {
    auto tr = periodic_trapezoid(bandwidth + 1, kTwoPi);
    for (std::size_t i = 0; i < tr.size(); ++i) {
      GroupElement g;
      g.data = {tr.nodes[i], 0, 0, 0};
      rule.nodes.push_back(g);
      rule.weights.push_back(tr.weights[i] / kTwoPi);
    }
    return rule;
  }
  if (kind_ == GroupKind::T2) {
    auto tr = periodic_trapezoid(bandwidth + 1, kTwoPi);
    for (std::size_t i = 0; i < tr.size(); ++i)
      for (std::size_t j = 0; j < tr.size(); ++j) {
        GroupElement g;
        g.data = {tr.nodes[i], tr.nodes[j], 0, 0};
        rule.nodes.push_back(g);
        rule.weights.push_back(tr.weights[i] * tr.weights[j] / (kTwoPi * kTwoPi));
      }
    return rule;
  }
  // SU(2)/SO(3): torus product rule in Hopf coordinates
  //   q = (cos(eta) cos(x1), sin(eta) cos(x2), sin(eta) sin(x2), cos(eta) sin(x1)),
  // normalized Haar = (1/(2 pi^2)) sin(eta) cos(eta) deta dx1 dx2. The two
  // circle factors carry trapezoid rules; s = sin^2(eta) carries Gauss-
  // Legendre. A polynomial of degree D on the quaternion sphere is integrated
  // exactly when both circle counts exceed D and the GL count n satisfies
  // 2n - 1 >= D/2. Equivalent to Euler angles via a = x1 + x2, c = x1 - x2.
  int ncirc = bandwidth + 1;
  int ngl = std::max(2, (bandwidth + 6) / 4);
  auto circ = periodic_trapezoid(ncirc, kTwoPi);
  auto gl = gauss_legendre(ngl, 0.0, 1.0);
  for (int is = 0; is < ngl; ++is) {
    double s = gl.nodes[is];
    double ce = std::sqrt(1.0 - s), se = std::sqrt(s);
    double ws = 0.5 * gl.weights[is];
    for (int i1 = 0; i1 < ncirc; ++i1)
      for (int i2 = 0; i2 < ncirc; ++i2) {
        GroupElement g;
        g.data = {ce * std::cos(circ.nodes[i1]), se * std::cos(circ.nodes[i2]),
                  se * std::sin(circ.nodes[i2]), ce * std::sin(circ.nodes[i1])};
        if (kind_ == GroupKind::SO3) so3_canonicalize(g.data);
        rule.nodes.push_back(g);
        rule.weights.push_back(ws * (circ.weights[i1] / kTwoPi) * (circ.weights[i2] / kTwoPi) *
                               2.0);
      }
  }
  // weights: (1/(2 pi^2)) * (2 pi/n)^2 * ws with the ds/2 substitution gives
  // total mass 1; the factor 2.0 above compensates the 1/2 in ws so that
  // sum w = sum ws * 2 * (1/n1)(1/n2) * ... = 1.
  return rule;
}

complexd GroupModel::haar_integrate(const std::function<complexd(const GroupElement&)>& f,
                                    int bandwidth) const {
  HaarRule rule = haar_rule(bandwidth);
  return parallel_sum_complex(rule.size(),
                              [&](std::size_t i) { return f(rule.nodes[i]) * rule.weights[i]; });
}

GroupElement GroupModel::random_element(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> uang(0.0, kTwoPi);
  std::normal_distribution<double> gauss(0.0, 1.0);
  GroupElement g;
  switch (kind_) {
    case GroupKind::U1:
      g.data = {uang(rng), 0, 0, 0};
      break;
    case GroupKind::T2:
      g.data = {uang(rng), uang(rng), 0, 0};
      break;
    case GroupKind::SU2:
    case GroupKind::SO3:
      g.data = {gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
      qnormalize(g.data);
      if (kind_ == GroupKind::SO3) so3_canonicalize(g.data);
      break;
  }
  return g;
}

GroupElement GroupModel::torus_element(double alpha) const {
  if (kind_ != GroupKind::SU2 && kind_ != GroupKind::SO3)
    throw DomainError("torus_element: only defined for su2/so3");
  GroupElement g;
  g.data = {std::cos(0.5 * alpha), 0, 0, std::sin(0.5 * alpha)};
  if (kind_ == GroupKind::SO3) so3_canonicalize(g.data);
  return g;
}

}  // namespace equiheat
