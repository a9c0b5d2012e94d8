#include "equiheat/space.hpp"

#include <algorithm>
#include <cmath>

#include "equiheat/errors.hpp"

namespace equiheat {

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  double a = std::exp(-1.0 / s);
  double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

namespace {

// T1 chart layout: centers 0 and pi, arc domains |wrap(x - c)| < 0.95 pi.
// The partition bump dies early (0.5 pi) so that alpha' can fade over a wide
// window, which keeps the smoothing-symbol tails steep.
constexpr double kT1Flat = 0.35 * kPi;
constexpr double kT1Zero = 0.65 * kPi;
constexpr double kT1PrimeFlat = 0.67 * kPi;
constexpr double kT1PrimeZero = 0.93 * kPi;
constexpr double kT1Domain = 0.95 * kPi;

double t1_alpha0(double x) {
  double r = std::abs(wrap_angle(x));
  return smooth_step((kT1Zero - r) / (kT1Zero - kT1Flat));
}

double t1_alpha_prime(double xc) {  // xc = coordinate relative to the chart center
  double r = std::abs(wrap_angle(xc));
  return smooth_step((kT1PrimeZero - r) / (kT1PrimeZero - kT1PrimeFlat));
}

GroupElement p_as_group(const SpacePoint& p) {
  GroupElement g;
  g.data = p.v;
  return g;
}

SpacePoint rotate_s2(const GroupElement& q, const SpacePoint& p) {
  // p' = R(q) p for unit quaternion q
  double w = q.data[0], x = q.data[1], y = q.data[2], z = q.data[3];
  double px = p.v[0], py = p.v[1], pz = p.v[2];
  // quaternion sandwich, expanded
  double tx = 2.0 * (y * pz - z * py);
  double ty = 2.0 * (z * px - x * pz);
  double tz = 2.0 * (x * py - y * px);
  SpacePoint r;
  r.v[0] = px + w * tx + (y * tz - z * ty);
  r.v[1] = py + w * ty + (z * tx - x * tz);
  r.v[2] = pz + w * tz + (x * ty - y * tx);
  return r;
}

GroupElement quat_from_to(const GroupModel& su2, const std::array<double, 3>& a,
                          const std::array<double, 3>& b) {
  // unit quaternion rotating unit vector a onto unit vector b
  double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  std::array<double, 3> cr{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                           a[0] * b[1] - a[1] * b[0]};
  double s = std::sqrt(std::max(0.0, (1.0 + dot) * 2.0));
  GroupElement q;
  if (s < 1e-8) {
    // antipodal: rotate by pi about any axis orthogonal to a
    std::array<double, 3> axis{-a[1], a[0], 0.0};
    double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1]);
    if (n < 1e-8) axis = {1.0, 0.0, 0.0}, n = 1.0;
    q.data = {0.0, axis[0] / n, axis[1] / n, axis[2] / n};
  } else {
    q.data = {0.5 * s, cr[0] / s, cr[1] / s, cr[2] / s};
  }
  (void)su2;
  return q;
}

// SU(2) chart layout: exp charts at e and -1, partition bump in |p|.
// Symmetric choice: supp(alpha_0) reaches 0.65 (and supp(alpha_1) reaches
// chart-1 distance 0.65), with alpha' flat out to 0.67 on each side.
constexpr double kQFlat = 0.35;   // fractions of 2 pi
constexpr double kQZero = 0.65;
constexpr double kQPrimeFlat = 0.67;
constexpr double kQPrimeZero = 0.90;
constexpr double kQDomain = 0.92;

}  // namespace

SpaceModel SpaceModel::make(const std::string& name) {
  SpaceModel s;
  s.name_ = name;
  if (name == "t1") {
    s.kind_ = SpaceKind::T1;
    s.dim_ = 1;
    s.k_dim_ = 1;
    s.k_period_ = kTwoPi;
    s.volume_ = kTwoPi;
    s.group_ = GroupModel::make("u1");
  } else if (name == "t2") {
    s.kind_ = SpaceKind::T2;
    s.dim_ = 2;
    s.k_dim_ = 2;
    s.k_period_ = kTwoPi;
    s.volume_ = kTwoPi * kTwoPi;
    s.group_ = GroupModel::make("t2");
  } else if (name == "s2") {
    s.kind_ = SpaceKind::S2;
    s.dim_ = 2;
    s.k_dim_ = 1;
    s.k_period_ = kTwoPi;
    s.volume_ = 4.0 * kPi;
    s.group_ = GroupModel::make("su2");
  } else if (name == "su2") {
    s.kind_ = SpaceKind::SU2Both;
    s.dim_ = 3;
    s.k_dim_ = 3;
    s.k_period_ = 0.0;
    s.volume_ = 16.0 * kPi * kPi;
    s.group_ = GroupModel::make("su2");
  } else if (name == "su2_torus") {
    s.kind_ = SpaceKind::SU2Torus;
    s.dim_ = 3;
    s.k_dim_ = 1;
    s.k_period_ = 2.0 * kTwoPi;
    s.volume_ = 16.0 * kPi * kPi;
    s.group_ = GroupModel::make("su2");
  } else {
    throw DomainError("unknown space model '" + name +
                      "' (expected t1|t2|s2|su2|su2_torus)");
  }
  return s;
}

double SpaceModel::spectral_trace(const SigmaLabel& sigma, double t, double* tail_bound,
                                  double l_cap) const {
  if (t <= 0.0) throw DomainError("spectral_trace: t must be positive");
  double tail = 0.0;
  double value = 0.0;
  switch (kind_) {
    case SpaceKind::T1: {
      int m = sigma.v.at(0);
      value = std::exp(-t * m * m);
      break;
    }
    case SpaceKind::T2: {
      double m2 = static_cast<double>(sigma.v.at(0)) * sigma.v.at(0) +
                  static_cast<double>(sigma.v.at(1)) * sigma.v.at(1);
      value = std::exp(-t * m2);
      break;
    }
    case SpaceKind::S2:
    case SpaceKind::SU2Torus: {
      // S2 weight m:        sum_{l >= |m|} e^{-t l(l+1)}
      // su2_torus weight n: sum_{l >= |n|} (2l+1) e^{-t l(l+1)}
      int m = std::abs(sigma.v.at(0));
      bool with_mult = (kind_ == SpaceKind::SU2Torus);
      KahanSum acc;
      int l = m;
      for (;; ++l) {
        double term = std::exp(-t * l * (l + 1.0)) * (with_mult ? (2.0 * l + 1.0) : 1.0);
        acc.add(term);
        double ratio = std::exp(-2.0 * t * (l + 2.0)) *
                       (with_mult ? (2.0 * l + 5.0) / (2.0 * l + 3.0) : 1.0);
        if (ratio < 1.0) {
          double next = std::exp(-t * (l + 1.0) * (l + 2.0)) *
                        (with_mult ? (2.0 * l + 3.0) : 1.0);
          tail = next / (1.0 - ratio);
          if (tail < 1e-12 * std::max(acc.value(), 1e-300)) break;
        }
        if (l > l_cap) {
          double t_min = min_time(l_cap);
          throw TruncationError("spectral_trace: series cutoff exceeds cap at t = " +
                                    std::to_string(t) + "; minimum achievable t ~ " +
                                    std::to_string(t_min),
                                l_cap, l_cap);
        }
      }
      value = acc.value();
      break;
    }
    case SpaceKind::SU2Both: {
      // Peter-Weyl block V_sigma (x) V_sigma^*: trace d_sigma^2 e^{-t lambda_sigma}.
      double j = sigma.v.at(0) / 2.0;
      double d = sigma.v.at(0) + 1.0;
      value = d * d * std::exp(-t * j * (j + 1.0));
      break;
    }
  }
  if (tail_bound) *tail_bound = tail;
  return value;
}

double SpaceModel::min_time(double l_cap) const {
  // t such that the term ratio certifies below the cap: t l_cap^2 ~ 30.
  return 30.0 / (l_cap * l_cap);
}

std::vector<SigmaLabel> SpaceModel::bundled_sigmas() const {
  switch (kind_) {
    case SpaceKind::T1:
      return {{{0}}, {{1}}, {{2}}};
    case SpaceKind::T2:
      return {{{0, 0}}, {{1, 0}}, {{1, 1}}};
    case SpaceKind::S2:
      return {{{0}}, {{1}}, {{2}}};
    case SpaceKind::SU2Both:
      return {{{0}}, {{1}}, {{2}}};  // 2j = 0, 1, 2
    case SpaceKind::SU2Torus:
      return {{{0}}, {{1}}, {{2}}};
  }
  return {};
}

bool SpaceModel::chart_contains(int c, const SpacePoint& p) const {
  switch (kind_) {
    case SpaceKind::T1:
      return std::abs(wrap_angle(p.v[0] - (c == 0 ? 0.0 : kPi))) < kT1Domain;
    case SpaceKind::T2: {
      double c1 = (c & 1) ? kPi : 0.0, c2 = (c & 2) ? kPi : 0.0;
      return std::abs(wrap_angle(p.v[0] - c1)) < kT1Domain &&
             std::abs(wrap_angle(p.v[1] - c2)) < kT1Domain;
    }
    case SpaceKind::S2:
      return c == 0 ? (p.v[2] > -0.85) : (p.v[2] < 0.85);
    case SpaceKind::SU2Both:
    case SpaceKind::SU2Torus: {
      double r = group_.distance(p_as_group(p));
      return c == 0 ? (r < kQDomain * kTwoPi) : (kTwoPi - r < kQDomain * kTwoPi);
    }
  }
  return false;
}

std::vector<double> SpaceModel::chart_coords(int c, const SpacePoint& p) const {
  if (!chart_contains(c, p)) throw DomainError("chart_coords: point outside chart " + std::to_string(c));
  switch (kind_) {
    case SpaceKind::T1:
      return {wrap_angle(p.v[0] - (c == 0 ? 0.0 : kPi))};
    case SpaceKind::T2: {
      double c1 = (c & 1) ? kPi : 0.0, c2 = (c & 2) ? kPi : 0.0;
      return {wrap_angle(p.v[0] - c1), wrap_angle(p.v[1] - c2)};
    }
    case SpaceKind::S2: {
      double X = p.v[0], Y = p.v[1], Z = p.v[2];
      if (c == 0) return {X / (1.0 + Z), Y / (1.0 + Z)};
      return {X / (1.0 - Z), Y / (1.0 - Z)};
    }
    case SpaceKind::SU2Both:
    case SpaceKind::SU2Torus: {
      GroupElement g = p_as_group(p);
      if (c == 1) {
        GroupElement mg;  // (-1)^{-1} p = -p
        mg.data = {-g.data[0], -g.data[1], -g.data[2], -g.data[3]};
        g = mg;
      }
      return group_.log(g);
    }
  }
  return {};
}

SpacePoint SpaceModel::chart_point(int c, const std::vector<double>& x) const {
  SpacePoint p;
  switch (kind_) {
    case SpaceKind::T1:
      p.v[0] = std::fmod(x.at(0) + (c == 0 ? 0.0 : kPi) + 2 * kTwoPi, kTwoPi);
      return p;
    case SpaceKind::T2: {
      double c1 = (c & 1) ? kPi : 0.0, c2 = (c & 2) ? kPi : 0.0;
      p.v[0] = std::fmod(x.at(0) + c1 + 2 * kTwoPi, kTwoPi);
      p.v[1] = std::fmod(x.at(1) + c2 + 2 * kTwoPi, kTwoPi);
      return p;
    }
    case SpaceKind::S2: {
      double u = x.at(0), v = x.at(1), n2 = u * u + v * v;
      if (c == 0) {
        p.v = {2.0 * u / (1.0 + n2), 2.0 * v / (1.0 + n2), (1.0 - n2) / (1.0 + n2), 0.0};
      } else {
        p.v = {2.0 * u / (1.0 + n2), 2.0 * v / (1.0 + n2), (n2 - 1.0) / (1.0 + n2), 0.0};
      }
      return p;
    }
    case SpaceKind::SU2Both:
    case SpaceKind::SU2Torus: {
      GroupElement g = group_.exp(x);
      if (c == 1) g.data = {-g.data[0], -g.data[1], -g.data[2], -g.data[3]};
      p.v = g.data;
      return p;
    }
  }
  return p;
}

double SpaceModel::partition(int c, const SpacePoint& p) const {
  switch (kind_) {
    case SpaceKind::T1:
      return c == 0 ? t1_alpha0(p.v[0]) : 1.0 - t1_alpha0(p.v[0]);
    case SpaceKind::T2: {
      double a1 = t1_alpha0(p.v[0]), a2 = t1_alpha0(p.v[1]);
      double f1 = (c & 1) ? (1.0 - a1) : a1;
      double f2 = (c & 2) ? (1.0 - a2) : a2;
      return f1 * f2;
    }
    case SpaceKind::S2: {
      double aN = smooth_step((p.v[2] + 0.35) / 0.7);
      return c == 0 ? aN : 1.0 - aN;
    }
    case SpaceKind::SU2Both:
    case SpaceKind::SU2Torus: {
      double r = group_.distance(p_as_group(p)) / kTwoPi;  // in [0, 1]
      double a0 = smooth_step((kQZero - r) / (kQZero - kQFlat));
      return c == 0 ? a0 : 1.0 - a0;
    }
  }
  return 0.0;
}

double SpaceModel::partition_prime(int c, const SpacePoint& p) const {
  switch (kind_) {
    case SpaceKind::T1:
      return t1_alpha_prime(p.v[0] - (c == 0 ? 0.0 : kPi));
    case SpaceKind::T2: {
      double c1 = (c & 1) ? kPi : 0.0, c2 = (c & 2) ? kPi : 0.0;
      return t1_alpha_prime(p.v[0] - c1) * t1_alpha_prime(p.v[1] - c2);
    }
    case SpaceKind::S2: {
      double z = (c == 0) ? p.v[2] : -p.v[2];
      return smooth_step((z + 0.75) / 0.3);
    }
    case SpaceKind::SU2Both:
    case SpaceKind::SU2Torus: {
      double r = group_.distance(p_as_group(p)) / kTwoPi;
      double rc = (c == 0) ? r : 1.0 - r;
      return smooth_step((kQPrimeZero - rc) / (kQPrimeZero - kQPrimeFlat));
    }
  }
  return 0.0;
}

double SpaceModel::chart_jacobian(int c, const SpacePoint& p) const {
  switch (kind_) {
    case SpaceKind::T1:
    case SpaceKind::T2:
      return 1.0;
    case SpaceKind::S2: {
      auto x = chart_coords(c, p);
      double n2 = x[0] * x[0] + x[1] * x[1];
      double f = (1.0 + n2) / 2.0;
      return f * f;
    }
    case SpaceKind::SU2Both:
    case SpaceKind::SU2Torus: {
      auto x = chart_coords(c, p);
      return 1.0 / group_.volume_jacobian(x);
    }
  }
  return 1.0;
}

std::vector<std::pair<SpacePoint, double>> SpaceModel::base_quadrature(int per_dim) const {
  std::vector<std::pair<SpacePoint, double>> out;
  switch (kind_) {
    case SpaceKind::T1: {
      auto tr = periodic_trapezoid(per_dim, kTwoPi);
      for (std::size_t i = 0; i < tr.size(); ++i) {
        SpacePoint p;
        p.v[0] = tr.nodes[i];
        out.emplace_back(p, tr.weights[i]);
      }
      return out;
    }
    case SpaceKind::T2: {
      auto tr = periodic_trapezoid(per_dim, kTwoPi);
      for (std::size_t i = 0; i < tr.size(); ++i)
        for (std::size_t j = 0; j < tr.size(); ++j) {
          SpacePoint p;
          p.v[0] = tr.nodes[i];
          p.v[1] = tr.nodes[j];
          out.emplace_back(p, tr.weights[i] * tr.weights[j]);
        }
      return out;
    }
    case SpaceKind::S2: {
      auto gl = gauss_legendre(per_dim, -1.0, 1.0);
      auto tr = periodic_trapezoid(2 * per_dim, kTwoPi);
      for (int i = 0; i < per_dim; ++i)
        for (std::size_t j = 0; j < tr.size(); ++j) {
          double z = gl.nodes[i], s = std::sqrt(1.0 - z * z);
          SpacePoint p;
          p.v = {s * std::cos(tr.nodes[j]), s * std::sin(tr.nodes[j]), z, 0.0};
          out.emplace_back(p, gl.weights[i] * tr.weights[j]);
        }
      return out;
    }
    case SpaceKind::SU2Both:
    case SpaceKind::SU2Torus: {
      HaarRule rule = group_.haar_rule(per_dim);
      for (std::size_t i = 0; i < rule.size(); ++i) {
        SpacePoint p;
        p.v = rule.nodes[i].data;
        out.emplace_back(p, rule.weights[i] * volume_);
      }
      return out;
    }
  }
  return out;
}

SpacePoint SpaceModel::g_act(const GroupElement& g, const SpacePoint& p) const {
  SpacePoint r = p;
  switch (kind_) {
    case SpaceKind::T1:
      r.v[0] = std::fmod(p.v[0] + g.data[0] + kTwoPi, kTwoPi);
      return r;
    case SpaceKind::T2:
      r.v[0] = std::fmod(p.v[0] + g.data[0] + kTwoPi, kTwoPi);
      r.v[1] = std::fmod(p.v[1] + g.data[1] + kTwoPi, kTwoPi);
      return r;
    case SpaceKind::S2:
      return rotate_s2(g, p);
    case SpaceKind::SU2Both:
    case SpaceKind::SU2Torus: {
      GroupElement pg = group_.multiply(p_as_group(p), g);
      r.v = pg.data;
      return r;
    }
  }
  return r;
}

std::vector<std::pair<GroupElement, double>> SpaceModel::stabilizer_rule(const SpacePoint& p,
                                                                         int nodes) const {
  std::vector<std::pair<GroupElement, double>> out;
  switch (kind_) {
    case SpaceKind::T1:
    case SpaceKind::T2:
    case SpaceKind::SU2Both:
    case SpaceKind::SU2Torus:
      out.emplace_back(group_.identity(), 1.0);
      return out;
    case SpaceKind::S2: {
      // G_p = q_p { z(alpha) } q_p^{-1}, the conjugated maximal torus.
      GroupElement qp = quat_from_to(group_, {0.0, 0.0, 1.0}, {p.v[0], p.v[1], p.v[2]});
      GroupElement qpi = group_.inverse(qp);
      auto tr = periodic_trapezoid(nodes, 2.0 * kTwoPi);
      for (std::size_t i = 0; i < tr.size(); ++i) {
        GroupElement z = group_.torus_element(tr.nodes[i]);
        out.emplace_back(group_.multiply(qp, group_.multiply(z, qpi)), 1.0 / nodes);
      }
      return out;
    }
  }
  return out;
}

SpacePoint SpaceModel::kk_act(double theta1, double theta, const SpacePoint& p) const {
  switch (kind_) {
    case SpaceKind::T1: {
      SpacePoint r;
      r.v[0] = std::fmod(p.v[0] + theta1 + theta + 4 * kTwoPi, kTwoPi);
      return r;
    }
    case SpaceKind::S2: {
      GroupElement z = group_.torus_element(theta1 + theta);  // rotation by theta1+theta about z
      return rotate_s2(z, p);
    }
    case SpaceKind::SU2Torus: {
      GroupElement z = group_.torus_element(theta1 + theta);
      return g_act(z, p);
    }
    default:
      throw DomainError("kk_act(angles): space does not have a circle K");
  }
}

SpacePoint SpaceModel::kk_act(const GroupElement& k1, const GroupElement& k,
                              const SpacePoint& p) const {
  if (kind_ != SpaceKind::SU2Both) throw DomainError("kk_act(group): only for su2 both-sided");
  return g_act(group_.multiply(k1, k), p);
}

complexd SpaceModel::k_character(const SigmaLabel& sigma, double theta) const {
  if (!circle_k()) throw DomainError("k_character(angle): K is not a circle");
  return std::polar(1.0, sigma.v.at(0) * theta);
}

int SpaceModel::sigma_dimension(const SigmaLabel& sigma) const {
  if (kind_ == SpaceKind::SU2Both) return sigma.v.at(0) + 1;
  return 1;
}

SpacePoint SpaceModel::reference_point() const {
  SpacePoint p;
  switch (kind_) {
    case SpaceKind::T1:
      p.v[0] = 0.7;
      return p;
    case SpaceKind::T2:
      p.v = {0.7, 1.3, 0, 0};
      return p;
    case SpaceKind::S2: {
      double th = 1.1, ph = 0.4;
      p.v = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th), 0.0};
      return p;
    }
    case SpaceKind::SU2Both:
    case SpaceKind::SU2Torus: {
      GroupElement g = group_.exp({0.4, 0.2, -0.3});
      p.v = g.data;
      return p;
    }
  }
  return p;
}

SpacePoint SpaceModel::random_point(std::mt19937_64& rng) const {
  SpacePoint p;
  std::uniform_real_distribution<double> uang(0.0, kTwoPi);
  std::normal_distribution<double> gauss(0.0, 1.0);
  switch (kind_) {
    case SpaceKind::T1:
      p.v[0] = uang(rng);
      return p;
    case SpaceKind::T2:
      p.v = {uang(rng), uang(rng), 0, 0};
      return p;
    case SpaceKind::S2: {
      double x = gauss(rng), y = gauss(rng), z = gauss(rng);
      double n = std::sqrt(x * x + y * y + z * z);
      p.v = {x / n, y / n, z / n, 0.0};
      return p;
    }
    case SpaceKind::SU2Both:
    case SpaceKind::SU2Torus: {
      GroupElement g = group_.random_element(rng);
      p.v = g.data;
      return p;
    }
  }
  return p;
}

}  // namespace equiheat
