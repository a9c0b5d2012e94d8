#include "equiheat/symplectic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "equiheat/errors.hpp"

namespace equiheat {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 lambda3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

// --- fundamental fields in the bundled coordinate systems -------------------

// s2, spherical (Theta, phi): rotation fields about the coordinate axes.
std::array<double, 2> s2_rotation_field(int axis, double theta, double phi) {
  double ct = std::cos(theta), st = std::sin(theta);
  double cotT = ct / st;
  switch (axis) {
    case 0:
      return {-std::sin(phi), -cotT * std::cos(phi)};
    case 1:
      return {std::cos(phi), -cotT * std::sin(phi)};
    default:
      return {0.0, 1.0};
  }
}

std::array<double, 2> s2_spherical_of_point(const SpacePoint& p) {
  double theta = std::acos(std::clamp(p.v[2], -1.0, 1.0));
  double phi = std::atan2(p.v[1], p.v[0]);
  if (phi < 0) phi += kTwoPi;
  return {theta, phi};
}

SpacePoint s2_point_of_spherical(double theta, double phi) {
  SpacePoint p;
  p.v = {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta), 0.0};
  return p;
}

// Stereographic chart differential applied to an ambient tangent of S^2.
std::array<double, 2> s2_chart_push(int chart, const SpacePoint& p, const Vec3& v) {
  double X = p.v[0], Y = p.v[1], Z = p.v[2];
  if (chart == 0) {
    double d = 1.0 + Z;
    return {v[0] / d - X * v[2] / (d * d), v[1] / d - Y * v[2] / (d * d)};
  }
  double d = 1.0 - Z;
  return {v[0] / d + X * v[2] / (d * d), v[1] / d + Y * v[2] / (d * d)};
}

// G-fields in the coordinate system of pt, as PhaseTangent base components.
std::vector<std::vector<double>> g_fields(const SpaceModel& space, const CotangentPoint& pt) {
  std::vector<std::vector<double>> out;
  switch (space.kind()) {
    case SpaceKind::T1:
      out.push_back({1.0});
      break;
    case SpaceKind::T2:
      out.push_back({1.0, 0.0});
      out.push_back({0.0, 1.0});
      break;
    case SpaceKind::S2: {
      if (pt.chart == kChartBundled) {
        double th = pt.base.at(0), ph = pt.base.at(1);
        for (int l = 0; l < 3; ++l) {
          auto f = s2_rotation_field(l, th, ph);
          out.push_back({f[0], f[1]});
        }
      } else {
        for (int l = 0; l < 3; ++l) {
          Vec3 e{0, 0, 0};
          e[l] = 1.0;
          Vec3 amb = cross(e, {pt.p.v[0], pt.p.v[1], pt.p.v[2]});
          auto f = s2_chart_push(pt.chart, pt.p, amb);
          out.push_back({f[0], f[1]});
        }
      }
      break;
    }
    case SpaceKind::SU2Both:
    case SpaceKind::SU2Torus: {
      if (pt.chart != kChartLeftTrivialized)
        throw DomainError("su2 spaces: cotangent data must be left-trivialized");
      out.push_back({1.0, 0.0, 0.0});
      out.push_back({0.0, 1.0, 0.0});
      out.push_back({0.0, 0.0, 1.0});
      break;
    }
  }
  return out;
}

// KK-generator fields (index a in 0..kk_dim-1), base components only; the
// vertical part of the lift follows from the Sasaki bookkeeping.
std::vector<double> kk_field(const SpaceModel& space, const CotangentPoint& pt, int a) {
  switch (space.kind()) {
    case SpaceKind::T1:
      return {1.0};
    case SpaceKind::T2:
      return (a % 2 == 0) ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0};
    case SpaceKind::S2: {
      auto fields = g_fields(space, pt);
      return fields[2];  // z-rotation for both factors
    }
    case SpaceKind::SU2Both: {
      std::vector<double> v(3, 0.0);
      v[a % 3] = 1.0;
      return v;
    }
    case SpaceKind::SU2Torus:
      return {0.0, 0.0, 1.0};  // E_3 for both factors
  }
  return {};
}

struct MetricData {
  Eigen::MatrixXd g;
  Eigen::MatrixXd ginv;
};

MetricData base_metric(const SpaceModel& space, const CotangentPoint& pt) {
  MetricData m;
  int n = space.dim();
  m.g = Eigen::MatrixXd::Identity(n, n);
  m.ginv = Eigen::MatrixXd::Identity(n, n);
  if (space.kind() == SpaceKind::S2) {
    if (pt.chart == kChartBundled) {
      double s = std::sin(pt.base.at(0));
      double s2 = std::max(s * s, 1e-300);
      m.g(1, 1) = s * s;
      m.ginv(1, 1) = 1.0 / s2;
    } else {
      auto x = pt.base;
      double n2 = x.at(0) * x.at(0) + x.at(1) * x.at(1);
      double c = 4.0 / ((1.0 + n2) * (1.0 + n2));
      m.g *= c;
      m.ginv *= 1.0 / c;
    }
  }
  return m;
}

// vertical component of a tangent (covariant derivative of the covector part)
std::vector<double> vertical_part(const SpaceModel& space, const CotangentPoint& pt,
                                  const PhaseTangent& t) {
  switch (space.kind()) {
    case SpaceKind::T1:
    case SpaceKind::T2:
      return t.dxi;
    case SpaceKind::S2: {
      if (pt.chart != kChartBundled) {
        // stereographic charts are used for momentum pairings only; treat the
        // covector components as flat there (no Sasaki geometry needed)
        return t.dxi;
      }
      double th = pt.base.at(0);
      double s = std::sin(th), c = std::cos(th);
      double xiT = pt.xi.at(0), xiP = pt.xi.at(1);
      if (xiT == 0.0 && xiP == 0.0) return t.dxi;  // all Christoffel terms carry xi
      double dT = t.dbase.at(0), dP = t.dbase.at(1);
      std::vector<double> vert(2);
      vert[0] = t.dxi.at(0) - (c / s) * xiP * dP;
      vert[1] = t.dxi.at(1) + s * c * xiT * dP - (c / s) * xiP * dT;
      return vert;
    }
    case SpaceKind::SU2Both:
    case SpaceKind::SU2Torus: {
      // bi-invariant connection: vert = dlambda + (1/2) v x lambda
      Vec3 v = lambda3(t.dbase);
      Vec3 lam = lambda3(pt.xi);
      Vec3 cor = cross(v, lam);
      return {t.dxi.at(0) + 0.5 * cor[0], t.dxi.at(1) + 0.5 * cor[1], t.dxi.at(2) + 0.5 * cor[2]};
    }
  }
  return t.dxi;
}

}  // namespace

double sasaki_inner(const SpaceModel& space, const CotangentPoint& pt, const PhaseTangent& a,
                    const PhaseTangent& b) {
  if (space.kind() == SpaceKind::SU2Both || space.kind() == SpaceKind::SU2Torus) {
    Vec3 va = lambda3(a.dbase), vb = lambda3(b.dbase);
    auto va_vert = vertical_part(space, pt, a);
    auto vb_vert = vertical_part(space, pt, b);
    double ip = va[0] * vb[0] + va[1] * vb[1] + va[2] * vb[2];
    for (int i = 0; i < 3; ++i) ip += va_vert[i] * vb_vert[i];
    return ip;
  }
  MetricData m = base_metric(space, pt);
  int n = space.dim();
  Eigen::VectorXd da(n), db(n), wa(n), wb(n);
  auto av = vertical_part(space, pt, a);
  auto bv = vertical_part(space, pt, b);
  for (int i = 0; i < n; ++i) {
    da(i) = a.dbase.at(i);
    db(i) = b.dbase.at(i);
    wa(i) = av.at(i);
    wb(i) = bv.at(i);
  }
  return da.dot(m.g * db) + wa.dot(m.ginv * wb);
}

double momentum_eval(const SpaceModel& space, const CotangentPoint& pt, int a) {
  if (a < 0 || a >= space.kk_dim()) throw DomainError("momentum_eval: generator out of range");
  if ((space.kind() == SpaceKind::SU2Both || space.kind() == SpaceKind::SU2Torus) &&
      pt.chart != kChartLeftTrivialized)
    throw DomainError("momentum_eval: su2 cotangent points must be left-trivialized");
  auto field = kk_field(space, pt, a);
  double s = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) s += pt.xi.at(i) * field[i];
  return s;
}

std::vector<double> momentum_map(const SpaceModel& space, const CotangentPoint& pt) {
  std::vector<double> out(space.kk_dim());
  for (int a = 0; a < space.kk_dim(); ++a) out[a] = momentum_eval(space, pt, a);
  return out;
}

std::vector<double> g_momentum(const SpaceModel& space, const CotangentPoint& pt) {
  auto fields = g_fields(space, pt);
  std::vector<double> v(fields.size(), 0.0);
  for (std::size_t l = 0; l < fields.size(); ++l)
    for (std::size_t i = 0; i < fields[l].size(); ++i) v[l] += pt.xi.at(i) * fields[l][i];
  return v;
}

double fhat(const SpaceModel& space, const CotangentPoint& pt, const FhatOptions& opts,
            int* doublings_used) {
  const int d = space.group_dim();
  std::vector<double> v = g_momentum(space, pt);

  if (opts.jacobian_weighted) {
    // Diagnostic variant with the canonical-coordinate Jacobian and the
    // wrapped distance, truncated to the injectivity ball.
    if (space.kind() != SpaceKind::SU2Both && space.kind() != SpaceKind::SU2Torus)
      throw DomainError("jacobian-weighted fhat: only for su2 spaces");
    const GroupModel& g = space.group();
    const QuadRule& gh = gauss_hermite_cached(opts.nodes);
    const int nn = static_cast<int>(gh.size());
    KahanSum acc;
    for (int i = 0; i < nn; ++i)
      for (int j = 0; j < nn; ++j)
        for (int k = 0; k < nn; ++k) {
          std::vector<double> zeta{2.0 * gh.nodes[i], 2.0 * gh.nodes[j], 2.0 * gh.nodes[k]};
          double r = std::sqrt(zeta[0] * zeta[0] + zeta[1] * zeta[1] + zeta[2] * zeta[2]);
          if (r >= g.injectivity_radius()) continue;
          double phase = v[0] * zeta[0] + v[1] * zeta[1] + v[2] * zeta[2];
          double w = 8.0 * gh.weights[i] * gh.weights[j] * gh.weights[k];
          acc.add(w * std::cos(phase) * g.volume_jacobian(zeta));
        }
    return std::pow(4.0 * kPi, -0.5 * d) * acc.value();
  }

  // Scaling-limit form: the Gaussian factorizes, so each Lie-algebra
  // direction is a 1D transform int e^{i v zeta} e^{-zeta^2/4} dzeta.
  auto transform = [&](double vl, int nodes) {
    const QuadRule& gh = gauss_hermite_cached(nodes);
    KahanSum s;
    for (std::size_t k = 0; k < gh.size(); ++k)
      s.add(2.0 * gh.weights[k] * std::cos(2.0 * vl * gh.nodes[k]));
    return s.value();  // equals int e^{i v z} e^{-z^2/4} dz via z = 2u
  };

  int nodes = opts.nodes;
  int used = 0;
  double value = 0.0;
  for (;;) {
    double prod = 1.0;
    for (int l = 0; l < d; ++l) prod *= transform(v[l], nodes) / (2.0 * std::sqrt(kPi));
    double prod2 = 1.0;
    for (int l = 0; l < d; ++l) prod2 *= transform(v[l], 2 * nodes) / (2.0 * std::sqrt(kPi));
    value = prod2;
    bool converged = std::abs(prod2 - prod) <= std::max(opts.tol * std::abs(prod2), 1e-13);
    if (converged || used >= opts.max_doublings) {
      if (!converged && used >= opts.max_doublings)
        throw NumericError("fhat: zeta quadrature did not converge; widen the rule");
      break;
    }
    nodes *= 2;
    ++used;
  }
  if (doublings_used) *doublings_used = used;
  return value;
}

// --- isotropy ----------------------------------------------------------------

namespace {

CotangentPoint zero_lift(const SpaceModel& space, const SpacePoint& p) {
  CotangentPoint pt;
  pt.p = p;
  switch (space.kind()) {
    case SpaceKind::T1:
      // bundled torus coordinates are wrapped to (-pi, pi], the chart window
      // in which oscillatory amplitudes declare their base support
      pt.chart = kChartBundled;
      pt.base = {wrap_angle(p.v[0])};
      pt.xi = {0.0};
      break;
    case SpaceKind::T2:
      pt.chart = kChartBundled;
      pt.base = {wrap_angle(p.v[0]), wrap_angle(p.v[1])};
      pt.xi = {0.0, 0.0};
      break;
    case SpaceKind::S2: {
      pt.chart = kChartBundled;
      auto sp = s2_spherical_of_point(p);
      pt.base = {sp[0], sp[1]};
      pt.xi = {0.0, 0.0};
      break;
    }
    case SpaceKind::SU2Both:
    case SpaceKind::SU2Torus:
      pt.chart = kChartLeftTrivialized;
      pt.xi = {0.0, 0.0, 0.0};
      break;
  }
  return pt;
}

// Rank of the lifted fundamental-field family at pt under the Sasaki metric.
// Returns (rank, ambiguous) where ambiguous flags singular values inside the
// tolerance band.
std::pair<int, bool> field_rank(const SpaceModel& space, const CotangentPoint& pt,
                                double tol_low, double tol_high) {
  int kk = space.kk_dim();
  std::vector<PhaseTangent> lifts;
  for (int a = 0; a < kk; ++a) {
    PhaseTangent t;
    t.dbase = kk_field(space, pt, a);
    t.dxi.assign(pt.xi.size(), 0.0);  // coordinate transport; vertical part via Sasaki
    lifts.push_back(t);
  }
  Eigen::MatrixXd gram(kk, kk);
  for (int a = 0; a < kk; ++a)
    for (int b = 0; b < kk; ++b) gram(a, b) = sasaki_inner(space, pt, lifts[a], lifts[b]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  int rank = 0;
  bool ambiguous = false;
  for (int i = 0; i < kk; ++i) {
    double sv = std::sqrt(std::max(es.eigenvalues()(i), 0.0));
    if (sv > tol_high)
      ++rank;
    else if (sv > tol_low)
      ambiguous = true;
  }
  return {rank, ambiguous};
}

}  // namespace

CriticalGeometry isotropy_analysis(const SpaceModel& space, std::uint64_t seed, double tol_low,
                                   double tol_high) {
  CriticalGeometry geo;
  geo.space = space.name();
  geo.seed = seed;

  std::mt19937_64 rng(stream_seed(seed, 101));
  std::vector<SpacePoint> pts;
  for (int i = 0; i < 24; ++i) pts.push_back(space.random_point(rng));
  if (space.kind() == SpaceKind::S2) {
    SpacePoint north, south;
    north.v = {0, 0, 1, 0};
    south.v = {0, 0, -1, 0};
    pts.push_back(north);
    pts.push_back(south);
  }

  std::vector<int> ranks;
  for (const auto& p : pts) {
    auto pt = zero_lift(space, p);
    auto [rank, amb] = field_rank(space, pt, tol_low, tol_high);
    if (amb) {
      ++geo.discarded_ambiguous;
      continue;
    }
    ranks.push_back(rank);
  }
  if (ranks.empty()) throw NumericError("isotropy_analysis: all samples ambiguous; refine tolerances");
  int kappa = *std::max_element(ranks.begin(), ranks.end());
  // regular points must agree on the principal rank
  int n_regular = 0;
  for (int r : ranks)
    if (r == kappa) ++n_regular;
  if (n_regular < static_cast<int>(0.5 * ranks.size()))
    throw NumericError("isotropy_analysis: rank instability across samples; finer tolerance needed");
  geo.kappa = kappa;

  std::vector<int> types;
  for (int r : ranks)
    if (std::find(types.begin(), types.end(), r) == types.end()) types.push_back(r);
  geo.distinct_isotropy_types = static_cast<int>(types.size());
  geo.lambda_chain = static_cast<int>(types.size());

  // principal isotropy H: anti-diagonal in the (k1, k) coordinates of the
  // smoothing kernels (k1 k = e), with its normalized rule
  const int nH = 64;
  switch (space.kind()) {
    case SpaceKind::T1:
    case SpaceKind::S2:
    case SpaceKind::SU2Torus: {
      double period = space.k_period();
      for (int i = 0; i < nH; ++i) {
        double a = period * i / nH;
        geo.h_angles.push_back({a, period - a});
        geo.h_weights.push_back(1.0 / nH);
      }
      geo.principal_isotropy = "anti-diagonal circle {(a, -a)}";
      break;
    }
    case SpaceKind::T2: {
      int m = 8;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          geo.h_angles.push_back({kTwoPi * i / m, kTwoPi * j / m});
          geo.h_weights.push_back(1.0 / (m * m));
        }
      geo.principal_isotropy = "anti-diagonal torus {((a1,a2), (-a1,-a2))}";
      break;
    }
    case SpaceKind::SU2Both: {
      HaarRule rule = space.group().haar_rule(12);
      for (std::size_t i = 0; i < rule.size(); ++i) {
        geo.h_pairs.emplace_back(rule.nodes[i], space.group().inverse(rule.nodes[i]));
        geo.h_weights.push_back(rule.weights[i]);
      }
      geo.principal_isotropy = "anti-diagonal SU(2) {(k, k^{-1})}";
      break;
    }
  }

  // consistency: H really fixes regular base points
  SpacePoint probe = space.reference_point();
  if (space.circle_k()) {
    for (std::size_t i = 0; i < std::min<std::size_t>(geo.h_angles.size(), 8); ++i) {
      SpacePoint q = space.kk_act(geo.h_angles[i][0], geo.h_angles[i][1], probe);
      double d2 = 0.0;
      for (int c = 0; c < 4; ++c) d2 += (q.v[c] - probe.v[c]) * (q.v[c] - probe.v[c]);
      if (d2 > 1e-18) throw NumericError("isotropy_analysis: H parametrization does not fix points");
    }
  }
  return geo;
}

// --- Reg Xi sampling -----------------------------------------------------------

namespace {

double parametrization_density(const SpaceModel& space, const CotangentPoint& pt,
                               const std::vector<PhaseTangent>& tangents) {
  int m = static_cast<int>(tangents.size());
  Eigen::MatrixXd gram(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) gram(a, b) = sasaki_inner(space, pt, tangents[a], tangents[b]);
  double det = gram.determinant();
  if (det <= 0) throw NumericError("Reg Xi density: degenerate parametrization Gram");
  return std::sqrt(det);
}

}  // namespace

void sample_regular_zero_level(const SpaceModel& space, CriticalGeometry& geometry, int budget) {
  if (budget < 1000) throw DomainError("sample_regular_zero_level: budget must be >= 1000");
  geometry.budget = budget;
  geometry.samples.clear();
  switch (space.kind()) {
    case SpaceKind::T1: {
      int n = budget;
      for (int i = 0; i < n; ++i) {
        SpacePoint p;
        p.v[0] = kTwoPi * i / n;
        ZeroLevelSample s;
        s.pt = zero_lift(space, p);
        PhaseTangent tx{{1.0}, {0.0}};
        s.weight = (kTwoPi / n) * parametrization_density(space, s.pt, {tx});
        geometry.samples.push_back(s);
      }
      break;
    }
    case SpaceKind::T2: {
      int n = std::max(32, static_cast<int>(std::sqrt(static_cast<double>(budget))));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          SpacePoint p;
          p.v[0] = kTwoPi * i / n;
          p.v[1] = kTwoPi * j / n;
          ZeroLevelSample s;
          s.pt = zero_lift(space, p);
          PhaseTangent t1{{1.0, 0.0}, {0.0, 0.0}}, t2{{0.0, 1.0}, {0.0, 0.0}};
          s.weight = (kTwoPi / n) * (kTwoPi / n) * parametrization_density(space, s.pt, {t1, t2});
          geometry.samples.push_back(s);
        }
      break;
    }
    case SpaceKind::S2: {
      // product rule (Theta: GL, phi: trapezoid, c: GH with e^{+c^2} lift)
      int n_c = 16, n_phi = 8;
      int n_th = std::max(12, budget / (n_c * n_phi));
      auto gl = gauss_legendre(n_th, 0.0, kPi);
      auto tr = periodic_trapezoid(n_phi, kTwoPi);
      auto gh = gauss_hermite(n_c);
      for (int i = 0; i < n_th; ++i) {
        double th = gl.nodes[i];
        if (std::sin(th) < 1e-6) {
          ++geometry.discarded_ambiguous;
          continue;
        }
        for (int j = 0; j < n_phi; ++j)
          for (int k = 0; k < n_c; ++k) {
            double c = gh.nodes[k];
            CotangentPoint pt;
            pt.chart = kChartBundled;
            pt.base = {th, tr.nodes[j]};
            pt.xi = {c, 0.0};  // xi = c dTheta annihilates the rotation field
            pt.p = s2_point_of_spherical(th, tr.nodes[j]);
            ZeroLevelSample s;
            s.pt = pt;
            PhaseTangent tT{{1.0, 0.0}, {0.0, 0.0}};
            PhaseTangent tP{{0.0, 1.0}, {0.0, 0.0}};
            PhaseTangent tC{{0.0, 0.0}, {1.0, 0.0}};
            double dens = parametrization_density(space, pt, {tT, tP, tC});
            s.weight = gl.weights[i] * tr.weights[j] * (gh.weights[k] * std::exp(c * c)) * dens;
            geometry.samples.push_back(s);
          }
      }
      break;
    }
    case SpaceKind::SU2Both: {
      std::mt19937_64 rng(stream_seed(geometry.seed, 202));
      const GroupModel& g = space.group();
      int n = budget;
      for (int i = 0; i < n; ++i) {
        SpacePoint p;
        p.v = g.random_element(rng).data;
        ZeroLevelSample s;
        s.pt = zero_lift(space, p);
        s.weight = space.riemannian_volume() / n;  // zero-section density = 1
        geometry.samples.push_back(s);
      }
      break;
    }
    case SpaceKind::SU2Torus: {
      // MC over the base, stratified |lambda| shells in the annihilator plane
      const GroupModel& g = space.group();
      const int n_shells = 8;
      const double r_max = 4.8;
      int per_shell = std::max(200, budget / n_shells);
      for (int sh = 0; sh < n_shells; ++sh) {
        std::mt19937_64 rng(stream_seed(geometry.seed, 300 + sh));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double r0 = r_max * sh / n_shells, r1 = r_max * (sh + 1) / n_shells;
        double area = kPi * (r1 * r1 - r0 * r0);
        for (int i = 0; i < per_shell; ++i) {
          double r = std::sqrt(r0 * r0 + (r1 * r1 - r0 * r0) * uni(rng));
          double psi = kTwoPi * uni(rng);
          CotangentPoint pt;
          pt.chart = kChartLeftTrivialized;
          pt.p.v = g.random_element(rng).data;
          pt.xi = {r * std::cos(psi), r * std::sin(psi), 0.0};
          ZeroLevelSample s;
          s.pt = pt;
          PhaseTangent b1{{1, 0, 0}, {0, 0, 0}}, b2{{0, 1, 0}, {0, 0, 0}}, b3{{0, 0, 1}, {0, 0, 0}};
          PhaseTangent l1{{0, 0, 0}, {1, 0, 0}}, l2{{0, 0, 0}, {0, 1, 0}};
          double dens = parametrization_density(space, pt, {b1, b2, b3, l1, l2});
          s.weight = (space.riemannian_volume() * area / per_shell) * dens;
          geometry.samples.push_back(s);
        }
      }
      break;
    }
  }

  // momentum must vanish identically on the sample; orbit volumes attach here
  for (auto& s : geometry.samples) {
    auto J = momentum_map(space, s.pt);
    for (double j : J)
      if (std::abs(j) > 1e-10)
        throw NumericError("sample_regular_zero_level: momentum does not vanish on a sample");
    s.orbit_volume = orbit_volume(space, s.pt);
  }
}

double orbit_volume(const SpaceModel& space, const CotangentPoint& pt, int nodes) {
  switch (space.kind()) {
    case SpaceKind::T1: {
      PhaseTangent t{{1.0}, {0.0}};
      return kTwoPi * std::sqrt(sasaki_inner(space, pt, t, t));
    }
    case SpaceKind::T2: {
      PhaseTangent t1{{1.0, 0.0}, {0.0, 0.0}}, t2{{0.0, 1.0}, {0.0, 0.0}};
      return kTwoPi * kTwoPi * parametrization_density(space, pt, {t1, t2});
    }
    case SpaceKind::S2: {
      if (pt.chart != kChartBundled) throw DomainError("orbit_volume: use bundled coords on s2");
      double s = std::sin(pt.base.at(0));
      if (s < 1e-6)
        throw NumericError("orbit_volume: singular stratum (pole of S^2)");
      // lifted rotation orbit: (Theta, phi + s) with coordinate-constant xi
      PhaseTangent t{{0.0, 1.0}, {0.0, 0.0}};
      (void)nodes;
      return kTwoPi * std::sqrt(sasaki_inner(space, pt, t, t));
    }
    case SpaceKind::SU2Both: {
      // orbit ~ G via h -> (p h, Ad*(h) lambda); Gram is h-independent
      std::vector<PhaseTangent> ts;
      Vec3 lam = lambda3(pt.xi);
      for (int i = 0; i < 3; ++i) {
        Vec3 e{0, 0, 0};
        e[i] = 1.0;
        Vec3 ldot = cross(lam, e);  // d/ds Ad*(e^{sE_i}) lambda = -E_i x lambda
        PhaseTangent t;
        t.dbase = {e[0], e[1], e[2]};
        t.dxi = {ldot[0], ldot[1], ldot[2]};
        ts.push_back(t);
      }
      double dens = parametrization_density(space, pt, ts);
      return space.riemannian_volume() * dens;
    }
    case SpaceKind::SU2Torus: {
      Vec3 lam = lambda3(pt.xi);
      Vec3 e3{0, 0, 1};
      Vec3 ldot = cross(lam, e3);
      PhaseTangent t{{0, 0, 1}, {ldot[0], ldot[1], ldot[2]}};
      return 2.0 * kTwoPi * std::sqrt(sasaki_inner(space, pt, t, t));
    }
  }
  return 0.0;
}

void gaussian_volume(const SpaceModel& space, CriticalGeometry& geometry, const FhatOptions& opts,
                     double alpha_scale) {
  if (geometry.samples.empty())
    throw DomainError("gaussian_volume: geometry has no Reg Xi samples");
  const std::size_t n = geometry.samples.size();
  std::vector<double> contrib(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = geometry.samples[i];
    double fh = fhat(space, s.pt, opts);
    double alpha = 0.0;
    for (int c = 0; c < space.num_charts(); ++c) alpha += alpha_scale * space.partition(c, s.pt.p);
    contrib[i] = s.weight * fh * alpha / s.orbit_volume;
  }
  KahanSum total;
  for (double c : contrib) total.add(c);
  geometry.vol_estimate = total.value();

  // error bar: half-sample comparison (quadrature kinds) or MC variance
  bool monte_carlo =
      space.kind() == SpaceKind::SU2Both || space.kind() == SpaceKind::SU2Torus;
  if (!monte_carlo) {
    KahanSum half;
    for (std::size_t i = 0; i < n; i += 2) half.add(contrib[i] * 2.0);
    geometry.vol_error =
        std::abs(half.value() - total.value()) + 1e-13 * std::abs(total.value());
  } else {
    // contributions carry weight C/n_stratum; the sample variance of n*contrib
    // over each seeded stream bounds the error
    double mean = total.value() / n;
    double var = 0.0;
    for (double c : contrib) var += (c - mean) * (c - mean);
    var /= std::max<std::size_t>(n - 1, 1);
    geometry.vol_error = std::sqrt(var * n) + 1e-13 * std::abs(total.value());
  }
}

CriticalGeometry analyze_geometry(const SpaceModel& space, int budget, std::uint64_t seed,
                                  const FhatOptions& opts) {
  CriticalGeometry geo = isotropy_analysis(space, seed);
  sample_regular_zero_level(space, geo, budget);
  gaussian_volume(space, geo, opts);
  return geo;
}

double reg_xi_integral(const SpaceModel& space, const CriticalGeometry& geometry,
                       const std::function<double(const CotangentPoint&)>& u) {
  (void)space;
  KahanSum acc;
  for (const auto& s : geometry.samples) acc.add(s.weight * u(s.pt) / s.orbit_volume);
  return acc.value();
}

complexd h_average(const SpaceModel& space, const CriticalGeometry& geometry,
                   const std::function<complexd(double, double)>& v) {
  if (!space.circle_k()) throw DomainError("h_average: circle-K spaces only");
  complexd acc = 0.0;
  for (std::size_t i = 0; i < geometry.h_angles.size(); ++i)
    acc += geometry.h_weights[i] * v(geometry.h_angles[i][0], geometry.h_angles[i][1]);
  return acc;
}

double h_multiplicity(const SpaceModel& space, const CriticalGeometry& geometry,
                      const SigmaLabel& sigma) {
  complexd acc = 0.0;
  switch (space.kind()) {
    case SpaceKind::T1:
    case SpaceKind::S2:
    case SpaceKind::SU2Torus: {
      for (std::size_t i = 0; i < geometry.h_angles.size(); ++i)
        acc += geometry.h_weights[i] *
               std::conj(space.k_character(sigma, geometry.h_angles[i][0])) *
               std::conj(space.k_character(sigma, geometry.h_angles[i][1]));
      break;
    }
    case SpaceKind::T2: {
      for (std::size_t i = 0; i < geometry.h_angles.size(); ++i) {
        double a1 = geometry.h_angles[i][0], a2 = geometry.h_angles[i][1];
        complexd chi1 = std::polar(1.0, sigma.v.at(0) * a1 + sigma.v.at(1) * a2);
        complexd chi2 = std::polar(1.0, -(sigma.v.at(0) * a1 + sigma.v.at(1) * a2));
        acc += geometry.h_weights[i] * std::conj(chi1) * std::conj(chi2);
      }
      break;
    }
    case SpaceKind::SU2Both: {
      const GroupModel& g = space.group();
      IrrepInfo rho{{sigma.v.at(0)}, sigma.v.at(0) + 1,
                    0.25 * sigma.v.at(0) * (sigma.v.at(0) + 2.0)};
      for (std::size_t i = 0; i < geometry.h_pairs.size(); ++i)
        acc += geometry.h_weights[i] *
               std::conj(g.character(rho, geometry.h_pairs[i].first)) *
               std::conj(g.character(rho, geometry.h_pairs[i].second));
      break;
    }
  }
  return acc.real();
}

double h_bundle_trace_factor(const SpaceModel& space, const CriticalGeometry& geometry,
                             const SigmaLabel& sigma) {
  // In the coordinates of the bundle kernel p_t(k^{-1} g k1) pi(k k1^{-1}),
  // the critical pairing is diagonal (k1 = k), so the factor averages
  // tr pi_sigma(e) = dim sigma over H.
  complexd acc = 0.0;
  if (space.kind() == SpaceKind::SU2Torus || space.circle_k()) {
    for (std::size_t i = 0; i < geometry.h_angles.size(); ++i) {
      double a = geometry.h_angles[i][0];
      acc += geometry.h_weights[i] * std::polar(1.0, sigma.v.at(0) * (a - a));
    }
    return acc.real();
  }
  throw DomainError("h_bundle_trace_factor: bundled for circle-K spaces");
}

}  // namespace equiheat
