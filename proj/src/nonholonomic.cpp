#include "myller/nonholonomic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "myller/dual.hpp"

namespace myller::nh {

namespace {

using D1 = Dual<double>;

double fd_h(const DistributionField& D, const Vec3& p) { return D.fd_step * std::max(1.0, norm(p)); }

Vec3 unit_normal(const DistributionField& D, const Vec3& p) {
  const Vec3 V = D.pfaff(p);
  const double n = norm(V);
  if (!(n >= 1e-10)) throw DegenerateFrame("the Pfaff form vanishes at the point");
  return V / n;
}

Vec3 i1_from(const Vec3& axis, const Vec3& I3) {
  const double c = dot(axis, I3);
  if (std::abs(c) > 1 - 1e-6) throw GaugeDegenerate("reference axis is nearly normal to the distribution");
  return normalized(axis - I3 * c);
}

// dI3 along w, without any gauge.
Vec3 normal_derivative(const DistributionField& D, const Vec3& p, const Vec3& w) {
  if (D.mode == DerivativeMode::finite_difference) {
    const double h = fd_h(D, p);
    return (unit_normal(D, p + w * h) - unit_normal(D, p - w * h)) / (2 * h);
  }
  const Vec3 V = D.pfaff(p);
  const double n = norm(V);
  if (!(n >= 1e-10)) throw DegenerateFrame("the Pfaff form vanishes at the point");
  const Vec3 I3 = V / n, Jw = D.pfaff.derivative(p, w);
  return (Jw - I3 * dot(I3, Jw)) / n;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::string num(double x) {
  char b[40];
  std::snprintf(b, sizeof b, "(%.17g)", x);
  return b;
}

// Solutions of A c^2 + B c s + C s^2 = 0 (c = cos t, s = sin t), t in [0, pi).
DirectionPair solve_quadratic(double A, double B, double C, double tol = 1e-9) {
  DirectionPair out;
  const double disc = B * B - 4 * A * C;
  const double R = 0.5 * std::hypot(A - C, B), m = 0.5 * (A + C);
  if (R <= tol && std::abs(m) <= tol) {
    // The form vanishes identically: zero discriminant, every direction is a root.
    out.kind = RootKind::coincident;
    return out;
  }
  if (disc < -tol) {
    out.kind = RootKind::imaginary;
    return out;
  }
  auto wrap = [](double t) {
    t = std::fmod(t, pi);
    return t < 0 ? t + pi : t;
  };
  const double phi0 = std::atan2(B, A - C);
  const double x = std::clamp(-m / R, -1.0, 1.0);
  const double d = std::acos(x);
  if (std::abs(disc) <= tol) {
    out.kind = RootKind::coincident;
    out.angles = {wrap(0.5 * phi0)};
    if (std::abs(x) < 1) out.angles = {wrap(0.5 * (phi0 + d))};
    return out;
  }
  out.kind = RootKind::real;
  out.angles = {wrap(0.5 * (phi0 + d)), wrap(0.5 * (phi0 - d))};
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

IndicatrixPoints conic_points(const std::vector<double>& angles, const std::vector<double>& values, double k1,
                              double k2) {
  IndicatrixPoints out;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double v = values[i];
    if (std::abs(v) <= 1e-12) {
      out.skipped.push_back(angles[i]);
      continue;
    }
    const double rho = 1 / std::sqrt(std::abs(v));
    const double x = rho * std::cos(angles[i]), y = rho * std::sin(angles[i]);
    out.angle.push_back(angles[i]);
    out.x.push_back(x);
    out.y.push_back(y);
    out.max_conic_residual = std::max(out.max_conic_residual, std::abs(std::abs(x * x * k1 + y * y * k2) - 1));
  }
  return out;
}

}  // namespace

PfaffForm PfaffForm::expressions(const std::string& X, const std::string& Y, const std::string& Z) {
  const std::vector<std::string> xyz{"x", "y", "z"};
  return {expr::ScalarFunction::expression(X, xyz), expr::ScalarFunction::expression(Y, xyz),
          expr::ScalarFunction::expression(Z, xyz)};
}

Vec3 PfaffForm::operator()(const Vec3& p) const {
  const std::vector<double> b{p.x, p.y, p.z};
  return {X.eval(b), Y.eval(b), Z.eval(b)};
}

Vec3 PfaffForm::derivative(const Vec3& p, const Vec3& w) const {
  const D1 a[3] = {{p.x, w.x}, {p.y, w.y}, {p.z, w.z}};
  return {X.eval_as(a).d, Y.eval_as(a).d, Z.eval_as(a).d};
}

Vec3 resolve_axis(const DistributionField& D, const Vec3& p) {
  const Vec3 I3 = unit_normal(D, p);
  if (D.axis) {
    const Vec3 a = normalized(*D.axis);
    i1_from(a, I3);
    return a;
  }
  for (const Vec3& a : {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}})
    if (std::abs(dot(a, I3)) <= 1 - 1e-6) return a;
  throw GaugeDegenerate("no default axis is admissible");
}

PointFrame::PointFrame(const DistributionField& D, const Vec3& p, const Vec3& axis) : D_(&D), axis_(axis) {
  const Vec3 V = D.pfaff(p);
  vnorm_ = norm(V);
  if (!(vnorm_ >= 1e-10)) throw DegenerateFrame("the Pfaff form vanishes at the point");
  f_.origin = p;
  f_.e3 = V / vnorm_;
  const double c = dot(axis, f_.e3);
  if (std::abs(c) > 1 - 1e-6) throw GaugeDegenerate("reference axis is nearly normal to the distribution");
  const Vec3 w = axis - f_.e3 * c;
  wnorm_ = norm(w);
  f_.e1 = w / wnorm_;
  f_.e2 = cross(f_.e3, f_.e1);
}

Vec3 PointFrame::dI3(const Vec3& w) const { return normal_derivative(*D_, f_.origin, w); }

Vec3 PointFrame::dI1(const Vec3& w) const {
  if (D_->mode == DerivativeMode::finite_difference) {
    const double h = fd_h(*D_, f_.origin);
    const Vec3 a = i1_from(axis_, unit_normal(*D_, f_.origin + w * h));
    const Vec3 b = i1_from(axis_, unit_normal(*D_, f_.origin - w * h));
    return (a - b) / (2 * h);
  }
  const Vec3 d3 = dI3(w);
  const Vec3 dw = -(f_.e3 * dot(axis_, d3) + d3 * dot(axis_, f_.e3));
  return (dw - f_.e1 * dot(f_.e1, dw)) / wnorm_;
}

Frame adapted_frame(const DistributionField& D, const Vec3& p) { return PointFrame(D, p, resolve_axis(D, p)).frame(); }

RotationCoefficients coefficients(const PointFrame& pf) {
  const Frame& f = pf.frame();
  const Vec3 a = pf.dI3(f.e1), b = pf.dI3(f.e2);
  RotationCoefficients rc;
  rc.q1 = dot(a, f.e1);
  rc.p1 = -dot(a, f.e2);
  rc.q2 = dot(b, f.e1);
  rc.p2 = -dot(b, f.e2);
  rc.r1 = dot(pf.dI1(f.e1), f.e2);
  rc.r2 = dot(pf.dI1(f.e2), f.e2);
  return rc;
}

RotationCoefficients rotation_coefficients(const DistributionField& D, const Vec3& p) {
  return coefficients(PointFrame(D, p, resolve_axis(D, p)));
}

RotationCoefficients rotate(const RotationCoefficients& rc, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  auto P = [&](double w1, double w2) { return rc.p1 * w1 + rc.p2 * w2; };
  auto Q = [&](double w1, double w2) { return rc.q1 * w1 + rc.q2 * w2; };
  auto R = [&](double w1, double w2) { return rc.r1 * w1 + rc.r2 * w2; };
  RotationCoefficients o;
  o.p1 = s * Q(c, s) + c * P(c, s);
  o.p2 = s * Q(-s, c) + c * P(-s, c);
  o.q1 = c * Q(c, s) - s * P(c, s);
  o.q2 = c * Q(-s, c) - s * P(-s, c);
  o.r1 = R(c, s);
  o.r2 = R(-s, c);
  return o;
}

RotationCoefficients reflect(const RotationCoefficients& rc) {
  // I2 -> -I2: dI1 picks up a sign on its I2 component, and I2-directional quantities flip.
  return {-rc.p1, rc.p2, rc.q1, -rc.q2, -rc.r1, rc.r2};
}

NhInvariants invariants_of(const RotationCoefficients& rc) {
  NhInvariants n;
  n.Tm = rc.p1 + rc.q2;
  n.H = rc.p2 - rc.q1;
  n.Kt = rc.p1 * rc.q2 - rc.p2 * rc.q1;
  n.Kg = n.Kt - n.Tm * n.Tm / 4;
  n.Tt = n.Kt - n.H * n.H / 4;
  return n;
}

NhInvariants scalar_invariants(const DistributionField& D, const Vec3& p) {
  return invariants_of(rotation_coefficients(D, p));
}

Integrability integrability(const DistributionField& D, const std::vector<Vec3>& points, double tol) {
  Integrability out;
  for (const Vec3& p : points) out.Tm.push_back(scalar_invariants(D, p).Tm);
  out.integrable = max_abs(out.Tm) <= tol;
  return out;
}

Forms forms_of(const RotationCoefficients& rc, double w1, double w2) {
  if (w1 == 0 && w2 == 0) throw InvalidArgument("zero direction");
  Forms f;
  f.phi = w1 * w1 + w2 * w2;
  f.psi = rc.p2 * w2 * w2 + (rc.p1 - rc.q2) * w1 * w2 - rc.q1 * w1 * w1;
  f.chi = rc.p1 * w1 * w1 + (rc.p2 + rc.q1) * w1 * w2 + rc.q2 * w2 * w2;
  const double p = rc.p1 * w1 + rc.p2 * w2, q = rc.q1 * w1 + rc.q2 * w2;
  f.theta = p * p + q * q;
  f.kappa_n = f.psi / f.phi;
  f.tau_g = f.chi / f.phi;
  const NhInvariants n = invariants_of(rc);
  f.theta_residual = f.theta - (n.H * f.psi - n.Kt * f.phi + n.Tm * f.chi);
  return f;
}

Forms forms_at(const DistributionField& D, const Vec3& p, double w1, double w2) {
  return forms_of(rotation_coefficients(D, p), w1, w2);
}

double K_pair(const RotationCoefficients& rc, double beta, double alpha) {
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  return (rc.p1 * ca + rc.p2 * sa) * std::sin(beta) - (rc.q1 * ca + rc.q2 * sa) * std::cos(beta);
}

double T_pair(const RotationCoefficients& rc, double beta, double alpha) {
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  return (rc.p1 * ca + rc.p2 * sa) * std::cos(beta) + (rc.q1 * ca + rc.q2 * sa) * std::sin(beta);
}

DirectionFields directions_of(const RotationCoefficients& rc) {
  DirectionFields out;
  const double A = rc.p1 - rc.q2, B = rc.p2 + rc.q1;
  out.asymptotic = solve_quadratic(-rc.q1, A, rc.p2);
  out.curvature = solve_quadratic(rc.p1, B, rc.q2);
  out.planar = std::abs(A) <= 1e-9 && std::abs(rc.p2) <= 1e-9 && std::abs(rc.q1) <= 1e-9;
  auto wrap = [](double t) {
    t = std::fmod(t, pi);
    return t < 0 ? t + pi : t;
  };
  if (std::hypot(A, B) <= 1e-9) {
    out.umbilic = out.torsion_degenerate = true;
    out.principal.kind = out.extremal_torsion.kind = RootKind::indeterminate;
    return out;
  }
  // Principal: A cos 2t + B sin 2t = 0. Extremal torsion: B cos 2t - A sin 2t = 0.
  const double tp = wrap(0.5 * std::atan2(-A, B)), tt = wrap(0.5 * std::atan2(B, A));
  out.principal = {RootKind::real, {tp, wrap(tp + pi / 2)}};
  out.extremal_torsion = {RootKind::real, {tt, wrap(tt + pi / 2)}};
  std::sort(out.principal.angles.begin(), out.principal.angles.end());
  std::sort(out.extremal_torsion.angles.begin(), out.extremal_torsion.angles.end());
  return out;
}

DirectionFields direction_fields(const DistributionField& D, const Vec3& p) {
  return directions_of(rotation_coefficients(D, p));
}

ExtremalValues extremal_of(const RotationCoefficients& rc) {
  const NhInvariants n = invariants_of(rc);
  const double R = 0.5 * std::hypot(rc.p1 - rc.q2, rc.p2 + rc.q1);
  ExtremalValues e;
  e.invR1 = n.H / 2 + R;
  e.invR2 = n.H / 2 - R;
  e.invT1 = n.Tm / 2 + R;
  e.invT2 = n.Tm / 2 - R;
  e.identity_residual = std::max({std::abs(e.invR1 + e.invR2 - n.H), std::abs(e.invR1 * e.invR2 - n.Kg),
                                  std::abs(e.invT1 + e.invT2 - n.Tm), std::abs(e.invT1 * e.invT2 - n.Tt)});
  return e;
}

ExtremalValues extremal_values(const DistributionField& D, const Vec3& p) {
  return extremal_of(rotation_coefficients(D, p));
}

EulerBonnet euler_bonnet_nh(const DistributionField& D, const Vec3& p, const std::vector<double>& angles,
                            bool require_alignment) {
  const RotationCoefficients rc = rotation_coefficients(D, p);
  EulerBonnet out;
  out.ext = extremal_of(rc);
  const double A = rc.p1 - rc.q2, B = rc.p2 + rc.q1;
  const bool degenerate = std::hypot(A, B) <= 1e-9;
  out.umbilic = out.torsion_degenerate = degenerate;
  if (degenerate && require_alignment)
    throw IndeterminateDirections("principal and extremal-torsion directions are undetermined at the point");
  RotationCoefficients rp = rc, rt = rc;
  if (!degenerate) {
    // kappa_n peaks where (cos 2t, sin 2t) is along (-B, A); tau_g where it is along (A, B).
    out.principal_angle = 0.5 * std::atan2(A, -B);
    out.torsion_angle = 0.5 * std::atan2(B, A);
    rp = rotate(rc, *out.principal_angle);
    rt = rotate(rc, *out.torsion_angle);
    out.principal_alignment_residual = std::abs(rp.p1 - rp.q2);
    out.torsion_alignment_residual = std::abs(rt.p2 + rt.q1);
  }
  out.angles = angles;
  for (double a : angles) {
    out.kappa_n.push_back(forms_of(rp, std::cos(a), std::sin(a)).kappa_n);
    out.tau_g.push_back(forms_of(rt, std::cos(a), std::sin(a)).tau_g);
  }
  out.dupin = conic_points(angles, out.kappa_n, out.ext.invR1, out.ext.invR2);
  out.bonnet = conic_points(angles, out.tau_g, out.ext.invT1, out.ext.invT2);
  return out;
}

CurvatureTorsionCircle curvature_torsion_circle(const DistributionField& D, const Vec3& p,
                                                const std::vector<double>& angles) {
  const RotationCoefficients rc = rotation_coefficients(D, p);
  const NhInvariants n = invariants_of(rc);
  CurvatureTorsionCircle c;
  c.center_kn = n.H / 2;
  c.center_tg = n.Tm / 2;
  c.radius_sq = (n.H * n.H + n.Tm * n.Tm) / 4 - n.Kt;
  c.imaginary = c.radius_sq < -1e-12;
  for (double a : angles) {
    const Forms f = forms_of(rc, std::cos(a), std::sin(a));
    const double r = std::pow(f.kappa_n - c.center_kn, 2) + std::pow(f.tau_g - c.center_tg, 2) - c.radius_sq;
    c.max_residual = std::max(c.max_residual, std::abs(r));
  }
  return c;
}

CurveFrames curve_frames(const DistributionField& D, const VectorFunction& curve, const Grid& grid,
                         double tangency_tol) {
  const auto cj = vector_jets(curve, grid);
  require_arclength(cj);
  CurveFrames out;
  out.grid = grid;
  out.axis = resolve_axis(D, cj.front().v);
  std::vector<double> raw;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3 r = cj[i].v, t = normalized(cj[i].d1);
    const PointFrame pf(D, r, out.axis);
    const Frame& f = pf.frame();
    const double tg = dot(f.e3, t);
    if (std::abs(tg) > tangency_tol) throw NotTangentToDistribution("omega(alpha) = " + std::to_string(tg), i);
    out.r.push_back(r);
    out.t.push_back(t);
    out.frames.push_back(f);
    out.coeffs.push_back(coefficients(pf));
    out.tangency.push_back(tg);
    out.dI3.push_back(pf.dI3(t));
    out.dI1.push_back(pf.dI1(t));
    raw.push_back(std::atan2(dot(t, f.e2), dot(t, f.e1)));
  }
  out.alpha = unwrap_angle(raw);
  return out;
}

FieldGKT field_gkt(const DistributionField& D, const VectorFunction& curve, const Grid& grid,
                   const expr::ScalarFunction& beta) {
  const CurveFrames cf = curve_frames(D, curve, grid);
  const auto bj = scalar_jets(beta, grid);
  FieldGKT out;
  out.alpha = cf.alpha;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const RotationCoefficients& rc = cf.coeffs[i];
    const double a = cf.alpha[i], b = bj[i].v, db = bj[i].d1;
    const double G = db + rc.r1 * std::cos(a) + rc.r2 * std::sin(a);
    const double K = K_pair(rc, b, a), T = T_pair(rc, b, a);
    out.beta.push_back(b);
    out.G.push_back(G);
    out.K.push_back(K);
    out.T.push_back(T);
    // Direct frame route: xi = cos b I1 + sin b I2 differentiated along the curve.
    const Frame& f = cf.frames[i];
    const Vec3 xi = f.e1 * std::cos(b) + f.e2 * std::sin(b);
    const Vec3 dI2 = cross(cf.dI3[i], f.e1) + cross(f.e3, cf.dI1[i]);
    const Vec3 dxi = (f.e2 * std::cos(b) - f.e1 * std::sin(b)) * db + cf.dI1[i] * std::cos(b) + dI2 * std::sin(b);
    out.crosscheck = std::max({out.crosscheck, std::abs(G - triple(xi, dxi, f.e3)),
                               std::abs(K - dot(dxi, f.e3)), std::abs(T - triple(xi, f.e3, cf.dI3[i]))});
  }
  return out;
}

NhTransport transport_nh(const DistributionField& D, const VectorFunction& curve, const Grid& grid, double V1,
                         double V2) {
  const CurveFrames cf = curve_frames(D, curve, grid);
  const std::size_t n = grid.size();
  auto rate = [](const RotationCoefficients& rc, const Vec3& t, const Frame& f) {
    return rc.r1 * dot(t, f.e1) + rc.r2 * dot(t, f.e2);
  };
  std::vector<double> node(n);
  for (std::size_t i = 0; i < n; ++i) node[i] = rate(cf.coeffs[i], cf.t[i], cf.frames[i]);
  const bool exact = curve.expression_backed();
  NhTransport out;
  std::array<double, 2> y{V1, V2};
  for (std::size_t i = 0; i < n; ++i) {
    out.V1.push_back(y[0]);
    out.V2.push_back(y[1]);
    out.spatial.push_back(cf.frames[i].e1 * y[0] + cf.frames[i].e2 * y[1]);
    if (i + 1 == n) break;
    const double s0 = grid[i], h = grid[i + 1] - grid[i];
    double mid;
    if (exact) {
      const VecJet j = vector_jet(curve, s0 + h / 2);
      const PointFrame pf(D, j.v, cf.axis);
      mid = rate(coefficients(pf), normalized(j.d1), pf.frame());
    } else {
      mid = 0.5 * (node[i] + node[i + 1]);
    }
    auto rhs = [&](double s, const std::array<double, 2>& V) {
      const double r = s == s0 ? node[i] : (s == s0 + h ? node[i + 1] : mid);
      return std::array<double, 2>{r * V[1], -r * V[0]};
    };
    y = rk4_step<2>(rhs, s0, y, h);
  }
  return out;
}

std::vector<double> concurrence_residual(const DistributionField& D, const VectorFunction& curve, const Grid& grid,
                                         const expr::ScalarFunction& beta) {
  const FieldGKT g = field_gkt(D, curve, grid, beta);
  const std::size_t n = grid.size();
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(g.G[i]) < 1e-8) throw VanishingG("geodesic curvature G vanishes", i);
    f[i] = std::sin(g.alpha[i] - g.beta[i]) / g.G[i];
  }
  const auto df = differentiate_samples(f, grid);
  std::vector<double> res(n);
  for (std::size_t i = 0; i < n; ++i) res[i] = df[i] - std::cos(g.alpha[i] - g.beta[i]);
  return res;
}

GeodesicTrace geodesic_trace(const DistributionField& D, const Vec3& start, const Vec3& direction, double length,
                             std::size_t n) {
  if (!(length > 0)) throw InvalidArgument("geodesic length must be positive");
  const Grid g = Grid::uniform(0, length, n);
  const double h = g.step();
  Vec3 I3 = unit_normal(D, start);
  Vec3 t = direction - I3 * dot(direction, I3);
  if (norm(t) < 1e-12) throw InvalidArgument("start direction is normal to the distribution");
  if (std::abs(dot(normalized(direction), I3)) > 1e-6)
    throw NotTangentToDistribution("start direction leaves the plane", 0);
  t = normalized(t);
  Vec3 r = start;

  using State = std::array<double, 6>;
  auto rhs = [&](double, const State& y) {
    const Vec3 p{y[0], y[1], y[2]}, tt{y[3], y[4], y[5]};
    const Vec3 n3 = unit_normal(D, p);
    const Vec3 dt = n3 * -dot(tt, normal_derivative(D, p, tt));
    return State{tt.x, tt.y, tt.z, dt.x, dt.y, dt.z};
  };
  GeodesicTrace out;
  out.grid = g;
  for (std::size_t i = 0; i < n; ++i) {
    out.r.push_back(r);
    out.t.push_back(t);
    if (i + 1 == n) break;
    const State y = rk4_step<6>(rhs, g[i], State{r.x, r.y, r.z, t.x, t.y, t.z}, h);
    r = {y[0], y[1], y[2]};
    t = {y[3], y[4], y[5]};
    I3 = unit_normal(D, r);
    out.max_tangency = std::max(out.max_tangency, std::abs(dot(normalized(t), I3)));
    t = normalized(t - I3 * dot(t, I3));
  }
  const auto dt = differentiate_samples(out.t, g);
  // Gauge slides along the trace: the previous I1 is re-projected onto the current plane.
  Vec3 e1 = i1_from(resolve_axis(D, start), unit_normal(D, start));
  std::vector<double> raw;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 n3 = unit_normal(D, out.r[i]);
    out.kappa_g.push_back(triple(out.t[i], dt[i], n3));
    out.tau_g.push_back(triple(out.t[i], n3, normal_derivative(D, out.r[i], out.t[i])));
    e1 = i1_from(e1, n3);
    raw.push_back(std::atan2(dot(out.t[i], cross(n3, e1)), dot(out.t[i], e1)));
  }
  out.alpha = unwrap_angle(raw);
  out.max_kappa_g = max_abs(out.kappa_g);
  return out;
}

PfaffForm moisil_plane(double p0, double q0, double r0, double a, double b, double c) {
  if (std::abs(a * p0 + b * q0 + c * r0) <= 1e-12)
    throw NonholonomyViolated("a p0 + b q0 + c r0 = 0, the plane field is integrable");
  // (a, b, c) + (p0, q0, r0) x r
  return PfaffForm::expressions(num(a) + " + " + num(q0) + "*z - " + num(r0) + "*y",
                                num(b) + " + " + num(r0) + "*x - " + num(p0) + "*z",
                                num(c) + " + " + num(p0) + "*y - " + num(q0) + "*x");
}

PfaffForm moisil_sphere(double mu, double p0, double q0, double r0, double a, double b, double c, double h, double k,
                        double l) {
  // At the origin omega ^ d omega reduces to 2 (h p0 + k q0 + l r0).
  if (std::abs(h * p0 + k * q0 + l * r0) <= 1e-12)
    throw NonholonomyViolated("omega ^ d omega vanishes at the origin");
  // 2 r <a, r> - a |r|^2 + mu r + (p0, q0, r0) x r + (h, k, l)
  const std::string ar = "(" + num(a) + "*x + " + num(b) + "*y + " + num(c) + "*z)";
  const std::string r2 = "(x^2 + y^2 + z^2)";
  return PfaffForm::expressions(
      "2*x*" + ar + " - " + num(a) + "*" + r2 + " + " + num(mu) + "*x + " + num(q0) + "*z - " + num(r0) + "*y + " +
          num(h),
      "2*y*" + ar + " - " + num(b) + "*" + r2 + " + " + num(mu) + "*y + " + num(r0) + "*x - " + num(p0) + "*z + " +
          num(k),
      "2*z*" + ar + " - " + num(c) + "*" + r2 + " + " + num(mu) + "*z + " + num(p0) + "*y - " + num(q0) + "*x + " +
          num(l));
}

SpecialClass classify_special(const DistributionField& D, const std::vector<Vec3>& probes) {
  if (probes.empty()) throw InvalidArgument("empty probe set");
  SpecialClass c;
  c.min_abs_Tm = INFINITY;
  for (const Vec3& p : probes) {
    const RotationCoefficients rc = rotation_coefficients(D, p);
    const NhInvariants n = invariants_of(rc);
    c.max_p2 = std::max(c.max_p2, std::abs(rc.p2));
    c.max_q1 = std::max(c.max_q1, std::abs(rc.q1));
    c.max_p1_minus_q2 = std::max(c.max_p1_minus_q2, std::abs(rc.p1 - rc.q2));
    c.max_p2_plus_q1 = std::max(c.max_p2_plus_q1, std::abs(rc.p2 + rc.q1));
    c.min_abs_Tm = std::min(c.min_abs_Tm, std::abs(n.Tm));
    c.sphere_kg_residual = std::max(c.sphere_kg_residual, std::abs(n.Kg - n.H * n.H / 4));
    c.sphere_tt_residual = std::max(c.sphere_tt_residual, std::abs(n.Tt - n.Tm * n.Tm / 4));
    c.plane_kg = std::max(c.plane_kg, std::abs(n.Kg));
    c.plane_h = std::max(c.plane_h, std::abs(n.H));
  }
  const bool nonholonomic = c.min_abs_Tm >= 1e-3;
  c.is_nh_plane = nonholonomic && c.max_p2 <= 1e-6 && c.max_q1 <= 1e-6 && c.max_p1_minus_q2 <= 1e-6;
  c.is_nh_sphere = nonholonomic && c.max_p1_minus_q2 <= 1e-6 && c.max_p2_plus_q1 <= 1e-6;
  return c;
}

std::vector<Vec3> probe_lattice(const Vec3& lo, const Vec3& hi, std::size_t n) {
  if (n < 1) throw InvalidArgument("empty probe lattice");
  std::vector<Vec3> out;
  auto at = [&](double a, double b, std::size_t i) { return n == 1 ? 0.5 * (a + b) : a + (b - a) * i / (n - 1); };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) out.push_back({at(lo.x, hi.x, i), at(lo.y, hi.y, j), at(lo.z, hi.z, k)});
  return out;
}

}  // namespace myller::nh
