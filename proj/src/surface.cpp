#include "myller/surface.hpp"

#include <algorithm>
#include <cmath>

#include "myller/curves.hpp"
#include "myller/dual.hpp"

namespace myller::surface {

namespace {

using D1 = Dual<double>;
using D2 = Dual<Dual<double>>;

template <class T>
std::array<T, 3> eval_r(const SurfacePatch& S, const T& u, const T& v) {
  const T args[2] = {u, v};
  return {S.x.eval_as(args), S.y.eval_as(args), S.z.eval_as(args)};
}

// Second-order jet along the seed pair (a, b): value, d/da, d/db, d2/da db.
struct Second {
  Vec3 r, da, db, dab;
};

Second second(const SurfacePatch& S, double u, double v, int a, int b) {
  D2 U, V;
  U.v.v = u;
  V.v.v = v;
  (a == 0 ? U : V).v.d = 1;
  (b == 0 ? U : V).d.v = 1;
  const auto y = eval_r(S, U, V);
  return {{y[0].v.v, y[1].v.v, y[2].v.v},
          {y[0].v.d, y[1].v.d, y[2].v.d},
          {y[0].d.v, y[1].d.v, y[2].d.v},
          {y[0].d.d, y[1].d.d, y[2].d.d}};
}

// Unit normal as a generic function of (u, v); first derivatives by an inner dual.
template <class T>
std::array<T, 3> nu_generic(const SurfacePatch& S, const T& u, const T& v) {
  using std::sqrt;
  using DT = Dual<T>;
  const auto a = eval_r(S, DT{u, T(1.0)}, DT{v, T(0.0)});
  const auto b = eval_r(S, DT{u, T(0.0)}, DT{v, T(1.0)});
  const std::array<T, 3> ru{a[0].d, a[1].d, a[2].d}, rv{b[0].d, b[1].d, b[2].d};
  std::array<T, 3> n{ru[1] * rv[2] - ru[2] * rv[1], ru[2] * rv[0] - ru[0] * rv[2], ru[0] * rv[1] - ru[1] * rv[0]};
  const T len = sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  for (auto& c : n) c = c / len;
  return n;
}

Vec3 nu_derivative(const SurfacePatch& S, double u, double v, int which) {
  const D1 U{u, which == 0 ? 1.0 : 0.0}, V{v, which == 1 ? 1.0 : 0.0};
  const auto n = nu_generic(S, U, V);
  return {n[0].d, n[1].d, n[2].d};
}

void require_in_domain(const SurfacePatch& S, double u, double v) {
  if (!S.contains(u, v))
    throw OutOfDomain("(" + std::to_string(u) + ", " + std::to_string(v) + ") lies outside the patch domain");
}

double sq(double x) { return x * x; }

}  // namespace

SurfacePatch SurfacePatch::expressions(const std::string& x, const std::string& y, const std::string& z, double u0,
                                       double u1, double v0, double v1) {
  if (!(u0 < u1) || !(v0 < v1)) throw InvalidArgument("empty patch domain");
  const std::vector<std::string> uv{"u", "v"};
  return {expr::ScalarFunction::expression(x, uv), expr::ScalarFunction::expression(y, uv),
          expr::ScalarFunction::expression(z, uv), u0, u1, v0, v1};
}

Vec3 SurfacePatch::operator()(double u, double v) const {
  const std::vector<double> b{u, v};
  return {x.eval(b), y.eval(b), z.eval(b)};
}

bool SurfacePatch::contains(double u, double v) const {
  const double tu = 1e-12 * (1 + std::abs(u0) + std::abs(u1)), tv = 1e-12 * (1 + std::abs(v0) + std::abs(v1));
  return u >= u0 - tu && u <= u1 + tu && v >= v0 - tv && v <= v1 + tv;
}

PatchJet patch_jet(const SurfacePatch& S, double u, double v) {
  require_in_domain(S, u, v);
  const Second uu = second(S, u, v, 0, 0), uv = second(S, u, v, 0, 1), vv = second(S, u, v, 1, 1);
  return {uu.r, uu.da, vv.da, uu.dab, uv.dab, vv.dab};
}

FormData forms_from_jet(const PatchJet& j) {
  FormData f;
  f.E = dot(j.ru, j.ru);
  f.F = dot(j.ru, j.rv);
  f.G1 = dot(j.rv, j.rv);
  f.Delta = f.E * f.G1 - f.F * f.F;
  if (!(f.Delta > 1e-12)) throw DegenerateParametrization("Delta = " + std::to_string(f.Delta));
  const double sd = std::sqrt(f.Delta);
  f.nu = cross(j.ru, j.rv) / sd;
  f.L = triple(j.ru, j.rv, j.ruu) / sd;
  f.M = triple(j.ru, j.rv, j.ruv) / sd;
  f.N = triple(j.ru, j.rv, j.rvv) / sd;
  f.H = (f.E * f.N - 2 * f.F * f.M + f.G1 * f.L) / (2 * f.Delta);
  f.Kt = (f.L * f.N - f.M * f.M) / f.Delta;
  return f;
}

FormData fundamental_forms(const SurfacePatch& S, double u, double v) { return forms_from_jet(patch_jet(S, u, v)); }

Christoffel christoffel_from_jet(const PatchJet& j) {
  const FormData f = forms_from_jet(j);
  const double sd = std::sqrt(f.Delta);
  const Vec3 second_d[2][2] = {{j.ruu, j.ruv}, {j.ruv, j.rvv}};
  Christoffel c;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      c.sym[0][a][b] = -triple(f.nu, j.rv, second_d[a][b]) / sd;
      c.sym[1][a][b] = triple(f.nu, j.ru, second_d[a][b]) / sd;
    }
  return c;
}

Christoffel christoffel(const SurfacePatch& S, double u, double v) { return christoffel_from_jet(patch_jet(S, u, v)); }

double gauss_weingarten_residual(const SurfacePatch& S, double u, double v) {
  const PatchJet j = patch_jet(S, u, v);
  const FormData f = forms_from_jet(j);
  const Christoffel c = christoffel_from_jet(j);
  const double E = f.E, F = f.F, G = f.G1, D = f.Delta;
  double res = 0;
  res = std::max(res, norm(j.ruu - (j.ru * c(1, 1, 1) + j.rv * c(2, 1, 1) + f.nu * f.L)));
  res = std::max(res, norm(j.ruv - (j.ru * c(1, 1, 2) + j.rv * c(2, 1, 2) + f.nu * f.M)));
  res = std::max(res, norm(j.rvv - (j.ru * c(1, 2, 2) + j.rv * c(2, 2, 2) + f.nu * f.N)));
  const Vec3 nu_u = nu_derivative(S, u, v, 0), nu_v = nu_derivative(S, u, v, 1);
  res = std::max(res, norm(nu_u - (j.ru * (F * f.M - G * f.L) + j.rv * (F * f.L - E * f.M)) / D));
  res = std::max(res, norm(nu_v - (j.ru * (F * f.N - G * f.M) + j.rv * (F * f.M - E * f.N)) / D));
  return res;
}

double phi_form(const FormData& f, const Dir& a, const Dir& b) {
  return f.E * a[0] * b[0] + f.F * (a[0] * b[1] + a[1] * b[0]) + f.G1 * a[1] * b[1];
}

double psi_form(const FormData& f, const Dir& a, const Dir& b) {
  return f.L * a[0] * b[0] + f.M * (a[0] * b[1] + a[1] * b[0]) + f.N * a[1] * b[1];
}

Dir unit_dir(const FormData& f, const Dir& a) {
  const double n2 = phi_form(f, a, a);
  if (!(n2 > 0)) throw InvalidArgument("zero tangent direction");
  const double n = std::sqrt(n2);
  return {a[0] / n, a[1] / n};
}

double c1_pair(const FormData& f, const Dir& delta, const Dir& d) {
  return phi_form(f, unit_dir(f, delta), unit_dir(f, d));
}

double c2_pair(const FormData& f, const Dir& delta, const Dir& d) {
  const Dir a = unit_dir(f, delta), b = unit_dir(f, d);
  return std::sqrt(f.Delta) * (a[0] * b[1] - a[1] * b[0]);
}

double K_pair(const FormData& f, const Dir& delta, const Dir& d) {
  const double num = f.L * d[0] * delta[0] + f.M * (d[0] * delta[1] + d[1] * delta[0]) + f.N * d[1] * delta[1];
  return num / (std::sqrt(phi_form(f, d, d)) * std::sqrt(phi_form(f, delta, delta)));
}

double K_polar(const FormData& f, const Dir& delta, const Dir& d) {
  return psi_form(f, unit_dir(f, delta), unit_dir(f, d));
}

double T_pair(const FormData& f, const Dir& delta, const Dir& d) {
  const Dir a = unit_dir(f, delta), b = unit_dir(f, d);
  const double r11 = f.E * a[0] + f.F * a[1], r12 = f.F * a[0] + f.G1 * a[1];
  const double r21 = f.L * b[0] + f.M * b[1], r22 = f.M * b[0] + f.N * b[1];
  return (r11 * r22 - r12 * r21) / std::sqrt(f.Delta);
}

FieldInvariants field_invariants(const SurfacePatch& S, const SurfaceCurve& C, const std::optional<TangentField>& xi) {
  const Grid& g = C.grid;
  const std::size_t n = g.size();
  const auto uj = scalar_jets(C.u, g), vj = scalar_jets(C.v, g);
  std::vector<ScalarJet> x1, x2;
  if (xi) {
    x1 = scalar_jets(xi->xi1, g);
    x2 = scalar_jets(xi->xi2, g);
  }
  FieldInvariants out;
  out.grid = g;
  std::vector<double> speed(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PatchJet j = patch_jet(S, uj[i].v, vj[i].v);
    const FormData f = forms_from_jet(j);
    const Christoffel ch = christoffel_from_jet(j);
    const Dir dt{uj[i].d1, vj[i].d1};
    const double sp2 = phi_form(f, dt, dt);
    if (!(sp2 > 1e-24)) throw InvalidArgument("curve tangent vanishes at node " + std::to_string(i));
    const double sp = std::sqrt(sp2);
    speed[i] = sp;
    const Dir d{dt[0] / sp, dt[1] / sp};
    Dir x, dx;
    if (xi) {
      x = {x1[i].v, x2[i].v};
      const double len2 = phi_form(f, x, x);
      if (std::abs(len2 - 1) > 1e-8)
        throw InvalidArgument("tangent field is not unit in the first form at node " + std::to_string(i));
      dx = {x1[i].d1 / sp, x2[i].d1 / sp};
    } else {
      const double u1 = uj[i].d1, v1 = vj[i].d1, u2 = uj[i].d2, v2 = vj[i].d2;
      const Vec3 rt = j.ru * u1 + j.rv * v1;
      const Vec3 rtt = j.ruu * (u1 * u1) + j.ruv * (2 * u1 * v1) + j.rvv * (v1 * v1) + j.ru * u2 + j.rv * v2;
      const double sp_t = dot(rt, rtt) / sp;
      x = d;
      dx = {(u2 / sp - u1 * sp_t / sp2) / sp, (v2 / sp - v1 * sp_t / sp2) / sp};
    }
    Dir Dx = dx;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) Dx[a] += ch.sym[a][b][c] * x[b] * d[c];
    const double sd = std::sqrt(f.Delta);
    std::array<std::array<double, 2>, 2> Gij{};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) Gij[a][b] = sd * (Dx[a] * x[b] - Dx[b] * x[a]);
    out.xi.push_back(x);
    out.d.push_back(d);
    out.Gij.push_back(Gij);
    out.G.push_back(Gij[1][0]);
    out.K.push_back(psi_form(f, x, d));
    out.T.push_back(T_pair(f, x, d));
    out.c1.push_back(phi_form(f, x, d));
    out.c2.push_back(sd * (x[0] * d[1] - x[1] * d[0]));
  }
  out.s = cumulative_quadrature(speed, g);
  return out;
}

double first_form_angle(const FormData& f, const Dir& a, const Dir& b) {
  return std::atan2(std::sqrt(f.Delta) * (a[0] * b[1] - a[1] * b[0]), phi_form(f, a, b));
}

LCTransport levi_civita_transport(const SurfacePatch& S, const SurfaceCurve& C, double V1, double V2) {
  const Grid& g = C.grid;
  const std::size_t n = g.size();
  const auto uj = scalar_jets(C.u, g), vj = scalar_jets(C.v, g);
  using M2 = std::array<double, 4>;
  // dV/dt = -A V with A[i][j] = sum_k {i|jk} du^k/dt.
  auto coeff = [&](double u, double v, double du, double dv) {
    const Christoffel ch = christoffel(S, u, v);
    M2 A{};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) A[2 * a + b] = ch.sym[a][b][0] * du + ch.sym[a][b][1] * dv;
    return A;
  };
  std::vector<M2> node(n);
  for (std::size_t i = 0; i < n; ++i) node[i] = coeff(uj[i].v, vj[i].v, uj[i].d1, vj[i].d1);
  const bool exact = C.u.expression_backed() && C.v.expression_backed();

  LCTransport out;
  out.grid = g;
  std::array<double, 2> y{V1, V2};
  for (std::size_t i = 0; i < n; ++i) {
    out.V1.push_back(y[0]);
    out.V2.push_back(y[1]);
    const FormData f = fundamental_forms(S, uj[i].v, vj[i].v);
    out.norm2.push_back(phi_form(f, {y[0], y[1]}, {y[0], y[1]}));
    if (i + 1 == n) break;
    const double t0 = g[i], h = g[i + 1] - g[i];
    M2 mid{};
    if (exact) {
      const ScalarJet a = scalar_jet(C.u, t0 + h / 2), b = scalar_jet(C.v, t0 + h / 2);
      mid = coeff(a.v, b.v, a.d1, b.d1);
    } else {
      for (int k = 0; k < 4; ++k) mid[k] = 0.5 * (node[i][k] + node[i + 1][k]);
    }
    auto rhs = [&](double t, const std::array<double, 2>& V) {
      const M2& A = t == t0 ? node[i] : (t == t0 + h ? node[i + 1] : mid);
      return std::array<double, 2>{-(A[0] * V[0] + A[1] * V[1]), -(A[2] * V[0] + A[3] * V[1])};
    };
    y = rk4_step<2>(rhs, t0, y, h);
  }
  return out;
}

TchebishevResult tchebishev_test(const SurfacePatch& S, std::size_t nu, std::size_t nv) {
  TchebishevResult r;
  for (std::size_t a = 1; a <= nu; ++a)
    for (std::size_t b = 1; b <= nv; ++b) {
      const double u = S.u0 + (S.u1 - S.u0) * a / (nu + 1), v = S.v0 + (S.v1 - S.v0) * b / (nv + 1);
      const PatchJet j = patch_jet(S, u, v);
      r.max_dE_dv = std::max(r.max_dE_dv, std::abs(2 * dot(j.ru, j.ruv)));
      r.max_dG1_du = std::max(r.max_dG1_du, std::abs(2 * dot(j.rv, j.ruv)));
    }
  r.is_tchebishev = r.max_dE_dv <= 1e-8 && r.max_dG1_du <= 1e-8;
  return r;
}

config::CurveInvariants curve_invariants_on_surface(const SurfacePatch& S, const SurfaceCurve& C) {
  const FieldInvariants fi = field_invariants(S, C);
  config::CurveInvariants ci;
  ci.grid = C.grid;
  ci.kappa_g = fi.G;
  ci.kappa_n = fi.K;
  ci.tau_g = fi.T;
  return config::classify(std::move(ci));
}

PrincipalData principal_data(const SurfacePatch& S, double u, double v) {
  PrincipalData p;
  p.forms = fundamental_forms(S, u, v);
  const FormData& f = p.forms;
  if (std::abs(f.F) > 1e-8 || std::abs(f.M) > 1e-8)
    throw NotCurvatureLineCoords("F = " + std::to_string(f.F) + ", M = " + std::to_string(f.M));
  p.invR1 = f.L / f.E;
  p.invR2 = f.N / f.G1;
  p.Hcheck = 0.5 * (p.invR1 + p.invR2) - f.H;
  p.Ktcheck = p.invR1 * p.invR2 - f.Kt;
  p.T1inv = 0.5 * (p.invR2 - p.invR1);
  p.T2inv = -p.T1inv;
  p.Tm = 0.5 * (p.T1inv + p.T2inv);
  p.Tt = p.T1inv * p.T2inv;
  return p;
}

MayerBortolotti mayer_bortolotti(double invR1, double invR2, double theta, double sigma) {
  MayerBortolotti m;
  const double ct = std::cos(theta), st = std::sin(theta), cs = std::cos(sigma), ss = std::sin(sigma);
  m.Kds = cs * ct * invR1 + ss * st * invR2;
  m.Tds = cs * st * invR2 - ss * ct * invR1;
  m.euler_kn = ct * ct * invR1 + st * st * invR2;
  m.bonnet_tg = 0.5 * (invR2 - invR1) * std::sin(2 * theta);
  return m;
}

Dir principal_angle_dir(const FormData& f, double theta) {
  return {std::cos(theta) / std::sqrt(f.E), std::sin(theta) / std::sqrt(f.G1)};
}

Indicatrix indicatrix(double invR1, double invR2, IndicatrixKind kind, const std::vector<double>& angles,
                      double theta) {
  Indicatrix out;
  for (double a : angles) {
    const double c = std::cos(a), s = std::sin(a);
    double value = 0, rho = 0;
    switch (kind) {
      case IndicatrixKind::dupin: value = c * c * invR1 + s * s * invR2; break;
      case IndicatrixKind::bonnet: value = 0.5 * (invR2 - invR1) * std::sin(2 * a); break;
      case IndicatrixKind::normal_line: value = c * std::cos(theta) * invR1 + s * std::sin(theta) * invR2; break;
      case IndicatrixKind::torsion_line: value = c * std::sin(theta) * invR2 - s * std::cos(theta) * invR1; break;
    }
    if (std::abs(value) <= 1e-12) {
      out.skipped.push_back(a);
      continue;
    }
    const bool conic = kind == IndicatrixKind::dupin || kind == IndicatrixKind::bonnet;
    rho = conic ? 1 / std::sqrt(std::abs(value)) : 1 / std::abs(value);
    const double x = rho * c, y = rho * s;
    double lhs = 0;
    switch (kind) {
      case IndicatrixKind::dupin: lhs = x * x * invR1 + y * y * invR2; break;
      case IndicatrixKind::bonnet: lhs = (invR2 - invR1) * x * y; break;
      case IndicatrixKind::normal_line: lhs = x * std::cos(theta) * invR1 + y * std::sin(theta) * invR2; break;
      case IndicatrixKind::torsion_line: lhs = x * std::sin(theta) * invR2 - y * std::cos(theta) * invR1; break;
    }
    out.angle.push_back(a);
    out.x.push_back(x);
    out.y.push_back(y);
    out.max_conic_residual = std::max(out.max_conic_residual, std::abs(std::abs(lhs) - 1));
  }
  return out;
}

double t_asym(const FormData& f, const Dir& delta, const Dir& d) {
  const Dir a = unit_dir(f, delta), b = unit_dir(f, d);
  return (T_pair(f, a, b) - T_pair(f, b, a)) - 2 * std::sqrt(f.Delta) * f.H * (a[0] * b[1] - a[1] * b[0]);
}

IdentityResiduals identity_residuals(const SurfacePatch& S, double u, double v, double theta, double sigma) {
  const PrincipalData p = principal_data(S, u, v);
  const FormData& f = p.forms;
  const Dir d = principal_angle_dir(f, theta), delta = principal_angle_dir(f, sigma);
  const double H = 0.5 * (p.invR1 + p.invR2), Kt = f.Kt;
  const double kt = K_pair(f, d, d), ks = K_pair(f, delta, delta);
  const double tt = T_pair(f, d, d), ts = T_pair(f, delta, delta);
  IdentityResiduals r;
  r.product_identity =
      kt * ks + tt * ts - (2 * H * K_pair(f, d, delta) * std::cos(sigma - theta) - Kt * std::cos(2 * (sigma - theta)));
  r.beltrami_enneper = kt * kt + tt * tt - 2 * H * kt + Kt;
  if (Kt <= 1e-12) {
    const double ta = std::atan2(std::sqrt(std::abs(p.invR1)), std::sqrt(std::abs(p.invR2)));
    const Dir da = principal_angle_dir(f, ta);
    r.enneper = sq(T_pair(f, da, da)) + Kt;
  }
  r.t_asym = t_asym(f, delta, d);
  return r;
}

}  // namespace myller::surface
