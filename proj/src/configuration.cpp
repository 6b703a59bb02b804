#include "myller/configuration.hpp"

#include <algorithm>
#include <cmath>

namespace myller::config {

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

DarbouxData darboux_from_jets(const Grid& g, const std::vector<VecJet>& cj, const std::vector<VecJet>& xj,
                              const std::vector<VecJet>& nj) {
  DarbouxData dd;
  dd.grid = g;
  double tang = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 xi = xj[i].v, nu = nj[i].v;
    const double off = dot(xi, nu);
    if (std::abs(off) > 1e-8)
      throw NotAConfiguration("<xi, nu> = " + std::to_string(off) + ", xi is not in the plane", i);
    const Vec3 alpha = normalized(cj[i].d1);
    Frame f;
    f.origin = cj[i].v;
    f.e1 = xi;
    f.e2 = cross(nu, xi);
    f.e3 = nu;
    dd.r.push_back(cj[i].v);
    dd.alpha.push_back(alpha);
    dd.frames.push_back(f);
    dd.c1.push_back(dot(alpha, f.e1));
    dd.c2.push_back(dot(alpha, f.e2));
    dd.c3.push_back(dot(alpha, f.e3));
    dd.G.push_back(triple(xi, xj[i].d1, nu));
    dd.K.push_back(dot(xj[i].d1, nu));
    dd.T.push_back(triple(xi, nu, nj[i].d1));
    tang = std::max(tang, std::abs(dd.c3.back()));
  }
  dd.tangent = tang <= 1e-8;
  return dd;
}

// Unit tangent jet of an arclength curve, from its position jet.
std::vector<VecJet> tangent_jets(const std::vector<VecJet>& cj) {
  std::vector<VecJet> out;
  out.reserve(cj.size());
  for (const auto& c : cj) out.push_back(normalize_jet({c.d1, c.d2, c.d3, Vec3{}}));
  return out;
}

}  // namespace

DarbouxData darboux_invariants(const MyllerConfig& cfg) {
  const auto cj = vector_jets(cfg.curve, cfg.grid);
  require_arclength(cj);
  return darboux_from_jets(cfg.grid, cj, unit_jets(cfg.xi, cfg.grid, "xi"), unit_jets(cfg.nu, cfg.grid, "nu"));
}

FramedCurve reconstruct_configuration(const DarbouxProfile& p, const Frame& init, const Grid& grid) {
  const std::size_t n = grid.size();
  const auto c1 = scalar_jets(p.c1, grid), c2 = scalar_jets(p.c2, grid), c3 = scalar_jets(p.c3, grid);
  const auto G = scalar_jets(p.G, grid), K = scalar_jets(p.K, grid), T = scalar_jets(p.T, grid);
  for (std::size_t i = 0; i < n; ++i) {
    const double s2 = c1[i].v * c1[i].v + c2[i].v * c2[i].v + c3[i].v * c3[i].v;
    if (std::abs(s2 - 1.0) > 1e-8) throw InvalidArgument("c1^2 + c2^2 + c3^2 != 1 at node " + std::to_string(i));
  }
  const bool exact = p.c1.expression_backed() && p.c2.expression_backed() && p.c3.expression_backed() &&
                     p.G.expression_backed() && p.K.expression_backed() && p.T.expression_backed();
  if (exact)
    return evolve_frame(
        [&](double s) { return FrameRates{p.G(s), p.K(s), p.T(s), Vec3{p.c1(s), p.c2(s), p.c3(s)}}; }, init,
        grid);
  std::vector<double> a(n), b(n), c(n);
  std::vector<Vec3> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = G[i].v;
    b[i] = K[i].v;
    c[i] = T[i].v;
    v[i] = {c1[i].v, c2[i].v, c3[i].v};
  }
  return evolve_frame(a, b, c, v, init, grid);
}

MyllerConfig as_configuration(const FramedCurve& fc) {
  std::vector<Vec3> xi, nu;
  for (const auto& f : fc.frames) {
    xi.push_back(f.e1);
    nu.push_back(f.e3);
  }
  return {VectorFunction::samples(fc.positions(), fc.grid), VectorFunction::samples(xi, fc.grid),
          VectorFunction::samples(nu, fc.grid), fc.grid};
}

FrenetRelation frenet_relation(const DarbouxData& dd, const fields::FrenetData& fd) {
  const std::size_t n = dd.grid.size();
  if (fd.grid.size() != n) throw InvalidArgument("Frenet and Darboux data on different grids");
  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i)
    raw[i] = std::atan2(dot(fd.frames[i].e2, dd.frames[i].e2), dot(fd.frames[i].e2, dd.frames[i].e3));
  FrenetRelation fr;
  fr.phi = unwrap_angle(raw);
  const auto dphi = differentiate_samples(fr.phi, dd.grid);
  for (std::size_t i = 0; i < n; ++i) {
    const double sp = std::sin(fr.phi[i]), cp = std::cos(fr.phi[i]);
    fr.res_G.push_back(dd.G[i] - fd.K1[i] * sp);
    fr.res_K.push_back(dd.K[i] - fd.K1[i] * cp);
    fr.res_T.push_back(dd.T[i] - (fd.K2[i] + dphi[i]));
    if (std::abs(dd.K[i]) > 1e-8)
      fr.meusnier.emplace_back(cp / dd.K[i] - 1.0 / fd.K1[i]);
    else
      fr.meusnier.emplace_back(std::nullopt);
  }
  fr.max_residual = std::max({max_abs(fr.res_G), max_abs(fr.res_K), max_abs(fr.res_T)});
  return fr;
}

NormalRelation normal_relation(const DarbouxData& dd, const fields::PlaneFieldData& pf) {
  const std::size_t n = dd.grid.size();
  if (pf.grid.size() != n) throw InvalidArgument("plane-field and Darboux data on different grids");
  NormalRelation nr;
  for (std::size_t i = 0; i < n; ++i)
    nr.k2t2.push_back(dd.K[i] * dd.K[i] + dd.T[i] * dd.T[i] - pf.chi1[i] * pf.chi1[i]);
  nr.max_residual = max_abs(nr.k2t2);
  if (!pf.framed) return nr;
  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& nu3 = pf.frames[i].e3;
    raw[i] = std::atan2(-dot(nu3, dd.frames[i].e2), dot(nu3, dd.frames[i].e1));
  }
  nr.sigma = unwrap_angle(raw);
  const auto dsig = differentiate_samples(nr.sigma, dd.grid);
  for (std::size_t i = 0; i < n; ++i) {
    const double ss = std::sin(nr.sigma[i]), cs = std::cos(nr.sigma[i]);
    nr.res_K.push_back(dd.K[i] - pf.chi1[i] * ss);
    nr.res_T.push_back(dd.T[i] - pf.chi1[i] * cs);
    nr.res_G.push_back(dd.G[i] - (pf.chi2[i] + dsig[i]));
    nr.res_c1.push_back(dd.c1[i] - (-pf.b2[i] * ss + pf.b3[i] * cs));
    nr.res_c2.push_back(dd.c2[i] - (-pf.b2[i] * cs - pf.b3[i] * ss));
    nr.res_c3.push_back(dd.c3[i] - pf.b1[i]);
  }
  for (const auto* v : {&nr.res_K, &nr.res_T, &nr.res_G, &nr.res_c1, &nr.res_c2, &nr.res_c3})
    nr.max_residual = std::max(nr.max_residual, max_abs(*v));
  return nr;
}

Transported myller_transport(const DarbouxData& dd, double V1, double V2) {
  const Grid& g = dd.grid;
  Transported t;
  std::array<double, 2> y{V1, V2};
  for (std::size_t i = 0; i < g.size(); ++i) {
    t.V1.push_back(y[0]);
    t.V2.push_back(y[1]);
    t.spatial.push_back(dd.frames[i].e1 * y[0] + dd.frames[i].e2 * y[1]);
    if (i + 1 == g.size()) break;
    const double h = g[i + 1] - g[i], G0 = dd.G[i], G1 = dd.G[i + 1];
    auto rhs = [&](double s, const std::array<double, 2>& v) {
      const double w = (s - g[i]) / h;
      const double G = G0 + (G1 - G0) * w;
      return std::array<double, 2>{G * v[1], -G * v[0]};
    };
    y = rk4_step<2>(rhs, g[i], y, h);
  }
  return t;
}

std::vector<Vec3> adjoint_curve(const DarbouxData& dd) {
  std::vector<Vec3> R;
  for (std::size_t i = 0; i < dd.grid.size(); ++i) {
    if (std::abs(dd.G[i]) < 1e-8) throw VanishingG("geodesic curvature G vanishes", i);
    R.push_back(dd.r[i] - dd.frames[i].e1 * (dd.c2[i] / dd.G[i]));
  }
  return R;
}

MyllerConcurrence myller_concurrence(const DarbouxData& dd, double tol) {
  const std::size_t n = dd.grid.size();
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(dd.G[i]) < 1e-8) throw VanishingG("geodesic curvature G vanishes", i);
    q[i] = dd.c2[i] / dd.G[i];
  }
  const auto dq = differentiate_samples(q, dd.grid);
  MyllerConcurrence mc;
  for (std::size_t i = 0; i < n; ++i) mc.residual.push_back(dq[i] - dd.c1[i]);
  mc.concurrent = max_abs(mc.residual) <= tol;
  return mc;
}

KreinResult krein_area(const DarbouxData& dd, const fields::PlaneFieldData& pf) {
  const std::size_t n = dd.grid.size();
  Vec3 lo = dd.r[0], hi = dd.r[0];
  for (const auto& p : dd.r) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const double diameter = norm(hi - lo);
  const double gap = norm(dd.r.back() - dd.r.front());
  if (gap > 1e-8 * std::max(diameter, 1e-300))
    throw NotClosed("endpoint gap " + std::to_string(gap) + " exceeds 1e-8 * diameter");
  if (!pf.framed) throw VanishingCurvature("chi1 vanishes; sigma is undefined", pf.first_flat_node);

  KreinResult kr;
  const Vec3 poles[6] = {{0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
  bool found = false;
  for (const Vec3& P : poles) {
    double clearance = pi;
    for (const auto& f : dd.frames) {
      const double c = std::clamp(dot(f.e3, P), -1.0, 1.0);
      clearance = std::min({clearance, std::acos(c), pi - std::acos(c)});
    }
    if (clearance <= 0.1) continue;
    // (X, Y, P) right-handed; phi measured counterclockwise seen from outside at P.
    const Vec3 X = std::abs(P.z) > 0.5 ? Vec3{1, 0, 0} : Vec3{0, 0, 1};
    const Vec3 Xp = normalized(X - P * dot(X, P));
    const Vec3 Y = cross(P, Xp);
    std::vector<double> raw(n), cth(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& v = dd.frames[i].e3;
      raw[i] = std::atan2(dot(v, Y), dot(v, Xp));
      cth[i] = dot(v, P);
    }
    const auto phi = unwrap_angle(raw);
    const long w = std::lround((phi.back() - phi.front()) / two_pi);
    if (w != 1 && w != -1) continue;
    const auto dphi = differentiate_samples(phi, dd.grid);
    std::vector<double> integrand(n);
    for (std::size_t i = 0; i < n; ++i) integrand[i] = cth[i] * dphi[i];
    kr.omega_direct = two_pi - quadrature(integrand, dd.grid);
    kr.pole = P;
    kr.pole_winding = static_cast<int>(w);
    found = true;
    break;
  }
  if (!found) throw PoleOnImage("no axis pole is clear of the image with winding +-1");

  const NormalRelation nr = normal_relation(dd, pf);
  kr.integral_G = quadrature(dd.G, dd.grid);
  kr.integral_dsigma = nr.sigma.back() - nr.sigma.front();
  kr.sigma_winding = std::lround(kr.integral_dsigma / two_pi);
  kr.omega_formula = two_pi - kr.integral_G + kr.integral_dsigma;
  kr.jacobi_flag = std::abs(kr.omega_direct - two_pi) <= 1e-5;
  return kr;
}

CurveInvariants classify(CurveInvariants ci, double tol) {
  ci.geodesic = max_abs(ci.kappa_g) <= tol;
  ci.asymptotic = max_abs(ci.kappa_n) <= tol;
  ci.curvature_line = max_abs(ci.tau_g) <= tol;
  return ci;
}

TangentCurveResult tangent_curve_invariants(const VectorFunction& curve, const VectorFunction& nu, const Grid& grid) {
  const auto cj = vector_jets(curve, grid);
  require_arclength(cj);
  const auto aj = tangent_jets(cj);
  const auto nj = unit_jets(nu, grid, "nu");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double c = dot(aj[i].v, nj[i].v);
    if (std::abs(c) > 1e-8) throw NotTangent("<alpha, nu> = " + std::to_string(c), i);
  }
  TangentCurveResult res;
  res.darboux = darboux_from_jets(grid, cj, aj, nj);
  CurveInvariants ci;
  ci.grid = grid;
  ci.kappa_g = res.darboux.G;
  ci.kappa_n = res.darboux.K;
  ci.tau_g = res.darboux.T;
  res.inv = classify(std::move(ci));
  try {
    res.frenet = frenet_relation(res.darboux, fields::frenet_from_jets(grid, cj, aj));
  } catch (const VanishingCurvature&) {
    res.frenet.reset();
  }
  const auto pf = fields::plane_field_from_jets(grid, cj, nj);
  if (pf.framed) res.normal = normal_relation(res.darboux, pf);
  return res;
}

TangentFieldRelations tangent_field_relations(const DarbouxData& dd, const CurveInvariants& ci) {
  const std::size_t n = dd.grid.size();
  if (!dd.tangent) {
    std::size_t worst = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(dd.c3[i]) > std::abs(dd.c3[worst])) worst = i;
    throw NotTangent("the configuration is not tangent", worst);
  }
  if (ci.kappa_g.size() != n) throw InvalidArgument("curve invariants on a different grid");
  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& xi = dd.frames[i].e1;
    const Vec3 mu_star = cross(dd.frames[i].e3, dd.alpha[i]);
    raw[i] = std::atan2(dot(xi, mu_star), dot(xi, dd.alpha[i]));
  }
  TangentFieldRelations tr;
  tr.lambda = unwrap_angle(raw);
  const auto dl = differentiate_samples(tr.lambda, dd.grid);
  const bool k_vanishes = max_abs(dd.K) <= 1e-6;
  for (std::size_t i = 0; i < n; ++i) {
    const double sl = std::sin(tr.lambda[i]), cl = std::cos(tr.lambda[i]);
    const double kn = ci.kappa_n[i], tg = ci.tau_g[i];
    tr.res_K.push_back(dd.K[i] - (kn * cl + tg * sl));
    tr.res_T.push_back(dd.T[i] - (-kn * sl + tg * cl));
    tr.res_G.push_back(dd.G[i] - (ci.kappa_g[i] + dl[i]));
    tr.res_KT.push_back(dd.K[i] * dd.K[i] + dd.T[i] * dd.T[i] - (kn * kn + tg * tg));
    if (k_vanishes && std::abs(tg) > 1e-8)
      tr.bortolotti_angle.emplace_back(std::atan(-kn / tg));
    else
      tr.bortolotti_angle.emplace_back(std::nullopt);
  }
  for (const auto* v : {&tr.res_K, &tr.res_T, &tr.res_G, &tr.res_KT})
    tr.max_residual = std::max(tr.max_residual, max_abs(*v));
  return tr;
}

}  // namespace myller::config
