#include "myller/fields.hpp"

#include <algorithm>
#include <cmath>

namespace myller::fields {

namespace {

struct FrenetNode {
  Frame f;
  double K1 = 0, K2 = 0;
  Vec3 alpha;
};

// Frenet apparatus of the unit field jet x along a curve with jet c. Returns false when K1 < k_min.
bool frenet_node(const VecJet& c, const VecJet& x, FrenetNode& out) {
  out.alpha = normalized(c.d1);
  out.f.origin = c.v;
  out.f.e1 = x.v;
  out.K1 = norm(x.d1);
  if (!(out.K1 >= k_min)) return false;
  const Vec3 xi2 = x.d1 / out.K1;
  const double dK1 = dot(x.d1, x.d2) / out.K1;
  const Vec3 dxi2 = (x.d2 - xi2 * dK1) / out.K1;
  out.f.e2 = xi2;
  out.f.e3 = cross(x.v, xi2);
  out.K2 = dot(dxi2, out.f.e3);
  return true;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

FrenetData frenet_of_versor_field(const VersorFieldOnCurve& vf) {
  const auto cj = vector_jets(vf.curve, vf.grid);
  require_arclength(cj);
  return frenet_from_jets(vf.grid, cj, unit_jets(vf.xi, vf.grid, "xi"));
}

FrenetData frenet_from_jets(const Grid& g, const std::vector<VecJet>& cj, const std::vector<VecJet>& xj) {
  FrenetData fd;
  fd.grid = g;
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    FrenetNode node;
    if (!frenet_node(cj[i], xj[i], node))
      throw VanishingCurvature("K1 = " + std::to_string(node.K1) + " below k_min; the field is parallel there", i);
    fd.r.push_back(cj[i].v);
    fd.alpha.push_back(node.alpha);
    fd.frames.push_back(node.f);
    fd.K1.push_back(node.K1);
    fd.K2.push_back(node.K2);
    fd.a1.push_back(dot(node.alpha, node.f.e1));
    fd.a2.push_back(dot(node.alpha, node.f.e2));
    fd.a3.push_back(dot(node.alpha, node.f.e3));
  }
  return fd;
}

Reconstruction reconstruct_versor_field(const VersorProfile& p, const Frame& init, const Grid& grid) {
  const auto K1 = scalar_jets(p.K1, grid), K2 = scalar_jets(p.K2, grid);
  const auto a1 = scalar_jets(p.a1, grid), a2 = scalar_jets(p.a2, grid), a3 = scalar_jets(p.a3, grid);
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(K1[i].v >= k_min)) throw VanishingCurvature("profile K1 below k_min", i);
    const double s2 = a1[i].v * a1[i].v + a2[i].v * a2[i].v + a3[i].v * a3[i].v;
    if (std::abs(s2 - 1.0) > 1e-8) throw InvalidArgument("a1^2 + a2^2 + a3^2 != 1 at node " + std::to_string(i));
  }
  Reconstruction rec;
  const bool exact = p.K1.expression_backed() && p.K2.expression_backed() && p.a1.expression_backed() &&
                     p.a2.expression_backed() && p.a3.expression_backed();
  if (exact) {
    rec.curve = evolve_frame(
        [&](double s) {
          return FrameRates{p.K1(s), 0.0, p.K2(s), Vec3{p.a1(s), p.a2(s), p.a3(s)}};
        },
        init, grid);
  } else {
    std::vector<double> a(n), b(n, 0.0), c(n);
    std::vector<Vec3> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = K1[i].v;
      c[i] = K2[i].v;
      v[i] = {a1[i].v, a2[i].v, a3[i].v};
    }
    rec.curve = evolve_frame(a, b, c, v, init, grid);
  }
  for (const auto& f : rec.curve.frames) rec.xi.push_back(f.e1);
  return rec;
}

VersorFieldOnCurve as_versor_field(const Reconstruction& rec) {
  const Grid& g = rec.curve.grid;
  return {VectorFunction::samples(rec.curve.positions(), g), VectorFunction::samples(rec.xi, g), g};
}

Concurrence versor_concurrence(const FrenetData& fd, double tol) {
  const std::size_t n = fd.grid.size();
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = fd.a2[i] / fd.K1[i];
  const auto dq = differentiate_samples(q, fd.grid);
  Concurrence c;
  c.residual_ode.resize(n);
  for (std::size_t i = 0; i < n; ++i) c.residual_ode[i] = dq[i] - fd.a1[i];
  c.residual_a3 = fd.a3;
  c.concurrent = max_abs(c.residual_ode) <= tol && max_abs(c.residual_a3) <= tol;
  return c;
}

RuledClass ruled_classification(const VersorFieldOnCurve& vf) {
  const auto xj = unit_jets(vf.xi, vf.grid, "xi");
  double kmax = 0;
  for (const auto& j : xj) kmax = std::max(kmax, norm(j.d1));
  RuledClass rc;
  if (kmax <= 1e-8) {
    // Parallel generators: a cylinder, which trivially has a director plane and is developable.
    rc.cylinder = rc.director_plane = rc.developable = true;
    return rc;
  }
  const FrenetData fd = frenet_of_versor_field(vf);
  rc.director_plane = max_abs(fd.K2) <= 1e-8;
  rc.developable = max_abs(fd.a3) <= 1e-8;
  return rc;
}

SphericalImage spherical_image(const FrenetData& fd) {
  SphericalImage si;
  si.sstar = cumulative_quadrature(fd.K1, fd.grid);
  si.total_length = si.sstar.back();
  double kg = 0;
  for (std::size_t i = 0; i < fd.frames.size(); ++i) {
    si.image.push_back(fd.frames[i].e1);
    si.kg_image.push_back(fd.K2[i] / fd.K1[i]);
    kg = std::max(kg, std::abs(si.kg_image.back()));
  }
  si.great_circle = kg <= 1e-6;
  return si;
}

PlaneFieldData plane_field_invariants(const VectorFunction& curve, const VectorFunction& nu, const Grid& grid) {
  const auto cj = vector_jets(curve, grid);
  require_arclength(cj);
  return plane_field_from_jets(grid, cj, unit_jets(nu, grid, "nu"));
}

PlaneFieldData plane_field_from_jets(const Grid& grid, const std::vector<VecJet>& cj, const std::vector<VecJet>& nj) {
  PlaneFieldData pf;
  pf.grid = grid;
  pf.framed = true;
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    FrenetNode node;
    const bool ok = frenet_node(cj[i], nj[i], node);
    if (!ok && pf.framed) {
      pf.framed = false;
      pf.first_flat_node = i;
    }
    pf.r.push_back(cj[i].v);
    pf.alpha.push_back(node.alpha);
    pf.frames.push_back(node.f);
    pf.chi1.push_back(node.K1);
    pf.chi2.push_back(ok ? node.K2 : 0.0);
    pf.b1.push_back(dot(node.alpha, node.f.e1));
    pf.b2.push_back(ok ? dot(node.alpha, node.f.e2) : 0.0);
    pf.b3.push_back(ok ? dot(node.alpha, node.f.e3) : 0.0);
  }
  return pf;
}

bool plane_predicate(const PlaneFieldData& pf, PlanePredicate p, double tol) {
  switch (p) {
    case PlanePredicate::lines_cross_curve: return max_abs(pf.b1) <= tol;
    case PlanePredicate::planes_parallel: return max_abs(pf.chi1) <= tol;
    default: break;
  }
  if (!pf.framed) throw VanishingCurvature("chi1 below k_min; the characteristic frame is undefined", pf.first_flat_node);
  switch (p) {
    case PlanePredicate::characteristics_parallel: return max_abs(pf.chi2) <= tol;
    case PlanePredicate::orthogonal_trajectory: return max_abs(pf.b3) <= tol;
    case PlanePredicate::nu3_concurrent: {
      if (max_abs(pf.b1) > tol) return false;
      const std::size_t n = pf.grid.size();
      std::vector<double> q(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(pf.chi2[i]) < k_min) return false;
        q[i] = pf.b2[i] / pf.chi2[i];
      }
      const auto dq = differentiate_samples(q, pf.grid);
      for (std::size_t i = 0; i < n; ++i)
        if (std::abs(pf.b3[i] + dq[i]) > tol) return false;
      return true;
    }
    default: return false;
  }
}

}  // namespace myller::fields
