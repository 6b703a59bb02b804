#include "myller/curves.hpp"

#include <string>

namespace myller {

namespace {
using D3 = Dual<Dual<Dual<double>>>;

D3 seed_all(double t) {
  D3 x;
  x.v.v.v = t;
  x.v.v.d = 1;
  x.v.d.v = 1;
  x.d.v.v = 1;
  return x;
}

void require_same_grid(const expr::ScalarFunction& f, const Grid& g) {
  const Grid& s = f.sample_grid();
  if (s.size() != g.size() || std::abs(s.front() - g.front()) > 1e-12 * (1 + std::abs(g.front())) ||
      std::abs(s.back() - g.back()) > 1e-12 * (1 + std::abs(g.back())))
    throw InvalidArgument("sample-backed function lives on a different grid");
}
}  // namespace

ScalarJet scalar_jet(const expr::ScalarFunction& f, double t) {
  if (!f.expression_backed()) throw InvalidArgument("pointwise jets need an expression-backed function");
  if (f.variables().size() != 1) throw InvalidArgument("jet of a function of more than one variable");
  const D3 x = seed_all(t);
  const D3 y = f.eval_as(&x);
  return {y.v.v.v, y.v.v.d, y.v.d.d, y.d.d.d};
}

std::vector<ScalarJet> scalar_jets(const expr::ScalarFunction& f, const Grid& g) {
  std::vector<ScalarJet> out(g.size());
  if (f.expression_backed()) {
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = scalar_jet(f, g[i]);
    return out;
  }
  require_same_grid(f, g);
  const auto& v = f.sample_values();
  const auto d1 = differentiate_samples(v, g);
  const auto d2 = differentiate_samples(d1, g);
  const auto d3 = differentiate_samples(d2, g);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = {v[i], d1[i], d2[i], d3[i]};
  return out;
}

VectorFunction VectorFunction::expressions(const std::string& x, const std::string& y, const std::string& z,
                                           const std::string& var) {
  return {{expr::ScalarFunction::expression(x, {var}), expr::ScalarFunction::expression(y, {var}),
           expr::ScalarFunction::expression(z, {var})}};
}

VectorFunction VectorFunction::samples(const std::vector<Vec3>& values, const Grid& g, const std::string& var) {
  std::vector<double> a(values.size()), b(values.size()), c(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    a[i] = values[i].x;
    b[i] = values[i].y;
    c[i] = values[i].z;
  }
  return {{expr::ScalarFunction::samples(a, g, var), expr::ScalarFunction::samples(b, g, var),
           expr::ScalarFunction::samples(c, g, var)}};
}

Vec3 VectorFunction::operator()(double t) const { return {c[0](t), c[1](t), c[2](t)}; }

VecJet vector_jet(const VectorFunction& f, double t) {
  const ScalarJet a = scalar_jet(f.c[0], t), b = scalar_jet(f.c[1], t), c = scalar_jet(f.c[2], t);
  return {{a.v, b.v, c.v}, {a.d1, b.d1, c.d1}, {a.d2, b.d2, c.d2}, {a.d3, b.d3, c.d3}};
}

std::vector<VecJet> vector_jets(const VectorFunction& f, const Grid& g) {
  const auto a = scalar_jets(f.c[0], g), b = scalar_jets(f.c[1], g), c = scalar_jets(f.c[2], g);
  std::vector<VecJet> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = {{a[i].v, b[i].v, c[i].v}, {a[i].d1, b[i].d1, c[i].d1}, {a[i].d2, b[i].d2, c[i].d2},
              {a[i].d3, b[i].d3, c[i].d3}};
  return out;
}

VecJet normalize_jet(const VecJet& j) {
  // n = |v|; u = v / n, differentiated three times.
  const double n = norm(j.v);
  const double n1 = dot(j.v, j.d1) / n;
  const double n2 = (dot(j.d1, j.d1) + dot(j.v, j.d2) - n1 * n1) / n;
  const double n3 = (3 * dot(j.d1, j.d2) + dot(j.v, j.d3) - 3 * n1 * n2) / n;
  VecJet u;
  u.v = j.v / n;
  u.d1 = (j.d1 - u.v * n1) / n;
  u.d2 = (j.d2 - u.d1 * (2 * n1) - u.v * n2) / n;
  u.d3 = (j.d3 - u.d2 * (3 * n1) - u.d1 * (3 * n2) - u.v * n3) / n;
  return u;
}

std::vector<VecJet> unit_jets(const VectorFunction& f, const Grid& g, const char* what, double tol) {
  auto jets = vector_jets(f, g);
  for (std::size_t i = 0; i < jets.size(); ++i) {
    const double n = norm(jets[i].v);
    if (!(std::abs(n - 1.0) <= tol))
      throw InvalidArgument(std::string(what) + " is not a unit vector at node " + std::to_string(i) +
                            " (norm " + std::to_string(n) + ")");
    jets[i] = normalize_jet(jets[i]);
  }
  return jets;
}

void require_arclength(const std::vector<VecJet>& curve, double tol) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double sp = norm(curve[i].d1);
    if (!(std::abs(sp - 1.0) <= tol))
      throw NotArclength("curve speed is " + std::to_string(sp) + ", parameter is not arclength", i);
  }
}

}  // namespace myller
