#include "myller/cli.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "myller/configuration.hpp"
#include "myller/fields.hpp"
#include "myller/nonholonomic.hpp"
#include "myller/surface.hpp"

namespace myller::cli {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
using expr::ScalarFunction;

std::string fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

// Typed access to one JSON object; every key read is recorded so leftovers can be rejected.
class Reader {
 public:
  Reader(const json& j, std::string ptr) : j_(&j), ptr_(std::move(ptr)) {
    if (!j.is_object()) throw SchemaError(ptr_, "expected an object");
  }

  std::string ptr(const std::string& key) const { return ptr_ + "/" + escape_token(key); }
  bool has(const std::string& key) const { return j_->contains(key); }

  const json& at(const std::string& key) {
    used_.insert(key);
    if (!j_->contains(key)) throw SchemaError(ptr(key), "required member is missing");
    return (*j_)[key];
  }

  Reader obj(const std::string& key) { return Reader(at(key), ptr(key)); }

  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw SchemaError(ptr(key), "expected a string");
    return v.get<std::string>();
  }

  ScalarFunction expr(const std::string& key, const std::vector<std::string>& vars) {
    const json& v = at(key);
    std::string text;
    if (v.is_string()) text = v.get<std::string>();
    else if (v.is_number()) text = v.dump();
    else throw SchemaError(ptr(key), "expected an expression string");
    try {
      return ScalarFunction::expression(text, vars);
    } catch (const ValidationError& e) {
      std::throw_with_nested(SchemaError(ptr(key), e.what()));
    }
  }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) throw SchemaError(ptr(key), "expected a finite number");
    return v.get<double>();
  }

  std::optional<double> opt_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  long integer(const std::string& key, long lo) {
    const json& v = at(key);
    if (!v.is_number_integer()) throw SchemaError(ptr(key), "expected an integer");
    const long n = v.get<long>();
    if (n < lo) throw SchemaError(ptr(key), "must be at least " + std::to_string(lo));
    return n;
  }

  std::vector<double> numbers(const std::string& key, std::size_t count) {
    const json& v = at(key);
    if (!v.is_array() || v.size() != count)
      throw SchemaError(ptr(key), "expected an array of " + std::to_string(count) + " numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
        throw SchemaError(ptr(key) + "/" + std::to_string(i), "expected a finite number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Vec3 vec3(const std::string& key) {
    const auto v = numbers(key, 3);
    return {v[0], v[1], v[2]};
  }

  std::optional<Vec3> opt_vec3(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return vec3(key);
  }

  std::array<double, 2> range(const std::string& key) {
    const auto v = numbers(key, 2);
    if (!(v[0] < v[1])) throw SchemaError(ptr(key), "range must satisfy lo < hi");
    return {v[0], v[1]};
  }

  std::string choice(const std::string& key, const std::vector<std::string>& allowed) {
    const std::string s = string(key);
    for (const auto& a : allowed)
      if (s == a) return s;
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw SchemaError(ptr(key), "'" + s + "' is not one of: " + list);
  }

  // Marks members handled elsewhere.
  void allow(const std::string& key) { used_.insert(key); }

  void finish() const {
    for (auto it = j_->begin(); it != j_->end(); ++it)
      if (!used_.count(it.key())) throw SchemaError(ptr(it.key()), "unknown member");
  }

 private:
  const json* j_;
  std::string ptr_;
  std::set<std::string> used_;
};

VectorFunction vector_function(Reader r, const std::string& var) {
  VectorFunction f;
  f.c[0] = r.expr("x", {var});
  f.c[1] = r.expr("y", {var});
  f.c[2] = r.expr("z", {var});
  r.finish();
  return f;
}

nh::DistributionField distribution(Reader& r) {
  nh::DistributionField D;
  const std::vector<std::string> xyz{"x", "y", "z"};
  D.pfaff.X = r.expr("X", xyz);
  D.pfaff.Y = r.expr("Y", xyz);
  D.pfaff.Z = r.expr("Z", xyz);
  D.axis = r.opt_vec3("axis");
  if (D.axis && norm(*D.axis) < 1e-12) throw SchemaError(r.ptr("axis"), "axis must be nonzero");
  if (r.has("mode"))
    D.mode = r.choice("mode", {"dual", "finite_difference"}) == "dual" ? nh::DerivativeMode::dual
                                                                       : nh::DerivativeMode::finite_difference;
  return D;
}

surface::SurfacePatch patch(Reader& r) {
  const std::vector<std::string> uv{"u", "v"};
  surface::SurfacePatch S;
  S.x = r.expr("x", uv);
  S.y = r.expr("y", uv);
  S.z = r.expr("z", uv);
  const auto u = r.range("u"), v = r.range("v");
  S.u0 = u[0];
  S.u1 = u[1];
  S.v0 = v[0];
  S.v1 = v[1];
  return S;
}

Frame frame_member(Reader r) {
  Frame f;
  if (r.has("origin")) f.origin = r.vec3("origin");
  if (r.has("e1")) f.e1 = r.vec3("e1");
  if (r.has("e2")) f.e2 = r.vec3("e2");
  if (r.has("e3")) f.e3 = r.vec3("e3");
  r.finish();
  if (!f.is_right_handed_orthonormal()) throw SchemaError("/frame", "frame must be right-handed orthonormal");
  return f;
}

Grid grid_of(const std::array<double, 2>& range, const Settings& s) { return Grid::uniform(range[0], range[1], s.grid); }

double tol_or(const Settings& s, double fallback) { return s.tol.value_or(fallback); }

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

using Solver = std::function<ResultTable(const Settings&)>;

Solver build_versor(Reader& r) {
  const auto curve = vector_function(r.obj("curve"), "s");
  const auto xi = vector_function(r.obj("xi"), "s");
  const auto s = r.range("s");
  return [=](const Settings& st) {
    const fields::VersorFieldOnCurve vf{curve, xi, grid_of(s, st)};
    const auto ruled = fields::ruled_classification(vf);
    const auto fd = fields::frenet_of_versor_field(vf);
    ResultTable t;
    t.columns = {"s", "K1", "K2", "a1", "a2", "a3"};
    for (std::size_t i = 0; i < fd.grid.size(); ++i)
      t.rows.push_back({fd.grid[i], fd.K1[i], fd.K2[i], fd.a1[i], fd.a2[i], fd.a3[i]});
    const double tol = tol_or(st, 1e-6);
    t.meta["tol"] = tol;
    t.summary["cylinder"] = ruled.cylinder;
    t.summary["director_plane"] = ruled.director_plane;
    t.summary["developable"] = ruled.developable;
    t.summary["concurrent"] = fields::versor_concurrence(fd, tol).concurrent;
    const auto img = fields::spherical_image(fd);
    t.summary["spherical_image_length"] = img.total_length;
    t.summary["great_circle"] = img.great_circle;
    return t;
  };
}

Solver build_plane_field(Reader& r) {
  const auto curve = vector_function(r.obj("curve"), "s");
  const auto nu = vector_function(r.obj("nu"), "s");
  const auto s = r.range("s");
  return [=](const Settings& st) {
    const auto pf = fields::plane_field_invariants(curve, nu, grid_of(s, st));
    ResultTable t;
    if (pf.framed) {
      t.columns = {"s", "chi1", "chi2", "b1", "b2", "b3"};
      for (std::size_t i = 0; i < pf.grid.size(); ++i)
        t.rows.push_back({pf.grid[i], pf.chi1[i], pf.chi2[i], pf.b1[i], pf.b2[i], pf.b3[i]});
    } else {
      t.columns = {"s", "chi1", "b1"};
      for (std::size_t i = 0; i < pf.grid.size(); ++i) t.rows.push_back({pf.grid[i], pf.chi1[i], pf.b1[i]});
    }
    const double tol = tol_or(st, 1e-6);
    t.meta["tol"] = tol;
    t.summary["framed"] = pf.framed;
    const std::pair<const char*, fields::PlanePredicate> preds[] = {
        {"lines_cross_curve", fields::PlanePredicate::lines_cross_curve},
        {"planes_parallel", fields::PlanePredicate::planes_parallel},
        {"characteristics_parallel", fields::PlanePredicate::characteristics_parallel},
        {"nu3_concurrent", fields::PlanePredicate::nu3_concurrent},
        {"orthogonal_trajectory", fields::PlanePredicate::orthogonal_trajectory}};
    for (const auto& [name, p] : preds) {
      try {
        t.summary[name] = fields::plane_predicate(pf, p, tol);
      } catch (const GeometricError&) {
        t.summary[name] = nullptr;
      }
    }
    return t;
  };
}

Solver build_myller(Reader& r) {
  const auto curve = vector_function(r.obj("curve"), "s");
  const auto xi = vector_function(r.obj("xi"), "s");
  const auto nu = vector_function(r.obj("nu"), "s");
  const auto s = r.range("s");
  return [=](const Settings& st) {
    const auto dd = config::darboux_invariants({curve, xi, nu, grid_of(s, st)});
    ResultTable t;
    t.columns = {"s", "c1", "c2", "c3", "G", "K", "T"};
    for (std::size_t i = 0; i < dd.grid.size(); ++i)
      t.rows.push_back({dd.grid[i], dd.c1[i], dd.c2[i], dd.c3[i], dd.G[i], dd.K[i], dd.T[i]});
    const double tol = tol_or(st, 1e-6);
    t.meta["tol"] = tol;
    t.summary["tangent"] = dd.tangent;
    try {
      t.summary["concurrent"] = config::myller_concurrence(dd, tol).concurrent;
    } catch (const GeometricError&) {
      t.summary["concurrent"] = nullptr;
    }
    return t;
  };
}

Solver build_tangent_myller(Reader& r) {
  const auto curve = vector_function(r.obj("curve"), "s");
  const auto nu = vector_function(r.obj("nu"), "s");
  const auto s = r.range("s");
  return [=](const Settings& st) {
    const auto tc = config::tangent_curve_invariants(curve, nu, grid_of(s, st));
    const double tol = tol_or(st, 1e-6);
    const auto ci = config::classify(tc.inv, tol);
    ResultTable t;
    t.columns = {"s", "kappa_g", "kappa_n", "tau_g"};
    for (std::size_t i = 0; i < ci.grid.size(); ++i)
      t.rows.push_back({ci.grid[i], ci.kappa_g[i], ci.kappa_n[i], ci.tau_g[i]});
    t.meta["tol"] = tol;
    t.summary["geodesic"] = ci.geodesic;
    t.summary["asymptotic"] = ci.asymptotic;
    t.summary["curvature_line"] = ci.curvature_line;
    return t;
  };
}

Solver build_surface(Reader& r) {
  const auto S = patch(r);
  const std::size_t n = r.has("probes") ? static_cast<std::size_t>(r.integer("probes", 1)) : 5;
  return [=](const Settings&) {
    ResultTable t;
    t.columns = {"u", "v", "E", "F", "G", "L", "M", "N", "H", "Kt", "gw_residual"};
    double gw = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double u = S.u0 + (S.u1 - S.u0) * (i + 1) / (n + 1);
        const double v = S.v0 + (S.v1 - S.v0) * (j + 1) / (n + 1);
        const auto f = surface::fundamental_forms(S, u, v);
        const double res = surface::gauss_weingarten_residual(S, u, v);
        gw = std::max(gw, res);
        t.rows.push_back({u, v, f.E, f.F, f.G1, f.L, f.M, f.N, f.H, f.Kt, res});
      }
    t.meta["probes"] = n;
    t.summary["max_gw_residual"] = gw;
    t.summary["tchebishev"] = surface::tchebishev_test(S, n, n).is_tchebishev;
    return t;
  };
}

std::vector<Vec3> probe_points(Reader& r) {
  if (r.has("points") && r.has("box")) throw SchemaError(r.ptr("box"), "give either points or box, not both");
  if (r.has("points")) {
    const json& v = r.at("points");
    if (!v.is_array() || v.empty()) throw SchemaError(r.ptr("points"), "expected a nonempty array of points");
    std::vector<Vec3> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = r.ptr("points") + "/" + std::to_string(i);
      if (!v[i].is_array() || v[i].size() != 3) throw SchemaError(p, "expected [x, y, z]");
      for (std::size_t k = 0; k < 3; ++k)
        if (!v[i][k].is_number()) throw SchemaError(p + "/" + std::to_string(k), "expected a number");
      out.push_back({v[i][0].get<double>(), v[i][1].get<double>(), v[i][2].get<double>()});
    }
    return out;
  }
  if (r.has("box")) {
    Reader b = r.obj("box");
    const Vec3 lo = b.vec3("lo"), hi = b.vec3("hi");
    const std::size_t n = b.has("n") ? static_cast<std::size_t>(b.integer("n", 1)) : 3;
    b.finish();
    return nh::probe_lattice(lo, hi, n);
  }
  return {};
}

Solver build_nonholonomic(Reader& r) {
  const auto D = distribution(r);
  auto points = probe_points(r);
  if (points.empty()) points = {{0, 0, 0}};
  return [=](const Settings& st) {
    nh::DistributionField Df = D;
    Df.fd_step = st.fd_step;
    ResultTable t;
    t.columns = {"x",  "y", "z",  "p1", "p2", "q1",    "q2",    "r1",    "r2",
                 "Tm", "H", "Kt", "Kg", "Tt", "invR1", "invR2", "invT1", "invT2"};
    for (const Vec3& p : points) {
      const auto rc = nh::rotation_coefficients(Df, p);
      const auto n = nh::invariants_of(rc);
      const auto e = nh::extremal_of(rc);
      t.rows.push_back({p.x, p.y, p.z, rc.p1, rc.p2, rc.q1, rc.q2, rc.r1, rc.r2, n.Tm, n.H, n.Kt, n.Kg, n.Tt,
                        e.invR1, e.invR2, e.invT1, e.invT2});
    }
    const double tol = tol_or(st, 1e-7);
    t.meta["tol"] = tol;
    const auto in = nh::integrability(Df, points, tol);
    t.summary["integrable"] = in.integrable;
    t.summary["max_abs_Tm"] = max_abs(in.Tm);
    return t;
  };
}

Solver build_reconstruct(Reader& r) {
  const std::string mode = r.choice("mode", {"versor", "configuration"});
  Reader p = r.obj("profile");
  const std::vector<std::string> s_var{"s"};
  std::optional<fields::VersorProfile> vp;
  std::optional<config::DarbouxProfile> dp;
  if (mode == "versor") {
    vp = fields::VersorProfile{p.expr("K1", s_var), p.expr("K2", s_var), p.expr("a1", s_var), p.expr("a2", s_var),
                               p.expr("a3", s_var)};
  } else {
    dp = config::DarbouxProfile{p.expr("c1", s_var), p.expr("c2", s_var), p.expr("c3", s_var),
                                p.expr("G", s_var),  p.expr("K", s_var),  p.expr("T", s_var)};
  }
  p.finish();
  const auto s = r.range("s");
  const Frame init = r.has("frame") ? frame_member(r.obj("frame")) : Frame{};
  return [=](const Settings& st) {
    const Grid g = grid_of(s, st);
    FramedCurve fc;
    std::vector<Vec3> xi;
    if (vp) {
      const auto rec = fields::reconstruct_versor_field(*vp, init, g);
      fc = rec.curve;
      xi = rec.xi;
    } else {
      fc = config::reconstruct_configuration(*dp, init, g);
      for (const auto& f : fc.frames) xi.push_back(f.e1);
    }
    const auto pos = fc.positions();
    ResultTable t;
    t.columns = {"s", "x", "y", "z", "xi_x", "xi_y", "xi_z"};
    for (std::size_t i = 0; i < g.size(); ++i)
      t.rows.push_back({g[i], pos[i].x, pos[i].y, pos[i].z, xi[i].x, xi[i].y, xi[i].z});
    t.summary["max_orthonormality_defect"] = fc.max_orthonormality_defect();
    t.summary["endpoint_gap"] = norm(pos.back() - pos.front());
    return t;
  };
}

Solver build_transport(Reader& r) {
  const std::string method = r.choice("method", {"myller", "levi-civita", "nonholonomic"});
  const auto V = r.numbers("V", 2);
  auto finish_table = [](ResultTable& t, const std::vector<double>& V1, const std::vector<double>& V2) {
    double drift = 0;
    const double n0 = std::hypot(V1.front(), V2.front());
    for (std::size_t i = 0; i < V1.size(); ++i) drift = std::max(drift, std::abs(std::hypot(V1[i], V2[i]) - n0));
    t.summary["max_norm_drift"] = drift;
  };
  if (method == "myller") {
    const auto curve = vector_function(r.obj("curve"), "s");
    const auto xi = vector_function(r.obj("xi"), "s");
    const auto nu = vector_function(r.obj("nu"), "s");
    const auto s = r.range("s");
    return [=](const Settings& st) {
      const auto dd = config::darboux_invariants({curve, xi, nu, grid_of(s, st)});
      const auto tr = config::myller_transport(dd, V[0], V[1]);
      ResultTable t;
      t.columns = {"s", "V1", "V2", "x", "y", "z"};
      for (std::size_t i = 0; i < dd.grid.size(); ++i)
        t.rows.push_back({dd.grid[i], tr.V1[i], tr.V2[i], tr.spatial[i].x, tr.spatial[i].y, tr.spatial[i].z});
      finish_table(t, tr.V1, tr.V2);
      return t;
    };
  }
  if (method == "levi-civita") {
    Reader sr = r.obj("surface");
    const auto S = patch(sr);
    sr.finish();
    Reader cr = r.obj("curve");
    const auto u = cr.expr("u", {"t"}), v = cr.expr("v", {"t"});
    cr.finish();
    const auto trange = r.range("t");
    return [=](const Settings& st) {
      const auto tr = surface::levi_civita_transport(S, {u, v, grid_of(trange, st)}, V[0], V[1]);
      ResultTable t;
      t.columns = {"t", "V1", "V2", "norm2"};
      for (std::size_t i = 0; i < tr.grid.size(); ++i) t.rows.push_back({tr.grid[i], tr.V1[i], tr.V2[i], tr.norm2[i]});
      double drift = 0;
      for (double n2 : tr.norm2) drift = std::max(drift, std::abs(std::sqrt(n2) - std::sqrt(tr.norm2.front())));
      t.summary["max_norm_drift"] = drift;
      return t;
    };
  }
  const auto D = distribution(r);
  const auto curve = vector_function(r.obj("curve"), "s");
  const auto s = r.range("s");
  return [=](const Settings& st) {
    nh::DistributionField Df = D;
    Df.fd_step = st.fd_step;
    const Grid g = grid_of(s, st);
    const auto tr = nh::transport_nh(Df, curve, g, V[0], V[1]);
    ResultTable t;
    t.columns = {"s", "V1", "V2", "x", "y", "z"};
    for (std::size_t i = 0; i < g.size(); ++i)
      t.rows.push_back({g[i], tr.V1[i], tr.V2[i], tr.spatial[i].x, tr.spatial[i].y, tr.spatial[i].z});
    finish_table(t, tr.V1, tr.V2);
    return t;
  };
}

Solver build_krein(Reader& r) {
  const auto curve = vector_function(r.obj("curve"), "s");
  const auto xi = vector_function(r.obj("xi"), "s");
  const auto nu = vector_function(r.obj("nu"), "s");
  const auto s = r.range("s");
  return [=](const Settings& st) {
    const Grid g = grid_of(s, st);
    const auto dd = config::darboux_invariants({curve, xi, nu, g});
    const auto kr = config::krein_area(dd, fields::plane_field_invariants(curve, nu, g));
    ResultTable t;
    t.columns = {"omega_direct", "omega_formula", "integral_G", "integral_dsigma"};
    t.rows.push_back({kr.omega_direct, kr.omega_formula, kr.integral_G, kr.integral_dsigma});
    t.summary["jacobi_flag"] = kr.jacobi_flag;
    t.summary["sigma_winding"] = kr.sigma_winding;
    t.summary["pole"] = {kr.pole.x, kr.pole.y, kr.pole.z};
    t.summary["pole_winding"] = kr.pole_winding;
    return t;
  };
}

Solver build_geodesic(Reader& r) {
  const auto D = distribution(r);
  const Vec3 start = r.vec3("start"), dir = r.vec3("direction");
  const double length = r.number("length");
  if (!(length > 0)) throw SchemaError(r.ptr("length"), "length must be positive");
  return [=](const Settings& st) {
    nh::DistributionField Df = D;
    Df.fd_step = st.fd_step;
    const auto gt = nh::geodesic_trace(Df, start, dir, length, st.grid);
    ResultTable t;
    t.columns = {"s", "x", "y", "z", "kappa_g", "tau_g", "alpha"};
    for (std::size_t i = 0; i < gt.grid.size(); ++i)
      t.rows.push_back({gt.grid[i], gt.r[i].x, gt.r[i].y, gt.r[i].z, gt.kappa_g[i], gt.tau_g[i], gt.alpha[i]});
    t.summary["max_kappa_g"] = gt.max_kappa_g;
    t.summary["max_tangency"] = gt.max_tangency;
    return t;
  };
}

Solver build_indicatrix(Reader& r) {
  const std::string source = r.choice("source", {"curvatures", "nonholonomic"});
  if (source == "curvatures") {
    const std::string type = r.choice("type", {"dupin", "bonnet", "normal_line", "torsion_line"});
    const double k1 = r.number("invR1"), k2 = r.number("invR2");
    const double theta = r.opt_number("theta").value_or(0);
    const auto kind = type == "dupin"         ? surface::IndicatrixKind::dupin
                      : type == "bonnet"      ? surface::IndicatrixKind::bonnet
                      : type == "normal_line" ? surface::IndicatrixKind::normal_line
                                              : surface::IndicatrixKind::torsion_line;
    return [=](const Settings& st) {
      std::vector<double> angles;
      for (std::size_t i = 0; i < st.grid; ++i) angles.push_back(two_pi * i / st.grid);
      const auto ind = surface::indicatrix(k1, k2, kind, angles, theta);
      ResultTable t;
      t.columns = {"angle", "x", "y"};
      for (std::size_t i = 0; i < ind.angle.size(); ++i) t.rows.push_back({ind.angle[i], ind.x[i], ind.y[i]});
      t.summary["skipped"] = ind.skipped.size();
      t.summary["max_conic_residual"] = ind.max_conic_residual;
      return t;
    };
  }
  const std::string type = r.choice("type", {"dupin", "bonnet"});
  const auto D = distribution(r);
  const Vec3 p = r.vec3("point");
  return [=](const Settings& st) {
    nh::DistributionField Df = D;
    Df.fd_step = st.fd_step;
    std::vector<double> angles;
    for (std::size_t i = 0; i < st.grid; ++i) angles.push_back(two_pi * i / st.grid);
    const auto eb = nh::euler_bonnet_nh(Df, p, angles);
    const auto& ind = type == "dupin" ? eb.dupin : eb.bonnet;
    ResultTable t;
    t.columns = {"angle", "x", "y"};
    for (std::size_t i = 0; i < ind.angle.size(); ++i) t.rows.push_back({ind.angle[i], ind.x[i], ind.y[i]});
    t.summary["skipped"] = ind.skipped.size();
    t.summary["max_conic_residual"] = ind.max_conic_residual;
    t.summary["umbilic"] = eb.umbilic;
    t.summary["torsion_degenerate"] = eb.torsion_degenerate;
    t.summary["invR1"] = eb.ext.invR1;
    t.summary["invR2"] = eb.ext.invR2;
    t.summary["invT1"] = eb.ext.invT1;
    t.summary["invT2"] = eb.ext.invT2;
    return t;
  };
}

Solver build_classify(Reader& r) {
  const auto D = distribution(r);
  auto points = probe_points(r);
  if (points.empty()) points = nh::probe_lattice({-1, -1, -1}, {1, 1, 1});
  return [=](const Settings& st) {
    nh::DistributionField Df = D;
    Df.fd_step = st.fd_step;
    const auto c = nh::classify_special(Df, points);
    ResultTable t;
    t.columns = {"max_p2", "max_q1", "max_p1_minus_q2", "max_p2_plus_q1", "min_abs_Tm",
                 "sphere_kg_residual", "sphere_tt_residual", "plane_kg", "plane_h"};
    t.rows.push_back({c.max_p2, c.max_q1, c.max_p1_minus_q2, c.max_p2_plus_q1, c.min_abs_Tm, c.sphere_kg_residual,
                      c.sphere_tt_residual, c.plane_kg, c.plane_h});
    t.meta["probes"] = points.size();
    t.summary["is_nh_plane"] = c.is_nh_plane;
    t.summary["is_nh_sphere"] = c.is_nh_sphere;
    return t;
  };
}

Settings read_options(Reader r) {
  Settings s;
  if (r.has("grid")) s.grid = static_cast<std::size_t>(r.integer("grid", 5));
  if (r.has("fd_step")) {
    s.fd_step = r.number("fd_step");
    if (!(s.fd_step > 0)) throw SchemaError(r.ptr("fd_step"), "must be positive");
  }
  if (r.has("tol")) {
    s.tol = r.number("tol");
    if (!(*s.tol > 0)) throw SchemaError(r.ptr("tol"), "must be positive");
  }
  if (r.has("format")) s.format = r.choice("format", {"csv", "json"});
  if (r.has("output")) s.output = r.string("output");
  r.finish();
  return s;
}

std::string default_format(const std::string& kind) { return kind == "classify" ? "json" : "csv"; }

std::string render(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string usage() {
  std::string s = "usage: myller <subcommand> --input PATH [--output PATH] [--grid N] [--fd-step H] [--tol T] "
                  "[--format csv|json]\nsubcommands:";
  for (const auto& k : kinds()) s += " " + k;
  return s + " invariants\n";
}

}  // namespace

const std::vector<std::string>& kinds() {
  static const std::vector<std::string> k{"versor", "plane-field", "myller",      "tangent-myller",
                                          "surface", "nonholonomic", "reconstruct", "transport",
                                          "krein",   "geodesic",    "indicatrix",  "classify"};
  return k;
}

ProblemSpec parse_spec(const std::string& text) {
  ProblemSpec spec;
  spec.hash = fnv1a(text);
  try {
    spec.doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
  Reader r(spec.doc, "");
  spec.kind = r.choice("kind", kinds());
  r.allow("description");
  if (r.has("options")) spec.options = read_options(r.obj("options"));
  const std::string& k = spec.kind;
  if (k == "versor") spec.solve = build_versor(r);
  else if (k == "plane-field") spec.solve = build_plane_field(r);
  else if (k == "myller") spec.solve = build_myller(r);
  else if (k == "tangent-myller") spec.solve = build_tangent_myller(r);
  else if (k == "surface") spec.solve = build_surface(r);
  else if (k == "nonholonomic") spec.solve = build_nonholonomic(r);
  else if (k == "reconstruct") spec.solve = build_reconstruct(r);
  else if (k == "transport") spec.solve = build_transport(r);
  else if (k == "krein") spec.solve = build_krein(r);
  else if (k == "geodesic") spec.solve = build_geodesic(r);
  else if (k == "indicatrix") spec.solve = build_indicatrix(r);
  else spec.solve = build_classify(r);
  r.finish();
  return spec;
}

ProblemSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return parse_spec(ss.str());
}

ResultTable solve(const ProblemSpec& spec, const Settings& settings) {
  ResultTable t = spec.solve(settings);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i].size() != t.columns.size()) throw InvalidArgument("ragged result table");
    for (std::size_t j = 0; j < t.columns.size(); ++j)
      if (!std::isfinite(t.rows[i][j]))
        throw NonFiniteResult("column '" + t.columns[j] + "', row " + std::to_string(i));
  }
  ojson meta;
  meta["tool"] = "myller";
  meta["version"] = version;
  meta["kind"] = spec.kind;
  meta["spec_hash"] = spec.hash;
  meta["grid"] = settings.grid;
  meta["fd_step"] = settings.fd_step;
  for (auto it = t.meta.begin(); it != t.meta.end(); ++it) meta[it.key()] = it.value();
  t.meta = std::move(meta);
  return t;
}

void emit(const ResultTable& table, const std::string& format, std::ostream& out) {
  if (format == "csv") {
    std::string s;
    for (std::size_t j = 0; j < table.columns.size(); ++j) s += (j ? "," : "") + table.columns[j];
    s += '\n';
    for (const auto& row : table.rows) {
      for (std::size_t j = 0; j < row.size(); ++j) s += (j ? "," : "") + render(row[j]);
      s += '\n';
    }
    out << s;
  } else if (format == "json") {
    ojson j;
    j["columns"] = table.columns;
    j["rows"] = table.rows;
    j["meta"] = table.meta;
    for (auto it = table.summary.begin(); it != table.summary.end(); ++it) j[it.key()] = it.value();
    out << j.dump(2) << '\n';
  } else {
    throw InvalidArgument("unknown format '" + format + "'");
  }
  if (!out) throw IoError("write failure");
}

void emit(const ResultTable& table, const std::string& format, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  emit(table, format, f);
  f.flush();
  if (!f) throw IoError("write failure on '" + path + "'");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Invariants of Myller configurations, surfaces and nonholonomic distributions", "myller"};
  app.require_subcommand(1);
  std::string input, output, format;
  std::size_t grid = 0;
  double fd_step = 0, tol = 0;
  std::vector<std::string> names = kinds();
  names.push_back("invariants");
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name, name == "invariants" ? "alias of myller" : "solve a problem of kind " + name);
    sub->add_option("--input", input, "problem spec (JSON)")->required();
    sub->add_option("--output", output, "output path (default: standard output)");
    sub->add_option("--grid", grid, "grid nodes (default 1024)")->check(CLI::Range(std::size_t{5}, std::size_t{1} << 24));
    sub->add_option("--fd-step", fd_step, "relative finite-difference step")->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "classification tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << usage();
    return static_cast<int>(ErrorClass::validation);
  }
  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  const std::string kind = name == "invariants" ? "myller" : name;
  try {
    const ProblemSpec spec = load_spec(input);
    if (spec.kind != kind) throw SchemaError("/kind", "spec kind '" + spec.kind + "' does not match '" + name + "'");
    Settings s = spec.options;
    if (sub->count("--grid")) s.grid = grid;
    if (sub->count("--fd-step")) s.fd_step = fd_step;
    if (sub->count("--tol")) s.tol = tol;
    if (sub->count("--format")) s.format = format;
    if (sub->count("--output")) s.output = output;
    if (s.format.empty()) s.format = default_format(kind);
    const ResultTable t = solve(spec, s);
    if (s.output.empty()) emit(t, s.format, out);
    else emit(t, s.format, s.output);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    try {
      std::rethrow_if_nested(e);
    } catch (const std::exception& inner) {
      err << "  caused by: " << inner.what() << '\n';
    }
    return static_cast<int>(e.error_class());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorClass::validation);
  }
}

}  // namespace myller::cli
