// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "myller/cli.hpp"
#include "myller/configuration.hpp"
#include "myller/expr.hpp"
#include "myller/fields.hpp"
#include "myller/nonholonomic.hpp"
#include "myller/surface.hpp"

using namespace myller;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records value <= bound under a label.
  void le(const std::string& label, double value, double bound) {
    const bool ok = std::isfinite(value) && value <= bound;
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << label << "=" << fmt(value) << (ok ? " <= " : " > ") << fmt(bound);
  }
  void ge(const std::string& label, double value, double bound) {
    const bool ok = std::isfinite(value) && value >= bound;
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << label << "=" << fmt(value) << (ok ? " >= " : " < ") << fmt(bound);
  }
  void flag(const std::string& label, bool ok) {
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << label << (ok ? " ok" : " FAILED");
  }
  static std::string fmt(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", x);
    return b;
  }
};

std::string lit(double x) {
  char b[40];
  std::snprintf(b, sizeof b, "(%.17g)", x);
  return b;
}

expr::ScalarFunction fs_(const std::string& t) { return expr::ScalarFunction::expression(t, {"s"}); }

VectorFunction vf(const std::string& x, const std::string& y, const std::string& z) {
  return VectorFunction::expressions(x, y, z);
}

double max_abs_diff(const std::vector<double>& v, double c) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x - c));
  return m;
}

// Latitude at polar angle u of the unit sphere, arclength parametrized, with its unit tangent.
VectorFunction latitude(double u) {
  const std::string r = lit(std::sin(u)), a = "(s/" + lit(std::sin(u)) + ")";
  return vf(r + "*cos" + a, r + "*sin" + a, lit(std::cos(u)));
}
VectorFunction latitude_tangent(double u) {
  const std::string a = "(s/" + lit(std::sin(u)) + ")";
  return vf("-sin" + a, "cos" + a, "0");
}

nh::DistributionField field(const std::string& X, const std::string& Y, const std::string& Z) {
  nh::DistributionField D;
  D.pfaff = nh::PfaffForm::expressions(X, Y, Z);
  return D;
}

// Quadratic-plus-trigonometric Pfaff form with seeded coefficients.
nh::DistributionField random_form(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  auto comp = [&](double bias) {
    return lit(bias + 0.3 * u(rng)) + " + " + lit(u(rng)) + "*x + " + lit(u(rng)) + "*y + " + lit(u(rng)) +
           "*z + " + lit(0.5 * u(rng)) + "*x*y + " + lit(0.5 * u(rng)) + "*z^2 + " + lit(0.5 * u(rng)) +
           "*sin(x+z)";
  };
  const std::string X = comp(0.4), Y = comp(-0.3), Z = comp(1.0);
  return field(X, Y, Z);
}

std::vector<double> angle_grid(int n) {
  std::vector<double> a;
  for (int i = 0; i < n; ++i) a.push_back(two_pi * i / n);
  return a;
}

const std::string data_dir = MYLLER_DATA_DIR;
const std::string cli_path = MYLLER_CLI;

std::vector<fs::path> shipped_specs() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(data_dir + "/specs"))
    if (e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string shell_quote(const std::string& s) {
  std::string r = "'";
  for (char c : s) r += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return r + "'";
}

int run_cli(const std::string& args) {
  const std::string cmd = shell_quote(cli_path) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

// ---------------------------------------------------------------------------

void c1_reconstruction(Outcome& o) {
  const Grid g = Grid::uniform(0, 2 * pi, 2048);
  const auto rec = fields::reconstruct_versor_field({fs_("1"), fs_("0.5"), fs_("1"), fs_("0"), fs_("0")}, Frame{}, g);
  const auto back = fields::frenet_of_versor_field(fields::as_versor_field(rec));
  double e = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    e += std::pow(back.K1[i] - 1, 2) + std::pow(back.K2[i] - 0.5, 2) + std::pow(back.a1[i] - 1, 2) +
         std::pow(back.a2[i], 2) + std::pow(back.a3[i], 2);
  o.le("versor rms", std::sqrt(e / g.size()), 1e-6);
  o.le("versor frame defect", rec.curve.max_orthonormality_defect(), 1e-12);

  const auto fc = config::reconstruct_configuration({fs_("1"), fs_("0"), fs_("0"), fs_("1"), fs_("0.3"), fs_("0.2")},
                                                    Frame{}, g);
  const auto dd = config::darboux_invariants(config::as_configuration(fc));
  double c = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    c += std::pow(dd.G[i] - 1, 2) + std::pow(dd.K[i] - 0.3, 2) + std::pow(dd.T[i] - 0.2, 2) +
         std::pow(dd.c1[i] - 1, 2) + std::pow(dd.c2[i], 2) + std::pow(dd.c3[i], 2);
  o.le("configuration rms", std::sqrt(c / g.size()), 1e-6);
  o.le("configuration frame defect", fc.max_orthonormality_defect(), 1e-12);
}

void c2_circle(Outcome& o) {
  auto gap = [](std::size_t n) {
    const Grid g = Grid::uniform(0, 2 * pi, n);
    const std::vector<double> one(n, 1.0), z(n, 0.0);
    const std::vector<Vec3> v(n, Vec3{1, 0, 0});
    const auto fc = evolve_frame(one, z, z, v, Frame{}, g);
    return norm(fc.frames.back().origin - fc.frames.front().origin);
  };
  o.le("gap n=2048", gap(2048), 1e-9);
  // Halving 2 pi / 64 -> 2 pi / 128 -> 2 pi / 256, well above roundoff.
  const double e1 = gap(65), e2 = gap(129), e3 = gap(257);
  o.ge("order 64->128", std::log2(e1 / e2), 3.8);
  o.ge("order 128->256", std::log2(e2 / e3), 3.8);
}

void c3_normal_relation(Outcome& o) {
  const double u0 = pi / 3;
  const VectorFunction lat = latitude(u0), tan = latitude_tangent(u0);
  const Grid gl = Grid::uniform(0, two_pi * std::sin(u0), 513);
  const auto dl = config::darboux_invariants({lat, tan, lat, gl});
  const auto nl = config::normal_relation(dl, fields::plane_field_invariants(lat, lat, gl));
  double rl = 0;
  for (double x : nl.k2t2) rl = std::max(rl, std::abs(x));
  o.le("latitude", rl, 1e-7);

  const VectorFunction helix = vf("cos(s/sqrt(2))", "sin(s/sqrt(2))", "s/sqrt(2)");
  const VectorFunction ht = vf("-sin(s/sqrt(2))/sqrt(2)", "cos(s/sqrt(2))/sqrt(2)", "1/sqrt(2)");
  const VectorFunction hn = vf("-cos(s/sqrt(2))", "-sin(s/sqrt(2))", "0");
  const Grid gh = Grid::uniform(0, 8, 401);
  const auto dh = config::darboux_invariants({helix, ht, hn, gh});
  const auto nh_ = config::normal_relation(dh, fields::plane_field_invariants(helix, hn, gh));
  double rh = 0;
  for (double x : nh_.k2t2) rh = std::max(rh, std::abs(x));
  o.le("helix", rh, 1e-7);
}

// Norm and angle drift of a transported pair from a table with V1, V2 (and norm2 under a metric).
void transport_drift(Outcome& o, const fs::path& spec) {
  auto run_with = [&](double a, double b) {
    nlohmann::json doc = read_json(spec);
    doc["V"] = {a, b};
    const auto ps = cli::parse_spec(doc.dump());
    return cli::solve(ps, ps.options);
  };
  const auto ta = run_with(1, 0), tb = run_with(0.6, 0.8), tab = run_with(1.6, 0.8);
  const auto col = [](const cli::ResultTable& t, const std::string& name) {
    const auto it = std::find(t.columns.begin(), t.columns.end(), name);
    return it == t.columns.end() ? -1L : static_cast<long>(it - t.columns.begin());
  };
  const long n2 = col(ta, "norm2"), v1 = col(ta, "V1"), v2 = col(ta, "V2");
  auto sq = [&](const cli::ResultTable& t, std::size_t i) {
    if (n2 >= 0) return t.rows[i][n2];
    return t.rows[i][v1] * t.rows[i][v1] + t.rows[i][v2] * t.rows[i][v2];
  };
  double norm_drift = 0, angle_drift = 0;
  double angle0 = 0, na0 = 0, nb0 = 0;
  for (std::size_t i = 0; i < ta.rows.size(); ++i) {
    const double na = std::sqrt(sq(ta, i)), nb = std::sqrt(sq(tb, i));
    // Polarization: the transport is linear, so V(a+b) = V(a) + V(b).
    const double ip = (sq(tab, i) - sq(ta, i) - sq(tb, i)) / 2;
    const double ang = std::acos(std::clamp(ip / (na * nb), -1.0, 1.0));
    if (i == 0) angle0 = ang, na0 = na, nb0 = nb;
    norm_drift = std::max({norm_drift, std::abs(na - na0), std::abs(nb - nb0)});
    angle_drift = std::max(angle_drift, std::abs(ang - angle0));
  }
  const std::string name = spec.stem().string();
  o.le(name + " norm", norm_drift, 1e-10);
  o.le(name + " angle", angle_drift, 1e-10);
}

void c4_transport(Outcome& o) {
  for (const auto& p : shipped_specs())
    if (read_json(p).value("kind", "") == "transport") transport_drift(o, p);

  const double u0 = pi / 3;
  const Grid g = Grid::uniform(0, two_pi * std::sin(u0), 2048);
  const auto dd = config::darboux_invariants({latitude(u0), latitude_tangent(u0), latitude(u0), g});
  o.le("G - cot u0", max_abs_diff(dd.G, 1 / std::tan(u0)), 1e-9);
  const auto mt = config::myller_transport(dd, 1, 0);
  const double hol_m = std::abs(std::atan2(-mt.V2.back(), mt.V1.back()));
  o.le("Myller holonomy - pi", std::abs(hol_m - pi), 1e-6);

  const auto sphere =
      surface::SurfacePatch::expressions("sin(u)*cos(v)", "sin(u)*sin(v)", "cos(u)", 0.01, 3.13, -7, 7);
  const surface::SurfaceCurve lat{expr::ScalarFunction::expression(lit(u0), {"t"}),
                                  expr::ScalarFunction::expression("t", {"t"}), Grid::uniform(0, two_pi, 2048)};
  const auto lc = surface::levi_civita_transport(sphere, lat, 1, 0);
  const auto f = surface::fundamental_forms(sphere, u0, 0);
  const double hol_lc = std::abs(surface::first_form_angle(f, {lc.V1.front(), lc.V2.front()},
                                                          {lc.V1.back(), lc.V2.back()}));
  o.le("Christoffel holonomy - pi", std::abs(hol_lc - pi), 1e-6);
  o.le("route disagreement", std::abs(hol_m - hol_lc), 1e-6);
}

void c5_krein(Outcome& o) {
  const Grid g = Grid::uniform(0, two_pi, 2048);
  const auto circle = vf("cos(s)", "sin(s)", "0"), tan = vf("-sin(s)", "cos(s)", "0"),
             inward = vf("-cos(s)", "-sin(s)", "0");
  const auto kc = config::krein_area(config::darboux_invariants({circle, tan, inward, g}),
                                     fields::plane_field_invariants(circle, inward, g));
  o.le("circle |direct - 2pi|", std::abs(kc.omega_direct - two_pi), 1e-5);
  o.le("circle |formula - 2pi|", std::abs(kc.omega_formula - two_pi), 1e-5);

  for (double u : {pi / 6, pi / 3}) {
    const Grid gl = Grid::uniform(0, two_pi * std::sin(u), 2048);
    const auto c = latitude(u);
    const auto kr = config::krein_area(config::darboux_invariants({c, latitude_tangent(u), c, gl}),
                                       fields::plane_field_invariants(c, c, gl));
    const std::string tag = u < 1 ? "pi/6" : "pi/3";
    o.le("latitude " + tag + " |direct - cap|", std::abs(kr.omega_direct - two_pi * (1 - std::cos(u))), 1e-5);
    o.le("latitude " + tag + " |direct - formula|", std::abs(kr.omega_direct - kr.omega_formula), 1e-5);
  }
}

void c6_surface(Outcome& o) {
  using namespace surface;
  const auto torus = SurfacePatch::expressions("(2+0.5*cos(u))*cos(v)", "(2+0.5*cos(u))*sin(v)", "0.5*sin(u)",
                                               -10, 10, -10, 10);
  const auto helicoid = SurfacePatch::expressions("u*cos(v)", "u*sin(v)", "v", -3, 3, -10, 10);
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> U(-1, 1), A(-pi, pi);
  double gw = 0, ksym = 0, tas = 0, prod = 0, be = 0;
  for (int i = 1; i <= 5; ++i)
    for (int j = 1; j <= 5; ++j) {
      const double u = two_pi * i / 6, v = two_pi * j / 6;
      gw = std::max(gw, gauss_weingarten_residual(torus, u, v));
      const FormData f = fundamental_forms(torus, u, v);
      for (int k = 0; k < 4; ++k) {
        const Dir a{U(rng), U(rng)}, b{U(rng), U(rng)};
        ksym = std::max(ksym, std::abs(K_pair(f, a, b) - K_pair(f, b, a)));
        tas = std::max(tas, std::abs(t_asym(f, a, b)));
        const auto r = identity_residuals(torus, u, v, A(rng), A(rng));
        prod = std::max(prod, std::abs(r.product_identity));
        be = std::max(be, std::abs(r.beltrami_enneper));
      }
    }
  o.le("Gauss-Weingarten", gw, 1e-7);
  o.le("K symmetry", ksym, 1e-10);
  o.le("T antisymmetric part", tas, 1e-8);
  o.le("product identity", prod, 1e-8);
  o.le("Beltrami-Enneper", be, 1e-8);

  double hel = 0;
  for (int k = 0; k < 50; ++k) {
    const FormData f = fundamental_forms(helicoid, 2 * U(rng), 3 * U(rng));
    const Dir a{U(rng), U(rng)}, b{U(rng), U(rng)};
    hel = std::max(hel, std::abs(T_pair(f, a, b) - T_pair(f, b, a)));
  }
  o.le("helicoid T symmetry", hel, 1e-8);
}

void c7_euler_bonnet(Outcome& o) {
  using namespace surface;
  const auto cyl = SurfacePatch::expressions("2*cos(u)", "2*sin(u)", "v", -10, 10, -10, 10);
  const FormData f = fundamental_forms(cyl, 0.3, 0.1);
  double kn = 0;
  for (double th : {0.0, pi / 6, pi / 4, pi / 2}) {
    const Dir d = principal_angle_dir(f, th);
    kn = std::max(kn, std::abs(std::abs(K_pair(f, d, d)) - std::cos(th) * std::cos(th) / 2));
  }
  o.le("|kappa_n| - cos^2/2", kn, 1e-9);
  double tmax = -1, tmin = 1, amax = 0, amin = 0;
  for (int k = -2000; k <= 2000; ++k) {
    const double th = pi / 2 * k / 2000;
    const Dir d = principal_angle_dir(f, th);
    const double t = T_pair(f, d, d);
    if (t > tmax) tmax = t, amax = th;
    if (t < tmin) tmin = t, amin = th;
  }
  o.le("|max tau_g - 1/4|", std::abs(tmax - 0.25), 1e-9);
  o.le("|min tau_g + 1/4|", std::abs(tmin + 0.25), 1e-9);
  o.le("extremum angles - pi/4", std::max(std::abs(std::abs(amax) - pi / 4), std::abs(std::abs(amin) - pi / 4)), 1e-9);
  o.flag("extrema at opposite angles", std::abs(amax + amin) < 1e-9);
}

void c8_heisenberg(Outcome& o) {
  const auto heis = field("-y", "x", "1");
  const nh::NhInvariants n = nh::scalar_invariants(heis, {0, 0, 0});
  o.le("|H|", std::abs(n.H), 1e-6);
  o.le("|Kg|", std::abs(n.Kg), 1e-6);
  o.le("||Tm| - 2|", std::abs(std::abs(n.Tm) - 2), 1e-5);
  o.le("|Tt - Tm^2/4|", std::abs(n.Tt - n.Tm * n.Tm / 4), 1e-5);
  const auto sc = nh::classify_special(heis, nh::probe_lattice({-1, -1, -1}, {1, 1, 1}));
  o.flag("nonholonomic plane", sc.is_nh_plane);
  const auto gt = nh::geodesic_trace(heis, {0, 0, 0}, {1, 0, 0}, 5, 1024);
  double dev = 0;
  for (const Vec3& r : gt.r) dev = std::max(dev, std::hypot(r.y, r.z));
  o.le("geodesic distance to x-axis", dev, 1e-8);
}

void c9_circle(Outcome& o) {
  const std::vector<std::pair<std::string, nh::DistributionField>> cases = {
      {"Heisenberg", field("-y", "x", "1")}, {"random A", random_form(901)}, {"random B", random_form(902)}};
  const std::vector<Vec3> points = {{0, 0, 0}, {0.1, -0.2, 0.05}, {-0.15, 0.1, 0.2}};
  const auto angles = angle_grid(72);
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& D = cases[k].second;
    const Vec3 p = points[k];
    const nh::NhInvariants n = nh::scalar_invariants(D, p);
    const double ck = n.H / 2, ct = n.Tm / 2, r2 = (n.H * n.H + n.Tm * n.Tm) / 4 - n.Kt;
    double res = 0;
    for (double a : angles) {
      const nh::Forms f = nh::forms_at(D, p, std::cos(a), std::sin(a));
      res = std::max(res, std::abs((f.kappa_n - ck) * (f.kappa_n - ck) + (f.tau_g - ct) * (f.tau_g - ct) - r2));
    }
    const auto c = nh::curvature_torsion_circle(D, p, angles);
    const double fit = std::max({std::abs(c.center_kn - ck), std::abs(c.center_tg - ct), std::abs(c.radius_sq - r2)});
    o.le(cases[k].first + " residual", std::max(res, c.max_residual), 1e-8);
    o.le(cases[k].first + " fitted circle", fit, 1e-8);
  }
  // Surface specialization of the sign: Beltrami-Enneper on the torus.
  const auto torus = surface::SurfacePatch::expressions("(2+0.5*cos(u))*cos(v)", "(2+0.5*cos(u))*sin(v)",
                                                        "0.5*sin(u)", -10, 10, -10, 10);
  double be = 0;
  for (int i = 1; i <= 5; ++i)
    for (int j = 1; j <= 5; ++j)
      be = std::max(be, std::abs(surface::identity_residuals(torus, two_pi * i / 6, two_pi * j / 6, 0.3 * i, 0.3 * i)
                                     .beltrami_enneper));
  o.le("Beltrami-Enneper", be, 1e-8);
}

void c10_moisil(Outcome& o) {
  nh::DistributionField D;
  D.pfaff = nh::moisil_sphere(1, 0, 0, 0.5, 0.1, 0, 0, 0, 0, 1);
  const auto sc = nh::classify_special(D, nh::probe_lattice({-0.3, -0.3, -0.3}, {0.3, 0.3, 0.3}));
  o.flag("is_nh_sphere", sc.is_nh_sphere);
  o.le("|Kg - H^2/4|", sc.sphere_kg_residual, 1e-6);
  o.le("|Tt - Tm^2/4|", sc.sphere_tt_residual, 1e-6);
  const auto gt = nh::geodesic_trace(D, {0, 0, 0}, {1, 0, 0}, 1, 1024);
  double dev = 0, lo = INFINITY;
  for (std::size_t i = 0; i < gt.grid.size(); ++i) {
    const nh::NhInvariants n = nh::scalar_invariants(D, gt.r[i]);
    dev = std::max(dev, std::abs(std::abs(gt.tau_g[i]) - std::abs(n.Tm) / 2));
    lo = std::min(lo, std::abs(gt.tau_g[i]));
  }
  o.le("||tau_g| - |Tm|/2|", dev, 1e-6);
  o.ge("min |tau_g|", lo, 1e-3);
}

void c11_gauge(Outcome& o) {
  std::set<std::array<std::string, 3>> forms;
  for (const auto& p : shipped_specs()) {
    const auto doc = read_json(p);
    if (doc.contains("X") && doc.contains("Y") && doc.contains("Z"))
      forms.insert({doc["X"].get<std::string>(), doc["Y"].get<std::string>(), doc["Z"].get<std::string>()});
  }
  o.ge("shipped forms", static_cast<double>(forms.size()), 2);
  std::mt19937 rng(11);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> box(-0.3, 0.3);
  double drift = 0;
  for (const auto& f : forms) {
    const auto D = field(f[0], f[1], f[2]);
    for (int k = 0; k < 5; ++k) {
      const Vec3 p{box(rng), box(rng), box(rng)};
      const nh::NhInvariants ref = nh::scalar_invariants(D, p);
      for (int r = 0; r < 8; ++r) {
        auto Dr = D;
        Dr.axis = Vec3{gauss(rng), gauss(rng), gauss(rng)};
        const nh::NhInvariants n = nh::scalar_invariants(Dr, p);
        drift = std::max({drift, std::abs(n.Tm - ref.Tm), std::abs(n.H - ref.H), std::abs(n.Kt - ref.Kt)});
      }
    }
  }
  o.le("Tm/H/Kt drift", drift, 1e-9);
}

// Random expression in x whose domain covers [-1, 1].
std::string random_expr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 12);
  std::uniform_real_distribution<double> cst(0.5, 2);
  auto sub = [&] { return random_expr(rng, depth - 1); };
  char b[32];
  switch (pick(rng)) {
    case 0: return "x";
    case 1: std::snprintf(b, sizeof b, "%.3g", cst(rng)); return b;
    case 2: return "(" + sub() + " + " + sub() + ")";
    case 3: return "(" + sub() + " - " + sub() + ")";
    case 4: return sub() + "*" + sub();
    case 5: return sub() + "/(1.5 + cos(" + sub() + "))";
    case 6: return "(" + sub() + ")^2";
    case 7: return "-(" + sub() + ")^3";
    case 8: return "sin(" + sub() + ")";
    case 9: return "atan(" + sub() + ")";
    case 10: return "exp(0.3*tanh(" + sub() + "))";
    case 11: return "sqrt(1 + (" + sub() + ")^2)";
    default: return "log(2 + sin(" + sub() + "))";
  }
}

void c12_parser(Outcome& o) {
  auto ev = [](const std::string& t) { return expr::ScalarFunction::expression(t, {}).eval(std::vector<double>{}); };
  o.flag("2^3^2 = 512", ev("2^3^2") == 512.0);
  o.flag("-2^2 = -4", ev("-2^2") == -4.0);

  std::mt19937 rng(12);
  std::uniform_real_distribution<double> X(-1, 1);
  double worst = 0;
  for (int k = 0; k < 200; ++k) {
    const auto f = expr::ScalarFunction::expression(random_expr(rng, 4), {"x"});
    for (int j = 0; j < 3; ++j) {
      const double x = X(rng), h = 1e-3;
      const double d = f.eval_dual({x}, 0).second;
      const double fd = (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
      worst = std::max(worst, std::abs(d - fd) / std::max(1.0, std::abs(d)));
    }
  }
  o.le("dual vs FD (200 expressions)", worst, 1e-6);

  // 1-based column of the first offending token; one past the end for a premature end.
  const std::vector<std::pair<std::string, std::size_t>> bad = {
      {"2*(3+", 6}, {"1 +* 2", 4}, {")", 1}, {"2 3", 3},  {"(1+2", 5},
      {"1 $ 2", 3}, {"", 1},       {"x^", 3}, {"3*(x))", 6}, {"  *4", 3}};
  int exact = 0;
  for (const auto& [text, col] : bad) {
    try {
      expr::parse(text);
    } catch (const expr::SyntaxError& e) {
      if (e.offset() == col) ++exact;
      else std::cerr << "  offset mismatch for '" << text << "': " << e.offset() << " != " << col << "\n";
    }
  }
  o.ge("exact offsets (of 10)", exact, 10);
}

void c13_cli(Outcome& o) {
  const fs::path tmp = fs::temp_directory_path() / ("myller_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  int identical = 0, total = 0;
  for (const auto& p : shipped_specs()) {
    ++total;
    const std::string kind = read_json(p)["kind"];
    const fs::path a = tmp / "a.out", b = tmp / "b.out";
    const std::string base = kind + " --input " + shell_quote(p.string()) + " --output ";
    const int ra = run_cli(base + shell_quote(a.string()));
    const int rb = run_cli(base + shell_quote(b.string()));
    if (ra == 0 && rb == 0 && slurp(a) == slurp(b) && !slurp(a).empty()) ++identical;
    else std::cerr << "  not reproducible: " << p.filename() << "\n";
  }
  o.ge("byte-identical specs", identical, total);

  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(tmp / name) << text;
    return shell_quote((tmp / name).string());
  };
  const std::string good = shell_quote(data_dir + "/specs/heisenberg.json");
  o.flag("success -> 0", run_cli("nonholonomic --input " + good) == 0);
  o.flag("unknown subcommand -> 1", run_cli("frobnicate --input " + good) == 1);
  o.flag("bad expression -> 1",
         run_cli("nonholonomic --input " +
                 write("syntax.json", R"J({"kind":"nonholonomic","X":"-y*","Y":"x","Z":"1","points":[[0,0,0]]})J")) ==
             1);
  o.flag("kind mismatch -> 1", run_cli("surface --input " + good) == 1);
  o.flag("gauge degenerate -> 2",
         run_cli("nonholonomic --input " +
                 write("gauge.json",
                       R"J({"kind":"nonholonomic","X":"0","Y":"0","Z":"1","axis":[0,0,1],"points":[[0,0,0]]})J")) ==
             2);
  o.flag("non-arclength curve -> 2",
         run_cli("versor --input " +
                 write("speed.json", R"J({"kind":"versor","curve":{"x":"cos(2*s)","y":"sin(2*s)","z":"0"},)J"
                                     R"J("xi":{"x":"0","y":"0","z":"1"},"s":[0,1]})J")) == 2);
  o.flag("missing input -> 3", run_cli("nonholonomic --input " + shell_quote((tmp / "absent.json").string())) == 3);
  o.flag("unwritable output -> 3",
         run_cli("nonholonomic --input " + good + " --output " + shell_quote((tmp / "no/such/dir/x.csv").string())) ==
             3);
  fs::remove_all(tmp);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"reconstruction round trips", c1_reconstruction},
      {"constant-coefficient circle closes at fourth order", c2_circle},
      {"K^2 + T^2 = chi1^2", c3_normal_relation},
      {"Myller and Levi-Civita transport", c4_transport},
      {"Krein area and Jacobi", c5_krein},
      {"surface identities", c6_surface},
      {"Euler and Bonnet on the cylinder", c7_euler_bonnet},
      {"Heisenberg distribution", c8_heisenberg},
      {"curvature-torsion circle", c9_circle},
      {"Moisil nonholonomic sphere", c10_moisil},
      {"gauge invariance", c11_gauge},
      {"expression parser", c12_parser},
      {"CLI determinism and exit codes", c13_cli},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << (o.detail.tellp() > 0 ? "; " : "") << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= 5) o.le("seconds", secs, 5);
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
