#include "doctest.h"

#include <cmath>

#include "myller/fields.hpp"

using namespace myller;
using namespace myller::fields;

namespace {

double max_abs_diff(const std::vector<double>& v, double c) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x - c));
  return m;
}

const VectorFunction circle = VectorFunction::expressions("cos(s)", "sin(s)", "0");
const VectorFunction circle_tangent = VectorFunction::expressions("-sin(s)", "cos(s)", "0");
const VectorFunction circle_inward = VectorFunction::expressions("-cos(s)", "-sin(s)", "0");
// Helix with a = b = 1 in arclength.
const VectorFunction helix =
    VectorFunction::expressions("cos(s/sqrt(2))", "sin(s/sqrt(2))", "s/sqrt(2)");
const VectorFunction helix_tangent =
    VectorFunction::expressions("-sin(s/sqrt(2))/sqrt(2)", "cos(s/sqrt(2))/sqrt(2)", "1/sqrt(2)");
const VectorFunction helix_binormal =
    VectorFunction::expressions("sin(s/sqrt(2))/sqrt(2)", "-cos(s/sqrt(2))/sqrt(2)", "1/sqrt(2)");

}  // namespace

TEST_CASE("circle with tangent field") {
  const Grid g = Grid::uniform(0, 2 * pi, 257);
  const auto fd = frenet_of_versor_field({circle, circle_tangent, g});
  CHECK(max_abs_diff(fd.K1, 1.0) < 1e-12);
  CHECK(max_abs_diff(fd.K2, 0.0) < 1e-12);
  CHECK(max_abs_diff(fd.a1, 1.0) < 1e-12);
  CHECK(max_abs_diff(fd.a2, 0.0) < 1e-12);
  const auto c = versor_concurrence(fd);
  CHECK_FALSE(c.concurrent);
  CHECK(max_abs_diff(c.residual_ode, -1.0) < 1e-9);
  const auto rc = ruled_classification({circle, circle_tangent, g});
  CHECK_FALSE(rc.cylinder);
  CHECK(rc.director_plane);
  CHECK(rc.developable);
  const auto si = spherical_image(fd);
  CHECK(std::abs(si.total_length - 2 * pi) < 1e-12);
  CHECK(si.great_circle);
  for (std::size_t i = 0; i < si.image.size(); ++i) CHECK(std::abs(si.image[i].z) < 1e-15);
}

TEST_CASE("circle with inward radial field is concurrent") {
  const Grid g = Grid::uniform(0, 2 * pi, 257);
  const auto fd = frenet_of_versor_field({circle, circle_inward, g});
  CHECK(max_abs_diff(fd.K1, 1.0) < 1e-12);
  CHECK(max_abs_diff(fd.a1, 0.0) < 1e-12);
  CHECK(max_abs_diff(fd.a2, -1.0) < 1e-12);
  CHECK(max_abs_diff(fd.a3, 0.0) < 1e-12);
  CHECK(versor_concurrence(fd).concurrent);
}

TEST_CASE("constant field") {
  const Grid g = Grid::uniform(0, 1, 33);
  const auto k = VectorFunction::expressions("0", "0", "1");
  CHECK_THROWS_AS(frenet_of_versor_field({circle, k, g}), VanishingCurvature);
  CHECK(ruled_classification({circle, k, g}).cylinder);
}

TEST_CASE("helix fields") {
  const Grid g = Grid::uniform(0, 6, 301);
  const auto fd = frenet_of_versor_field({helix, helix_tangent, g});
  CHECK(max_abs_diff(fd.K1, 0.5) < 1e-12);
  CHECK(max_abs_diff(fd.K2, 0.5) < 1e-12);
  CHECK_FALSE(versor_concurrence(fd).concurrent);
  const auto si = spherical_image(fd);
  CHECK(max_abs_diff(si.kg_image, 1.0) < 1e-12);
  CHECK_FALSE(si.great_circle);
  CHECK(std::abs(si.total_length - 3.0) < 1e-12);

  const auto rb = ruled_classification({helix, helix_binormal, g});
  CHECK_FALSE(rb.developable);
}

TEST_CASE("frame consistency") {
  const Grid g = Grid::uniform(0, 6, 601);
  const auto fd = frenet_of_versor_field({helix, helix_binormal, g});
  std::vector<Vec3> xi1;
  for (const auto& f : fd.frames) xi1.push_back(f.e1);
  const auto d = differentiate_samples(xi1, g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(norm(d[i] - fd.frames[i].e2 * fd.K1[i]) < 1e-7);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(std::abs(fd.a1[i] * fd.a1[i] + fd.a2[i] * fd.a2[i] + fd.a3[i] * fd.a3[i] - 1) < 1e-8);
}

TEST_CASE("spherical image length equals the integral of K1") {
  const Grid g = Grid::uniform(0, 4, 2049);
  const auto xi = VectorFunction::expressions("cos(s^2/3)*cos(s/2)", "sin(s^2/3)*cos(s/2)", "sin(s/2)");
  const auto fd = frenet_of_versor_field({helix, xi, g});
  const auto si = spherical_image(fd);
  auto chord = [&](std::size_t stride) {
    double L = 0;
    for (std::size_t i = stride; i < si.image.size(); i += stride) L += norm(si.image[i] - si.image[i - stride]);
    return L;
  };
  const double measured = (4 * chord(1) - chord(2)) / 3;
  CHECK(std::abs(measured - si.total_length) < 1e-6);
}

TEST_CASE("rigid motion leaves invariants unchanged") {
  const Grid g = Grid::uniform(0, 5, 201);
  const auto xi = VectorFunction::expressions("cos(s)*cos(s/3)", "sin(s)*cos(s/3)", "sin(s/3)");
  const auto fd = frenet_of_versor_field({helix, xi, g});
  // Rotation by 90 degrees about z followed by a translation.
  const auto helix_m = VectorFunction::expressions("-sin(s/sqrt(2)) + 1", "cos(s/sqrt(2)) - 2", "s/sqrt(2) + 3");
  const auto xi_m = VectorFunction::expressions("-sin(s)*cos(s/3)", "cos(s)*cos(s/3)", "sin(s/3)");
  const auto fm = frenet_of_versor_field({helix_m, xi_m, g});
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(fd.K1[i] - fm.K1[i]) < 1e-9);
    CHECK(std::abs(fd.K2[i] - fm.K2[i]) < 1e-9);
    CHECK(std::abs(fd.a3[i] - fm.a3[i]) < 1e-9);
  }
}

TEST_CASE("non-arclength curves are rejected") {
  const Grid g = Grid::uniform(0, 1, 11);
  const auto c2 = VectorFunction::expressions("cos(2*s)", "sin(2*s)", "0");
  CHECK_THROWS_AS(frenet_of_versor_field({c2, circle_tangent, g}), NotArclength);
  const auto bad = VectorFunction::expressions("2", "0", "0");
  CHECK_THROWS_AS(frenet_of_versor_field({circle, bad, g}), InvalidArgument);
}

TEST_CASE("reconstruction") {
  auto f = [](const char* t) { return expr::ScalarFunction::expression(t, {"s"}); };
  const Grid g = Grid::uniform(0, 2 * pi, 1024);
  const auto rec = reconstruct_versor_field({f("1"), f("0"), f("1"), f("0"), f("0")}, Frame{}, g);
  CHECK(norm(rec.curve.frames.back().origin - rec.curve.frames.front().origin) < 1e-9);
  CHECK_THROWS_AS(reconstruct_versor_field({f("1e-9"), f("0"), f("1"), f("0"), f("0")}, Frame{}, g),
                  VanishingCurvature);
  CHECK_THROWS_AS(reconstruct_versor_field({f("1"), f("0"), f("1"), f("0.1"), f("0")}, Frame{}, g),
                  InvalidArgument);

  const Grid h = Grid::uniform(0, 4 * pi, 4096);
  const auto r2 = reconstruct_versor_field({f("1"), f("0.5"), f("1"), f("0"), f("0")}, Frame{}, h);
  const auto back = frenet_of_versor_field(as_versor_field(r2));
  double e = 0;
  for (std::size_t i = 0; i < h.size(); ++i)
    e += std::pow(back.K1[i] - 1, 2) + std::pow(back.K2[i] - 0.5, 2);
  CHECK(std::sqrt(e / h.size()) <= 1e-6);
}

TEST_CASE("plane field invariants") {
  const Grid g = Grid::uniform(0, 2 * pi, 257);
  const auto pz = plane_field_invariants(circle, VectorFunction::expressions("0", "0", "1"), g);
  CHECK_FALSE(pz.framed);
  CHECK(plane_predicate(pz, PlanePredicate::planes_parallel));
  CHECK_THROWS_AS(plane_predicate(pz, PlanePredicate::orthogonal_trajectory), VanishingCurvature);

  const auto pr = plane_field_invariants(circle, VectorFunction::expressions("cos(s)", "sin(s)", "0"), g);
  REQUIRE(pr.framed);
  CHECK(max_abs_diff(pr.chi1, 1.0) < 1e-12);
  CHECK(max_abs_diff(pr.chi2, 0.0) < 1e-12);
  CHECK(max_abs_diff(pr.b1, 0.0) < 1e-12);
  CHECK(max_abs_diff(pr.b2, 1.0) < 1e-12);
  CHECK(max_abs_diff(pr.b3, 0.0) < 1e-12);
  CHECK(plane_predicate(pr, PlanePredicate::characteristics_parallel));
  CHECK(plane_predicate(pr, PlanePredicate::orthogonal_trajectory));

  // Tangent planes of the unit sphere along the latitude u0 = pi/3.
  const double u0 = pi / 3, a = std::sin(u0);
  const Grid gl = Grid::uniform(0, 2 * pi * a, 513);
  const auto lat = VectorFunction::expressions("sin(pi/3)*cos(s/sin(pi/3))", "sin(pi/3)*sin(s/sin(pi/3))", "cos(pi/3)");
  const auto pl = plane_field_invariants(lat, lat, gl);
  CHECK(plane_predicate(pl, PlanePredicate::lines_cross_curve));
  CHECK(max_abs_diff(pl.chi1, 1.0) < 1e-12);
  // Characteristic lines are the meridian tangents; they meet on the axis at the cone apex.
  CHECK_FALSE(plane_predicate(pl, PlanePredicate::planes_parallel));
}
