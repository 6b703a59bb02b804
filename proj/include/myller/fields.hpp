#pragma once

#include <optional>
#include <vector>

#include "myller/curves.hpp"
#include "myller/kernel.hpp"

namespace myller::fields {

// A versor field xi(s) along a curve r(s), s arclength.
struct VersorFieldOnCurve {
  VectorFunction curve;
  VectorFunction xi;
  Grid grid;
};

struct FrenetData {
  Grid grid;
  std::vector<Vec3> r, alpha;   // position and unit tangent
  std::vector<Frame> frames;    // (xi1, xi2, xi3) with origin r
  std::vector<double> K1, K2, a1, a2, a3;
};

FrenetData frenet_of_versor_field(const VersorFieldOnCurve& vf);
// Same computation on precomputed jets (curve jet, unit field jet).
FrenetData frenet_from_jets(const Grid& g, const std::vector<VecJet>& curve, const std::vector<VecJet>& xi);

struct VersorProfile {
  expr::ScalarFunction K1, K2, a1, a2, a3;  // functions of s
};

struct Reconstruction {
  FramedCurve curve;
  std::vector<Vec3> xi;
};

Reconstruction reconstruct_versor_field(const VersorProfile& profile, const Frame& init, const Grid& grid);
// Re-reads a reconstructed curve as a sample-backed versor field (xi = e1).
VersorFieldOnCurve as_versor_field(const Reconstruction& rec);

struct Concurrence {
  std::vector<double> residual_ode, residual_a3;
  bool concurrent = false;
};

Concurrence versor_concurrence(const FrenetData& fd, double tol = 1e-6);

struct RuledClass {
  bool cylinder = false, director_plane = false, developable = false;
};

// Works on the raw field: the cylinder test precedes the K1 guard.
RuledClass ruled_classification(const VersorFieldOnCurve& vf);

struct SphericalImage {
  std::vector<double> sstar;
  std::vector<Vec3> image;
  std::vector<double> kg_image;
  double total_length = 0;
  bool great_circle = false;
};

SphericalImage spherical_image(const FrenetData& fd);

struct PlaneFieldData {
  Grid grid;
  std::vector<Vec3> r, alpha;
  // Frame (nu1, nu2, nu3); nu2 and nu3 are only meaningful when framed.
  std::vector<Frame> frames;
  std::vector<double> chi1, chi2, b1, b2, b3;
  bool framed = false;          // chi1 >= k_min at every node
  std::size_t first_flat_node = 0;
};

PlaneFieldData plane_field_invariants(const VectorFunction& curve, const VectorFunction& nu, const Grid& grid);
PlaneFieldData plane_field_from_jets(const Grid& g, const std::vector<VecJet>& curve, const std::vector<VecJet>& nu);

enum class PlanePredicate {
  lines_cross_curve,          // b1 == 0
  planes_parallel,            // chi1 == 0
  characteristics_parallel,   // chi2 == 0
  nu3_concurrent,             // b1 == 0 and b3 + d/ds(b2/chi2) == 0
  orthogonal_trajectory,      // b3 == 0
};

// Throws VanishingCurvature when the predicate needs the (nu2, nu3) frame and chi1 vanishes.
bool plane_predicate(const PlaneFieldData& pf, PlanePredicate p, double tol = 1e-6);

}  // namespace myller::fields
