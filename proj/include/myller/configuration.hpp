#pragma once

#include <optional>
#include <vector>

#include "myller/curves.hpp"
#include "myller/fields.hpp"
#include "myller/kernel.hpp"

namespace myller::config {

// M(C, xi, pi) with the plane pi(s) given by its oriented unit normal nu(s).
struct MyllerConfig {
  VectorFunction curve, xi, nu;
  Grid grid;
};

struct DarbouxData {
  Grid grid;
  std::vector<Vec3> r, alpha;
  std::vector<Frame> frames;  // (xi, mu, nu), mu = nu x xi
  std::vector<double> c1, c2, c3, G, K, T;
  bool tangent = false;  // max |<alpha, nu>| <= 1e-8
};

DarbouxData darboux_invariants(const MyllerConfig& cfg);

struct DarbouxProfile {
  expr::ScalarFunction c1, c2, c3, G, K, T;
};

FramedCurve reconstruct_configuration(const DarbouxProfile& p, const Frame& init, const Grid& grid);
MyllerConfig as_configuration(const FramedCurve& fc);

struct FrenetRelation {
  std::vector<double> phi;
  std::vector<double> res_G, res_K, res_T;
  std::vector<std::optional<double>> meusnier;  // empty where |K| <= 1e-8
  double max_residual = 0;
};

FrenetRelation frenet_relation(const DarbouxData& dd, const fields::FrenetData& fd);

struct NormalRelation {
  std::vector<double> sigma;  // empty when the plane field has no characteristic frame
  std::vector<double> res_K, res_T, res_G, res_c1, res_c2, res_c3;
  std::vector<double> k2t2;   // K^2 + T^2 - chi1^2
  double max_residual = 0;
};

NormalRelation normal_relation(const DarbouxData& dd, const fields::PlaneFieldData& pf);

struct Transported {
  std::vector<double> V1, V2;
  std::vector<Vec3> spatial;
};

Transported myller_transport(const DarbouxData& dd, double V1, double V2);

std::vector<Vec3> adjoint_curve(const DarbouxData& dd);

struct MyllerConcurrence {
  std::vector<double> residual;
  bool concurrent = false;
};

MyllerConcurrence myller_concurrence(const DarbouxData& dd, double tol = 1e-6);

struct KreinResult {
  double omega_direct = 0, omega_formula = 0;
  double integral_G = 0, integral_dsigma = 0;
  long sigma_winding = 0;
  Vec3 pole;
  int pole_winding = 0;
  bool jacobi_flag = false;
};

KreinResult krein_area(const DarbouxData& dd, const fields::PlaneFieldData& pf);

struct CurveInvariants {
  Grid grid;
  std::vector<double> kappa_g, kappa_n, tau_g;
  bool geodesic = false, asymptotic = false, curvature_line = false;
};

CurveInvariants classify(CurveInvariants ci, double tol = 1e-6);

struct TangentCurveResult {
  CurveInvariants inv;
  DarbouxData darboux;
  std::optional<FrenetRelation> frenet;  // absent where the curve has no principal normal
  std::optional<NormalRelation> normal;  // absent where chi1 vanishes
};

TangentCurveResult tangent_curve_invariants(const VectorFunction& curve, const VectorFunction& nu, const Grid& grid);

struct TangentFieldRelations {
  std::vector<double> lambda;
  std::vector<double> res_K, res_T, res_G, res_KT;
  std::vector<std::optional<double>> bortolotti_angle;  // reported only when K vanishes
  double max_residual = 0;
};

TangentFieldRelations tangent_field_relations(const DarbouxData& dd, const CurveInvariants& ci);

}  // namespace myller::config
