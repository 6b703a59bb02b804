#pragma once

#include <array>
#include <optional>
#include <vector>

#include "myller/configuration.hpp"
#include "myller/expr.hpp"
#include "myller/kernel.hpp"

namespace myller::surface {

// r(u, v) on the rectangle [u0, u1] x [v0, v1]. Components are expressions in (u, v).
struct SurfacePatch {
  expr::ScalarFunction x, y, z;
  double u0 = 0, u1 = 0, v0 = 0, v1 = 0;

  static SurfacePatch expressions(const std::string& x, const std::string& y, const std::string& z, double u0,
                                  double u1, double v0, double v1);
  Vec3 operator()(double u, double v) const;
  bool contains(double u, double v) const;
};

struct PatchJet {
  Vec3 r, ru, rv, ruu, ruv, rvv;
};

PatchJet patch_jet(const SurfacePatch& S, double u, double v);

// First and second fundamental forms at a point; G1 is the first-form coefficient <r_v, r_v>.
struct FormData {
  double E = 0, F = 0, G1 = 0, Delta = 0;
  double L = 0, M = 0, N = 0;
  double H = 0, Kt = 0;
  Vec3 nu;  // (r_u x r_v) / sqrt(Delta)
};

FormData forms_from_jet(const PatchJet& j);
FormData fundamental_forms(const SurfacePatch& S, double u, double v);

// sym[i][j][k] = {i+1 | j+1, k+1}.
struct Christoffel {
  double sym[2][2][2] = {};
  double operator()(int i, int j, int k) const { return sym[i - 1][j - 1][k - 1]; }
};

Christoffel christoffel_from_jet(const PatchJet& j);
Christoffel christoffel(const SurfacePatch& S, double u, double v);

// Max norm over the three Gauss and two Weingarten identities; nu_u, nu_v differentiated independently.
double gauss_weingarten_residual(const SurfacePatch& S, double u, double v);

// Tangent direction (du, dv), not necessarily normalized.
using Dir = std::array<double, 2>;

double phi_form(const FormData& f, const Dir& a, const Dir& b);
double psi_form(const FormData& f, const Dir& a, const Dir& b);
// Scaled to unit length in the first form.
Dir unit_dir(const FormData& f, const Dir& a);

// Invariants of the pair (delta, d): delta carries xi, d the curve tangent.
double c1_pair(const FormData& f, const Dir& delta, const Dir& d);
double c2_pair(const FormData& f, const Dir& delta, const Dir& d);
double K_pair(const FormData& f, const Dir& delta, const Dir& d);
// psi(delta, d) / (sqrt(phi(d,d)) sqrt(phi(delta,delta))), the polar-form route.
double K_polar(const FormData& f, const Dir& delta, const Dir& d);
double T_pair(const FormData& f, const Dir& delta, const Dir& d);

// u(t), v(t) on a uniform t grid.
struct SurfaceCurve {
  expr::ScalarFunction u, v;
  Grid grid;
};

// Components (xi^1, xi^2) in the (r_u, r_v) basis, as functions of t.
struct TangentField {
  expr::ScalarFunction xi1, xi2;
};

struct FieldInvariants {
  Grid grid;               // t grid
  std::vector<double> s;   // arclength at each node
  std::vector<Dir> xi, d;  // xi^i and du^i/ds
  std::vector<double> c1, c2, G, K, T;
  // G^{ij} as defined by the covariant-derivative antisymmetrization; G = G^{21}.
  std::vector<std::array<std::array<double, 2>, 2>> Gij;
};

// Without a field, xi is the unit tangent of the curve.
FieldInvariants field_invariants(const SurfacePatch& S, const SurfaceCurve& C,
                                 const std::optional<TangentField>& xi = std::nullopt);

struct LCTransport {
  Grid grid;
  std::vector<double> V1, V2, norm2;
};

LCTransport levi_civita_transport(const SurfacePatch& S, const SurfaceCurve& C, double V1, double V2);
// Signed angle from a to b measured in the first form.
double first_form_angle(const FormData& f, const Dir& a, const Dir& b);

struct TchebishevResult {
  double max_dE_dv = 0, max_dG1_du = 0;
  bool is_tchebishev = false;
};

// Probes an nu x nv interior grid.
TchebishevResult tchebishev_test(const SurfacePatch& S, std::size_t nu = 5, std::size_t nv = 5);

config::CurveInvariants curve_invariants_on_surface(const SurfacePatch& S, const SurfaceCurve& C);

// Curvature-line formulas; F = M = 0 is required.
struct PrincipalData {
  FormData forms;
  double invR1 = 0, invR2 = 0;
  double Hcheck = 0, Ktcheck = 0;  // residuals against the fundamental-form values
  double T1inv = 0, T2inv = 0, Tm = 0, Tt = 0;
};

PrincipalData principal_data(const SurfacePatch& S, double u, double v);

// theta = angle(alpha, i1), sigma = angle(xi, i1) with i1 = r_u / sqrt(E).
struct MayerBortolotti {
  double Kds = 0, Tds = 0, euler_kn = 0, bonnet_tg = 0;
};

MayerBortolotti mayer_bortolotti(double invR1, double invR2, double theta, double sigma);
// Direction of angle theta from i1, in (du, dv) components.
Dir principal_angle_dir(const FormData& f, double theta);

enum class IndicatrixKind { dupin, bonnet, normal_line, torsion_line };

struct Indicatrix {
  std::vector<double> angle, x, y;
  std::vector<double> skipped;   // angles where the radius is undefined
  double max_conic_residual = 0;
};

// For the line kinds the sampled angle is sigma and theta is held fixed.
Indicatrix indicatrix(double invR1, double invR2, IndicatrixKind kind, const std::vector<double>& angles,
                      double theta = 0);

struct IdentityResiduals {
  double product_identity = 0;   // kn(t) kn(s) + tg(t) tg(s) - [2H K(s,t) cos(s-t) - Kt cos 2(s-t)]
  double beltrami_enneper = 0;
  std::optional<double> enneper;  // along an asymptotic direction, when one exists
  double t_asym = 0;              // [T(delta,d) - T(d,delta)] - 2 sqrt(Delta) H (delta x d)
};

// t_asym alone, valid in any coordinates.
double t_asym(const FormData& f, const Dir& delta, const Dir& d);
IdentityResiduals identity_residuals(const SurfacePatch& S, double u, double v, double theta, double sigma);

}  // namespace myller::surface
