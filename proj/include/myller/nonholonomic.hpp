#pragma once

#include <array>
#include <optional>
#include <vector>

#include "myller/configuration.hpp"
#include "myller/curves.hpp"
#include "myller/expr.hpp"
#include "myller/kernel.hpp"

namespace myller::nh {

// omega = X dx + Y dy + Z dz with X, Y, Z expressions in (x, y, z).
struct PfaffForm {
  expr::ScalarFunction X, Y, Z;

  static PfaffForm expressions(const std::string& X, const std::string& Y, const std::string& Z);
  Vec3 operator()(const Vec3& p) const;
  // Directional derivative of (X, Y, Z) at p along w.
  Vec3 derivative(const Vec3& p, const Vec3& w) const;
};

enum class DerivativeMode { dual, finite_difference };

struct DistributionField {
  PfaffForm pfaff;
  std::optional<Vec3> axis;  // unset: (1,0,0), then (0,1,0), then (0,0,1)
  DerivativeMode mode = DerivativeMode::dual;
  double fd_step = 1e-5;     // relative; h = fd_step * max(1, |p|)
};

// Reference axis used at p. An explicit axis throws GaugeDegenerate instead of falling through.
Vec3 resolve_axis(const DistributionField& D, const Vec3& p);

// Adapted frame at one point with derivatives of the I3 and I1 fields (same gauge axis).
class PointFrame {
 public:
  PointFrame(const DistributionField& D, const Vec3& p, const Vec3& axis);

  const Frame& frame() const { return f_; }
  const Vec3& axis() const { return axis_; }
  Vec3 dI3(const Vec3& w) const;
  Vec3 dI1(const Vec3& w) const;

 private:
  const DistributionField* D_;
  Vec3 axis_;
  Frame f_;
  double vnorm_ = 0, wnorm_ = 0;
};

Frame adapted_frame(const DistributionField& D, const Vec3& p);

struct RotationCoefficients {
  double p1 = 0, p2 = 0, q1 = 0, q2 = 0, r1 = 0, r2 = 0;
};

RotationCoefficients coefficients(const PointFrame& pf);
RotationCoefficients rotation_coefficients(const DistributionField& D, const Vec3& p);
// Coefficients on the frame I1' = c I1 + s I2, I2' = -s I1 + c I2 (constant angle).
RotationCoefficients rotate(const RotationCoefficients& rc, double theta);
// Coefficients on the opposite orientation (I1, -I2).
RotationCoefficients reflect(const RotationCoefficients& rc);

struct NhInvariants {
  double Tm = 0, H = 0, Kt = 0, Kg = 0, Tt = 0;
};

NhInvariants invariants_of(const RotationCoefficients& rc);
NhInvariants scalar_invariants(const DistributionField& D, const Vec3& p);

struct Integrability {
  std::vector<double> Tm;
  bool integrable = false;
};

Integrability integrability(const DistributionField& D, const std::vector<Vec3>& points, double tol = 1e-7);

struct Forms {
  double phi = 0, psi = 0, chi = 0, theta = 0, kappa_n = 0, tau_g = 0;
  double theta_residual = 0;  // Theta - (H psi - Kt phi + Tm chi)
};

Forms forms_of(const RotationCoefficients& rc, double w1, double w2);
Forms forms_at(const DistributionField& D, const Vec3& p, double w1, double w2);

// Normal curvature, geodesic torsion of xi (angle beta) relative to the curve direction (angle alpha).
double K_pair(const RotationCoefficients& rc, double beta, double alpha);
double T_pair(const RotationCoefficients& rc, double beta, double alpha);

enum class RootKind { real, coincident, imaginary, indeterminate };

struct DirectionPair {
  RootKind kind = RootKind::imaginary;
  std::vector<double> angles;  // in [0, pi), measured from I1; empty when the form vanishes identically
};

struct DirectionFields {
  DirectionPair asymptotic, curvature, principal, extremal_torsion;
  bool planar = false;   // psi vanishes identically
  bool umbilic = false;  // principal directions indeterminate
  bool torsion_degenerate = false;
};

DirectionFields directions_of(const RotationCoefficients& rc);
DirectionFields direction_fields(const DistributionField& D, const Vec3& p);

struct ExtremalValues {
  double invR1 = 0, invR2 = 0, invT1 = 0, invT2 = 0;
  double identity_residual = 0;  // max over the four sum/product identities
};

ExtremalValues extremal_of(const RotationCoefficients& rc);
ExtremalValues extremal_values(const DistributionField& D, const Vec3& p);

struct IndicatrixPoints {
  std::vector<double> angle, x, y;
  std::vector<double> skipped;
  double max_conic_residual = 0;
};

struct EulerBonnet {
  ExtremalValues ext;
  std::optional<double> principal_angle;  // rotation aligning I1 with the invR1 direction
  std::optional<double> torsion_angle;    // rotation aligning I1 with the invT1 direction
  double principal_alignment_residual = 0, torsion_alignment_residual = 0;
  std::vector<double> angles, kappa_n, tau_g;  // kappa_n, tau_g at angles from the aligned axes
  IndicatrixPoints dupin, bonnet;
  bool umbilic = false, torsion_degenerate = false;
};

// With require_alignment, degenerate points throw IndeterminateDirections instead of flagging.
EulerBonnet euler_bonnet_nh(const DistributionField& D, const Vec3& p, const std::vector<double>& angles,
                            bool require_alignment = false);

struct CurvatureTorsionCircle {
  double center_kn = 0, center_tg = 0, radius_sq = 0, max_residual = 0;
  bool imaginary = false;
};

CurvatureTorsionCircle curvature_torsion_circle(const DistributionField& D, const Vec3& p,
                                                const std::vector<double>& angles);

// Data along a curve lying in the distribution; the gauge axis is fixed at the first node.
struct CurveFrames {
  Grid grid;
  std::vector<Vec3> r, t;
  std::vector<Frame> frames;
  std::vector<RotationCoefficients> coeffs;
  std::vector<double> alpha;        // unwrapped angle of the tangent from I1
  std::vector<double> tangency;     // <I3, t>
  std::vector<Vec3> dI3, dI1;       // dI3/ds, dI1/ds along the curve
  Vec3 axis;
};

CurveFrames curve_frames(const DistributionField& D, const VectorFunction& curve, const Grid& grid,
                         double tangency_tol = 1e-6);

struct FieldGKT {
  std::vector<double> alpha, beta, G, K, T;
  double crosscheck = 0;  // max deviation from the triple-product formulas
};

FieldGKT field_gkt(const DistributionField& D, const VectorFunction& curve, const Grid& grid,
                   const expr::ScalarFunction& beta);

struct NhTransport {
  std::vector<double> V1, V2;
  std::vector<Vec3> spatial;
};

NhTransport transport_nh(const DistributionField& D, const VectorFunction& curve, const Grid& grid, double V1,
                         double V2);

// d/ds[sin(alpha - beta) / G] - cos(alpha - beta) per node.
std::vector<double> concurrence_residual(const DistributionField& D, const VectorFunction& curve, const Grid& grid,
                                         const expr::ScalarFunction& beta);

struct GeodesicTrace {
  Grid grid;
  std::vector<Vec3> r, t;
  std::vector<double> kappa_g;   // <t, dt/ds, I3> from the samples
  std::vector<double> tau_g;     // chi along t
  std::vector<double> alpha;     // angle of t from the gauge I1, unwrapped
  double max_kappa_g = 0, max_tangency = 0;
};

// n nodes over [0, length]; start direction is projected onto the plane at start.
GeodesicTrace geodesic_trace(const DistributionField& D, const Vec3& start, const Vec3& direction, double length,
                             std::size_t n = 1024);

PfaffForm moisil_plane(double p0, double q0, double r0, double a, double b, double c);
PfaffForm moisil_sphere(double mu, double p0, double q0, double r0, double a, double b, double c, double h, double k,
                        double l);

struct SpecialClass {
  bool is_nh_plane = false, is_nh_sphere = false;
  double max_p2 = 0, max_q1 = 0, max_p1_minus_q2 = 0, max_p2_plus_q1 = 0, min_abs_Tm = 0;
  double sphere_kg_residual = 0, sphere_tt_residual = 0;  // max |Kg - H^2/4|, |Tt - Tm^2/4|
  double plane_kg = 0, plane_h = 0;                        // max |Kg|, |H|
};

SpecialClass classify_special(const DistributionField& D, const std::vector<Vec3>& probes);
std::vector<Vec3> probe_lattice(const Vec3& lo, const Vec3& hi, std::size_t n = 3);

}  // namespace myller::nh
