#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "myller/errors.hpp"

namespace myller {

inline constexpr double tol_ortho = 1e-9;
inline constexpr double k_min = 1e-8;
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

struct Vec3 {
  double x = 0, y = 0, z = 0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double k) const { return {x * k, y * k, z * k}; }
  constexpr Vec3 operator/(double k) const { return {x / k, y / k, z / k}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double k) { x *= k; y *= k; z *= k; return *this; }
};

constexpr Vec3 operator*(double k, const Vec3& v) { return v * k; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
// Scalar triple product <a, b, c> = a . (b x c).
constexpr double triple(const Vec3& a, const Vec3& b, const Vec3& c) { return dot(a, cross(b, c)); }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) { return v / norm(v); }

struct Frame {
  Vec3 origin;
  Vec3 e1{1, 0, 0}, e2{0, 1, 0}, e3{0, 0, 1};

  // Max-norm of G^T G - I over the three basis vectors.
  double orthonormality_defect() const;
  bool is_right_handed_orthonormal(double tol = tol_ortho) const;
  // Components of a world vector in this basis.
  Vec3 components(const Vec3& w) const { return {dot(w, e1), dot(w, e2), dot(w, e3)}; }
  Vec3 to_world(const Vec3& c) const { return e1 * c.x + e2 * c.y + e3 * c.z; }
};

// Modified Gram-Schmidt; keeps the direction of e1.
Frame orthonormalize(const Frame& f);

class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<double> s);
  static Grid uniform(double a, double b, std::size_t n);

  std::size_t size() const { return s_.size(); }
  double operator[](std::size_t i) const { return s_[i]; }
  const std::vector<double>& values() const { return s_; }
  double step() const { return h_; }
  double front() const { return s_.front(); }
  double back() const { return s_.back(); }
  double length() const { return s_.back() - s_.front(); }
  // Index of the node equal to s within 1e-9 of the step, or -1.
  long find_node(double s) const;

 private:
  std::vector<double> s_;
  double h_ = 0;
};

struct FramedCurve {
  Grid grid;
  std::vector<Frame> frames;

  std::vector<Vec3> positions() const;
  double max_orthonormality_defect() const;
};

// d/ds of grid samples: 5-point central inside, 5-point one-sided at the two ends on each side.
std::vector<double> differentiate_samples(const std::vector<double>& f, const Grid& g);
std::vector<Vec3> differentiate_samples(const std::vector<Vec3>& f, const Grid& g);
double differentiate_at(const std::vector<double>& f, const Grid& g, std::size_t i);

double quadrature(const std::vector<double>& values, const Grid& g);
// Running integral with the same rule, value 0 at the first node.
std::vector<double> cumulative_quadrature(const std::vector<double>& values, const Grid& g);

// Skew coefficients of the frame ODE and velocity components at one parameter value.
struct FrameRates {
  double a = 0, b = 0, c = 0;
  Vec3 v;
};

// Coefficients per node; half-step values are linear interpolants.
FramedCurve evolve_frame(const std::vector<double>& a, const std::vector<double>& b,
                         const std::vector<double>& c, const std::vector<Vec3>& velocity,
                         const Frame& init, const Grid& grid);
// Same scheme with coefficients evaluated exactly at half steps.
FramedCurve evolve_frame(const std::function<FrameRates(double)>& rates, const Frame& init,
                         const Grid& grid);

std::vector<double> unwrap_angle(const std::vector<double>& raw);

// Generic classical RK4 step for a fixed-size state.
template <std::size_t N, class F>
std::array<double, N> rk4_step(const F& rhs, double s, const std::array<double, N>& y, double h) {
  auto axpy = [](const std::array<double, N>& u, const std::array<double, N>& k, double w) {
    std::array<double, N> r{};
    for (std::size_t i = 0; i < N; ++i) r[i] = u[i] + w * k[i];
    return r;
  };
  const auto k1 = rhs(s, y);
  const auto k2 = rhs(s + h / 2, axpy(y, k1, h / 2));
  const auto k3 = rhs(s + h / 2, axpy(y, k2, h / 2));
  const auto k4 = rhs(s + h, axpy(y, k3, h));
  std::array<double, N> r{};
  for (std::size_t i = 0; i < N; ++i) r[i] = y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return r;
}

// Wrap an angle into (-pi, pi].
double wrap_pi(double a);

}  // namespace myller
