#include "myller/kernel.hpp"

#include <algorithm>
#include <string>

namespace myller {

double Frame::orthonormality_defect() const {
  const Vec3 b[3] = {e1, e2, e3};
  double worst = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(dot(b[i], b[j]) - (i == j ? 1.0 : 0.0)));
  return worst;
}

bool Frame::is_right_handed_orthonormal(double tol) const {
  return orthonormality_defect() <= tol && std::abs(triple(e1, e2, e3) - 1.0) <= tol;
}

Frame orthonormalize(const Frame& f) {
  const double gram = triple(f.e1, f.e2, f.e3);
  if (!(std::abs(gram) > 1e-12)) throw DegenerateFrame("basis vectors are linearly dependent");
  Frame r;
  r.origin = f.origin;
  r.e1 = normalized(f.e1);
  Vec3 u2 = f.e2 - r.e1 * dot(f.e2, r.e1);
  r.e2 = normalized(u2);
  Vec3 u3 = f.e3 - r.e1 * dot(f.e3, r.e1);
  u3 -= r.e2 * dot(u3, r.e2);
  r.e3 = normalized(u3);
  if (triple(r.e1, r.e2, r.e3) < 0) throw DegenerateFrame("basis is left-handed");
  return r;
}

Grid::Grid(std::vector<double> s) : s_(std::move(s)) {
  if (s_.size() < 5) throw InvalidArgument("grid needs at least 5 nodes");
  h_ = (s_.back() - s_.front()) / static_cast<double>(s_.size() - 1);
  if (!(h_ > 0)) throw InvalidArgument("grid must be strictly increasing");
  const double scale = std::max({std::abs(s_.front()), std::abs(s_.back()), s_.back() - s_.front()});
  for (std::size_t i = 1; i < s_.size(); ++i) {
    const double d = s_[i] - s_[i - 1];
    if (!(d > 0)) throw InvalidArgument("grid must be strictly increasing");
    if (std::abs(d - h_) > 1e-12 * scale + 1e-12 * h_ * static_cast<double>(s_.size()))
      throw InvalidArgument("grid spacing is not uniform");
  }
}

Grid Grid::uniform(double a, double b, std::size_t n) {
  if (n < 5) throw InvalidArgument("grid needs at least 5 nodes");
  if (!(b > a)) throw InvalidArgument("grid range must be increasing");
  std::vector<double> s(n);
  const double h = (b - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) s[i] = a + h * static_cast<double>(i);
  s[n - 1] = b;
  return Grid(std::move(s));
}

long Grid::find_node(double s) const {
  if (s_.empty()) return -1;
  const double k = std::round((s - s_.front()) / h_);
  if (k < 0 || k > static_cast<double>(s_.size() - 1)) return -1;
  const auto i = static_cast<std::size_t>(k);
  return std::abs(s_[i] - s) <= 1e-9 * h_ ? static_cast<long>(i) : -1;
}

std::vector<Vec3> FramedCurve::positions() const {
  std::vector<Vec3> p;
  p.reserve(frames.size());
  for (const auto& f : frames) p.push_back(f.origin);
  return p;
}

double FramedCurve::max_orthonormality_defect() const {
  double worst = 0;
  for (const auto& f : frames)
    worst = std::max({worst, f.orthonormality_defect(), std::abs(triple(f.e1, f.e2, f.e3) - 1.0)});
  return worst;
}

namespace {

template <class T>
T stencil(const std::vector<T>& f, std::size_t i, std::size_t n, double h) {
  if (i >= 2 && i + 2 < n) return (f[i - 2] - f[i - 1] * 8.0 + f[i + 1] * 8.0 - f[i + 2]) / (12.0 * h);
  if (i == 0) return (f[0] * -25.0 + f[1] * 48.0 - f[2] * 36.0 + f[3] * 16.0 - f[4] * 3.0) / (12.0 * h);
  if (i == 1) return (f[0] * -3.0 - f[1] * 10.0 + f[2] * 18.0 - f[3] * 6.0 + f[4]) / (12.0 * h);
  if (i == n - 1)
    return (f[n - 1] * 25.0 - f[n - 2] * 48.0 + f[n - 3] * 36.0 - f[n - 4] * 16.0 + f[n - 5] * 3.0) / (12.0 * h);
  return (f[n - 1] * 3.0 + f[n - 2] * 10.0 - f[n - 3] * 18.0 + f[n - 4] * 6.0 - f[n - 5]) / (12.0 * h);
}

template <class T>
std::vector<T> diff_all(const std::vector<T>& f, const Grid& g) {
  if (f.size() != g.size()) throw InvalidArgument("sample count does not match grid");
  std::vector<T> d(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) d[i] = stencil(f, i, f.size(), g.step());
  return d;
}

}  // namespace

std::vector<double> differentiate_samples(const std::vector<double>& f, const Grid& g) { return diff_all(f, g); }
std::vector<Vec3> differentiate_samples(const std::vector<Vec3>& f, const Grid& g) { return diff_all(f, g); }

double differentiate_at(const std::vector<double>& f, const Grid& g, std::size_t i) {
  if (f.size() != g.size()) throw InvalidArgument("sample count does not match grid");
  if (i >= f.size()) throw OutOfDomain("node index outside the sample range");
  return stencil(f, i, f.size(), g.step());
}

std::vector<double> cumulative_quadrature(const std::vector<double>& v, const Grid& g) {
  if (v.size() != g.size()) throw InvalidArgument("sample count does not match grid");
  const std::size_t n = v.size();
  const double h = g.step();
  std::vector<double> out(n, 0.0);
  // Even nodes take Simpson panels; odd nodes take a quadratic interpolant over the enclosing pair of panels.
  for (std::size_t i = 1; i < n; ++i) {
    if (i % 2 == 0) {
      out[i] = out[i - 2] + h / 3 * (v[i - 2] + 4 * v[i - 1] + v[i]);
    } else if (i + 1 < n) {
      out[i] = out[i - 1] + h / 12 * (5 * v[i - 1] + 8 * v[i] - v[i + 1]);
    } else {
      out[i] = out[i - 1] + h / 12 * (-v[i - 2] + 8 * v[i - 1] + 5 * v[i]);
    }
  }
  return out;
}

double quadrature(const std::vector<double>& v, const Grid& g) {
  if (v.size() != g.size()) throw InvalidArgument("sample count does not match grid");
  const std::size_t n = v.size();
  const double h = g.step();
  const std::size_t m = (n % 2 == 1) ? n : n - 1;
  double sum = v[0] + v[m - 1];
  for (std::size_t i = 1; i + 1 < m; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * v[i];
  double total = sum * h / 3;
  if (m != n) total += 0.5 * h * (v[n - 2] + v[n - 1]);
  return total;
}

namespace {

using State = std::array<double, 12>;

State pack(const Frame& f) {
  return {f.origin.x, f.origin.y, f.origin.z, f.e1.x, f.e1.y, f.e1.z,
          f.e2.x,     f.e2.y,     f.e2.z,     f.e3.x, f.e3.y, f.e3.z};
}

Frame unpack(const State& y) {
  Frame f;
  f.origin = {y[0], y[1], y[2]};
  f.e1 = {y[3], y[4], y[5]};
  f.e2 = {y[6], y[7], y[8]};
  f.e3 = {y[9], y[10], y[11]};
  return f;
}

State frame_rhs(const FrameRates& k, const State& y) {
  const Frame f = unpack(y);
  const Vec3 dr = f.e1 * k.v.x + f.e2 * k.v.y + f.e3 * k.v.z;
  const Vec3 d1 = f.e2 * k.a + f.e3 * k.b;
  const Vec3 d2 = f.e1 * -k.a + f.e3 * k.c;
  const Vec3 d3 = f.e1 * -k.b - f.e2 * k.c;
  return {dr.x, dr.y, dr.z, d1.x, d1.y, d1.z, d2.x, d2.y, d2.z, d3.x, d3.y, d3.z};
}

template <class RatesAt>
FramedCurve integrate(const RatesAt& rates_at, const Frame& init, const Grid& grid) {
  if (!init.is_right_handed_orthonormal()) throw DegenerateFrame("initial frame is not right-handed orthonormal");
  FramedCurve out;
  out.grid = grid;
  out.frames.reserve(grid.size());
  out.frames.push_back(init);
  State y = pack(init);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    // rates_at(i, w) gives the coefficients at s_i + w h, w in {0, 1/2, 1}.
    const FrameRates k0 = rates_at(i, 0.0), km = rates_at(i, 0.5), k1 = rates_at(i, 1.0);
    auto rhs = [&](double s, const State& st) {
      const double w = (s - grid[i]) / h;
      return frame_rhs(w < 0.25 ? k0 : (w < 0.75 ? km : k1), st);
    };
    y = rk4_step<12>(rhs, grid[i], y, h);
    Frame f = orthonormalize(unpack(y));
    out.frames.push_back(f);
    y = pack(f);
  }
  return out;
}

}  // namespace

FramedCurve evolve_frame(const std::vector<double>& a, const std::vector<double>& b,
                         const std::vector<double>& c, const std::vector<Vec3>& velocity,
                         const Frame& init, const Grid& grid) {
  const std::size_t n = grid.size();
  if (a.size() != n || b.size() != n || c.size() != n || velocity.size() != n)
    throw InvalidArgument("coefficient sequences must be aligned with the grid");
  auto at = [&](std::size_t i, double w) {
    if (w == 0.0) return FrameRates{a[i], b[i], c[i], velocity[i]};
    if (w == 1.0) return FrameRates{a[i + 1], b[i + 1], c[i + 1], velocity[i + 1]};
    return FrameRates{(a[i] + a[i + 1]) / 2, (b[i] + b[i + 1]) / 2, (c[i] + c[i + 1]) / 2,
                      (velocity[i] + velocity[i + 1]) / 2};
  };
  return integrate(at, init, grid);
}

FramedCurve evolve_frame(const std::function<FrameRates(double)>& rates, const Frame& init, const Grid& grid) {
  std::vector<FrameRates> nodes(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) nodes[i] = rates(grid[i]);
  auto at = [&](std::size_t i, double w) {
    if (w == 0.0) return nodes[i];
    if (w == 1.0) return nodes[i + 1];
    return rates(grid[i] + w * (grid[i + 1] - grid[i]));
  };
  return integrate(at, init, grid);
}

double wrap_pi(double a) {
  double r = std::remainder(a, two_pi);
  if (r <= -pi) r += two_pi;
  return r;
}

std::vector<double> unwrap_angle(const std::vector<double>& raw) {
  std::vector<double> out(raw.size());
  if (raw.empty()) return out;
  out[0] = raw[0];
  for (std::size_t i = 1; i < raw.size(); ++i) {
    const double jump = wrap_pi(raw[i] - raw[i - 1]);
    if (std::abs(std::abs(jump) - pi) <= 1e-9)
      throw UnwrapAmbiguity("adjacent jump of pi between samples " + std::to_string(i - 1) + " and " +
                            std::to_string(i));
    const double turns = std::round((out[i - 1] + jump - raw[i]) / two_pi);
    out[i] = raw[i] + two_pi * turns;
  }
  return out;
}

}  // namespace myller
