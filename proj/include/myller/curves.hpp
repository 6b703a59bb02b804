#pragma once

#include <array>
#include <vector>

#include "myller/expr.hpp"
#include "myller/kernel.hpp"

namespace myller {

// Value and first three derivatives of a scalar function of one variable.
struct ScalarJet {
  double v = 0, d1 = 0, d2 = 0, d3 = 0;
};

// Derivatives come from nested duals for expressions, from chained grid stencils for samples.
std::vector<ScalarJet> scalar_jets(const expr::ScalarFunction& f, const Grid& g);
ScalarJet scalar_jet(const expr::ScalarFunction& f, double t);

struct VecJet {
  Vec3 v, d1, d2, d3;
};

// Three scalar functions of one variable (a curve, or a vector field along one).
struct VectorFunction {
  std::array<expr::ScalarFunction, 3> c;

  static VectorFunction expressions(const std::string& x, const std::string& y, const std::string& z,
                                    const std::string& var = "s");
  static VectorFunction samples(const std::vector<Vec3>& values, const Grid& g, const std::string& var = "s");
  bool expression_backed() const {
    return c[0].expression_backed() && c[1].expression_backed() && c[2].expression_backed();
  }
  Vec3 operator()(double t) const;
};

std::vector<VecJet> vector_jets(const VectorFunction& f, const Grid& g);
VecJet vector_jet(const VectorFunction& f, double t);

// Jet of v/|v|. Throws InvalidArgument naming the node when |v| is off by more than tol.
VecJet normalize_jet(const VecJet& j);
std::vector<VecJet> unit_jets(const VectorFunction& f, const Grid& g, const char* what, double tol = 1e-3);

// Rejects curves whose speed differs from 1 by more than tol.
void require_arclength(const std::vector<VecJet>& curve, double tol = 1e-6);

}  // namespace myller
