#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace myller {

// Exit-code class used by the CLI: 1 validation, 2 geometric, 3 I/O.
enum class ErrorClass { validation = 1, geometric = 2, io = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const noexcept { return cls_; }

 private:
  ErrorClass cls_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorClass::validation, what) {}
};

class GeometricError : public Error {
 public:
  explicit GeometricError(const std::string& what) : Error(ErrorClass::geometric, what) {}
};

// Error tied to one grid node.
class NodeError : public GeometricError {
 public:
  NodeError(const std::string& what, std::size_t node)
      : GeometricError(what + " at node " + std::to_string(node)), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorClass::io, what) {}
};

#define MYLLER_GEOM_ERROR(Name)                                            \
  class Name : public GeometricError {                                     \
   public:                                                                 \
    explicit Name(const std::string& what) : GeometricError(#Name ": " + what) {} \
  };

#define MYLLER_NODE_ERROR(Name)                                                  \
  class Name : public NodeError {                                                \
   public:                                                                       \
    Name(const std::string& what, std::size_t node) : NodeError(#Name ": " + what, node) {} \
  };

MYLLER_GEOM_ERROR(DegenerateFrame)
MYLLER_GEOM_ERROR(OutOfDomain)
MYLLER_GEOM_ERROR(UnwrapAmbiguity)
MYLLER_GEOM_ERROR(NotClosed)
MYLLER_GEOM_ERROR(PoleOnImage)
MYLLER_GEOM_ERROR(DegenerateParametrization)
MYLLER_GEOM_ERROR(NotCurvatureLineCoords)
MYLLER_GEOM_ERROR(GaugeDegenerate)
MYLLER_GEOM_ERROR(IndeterminateDirections)
MYLLER_GEOM_ERROR(NonholonomyViolated)
MYLLER_GEOM_ERROR(NonFiniteResult)
MYLLER_NODE_ERROR(VanishingCurvature)
MYLLER_NODE_ERROR(NotAConfiguration)
MYLLER_NODE_ERROR(NotTangent)
MYLLER_NODE_ERROR(VanishingG)
MYLLER_NODE_ERROR(NotArclength)
MYLLER_NODE_ERROR(NotTangentToDistribution)

#undef MYLLER_GEOM_ERROR
#undef MYLLER_NODE_ERROR

// Raised for bad input that is not a geometric degeneracy (length mismatch, bad ranges).
class InvalidArgument : public ValidationError {
 public:
  explicit InvalidArgument(const std::string& what) : ValidationError("InvalidArgument: " + what) {}
};

}  // namespace myller
