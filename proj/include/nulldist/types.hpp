#ifndef NULLDIST_TYPES_HPP
#define NULLDIST_TYPES_HPP

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nulldist {

// Spacetime dimension n+1 is a runtime quantity but never large; fixed
// maximum storage keeps metric evaluation off the heap.
inline constexpr int kMaxDim = 6;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
template <typename Scalar>
using MatrixX =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

enum class TimeSense { Future, Past, None };

enum class Errc {
  OutOfDomain,
  ZeroVector,
  NotCausal,
  UnknownName,
  NonPositiveConformalFactor,
  CyclicGraph,
  NoCausalPairs,
  EmptyGrid,
  ExcisionSwallowsBox,
  GridTooLarge,
  NodeNotInGrid,
  Disconnected,
  InvalidSegment,
  BallExitsGrid,
  LeftDomain,
  StepTooLarge,
  NoConvergence,
  OnAxisDegenerate,
  MapLeavesGrid,
  SingularJacobian,
  NonPositivePhi,
  InvalidArgument,
  SceneParse,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Axis-aligned coordinate box [lo, hi].
struct Box {
  Vector lo;
  Vector hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vector& x, double slack = 0.0) const {
    for (int k = 0; k < dim(); ++k) {
      if (x[k] < lo[k] - slack || x[k] > hi[k] + slack) return false;
    }
    return true;
  }
};

}  // namespace nulldist

#endif  // NULLDIST_TYPES_HPP
