#pragma once

// Numerical rigidity analysis of standard-position pyramids.  The seven free
// coordinates are c = (x1, y1, x2, y2, x3, y3, z3); the seven constraints are
// the squared lengths of DA, BC, CD, EA, EB, ED, EC (AB is pinned by standard
// position).  A configuration is reported Rigid when the constraint Jacobian
// has trivial kernel; a one-dimensional kernel is the signature of the
// flexible family of self-intersecting pyramids, which can be traced by
// predictor-corrector continuation.

#include <Eigen/Core>
#include <array>
#include <optional>
#include <vector>

#include "qpyr/geometry.hpp"

namespace qpyr {

using Vector7 = Eigen::Matrix<double, 7, 1>;
using Matrix7 = Eigen::Matrix<double, 7, 7>;

struct CoordVector {
  double x1 = 0.0, y1 = 0.0;  // D
  double x2 = 0.0, y2 = 0.0;  // C
  double x3 = 0.0, y3 = 0.0, z3 = 0.0;  // E

  static CoordVector from(const Realization& r) {
    return {r.base.x1, r.base.y1, r.base.x2, r.base.y2, r.x3, r.y3, r.z3};
  }
  std::array<double, 7> data() const { return {x1, y1, x2, y2, x3, y3, z3}; }
  static CoordVector from_data(const std::array<double, 7>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
  }
};

// Residual order is fixed: DA, BC, CD, EA, EB, ED, EC.  Targets are the
// squared entries of L after normalization by l1.
std::array<double, 7> residuals(const CoordVector& c, const EdgeLengthSet& L);

double residual_norm(const CoordVector& c, const EdgeLengthSet& L);  // max-norm

// Analytic Jacobian of the residuals; rows are linear in the coordinates and
// independent of the length targets.
Matrix7 jacobian(const CoordVector& c);

struct RankInfo {
  std::array<double, 7> singular_values{};  // descending
  int kernel_dim = 0;  // #(sigma_i < rank_tol * sigma_max)
};

RankInfo rank_analysis(const Matrix7& J, double rank_tol = 1e-8);

enum class Verdict { Rigid, InfinitesimallyFlexible };

struct RigidityReport {
  std::array<double, 7> residuals{};
  Matrix7 jacobian = Matrix7::Zero();
  std::array<double, 7> singular_values{};
  int kernel_dim = 0;
  Verdict verdict = Verdict::Rigid;
};

// Requires residuals <= 1e-9 componentwise (throws Errc::not_a_realization).
RigidityReport rigidity_verdict(const Realization& r, const EdgeLengthSet& L,
                                double rank_tol = 1e-8);

// Closed form for the flexible family of self-intersecting pyramids,
// parametrized by y1 in (0, sqrt(5)]:
//   y3 = (3 - sqrt(5 - y1^2)) / y1,  x1 = 3 - y1 y3,  y2 = 2 / y3,
//   x2 = (4 - y1 y2) / (x1 - 1),     x3 = 1,          z3 = +sqrt(2 - y3^2).
// Throws: discriminant_negative (y1^2 > 5), height_imaginary (y3^2 > 2),
// division_breakdown (x1 = 1 or y3 = 0 within 1e-12).
struct FlexSample {
  double y1 = 0.0, y3 = 0.0, x1 = 0.0, y2 = 0.0, x2 = 0.0, z3 = 0.0;
  CoordVector coords() const { return {x1, y1, x2, y2, 1.0, y3, z3}; }
};

FlexSample flex_sample(double y1);

// Unit kernel vector of the Jacobian (sign fixed: the component of largest
// magnitude is positive).  none when the kernel is trivial; throws
// Errc::ambiguous_kernel when the kernel dimension exceeds one.
std::optional<Vector7> flex_tangent(const CoordVector& c,
                                    double rank_tol = 1e-8);

enum class TraceStop { StepLimit, KernelCollapse, CorrectionDiverged };

struct TraceResult {
  std::vector<CoordVector> points;  // starts at c0
  TraceStop stop = TraceStop::StepLimit;
  std::string detail;
};

// Predictor-corrector continuation of the flexible family: Euler predictor of
// size h along the kernel direction, Newton corrector restricted to the
// hyperplane orthogonal to the tangent (residual target 1e-11), step halving
// down to |h| = 1e-5.  The sign of h selects the direction.  Requires
// residuals(c0) <= 1e-10 and kernel dimension exactly 1 at c0 (throws
// Errc::not_a_realization / Errc::not_flexible).  Stops early with
// KernelCollapse at family endpoints (kernel dimension change or z3 -> 0)
// or CorrectionDiverged when no step size succeeds.
TraceResult trace_family(const CoordVector& c0, const EdgeLengthSet& L,
                         int steps, double h);

}  // namespace qpyr
