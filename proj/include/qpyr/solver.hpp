#pragma once

// Enumeration of convex realizations of eight edge lengths.  Everything works
// in normalized units (lengths divided by l1) and squares lengths internally.
// The sweep parameter is alpha in (0, pi), the angle of edge AD against AB:
// D = l4 (cos a, sin a), C comes from intersecting circles about B and D (two
// branches), the apex from the spheres about A, B, D, and a realization of the
// full set is a root of |EC|^2(alpha) - l7^2 on an admissible interval.

#include <optional>
#include <vector>

#include "qpyr/geometry.hpp"

namespace qpyr {

inline constexpr int kDefaultGrid = 8192;

enum class BaseReason { Ok, CirclesDisjoint, CoincidentCenters };

struct BaseCandidates {
  std::vector<BaseQuad> quads;  // 0, 1, or 2 entries; branch = index convention
  BaseReason reason = BaseReason::Ok;
};

// Both base candidates at a given angle.  Throws Errc::bad_input unless
// alpha is in (0, pi) and the lengths are positive.
BaseCandidates base_from_angle(double l2, double l3, double l4, double alpha);

// Apex solve from the spheres about A, B, D.  x3 is linear in the squared
// lengths: x3 = (1 + l5^2 - l6^2)/2; y3 follows from the A/D pair; z3sq may be
// negative (recorded so admissibility boundaries can be located).
// Throws Errc::collinear_abd when D lies on the x-axis.
struct ApexSolution {
  double x3 = 0.0, y3 = 0.0, z3sq = 0.0;
  bool real() const { return z3sq >= 0.0; }
  double z3() const { return std::sqrt(z3sq); }
};

ApexSolution apex_solve(double l5, double l6, double l8, const BaseQuad& q);

// none when z3^2 < 0.
std::optional<Vec3> apex_from_three(double l5, double l6, double l8,
                                    const BaseQuad& q);

struct SweepSample {
  double alpha = 0.0;
  int branch = 0;
  double ec2 = 0.0;   // |EC|^2, analytically continued where z3sq < 0
  double z3sq = 0.0;
  BaseClass base_class = BaseClass::Degenerate;
  bool admissible = false;  // ConvexCCW and z3sq > 0
};

struct AdmissibleInterval {
  int branch = 0;
  double alpha_lo = 0.0, alpha_hi = 0.0;  // refined to 1e-12 in alpha
  double ec2_lo = 0.0, ec2_hi = 0.0;      // |EC|^2 at the refined endpoints
};

struct SweepProfile {
  EdgeLengthSet lengths;  // normalized; the l7 slot is not used by the sweep
  double alpha_lo = 0.0, alpha_hi = 0.0;
  int grid = 0;
  std::vector<SweepSample> samples;  // ordered by (alpha, branch)
  std::vector<AdmissibleInterval> intervals;
};

// Samples |EC|^2 on grid+1 evenly spaced angles over [alpha_lo, alpha_hi]
// intersected with (0, pi).  l7 is ignored.  Requires grid >= 2 and
// 0 <= alpha_lo < alpha_hi <= pi.
SweepProfile ec_profile(const EdgeLengthSet& L, double alpha_lo = 0.0,
                        double alpha_hi = 0.0 /* 0,0 -> full (0, pi) */,
                        int grid = kDefaultGrid);

// Re-evaluates one branch of a profile's sweep at an arbitrary angle.
std::optional<SweepSample> evaluate_branch(const SweepProfile& p, double alpha,
                                           int branch);

enum class CriticalKind { LocalMin, LocalMax, LeftEndpoint, RightEndpoint };

struct CriticalPoint {
  double alpha = 0.0;
  double value = 0.0;  // |EC|^2 at alpha
  CriticalKind kind = CriticalKind::LocalMin;
  int branch = 0;
};

// Endpoints of every admissible interval plus interior extrema; interior
// brackets come from first-difference sign changes and are refined by
// golden-section search to 1e-10 in alpha.
std::vector<CriticalPoint> critical_points(const SweepProfile& p);

struct SolveOptions {
  int grid = kDefaultGrid;
  double alpha_tol = 1e-13;       // bisection width for root brackets
  double residual_tol = 1e-12;    // max-norm target for polished roots
  double congruence_tol = 1e-7;   // dedup tolerance
  double tangency_tol = 1e-9;     // |f| bound for double roots without sign change
  bool include_degenerate = false;
  int newton_max_iter = 50;
};

enum class RealizeReason { Ok, ProfileEmpty };

struct RealizeResult {
  std::vector<Realization> realizations;  // sorted by alpha, pairwise non-congruent
  RealizeReason reason = RealizeReason::Ok;
};

// All convex realizations of L up to congruence.  Roots of |EC|^2 - l7^2 are
// bracketed on the admissible intervals, bisected to alpha_tol, and polished
// by a damped Newton iteration on the seven squared-length residuals.
// Tangential double roots are counted once.  include_degenerate admits the
// closure (Degenerate bases, z3 = 0).
RealizeResult find_realizations(const EdgeLengthSet& L,
                                const SolveOptions& opts = {});

// Pyramid over the parallelogram D = (a1, b1), C = (a1+1, b1) with the apex
// above the center; the apex is then equidistant from A,C and from B,D.
// Requires b1 > 0 and c3 > 0.
Realization branch_parallelogram(double a1, double b1, double c3);

// Companion base point D = (a1, b1) forced by C = (a2, b2) on the non-convex
// elimination branch; satisfies a2*b1 - b2*a1 = -b2 identically.  Throws
// Errc::origin_input when (a2, b2) = (0, 0).
Vec2 branch_nonconvex(double a2, double b2);

// |EB|^2 for a pyramid over a parallelogram with side lengths p, q, diagonal
// |AC| = d1 and lateral edge |EA| = l5 (apex over the center):
// |EB|^2 = l5^2 + (p^2 + q^2)/2 - d1^2/2, strictly decreasing in d1.
// Throws Errc::apex_impossible when l5 < d1/2, Errc::bad_input when d1
// violates the parallelogram bounds |p - q| <= d1 <= p + q.
double parallelogram_eb2(double p, double q, double l5, double d1);

}  // namespace qpyr
