#pragma once

// Core types for labelled quadrangular pyramids ABCDE in standard position:
// A = (0,0,0), B = (1,0,0) after scaling edge AB to unit length, base ABCD in
// the z = 0 plane on the y >= 0 side, apex E strictly above (z3 > 0).
// Congruence of labelled pyramids includes mirror images; standard position is
// the canonical representative of each congruence class.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "qpyr/error.hpp"

namespace qpyr {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

// Default tolerance for orientation tests, in normalized units (|AB| = 1).
inline constexpr double kOrientationEps = 1e-10;

enum class BaseClass { ConvexCCW, NonConvexSimple, SelfIntersecting, Degenerate };

const char* to_string(BaseClass c);  // "convex" | "nonconvex" | "selfint" | "degenerate"

// The eight edge lengths in fixed order |AB| |BC| |CD| |DA| |EA| |EB| |EC| |ED|.
// All entries strictly positive; constructors throw Errc::bad_input otherwise.
class EdgeLengthSet {
public:
  explicit EdgeLengthSet(const std::array<double, 8>& lengths);

  // 1-based accessors: l(1) = |AB| ... l(8) = |ED|.
  double l(int k) const { return l_[static_cast<size_t>(k - 1)]; }
  double sq(int k) const { return l(k) * l(k); }
  const std::array<double, 8>& values() const { return l_; }

  // All entries divided by l1, so l(1) == 1.
  EdgeLengthSet normalized() const;

  // Necessary realizability conditions: each face satisfies its polygon
  // inequality.  Returns the names of violated faces ("ABCD", "EAB", ...).
  std::vector<std::string> face_violations() const;

private:
  std::array<double, 8> l_;
};

// Base quadrilateral in standard position; A = (0,0) and B = (1,0) implicit,
// D = (x1, y1), C = (x2, y2).  For solver outputs the base lies in the upper
// half-plane (y1 >= 0, y2 >= 0, not both zero).
struct BaseQuad {
  double x1 = 0.0, y1 = 0.0;  // D
  double x2 = 0.0, y2 = 0.0;  // C

  Vec2 a() const { return {0.0, 0.0}; }
  Vec2 b() const { return {1.0, 0.0}; }
  Vec2 c() const { return {x2, y2}; }
  Vec2 d() const { return {x1, y1}; }
};

struct CongruenceTolerance {
  double tol = 1e-7;
};

// A labelled pyramid in standard position.  `scale` is the factor 1/|AB|
// applied to the original coordinates during normalization; multiply the
// stored coordinates by 1/scale to recover original units.
struct Realization {
  BaseQuad base;
  double x3 = 0.0, y3 = 0.0, z3 = 0.0;  // apex E
  double scale = 1.0;
  BaseClass base_class = BaseClass::ConvexCCW;

  Vec3 apex() const { return {x3, y3, z3}; }
  // Angle of edge AD against AB; the sweep parameter this realization sits at.
  double alpha() const { return std::atan2(base.y1, base.x1); }
};

// Maps five labelled points to standard position.  `tol` (normalized units)
// bounds the allowed base-plane deviation of C and D, and the minimum apex
// height.  Throws: degenerate_edge (|AB| = 0), non_coplanar_base, flat_pyramid.
// Congruent inputs, mirror images included, map to identical coordinates.
Realization normalize_to_standard(Vec3 A, Vec3 B, Vec3 C, Vec3 D, Vec3 E,
                                  double tol = 1e-9);

// The eight edge lengths of a realization, in normalized units by default;
// with original_units = true they are rescaled by 1/scale.
EdgeLengthSet edge_lengths(const Realization& r, bool original_units = false);

// Orientation-based classification of the base.  ConvexCCW iff all four cross
// products of consecutive edge vectors exceed eps; Degenerate if any lies in
// [-eps, eps]; otherwise SelfIntersecting when a pair of opposite edges meets,
// else NonConvexSimple.
BaseClass classify_base(const BaseQuad& q, double eps = kOrientationEps);

// True iff the closed segments [p1,p2] and [q1,q2] share a point.  Orientation
// signs within eps of zero are treated as collinear.
bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2,
                        double eps = kOrientationEps);

// Componentwise comparison of the seven coordinates of two standard-position
// realizations.
bool congruent(const Realization& r1, const Realization& r2,
               CongruenceTolerance tol = {});

}  // namespace qpyr
