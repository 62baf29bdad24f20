#include "qpyr/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace qpyr {

const char* to_string(BaseClass c) {
  switch (c) {
    case BaseClass::ConvexCCW: return "convex";
    case BaseClass::NonConvexSimple: return "nonconvex";
    case BaseClass::SelfIntersecting: return "selfint";
    case BaseClass::Degenerate: return "degenerate";
  }
  return "degenerate";
}

EdgeLengthSet::EdgeLengthSet(const std::array<double, 8>& lengths) : l_(lengths) {
  for (double v : l_) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(Errc::bad_input, "edge lengths must be strictly positive");
  }
}

EdgeLengthSet EdgeLengthSet::normalized() const {
  std::array<double, 8> out = l_;
  const double inv = 1.0 / l_[0];
  for (double& v : out) v *= inv;
  return EdgeLengthSet(out);
}

std::vector<std::string> EdgeLengthSet::face_violations() const {
  std::vector<std::string> bad;
  auto polygon_ok = [](std::initializer_list<double> sides) {
    double total = 0.0, largest = 0.0;
    for (double s : sides) {
      total += s;
      largest = std::max(largest, s);
    }
    return largest <= total - largest;
  };
  if (!polygon_ok({l(1), l(2), l(3), l(4)})) bad.push_back("ABCD");
  if (!polygon_ok({l(5), l(6), l(1)})) bad.push_back("EAB");
  if (!polygon_ok({l(6), l(7), l(2)})) bad.push_back("EBC");
  if (!polygon_ok({l(7), l(8), l(3)})) bad.push_back("ECD");
  if (!polygon_ok({l(8), l(5), l(4)})) bad.push_back("EDA");
  return bad;
}

Realization normalize_to_standard(Vec3 A, Vec3 B, Vec3 C, Vec3 D, Vec3 E,
                                  double tol) {
  const Vec3 ab = B - A;
  const double lab = norm(ab);
  if (!(lab > 1e-15) || !std::isfinite(lab))
    throw Error(Errc::degenerate_edge, "|AB| = 0");
  const double s = 1.0 / lab;

  const Vec3 b = s * (B - A);
  const Vec3 c = s * (C - A);
  const Vec3 d = s * (D - A);
  const Vec3 e = s * (E - A);

  const Vec3 ex = b;  // unit by construction
  Vec3 n = cross(ex, c);
  if (const Vec3 nd = cross(ex, d); norm(nd) > norm(n)) n = nd;
  if (norm(n) < 1e-12) {
    // base collinear; the only candidate base plane contains the apex too
    n = cross(ex, e);
    if (norm(n) < 1e-12)
      throw Error(Errc::flat_pyramid, "all five points are collinear");
  }
  n = (1.0 / norm(n)) * n;

  if (std::abs(dot(c, n)) > tol || std::abs(dot(d, n)) > tol)
    throw Error(Errc::non_coplanar_base, "base points not coplanar with A, B");

  double ze = dot(e, n);
  if (std::abs(ze) <= tol)
    throw Error(Errc::flat_pyramid, "apex lies in the base plane");
  if (ze < 0.0) n = -1.0 * n;  // rotate about AB so the apex is above

  Vec3 ey = cross(n, ex);
  // mirror so the base sits in the upper half-plane (keeps the apex above)
  if (dot(c, ey) + dot(d, ey) < 0.0) ey = -1.0 * ey;

  Realization r;
  r.base.x1 = dot(d, ex);
  r.base.y1 = dot(d, ey);
  r.base.x2 = dot(c, ex);
  r.base.y2 = dot(c, ey);
  r.x3 = dot(e, ex);
  r.y3 = dot(e, ey);
  r.z3 = std::abs(dot(e, n));
  r.scale = s;
  r.base_class = classify_base(r.base);
  return r;
}

EdgeLengthSet edge_lengths(const Realization& r, bool original_units) {
  const Vec2 A{0.0, 0.0}, B{1.0, 0.0}, C = r.base.c(), D = r.base.d();
  const Vec3 E = r.apex();
  auto base_to_apex = [&](Vec2 p) {
    return norm(Vec3{E.x - p.x, E.y - p.y, E.z});
  };
  std::array<double, 8> l = {
      norm(B - A), norm(C - B), norm(D - C), norm(A - D),
      base_to_apex(A), base_to_apex(B), base_to_apex(C), base_to_apex(D)};
  if (original_units) {
    for (double& v : l) v /= r.scale;
  }
  return EdgeLengthSet(l);
}

BaseClass classify_base(const BaseQuad& q, double eps) {
  const Vec2 A = q.a(), B = q.b(), C = q.c(), D = q.d();
  const double c1 = cross(B - A, C - B);
  const double c2 = cross(C - B, D - C);
  const double c3 = cross(D - C, A - D);
  const double c4 = cross(A - D, B - A);
  if (c1 > eps && c2 > eps && c3 > eps && c4 > eps) return BaseClass::ConvexCCW;
  for (double c : {c1, c2, c3, c4})
    if (std::abs(c) <= eps) return BaseClass::Degenerate;
  if (segments_intersect(A, B, C, D, eps) || segments_intersect(B, C, D, A, eps))
    return BaseClass::SelfIntersecting;
  return BaseClass::NonConvexSimple;
}

namespace {

int orientation_sign(Vec2 a, Vec2 b, Vec2 p, double eps) {
  const double v = cross(b - a, p - a);
  if (v > eps) return 1;
  if (v < -eps) return -1;
  return 0;
}

bool in_bounding_box(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2, double eps) {
  const int d1 = orientation_sign(q1, q2, p1, eps);
  const int d2 = orientation_sign(q1, q2, p2, eps);
  const int d3 = orientation_sign(p1, p2, q1, eps);
  const int d4 = orientation_sign(p1, p2, q2, eps);
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && in_bounding_box(q1, q2, p1)) return true;
  if (d2 == 0 && in_bounding_box(q1, q2, p2)) return true;
  if (d3 == 0 && in_bounding_box(p1, p2, q1)) return true;
  if (d4 == 0 && in_bounding_box(p1, p2, q2)) return true;
  return false;
}

bool congruent(const Realization& r1, const Realization& r2,
               CongruenceTolerance tol) {
  const double diffs[7] = {
      r1.base.x1 - r2.base.x1, r1.base.y1 - r2.base.y1,
      r1.base.x2 - r2.base.x2, r1.base.y2 - r2.base.y2,
      r1.x3 - r2.x3, r1.y3 - r2.y3, r1.z3 - r2.z3};
  for (double d : diffs)
    if (std::abs(d) > tol.tol) return false;
  return true;
}

}  // namespace qpyr
