#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "qpyr/rigidity.hpp"
#include "qpyr/solver.hpp"

using namespace qpyr;

namespace {

constexpr double kPi = std::numbers::pi;

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a qpyr::Error");
  return Errc::bad_input;
}

// The three-realization length family: all lengths fixed except |EC| = r.
EdgeLengthSet window_lengths(double r) {
  return EdgeLengthSet({1.0, 2.0, std::sqrt(2.0), 1.0, std::sqrt(2.0),
                        std::sqrt(5.0), r, std::sqrt(3.0)});
}

bool has_point(const BaseCandidates& bc, double x, double y, double tol = 1e-9) {
  for (const BaseQuad& q : bc.quads)
    if (std::abs(q.x2 - x) <= tol && std::abs(q.y2 - y) <= tol) return true;
  return false;
}

}  // namespace

TEST_CASE("base candidates at the right angle of the window family") {
  const BaseCandidates bc = base_from_angle(2.0, std::sqrt(2.0), 1.0, kPi / 2);
  REQUIRE(bc.reason == BaseReason::Ok);
  REQUIRE(bc.quads.size() == 2);
  for (const BaseQuad& q : bc.quads) {
    CHECK(q.x1 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(q.y1 == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(has_point(bc, 1.0, 2.0));
  CHECK(has_point(bc, -1.0, 0.0));

  int convex = 0;
  for (const BaseQuad& q : bc.quads) {
    if (classify_base(q) == BaseClass::ConvexCCW) {
      ++convex;
      CHECK(q.x2 == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(q.y2 == doctest::Approx(2.0).epsilon(1e-12));
    }
  }
  CHECK(convex == 1);
}

TEST_CASE("base candidates for the unit-square family") {
  const BaseCandidates bc = base_from_angle(1.0, 1.0, 1.0, kPi / 2);
  REQUIRE(bc.quads.size() == 2);
  CHECK(has_point(bc, 1.0, 1.0));
  CHECK(has_point(bc, 0.0, 0.0));
}

TEST_CASE("base candidates report disjoint circles") {
  const BaseCandidates bc = base_from_angle(0.1, 0.1, 1.0, kPi / 2);
  CHECK(bc.quads.empty());
  CHECK(bc.reason == BaseReason::CirclesDisjoint);
}

TEST_CASE("base candidate input validation") {
  CHECK(code_of([] { base_from_angle(1, 1, 1, 0.0); }) == Errc::bad_input);
  CHECK(code_of([] { base_from_angle(1, 1, 1, kPi); }) == Errc::bad_input);
  CHECK(code_of([] { base_from_angle(-1, 1, 1, 1.0); }) == Errc::bad_input);
  const BaseCandidates bc = base_from_angle(1.0, 1.0, 1.0, 1e-15);
  CHECK(bc.quads.empty());
  CHECK(bc.reason == BaseReason::CoincidentCenters);
}

TEST_CASE("base candidates agree with the angle-at-B oracle") {
  oracle::Rng rng(314159ULL);
  for (int trial = 0; trial < 2000; ++trial) {
    const double l2 = rng.uniform(0.2, 3.0);
    const double l3 = rng.uniform(0.2, 3.0);
    const double l4 = rng.uniform(0.2, 3.0);
    const double alpha = rng.uniform(0.05, kPi - 0.05);
    const BaseCandidates bc = base_from_angle(l2, l3, l4, alpha);
    const auto ref = oracle::base_by_angle(l2, l3, l4, alpha);
    REQUIRE(ref.has_value());
    REQUIRE(bc.quads.size() == ref->c.size());
    for (size_t b = 0; b < bc.quads.size(); ++b) {
      CHECK(std::abs(bc.quads[b].x2 - ref->c[b].x) <= 1e-9);
      CHECK(std::abs(bc.quads[b].y2 - ref->c[b].y) <= 1e-9);
      CHECK(oracle::dist2(bc.quads[b].x2, bc.quads[b].y2, 1, 0) ==
            doctest::Approx(l2).epsilon(1e-10));
      CHECK(oracle::dist2(bc.quads[b].x2, bc.quads[b].y2, bc.quads[b].x1,
                          bc.quads[b].y1) == doctest::Approx(l3).epsilon(1e-10));
    }
  }
}

TEST_CASE("apex solve on the window family") {
  const double l5 = std::sqrt(2.0), l6 = std::sqrt(5.0), l8 = std::sqrt(3.0);

  // x3 is independent of the base: (1 + 2 - 5) / 2 = -1
  for (double alpha : {1.0, 1.3, kPi / 2, 2.0}) {
    const BaseCandidates bc = base_from_angle(2.0, std::sqrt(2.0), 1.0, alpha);
    for (const BaseQuad& q : bc.quads) {
      const ApexSolution s = apex_solve(l5, l6, l8, q);
      CHECK(s.x3 == doctest::Approx(-1.0).epsilon(1e-13));
    }
  }

  const ApexSolution mid = apex_solve(l5, l6, l8, BaseQuad{0.0, 1.0, 1.0, 2.0});
  CHECK(mid.x3 == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(mid.y3 == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(mid.real());
  CHECK(mid.z3() == doctest::Approx(1.0).epsilon(1e-14));

  const auto apex = apex_from_three(l5, l6, l8, BaseQuad{0.0, 1.0, 1.0, 2.0});
  REQUIRE(apex.has_value());
  CHECK(apex->x == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(apex->z == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("apex solve symmetry and failure modes") {
  // equal A- and B-spheres put the apex on the bisector plane
  const ApexSolution s = apex_solve(1.3, 1.3, 1.1, BaseQuad{0.2, 1.1, 1.0, 1.4});
  CHECK(s.x3 == doctest::Approx(0.5).epsilon(1e-15));

  CHECK(code_of([] {
          apex_solve(1.0, 1.0, 1.0, BaseQuad{0.5, 0.0, 1.0, 1.0});
        }) == Errc::collinear_abd);

  // incompatible sphere radii force an imaginary height
  const ApexSolution far = apex_solve(0.3, 0.9, 2.5, BaseQuad{0.0, 1.0, 1.0, 1.0});
  CHECK(!far.real());
  CHECK(far.z3sq < 0.0);
  CHECK(!apex_from_three(0.3, 0.9, 2.5, BaseQuad{0.0, 1.0, 1.0, 1.0}).has_value());
}

TEST_CASE("apex solve agrees with the linear-solve oracle") {
  oracle::Rng rng(2718281ULL);
  for (int trial = 0; trial < 2000; ++trial) {
    const BaseQuad q{rng.uniform(-2, 2), rng.uniform(0.1, 2.5),
                     rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const double l5 = rng.uniform(0.2, 3.0);
    const double l6 = rng.uniform(0.2, 3.0);
    const double l8 = rng.uniform(0.2, 3.0);
    const ApexSolution s = apex_solve(l5, l6, l8, q);
    const auto ref = oracle::apex_by_solve(l5, l6, l8, q.x1, q.y1);
    REQUIRE(ref.has_value());
    CHECK(std::abs(s.x3 - ref->x3) <= 1e-12);
    CHECK(std::abs(s.y3 - ref->y3) <= 1e-12 * (1.0 + std::abs(ref->y3)));
    CHECK(std::abs(s.z3sq - ref->z3sq) <= 1e-11 * (1.0 + std::abs(ref->z3sq)));
  }
}

TEST_CASE("sweep profile of the window family") {
  const SweepProfile p = ec_profile(window_lengths(1.7));
  REQUIRE(p.intervals.size() == 1);
  const AdmissibleInterval& iv = p.intervals[0];

  // left endpoint: A, C, D collinear, cos(alpha) = 2 - sqrt(2)
  const double alpha0 = std::acos(2.0 - std::sqrt(2.0));
  CHECK(std::abs(iv.alpha_lo - alpha0) <= 1e-8);
  CHECK(std::abs(iv.ec2_lo - (5.0 + 2.0 * std::sqrt(2.0))) <= 1e-6);

  // right endpoint: apex height reaches zero at 3*pi/4
  CHECK(std::abs(iv.alpha_hi - 3.0 * kPi / 4.0) <= 1e-9);
  CHECK(std::abs(iv.ec2_hi - 9.3067) <= 1e-3);

  // samples are ordered, in range, and flagged consistently
  for (size_t i = 1; i < p.samples.size(); ++i)
    CHECK(p.samples[i - 1].alpha <= p.samples[i].alpha);
  for (const SweepSample& s : p.samples) {
    CHECK(s.alpha > 0.0);
    CHECK(s.alpha < kPi);
    CHECK(s.admissible ==
          (s.base_class == BaseClass::ConvexCCW && s.z3sq > 0.0));
    if (s.alpha > iv.alpha_lo + 1e-9 && s.alpha < iv.alpha_hi - 1e-9 &&
        s.branch == iv.branch)
      CHECK(s.admissible);
  }
}

TEST_CASE("sweep samples match the end-to-end oracle") {
  const EdgeLengthSet L = window_lengths(1.7);
  const SweepProfile p = ec_profile(L, 0.0, 0.0, 512);
  REQUIRE(!p.samples.empty());
  for (const SweepSample& s : p.samples) {
    const auto ref = oracle::ec2_by_oracle(L, s.alpha, s.branch);
    REQUIRE(ref.has_value());
    CHECK(std::abs(s.ec2 - *ref) <= 1e-12 * (1.0 + std::abs(*ref)));
  }

  oracle::Rng rng(5150ULL);
  int profiles = 0;
  while (profiles < 10) {
    const EdgeLengthSet R = oracle::random_lengths(rng);
    const SweepProfile q = ec_profile(R, 0.0, 0.0, 64);
    if (q.samples.empty()) continue;
    ++profiles;
    for (const SweepSample& s : q.samples) {
      const auto ref = oracle::ec2_by_oracle(R, s.alpha, s.branch);
      REQUIRE(ref.has_value());
      CHECK(std::abs(s.ec2 - *ref) <= 1e-11 * (1.0 + std::abs(*ref)));
    }
  }
}

TEST_CASE("sweep input validation") {
  CHECK(code_of([] { ec_profile(window_lengths(1.7), 0.0, 0.0, 1); }) ==
        Errc::bad_input);
  CHECK(code_of([] { ec_profile(window_lengths(1.7), 2.0, 1.0, 64); }) ==
        Errc::bad_input);
  CHECK(code_of([] { ec_profile(window_lengths(1.7), -0.5, 1.0, 64); }) ==
        Errc::bad_input);
}

TEST_CASE("evaluate_branch reproduces grid samples") {
  const SweepProfile p = ec_profile(window_lengths(1.7), 0.0, 0.0, 256);
  REQUIRE(!p.samples.empty());
  for (size_t i = 0; i < p.samples.size(); i += 17) {
    const SweepSample& s = p.samples[i];
    const auto again = evaluate_branch(p, s.alpha, s.branch);
    REQUIRE(again.has_value());
    CHECK(again->ec2 == doctest::Approx(s.ec2).epsilon(1e-15));
    CHECK(again->z3sq == doctest::Approx(s.z3sq).epsilon(1e-15));
    CHECK(again->base_class == s.base_class);
  }
}

TEST_CASE("critical points of the window family") {
  const SweepProfile p = ec_profile(window_lengths(1.7));
  const auto pts = critical_points(p);
  REQUIRE(pts.size() == 4);

  CHECK(pts[0].kind == CriticalKind::LeftEndpoint);
  CHECK(std::abs(pts[0].alpha - std::acos(2.0 - std::sqrt(2.0))) <= 1e-8);
  CHECK(std::abs(pts[0].value - (5.0 + 2.0 * std::sqrt(2.0))) <= 1e-6);

  CHECK(pts[1].kind == CriticalKind::LocalMax);
  CHECK(std::abs(pts[1].alpha - kPi / 2) <= 1e-6);
  CHECK(std::abs(pts[1].value - 9.0) <= 1e-9);

  CHECK(pts[2].kind == CriticalKind::LocalMin);
  CHECK(std::abs(pts[2].alpha - 1.9404) <= 5e-3);
  CHECK(std::abs(pts[2].value - 8.9555) <= 2e-3);

  CHECK(pts[3].kind == CriticalKind::RightEndpoint);
  CHECK(std::abs(pts[3].alpha - 3.0 * kPi / 4.0) <= 1e-9);
  CHECK(std::abs(pts[3].value - 9.3067) <= 1e-3);
}

TEST_CASE("the rhombus family sweeps linearly in cos(alpha)") {
  // l2 = l3 = l4 = 1 makes the movable branch the parallelogram C = B + D and
  // pins the other branch at C = A; with l5 = l6 = l8 the profile reduces to
  // exactly l5^2 + 2 cos(alpha): monotone, and point-symmetric about
  // (pi/2, l5^2).
  const EdgeLengthSet L({1, 1, 1, 1, 1.2, 1.2, 1.0, 1.2});
  const int grid = 512;
  const SweepProfile p = ec_profile(L, 0.0, 0.0, grid);

  std::map<int, std::array<double, 2>> rows;  // grid index -> ec2 per branch
  const double step = kPi / grid;
  for (const SweepSample& s : p.samples) {
    const int i = static_cast<int>(std::lround(s.alpha / step));
    // near the ends of the range the circle intersection is ill-conditioned
    // and the formal ec2 grows, so the comparison is absolute at 1e-10
    rows[i][static_cast<size_t>(s.branch)] = s.ec2;
    if (s.branch == 1)
      CHECK(std::abs(s.ec2 - (1.44 + 2.0 * std::cos(s.alpha))) <= 1e-10);
    else
      CHECK(std::abs(s.ec2 - 1.44) <= 1e-10);
  }
  for (const auto& [i, ec2] : rows) {
    const auto mirror = rows.find(grid - i);
    if (mirror == rows.end()) continue;
    CHECK(std::abs(ec2[1] + mirror->second[1] - 2.0 * 1.44) <= 1e-10);
  }

  // monotone admissible stretch: only the two endpoint critical points
  for (const auto& pt : critical_points(p)) {
    CHECK((pt.kind == CriticalKind::LeftEndpoint ||
           pt.kind == CriticalKind::RightEndpoint));
  }
}

TEST_CASE("realization counts across the window") {
  auto count = [](double r_sq) {
    const RealizeResult res = find_realizations(window_lengths(std::sqrt(r_sq)));
    for (size_t i = 0; i < res.realizations.size(); ++i) {
      const Realization& r = res.realizations[i];
      CHECK(r.base_class == BaseClass::ConvexCCW);
      CHECK(r.z3 > 0.0);
      CHECK(residual_norm(CoordVector::from(r),
                          window_lengths(std::sqrt(r_sq))) <= 1e-12);
      for (size_t j = i + 1; j < res.realizations.size(); ++j)
        CHECK(!congruent(r, res.realizations[j], {1e-7}));
      if (i > 0) CHECK(res.realizations[i - 1].alpha() <= r.alpha());
    }
    return res.realizations.size();
  };
  CHECK(count(8.98) == 3);
  CHECK(count(9.2) == 1);
  CHECK(count(8.5) == 1);
  CHECK(count(9.0) == 2);
}

TEST_CASE("unrealizable lengths yield an empty profile") {
  const RealizeResult res =
      find_realizations(EdgeLengthSet({1, 1, 1, 10, 1, 1, 1, 1}));
  CHECK(res.realizations.empty());
  CHECK(res.reason == RealizeReason::ProfileEmpty);
}

TEST_CASE("round trip on seeded convex pyramids") {
  oracle::Rng rng(99887ULL);
  for (int trial = 0; trial < 25; ++trial) {
    const Realization r = oracle::random_convex_pyramid(rng);
    const EdgeLengthSet L = edge_lengths(r);
    const RealizeResult res = find_realizations(L);
    CHECK(res.realizations.size() <= 4);
    bool recovered = false;
    for (const Realization& cand : res.realizations)
      recovered = recovered || congruent(cand, r, {1e-7});
    CHECK(recovered);
  }
}

TEST_CASE("parallelogram pyramid has the midpoint symmetries") {
  const Realization sq = branch_parallelogram(0.0, 1.0, 1.0);
  CHECK(sq.base.x2 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sq.base.y2 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sq.x3 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sq.y3 == doctest::Approx(0.5).epsilon(1e-15));
  const EdgeLengthSet sql = edge_lengths(sq);
  for (int k = 5; k <= 8; ++k)
    CHECK(sql.l(k) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));

  const Realization r = branch_parallelogram(0.3, 0.8, 2.0);
  const EdgeLengthSet L = edge_lengths(r);
  CHECK(L.sq(5) - L.sq(7) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(L.sq(6) - L.sq(8) == doctest::Approx(0.0).epsilon(1e-14));

  oracle::Rng rng(16180ULL);
  for (int trial = 0; trial < 200; ++trial) {
    const double a1 = rng.uniform(-2.0, 2.0);
    const double b1 = rng.uniform(0.05, 2.0);
    const double c3 = rng.uniform(0.05, 2.0);
    const Realization q = branch_parallelogram(a1, b1, c3);
    // diagonals AC and BD share their midpoint
    CHECK((0.0 + q.base.x2) / 2 ==
          doctest::Approx((1.0 + q.base.x1) / 2).epsilon(1e-14));
    CHECK((0.0 + q.base.y2) / 2 ==
          doctest::Approx((0.0 + q.base.y1) / 2).epsilon(1e-14));
    const EdgeLengthSet e = edge_lengths(q);
    CHECK(std::abs(e.sq(5) - e.sq(7)) <= 1e-14 * (1.0 + e.sq(5)));
    CHECK(std::abs(e.sq(6) - e.sq(8)) <= 1e-14 * (1.0 + e.sq(6)));
  }

  CHECK(code_of([] { branch_parallelogram(0.0, 0.0, 1.0); }) == Errc::bad_input);
  CHECK(code_of([] { branch_parallelogram(0.0, 1.0, -1.0); }) == Errc::bad_input);
}

TEST_CASE("companion base point on the fixed-orientation branch") {
  const Vec2 p1 = branch_nonconvex(2.0, 1.0);
  CHECK(p1.x == doctest::Approx(7.0 / 5.0).epsilon(1e-15));
  CHECK(p1.y == doctest::Approx(1.0 / 5.0).epsilon(1e-15));
  CHECK(2.0 * p1.y - 1.0 * p1.x == doctest::Approx(-1.0).epsilon(1e-14));

  // boundary case b1 = 0; the determinant identity still forces a1 = 1
  const Vec2 p2 = branch_nonconvex(1.0, 1.0);
  CHECK(p2.x == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p2.y == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(1.0 * p2.y - 1.0 * p2.x == doctest::Approx(-1.0).epsilon(1e-14));

  CHECK(code_of([] { branch_nonconvex(0.0, 0.0); }) == Errc::origin_input);

  oracle::Rng rng(868676ULL);
  for (int trial = 0; trial < 10000; ++trial) {
    const double a2 = rng.uniform(-3.0, 3.0);
    const double b2 = rng.uniform(1e-3, 3.0);
    const Vec2 d = branch_nonconvex(a2, b2);
    CHECK(std::abs(a2 * d.y - b2 * d.x + b2) <= 1e-12 * (1.0 + std::abs(b2)));
    if (d.y > 0.0)
      CHECK(segments_intersect({0, 0}, {d.x, d.y}, {1, 0}, {a2, b2}));
  }
}

TEST_CASE("apex edge of a parallelogram pyramid shrinks as the diagonal grows") {
  CHECK(parallelogram_eb2(1.0, 1.0, std::sqrt(1.5), std::sqrt(2.0)) ==
        doctest::Approx(1.5).epsilon(1e-14));

  CHECK(parallelogram_eb2(1.0, 2.0, 2.0, 2.0) ==
        doctest::Approx(4.5).epsilon(1e-13));
  CHECK(parallelogram_eb2(1.0, 2.0, 2.0, 2.2) ==
        doctest::Approx(4.08).epsilon(1e-13));
  CHECK(parallelogram_eb2(1.0, 2.0, 2.0, 2.4) ==
        doctest::Approx(3.62).epsilon(1e-13));

  // flat-apex limit d1 = 2 l5
  CHECK(parallelogram_eb2(1.0, 2.0, 1.25, 2.5) ==
        doctest::Approx((1.0 + 4.0) / 2.0 - 1.5625).epsilon(1e-13));

  CHECK(code_of([] { parallelogram_eb2(1.0, 2.0, 1.0, 2.5); }) ==
        Errc::apex_impossible);
  CHECK(code_of([] { parallelogram_eb2(1.0, 2.0, 2.0, 0.5); }) ==
        Errc::bad_input);
  CHECK(code_of([] { parallelogram_eb2(1.0, 2.0, 9.0, 3.5); }) ==
        Errc::bad_input);

  // strict monotonicity on a grid
  double prev = parallelogram_eb2(1.2, 1.9, 2.5, 0.8);
  for (int i = 1; i <= 50; ++i) {
    const double d1 = 0.8 + (3.1 - 0.8) * i / 50.0;
    const double cur = parallelogram_eb2(1.2, 1.9, 2.5, d1);
    CHECK(cur < prev);
    prev = cur;
  }
}
