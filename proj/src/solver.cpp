#include "qpyr/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qpyr/rigidity.hpp"

namespace qpyr {

namespace {

constexpr double kPi = std::numbers::pi;

Vector7 to_vec(const CoordVector& c) {
  Vector7 v;
  v << c.x1, c.y1, c.x2, c.y2, c.x3, c.y3, c.z3;
  return v;
}

CoordVector from_vec(const Vector7& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

}  // namespace

BaseCandidates base_from_angle(double l2, double l3, double l4, double alpha) {
  if (!(l2 > 0.0 && l3 > 0.0 && l4 > 0.0))
    throw Error(Errc::bad_input, "lengths must be positive");
  if (!(alpha > 0.0 && alpha < kPi))
    throw Error(Errc::bad_input, "alpha must lie in (0, pi)");

  BaseCandidates out;
  const Vec2 D{l4 * std::cos(alpha), l4 * std::sin(alpha)};
  const Vec2 B{1.0, 0.0};
  const Vec2 bd = D - B;
  const double d2 = dot(bd, bd);
  const double d = std::sqrt(d2);
  if (d < 1e-14) {
    out.reason = BaseReason::CoincidentCenters;
    return out;
  }
  // circle(B, l2) meets circle(D, l3); a = signed distance from B to the chord
  const double a = (l2 * l2 - l3 * l3 + d2) / (2.0 * d);
  const double h2 = l2 * l2 - a * a;
  const double tol_h = 1e-12 * (l2 * l2 + d2);
  if (h2 < -tol_h) {
    out.reason = BaseReason::CirclesDisjoint;
    return out;
  }
  const Vec2 u{bd.x / d, bd.y / d};
  const Vec2 P = B + a * u;
  const Vec2 perp{-u.y, u.x};
  if (h2 <= 0.0) {
    out.quads.push_back(BaseQuad{D.x, D.y, P.x, P.y});  // tangent: one point
    return out;
  }
  const double h = std::sqrt(h2);
  out.quads.push_back(BaseQuad{D.x, D.y, P.x + h * perp.x, P.y + h * perp.y});
  out.quads.push_back(BaseQuad{D.x, D.y, P.x - h * perp.x, P.y - h * perp.y});
  return out;
}

ApexSolution apex_solve(double l5, double l6, double l8, const BaseQuad& q) {
  if (std::abs(q.y1) < 1e-14)
    throw Error(Errc::collinear_abd, "A, B, D collinear: apex height undetermined");
  ApexSolution s;
  s.x3 = (1.0 + l5 * l5 - l6 * l6) / 2.0;
  s.y3 = (q.x1 * q.x1 + q.y1 * q.y1 - 2.0 * q.x1 * s.x3 - (l8 * l8 - l5 * l5)) /
         (2.0 * q.y1);
  s.z3sq = l5 * l5 - s.x3 * s.x3 - s.y3 * s.y3;
  return s;
}

std::optional<Vec3> apex_from_three(double l5, double l6, double l8,
                                    const BaseQuad& q) {
  const ApexSolution s = apex_solve(l5, l6, l8, q);
  if (!s.real()) return std::nullopt;
  return Vec3{s.x3, s.y3, s.z3()};
}

namespace {

// One branch of the sweep at a single angle; nullopt when the base does not
// close there.
std::optional<SweepSample> sample_at(const EdgeLengthSet& Ln, double alpha,
                                     int branch) {
  if (!(alpha > 0.0 && alpha < kPi)) return std::nullopt;
  const BaseCandidates bc =
      base_from_angle(Ln.l(2), Ln.l(3), Ln.l(4), alpha);
  if (bc.quads.empty()) return std::nullopt;
  // a tangent point serves both branches
  const BaseQuad& q = bc.quads[std::min<size_t>(branch, bc.quads.size() - 1)];
  if (std::abs(q.y1) < 1e-14) return std::nullopt;  // apex chart breaks down
  const ApexSolution apex = apex_solve(Ln.l(5), Ln.l(6), Ln.l(8), q);
  SweepSample s;
  s.alpha = alpha;
  s.branch = branch;
  s.z3sq = apex.z3sq;
  s.ec2 = (apex.x3 - q.x2) * (apex.x3 - q.x2) +
          (apex.y3 - q.y2) * (apex.y3 - q.y2) + apex.z3sq;
  s.base_class = classify_base(q);
  s.admissible = s.base_class == BaseClass::ConvexCCW && s.z3sq > 0.0;
  return s;
}

bool admissible_at(const EdgeLengthSet& Ln, double alpha, int branch) {
  const auto s = sample_at(Ln, alpha, branch);
  return s && s->admissible;
}

// Boundary of the admissible set between a true and a false angle, refined to
// 1e-12; returns the admissible-side estimate.
double bisect_admissible(const EdgeLengthSet& Ln, int branch, double a_true,
                         double a_false) {
  for (int it = 0; it < 80 && std::abs(a_false - a_true) > 1e-12; ++it) {
    const double mid = 0.5 * (a_true + a_false);
    if (admissible_at(Ln, mid, branch))
      a_true = mid;
    else
      a_false = mid;
  }
  return a_true;
}

struct GoldenResult {
  double alpha = 0.0;
  double value = 0.0;
};

// Golden-section extremum of f over [a, b]; maximizes when maximize is set.
template <typename F>
GoldenResult golden_section(F&& f, double a, double b, bool maximize,
                            double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  const double sgn = maximize ? -1.0 : 1.0;
  while (b - a > tol) {
    if (sgn * f1 < sgn * f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  const double mid = 0.5 * (a + b);
  return {mid, f(mid)};
}

}  // namespace

SweepProfile ec_profile(const EdgeLengthSet& L, double alpha_lo,
                        double alpha_hi, int grid) {
  if (alpha_lo == 0.0 && alpha_hi == 0.0) alpha_hi = kPi;
  if (!(grid >= 2)) throw Error(Errc::bad_input, "grid must be >= 2");
  if (!(0.0 <= alpha_lo && alpha_lo < alpha_hi && alpha_hi <= kPi + 1e-15))
    throw Error(Errc::bad_input, "alpha range must satisfy 0 <= lo < hi <= pi");

  SweepProfile p{L.normalized(), alpha_lo, std::min(alpha_hi, kPi), grid, {}, {}};
  const int n = grid;
  const double step = (p.alpha_hi - p.alpha_lo) / n;

  // per-branch presence over the grid, for interval extraction
  std::vector<std::array<std::optional<SweepSample>, 2>> at(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double alpha = p.alpha_lo + i * step;
    if (!(alpha > 0.0 && alpha < kPi)) continue;
    const BaseCandidates bc =
        base_from_angle(p.lengths.l(2), p.lengths.l(3), p.lengths.l(4), alpha);
    for (size_t b = 0; b < bc.quads.size(); ++b) {
      auto s = sample_at(p.lengths, alpha, static_cast<int>(b));
      if (!s) continue;
      p.samples.push_back(*s);
      at[i][b] = *s;
    }
  }

  for (int b = 0; b < 2; ++b) {
    int i = 0;
    while (i <= n) {
      if (!(at[i][b] && at[i][b]->admissible)) {
        ++i;
        continue;
      }
      const int i0 = i;
      while (i + 1 <= n && at[i + 1][b] && at[i + 1][b]->admissible) ++i;
      const int i1 = i;

      AdmissibleInterval iv;
      iv.branch = b;
      iv.alpha_lo = (i0 == 0) ? p.alpha_lo + i0 * step
                              : bisect_admissible(p.lengths, b,
                                                  p.alpha_lo + i0 * step,
                                                  p.alpha_lo + (i0 - 1) * step);
      iv.alpha_hi = (i1 == n) ? p.alpha_lo + i1 * step
                              : bisect_admissible(p.lengths, b,
                                                  p.alpha_lo + i1 * step,
                                                  p.alpha_lo + (i1 + 1) * step);
      const auto lo_s = sample_at(p.lengths, iv.alpha_lo, b);
      const auto hi_s = sample_at(p.lengths, iv.alpha_hi, b);
      iv.ec2_lo = lo_s ? lo_s->ec2 : at[i0][b]->ec2;
      iv.ec2_hi = hi_s ? hi_s->ec2 : at[i1][b]->ec2;
      p.intervals.push_back(iv);
      ++i;
    }
  }
  std::sort(p.intervals.begin(), p.intervals.end(),
            [](const AdmissibleInterval& a, const AdmissibleInterval& b) {
              return a.alpha_lo != b.alpha_lo ? a.alpha_lo < b.alpha_lo
                                              : a.branch < b.branch;
            });
  return p;
}

std::optional<SweepSample> evaluate_branch(const SweepProfile& p, double alpha,
                                           int branch) {
  return sample_at(p.lengths, alpha, branch);
}

std::vector<CriticalPoint> critical_points(const SweepProfile& p) {
  std::vector<CriticalPoint> out;
  for (const AdmissibleInterval& iv : p.intervals) {
    // scan nodes: refined endpoints plus the grid samples inside
    std::vector<std::pair<double, double>> nodes;
    nodes.emplace_back(iv.alpha_lo, iv.ec2_lo);
    for (const SweepSample& s : p.samples) {
      if (s.branch == iv.branch && s.alpha > iv.alpha_lo && s.alpha < iv.alpha_hi)
        nodes.emplace_back(s.alpha, s.ec2);
    }
    nodes.emplace_back(iv.alpha_hi, iv.ec2_hi);

    out.push_back({iv.alpha_lo, iv.ec2_lo, CriticalKind::LeftEndpoint, iv.branch});
    auto eval = [&](double alpha) {
      const auto s = sample_at(p.lengths, alpha, iv.branch);
      return s ? s->ec2 : std::numeric_limits<double>::quiet_NaN();
    };
    for (size_t j = 1; j + 1 < nodes.size(); ++j) {
      const bool is_max = nodes[j].second > nodes[j - 1].second &&
                          nodes[j].second > nodes[j + 1].second;
      const bool is_min = nodes[j].second < nodes[j - 1].second &&
                          nodes[j].second < nodes[j + 1].second;
      if (!is_max && !is_min) continue;
      const GoldenResult g = golden_section(eval, nodes[j - 1].first,
                                            nodes[j + 1].first, is_max, 1e-10);
      out.push_back({g.alpha, g.value,
                     is_max ? CriticalKind::LocalMax : CriticalKind::LocalMin,
                     iv.branch});
    }
    out.push_back({iv.alpha_hi, iv.ec2_hi, CriticalKind::RightEndpoint, iv.branch});
  }
  return out;
}

namespace {

// Damped Newton polish of the full squared-length system; returns the best
// iterate seen.
CoordVector polish_root(CoordVector c, const EdgeLengthSet& Ln, double tol,
                        int max_iter) {
  CoordVector best = c;
  double best_norm = residual_norm(c, Ln);
  for (int it = 0; it < max_iter; ++it) {
    const auto r = residuals(c, Ln);
    double rn = 0.0;
    Vector7 rv;
    for (int i = 0; i < 7; ++i) {
      rv[i] = r[static_cast<size_t>(i)];
      rn = std::max(rn, std::abs(rv[i]));
    }
    if (rn < best_norm) {
      best = c;
      best_norm = rn;
    }
    if (rn <= tol) return c;
    const Matrix7 J = jacobian(c);
    const Vector7 delta = J.colPivHouseholderQr().solve(-rv);
    if (!delta.allFinite()) break;
    double t = 1.0;
    bool improved = false;
    for (int halve = 0; halve < 25; ++halve) {
      const CoordVector trial = from_vec(to_vec(c) + t * delta);
      if (residual_norm(trial, Ln) < rn) {
        c = trial;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) break;
  }
  if (residual_norm(c, Ln) < best_norm) best = c;
  return best;
}

struct Candidate {
  double alpha = 0.0;
  int branch = 0;
};

}  // namespace

RealizeResult find_realizations(const EdgeLengthSet& L, const SolveOptions& opts) {
  RealizeResult result;
  if (!L.face_violations().empty()) {
    result.reason = RealizeReason::ProfileEmpty;
    return result;
  }
  const EdgeLengthSet Ln = L.normalized();
  const SweepProfile profile = ec_profile(L, 0.0, kPi, opts.grid);
  if (profile.intervals.empty()) {
    result.reason = RealizeReason::ProfileEmpty;
    return result;
  }
  const double t7 = Ln.sq(7);

  std::vector<Candidate> candidates;
  for (const AdmissibleInterval& iv : profile.intervals) {
    std::vector<std::pair<double, double>> nodes;  // (alpha, f)
    nodes.emplace_back(iv.alpha_lo, iv.ec2_lo - t7);
    for (const SweepSample& s : profile.samples) {
      if (s.branch == iv.branch && s.alpha > iv.alpha_lo && s.alpha < iv.alpha_hi)
        nodes.emplace_back(s.alpha, s.ec2 - t7);
    }
    nodes.emplace_back(iv.alpha_hi, iv.ec2_hi - t7);

    auto f = [&](double alpha) {
      const auto s = sample_at(profile.lengths, alpha, iv.branch);
      return s ? s->ec2 - t7 : std::numeric_limits<double>::quiet_NaN();
    };

    // transversal roots: sign changes between consecutive nodes
    for (size_t j = 0; j + 1 < nodes.size(); ++j) {
      const double fa = nodes[j].second, fb = nodes[j + 1].second;
      if (fa == 0.0) {
        candidates.push_back({nodes[j].first, iv.branch});
        continue;
      }
      if (!(fa * fb < 0.0)) continue;
      double a = nodes[j].first, b = nodes[j + 1].first;
      double va = fa;
      for (int it = 0; it < 200 && b - a > opts.alpha_tol; ++it) {
        const double mid = 0.5 * (a + b);
        const double vm = f(mid);
        if (!std::isfinite(vm)) break;
        if (va * vm <= 0.0)
          b = mid;
        else {
          a = mid;
          va = vm;
        }
      }
      candidates.push_back({0.5 * (a + b), iv.branch});
    }
    if (nodes.back().second == 0.0)
      candidates.push_back({nodes.back().first, iv.branch});

    // tangential double roots: interior |f| minima below tolerance, no sign change
    for (size_t j = 1; j + 1 < nodes.size(); ++j) {
      const double fp = nodes[j - 1].second, fm = nodes[j].second,
                   fn = nodes[j + 1].second;
      if (!(fp * fm > 0.0 && fm * fn > 0.0)) continue;
      if (!(std::abs(fm) <= std::abs(fp) && std::abs(fm) <= std::abs(fn)))
        continue;
      const GoldenResult g = golden_section(
          [&](double alpha) { return std::abs(f(alpha)); }, nodes[j - 1].first,
          nodes[j + 1].first, false, 1e-12);
      if (std::abs(g.value) <= opts.tangency_tol)
        candidates.push_back({g.alpha, iv.branch});
    }
    // boundary roots sitting exactly on an admissibility endpoint
    for (const auto& end : {nodes.front(), nodes.back()}) {
      if (end.second != 0.0 && std::abs(end.second) <= opts.tangency_tol)
        candidates.push_back({end.first, iv.branch});
    }
  }

  std::vector<Realization> found;
  for (const Candidate& cand : candidates) {
    const auto s = sample_at(profile.lengths, cand.alpha, cand.branch);
    if (!s) continue;
    const BaseCandidates bc = base_from_angle(profile.lengths.l(2),
                                              profile.lengths.l(3),
                                              profile.lengths.l(4), cand.alpha);
    const BaseQuad& q =
        bc.quads[std::min<size_t>(cand.branch, bc.quads.size() - 1)];
    const ApexSolution apex =
        apex_solve(profile.lengths.l(5), profile.lengths.l(6),
                   profile.lengths.l(8), q);
    CoordVector c{q.x1, q.y1, q.x2, q.y2, apex.x3, apex.y3,
                  std::sqrt(std::max(apex.z3sq, 0.0))};
    c = polish_root(c, Ln, opts.residual_tol, opts.newton_max_iter);
    c.z3 = std::abs(c.z3);  // residuals depend on z3 squared; keep the apex above
    if (residual_norm(c, Ln) > opts.residual_tol) continue;

    Realization r;
    r.base = BaseQuad{c.x1, c.y1, c.x2, c.y2};
    r.x3 = c.x3;
    r.y3 = c.y3;
    r.z3 = c.z3;
    r.scale = 1.0 / L.l(1);
    r.base_class = classify_base(r.base);
    const bool keep =
        r.base_class == BaseClass::ConvexCCW ||
        (opts.include_degenerate && r.base_class == BaseClass::Degenerate);
    if (!keep || (!opts.include_degenerate && !(r.z3 > 0.0))) continue;
    found.push_back(r);
  }

  std::sort(found.begin(), found.end(),
            [](const Realization& a, const Realization& b) {
              return a.alpha() < b.alpha();
            });
  for (const Realization& r : found) {
    bool dup = false;
    for (const Realization& kept : result.realizations)
      dup = dup || congruent(r, kept, {opts.congruence_tol});
    if (!dup) result.realizations.push_back(r);
  }
  return result;
}

Realization branch_parallelogram(double a1, double b1, double c3) {
  if (!(b1 > 0.0)) throw Error(Errc::bad_input, "b1 must be positive");
  if (!(c3 > 0.0)) throw Error(Errc::bad_input, "apex height must be positive");
  Realization r;
  r.base = BaseQuad{a1, b1, a1 + 1.0, b1};
  r.x3 = (a1 + 1.0) / 2.0;
  r.y3 = b1 / 2.0;
  r.z3 = c3;
  r.scale = 1.0;
  r.base_class = classify_base(r.base);

  const EdgeLengthSet l = edge_lengths(r);
  if (std::abs(l.sq(5) - l.sq(7)) > 1e-14 * (1.0 + l.sq(5)) ||
      std::abs(l.sq(6) - l.sq(8)) > 1e-14 * (1.0 + l.sq(6)))
    throw Error(Errc::bad_input, "midpoint symmetry broken");
  return r;
}

Vec2 branch_nonconvex(double a2, double b2) {
  const double r2 = a2 * a2 + b2 * b2;
  if (r2 < 1e-300) throw Error(Errc::origin_input, "C must not coincide with A");
  return {(a2 * a2 * a2 - a2 * a2 + a2 * b2 * b2 + b2 * b2) / r2,
          b2 * (a2 * a2 - 2.0 * a2 + b2 * b2) / r2};
}

double parallelogram_eb2(double p, double q, double l5, double d1) {
  if (!(p > 0.0 && q > 0.0 && l5 > 0.0 && d1 > 0.0))
    throw Error(Errc::bad_input, "lengths must be positive");
  if (d1 < std::abs(p - q) || d1 > p + q)
    throw Error(Errc::bad_input, "diagonal violates parallelogram bounds");
  if (l5 < d1 / 2.0)
    throw Error(Errc::apex_impossible,
                "lateral edge shorter than half the diagonal");
  return l5 * l5 + (p * p + q * q) / 2.0 - d1 * d1 / 2.0;
}

}  // namespace qpyr
