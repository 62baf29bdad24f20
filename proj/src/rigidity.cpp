#include "qpyr/rigidity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace qpyr {

namespace {

Vector7 to_vec(const CoordVector& c) {
  Vector7 v;
  v << c.x1, c.y1, c.x2, c.y2, c.x3, c.y3, c.z3;
  return v;
}

CoordVector from_vec(const Vector7& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

// tangent sign convention: component of largest magnitude is positive
void canonicalize_sign(Vector7& t) {
  int imax = 0;
  for (int i = 1; i < 7; ++i)
    if (std::abs(t[i]) > std::abs(t[imax])) imax = i;
  if (t[imax] < 0.0) t = -t;
}

}  // namespace

std::array<double, 7> residuals(const CoordVector& c, const EdgeLengthSet& L) {
  const EdgeLengthSet n = L.normalized();
  const double x1 = c.x1, y1 = c.y1, x2 = c.x2, y2 = c.y2;
  const double x3 = c.x3, y3 = c.y3, z3 = c.z3;
  return {
      x1 * x1 + y1 * y1 - n.sq(4),                                      // DA
      (x2 - 1.0) * (x2 - 1.0) + y2 * y2 - n.sq(2),                      // BC
      (x2 - x1) * (x2 - x1) + (y2 - y1) * (y2 - y1) - n.sq(3),          // CD
      x3 * x3 + y3 * y3 + z3 * z3 - n.sq(5),                            // EA
      (x3 - 1.0) * (x3 - 1.0) + y3 * y3 + z3 * z3 - n.sq(6),            // EB
      (x3 - x1) * (x3 - x1) + (y3 - y1) * (y3 - y1) + z3 * z3 - n.sq(8),// ED
      (x3 - x2) * (x3 - x2) + (y3 - y2) * (y3 - y2) + z3 * z3 - n.sq(7) // EC
  };
}

double residual_norm(const CoordVector& c, const EdgeLengthSet& L) {
  double m = 0.0;
  for (double r : residuals(c, L)) m = std::max(m, std::abs(r));
  return m;
}

Matrix7 jacobian(const CoordVector& c) {
  const double x1 = c.x1, y1 = c.y1, x2 = c.x2, y2 = c.y2;
  const double x3 = c.x3, y3 = c.y3, z3 = c.z3;
  Matrix7 J = Matrix7::Zero();
  // columns: x1 y1 x2 y2 x3 y3 z3
  J(0, 0) = 2.0 * x1;
  J(0, 1) = 2.0 * y1;

  J(1, 2) = 2.0 * (x2 - 1.0);
  J(1, 3) = 2.0 * y2;

  J(2, 0) = -2.0 * (x2 - x1);
  J(2, 1) = -2.0 * (y2 - y1);
  J(2, 2) = 2.0 * (x2 - x1);
  J(2, 3) = 2.0 * (y2 - y1);

  J(3, 4) = 2.0 * x3;
  J(3, 5) = 2.0 * y3;
  J(3, 6) = 2.0 * z3;

  J(4, 4) = 2.0 * (x3 - 1.0);
  J(4, 5) = 2.0 * y3;
  J(4, 6) = 2.0 * z3;

  J(5, 0) = -2.0 * (x3 - x1);
  J(5, 1) = -2.0 * (y3 - y1);
  J(5, 4) = 2.0 * (x3 - x1);
  J(5, 5) = 2.0 * (y3 - y1);
  J(5, 6) = 2.0 * z3;

  J(6, 2) = -2.0 * (x3 - x2);
  J(6, 3) = -2.0 * (y3 - y2);
  J(6, 4) = 2.0 * (x3 - x2);
  J(6, 5) = 2.0 * (y3 - y2);
  J(6, 6) = 2.0 * z3;
  return J;
}

RankInfo rank_analysis(const Matrix7& J, double rank_tol) {
  Eigen::JacobiSVD<Matrix7> svd(J);
  RankInfo info;
  const auto& sv = svd.singularValues();
  for (int i = 0; i < 7; ++i) info.singular_values[static_cast<size_t>(i)] = sv[i];
  const double smax = sv[0];
  if (smax <= 0.0) {
    info.kernel_dim = 7;
    return info;
  }
  for (int i = 0; i < 7; ++i)
    if (sv[i] < rank_tol * smax) ++info.kernel_dim;
  return info;
}

RigidityReport rigidity_verdict(const Realization& r, const EdgeLengthSet& L,
                                double rank_tol) {
  RigidityReport report;
  const CoordVector c = CoordVector::from(r);
  report.residuals = residuals(c, L);
  for (double res : report.residuals)
    if (std::abs(res) > 1e-9)
      throw Error(Errc::not_a_realization,
                  "coordinates do not satisfy the length constraints");
  report.jacobian = jacobian(c);
  const RankInfo info = rank_analysis(report.jacobian, rank_tol);
  report.singular_values = info.singular_values;
  report.kernel_dim = info.kernel_dim;
  report.verdict =
      info.kernel_dim == 0 ? Verdict::Rigid : Verdict::InfinitesimallyFlexible;
  return report;
}

FlexSample flex_sample(double y1) {
  if (!(y1 > 0.0)) throw Error(Errc::bad_input, "y1 must be positive");
  const double disc = 5.0 - y1 * y1;
  if (disc < 0.0)
    throw Error(Errc::discriminant_negative, "y1 exceeds sqrt(5)");
  FlexSample s;
  s.y1 = y1;
  s.y3 = (3.0 - std::sqrt(disc)) / y1;
  if (std::abs(s.y3) < 1e-12)
    throw Error(Errc::division_breakdown, "y3 vanished");
  const double h2 = 2.0 - s.y3 * s.y3;
  if (h2 < 0.0)
    throw Error(Errc::height_imaginary, "apex height imaginary");
  s.x1 = 3.0 - y1 * s.y3;
  if (std::abs(s.x1 - 1.0) < 1e-12)
    throw Error(Errc::division_breakdown, "x1 - 1 vanished");
  s.y2 = 2.0 / s.y3;
  s.x2 = (4.0 - y1 * s.y2) / (s.x1 - 1.0);
  s.z3 = std::sqrt(h2);
  return s;
}

std::optional<Vector7> flex_tangent(const CoordVector& c, double rank_tol) {
  const Matrix7 J = jacobian(c);
  Eigen::JacobiSVD<Matrix7> svd(J, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv[0];
  int kernel = 0;
  for (int i = 0; i < 7; ++i)
    if (smax <= 0.0 || sv[i] < rank_tol * smax) ++kernel;
  if (kernel == 0) return std::nullopt;
  if (kernel > 1)
    throw Error(Errc::ambiguous_kernel, "kernel dimension exceeds one");
  Vector7 t = svd.matrixV().col(6);
  t.normalize();
  canonicalize_sign(t);
  return t;
}

namespace {

// Newton corrector restricted to the hyperplane orthogonal to `t` through the
// start point; true on convergence to the residual target.
bool correct(CoordVector& c, const EdgeLengthSet& L, const Vector7& t,
             double target, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    const auto res = residuals(c, L);
    double rn = 0.0;
    for (double r : res) rn = std::max(rn, std::abs(r));
    if (rn <= target) return true;
    Eigen::Matrix<double, 8, 7> A;
    A.topRows<7>() = jacobian(c);
    A.bottomRows<1>() = t.transpose();
    Eigen::Matrix<double, 8, 1> rhs;
    for (int i = 0; i < 7; ++i) rhs[i] = -res[static_cast<size_t>(i)];
    rhs[7] = 0.0;
    const Vector7 delta = A.colPivHouseholderQr().solve(rhs);
    if (!delta.allFinite() || delta.norm() > 1.0) return false;
    c = from_vec(to_vec(c) + delta);
  }
  return false;
}

}  // namespace

TraceResult trace_family(const CoordVector& c0, const EdgeLengthSet& L,
                         int steps, double h) {
  if (!(steps >= 0) || !(std::abs(h) > 0.0))
    throw Error(Errc::bad_input, "steps must be >= 0 and h nonzero");
  if (residual_norm(c0, L) > 1e-10)
    throw Error(Errc::not_a_realization, "start point violates the constraints");
  const auto t0 = flex_tangent(c0);
  if (!t0)
    throw Error(Errc::not_flexible, "start point has no infinitesimal flex");

  TraceResult out;
  out.points.push_back(c0);
  CoordVector c = c0;
  Vector7 t = *t0;

  for (int k = 0; k < steps; ++k) {
    double hk = h;
    bool stepped = false;
    while (std::abs(hk) >= 1e-5) {
      CoordVector trial = from_vec(to_vec(c) + hk * t);
      if (correct(trial, L, t, 1e-11, 30)) {
        c = trial;
        stepped = true;
        break;
      }
      hk *= 0.5;
    }
    if (!stepped) {
      out.stop = TraceStop::CorrectionDiverged;
      out.detail = "no step size down to 1e-5 converged";
      return out;
    }
    if (c.z3 <= 0.0) {
      out.stop = TraceStop::KernelCollapse;
      out.detail = "family endpoint: z3 reached 0";
      return out;
    }
    std::optional<Vector7> tn;
    try {
      tn = flex_tangent(c);
    } catch (const Error&) {
      tn = std::nullopt;  // kernel dimension above one
    }
    if (!tn) {
      out.stop = TraceStop::KernelCollapse;
      out.detail = "kernel dimension changed";
      return out;
    }
    if (tn->dot(t) < 0.0) *tn = -*tn;  // keep the traversal direction
    t = *tn;
    out.points.push_back(c);
  }
  return out;
}

}  // namespace qpyr
