#ifndef QBODY_COMPLETION_HPP
#define QBODY_COMPLETION_HPP

// Positive semidefinite completion of the partial matrix
//
//        A1  A2  B1  B2
//   A1 [  1   u  c11 c12 ]
//   A2 [  u   1  c21 c22 ]
//   B1 [ c11 c21  1   v  ]
//   B2 [ c12 c22  v   1  ]
//
// in the unknowns u and v. Fixing u makes the pattern chordal, so only the
// two 3x3 minors m123 and m124 constrain u. Each is a downward parabola
// b - (u - a)^2 in u, and the feasible u form the intersection of their
// nonnegativity intervals.

#include "qbody/core.hpp"

#include <Eigen/Eigenvalues>

namespace qbody {

/// Closed interval [lo, hi]; hi < lo encodes an empty interval whose
/// "overlap" hi - lo is negative.
struct Interval {
  double lo = 0;
  double hi = 0;

  double overlap() const { return hi - lo; }
  double width() const { return std::max(0.0, hi - lo); }
  double mid() const { return 0.5 * (lo + hi); }
};

/// Nonnegativity interval of b - (x - a)^2, extended to b < 0 with a
/// negative half-width so that overlaps vary continuously.
inline Interval parabola_interval(double a, double b) {
  const double half = b >= 0 ? std::sqrt(b) : -std::sqrt(-b);
  return {a - half, a + half};
}

inline Interval intersect(const Interval& x, const Interval& y) {
  return {std::max(x.lo, y.lo), std::min(x.hi, y.hi)};
}

/// Feasible u: parabolas (B) m123 and (C) m124 intersected with |u| <= 1.
inline Interval u_interval(const Correlation& c) {
  const Interval b = parabola_interval(c.at(1, 1) * c.at(2, 1),
                                       (1 - c.at(1, 1) * c.at(1, 1)) * (1 - c.at(2, 1) * c.at(2, 1)));
  const Interval cc = parabola_interval(c.at(1, 2) * c.at(2, 2),
                                        (1 - c.at(1, 2) * c.at(1, 2)) * (1 - c.at(2, 2) * c.at(2, 2)));
  return intersect(intersect(b, cc), Interval{-1.0, 1.0});
}

/// Feasible v, from the minors m134 and m234 (the same lemma with the roles
/// of the two parties exchanged).
inline Interval v_interval(const Correlation& c) {
  const Interval b = parabola_interval(c.at(1, 1) * c.at(1, 2),
                                       (1 - c.at(1, 1) * c.at(1, 1)) * (1 - c.at(1, 2) * c.at(1, 2)));
  const Interval cc = parabola_interval(c.at(2, 1) * c.at(2, 2),
                                        (1 - c.at(2, 1) * c.at(2, 1)) * (1 - c.at(2, 2) * c.at(2, 2)));
  return intersect(intersect(b, cc), Interval{-1.0, 1.0});
}

struct Completion {
  Correlation c;
  double u = 0;
  double v = 0;

  Mat4 matrix() const {
    Mat4 m;
    m << 1, u, c[0], c[1],
         u, 1, c[2], c[3],
         c[0], c[2], 1, v,
         c[1], c[3], v, 1;
    return m;
  }
};

/// Eigenvalues above eps * max|entry| count toward the rank.
inline int numerical_rank(const Mat4& m, double eps) {
  const Eigen::SelfAdjointEigenSolver<Mat4> es(m, Eigen::EigenvaluesOnly);
  const double thresh = eps * m.cwiseAbs().maxCoeff();
  return static_cast<int>((es.eigenvalues().array() > thresh).count());
}

inline double min_eigenvalue(const Mat4& m) {
  const Eigen::SelfAdjointEigenSolver<Mat4> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

struct CompletionResult {
  bool feasible = false;
  Completion witness;
  bool unique = false;
  int rank = 0;
  Interval u_range;
  Interval v_range;
};

inline double cube_slack(const Correlation& c) { return 1.0 - c.v.cwiseAbs().maxCoeff(); }

/// Decides whether c admits a PSD completion and returns a deterministic
/// witness: u at the midpoint of the feasible interval and v maximizing
/// det C for that u, i.e.
///   v = (c11 c12 + c21 c22 - (c11 c22 + c12 c21) u) / (1 - u^2).
/// The fiber over c is a single point exactly on the boundary of Q; here
/// that is decided by both interval widths being at most sqrt(eps_boundary),
/// since the widths grow like the square root of the distance to the boundary.
inline CompletionResult solve_completion(const Correlation& c, const Tolerance& tol = {}) {
  CompletionResult out;
  out.u_range = u_interval(c);
  out.v_range = v_interval(c);
  out.feasible = cube_slack(c) >= -tol.eps_boundary && out.u_range.overlap() >= -tol.eps_boundary;

  const double u = std::clamp(out.u_range.mid(), -1.0, 1.0);
  double v;
  if (1.0 - u * u > 1e-12) {
    v = (c.at(1, 1) * c.at(1, 2) + c.at(2, 1) * c.at(2, 2) -
         (c.at(1, 1) * c.at(2, 2) + c.at(1, 2) * c.at(2, 1)) * u) /
        (1.0 - u * u);
  } else {
    v = out.v_range.mid();
  }
  out.witness = Completion{c, u, std::clamp(v, -1.0, 1.0)};

  const double single = std::sqrt(tol.eps_boundary);
  out.unique = out.feasible && out.u_range.width() <= single && out.v_range.width() <= single;
  out.rank = numerical_rank(out.witness.matrix(), tol.eps_psd);
  return out;
}

}  // namespace qbody

#endif  // QBODY_COMPLETION_HPP
