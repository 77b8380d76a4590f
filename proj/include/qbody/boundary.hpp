#ifndef QBODY_BOUNDARY_HPP
#define QBODY_BOUNDARY_HPP

// Boundary structure of Q: the strata Q1..Q6, the cosine parametrization of
// extreme points by angle tuples, exposing functionals, and Gram-vector
// realizations of completions.
//
// Strata (relative interiors):
//   Q1  8 classical vertices                        completion rank 1
//   Q2  24 open edges between classical vertices    rank 2
//   Q3  32 surfaces of non-exposed extreme points   rank 2
//   Q4  8 threefolds of exposed extreme points      rank 2
//   Q5  8 open elliptope facets                     rank 3
//   Q6  interior                                    some completion of rank 4

#include "qbody/completion.hpp"
#include "qbody/core.hpp"
#include "qbody/membership.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <optional>

namespace qbody {

enum class Stratum { Q1, Q2, Q3, Q4, Q5, Q6, Exterior };

inline const char* to_string(Stratum s) {
  switch (s) {
    case Stratum::Q1: return "Q1";
    case Stratum::Q2: return "Q2";
    case Stratum::Q3: return "Q3";
    case Stratum::Q4: return "Q4";
    case Stratum::Q5: return "Q5";
    case Stratum::Q6: return "Q6";
    case Stratum::Exterior: return "EXTERIOR";
  }
  return "UNKNOWN";
}

/// Unique completion rank on each boundary stratum.
inline std::optional<int> expected_rank(Stratum s) {
  switch (s) {
    case Stratum::Q1: return 1;
    case Stratum::Q2:
    case Stratum::Q3:
    case Stratum::Q4: return 2;
    case Stratum::Q5: return 3;
    default: return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Angle tuples

/// Reduces an angle to (-pi, pi].
inline double wrap_angle(double x) {
  double r = std::remainder(x, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

/// Distance of x to the nearest multiple of `period`.
inline double dist_to_multiple(double x, double period) { return std::abs(std::remainder(x, period)); }

/// (alpha, beta, gamma, delta) in radians with alpha+beta+gamma+delta = 0 mod 2pi.
/// Cosines give the correlation (c11, c12, c21, c22).
struct AngleTuple {
  double alpha = 0, beta = 0, gamma = 0, delta = 0;

  static AngleTuple from_three(double a, double b, double g) { return {a, b, g, -(a + b + g)}; }

  std::array<double, 4> values() const { return {alpha, beta, gamma, delta}; }
  static AngleTuple from_values(const std::array<double, 4>& x) { return {x[0], x[1], x[2], x[3]}; }

  double sum_residual() const { return dist_to_multiple(alpha + beta + gamma + delta, 2.0 * kPi); }

  /// sin(alpha) sin(beta) sin(gamma) sin(delta); negative on Q4.
  double Delta() const { return std::sin(alpha) * std::sin(beta) * std::sin(gamma) * std::sin(delta); }

  /// Representative with every angle in (-pi, pi] and alpha in [0, pi].
  /// cos is even, so t and -t give the same point; when alpha is 0 or pi the
  /// first other angle off {0, pi} is made positive.
  AngleTuple canonical(double eps = 1e-12) const {
    std::array<double, 4> x = values();
    for (double& a : x) a = wrap_angle(a);
    auto negate = [&] {
      for (double& a : x) a = wrap_angle(-a);
    };
    if (x[0] < -eps) {
      negate();
    } else if (x[0] <= eps || x[0] >= kPi - eps) {
      for (int k = 1; k < 4; ++k) {
        if (dist_to_multiple(x[k], kPi) > eps) {
          if (x[k] < 0) negate();
          break;
        }
      }
    }
    return from_values(x);
  }

  Correlation point() const {
    return Correlation(std::cos(alpha), std::cos(beta), std::cos(gamma), std::cos(delta));
  }
};

inline void check_angle_sum(const AngleTuple& t, const Tolerance& tol) {
  if (t.sum_residual() > tol.eps_angle) {
    throw Error(ErrorKind::AngleSumViolation, "alpha+beta+gamma+delta must vanish mod 2pi");
  }
}

// ---------------------------------------------------------------------------
// Classification

/// Assigns the stratum of c. Boundary strata are assigned only inside the
/// band |margin| <= eps_boundary of the semialgebraic oracle; the number of
/// saturated coordinates |c_ij| >= 1 - eps_boundary then separates them. When
/// a coordinate is saturated, h = -g^2 and g restricted to the facet is the
/// elliptope cubic, so Q3 versus Q5 is |g| <= eps_boundary. The result is
/// cross-checked against the rank of the completion witness.
inline Stratum classify(const Correlation& c, const Tolerance& tol = {}) {
  const MembershipVerdict mv = member(c, Oracle::Semialg, tol);
  if (!mv.inside) return Stratum::Exterior;
  if (mv.margin > tol.eps_boundary) return Stratum::Q6;

  int saturated = 0;
  for (int k = 0; k < 4; ++k) saturated += std::abs(c[k]) >= 1.0 - tol.eps_boundary;
  const double g = detail::g_poly(c.v);

  Stratum s;
  switch (saturated) {
    case 4: s = Stratum::Q1; break;
    case 3: {
      Vec4 vertex;
      for (int k = 0; k < 4; ++k) vertex[k] = c[k] >= 0 ? 1.0 : -1.0;
      if (vertex.prod() < 0) {
        throw Error(ErrorKind::AmbiguousClassification, "three saturated coordinates near an odd vertex");
      }
      s = Stratum::Q1;
      break;
    }
    case 2: s = Stratum::Q2; break;
    case 1: s = std::abs(g) <= tol.eps_boundary ? Stratum::Q3 : Stratum::Q5; break;
    default:
      if (g >= 0) {
        throw Error(ErrorKind::AmbiguousClassification, "h and g both vanish off the cube boundary");
      }
      s = Stratum::Q4;
  }

  const CompletionResult comp = solve_completion(c, tol);
  if (comp.rank != *expected_rank(s)) {
    throw Error(ErrorKind::AmbiguousClassification,
                std::string("stratum ") + to_string(s) + " but completion rank " + std::to_string(comp.rank));
  }
  return s;
}

struct ExtremePoint {
  Correlation c;
  Stratum stratum = Stratum::Q4;
};

/// c = (cos alpha, cos beta, cos gamma, cos delta). Delta < 0 gives Q4; on
/// Delta = 0 the number of angles that are multiples of pi selects Q1 (all),
/// Q2 (two) or Q3 (one); Delta > 0 lands in the interior.
inline ExtremePoint extreme_from_angles(const AngleTuple& t, const Tolerance& tol = {}) {
  check_angle_sum(t, tol);
  int multiples = 0;
  for (double a : t.values()) multiples += dist_to_multiple(a, kPi) <= tol.eps_angle;

  Stratum s;
  if (multiples >= 3) {
    s = Stratum::Q1;
  } else if (multiples == 2) {
    s = Stratum::Q2;
  } else if (multiples == 1) {
    s = Stratum::Q3;
  } else {
    s = t.Delta() < 0 ? Stratum::Q4 : Stratum::Q6;
  }
  return {t.point(), s};
}

/// Recovers an angle tuple from a point of Q1..Q4 by searching the sign
/// patterns s_ij arccos(c_ij) for one whose sum vanishes mod 2pi. The sum is
/// compared with eps_angle plus the propagated arccos rounding error, which
/// grows like 1/sin near saturated coordinates.
inline AngleTuple angles_from_point(const Correlation& c, const Tolerance& tol = {}) {
  std::array<double, 4> theta{};
  double slack = tol.eps_angle;
  for (int k = 0; k < 4; ++k) {
    const double x = std::clamp(c[k], -1.0, 1.0);
    theta[k] = std::acos(x);
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    slack += 4.0 * std::min(4.0e-16 / std::max(s, 1e-300), 3.0e-8);
  }

  double best = std::numeric_limits<double>::infinity();
  std::array<double, 4> best_x{};
  // Global negation maps solutions to solutions; alpha keeps its sign.
  for (int mask = 0; mask < 8; ++mask) {
    std::array<double, 4> x = theta;
    for (int k = 1; k < 4; ++k) {
      if ((mask >> (k - 1)) & 1) x[k] = -x[k];
    }
    const double r = dist_to_multiple(x[0] + x[1] + x[2] + x[3], 2.0 * kPi);
    if (r < best) {
      best = r;
      best_x = x;
    }
  }
  if (best > slack) {
    throw Error(ErrorKind::NotExtreme, "no sign pattern of arccos(c_ij) sums to 0 mod 2pi");
  }
  return AngleTuple::from_values(best_x).canonical();
}

// ---------------------------------------------------------------------------
// Exposing functionals

/// The unique functional exposing the Q4 point with angles t:
///   f = (1/K) (1/sin alpha, 1/sin beta, 1/sin gamma, 1/sin delta),
///   K = cot alpha + cot beta + cot gamma + cot delta,
/// so that f.c' <= 1 on Q with equality only at c' = c.
inline Functional exposing_functional(const AngleTuple& t, const Tolerance& tol = {}) {
  check_angle_sum(t, tol);
  const auto x = t.values();
  Vec4 inv_sin;
  double K = 0;
  for (int k = 0; k < 4; ++k) {
    const double s = std::sin(x[k]);
    if (std::abs(s) < tol.eps_angle) {
      throw Error(ErrorKind::DegenerateAngles, "an angle is a multiple of pi");
    }
    inv_sin[k] = 1.0 / s;
    K += std::cos(x[k]) / s;
  }
  if (std::abs(K) < tol.eps_angle) throw Error(ErrorKind::DegenerateAngles, "cotangent sum vanishes");
  if (t.Delta() >= -tol.eps_angle) {
    throw Error(ErrorKind::DegenerateAngles, "angles do not parametrize an exposed point (Delta >= 0)");
  }

  const Functional f(inv_sin / K);
  if (std::abs(dot(f, t.point()) - 1.0) > 1e-10) {
    throw std::logic_error("exposing functional is not incident to its point");
  }
  return f;
}

// ---------------------------------------------------------------------------
// Gram realizations

/// Unit vectors with c_ij = a_i . b_j, all in R^r.
struct GramSystem {
  Eigen::VectorXd a1, a2, b1, b2;

  int dim() const { return static_cast<int>(a1.size()); }
  Correlation correlations() const { return Correlation(a1.dot(b1), a1.dot(b2), a2.dot(b1), a2.dot(b2)); }
};

/// Factors the completion matrix as W W^T via its eigendecomposition and
/// returns the rows of W as (a1, a2, b1, b2). Eigenvalues at or below
/// eps_psd * max|C_ij| are dropped, which fixes r = rank; the rows are then
/// renormalized to unit length.
inline GramSystem gram_vectors(const Completion& comp, const Tolerance& tol = {}) {
  const Mat4 C = comp.matrix();
  const Eigen::SelfAdjointEigenSolver<Mat4> es(C);
  const double thresh = tol.eps_psd * C.cwiseAbs().maxCoeff();
  if (es.eigenvalues()[0] < -thresh) throw Error(ErrorKind::NotPSD, "completion matrix is not PSD");

  std::vector<int> keep;
  for (int k = 3; k >= 0; --k) {
    if (es.eigenvalues()[k] > thresh) keep.push_back(k);
  }
  const int r = static_cast<int>(keep.size());
  Eigen::MatrixXd W(4, r);
  for (int n = 0; n < r; ++n) {
    W.col(n) = es.eigenvectors().col(keep[n]) * std::sqrt(es.eigenvalues()[keep[n]]);
  }
  auto row = [&](int i) -> Eigen::VectorXd {
    Eigen::VectorXd w = W.row(i).transpose();
    return w / w.norm();
  };
  GramSystem gs{row(0), row(1), row(2), row(3)};

  const Eigen::MatrixXd R = W * W.transpose();
  if ((R - C).cwiseAbs().maxCoeff() > 1e-9) throw Error(ErrorKind::NotPSD, "Gram reconstruction failed");
  return gs;
}

}  // namespace qbody

#endif  // QBODY_BOUNDARY_HPP
