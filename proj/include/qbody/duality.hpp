#ifndef QBODY_DUALITY_HPP
#define QBODY_DUALITY_HPP

// Support and gauge functions of Q, the dual body Q° = ½HQ, dual completion
// certificates, the self-map Φ of the angle tetrahedron and the polynomial
// relations on incident boundary pairs (c, f).

#include "qbody/boundary.hpp"
#include "qbody/core.hpp"
#include "qbody/membership.hpp"

#include <array>
#include <optional>

namespace qbody {

// ---------------------------------------------------------------------------
// Quantum versus classical support

struct CaseVerdict {
  bool quantum_case = false;
  std::optional<double> m_value;  // set when p(f) < 0
  double phi_classical = 0;
  std::optional<double> phi_quantum;  // set when quantum_case

  // The three equivalent criteria, evaluated separately.
  bool cond3 = false;  // p < 0 and m > 2
  bool cond4 = false;  // p < 0 and m~ < 0
  bool cond5 = false;  // e3 < 0 after moving the classical maximizer to (1,1,1,1)
  // Smallest normalized distance of any criterion from its threshold. The
  // criteria are only required to agree when this exceeds the band.
  double margin = 0;
};

/// max over even vertices s of s.f, which equals |2Hf|_inf.
inline double phi_classical(const Functional& f) {
  return dual_transform(f.v, DualDirection::FromDual).cwiseAbs().maxCoeff();
}

namespace detail {

inline double e3_poly(const Vec4& x) {
  return x[0] * x[1] * x[2] + x[0] * x[1] * x[3] + x[0] * x[2] * x[3] + x[1] * x[2] * x[3];
}

}  // namespace detail

/// Decides whether the maximum of f.c over Q is attained at a Q4 point. The
/// criteria are evaluated on f / max|f_ij|; throws logic_error if they
/// disagree while every one of them is farther than `band` from its threshold.
inline CaseVerdict quantum_case(const Functional& f, double band = 1e-9) {
  const double scale = f.v.cwiseAbs().maxCoeff();
  if (scale == 0.0) throw Error(ErrorKind::ZeroFunctional, "functional is zero");
  const Vec4 x = f.v / scale;

  CaseVerdict out;
  out.phi_classical = phi_classical(f);
  const double p = detail::p_poly(x);
  double margin = std::abs(p);

  if (p < 0) {
    // p != 0, so every entry is nonzero.
    const Vec4 inv = x.cwiseInverse();
    const double inv_abs = inv.cwiseAbs().sum();
    const double m = x.cwiseAbs().minCoeff() * inv_abs;
    out.m_value = m;
    out.cond3 = m > 2.0;
    margin = std::min(margin, std::abs(m - 2.0));

    const std::array<double, 4> factors{inv[0] + inv[1] + inv[2] + inv[3], inv[0] + inv[1] - inv[2] - inv[3],
                                        inv[0] - inv[1] + inv[2] - inv[3], inv[0] - inv[1] - inv[2] + inv[3]};
    double mt = 1.0;
    for (double fa : factors) {
      mt *= fa;
      margin = std::min(margin, std::abs(fa) / inv_abs);
    }
    out.cond4 = mt < 0;
  }

  // Classical maximizer: the even vertex s with the largest s.x. Multiplying
  // x entrywise by s is a symmetry and moves the maximizer to (1,1,1,1).
  const auto& verts = even_vertices();
  std::array<double, 8> vals{};
  for (int n = 0; n < 8; ++n) vals[n] = verts[n].dot(x);
  const int best = static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  double runner_up = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < 8; ++n) {
    if (n != best) runner_up = std::max(runner_up, vals[n]);
  }
  margin = std::min(margin, vals[best] - runner_up);
  const double e3 = detail::e3_poly(verts[best].cwiseProduct(x));
  out.cond5 = e3 < 0;
  margin = std::min(margin, std::abs(e3));
  out.margin = margin;

  out.quantum_case = out.cond3;
  if (margin > band && (out.cond3 != out.cond4 || out.cond3 != out.cond5)) {
    throw std::logic_error("support case criteria disagree");
  }
  if (out.quantum_case) {
    const DualPolys dp = dual_polys(f);
    out.phi_quantum = std::sqrt(dp.k / dp.p);
  }
  return out;
}

/// Support function phi(f) = max{f.c : c in Q}.
inline double support(const Functional& f) {
  if (f.v.isZero(0)) return 0.0;
  const CaseVerdict cv = quantum_case(f);
  return cv.quantum_case ? *cv.phi_quantum : cv.phi_classical;
}

/// Gauge of Q, which is the support function of Q°: gauge(c) = ½ phi(Hc).
inline double gauge(const Correlation& c) {
  return 0.5 * support(Functional(hadamard() * c.v));
}

/// Gauge by bisection on the scale lambda with c / lambda in Q. Q lies in the
/// cube and contains the unit ball, so lambda is bracketed by the max and
/// Euclidean norms of c.
inline double gauge_bisection(const Correlation& c, int iterations = 200) {
  double lo = c.v.cwiseAbs().maxCoeff();
  double hi = c.v.norm();
  if (hi == 0.0) return 0.0;
  for (int it = 0; it < iterations && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (detail::semialg_margin(Correlation(c.v / mid)) >= 0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Membership of f in Q°, decided as 2Hf in Q. The support function route
/// (phi(f) <= 1) must give the same answer outside the band.
inline MembershipVerdict dual_member(const Functional& f, const Tolerance& tol = {}, double band = 1e-8) {
  const MembershipVerdict primal = member(from_dual(f), Oracle::Semialg, tol);
  const double phi = support(f);
  if (std::abs(phi - 1.0) > band && std::abs(primal.margin) > band && (phi <= 1.0) != primal.inside) {
    throw std::logic_error("dual membership routes disagree");
  }
  return primal;
}

// ---------------------------------------------------------------------------
// Dual completion

struct DualCompletion {
  Functional f;
  double p1 = 0.5, p2 = 0.5, p3 = 0.5, p4 = 0.5;

  //        A1   A2    B1    B2
  //   A1 [ p1    0  -f11  -f12 ]
  //   A2 [  0   p2  -f21  -f22 ]
  //   B1 [-f11 -f21   p3     0 ]
  //   B2 [-f12 -f22    0    p4 ]
  // Paired with a completion C of c: tr(CF) = 2 - 2 f.c.
  Mat4 matrix() const {
    Mat4 m;
    m << p1, 0, -f[0], -f[1],
         0, p2, -f[2], -f[3],
         -f[0], -f[2], p3, 0,
         -f[1], -f[3], 0, p4;
    return m;
  }
};

struct DualCompletionResult {
  bool feasible = false;
  DualCompletion witness;
  double min_eigenvalue = 0;
};

/// Searches p1 + p2 = p3 + p4 = 1 for the pair (p1, p3) maximizing the
/// smallest eigenvalue of F, which is concave in (p1, p3). A 64x64 grid on
/// [0,1]^2 is followed by nested dichotomous searches.
inline DualCompletionResult dual_completion(const Functional& f, const Tolerance& tol = {}) {
  auto lam = [&](double p1, double p3) {
    return min_eigenvalue(DualCompletion{f, p1, 1 - p1, p3, 1 - p3}.matrix());
  };

  double best_val = -std::numeric_limits<double>::infinity();
  double best_p1 = 0.5, best_p3 = 0.5;
  auto consider = [&](double p1, double p3, double val) {
    if (val > best_val) {
      best_val = val;
      best_p1 = p1;
      best_p3 = p3;
    }
  };
  constexpr int kGrid = 64;
  for (int a = 0; a < kGrid; ++a) {
    for (int b = 0; b < kGrid; ++b) {
      const double p1 = a / double(kGrid - 1), p3 = b / double(kGrid - 1);
      consider(p1, p3, lam(p1, p3));
    }
  }

  constexpr int kHalvings = 40;
  auto inner = [&](double p1) {
    double lo = 0, hi = 1;
    for (int it = 0; it < kHalvings; ++it) {
      const double mid = 0.5 * (lo + hi), d = 1e-3 * (hi - lo);
      if (lam(p1, mid - d) < lam(p1, mid + d)) {
        lo = mid - d;
      } else {
        hi = mid + d;
      }
    }
    const double p3 = 0.5 * (lo + hi);
    return std::pair{p3, lam(p1, p3)};
  };
  double lo = 0, hi = 1;
  for (int it = 0; it < kHalvings; ++it) {
    const double mid = 0.5 * (lo + hi), d = 1e-3 * (hi - lo);
    if (inner(mid - d).second < inner(mid + d).second) {
      lo = mid - d;
    } else {
      hi = mid + d;
    }
  }
  const double p1 = 0.5 * (lo + hi);
  const auto [p3, val] = inner(p1);
  consider(p1, p3, val);

  DualCompletionResult out;
  out.witness = DualCompletion{f, best_p1, 1 - best_p1, best_p3, 1 - best_p3};
  out.min_eigenvalue = best_val;
  const double norm = out.witness.matrix().cwiseAbs().maxCoeff();
  out.feasible = best_val >= -tol.eps_psd * norm;
  return out;
}

// ---------------------------------------------------------------------------
// The map Phi

/// True for alpha, beta, gamma in (0, pi) with alpha + beta + gamma < pi.
inline bool in_tetrahedron(const AngleTuple& t, double eps = 0) {
  const double s = t.alpha + t.beta + t.gamma;
  return t.alpha > eps && t.beta > eps && t.gamma > eps && s < kPi - eps;
}

/// Phi on the tetrahedron: the exposing functional f of the Q4 point with
/// angles t gives the boundary point 2Hf, whose angles are read off on the
/// branch arccos in (0, pi) for the first three; delta closes the sum.
inline AngleTuple phi_map(const AngleTuple& t, const Tolerance& tol = {}) {
  check_angle_sum(t, tol);
  if (!in_tetrahedron(t, tol.eps_angle)) {
    throw Error(ErrorKind::OutsideTetrahedron, "need alpha, beta, gamma > 0 and alpha + beta + gamma < pi");
  }
  const Correlation c = from_dual(exposing_functional(t, tol));
  auto ac = [](double x) { return std::acos(std::clamp(x, -1.0, 1.0)); };
  return AngleTuple::from_three(ac(c[0]), ac(c[1]), ac(c[2]));
}

// ---------------------------------------------------------------------------
// Relations on incident pairs

inline constexpr int kNcycleResiduals = 20;

/// Values at (c, f) of: l = c.f - 1, h(c), h°(f) = k(f) - p(f), the 14 further
/// generators of the prime ideal of incident Q4 pairs in their standard
/// order, and the images of the cubic generator that singles out c11 under
/// the coordinate transpositions singling out c12, c21 and c22.
inline std::array<double, kNcycleResiduals> ncycle_residuals(const Correlation& c, const Functional& f) {
  const double c11 = c[0], c12 = c[1], c21 = c[2], c22 = c[3];
  const double f11 = f[0], f12 = f[1], f21 = f[2], f22 = f[3];

  // Cubic generator with coordinate a singled out.
  auto cubic = [](const Vec4& x, const Vec4& y, int a) {
    std::array<int, 4> idx{a, 0, 0, 0};
    for (int k = 0, n = 1; k < 4; ++k) {
      if (k != a) idx[n++] = k;
    }
    const double x0 = x[idx[0]], x1 = x[idx[1]], x2 = x[idx[2]], x3 = x[idx[3]];
    return (x0 * x1 * x1 + x0 * x2 * x2 + x0 * x3 * x3 - 2 * x1 * x2 * x3) * y[idx[0]] + x1 * x1 * x1 * y[idx[1]] +
           x2 * x2 * x2 * y[idx[2]] + x3 * x3 * x3 * y[idx[3]] - 1;
  };

  std::array<double, kNcycleResiduals> r{};
  r[0] = dot(f, c) - 1;
  r[1] = detail::h_factored(c.v);
  r[2] = detail::k_poly(f.v) - detail::p_poly(f.v);
  r[3] = c11 * c11 * f11 * f11 - c22 * c22 * f22 * f22 - f11 * f11 + f22 * f22;
  r[4] = c21 * f11 * f12 * f21 + c22 * f11 * f12 * f22 + c11 * f11 * f21 * f22 + c12 * f12 * f21 * f22;
  r[5] = c11 * c11 * f11 * f12 - c21 * c21 * f21 * f22 - c12 * c21 * f12 * f22 + c11 * c22 * f12 * f22 -
         f11 * f12 + f21 * f22;
  r[6] = c11 * c11 * f11 * f21 - c12 * c12 * f12 * f22 - c12 * c21 * f21 * f22 + c11 * c22 * f21 * f22 -
         f11 * f21 + f12 * f22;
  r[7] = c12 * c12 * f11 * f12 - c21 * c21 * f21 * f22 - c11 * c21 * f11 * f22 + c12 * c22 * f11 * f22 -
         f11 * f12 + f21 * f22;
  r[8] = c12 * c12 * f12 * f21 - c11 * c11 * f11 * f22 - c11 * c21 * f21 * f22 + c12 * c22 * f21 * f22 -
         f12 * f21 + f11 * f22;
  r[9] = c21 * c21 * f11 * f21 - c12 * c12 * f12 * f22 - c11 * c12 * f11 * f22 + c21 * c22 * f11 * f22 -
         f11 * f21 + f12 * f22;
  r[10] = c21 * c21 * f12 * f21 - c11 * c11 * f11 * f22 - c11 * c12 * f12 * f22 + c21 * c22 * f12 * f22 -
          f12 * f21 + f11 * f22;
  r[11] = cubic(c.v, f.v, 0);
  r[12] = c11 * c12 * f12 * f21 - c21 * c22 * f12 * f21 + c12 * c21 * f21 * f22 - c11 * c22 * f21 * f22 +
          c12 * c12 * f12 * f22 - c22 * c22 * f12 * f22;
  r[13] = c12 * c21 * f11 * f21 - c11 * c22 * f11 * f21 + c11 * c21 * f11 * f22 - c12 * c22 * f11 * f22 +
          c21 * c21 * f21 * f22 - c22 * c22 * f21 * f22;
  r[14] = c12 * c21 * f11 * f12 - c11 * c22 * f11 * f12 + c11 * c12 * f11 * f22 - c21 * c22 * f11 * f22 +
          c12 * c12 * f12 * f22 - c22 * c22 * f12 * f22;
  const double t22 = c22 * c22 * c22 - c11 * c11 * c22 - c12 * c12 * c22 - c21 * c21 * c22 + 2 * c11 * c12 * c21;
  r[15] = (c12 * c12 * c12 - c11 * c11 * c12 - c12 * c21 * c21 - c12 * c22 * c22 + 2 * c11 * c21 * c22) * f12 -
          t22 * f22;
  r[16] = (c21 * c21 * c21 - c11 * c11 * c21 - c12 * c12 * c21 - c21 * c22 * c22 + 2 * c11 * c12 * c22) * f21 -
          t22 * f22;
  r[17] = cubic(c.v, f.v, 1);
  r[18] = cubic(c.v, f.v, 2);
  r[19] = cubic(c.v, f.v, 3);
  return r;
}

}  // namespace qbody

#endif  // QBODY_DUALITY_HPP
