#ifndef QBODY_MEMBERSHIP_HPP
#define QBODY_MEMBERSHIP_HPP

// Membership in the cube N, the demicube C and the correlation body Q.
//
// Every test returns a signed margin: a constraint slack, positive inside,
// zero on the boundary. Margins of different oracles are not Euclidean
// distances and are not comparable in scale; they only share their sign
// and their zero set. A point is reported inside when its margin is at
// least -eps_boundary.

#include "qbody/completion.hpp"
#include "qbody/core.hpp"

#include <array>
#include <optional>
#include <string_view>

namespace qbody {

enum class Oracle { Classical, Semialg, Pushout, Completion, Timo, Landau };

inline constexpr std::array<Oracle, 5> kQuantumOracles{
    Oracle::Semialg, Oracle::Pushout, Oracle::Completion, Oracle::Timo, Oracle::Landau};

inline const char* to_string(Oracle o) {
  switch (o) {
    case Oracle::Classical: return "classical";
    case Oracle::Semialg: return "semialg";
    case Oracle::Pushout: return "pushout";
    case Oracle::Completion: return "completion";
    case Oracle::Timo: return "timo";
    case Oracle::Landau: return "landau";
  }
  return "unknown";
}

inline std::optional<Oracle> parse_oracle(std::string_view name) {
  for (Oracle o : {Oracle::Classical, Oracle::Semialg, Oracle::Pushout, Oracle::Completion,
                   Oracle::Timo, Oracle::Landau}) {
    if (name == to_string(o)) return o;
  }
  return std::nullopt;
}

struct MembershipVerdict {
  bool inside = false;
  double margin = 0;
  Oracle oracle = Oracle::Semialg;

  bool boundary(const Tolerance& tol = {}) const { return std::abs(margin) <= tol.eps_boundary; }
};

namespace detail {

inline MembershipVerdict verdict(double margin, Oracle o, const Tolerance& tol) {
  return {margin >= -tol.eps_boundary, margin, o};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pushout

enum class PushDirection { Forward, Inverse };

/// Entrywise t -> sin(pi t / 2) (Forward) or t -> (2/pi) arcsin(t) (Inverse).
/// Maps C onto Q. Entries within eps_boundary outside the cube are clamped.
inline Correlation pushout(const Correlation& c, PushDirection dir, const Tolerance& tol = {}) {
  if (cube_slack(c) < -tol.eps_boundary) {
    throw Error(ErrorKind::InputOutsideCube, "pushout needs every |c_ij| <= 1");
  }
  Vec4 out;
  for (int k = 0; k < 4; ++k) {
    const double t = std::clamp(c[k], -1.0, 1.0);
    out[k] = dir == PushDirection::Forward ? std::sin(0.5 * kPi * t) : 2.0 / kPi * std::asin(t);
  }
  return Correlation(out);
}

// ---------------------------------------------------------------------------
// Classical polytope

/// Membership in C: the 8 cube facets and the 8 CHSH facets. The margin is the
/// smallest of the 16 slacks.
inline MembershipVerdict member_classical(const Correlation& c, const Tolerance& tol = {}) {
  const double margin = std::min(cube_slack(c), 1.0 - chsh_max(c));
  return detail::verdict(margin, Oracle::Classical, tol);
}

// ---------------------------------------------------------------------------
// Quantum body

namespace detail {

inline double semialg_margin(const Correlation& c) {
  const double cube = cube_slack(c);
  const double g = g_poly(c.v);
  const double h = h_factored(c.v);
  return std::min(cube, std::max(g, h));
}

inline double pushout_margin(const Correlation& c, const Tolerance& tol) {
  const double cube = cube_slack(c);
  if (cube < -tol.eps_boundary) return cube;
  const Correlation pre = pushout(c, PushDirection::Inverse, tol);
  return std::min(cube, std::min(cube_slack(pre), 1.0 - chsh_max(pre)));
}

inline double completion_margin(const Correlation& c) {
  const double cube = cube_slack(c);
  return std::min(cube, u_interval(c).overlap());
}

// g >= -2 sqrt(prod(1 - c_ij^2)), valid only inside the cube.
inline double timo_margin(const Correlation& c) {
  const double cube = cube_slack(c);
  double prod = 1.0;
  for (int k = 0; k < 4; ++k) prod *= 1.0 - c[k] * c[k];
  return std::min(cube, g_poly(c.v) + 2.0 * std::sqrt(std::max(0.0, prod)));
}

// sqrt((1-c11²)(1-c12²)) + sqrt((1-c21²)(1-c22²)) >= |c11 c12 - c21 c22|.
// Outside the cube a radicand may be a product of two negative factors; the
// cube slack then dominates the margin.
inline double landau_margin(const Correlation& c) {
  const double cube = cube_slack(c);
  const double r1 = (1 - c.at(1, 1) * c.at(1, 1)) * (1 - c.at(1, 2) * c.at(1, 2));
  const double r2 = (1 - c.at(2, 1) * c.at(2, 1)) * (1 - c.at(2, 2) * c.at(2, 2));
  const double lhs = std::sqrt(std::max(0.0, r1)) + std::sqrt(std::max(0.0, r2));
  const double rhs = std::abs(c.at(1, 1) * c.at(1, 2) - c.at(2, 1) * c.at(2, 2));
  return std::min(cube, lhs - rhs);
}

}  // namespace detail

/// Membership of c in Q by the named characterization. All five quantum
/// oracles agree except within the boundary band.
inline MembershipVerdict member(const Correlation& c, Oracle oracle, const Tolerance& tol = {}) {
  switch (oracle) {
    case Oracle::Classical: return member_classical(c, tol);
    case Oracle::Semialg: return detail::verdict(detail::semialg_margin(c), oracle, tol);
    case Oracle::Pushout: return detail::verdict(detail::pushout_margin(c, tol), oracle, tol);
    case Oracle::Completion: {
      // Same decision as solve_completion(c).feasible.
      return detail::verdict(detail::completion_margin(c), oracle, tol);
    }
    case Oracle::Timo: return detail::verdict(detail::timo_margin(c), oracle, tol);
    case Oracle::Landau: return detail::verdict(detail::landau_margin(c), oracle, tol);
  }
  throw std::invalid_argument("unknown oracle");
}

inline std::array<MembershipVerdict, 5> member_all(const Correlation& c, const Tolerance& tol = {}) {
  std::array<MembershipVerdict, 5> out;
  for (std::size_t n = 0; n < kQuantumOracles.size(); ++n) out[n] = member(c, kQuantumOracles[n], tol);
  return out;
}

/// Number of CHSH expressions strictly above 1.
inline int chsh_violations(const Correlation& c) {
  const auto vals = chsh_values(c);
  return static_cast<int>(std::count_if(vals.begin(), vals.end(), [](double x) { return x > 1.0; }));
}

}  // namespace qbody

#endif  // QBODY_MEMBERSHIP_HPP
