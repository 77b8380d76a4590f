#ifndef QBODY_CORE_HPP
#define QBODY_CORE_HPP

// Numeric foundation for the quantum correlation body Q in the minimal
// (two parties, two settings, two outcomes, zero marginals) scenario.
//
// Coordinate order is fixed everywhere as (c11, c12, c21, c22): the first
// index is Alice's setting i, the second Bob's setting j. Vector index k maps
// to (i, j) = (k / 2 + 1, k % 2 + 1).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbody {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using IntMat4 = Eigen::Matrix<int, 4, 4>;

inline constexpr double kPi = std::numbers::pi;

enum class ErrorKind {
  InputOutsideCube,
  AmbiguousClassification,
  AngleSumViolation,
  NotExtreme,
  DegenerateAngles,
  NotPSD,
  ZeroFunctional,
  OutsideTetrahedron,
  InvalidModel,
  DimensionTooLarge,
  BadWeights,
  InvalidSlice,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InputOutsideCube: return "InputOutsideCube";
    case ErrorKind::AmbiguousClassification: return "AmbiguousClassification";
    case ErrorKind::AngleSumViolation: return "AngleSumViolation";
    case ErrorKind::NotExtreme: return "NotExtreme";
    case ErrorKind::DegenerateAngles: return "DegenerateAngles";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::ZeroFunctional: return "ZeroFunctional";
    case ErrorKind::OutsideTetrahedron: return "OutsideTetrahedron";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::BadWeights: return "BadWeights";
    case ErrorKind::InvalidSlice: return "InvalidSlice";
  }
  return "Unknown";
}

/// Domain error raised by library operations. `kind()` is machine readable.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
        kind_(kind),
        detail_(detail) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

struct Tolerance {
  double eps_boundary = 1e-9;
  double eps_angle = 1e-9;
  double eps_psd = 1e-10;

  bool valid() const {
    return eps_boundary > 0 && eps_angle > 0 && eps_psd > 0 && eps_psd <= eps_boundary;
  }
};

/// A point of 4-space tagged by its role, so that correlations and
/// functionals cannot be mixed up silently. Entries must be finite.
template <class Tag>
struct Point4 {
  Vec4 v = Vec4::Zero();

  Point4() = default;
  explicit Point4(const Vec4& x) : v(x) { check(); }
  Point4(double x11, double x12, double x21, double x22) : v(x11, x12, x21, x22) { check(); }

  double operator[](int k) const { return v[k]; }
  /// Entry (i, j) with 1-based indices as in c_ij.
  double at(int i, int j) const { return v[2 * (i - 1) + (j - 1)]; }

  Point4 operator*(double s) const { return Point4(v * s); }
  Point4 operator+(const Point4& o) const { return Point4(v + o.v); }
  Point4 operator-() const { return Point4(-v); }

 private:
  void check() const {
    if (!v.allFinite()) throw std::invalid_argument("point entries must be finite");
  }
};

struct CorrelationTag {};
struct FunctionalTag {};
using Correlation = Point4<CorrelationTag>;
using Functional = Point4<FunctionalTag>;

inline double dot(const Functional& f, const Correlation& c) { return f.v.dot(c.v); }

// ---------------------------------------------------------------------------
// Defining polynomials

struct PrimalPolys {
  double g = 0;
  double h = 0;
};

struct DualPolys {
  double k = 0;
  double p = 0;
  double q = 0;
  double g_dual = 0;
  double h_dual = 0;
};

namespace detail {

inline double g_poly(const Vec4& c) {
  return 2.0 - c.squaredNorm() + 2.0 * c[0] * c[1] * c[2] * c[3];
}

// h = 4 prod(1 - c_ij^2) - g^2; visibly invariant under the symmetry group.
inline double h_product_form(const Vec4& c) {
  const double g = g_poly(c);
  double prod = 4.0;
  for (int k = 0; k < 4; ++k) prod *= 1.0 - c[k] * c[k];
  return prod - g * g;
}

// Sextic part k and product p of four entries.
inline double k_poly(const Vec4& x) {
  return (x[0] * x[3] - x[1] * x[2]) * (x[0] * x[1] - x[2] * x[3]) * (x[0] * x[2] - x[1] * x[3]);
}
inline double p_poly(const Vec4& x) { return x[0] * x[1] * x[2] * x[3]; }

// q(x) = p(2Hx): product of the four Hadamard combinations.
inline double q_poly(const Vec4& x) {
  return (x[0] + x[1] + x[2] + x[3]) * (x[0] - x[1] + x[2] - x[3]) *
         (x[0] + x[1] - x[2] - x[3]) * (x[0] - x[1] - x[2] + x[3]);
}

// h = 4k - q: the degree six form, better conditioned near the cube boundary.
inline double h_factored(const Vec4& c) { return 4.0 * k_poly(c) - q_poly(c); }

inline bool close_rel(double a, double b, double scale, double rel) {
  return std::abs(a - b) <= rel * std::max(1.0, scale);
}

}  // namespace detail

/// H: half the 4x4 Hadamard matrix, an orthogonal involution. 2H maps the
/// vertices ±e_k of the cross polytope N° to the even cube vertices.
inline const Mat4& hadamard() {
  static const Mat4 h = [] {
    Mat4 m;
    m << 1, 1, 1, 1,
         1, -1, 1, -1,
         1, 1, -1, -1,
         1, -1, -1, 1;
    return Mat4(0.5 * m);
  }();
  return h;
}

/// g and h of the semialgebraic description. h is returned from the
/// factorized sextic form and cross-checked against the product form.
inline PrimalPolys primal_polys(const Correlation& c) {
  const Vec4& x = c.v;
  PrimalPolys out{detail::g_poly(x), detail::h_factored(x)};
  const double h1 = detail::h_product_form(x);
  double scale = 1.0;
  for (int k = 0; k < 4; ++k) scale *= std::max(1.0, x[k] * x[k]);
  if (!detail::close_rel(out.h, h1, 4.0 * scale, 1e-9)) {
    throw std::logic_error("h product form and factored form disagree");
  }
  return out;
}

/// Polynomials of the dual body: k, p, q and
///   h°(f) = h(2Hf)/256 = k(f) - p(f),   g°(f) = g(2Hf)/2 = 1 - 2|f|² + q(f).
inline DualPolys dual_polys(const Functional& f) {
  const Vec4& x = f.v;
  DualPolys out;
  out.k = detail::k_poly(x);
  out.p = detail::p_poly(x);
  out.q = detail::q_poly(x);
  out.g_dual = 1.0 - 2.0 * x.squaredNorm() + out.q;
  out.h_dual = out.k - out.p;

  const Vec4 c = 2.0 * hadamard() * x;
  const double scale = std::pow(std::max(1.0, c.cwiseAbs().maxCoeff()), 8);
  if (!detail::close_rel(out.h_dual, detail::h_product_form(c) / 256.0, scale, 1e-9) ||
      !detail::close_rel(out.g_dual, detail::g_poly(c) / 2.0, scale, 1e-9)) {
    throw std::logic_error("dual polynomials disagree with the Hadamard substitution");
  }
  return out;
}

// ---------------------------------------------------------------------------
// CHSH expressions

/// Sign patterns (s11, s12, s21, s22) with product -1, in the order used by
/// chsh_values. Pattern 0 is the standard CHSH form ½(c11 + c12 + c21 - c22).
inline const std::array<Vec4, 8>& chsh_patterns() {
  static const std::array<Vec4, 8> patterns = [] {
    std::array<Vec4, 8> out;
    int n = 0;
    // Bit 3 - k of the mask flips entry k; odd masks only, so mask 1 gives
    // (+,+,+,-) first.
    for (int mask = 0; mask < 16; ++mask) {
      Vec4 s;
      for (int k = 0; k < 4; ++k) s[k] = (mask >> (3 - k)) & 1 ? -1.0 : 1.0;
      if (s.prod() < 0) out[n++] = s;
    }
    return out;
  }();
  return patterns;
}

inline std::array<double, 8> chsh_values(const Correlation& c) {
  std::array<double, 8> out{};
  const auto& pats = chsh_patterns();
  for (std::size_t n = 0; n < pats.size(); ++n) out[n] = 0.5 * pats[n].dot(c.v);
  return out;
}

inline double chsh_max(const Correlation& c) {
  const auto vals = chsh_values(c);
  return *std::max_element(vals.begin(), vals.end());
}

// ---------------------------------------------------------------------------
// Duality transform

enum class DualDirection { ToDual, FromDual };

/// ToDual: x -> ½Hx (maps Q onto Q°). FromDual: f -> 2Hf.
inline Vec4 dual_transform(const Vec4& x, DualDirection dir) {
  const double scale = dir == DualDirection::ToDual ? 0.5 : 2.0;
  return scale * (hadamard() * x);
}

inline Functional to_dual(const Correlation& c) {
  return Functional(dual_transform(c.v, DualDirection::ToDual));
}
inline Correlation from_dual(const Functional& f) {
  return Correlation(dual_transform(f.v, DualDirection::FromDual));
}

// ---------------------------------------------------------------------------
// Symmetry group

/// A signed permutation matrix with an even number of -1 entries. These are
/// exactly the cube symmetries that map even vertices to even vertices.
struct SymmetryElement {
  IntMat4 m = IntMat4::Identity();

  Vec4 apply(const Vec4& x) const { return m.cast<double>() * x; }
  Correlation operator()(const Correlation& c) const { return Correlation(apply(c.v)); }
  Functional operator()(const Functional& f) const { return Functional(apply(f.v)); }

  SymmetryElement operator*(const SymmetryElement& o) const { return {m * o.m}; }
  SymmetryElement inverse() const { return {m.transpose()}; }
  bool operator==(const SymmetryElement& o) const { return m == o.m; }
};

/// The even cube vertices, i.e. the vertices of the demicube C.
inline const std::array<Vec4, 8>& even_vertices() {
  static const std::array<Vec4, 8> verts = [] {
    std::array<Vec4, 8> out;
    int n = 0;
    for (int mask = 0; mask < 16; ++mask) {
      Vec4 s;
      for (int k = 0; k < 4; ++k) s[k] = (mask >> (3 - k)) & 1 ? -1.0 : 1.0;
      if (s.prod() > 0) out[n++] = s;
    }
    return out;
  }();
  return verts;
}

/// The 192 symmetries common to C and Q, generated by filtering all 384
/// signed permutations for those preserving the set of even vertices.
inline const std::vector<SymmetryElement>& symmetry_group() {
  static const std::vector<SymmetryElement> group = [] {
    std::vector<SymmetryElement> out;
    std::array<int, 4> perm{0, 1, 2, 3};
    do {
      for (int signs = 0; signs < 16; ++signs) {
        IntMat4 m = IntMat4::Zero();
        for (int r = 0; r < 4; ++r) m(r, perm[r]) = (signs >> r) & 1 ? -1 : 1;
        bool preserves = true;
        for (const Vec4& v : even_vertices()) {
          const Vec4 w = m.cast<double>() * v;
          if (w.prod() < 0) {
            preserves = false;
            break;
          }
        }
        if (preserves) out.push_back({m});
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
  }();
  return group;
}

/// Images of c under the whole group, deduplicated at max-norm distance tol.
inline std::vector<Correlation> orbit(const Correlation& c, double tol = 1e-9) {
  std::vector<Correlation> out;
  for (const auto& s : symmetry_group()) {
    const Correlation img = s(c);
    const bool seen = std::any_of(out.begin(), out.end(), [&](const Correlation& o) {
      return (o.v - img.v).cwiseAbs().maxCoeff() < tol;
    });
    if (!seen) out.push_back(img);
  }
  return out;
}

}  // namespace qbody

#endif  // QBODY_CORE_HPP
