#ifndef QBODY_QUANTUM_HPP
#define QBODY_QUANTUM_HPP

// Explicit real quantum models (psi; A1, A2, B1, B2) realizing points of Q,
// the algebraic relations that single out models of extreme points, and
// direct sums of models.

#include "qbody/boundary.hpp"
#include "qbody/core.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace qbody {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct QuantumModel {
  Vec psi;
  Mat A1, A2, B1, B2;

  int d() const { return static_cast<int>(psi.size()); }
  const Mat& A(int i) const { return i == 1 ? A1 : A2; }
  const Mat& B(int j) const { return j == 1 ? B1 : B2; }
};

/// Throws InvalidModel unless psi is a unit vector and the observables are
/// symmetric d x d matrices with spectrum in [-1, 1] such that every A_i
/// commutes with every B_j.
inline void validate(const QuantumModel& m, double tol = 1e-10) {
  const int d = m.d();
  if (d == 0) throw Error(ErrorKind::InvalidModel, "empty state");
  if (std::abs(m.psi.norm() - 1.0) > 1e-12) throw Error(ErrorKind::InvalidModel, "psi is not normalized");
  for (const Mat* x : {&m.A1, &m.A2, &m.B1, &m.B2}) {
    if (x->rows() != d || x->cols() != d) throw Error(ErrorKind::InvalidModel, "observable has wrong shape");
    if (!x->allFinite()) throw Error(ErrorKind::InvalidModel, "observable has non-finite entries");
    if ((*x - x->transpose()).cwiseAbs().maxCoeff() > tol) {
      throw Error(ErrorKind::InvalidModel, "observable is not symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Mat> es(*x, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().cwiseAbs().maxCoeff() > 1.0 + tol) {
      throw Error(ErrorKind::InvalidModel, "observable has spectrum outside [-1, 1]");
    }
  }
  for (int i = 1; i <= 2; ++i) {
    for (int j = 1; j <= 2; ++j) {
      const Mat comm = m.A(i) * m.B(j) - m.B(j) * m.A(i);
      if (comm.cwiseAbs().maxCoeff() > tol) throw Error(ErrorKind::InvalidModel, "A_i and B_j do not commute");
    }
  }
}

/// c_ij = <psi | A_i B_j psi>.
inline Correlation correlations_of(const QuantumModel& m) {
  validate(m);
  Vec4 c;
  for (int i = 1; i <= 2; ++i) {
    for (int j = 1; j <= 2; ++j) c[2 * (i - 1) + (j - 1)] = m.psi.dot(m.A(i) * (m.B(j) * m.psi));
  }
  return Correlation(c);
}

/// Reflection M(tau) = [[cos tau, sin tau], [sin tau, -cos tau]].
inline Eigen::Matrix2d reflection(double tau) {
  Eigen::Matrix2d m;
  m << std::cos(tau), std::sin(tau), std::sin(tau), -std::cos(tau);
  return m;
}

inline Mat kron(const Mat& x, const Mat& y) {
  Mat out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index s = 0; s < x.cols(); ++s) {
      out.block(r * y.rows(), s * y.cols(), y.rows(), y.cols()) = x(r, s) * y;
    }
  }
  return out;
}

/// Singlet-type state (0, 1, -1, 0)/sqrt 2 in R^2 (x) R^2.
inline Vec singlet() {
  Vec psi(4);
  psi << 0, 1, -1, 0;
  return psi / std::sqrt(2.0);
}

/// Two-qubit model with correlations (cos alpha, cos beta, cos gamma,
/// cos delta), using <psi | M(u) (x) M(v) psi> = -cos(u - v):
///   A1 = M(alpha) (x) 1,   A2 = M(-gamma) (x) 1,
///   B1 = 1 (x) M(pi),      B2 = 1 (x) M(alpha + beta + pi).
inline QuantumModel build_model(const AngleTuple& t, const Tolerance& tol = {}) {
  check_angle_sum(t, tol);
  const Mat id = Mat::Identity(2, 2);
  QuantumModel m;
  m.psi = singlet();
  m.A1 = kron(reflection(t.alpha), id);
  m.A2 = kron(reflection(-t.gamma), id);
  m.B1 = kron(id, reflection(kPi));
  m.B2 = kron(id, reflection(t.alpha + t.beta + kPi));
  return m;
}

// ---------------------------------------------------------------------------
// Self-testing relations

struct SelfTestReport {
  Eigen::Matrix2d gamma = Eigen::Matrix2d::Zero();  // B_j psi ~ sum_i gamma(j,i) A_i psi
  double residual_bpsi = 0;
  double residual_squares = 0;
  double residual_anticommutator = 0;
  double residual_tracial = 0;
  double u_value = 0;
  int cyclic_dim = 0;
};

namespace detail {

/// Orthonormal basis (columns) of the span of all words of length <= 3 in
/// the observables applied to psi.
inline Mat cyclic_basis(const QuantumModel& m, double threshold = 1e-10) {
  const std::array<const Mat*, 4> gens{&m.A1, &m.A2, &m.B1, &m.B2};
  std::vector<Vec> words{m.psi};
  std::size_t begin = 0;
  for (int len = 1; len <= 3; ++len) {
    const std::size_t end = words.size();
    for (std::size_t w = begin; w < end; ++w) {
      for (const Mat* g : gens) words.push_back(*g * words[w]);
    }
    begin = end;
  }
  std::vector<Vec> basis;
  for (Vec v : words) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& b : basis) v -= b.dot(v) * b;
    }
    const double n = v.norm();
    if (n > threshold) basis.push_back(v / n);
  }
  Mat out(m.d(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = basis[k];
  return out;
}

}  // namespace detail

/// Residuals of the relations that hold for every model of a nonclassical
/// extreme point: B_j psi in the span of A_1 psi, A_2 psi; squares of the
/// observables are 1 and A1 A2 + A2 A1 = 2u on the cyclic subspace; the state
/// is the normalized trace on words in A1, A2 of length <= 2.
inline SelfTestReport selftest_residuals(const QuantumModel& m) {
  validate(m);
  SelfTestReport r;

  Mat span(m.d(), 2);
  span.col(0) = m.A1 * m.psi;
  span.col(1) = m.A2 * m.psi;
  const Eigen::CompleteOrthogonalDecomposition<Mat> cod(span);
  for (int j = 1; j <= 2; ++j) {
    const Vec target = m.B(j) * m.psi;
    const Vec coef = cod.solve(target);
    r.gamma.row(j - 1) = coef.transpose();
    r.residual_bpsi = std::max(r.residual_bpsi, (span * coef - target).norm());
  }

  const Mat basis = detail::cyclic_basis(m);
  r.cyclic_dim = static_cast<int>(basis.cols());
  auto on_sub = [&](const Mat& x) { return (x * basis).cwiseAbs().maxCoeff(); };
  const Mat id = Mat::Identity(m.d(), m.d());
  for (const Mat* x : {&m.A1, &m.A2, &m.B1, &m.B2}) {
    r.residual_squares = std::max(r.residual_squares, on_sub(*x * *x - id));
  }
  r.u_value = m.psi.dot(m.A1 * (m.A2 * m.psi));
  r.residual_anticommutator = on_sub(m.A1 * m.A2 + m.A2 * m.A1 - 2.0 * r.u_value * id);

  const std::array<Mat, 7> words{id, m.A1, m.A2, m.A1 * m.A2, m.A2 * m.A1, m.A1 * m.A1, m.A2 * m.A2};
  for (const Mat& w : words) {
    const double expect = m.psi.dot(w * m.psi);
    const double tr = (basis.transpose() * w * basis).trace() / static_cast<double>(basis.cols());
    r.residual_tracial = std::max(r.residual_tracial, std::abs(expect - tr));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Clifford realization of Gram systems

namespace detail {

/// Three pairwise anticommuting real symmetric involutions on R^4:
/// sigma3 (x) 1, sigma1 (x) 1 and J (x) J with J = [[0, 1], [-1, 0]].
inline const std::array<Mat, 3>& clifford_generators() {
  static const std::array<Mat, 3> gens = [] {
    Mat s1(2, 2), s3(2, 2), j(2, 2);
    s1 << 0, 1, 1, 0;
    s3 << 1, 0, 0, -1;
    j << 0, 1, -1, 0;
    const Mat id = Mat::Identity(2, 2);
    return std::array<Mat, 3>{kron(s3, id), kron(s1, id), kron(j, j)};
  }();
  return gens;
}

}  // namespace detail

/// Model on R^4 (x) R^4 with c_ij = a_i . b_j. The correlations only see the
/// projections of b_j onto span(a1, a2), so the system is first rewritten in
/// R^3 with the same inner products a_i . b_j; then
///   A_i = (sum_k a_i^k g_k) (x) 1,  B_j = 1 (x) (sum_k b_j^k g_k)^T,
/// and psi = sum_m e_m (x) e_m / 2 gives <psi| X (x) Y^T psi> = tr(XY)/4.
inline QuantumModel clifford_model(const GramSystem& gs) {
  if (gs.dim() > 4) throw Error(ErrorKind::DimensionTooLarge, "Gram vectors live in more than 4 dimensions");
  for (const Eigen::VectorXd* v : {&gs.a1, &gs.a2, &gs.b1, &gs.b2}) {
    if (v->size() != gs.dim()) throw Error(ErrorKind::InvalidModel, "Gram vectors of unequal length");
    if (std::abs(v->norm() - 1.0) > 1e-9) throw Error(ErrorKind::InvalidModel, "Gram vector is not a unit vector");
  }

  // Orthonormal basis e1, e2 of a subspace containing a1 and a2.
  const Eigen::VectorXd e1 = gs.a1;
  Eigen::VectorXd e2 = gs.a2 - gs.a2.dot(e1) * e1;
  if (e2.norm() > 1e-12) {
    e2.normalize();
  } else {
    // a2 = ±a1: complete e1 by any orthogonal unit vector, or none in R^1.
    e2 = Eigen::VectorXd::Zero(gs.dim());
    for (int k = 0; k < gs.dim() && e2.norm() < 0.5; ++k) {
      Eigen::VectorXd trial = Eigen::VectorXd::Unit(gs.dim(), k);
      trial -= trial.dot(e1) * e1;
      if (trial.norm() > 1e-6) e2 = trial.normalized();
    }
  }
  auto reduce_a = [&](const Eigen::VectorXd& a) { return Eigen::Vector3d(a.dot(e1), a.dot(e2), 0.0); };
  auto reduce_b = [&](const Eigen::VectorXd& b) {
    const double x = b.dot(e1), y = b.dot(e2);
    return Eigen::Vector3d(x, y, std::sqrt(std::max(0.0, 1.0 - x * x - y * y)));
  };

  const auto& g = detail::clifford_generators();
  auto combine = [&](const Eigen::Vector3d& w) { return Mat(w[0] * g[0] + w[1] * g[1] + w[2] * g[2]); };
  const Mat id = Mat::Identity(4, 4);

  QuantumModel m;
  m.psi = Vec::Zero(16);
  for (int k = 0; k < 4; ++k) m.psi[5 * k] = 0.5;
  m.A1 = kron(combine(reduce_a(gs.a1)), id);
  m.A2 = kron(combine(reduce_a(gs.a2)), id);
  m.B1 = kron(id, combine(reduce_b(gs.b1)).transpose());
  m.B2 = kron(id, combine(reduce_b(gs.b2)).transpose());
  return m;
}

// ---------------------------------------------------------------------------
// Direct sums

/// psi = (+)_k sqrt(w_k) psi_k with block-diagonal observables; correlations
/// are the w-weighted average.
inline QuantumModel mixture_model(const std::vector<std::pair<double, QuantumModel>>& parts) {
  if (parts.empty()) throw Error(ErrorKind::BadWeights, "no components");
  double total = 0;
  int d = 0;
  for (const auto& [w, m] : parts) {
    if (!(w > 0)) throw Error(ErrorKind::BadWeights, "weights must be positive");
    validate(m);
    total += w;
    d += m.d();
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorKind::BadWeights, "weights must sum to 1");

  QuantumModel out;
  out.psi = Vec::Zero(d);
  for (Mat* x : {&out.A1, &out.A2, &out.B1, &out.B2}) *x = Mat::Zero(d, d);
  int off = 0;
  for (const auto& [w, m] : parts) {
    const int n = m.d();
    out.psi.segment(off, n) = std::sqrt(w) * m.psi;
    out.A1.block(off, off, n, n) = m.A1;
    out.A2.block(off, off, n, n) = m.A2;
    out.B1.block(off, off, n, n) = m.B1;
    out.B2.block(off, off, n, n) = m.B2;
    off += n;
  }
  // Renormalize the rounding left over from the weights.
  out.psi /= out.psi.norm();
  return out;
}

}  // namespace qbody

#endif  // QBODY_QUANTUM_HPP
