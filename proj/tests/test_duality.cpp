#include "qbody/duality.hpp"
#include "qbody/measures.hpp"

#include <gtest/gtest.h>

#include <complex>
#include <random>

using namespace qbody;

namespace {

const double r2 = 1.0 / std::sqrt(2.0);
const double pi = kPi;
const Correlation kChsh(r2, r2, r2, -r2);

// Independent support oracle: extreme points of Q are c_ij = cos(a_i - b_j),
// so max f.c is found by alternating exact maximization over the four
// angles, from several random starts.
double support_oracle(const Vec4& f, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-pi, pi);
  double best = -1e300;
  for (int start = 0; start < 12; ++start) {
    double a[2] = {u(rng), u(rng)}, b[2] = {u(rng), u(rng)};
    for (int it = 0; it < 3000; ++it) {
      for (int i = 0; i < 2; ++i) {
        std::complex<double> z = f[2 * i] * std::polar(1.0, b[0]) + f[2 * i + 1] * std::polar(1.0, b[1]);
        a[i] = std::arg(z);
      }
      for (int j = 0; j < 2; ++j) {
        std::complex<double> z = f[j] * std::polar(1.0, a[0]) + f[2 + j] * std::polar(1.0, a[1]);
        b[j] = std::arg(z);
      }
    }
    double val = 0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) val += f[2 * i + j] * std::cos(a[i] - b[j]);
    }
    best = std::max(best, val);
  }
  return best;
}

AngleTuple random_tetra(std::mt19937_64& rng, double margin = 1e-3) {
  std::exponential_distribution<double> e(1.0);
  for (;;) {
    const double a = e(rng), b = e(rng), c = e(rng), d = e(rng), s = a + b + c + d;
    const AngleTuple t = AngleTuple::from_three(pi * a / s, pi * b / s, pi * c / s);
    double m = 1;
    for (double x : t.values()) m = std::min(m, std::abs(std::sin(x)));
    if (m > margin) return t;
  }
}

}  // namespace

TEST(QuantumCase, Examples) {
  auto cv = quantum_case(Functional(0.5, 0.5, 0.5, -0.5));
  EXPECT_TRUE(cv.quantum_case);
  EXPECT_DOUBLE_EQ(*cv.m_value, 4.0);
  EXPECT_TRUE(cv.cond3 && cv.cond4 && cv.cond5);

  cv = quantum_case(Functional(1, 0, 0, 0));
  EXPECT_FALSE(cv.quantum_case);
  EXPECT_FALSE(cv.m_value.has_value());

  cv = quantum_case(Functional(1, 1, 1, 1));
  EXPECT_FALSE(cv.quantum_case);
  EXPECT_FALSE(cv.cond3 || cv.cond4 || cv.cond5);

  EXPECT_THROW(quantum_case(Functional(0, 0, 0, 0)), Error);
}

TEST(QuantumCase, CriteriaAgree) {
  std::mt19937_64 rng(51);
  std::normal_distribution<double> nd;
  int quantum = 0, checked = 0;
  for (int n = 0; n < 100000; ++n) {
    const Functional f(nd(rng), nd(rng), nd(rng), nd(rng));
    if (f.v.cwiseAbs().minCoeff() <= 1e-6) continue;
    const CaseVerdict cv = quantum_case(f);
    if (cv.margin <= 1e-9) continue;
    ++checked;
    ASSERT_EQ(cv.cond3, cv.cond4);
    ASSERT_EQ(cv.cond3, cv.cond5);
    quantum += cv.cond3;
  }
  EXPECT_GT(checked, 99000);
  EXPECT_GT(quantum, 1000);
}

TEST(Support, Examples) {
  EXPECT_NEAR(support(Functional(0.5, 0.5, 0.5, -0.5)), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(support(Functional(1, 0, 0, 0)), 1.0);
  EXPECT_EQ(support(Functional(1, 1, 1, 1)), 4.0);
  EXPECT_EQ(support(Functional(0, 0, 0, 0)), 0.0);
}

TEST(Support, MatchesAngleOracle) {
  std::mt19937_64 rng(52);
  std::normal_distribution<double> nd;
  for (int n = 0; n < 300; ++n) {
    const Vec4 f(nd(rng), nd(rng), nd(rng), nd(rng));
    const double want = support_oracle(f, rng);
    ASSERT_NEAR(support(Functional(f)), want, 1e-9 * std::max(1.0, want)) << f.transpose();
  }
}

TEST(Support, HomogeneousAndAboveSamples) {
  std::mt19937_64 rng(53);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> scale(0.01, 100);
  const auto pts = sample(SampleTarget::QInterior, {54, 10000, 1});
  for (int n = 0; n < 10000; ++n) {
    const Functional f(nd(rng), nd(rng), nd(rng), nd(rng));
    const double lam = scale(rng);
    const double s = support(f);
    ASSERT_NEAR(support(f * lam), lam * s, 1e-12 * lam * s);
    ASSERT_GE(s, dot(f, pts[n]) - 1e-12);
  }
}

TEST(Support, AttainedByExposedPoint) {
  std::mt19937_64 rng(55);
  for (int n = 0; n < 1000; ++n) {
    const AngleTuple t = random_tetra(rng);
    const Functional f = exposing_functional(t);
    ASSERT_NEAR(support(f), 1.0, 1e-9);
  }
}

TEST(Gauge, Examples) {
  EXPECT_EQ(gauge(Correlation(0, 0, 0, 0)), 0.0);
  EXPECT_NEAR(gauge(kChsh), 1.0, 1e-15);
  EXPECT_NEAR(gauge(Correlation(1, 1, 1, -1)), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(gauge(Correlation(1, 1, 1, 1)), 1.0, 1e-15);
}

TEST(Gauge, MatchesBisection) {
  std::mt19937_64 rng(56);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int n = 0; n < 10000; ++n) {
    const Correlation c(u(rng), u(rng), u(rng), u(rng));
    ASSERT_NEAR(gauge(c), gauge_bisection(c), 1e-7);
  }
}

TEST(DualMember, Examples) {
  auto v = dual_member(Functional(Vec4(1, 1, 1, -1) / (2 * std::sqrt(2.0))));
  EXPECT_TRUE(v.inside);
  EXPECT_LE(std::abs(v.margin), 1e-9);
  v = dual_member(Functional(1, 0, 0, 0));
  EXPECT_TRUE(v.inside);
  EXPECT_LE(std::abs(v.margin), 1e-9);
  EXPECT_FALSE(dual_member(Functional(1, 1, 1, 1)).inside);
}

TEST(DualMember, AgreesWithSupport) {
  std::mt19937_64 rng(57);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int n = 0; n < 10000; ++n) {
    const Functional f(u(rng), u(rng), u(rng), u(rng));
    const double s = support(f);
    if (std::abs(s - 1) < 1e-8) continue;
    ASSERT_EQ(dual_member(f).inside, s <= 1);
  }
}

TEST(DualCompletion, Examples) {
  auto r = dual_completion(Functional(Vec4(1, 1, 1, -1) / (2 * std::sqrt(2.0))));
  EXPECT_TRUE(r.feasible);
  EXPECT_NEAR(r.witness.p1, 0.5, 1e-6);
  EXPECT_NEAR(r.witness.p3, 0.5, 1e-6);
  const Eigen::SelfAdjointEigenSolver<Mat4> es(r.witness.matrix());
  EXPECT_LT((es.eigenvalues() - Vec4(0, 0, 1, 1)).cwiseAbs().maxCoeff(), 1e-6);

  r = dual_completion(Functional(0, 0, 0, 0));
  EXPECT_TRUE(r.feasible);
  EXPECT_NEAR(r.witness.p1, 0.5, 1e-9);
  EXPECT_NEAR(r.witness.p3, 0.5, 1e-9);

  EXPECT_FALSE(dual_completion(Functional(1, 1, 1, 1)).feasible);
  EXPECT_TRUE(dual_completion(Functional(1, 0, 0, 0)).feasible);
}

TEST(DualCompletion, FeasibleIffInPolar) {
  std::mt19937_64 rng(58);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> target(0.5, 1.5);
  for (int n = 0; n < 300; ++n) {
    Functional f(nd(rng), nd(rng), nd(rng), nd(rng));
    f = f * (target(rng) / support(f));
    const double s = support(f);
    if (std::abs(s - 1) < 1e-3) continue;
    const auto r = dual_completion(f);
    ASSERT_EQ(r.feasible, s <= 1) << s;
    ASSERT_NEAR(r.witness.p1 + r.witness.p2 + r.witness.p3 + r.witness.p4, 2, 1e-12);
  }
}

TEST(DualCompletion, PairingIdentity) {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(-1, 1), p(0, 1);
  const auto pts = sample(SampleTarget::QInterior, {60, 2000, 1});
  for (const auto& c : pts) {
    const Functional f(u(rng), u(rng), u(rng), u(rng));
    const double p1 = p(rng), p3 = p(rng);
    const Mat4 F = DualCompletion{f, p1, 1 - p1, p3, 1 - p3}.matrix();
    const Mat4 C = solve_completion(c).witness.matrix();
    ASSERT_NEAR((C * F).trace(), 2 - 2 * dot(f, c), 1e-12);
    ASSERT_EQ(F(0, 1), 0.0);
    ASSERT_EQ(F(2, 3), 0.0);
    ASSERT_EQ(F, F.transpose());
  }
}

TEST(PhiMap, Examples) {
  const AngleTuple chsh{pi / 4, pi / 4, pi / 4, -3 * pi / 4};
  const AngleTuple img = phi_map(chsh);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(img.values()[k], chsh.values()[k], 1e-12);

  const AngleTuple t{0.3, 0.7, 0.5, -1.5};
  const AngleTuple back = phi_map(phi_map(t));
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(back.values()[k], t.values()[k], 1e-12);

  EXPECT_THROW(phi_map({1.0, 1.0, 1.5, -3.5}), Error);
  EXPECT_THROW(phi_map({-0.1, 0.5, 0.5, -0.9}), Error);
}

TEST(PhiMap, InvolutionOnTetrahedron) {
  std::mt19937_64 rng(61);
  for (int n = 0; n < 1000; ++n) {
    const AngleTuple t = random_tetra(rng);
    const AngleTuple p = phi_map(t);
    ASSERT_TRUE(in_tetrahedron(p));
    const AngleTuple back = phi_map(p);
    for (int k = 0; k < 4; ++k) ASSERT_NEAR(back.values()[k], t.values()[k], 1e-8);
  }
}

TEST(PhiMap, FacesCollapseToVertices) {
  // Approaching a face of T along a fixed direction, the image tends to a
  // vertex: alpha -> 0 goes to (0,0,0), beta -> 0 to (0,pi,0), gamma -> 0 to
  // (0,0,pi) and alpha + beta + gamma -> pi to (pi,0,0). Distance shrinks like
  // the square root of the distance to the face.
  auto dist = [](const AngleTuple& t, const Eigen::Vector3d& v) {
    return (Eigen::Vector3d(t.alpha, t.beta, t.gamma) - v).cwiseAbs().maxCoeff();
  };
  double prev[4] = {10, 10, 10, 10};
  for (double e : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const double d[4] = {dist(phi_map(AngleTuple::from_three(e, 0.7, 0.5)), {0, 0, 0}),
                         dist(phi_map(AngleTuple::from_three(0.7, e, 0.5)), {0, pi, 0}),
                         dist(phi_map(AngleTuple::from_three(0.7, 0.5, e)), {0, 0, pi}),
                         dist(phi_map(AngleTuple::from_three(0.7, 0.5, pi - 1.2 - e)), {pi, 0, 0})};
    for (int k = 0; k < 4; ++k) {
      EXPECT_LT(d[k], prev[k]);
      EXPECT_LT(d[k], 5 * std::sqrt(e));
      prev[k] = d[k];
    }
  }
}

TEST(Ncycle, Examples) {
  const AngleTuple t{pi / 4, pi / 4, pi / 4, -3 * pi / 4};
  for (double r : ncycle_residuals(t.point(), exposing_functional(t))) EXPECT_LT(std::abs(r), 1e-10);
  EXPECT_EQ(ncycle_residuals(Correlation(1, 1, 1, 1), Functional(1, 0, 0, 0))[0], 0.0);
  EXPECT_EQ(ncycle_residuals(Correlation(0, 0, 0, 0), Functional(0, 0, 0, 0))[0], -1.0);
}

TEST(Ncycle, VanishOnExposedPairs) {
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> u(-pi, pi);
  int tested = 0;
  while (tested < 1000) {
    const AngleTuple t = AngleTuple::from_three(u(rng), u(rng), u(rng));
    double m = 1;
    for (double x : t.values()) m = std::min(m, std::abs(std::sin(x)));
    if (t.Delta() > -1e-3 || m < 1e-2) continue;
    ++tested;
    const auto r = ncycle_residuals(t.point(), exposing_functional(t));
    for (int k = 0; k < kNcycleResiduals; ++k) ASSERT_LT(std::abs(r[k]), 1e-9) << k;
  }
}

TEST(Ncycle, NonzeroOffTheStratum) {
  // A Q4 point paired with the functional of a different Q4 point.
  const AngleTuple s{0.3, 0.7, 0.5, -1.5}, t{0.4, 0.6, 0.5, -1.5};
  const auto r = ncycle_residuals(s.point(), exposing_functional(t));
  double worst = 0;
  for (double x : r) worst = std::max(worst, std::abs(x));
  EXPECT_GT(worst, 1e-3);
}
