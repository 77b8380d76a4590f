#include "qbody/boundary.hpp"
#include "qbody/measures.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qbody;

namespace {

const double r2 = 1.0 / std::sqrt(2.0);
const double pi = kPi;
const Correlation kChsh(r2, r2, r2, -r2);

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no qbody::Error thrown";
  return ErrorKind::InvalidSlice;
}

// Random angles in the tetrahedron alpha, beta, gamma > 0, sum < pi, kept
// away from its faces.
AngleTuple random_q4_angles(std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  for (;;) {
    const double a = e(rng), b = e(rng), c = e(rng), d = e(rng);
    const double s = a + b + c + d;
    const AngleTuple t = AngleTuple::from_three(pi * a / s, pi * b / s, pi * c / s);
    double m = 1;
    for (double x : t.values()) m = std::min(m, std::abs(std::sin(x)));
    if (m > 1e-3) return t;
  }
}

}  // namespace

TEST(SolveCompletion, Examples) {
  auto r = solve_completion(kChsh);
  EXPECT_TRUE(r.feasible);
  EXPECT_TRUE(r.unique);
  EXPECT_NEAR(r.witness.u, 0, 1e-15);
  EXPECT_NEAR(r.witness.v, 0, 1e-15);
  EXPECT_EQ(r.rank, 2);

  r = solve_completion(Correlation(0, 0, 0, 0));
  EXPECT_TRUE(r.feasible);
  EXPECT_FALSE(r.unique);
  EXPECT_EQ(r.rank, 4);
  EXPECT_EQ(r.witness.matrix(), Mat4::Identity());

  EXPECT_FALSE(solve_completion(Correlation(1, 1, 1, -1)).feasible);

  r = solve_completion(Correlation(1, 0, 0, 1));
  EXPECT_TRUE(r.feasible);
  EXPECT_TRUE(r.unique);
  EXPECT_EQ(r.witness.u, 0.0);
  EXPECT_EQ(r.witness.v, 0.0);
  EXPECT_EQ(r.rank, 2);
}

TEST(SolveCompletion, FeasibleWitnessIsPsd) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 0; n < 20000; ++n) {
    const Correlation c(u(rng), u(rng), u(rng), u(rng));
    const auto r = solve_completion(c);
    const double lam = min_eigenvalue(r.witness.matrix());
    const double g = detail::g_poly(c.v), h = detail::h_factored(c.v);
    if (std::max(g, h) > 1e-8) {
      ASSERT_TRUE(r.feasible);
      ASSERT_GE(lam, -1e-12);
    } else if (std::max(g, h) < -1e-8) {
      ASSERT_FALSE(r.feasible);
    }
  }
}

TEST(SolveCompletion, UniqueExactlyOnBoundary) {
  std::mt19937_64 rng(32);
  for (SampleTarget t : {SampleTarget::Q1, SampleTarget::Q2, SampleTarget::Q3, SampleTarget::Q4, SampleTarget::Q5}) {
    for (const auto& c : sample(t, {33, 200, 1})) ASSERT_TRUE(solve_completion(c).unique) << to_string(t);
  }
  for (const auto& c : sample(SampleTarget::QInterior, {34, 2000, 1})) {
    if (detail::semialg_margin(c) > 1e-6) {
      ASSERT_FALSE(solve_completion(c).unique);
    }
  }
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify(Correlation(1, 1, 1, 1)), Stratum::Q1);
  EXPECT_EQ(classify(kChsh), Stratum::Q4);
  EXPECT_EQ(classify(Correlation(1, 0, 0, 1)), Stratum::Q2);
  EXPECT_EQ(classify(Correlation(-1, 0, 0, 0)), Stratum::Q5);
  EXPECT_EQ(classify(Correlation(0, 0, 0, 0)), Stratum::Q6);
  EXPECT_EQ(classify(Correlation(1, 1, 1, -1)), Stratum::Exterior);
  EXPECT_EQ(classify(Correlation(1.5, 0, 0, 0)), Stratum::Exterior);

  // On the facet c11 = -1, g reduces to 1 - x^2 - y^2 - z^2 - 2xyz.
  const double x = 0.2, y = 0.3;
  for (double sgn : {-1.0, 1.0}) {
    const double z = -x * y + sgn * std::sqrt(x * x * y * y - x * x - y * y + 1);
    ASSERT_NEAR(1 - x * x - y * y - z * z - 2 * x * y * z, 0, 1e-15);
    EXPECT_EQ(classify(Correlation(-1, x, y, z)), Stratum::Q3);
  }
}

TEST(Classify, EquivariantUnderSymmetry) {
  for (SampleTarget t : {SampleTarget::Q2, SampleTarget::Q3, SampleTarget::Q4, SampleTarget::Q5,
                         SampleTarget::QInterior, SampleTarget::Cube}) {
    for (const auto& c : sample(t, {35, 20, 1})) {
      Stratum ref;
      try {
        ref = classify(c);
      } catch (const Error&) {
        continue;
      }
      for (const auto& s : symmetry_group()) ASSERT_EQ(classify(s(c)), ref);
    }
  }
}

TEST(Classify, RankTable) {
  const std::vector<std::pair<SampleTarget, Stratum>> cases{{SampleTarget::Q1, Stratum::Q1},
                                                            {SampleTarget::Q2, Stratum::Q2},
                                                            {SampleTarget::Q3, Stratum::Q3},
                                                            {SampleTarget::Q4, Stratum::Q4},
                                                            {SampleTarget::Q5, Stratum::Q5}};
  for (const auto& [target, stratum] : cases) {
    for (const auto& c : sample(target, {36, 300, 1})) {
      ASSERT_EQ(classify(c), stratum);
      const auto r = solve_completion(c);
      ASSERT_EQ(r.rank, *expected_rank(stratum));
      ASSERT_TRUE(r.unique);
    }
  }
  for (const auto& c : sample(SampleTarget::QInterior, {37, 300, 1})) {
    ASSERT_EQ(classify(c), Stratum::Q6);
    ASSERT_EQ(solve_completion(c).rank, 4);
  }
}

TEST(ExtremeFromAngles, Examples) {
  auto e = extreme_from_angles({pi / 4, pi / 4, pi / 4, -3 * pi / 4});
  EXPECT_LT((e.c.v - kChsh.v).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(e.stratum, Stratum::Q4);
  EXPECT_NEAR((AngleTuple{pi / 4, pi / 4, pi / 4, -3 * pi / 4}).Delta(), -0.25, 1e-15);

  e = extreme_from_angles({0, 0, pi, pi});
  EXPECT_EQ(e.c.v, Vec4(1, 1, -1, -1));
  EXPECT_EQ(e.stratum, Stratum::Q1);

  e = extreme_from_angles({pi / 2, pi / 2, pi / 2, pi / 2});
  EXPECT_LT(e.c.v.cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(e.stratum, Stratum::Q6);

  EXPECT_EQ(extreme_from_angles({0, pi / 3, pi, -4 * pi / 3}).stratum, Stratum::Q2);
  EXPECT_EQ(extreme_from_angles({0, 0.4, 0.5, -0.9}).stratum, Stratum::Q3);
  EXPECT_EQ(kind_of([] { extreme_from_angles({0.1, 0.2, 0.3, 0.4}); }), ErrorKind::AngleSumViolation);
  // 2pi multiples are fine.
  EXPECT_EQ(extreme_from_angles({pi / 4, pi / 4, pi / 4, 5 * pi / 4}).stratum, Stratum::Q4);
}

TEST(ExtremeFromAngles, GEqualsTwiceDelta) {
  std::mt19937_64 rng(38);
  for (int n = 0; n < 10000; ++n) {
    const AngleTuple t = random_q4_angles(rng);
    const ExtremePoint e = extreme_from_angles(t);
    ASSERT_EQ(e.stratum, Stratum::Q4);
    ASSERT_NEAR(detail::g_poly(e.c.v), 2 * t.Delta(), 1e-12);
  }
}

TEST(AnglesFromPoint, Examples) {
  const AngleTuple t = angles_from_point(kChsh);
  EXPECT_NEAR(t.alpha, pi / 4, 1e-12);
  EXPECT_NEAR(t.beta, pi / 4, 1e-12);
  EXPECT_NEAR(t.gamma, pi / 4, 1e-12);
  EXPECT_NEAR(t.delta, -3 * pi / 4, 1e-12);

  const AngleTuple v = angles_from_point(Correlation(1, 1, 1, 1));
  EXPECT_EQ(v.values(), (std::array<double, 4>{0, 0, 0, 0}));

  EXPECT_EQ(kind_of([] { angles_from_point(Correlation(-1, 0, 0, 0)); }), ErrorKind::NotExtreme);
  EXPECT_EQ(kind_of([] { angles_from_point(Correlation(0.1, 0.2, 0.3, 0.4)); }), ErrorKind::NotExtreme);
}

TEST(AnglesFromPoint, RoundTrip) {
  std::mt19937_64 rng(39);
  std::uniform_real_distribution<double> u(-pi, pi);
  int tested = 0;
  while (tested < 10000) {
    const AngleTuple t = AngleTuple::from_three(u(rng), u(rng), u(rng));
    if (t.Delta() >= -1e-6) continue;
    ++tested;
    const AngleTuple back = angles_from_point(extreme_from_angles(t).c);
    const AngleTuple want = t.canonical();
    for (int k = 0; k < 4; ++k) ASSERT_NEAR(back.values()[k], want.values()[k], 1e-8);
  }
}

TEST(AngleTuple, Canonical) {
  const AngleTuple t = AngleTuple{-0.3, 0.5, 2.0, -2.2}.canonical();
  EXPECT_DOUBLE_EQ(t.alpha, 0.3);
  EXPECT_DOUBLE_EQ(t.delta, 2.2);
  const AngleTuple z = AngleTuple{0, -0.5, 0.7, -0.2}.canonical();
  EXPECT_DOUBLE_EQ(z.beta, 0.5);
  EXPECT_DOUBLE_EQ((AngleTuple{7.0, 0, 0, -7.0}).canonical().alpha, 7.0 - 2 * pi);
  EXPECT_EQ(wrap_angle(-pi), pi);
}

TEST(ExposingFunctional, Examples) {
  const AngleTuple t{pi / 4, pi / 4, pi / 4, -3 * pi / 4};
  const Functional f = exposing_functional(t);
  EXPECT_LT((f.v - Vec4(1, 1, 1, -1) * std::sqrt(2.0) / 4).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(dot(f, t.point()), 1, 1e-15);

  EXPECT_EQ(kind_of([] { exposing_functional({pi / 3, pi / 3, pi / 3, -pi}); }), ErrorKind::DegenerateAngles);

  const AngleTuple s{pi / 3, pi / 4, pi / 6, -3 * pi / 4};
  EXPECT_NEAR(dot(exposing_functional(s), s.point()), 1, 1e-10);
}

TEST(ExposingFunctional, ExposesOnlyItsPoint) {
  std::mt19937_64 rng(40);
  std::uniform_real_distribution<double> u(-pi, pi);
  // Extreme points of Q are cosines of angle tuples; the rest of Q is their hull.
  std::vector<Correlation> extremes;
  for (int n = 0; n < 10000; ++n) extremes.push_back(AngleTuple::from_three(u(rng), u(rng), u(rng)).point());
  for (const Vec4& v : even_vertices()) extremes.emplace_back(v);

  for (int trial = 0; trial < 20; ++trial) {
    const AngleTuple t = random_q4_angles(rng);
    const Functional f = exposing_functional(t);
    const Correlation c = t.point();
    for (const auto& x : extremes) {
      const double val = dot(f, x);
      ASSERT_LE(val, 1 + 1e-12);
      if (val > 1 - 1e-10) {
        ASSERT_LT((x.v - c.v).norm(), 1e-4);
      }
    }
  }
}

TEST(GramVectors, Examples) {
  GramSystem gs = gram_vectors(Completion{kChsh, 0, 0});
  EXPECT_EQ(gs.dim(), 2);
  EXPECT_LT((gs.correlations().v - kChsh.v).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(gs.a1.dot(gs.a2), 0, 1e-12);
  EXPECT_NEAR(gs.b1.dot(gs.b2), 0, 1e-12);

  gs = gram_vectors(Completion{Correlation(0, 0, 0, 0), 0, 0});
  EXPECT_EQ(gs.dim(), 4);
  Eigen::Matrix4d w;
  w << gs.a1, gs.a2, gs.b1, gs.b2;
  EXPECT_LT((w.transpose() * w - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-12);

  gs = gram_vectors(Completion{Correlation(1, 1, 1, 1), 1, 1});
  EXPECT_EQ(gs.dim(), 1);
  for (const auto* v : {&gs.a2, &gs.b1, &gs.b2}) EXPECT_NEAR((*v - gs.a1).norm(), 0, 1e-12);

  EXPECT_EQ(kind_of([] { gram_vectors(Completion{Correlation(1, 1, 1, -1), 0, 0}); }), ErrorKind::NotPSD);
}

TEST(GramVectors, ReproduceCompletion) {
  for (const auto& c : sample(SampleTarget::QInterior, {41, 1000, 1})) {
    const auto r = solve_completion(c);
    const GramSystem gs = gram_vectors(r.witness);
    ASSERT_EQ(gs.dim(), r.rank);
    for (const auto* v : {&gs.a1, &gs.a2, &gs.b1, &gs.b2}) ASSERT_NEAR(v->norm(), 1, 1e-12);
    ASSERT_LT((gs.correlations().v - c.v).cwiseAbs().maxCoeff(), 1e-9);
    ASSERT_NEAR(gs.a1.dot(gs.a2), r.witness.u, 1e-9);
    ASSERT_NEAR(gs.b1.dot(gs.b2), r.witness.v, 1e-9);
  }
}
