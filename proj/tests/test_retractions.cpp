#include "conelab/oracle.hpp"
#include "conelab/retractions.hpp"

#include <gtest/gtest.h>

using conelab::Cone;
using conelab::Mat;
using conelab::RetractionPair;
using conelab::Vec;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

Cone skew2() { return Cone::simplicial((Mat(2, 2) << 1, 1, 0, 1).finished()); }

void expect_vec(const Vec& got, const Vec& want, double tol = 1e-14) {
  ASSERT_EQ(got.size(), want.size());
  EXPECT_LE((got - want).norm(), tol) << "got " << got.transpose() << " want "
                                      << want.transpose();
}

}  // namespace

TEST(Lattice, OrthantClamp) {
  const auto p = RetractionPair::lattice(Cone::orthant(2));
  expect_vec(p.M(v2(1, -2)), v2(1, 0));
  expect_vec(p.N(v2(1, -2)), v2(0, -2));
}

TEST(Lattice, SkewBasisCoordinates) {
  const auto p = RetractionPair::lattice(skew2());
  expect_vec(p.M(v2(0, 1)), v2(1, 1));
  expect_vec(p.N(v2(0, 1)), v2(-1, 0));
  EXPECT_TRUE(conelab::contains(p.cone_n(), p.N(v2(0, 1))));
}

TEST(Lattice, MembersAreFixed) {
  const Cone k = conelab::sample_simplicial(4, 1);
  const auto p = RetractionPair::lattice(k);
  auto rng = conelab::make_rng(1);
  for (int i = 0; i < 100; ++i) {
    const Vec x = conelab::sample_member(k, rng);
    expect_vec(p.M(x), x, 1e-12 * (1.0 + x.norm()));
    EXPECT_LE(p.N(x).norm(), 1e-12 * (1.0 + x.norm()));
  }
}

TEST(Lattice, RejectsNonSimplicialCone) {
  EXPECT_THROW(RetractionPair::lattice(Cone::lorentz(3)), conelab::Error);
}

TEST(Moreau, OrthantDecomposition) {
  const auto p = RetractionPair::moreau(Cone::orthant(2));
  const Vec x = v2(1, -2);
  expect_vec(p.M(x), v2(1, 0));
  expect_vec(p.N(x), v2(0, -2));
  EXPECT_EQ(p.M(x).dot(p.N(x)), 0.0);
}

TEST(Moreau, LorentzExamples) {
  const auto p = RetractionPair::moreau(Cone::lorentz(3));
  expect_vec(p.M(v3(1, 0, 0)), v3(0.5, 0, 0.5));
  expect_vec(p.M(v3(0, 0, -1)), v3(0, 0, 0));
  expect_vec(p.N(v3(0, 0, -1)), v3(0, 0, -1));
  expect_vec(p.M(v3(3, 4, -10)), v3(0, 0, 0));
  expect_vec(p.M(v3(3, 4, 6)), v3(3, 4, 6));
}

TEST(Moreau, SimplicialThroughOracle) {
  const auto p = RetractionPair::moreau(skew2());
  expect_vec(p.M(v2(0, 1)), v2(0.5, 0.5), 1e-12);
  expect_vec(p.M(v2(0, 1)) + p.N(v2(0, 1)), v2(0, 1), 1e-12);
}

TEST(ProjectCone, OrthantAndSkew) {
  expect_vec(conelab::project_cone(Cone::orthant(3), v3(-1, 2, -3)), v3(0, 2, 0));
  expect_vec(conelab::project_cone(skew2(), v2(0, 1)), v2(0.5, 0.5), 1e-12);
}

TEST(ProjectCone, LorentzClosedFormMatchesSectionOracle) {
  // The projection of x onto the Lorentz cone lies in the 2D section spanned
  // by (u, 0) and e_t, u = xbar / |xbar|, whose cone is generated by (u, 1)
  // and (-u, 1).
  auto rng = conelab::make_rng(21);
  for (int dim : {3, 4, 6}) {
    const Cone k = Cone::lorentz(dim);
    for (int i = 0; i < 200; ++i) {
      const Vec x = conelab::gaussian_vec(dim, rng) * 2.0;
      Vec u = x.head(dim - 1);
      if (u.norm() == 0.0) u = Vec::Unit(dim - 1, 0);
      u.normalize();
      Mat g(dim, 2);
      g.col(0) << u, 1.0;
      g.col(1) << -u, 1.0;
      const Vec want = conelab::oracle::brute_force_project(g, x).point;
      expect_vec(conelab::project_cone(k, x), want, 1e-9 * (1.0 + x.norm()));
    }
  }
}

TEST(ProjectCone, PolyhedralMatchesGeneratorOracle) {
  Mat n(3, 4);
  n << 1, 0, -0.3, 0.4,
       0, 1, 0.2, -0.6,
       1, 1, 1, 1;
  const Cone k = Cone::halfspaces(n);
  const Mat gens = k.finite_generators();
  auto rng = conelab::make_rng(22);
  for (int i = 0; i < 200; ++i) {
    const Vec x = conelab::gaussian_vec(3, rng);
    const Vec p = conelab::project_cone(k, x);
    const Vec q = conelab::oracle::brute_force_project(gens, x).point;
    expect_vec(p, q, 1e-9 * (1.0 + x.norm()));
    EXPECT_TRUE(conelab::contains(k, p));
  }
}

TEST(Minkowski, OrthantGauge) {
  const auto p = RetractionPair::minkowski(Cone::orthant(2), v2(1, 1));
  const Vec x = v2(3, -1);
  EXPECT_DOUBLE_EQ(p.gauge(x), 3.0);
  expect_vec(p.M(x), v2(3, 3));
  expect_vec(p.N(x), v2(0, -4));
  EXPECT_EQ(p.gauge(p.N(x)), 0.0);
  expect_vec(p.M(p.N(x)), v2(0, 0));
}

TEST(Minkowski, InteriorAndZero) {
  const Vec y = v2(1, 2);
  const auto p = RetractionPair::minkowski(Cone::orthant(2), y);
  EXPECT_DOUBLE_EQ(p.gauge(y), 1.0);
  expect_vec(p.M(y), y);
  expect_vec(p.N(y), v2(0, 0));
  EXPECT_EQ(p.gauge(v2(0, 0)), 0.0);
  EXPECT_FALSE(p.n_range_is_cone());
}

TEST(Minkowski, RejectsBoundaryPoint) {
  EXPECT_THROW(RetractionPair::minkowski(Cone::orthant(2), v2(1, 0)),
               conelab::Error);
}

TEST(Minkowski, GaugeIsSmallestShift) {
  // phi(x) y - x lies in K, and no smaller multiple does.
  const Cone k = conelab::sample_simplicial(3, 4);
  const Vec y = conelab::interior_point(k);
  const auto p = RetractionPair::minkowski(k, y);
  auto rng = conelab::make_rng(3);
  for (int i = 0; i < 200; ++i) {
    const Vec x = conelab::gaussian_vec(3, rng);
    const double phi = p.gauge(x);
    EXPECT_TRUE(conelab::contains(k, Vec(phi * y - x)));
    EXPECT_FALSE(conelab::contains(k, Vec((phi - 1e-3) * y - x)));
  }
}

TEST(Shifted, Examples) {
  const auto p = RetractionPair::lattice(Cone::orthant(2));
  const Vec u = v2(1, 0);
  const auto mu = conelab::shifted(p, u);
  expect_vec(mu(v2(0, 1)), v2(1, 1));
  expect_vec(mu(u), u);
  const Vec w = u + v2(0.5, 2);
  expect_vec(mu(w), w);
}

TEST(Shifted, OutlivesTemporaryPair) {
  auto mu = conelab::shifted(RetractionPair::lattice(Cone::orthant(2)), v2(1, 0));
  expect_vec(mu(v2(0, 1)), v2(1, 1));
}

TEST(Custom, CarriesArbitraryMaps) {
  const auto p = RetractionPair::custom(
      [](const Vec& x) { return Vec(x * 0.5); }, [](const Vec& x) { return Vec(x * 0.5); },
      Cone::orthant(2), Cone::orthant(2).negated());
  expect_vec(p.M(v2(2, 4)), v2(1, 2));
  EXPECT_EQ(p.family(), conelab::Family::Custom);
}
