#include <random>

#include <gtest/gtest.h>

#include "asdp/cones.hpp"
#include "asdp/errors.hpp"

namespace asdp {
namespace {

Vector<double> vec(std::initializer_list<double> d) {
  Vector<double> v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return v;
}

ConeSet<double> mixed_cones() {
  ConeSet<double> cs;
  cs.add_zero(vec({1, 2})).add_nonnegative(vec({0.5, -1, 0})).add_psd(3).add_psd(2, svec(Matrix<double>::Identity(2, 2)));
  return cs;
}

TEST(ConeSet, DimensionsAndOffsets) {
  auto cs = mixed_cones();
  EXPECT_EQ(cs.total_dim(), 2 + 3 + 6 + 3);
  EXPECT_EQ(cs.psd_block_count(), 2);
  ASSERT_EQ(cs.blocks().size(), 4u);
  EXPECT_EQ(cs.blocks()[2].offset, 5);
  EXPECT_EQ(cs.blocks()[2].matrix_dim, 3);
  EXPECT_EQ(cs.blocks()[3].offset, 11);
  EXPECT_EQ(cs.translation().head(2), vec({1, 2}));
}

TEST(ConeProject, ElementaryExamples) {
  ConeSet<double> cs;
  cs.add_zero(1).add_nonnegative(2).add_psd(2);
  Matrix<double> m(2, 2);
  m << 1, 0, 0, -1;
  Vector<double> v(6);
  v << 7, -1, 2, svec(m);
  Vector<double> p = project_exact(cs, v);
  EXPECT_DOUBLE_EQ(p(0), 0);
  EXPECT_DOUBLE_EQ(p(1), 0);
  EXPECT_DOUBLE_EQ(p(2), 2);
  EXPECT_NEAR(p(3), 1, 1e-14);
  EXPECT_NEAR(p(4), 0, 1e-14);
  EXPECT_NEAR(p(5), 0, 1e-14);
}

TEST(ConeProject, TranslatedCones) {
  ConeSet<double> cs;
  cs.add_zero(vec({3})).add_nonnegative(vec({1, 1}));
  Vector<double> p = project_exact(cs, vec({-5, 0, 4}));
  EXPECT_EQ(p, vec({3, 1, 4}));
}

TEST(ConeProject, ContextVersionMatchesExact) {
  std::mt19937_64 rng(1);
  auto cs = mixed_cones();
  std::vector<ProjectionContext<double>> ctx;
  Vector<double> v = random_block<double>(cs.total_dim(), 1, rng).col(0);
  auto r = project(cs, v, ctx, true, 1e-8, ProjectionOptions<double>{}, rng);
  EXPECT_EQ(ctx.size(), 2u);
  EXPECT_LE((r.projected - project_exact(cs, v)).norm(), 1e-10);
  for (int k = 0; k < 4; ++k) {
    r = project(cs, v, ctx, true, 1e-8, ProjectionOptions<double>{}, rng);
    EXPECT_LE((r.projected - project_exact(cs, v)).norm(), 1e-6);
  }
}

TEST(ConeProject, LengthMismatchIsAFormatError) {
  auto cs = mixed_cones();
  EXPECT_THROW(project_exact(cs, Vector<double>(Vector<double>::Zero(3))), FormatError);
  EXPECT_THROW(dist_polar(cs, Vector<double>(Vector<double>::Zero(20))), FormatError);
}

TEST(DistRecession, ZeroCone) {
  ConeSet<double> cs;
  cs.add_zero(vec({5}));
  EXPECT_DOUBLE_EQ(dist_recession(cs, vec({3})), 3.0);
}

TEST(DistRecession, PsdCone) {
  ConeSet<double> cs;
  cs.add_psd(2);
  Matrix<double> m(2, 2);
  m << 1, 0, 0, -2;
  EXPECT_NEAR(dist_recession(cs, Vector<double>(svec(m))), 2.0, 1e-14);
}

TEST(DistPolar, IdentityHasDistanceRootTwo) {
  ConeSet<double> cs;
  cs.add_psd(2);
  EXPECT_NEAR(dist_polar(cs, Vector<double>(svec(Matrix<double>::Identity(2, 2)))), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(dist_polar(cs, Vector<double>(svec(Matrix<double>(-Matrix<double>::Identity(2, 2))))), 0.0, 1e-14);
}

TEST(SupportValue, NonnegativeConeWithTranslation) {
  ConeSet<double> cs;
  cs.add_nonnegative(vec({1, 1}));
  auto s = support_value(cs, vec({-1, -2}));
  ASSERT_TRUE(s.has_value());
  EXPECT_DOUBLE_EQ(*s, -3.0);
  EXPECT_FALSE(support_value(cs, vec({1, 0})).has_value());
}

TEST(MembershipPsd, Examples) {
  Matrix<double> m(2, 2);
  m << 1, 0, 0, -1e-12;
  EXPECT_FALSE(membership_psd(m, 0.0));
  EXPECT_TRUE(membership_psd(m, 1e-9));
  EXPECT_TRUE(membership_psd(Matrix<double>(Matrix<double>::Identity(3, 3)), 0.0));
  EXPECT_THROW(membership_psd(m, -1.0), FormatError);
  EXPECT_TRUE(membership_psd(SymMatrix<double>::from_dense(Matrix<double>::Identity(2, 2)), 0.0));
}

TEST(ConeProject, IsNonexpansive) {
  std::mt19937_64 rng(2);
  auto cs = mixed_cones();
  for (int trial = 0; trial < 50; ++trial) {
    Vector<double> u = 3 * random_block<double>(cs.total_dim(), 1, rng).col(0);
    Vector<double> w = 3 * random_block<double>(cs.total_dim(), 1, rng).col(0);
    EXPECT_LE((project_exact(cs, u) - project_exact(cs, w)).norm(), (u - w).norm() + 1e-12);
  }
}

TEST(ConeProject, MoreauDecompositionOfRecessionCone) {
  std::mt19937_64 rng(3);
  auto cs = mixed_cones();
  for (int trial = 0; trial < 20; ++trial) {
    Vector<double> v = random_block<double>(cs.total_dim(), 1, rng).col(0);
    Vector<double> pk = project_recession(cs, v);
    Vector<double> po = project_polar(cs, v);
    EXPECT_LE((pk + po - v).norm(), 1e-12);
    EXPECT_NEAR(pk.dot(po), 0.0, 1e-10);
  }
}

TEST(ConeProject, OutputLiesInCone) {
  std::mt19937_64 rng(4);
  auto cs = mixed_cones();
  Vector<double> v = 5 * random_block<double>(cs.total_dim(), 1, rng).col(0);
  Vector<double> p = project_exact(cs, v);
  Vector<double> shifted = p - cs.translation();
  EXPECT_LE(shifted.head(2).norm(), 0.0);
  EXPECT_GE(shifted.segment(2, 3).minCoeff(), 0.0);
  EXPECT_TRUE(membership_psd(smat(Vector<double>(shifted.segment(5, 6))), 1e-10));
  EXPECT_TRUE(membership_psd(smat(Vector<double>(shifted.segment(11, 3))), 1e-10));
}

}  // namespace
}  // namespace asdp
