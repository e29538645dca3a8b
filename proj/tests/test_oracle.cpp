#include <apd/oracle.hpp>

#include <gtest/gtest.h>

#include "support.hpp"

#include <vector>

using namespace apd;
using apd::testing::first_coordinate_zero;
using apd::testing::random_function;

TEST(NaiveDft, ConstantAndPointMass) {
  const Space s(3, 2);
  const Spectrum c = oracle::naive_dft(GFunction::constant(s, 0.25));
  EXPECT_NEAR(c[0].real(), 0.25, 1e-15);
  for (Index t = 1; t < s.size(); ++t) EXPECT_LT(std::abs(c[t]), 1e-15);
  const std::vector<Point> origin{Point{0}};
  const Spectrum m = oracle::naive_dft(GFunction::indicator(Space(3, 1), origin));
  for (Index t = 0; t < 3; ++t) EXPECT_NEAR(m[t].real(), 1.0 / 3.0, 1e-15);
}

TEST(NaiveDft, RefusesLargeSpaces) { EXPECT_THROW(oracle::naive_dft(GFunction::constant(Space(3, 9), 0.5)), Error); }

TEST(NaiveRho, DefinitionExamples) {
  const Space s(3, 2);
  const GFunction f = first_coordinate_zero(s);
  EXPECT_NEAR(oracle::naive_rho(f, s.point_of({0, 1})), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(oracle::naive_rho(f, s.point_of({1, 0})), 0.0);
  EXPECT_NEAR(oracle::naive_rho(GFunction::constant(s, 0.5), Point{4}), 0.125, 1e-15);
  EXPECT_NEAR(oracle::naive_lambda(GFunction::constant(s, 0.5)), 0.125, 1e-15);
}

TEST(NaiveRho, AveragesToLambda) {
  const Space s(5, 2);
  const GFunction f = random_function(s, 6);
  double mean = 0.0;
  for (Index d = 0; d < s.size(); ++d) mean += oracle::naive_rho(f, Point{d});
  EXPECT_NEAR(mean / static_cast<double>(s.size()), oracle::naive_lambda(f), 1e-14);
}

TEST(ExactCount, WholeAndEmptySets) {
  const Space s(3, 3);
  std::vector<Index> all(s.size());
  for (Index x = 0; x < s.size(); ++x) all[x] = x;
  for (Index d = 0; d < s.size(); ++d) {
    EXPECT_EQ(oracle::exact_count_3aps(s, all, Point{d}), s.size());
    EXPECT_EQ(oracle::exact_count_3aps(s, {}, Point{d}), 0u);
  }
  EXPECT_THROW(oracle::exact_count_3aps(s, {27}, Point{0}), Error);
}

TEST(CosetMembers, MatchesMembershipTest) {
  const Space s(3, 3);
  const std::vector<Point> ts{s.point_of({1, 1, 1})};
  const Subspace h = subspace_from_constraints(s, ts);
  const std::vector<Index> m = oracle::coset_members(h, Point{1});
  EXPECT_EQ(m.size(), 9u);
  for (Index x : m) EXPECT_EQ(h.syndrome(Point{x}), h.syndrome(Point{1}));
}

TEST(NaiveLambdaCoset, SingletonRejected) {
  const Space s(3, 1);
  const Subspace zero = pad_subspace(Subspace::whole(s), 1);
  EXPECT_THROW(oracle::naive_lambda_coset(GFunction::constant(s, 0.5), zero, Point{0}), Error);
}
