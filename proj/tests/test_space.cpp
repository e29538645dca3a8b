#include <apd/space.hpp>

#include <gtest/gtest.h>

#include <set>
#include <vector>

using namespace apd;

TEST(Space, RejectsEvenOrCompositeModulus) {
  EXPECT_THROW(Space(2, 1), Error);
  EXPECT_THROW(Space(9, 1), Error);
  EXPECT_NO_THROW(Space(7, 3));
}

TEST(Space, RejectsOversizedSpace) { EXPECT_THROW(Space(3, 40), Error); }

TEST(Space, MixedRadixIndexing) {
  const Space s32(3, 2);
  EXPECT_EQ(s32.point_of({0, 0}).index, 0u);
  EXPECT_EQ(s32.point_of({2, 1}).index, 5u);
  EXPECT_EQ(Space(5, 3).point_of({4, 4, 4}).index, 124u);
  EXPECT_THROW(s32.point_of({3, 0}), Error);
  EXPECT_THROW(s32.point_of({1}), Error);
  for (Index i = 0; i < s32.size(); ++i) EXPECT_EQ(s32.point_of(s32.coords(Point{i})).index, i);
}

TEST(Space, ArithmeticLaws) {
  const Space s(5, 3);
  for (Index x = 0; x < s.size(); x += 7)
    for (Index y = 0; y < s.size(); y += 11) {
      const Point px{x}, py{y}, pz{(x * 13 + y) % s.size()};
      EXPECT_EQ(s.add(s.add(px, py), pz), s.add(px, s.add(py, pz)));
      EXPECT_EQ(s.add(px, py), s.add(py, px));
      EXPECT_EQ(s.sub(s.add(px, py), py), px);
      EXPECT_EQ(s.add(px, s.neg(px)).index, 0u);
      EXPECT_EQ(s.scale(px, 5).index, 0u);
    }
}

TEST(Subspace, EmptyConstraintsGiveWholeSpace) {
  const Space s(3, 2);
  const Subspace h = subspace_from_constraints(s, {});
  EXPECT_EQ(h.codim(), 0u);
  EXPECT_EQ(h.size(), 9u);
  EXPECT_EQ(h, Subspace::whole(s));
}

TEST(Subspace, SingleAndDependentConstraints) {
  const Space s(3, 2);
  const std::vector<Point> one{s.point_of({1, 0})};
  const Subspace h = subspace_from_constraints(s, one);
  EXPECT_EQ(h.codim(), 1u);
  EXPECT_EQ(h.size(), 3u);
  for (Index x = 0; x < 9; ++x) EXPECT_EQ(h.contains(Point{x}), s.coord(Point{x}, 0) == 0);
  const std::vector<Point> two{s.point_of({1, 0}), s.point_of({2, 0})};
  const Subspace h2 = subspace_from_constraints(s, two);
  EXPECT_EQ(h2.codim(), 1u);
  EXPECT_EQ(h2, h);
}

TEST(Subspace, SizeMatchesMembershipCount) {
  for (unsigned p : {3u, 5u}) {
    const Space s(p, p == 3 ? 6 : 4);
    for (unsigned trial = 0; trial < 6; ++trial) {
      std::vector<Point> ts;
      for (unsigned k = 0; k < trial; ++k) ts.push_back(Point{(k * 97 + trial * 31 + 1) % s.size()});
      const Subspace h = subspace_from_constraints(s, ts);
      Index members = 0;
      for (Index x = 0; x < s.size(); ++x) members += h.contains(Point{x});
      EXPECT_EQ(members, h.size());
      for (Point x : h.points()) EXPECT_TRUE(h.contains(x));
      for (Point t : ts)
        for (Point x : h.points()) EXPECT_EQ(s.dot(t, x), 0u);
    }
  }
}

TEST(Subspace, EmbedAndCoordinatesAreInverse) {
  const Space s(3, 5);
  const std::vector<Point> ts{s.point_of({1, 2, 0, 1, 0}), s.point_of({0, 1, 1, 0, 2})};
  const Subspace h = subspace_from_constraints(s, ts);
  for (Index u = 0; u < h.size(); ++u) EXPECT_EQ(h.coordinates(h.embed(u)), u);
}

TEST(Subspace, IntersectionIsMeet) {
  const Space s(3, 4);
  const std::vector<Point> a{s.point_of({1, 1, 0, 0})}, b{s.point_of({0, 0, 1, 2})};
  const Subspace ha = subspace_from_constraints(s, a), hb = subspace_from_constraints(s, b);
  const Subspace both = ha.intersect(hb);
  EXPECT_EQ(both.codim(), 2u);
  for (Index x = 0; x < s.size(); ++x)
    EXPECT_EQ(both.contains(Point{x}), ha.contains(Point{x}) && hb.contains(Point{x}));
}

TEST(Cosets, WholeSpaceHasOneCoset) {
  const Space s(3, 2);
  const CosetPartition c = cosets(Subspace::whole(s));
  EXPECT_EQ(c.count(), 1u);
  EXPECT_EQ(c.representative(0).index, 0u);
}

TEST(Cosets, FirstCoordinateHyperplane) {
  const Space s(3, 2);
  const std::vector<Point> ts{s.point_of({1, 0})};
  const CosetPartition c = cosets(subspace_from_constraints(s, ts));
  ASSERT_EQ(c.count(), 3u);
  EXPECT_EQ(c.representative(0).index, 0u);
  EXPECT_EQ(c.representative(1).index, 1u);
  EXPECT_EQ(c.representative(2).index, 2u);
}

TEST(Cosets, ZeroSubspaceGivesSingletons) {
  const Space s(3, 2);
  const std::vector<Point> ts{s.point_of({1, 0}), s.point_of({0, 1})};
  const CosetPartition c = cosets(subspace_from_constraints(s, ts));
  EXPECT_EQ(c.count(), 9u);
  for (Index j = 0; j < 9; ++j) EXPECT_EQ(c.members(j).size(), 1u);
}

TEST(Cosets, PartitionCoversOnceWithMinimalRepresentatives) {
  const Space s(5, 3);
  const std::vector<Point> ts{s.point_of({1, 3, 0}), s.point_of({2, 0, 4})};
  const CosetPartition c = cosets(subspace_from_constraints(s, ts));
  std::vector<int> seen(s.size(), 0);
  for (Index j = 0; j < c.count(); ++j) {
    const auto members = c.members(j);
    EXPECT_EQ(members.size(), c.subspace().size());
    Index smallest = s.size();
    for (Point x : members) {
      ++seen[x.index];
      EXPECT_EQ(c.coset_of(x), j);
      smallest = std::min(smallest, x.index);
    }
    EXPECT_EQ(smallest, c.representative(j).index);
    if (j > 0) {
      EXPECT_LT(c.representative(j - 1).index, c.representative(j).index);
    }
  }
  for (int k : seen) EXPECT_EQ(k, 1);
}

TEST(Cosets, BudgetIsEnforced) {
  const Space s(3, 6);
  std::vector<Point> ts;
  for (unsigned k = 0; k < 6; ++k) ts.push_back(Point{s.place(k)});
  EXPECT_THROW(cosets(subspace_from_constraints(s, ts), 100), Error);
}

TEST(Pad, IdentityAtCurrentCodim) {
  const Space s(3, 2);
  const std::vector<Point> ts{s.point_of({1, 0})};
  const Subspace h = subspace_from_constraints(s, ts);
  EXPECT_EQ(pad_subspace(h, 1), h);
}

TEST(Pad, FullPadGivesZeroSubspace) {
  const Space s(3, 2);
  const std::vector<Point> ts{s.point_of({1, 0})};
  const Subspace z = pad_subspace(subspace_from_constraints(s, ts), 2);
  EXPECT_EQ(z.size(), 1u);
  EXPECT_TRUE(z.contains(Point{0}));
}

TEST(Pad, PaddedSubspaceIsContainedInOriginal) {
  const Space s(3, 4);
  const std::vector<Point> ts{s.point_of({1, 1, 1, 1})};
  const Subspace h = subspace_from_constraints(s, ts);
  const Subspace padded = pad_subspace(h, 3);
  EXPECT_EQ(padded.codim(), 3u);
  for (Point x : padded.points()) EXPECT_TRUE(h.contains(x));
  EXPECT_THROW(pad_subspace(h, 0), Error);
  EXPECT_THROW(pad_subspace(h, 5), Error);
}
