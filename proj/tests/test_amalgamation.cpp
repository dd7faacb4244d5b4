#include <gtest/gtest.h>

#include <random>

#include "rtree/amalgamation.hpp"
#include "rtree/deficiency.hpp"
#include "rtree/error.hpp"
#include "rtree/geometry.hpp"
#include "support/fixtures.hpp"

namespace rtree {
namespace {

using testing::at;
using testing::named;

TEST(Glue, SegmentAtTripodBranchPoint) {
  const Tree t = testing::tripod();
  const Tree s = testing::segment(Rat(1), "c");
  const auto g = glue_family({t, {{s, s.basepoint_ref(), at(t, "y")}}}, Rat(2));
  const PointRef c = named(g.tree, "a1:c");
  EXPECT_EQ(g.tree.depth(c), Rat(2));
  EXPECT_EQ(g.tree.distance(c, named(g.tree, "a")), Rat(2));
  EXPECT_EQ(g.parts[0](s.node("c")), c);
  EXPECT_TRUE(validate(g.tree, Rat(2)).ok());
}

TEST(Glue, NothingAttached) {
  const Tree t = testing::tripod();
  const auto g = glue_family({t, {}}, Rat(2));
  EXPECT_EQ(g.tree.node_count(), t.node_count());
  for (NodeIndex a = 0; a < t.node_count(); ++a)
    for (NodeIndex b = 0; b < t.node_count(); ++b)
      EXPECT_EQ(g.tree.distance(g.base(a), g.base(b)), t.distance(PointRef::vertex(a), PointRef::vertex(b)));
}

TEST(Glue, CrossDistanceBetweenDistinctAttachPoints) {
  const Tree t = testing::tripod();
  const Tree s1 = testing::segment(Rat(1, 2)), s2 = testing::segment(Rat(3, 4));
  const PointRef x1 = t.edge_point(t.node("p"), t.node("y"), Rat(1, 3)), x2 = at(t, "b");
  const auto g = glue_family({t, {{s1, s1.basepoint_ref(), x1}, {s2, s2.basepoint_ref(), x2}}}, Rat(3));
  const PointRef q1 = g.parts[0](s1.node("q")), q2 = g.parts[1](s2.node("q"));
  EXPECT_EQ(g.tree.distance(q1, q2), Rat(1, 2) + t.distance(x1, x2) + Rat(3, 4));
  EXPECT_EQ(g.base(x1), g.parts[0](s1.basepoint_ref()));
}

TEST(Glue, AttachPointInsideSubEdge) {
  const Tree t = testing::tripod();
  const Tree s = testing::segment(Rat(2));
  const PointRef mid = s.edge_point(0, Rat(1, 2));
  const auto g = glue_family({t, {{s, mid, at(t, "a")}}}, Rat(4));
  EXPECT_EQ(g.tree.depth(g.parts[0](s.node("p"))), Rat(5, 2));
  EXPECT_EQ(g.tree.depth(g.parts[0](s.node("q"))), Rat(7, 2));
  EXPECT_EQ(g.tree.distance(g.parts[0](s.node("p")), g.parts[0](s.node("q"))), Rat(2));
}

TEST(Glue, RadiusExceeded) {
  const Tree t = testing::tripod();
  const Tree s = testing::segment(Rat(1, 2), "c");
  try {
    glue_family({t, {{s, s.basepoint_ref(), at(t, "a")}}}, Rat(2));
    FAIL();
  } catch (const RadiusExceeded& e) {
    EXPECT_EQ(e.witness(), "a1:c");
    EXPECT_EQ(e.distance(), "5/2");
  }
}

TEST(Amalgamate, TwoTripodsOverStem) {
  const Tree t = testing::tripod();
  const auto m = amalgamate(t, t, {{at(t, "y"), at(t, "y")}}, Rat(2));
  // Leaves other than the basepoint, which has degree one here.
  std::size_t leaves = 0;
  for (NodeIndex n = 0; n < m.tree.node_count(); ++n) leaves += n != m.tree.basepoint() && m.tree.degree(n) == 1;
  EXPECT_EQ(leaves, 4u);
  EXPECT_EQ(m.tree.distance(m.left(t.node("a")), m.right(t.node("a"))), Rat(2));
  EXPECT_EQ(m.left(t.node("y")), m.right(t.node("y")));
  EXPECT_EQ(m.tree.id(m.right(t.node("a")).node()), "right:a");
  EXPECT_TRUE(validate(m.tree, Rat(2)).ok());
}

TEST(Amalgamate, OverEverything) {
  std::mt19937_64 rng(7);
  const Tree t = testing::random_tree(rng, 8);
  SharedPoints all;
  for (NodeIndex n = 0; n < t.node_count(); ++n) all.push_back({PointRef::vertex(n), PointRef::vertex(n)});
  const auto m = amalgamate(t, t, all, t.max_depth());
  EXPECT_EQ(m.tree.node_count(), t.node_count());
  EXPECT_EQ(m.tree.total_length(), t.total_length());
  for (NodeIndex n = 0; n < t.node_count(); ++n) EXPECT_EQ(m.left(n), m.right(n));
}

TEST(Amalgamate, OverBasepointIsStar) {
  const Tree t = testing::tripod();
  const Tree s = testing::segment(Rat(3, 2));
  const auto m = amalgamate(t, s, {}, Rat(2));
  const Tree star = star_amalgam({t, s}, Rat(2));
  ASSERT_EQ(m.tree.node_count(), star.node_count());
  EXPECT_EQ(m.tree.total_length(), star.total_length());
  std::vector<std::pair<PointRef, PointRef>> pts;
  for (NodeIndex n = 0; n < t.node_count(); ++n) pts.push_back({m.left(n), named(star, "t1:" + t.id(n))});
  for (NodeIndex n = 0; n < s.node_count(); ++n) pts.push_back({m.right(n), named(star, "t2:" + s.id(n))});
  for (const auto& [a1, a2] : pts)
    for (const auto& [b1, b2] : pts) EXPECT_EQ(m.tree.distance(a1, b1), star.distance(a2, b2));
}

TEST(Amalgamate, NotIsometric) {
  const Tree t = testing::tripod();
  try {
    amalgamate(t, t, {{at(t, "a"), at(t, "a")}, {at(t, "b"), at(t, "y")}}, Rat(2));
    FAIL();
  } catch (const NotIsometric& e) {
    EXPECT_EQ(e.first(), 0u);
    EXPECT_EQ(e.second(), 2u);
  }
  EXPECT_THROW(amalgamate(t, t, {{at(t, "a"), at(t, "b")}, {at(t, "b"), at(t, "b")}}, Rat(2)), NotIsometric);
}

TEST(Amalgamate, RadiusExceeded) {
  const Tree t = testing::tripod();
  const Tree s = testing::segment(Rat(3));
  EXPECT_THROW(amalgamate(t, s, {}, Rat(2)), RadiusExceeded);
}

TEST(Star, Examples) {
  const Rat r(5, 3);
  const Tree s = testing::segment(r);
  const Tree two = star_amalgam({s, s}, r);
  EXPECT_EQ(two.total_length(), 2 * r);
  EXPECT_EQ(two.max_depth(), r);
  EXPECT_EQ(two.distance(named(two, "t1:q"), named(two, "t2:q")), 2 * r);
  EXPECT_EQ(two.degree(two.basepoint()), 2u);

  const Tree t = testing::tripod();
  const Tree one = star_amalgam({t}, Rat(2));
  EXPECT_EQ(one.node_count(), t.node_count());
  EXPECT_EQ(one.total_length(), t.total_length());

  const Tree three = star_amalgam({t, t, t}, Rat(2));
  EXPECT_EQ(three.degree(three.basepoint()), 3u);
  EXPECT_EQ(endpoints(three).size(), 6u);
}

// Pushout distance computed without the amalgam: the infimum over the shared
// part of d1(a, z) + d2(z, b), where the shared part is the union of the
// segments [p, g_k] and the infimum is attained at a projection of a.
Rat pushout_distance(const Tree& m1, const Tree& m2, const std::vector<PointRef>& left,
                     const std::vector<PointRef>& right, const PointRef& a, const PointRef& b) {
  std::optional<Rat> best;
  for (std::size_t k = 0; k < left.size(); ++k) {
    const PointRef p1 = m1.basepoint_ref(), p2 = m2.basepoint_ref();
    for (const Rat& h : {gromov_product(m1, left[k], a, p1), gromov_product(m2, right[k], b, p2)}) {
      const Rat v = m1.distance(a, m1.point_along(p1, left[k], h)) + m2.distance(m2.point_along(p2, right[k], h), b);
      if (!best || v < *best) best = v;
    }
  }
  return *best;
}

class RandomAmalgams : public ::testing::TestWithParam<int> {};

TEST_P(RandomAmalgams, SoundCommutingAndCrossLaw) {
  std::mt19937_64 rng(GetParam());
  const Tree m1 = testing::random_tree(rng, 3 + GetParam() % 7);
  const auto pts = testing::sample_points(m1);
  std::vector<PointRef> gens;
  for (int k = rng() % 4; k > 0; --k) gens.push_back(pts[rng() % pts.size()]);
  const SpannedSubtree s1(m1, gens);
  const auto grown = testing::grow(rng, s1.realized(), 1 + GetParam() % 5);
  const Tree& m2 = grown.tree;
  SharedPoints shared;
  std::vector<PointRef> left{m1.basepoint_ref()}, right{m2.basepoint_ref()};
  for (const auto& g : gens) {
    shared.push_back({g, grown.carry(*s1.locate(g))});
    left.push_back(m1.normalize(g));
    right.push_back(shared.back().second);
  }
  const Rat r = m1.max_depth() + m2.max_depth();
  const auto m = amalgamate(m1, m2, shared, r);
  ASSERT_TRUE(validate(m.tree, r).ok());

  for (NodeIndex a = 0; a < m1.node_count(); ++a)
    for (NodeIndex b = 0; b < m1.node_count(); ++b)
      ASSERT_EQ(m.tree.distance(m.left(a), m.left(b)), m1.distance(PointRef::vertex(a), PointRef::vertex(b)));
  for (NodeIndex a = 0; a < m2.node_count(); ++a)
    for (NodeIndex b = 0; b < m2.node_count(); ++b)
      ASSERT_EQ(m.tree.distance(m.right(a), m.right(b)), m2.distance(PointRef::vertex(a), PointRef::vertex(b)));
  for (const auto& [l, rr] : shared) ASSERT_EQ(m.left(l), m.right(rr));
  const SpannedSubtree s2(m2, right);
  for (NodeIndex n = 0; n < s1.realized().node_count(); ++n)
    ASSERT_EQ(m.left(s1.ambient_point(n)), m.right(grown.carry(PointRef::vertex(n))));

  const SpannedSubtree sub1(m1, left);
  for (NodeIndex a = 0; a < m1.node_count(); ++a)
    for (NodeIndex b = 0; b < m2.node_count(); ++b) {
      const PointRef pa = PointRef::vertex(a), pb = PointRef::vertex(b);
      const auto ea = project_to_subtree(sub1, pa);
      const auto eb = project_to_subtree(s2, pb);
      const Rat d = m.tree.distance(m.left(a), m.right(b));
      ASSERT_EQ(d, ea.distance + m.tree.distance(m.left(ea.point), m.right(eb.point)) + eb.distance);
      ASSERT_EQ(d, pushout_distance(m1, m2, left, right, pa, pb));
    }
  // Every vertex of the amalgam lies on a segment between images.
  const auto leaves = endpoints(m.tree);
  for (const auto& x : leaves) {
    bool hit = false;
    for (NodeIndex a = 0; a < m1.node_count() && !hit; ++a) hit = m.left(a) == x;
    for (NodeIndex b = 0; b < m2.node_count() && !hit; ++b) hit = m.right(b) == x;
    ASSERT_TRUE(hit) << m.tree.describe(x);
  }
}

TEST_P(RandomAmalgams, AttachingNeverRaisesPsi) {
  std::mt19937_64 rng(GetParam() + 500);
  const Tree base = testing::random_tree(rng, 2 + GetParam() % 6);
  const auto pts = testing::sample_points(base);
  GlueSpec spec{base, {}};
  for (int k = 1 + rng() % 3; k > 0; --k) {
    const Tree sub = testing::random_tree(rng, 1 + rng() % 4);
    spec.attachments.push_back({sub, sub.basepoint_ref(), pts[rng() % pts.size()]});
  }
  const Rat r = glue_family(spec, Rat(1000)).tree.max_depth();
  const auto g = glue_family(spec, r);
  for (const auto& x : pts) ASSERT_LE(psi_at(g.tree, g.base(x), r), psi_at(base, x, r)) << base.describe(x);
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomAmalgams, ::testing::Range(0, 100));

}  // namespace
}  // namespace rtree
