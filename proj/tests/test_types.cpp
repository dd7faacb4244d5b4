#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "rtree/amalgamation.hpp"
#include "rtree/error.hpp"
#include "rtree/io.hpp"
#include "rtree/realization.hpp"
#include "rtree/types.hpp"
#include "support/fixtures.hpp"

namespace rtree {
namespace {

using testing::at;
using Kind = DescriptorCheck::Kind;

std::vector<PointRef> pts(std::initializer_list<PointRef> l) { return l; }

// A descriptor over the context {p} of the one-point tree.
TypeDescriptor over_empty(std::vector<Rat> s, std::vector<std::vector<Rat>> rho, const Rat& r) {
  const Tree t = Tree::point();
  std::vector<PointRef> e(s.size(), t.basepoint_ref());
  return {SpannedSubtree(t, {}), e, std::move(s), std::move(rho), r};
}

TEST(TypeOf, Examples) {
  const Tree t = testing::tripod();
  const auto q = type_of(t, {}, pts({at(t, "a")}), Rat(2));
  EXPECT_EQ(q.closest[0], t.basepoint_ref());
  EXPECT_EQ(q.offsets[0], Rat(2));

  const auto inside = type_of(t, pts({at(t, "a")}), pts({at(t, "y")}), Rat(2));
  EXPECT_EQ(inside.closest[0], at(t, "y"));
  EXPECT_TRUE(inside.offsets[0].is_zero());

  const auto two = type_of(t, pts({at(t, "y")}), pts({at(t, "a"), at(t, "b")}), Rat(2));
  EXPECT_EQ(two.closest[0], at(t, "y"));
  EXPECT_EQ(two.closest[1], at(t, "y"));
  EXPECT_EQ(two.offsets, (std::vector<Rat>{Rat(1), Rat(1)}));
  EXPECT_EQ(two.pairwise[0][1], Rat(2));
  EXPECT_TRUE(validate_descriptor(two));
}

TEST(Validate, Failures) {
  const Tree t = testing::tripod();
  auto q = type_of(t, pts({at(t, "y")}), pts({at(t, "a")}), Rat(2));
  q.offsets[0] = Rat(2) - 1 + 1;
  EXPECT_EQ(validate_descriptor(q).kind, Kind::OffsetBound);

  auto w = type_of(t, pts({at(t, "a"), at(t, "b")}), pts({at(t, "a"), at(t, "b")}), Rat(5));
  w.offsets = {Rat(1), Rat(1)};
  w.pairwise = {{Rat(0), Rat(3)}, {Rat(3), Rat(0)}};
  const auto chk = validate_descriptor(w);
  EXPECT_EQ(chk.kind, Kind::FourPoint);
  ASSERT_TRUE(chk.witness);
  w.pairwise = {{Rat(0), Rat(4)}, {Rat(4), Rat(0)}};
  EXPECT_TRUE(validate_descriptor(w));

  auto asym = w;
  asym.pairwise[1][0] = Rat(5);
  EXPECT_EQ(validate_descriptor(asym).kind, Kind::Asymmetric);
  auto outside = w;
  outside = type_of(t, pts({at(t, "a")}), pts({at(t, "b")}), Rat(2));
  outside.closest[0] = at(t, "b");
  EXPECT_EQ(validate_descriptor(outside).kind, Kind::OutsideContext);
}

TEST(TypesEqual, Examples) {
  const Tree t = testing::tripod();
  const auto ctx = pts({at(t, "y")});
  EXPECT_TRUE(types_equal(type_of(t, ctx, pts({at(t, "a")}), Rat(2)), type_of(t, ctx, pts({at(t, "b")}), Rat(2))));
  const PointRef half = t.edge_point(t.node("y"), t.node("b"), Rat(1, 2));
  EXPECT_FALSE(types_equal(type_of(t, ctx, pts({at(t, "a")}), Rat(2)), type_of(t, ctx, pts({half}), Rat(2))));
  EXPECT_THROW(types_equal(type_of(t, ctx, pts({at(t, "a")}), Rat(2)), type_of(t, {}, pts({at(t, "a")}), Rat(2))),
               ContextMismatch);

  // An isometry fixing the context maps a tuple to one of the same type.
  const auto swap = branch_swap(t, t.node("y"), *t.find_edge(t.node("y"), t.node("a")),
                                *t.find_edge(t.node("y"), t.node("b")));
  ASSERT_TRUE(swap);
  const std::vector<PointRef> b{at(t, "a"), t.edge_point(t.node("y"), t.node("b"), Rat(1, 3))};
  const std::vector<PointRef> fb{(*swap)(b[0]), (*swap)(b[1])};
  EXPECT_NE(b, fb);
  EXPECT_TRUE(types_equal(type_of(t, ctx, b, Rat(2)), type_of(t, ctx, fb, Rat(2))));
}

TEST(Realize, Examples) {
  const Tree pt = Tree::point();
  const auto seg = realize_type(pt, over_empty({Rat(2)}, {{Rat(0)}}, Rat(2)));
  EXPECT_EQ(seg.tree.node_count(), 2u);
  EXPECT_EQ(seg.tree.total_length(), Rat(2));
  EXPECT_EQ(seg.tree.depth(seg.points[0]), Rat(2));

  const auto tri = realize_type(pt, over_empty({Rat(2), Rat(2)}, {{Rat(0), Rat(2)}, {Rat(2), Rat(0)}}, Rat(2)));
  EXPECT_EQ(tri.tree.node_count(), 4u);
  EXPECT_EQ(tri.tree.total_length(), Rat(3));
  EXPECT_EQ(tri.tree.distance(tri.points[0], tri.points[1]), Rat(2));
  const PointRef y = median(tri.tree, tri.tree.basepoint_ref(), tri.points[0], tri.points[1]);
  EXPECT_EQ(tri.tree.depth(y), Rat(1));
  EXPECT_EQ(tri.tree.degree(y.node()), 3u);

  auto bad = over_empty({Rat(2), Rat(2)}, {{Rat(0), Rat(5)}, {Rat(5), Rat(0)}}, Rat(2));
  EXPECT_THROW(realize_type(pt, bad), InconsistentDescriptor);
}

TEST(Realize, MergesCoincidentPoints) {
  const Tree pt = Tree::point();
  const auto q = over_empty({Rat(1), Rat(1), Rat(0)}, {{Rat(0), Rat(0), Rat(1)}, {Rat(0), Rat(0), Rat(1)}, {Rat(1), Rat(1), Rat(0)}},
                            Rat(1));
  ASSERT_TRUE(validate_descriptor(q));
  const auto r = realize_type(pt, q);
  EXPECT_EQ(r.points[0], r.points[1]);
  EXPECT_EQ(r.points[2], r.tree.basepoint_ref());
}

TEST(OneTypeDistance, Examples) {
  EXPECT_EQ(one_type_distance(over_empty({Rat(2)}, {{Rat(0)}}, Rat(2)), over_empty({Rat(1, 2)}, {{Rat(0)}}, Rat(2))),
            Rat(3, 2));
  const auto q = over_empty({Rat(1, 3)}, {{Rat(0)}}, Rat(2));
  EXPECT_EQ(one_type_distance(q, q), Rat(0));

  const Tree t = testing::tripod();
  const std::vector<PointRef> ctx{at(t, "y")};
  TypeDescriptor a{SpannedSubtree(t, ctx), {at(t, "p")}, {Rat(1, 2)}, {{Rat(0)}}, Rat(2)};
  TypeDescriptor b{SpannedSubtree(t, ctx), {at(t, "y")}, {Rat(1, 2)}, {{Rat(0)}}, Rat(2)};
  EXPECT_EQ(one_type_distance(a, b), Rat(2));
  EXPECT_EQ(type_distance_search(a, b, Rat(1, 4)).upper, Rat(2));
}

TEST(OneTypeDistance, EmptyContextIsAnInterval) {
  std::mt19937_64 rng(3);
  const Rat r(7, 2);
  for (int k = 0; k < 200; ++k) {
    const Rat s = r * Rat(static_cast<int>(rng() % 97), 96), u = r * Rat(static_cast<int>(rng() % 61), 60);
    ASSERT_EQ(one_type_distance(over_empty({s}, {{Rat(0)}}, r), over_empty({u}, {{Rat(0)}}, r)), (s - u).abs());
  }
}

TEST(Search, Examples) {
  const Rat r(2);
  const auto a = over_empty({Rat(2)}, {{Rat(0)}}, r), b = over_empty({Rat(1, 2)}, {{Rat(0)}}, r);
  const auto v = type_distance_search(a, b, Rat(1, 8));
  EXPECT_TRUE(v.is_exact());
  EXPECT_EQ(v.upper, Rat(3, 2));

  const auto tri = over_empty({Rat(2), Rat(3, 2)}, {{Rat(0), Rat(2)}, {Rat(2), Rat(0)}}, r);
  const auto same = type_distance_search(tri, tri, Rat(1, 8));
  EXPECT_EQ(same.upper, Rat(0));
  EXPECT_LE(same.lower, Rat(0));
}

// The pair (a, b) with d(p,a) = d(p,b) = d(a,b) = 2s over the empty context.
TypeDescriptor tripod_pair(const Rat& s, const Rat& radius) {
  return over_empty({2 * s, 2 * s}, {{Rat(0), 2 * s}, {2 * s, Rat(0)}}, radius);
}

TEST(Search, TripodFamilyWithRoomForTheOffsets) {
  // Offsets 2s need a radius of at least 2s.
  const Rat r(1);
  const std::vector<std::pair<Rat, Rat>> cases{{Rat(3, 4), Rat(1, 2)}, {Rat(1), Rat(2, 3)}, {Rat(5, 6), Rat(7, 12)}};
  for (const auto& [s, t] : cases) {
    const auto v = type_distance_search(tripod_pair(s, 2 * r), tripod_pair(t, 2 * r), r / 64);
    EXPECT_EQ(v.upper, 2 * s) << s << " " << t;
    EXPECT_GE(v.lower, 2 * s - 2 * r / 64);
  }
  EXPECT_THROW(type_distance_search(tripod_pair(Rat(3, 4), r), tripod_pair(Rat(1, 2), r), r / 64),
               InconsistentDescriptor);
}

TEST(Principal, Examples) {
  EXPECT_TRUE(is_principal(over_empty({Rat(1), Rat(2)}, {{Rat(0), Rat(1)}, {Rat(1), Rat(0)}}, Rat(2))));
  EXPECT_FALSE(is_principal(over_empty({Rat(2), Rat(2)}, {{Rat(0), Rat(2)}, {Rat(2), Rat(0)}}, Rat(2))));
  EXPECT_TRUE(is_principal(over_empty({Rat(5, 7)}, {{Rat(0)}}, Rat(2))));
  const Tree t = testing::tripod();
  EXPECT_THROW(is_principal(type_of(t, pts({at(t, "y")}), pts({at(t, "a")}), Rat(2))), ContextMismatch);
}

TEST(Closure, Examples) {
  const Tree t = testing::tripod();
  EXPECT_EQ(dcl_acl(t, {}).realized().node_count(), 1u);
  EXPECT_TRUE(dcl_acl(t, pts({at(t, "a"), at(t, "b")})).is_whole());
}

TEST(Closure, DuplicatedBranchGivesDistinctRealizations) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 30; ++k) {
    const Tree t = testing::random_tree(rng, 3 + k % 6);
    const auto sp = testing::sample_points(t);
    const std::vector<PointRef> a{sp[rng() % sp.size()]};
    const PointRef c = sp[rng() % sp.size()];
    const auto closure = dcl_acl(t, a);
    const Rat off = closure.distance_to(c);
    if (off.is_zero()) continue;
    SharedPoints shared{{a[0], a[0]}};
    const auto m = amalgamate(t, t, shared, t.max_depth());
    const PointRef c1 = m.left(c), c2 = m.right(c);
    EXPECT_EQ(m.tree.distance(c1, c2), 2 * off);
    const std::vector<PointRef> a1{m.left(a[0])};
    EXPECT_TRUE(types_equal(type_of(m.tree, a1, std::vector{c1}, t.max_depth()),
                            type_of(m.tree, a1, std::vector{c2}, t.max_depth())));
  }
}

TEST(DescriptorText, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "rtree_types_test";
  std::filesystem::create_directories(dir);
  const Tree t = testing::tripod();
  {
    std::ofstream(dir / "ctx.tree") << write_tree(t, Rat(3));
  }
  const char* text =
      "context ctx.tree\n"
      "closest 1 y\n"
      "closest 2 edge p y 1/2\n"
      "offset 1 1\n"
      "offset 2 1/2\n"
      "pair 1 2 2\n";
  const auto q = parse_descriptor_text(text, dir.string());
  ASSERT_EQ(q.arity(), 2u);
  EXPECT_EQ(q.radius, Rat(3));
  EXPECT_EQ(q.closest[1], q.context.ambient().edge_point(0, Rat(1, 2)));
  EXPECT_TRUE(validate_descriptor(q));
  const auto again = parse_descriptor_text(write_descriptor(q, "ctx.tree"), dir.string());
  EXPECT_TRUE(types_equal(q, again));
  try {
    parse_descriptor_text("context ctx.tree\nclosest 1 y\noffset 1 1\npair 1 1 0\n", dir.string());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  EXPECT_THROW(parse_descriptor_text("context ctx.tree\nclosest 1 y\n", dir.string()), ParseError);
  EXPECT_THROW(parse_descriptor_text("closest 1 y\n", dir.string()), ParseError);
  std::filesystem::remove_all(dir);
}

class RandomTypes : public ::testing::TestWithParam<int> {};

TEST_P(RandomTypes, RoundTripAndUniqueness) {
  std::mt19937_64 rng(GetParam());
  const Tree t = testing::random_tree(rng, 2 + GetParam() % 9);
  const auto sp = testing::sample_points(t);
  std::vector<PointRef> a, b;
  for (int k = rng() % 4; k > 0; --k) a.push_back(sp[rng() % sp.size()]);
  for (int k = 1 + rng() % 4; k > 0; --k) b.push_back(sp[rng() % sp.size()]);
  const auto grown = testing::grow(rng, t, 2);
  const Rat r = grown.tree.max_depth() + Rat(static_cast<int>(rng() % 3));
  const auto q = type_of(t, a, b, r);
  ASSERT_TRUE(validate_descriptor(q)) << validate_descriptor(q).detail;
  const auto real = realize_type(t, q);
  std::vector<PointRef> a_img;
  for (const auto& x : a) a_img.push_back(real.base(x));
  const auto q2 = type_of(real.tree, a_img, real.points, r);
  // Same data, with the contexts compared as standalone trees.
  ASSERT_EQ(q2.offsets, q.offsets);
  ASSERT_EQ(q2.pairwise, q.pairwise);
  for (std::size_t i = 0; i < q.arity(); ++i) ASSERT_EQ(real.base(q.closest[i]), q2.closest[i]);
  ASSERT_TRUE(types_equal(pushforward(q, real.base), q2));

  // A second realization inside a larger tree gives the same matrix on
  // context vertices plus the tuple.
  const auto q3 = pushforward(q, PointMap(t, grown.tree, [&] {
                                 std::vector<PointRef> im;
                                 for (NodeIndex v = 0; v < t.node_count(); ++v) im.push_back(grown.carry(PointRef::vertex(v)));
                                 return im;
                               }()));
  const auto real2 = realize_type(grown.tree, q3);
  std::vector<PointRef> m1, m2;
  for (NodeIndex v = 0; v < q.context.realized().node_count(); ++v) {
    const PointRef x = q.context.ambient_point(v);
    m1.push_back(real.base(x));
    m2.push_back(real2.base(grown.carry(x)));
  }
  m1.insert(m1.end(), real.points.begin(), real.points.end());
  m2.insert(m2.end(), real2.points.begin(), real2.points.end());
  ASSERT_EQ(tree_to_matrix(real.tree, m1, std::vector<std::string>(m1.size(), "x")).entries,
            tree_to_matrix(real2.tree, m2, std::vector<std::string>(m2.size(), "x")).entries);
}

TEST_P(RandomTypes, OneTypeDistanceIsAMetricAndMatchesSearch) {
  std::mt19937_64 rng(GetParam() + 1000);
  const Tree t = testing::random_tree(rng, 2 + GetParam() % 7);
  const auto sp = testing::sample_points(t);
  std::vector<PointRef> a;
  for (int k = rng() % 3; k > 0; --k) a.push_back(sp[rng() % sp.size()]);
  const Rat r = t.max_depth() + 1;
  std::vector<TypeDescriptor> qs;
  for (int k = 0; k < 3; ++k) qs.push_back(type_of(t, a, std::vector{sp[rng() % sp.size()]}, r));
  for (const auto& x : qs)
    for (const auto& y : qs) {
      ASSERT_EQ(one_type_distance(x, y), one_type_distance(y, x));
      ASSERT_EQ(one_type_distance(x, y).is_zero(), types_equal(x, y));
      for (const auto& z : qs) ASSERT_LE(one_type_distance(x, z), one_type_distance(x, y) + one_type_distance(y, z));
      const auto v = type_distance_search(x, y, Rat(1, 2));
      ASSERT_TRUE(v.is_exact());
      ASSERT_EQ(v.upper, one_type_distance(x, y));
    }
}

TEST_P(RandomTypes, SearchBracketsAndIsSymmetric) {
  std::mt19937_64 rng(GetParam() + 2000);
  const Tree t = testing::random_tree(rng, 2 + GetParam() % 5);
  const auto sp = testing::sample_points(t);
  const std::vector<PointRef> a{sp[rng() % sp.size()]};
  const Rat r = t.max_depth();
  const std::vector<PointRef> b{sp[rng() % sp.size()], sp[rng() % sp.size()]};
  const std::vector<PointRef> c{sp[rng() % sp.size()], sp[rng() % sp.size()]};
  const auto x = type_of(t, a, b, r), y = type_of(t, a, c, r);
  const auto xy = type_distance_search(x, y, Rat(1, 4)), yx = type_distance_search(y, x, Rat(1, 4));
  ASSERT_LE(xy.lower, xy.upper);
  // Each coordinate alone is a 1-type distance, a lower bound for the pair.
  for (std::size_t i = 0; i < 2; ++i) {
    auto pick = [i](const TypeDescriptor& q) {
      return TypeDescriptor{q.context, {q.closest[i]}, {q.offsets[i]}, {{Rat(0)}}, q.radius};
    };
    ASSERT_GE(xy.upper, one_type_distance(pick(x), pick(y)));
  }
  // The two tuples inside t are one configuration.
  ASSERT_LE(xy.lower, std::max(t.distance(b[0], c[0]), t.distance(b[1], c[1])));
  ASSERT_EQ(type_distance_search(x, x, Rat(1, 4)).upper, Rat(0));
  ASSERT_LE(xy.lower, yx.upper);
  ASSERT_LE(yx.lower, xy.upper);
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomTypes, ::testing::Range(0, 60));

}  // namespace
}  // namespace rtree
