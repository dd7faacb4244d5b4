#include <gtest/gtest.h>

#include <random>

#include "rtree/deficiency.hpp"
#include "rtree/error.hpp"
#include "rtree/evaluate.hpp"
#include "rtree/formula.hpp"
#include "support/fixtures.hpp"

namespace rtree {
namespace {

using Kind = FormulaNode::Kind;
using testing::at;

TEST(Parse, Examples) {
  const Formula a = parse_formula("d(x,p) -. 1/2");
  EXPECT_EQ(a.root().kind, Kind::Monus);
  EXPECT_EQ(a.root().kids[0]->kind, Kind::Dist);
  EXPECT_EQ(a.root().kids[1]->value, Rat(1, 2));
  EXPECT_EQ(a.free_names(), std::set<std::string>{"x"});

  const Formula b = parse_formula("sup x. d(x,p)");
  EXPECT_EQ(b.root().kind, Kind::Sup);
  EXPECT_TRUE(b.free_names().empty());

  const Formula c = parse_formula("max(d(x,y), min(d(x,p), 3/2))");
  EXPECT_EQ(c.root().kind, Kind::Max);
  EXPECT_EQ(c.root().kids[1]->kind, Kind::Min);
  EXPECT_EQ(c.root().kids[1]->kids[1]->value, Rat(3, 2));
}

TEST(Parse, PrecedenceAndAssociativity) {
  const Formula f = parse_formula("d(a,b) + d(a,p) -. 1");
  EXPECT_EQ(f.root().kind, Kind::Monus);
  EXPECT_EQ(f.root().kids[0]->kind, Kind::Add);
  const Formula g = parse_formula("2 * d(a,b) + 1");
  EXPECT_EQ(g.root().kind, Kind::Add);
  EXPECT_EQ(g.root().kids[0]->kind, Kind::Scale);
  const Formula q = parse_formula("sup x. d(x,p) + 1");
  EXPECT_EQ(q.root().kind, Kind::Sup);
  const Formula h = parse_formula("abs(d(x,a) - 1 -. d(p,x))");
  EXPECT_EQ(h.root().kind, Kind::AbsDiff);
  EXPECT_EQ(h.root().kids[1]->kind, Kind::Monus);
}

TEST(Parse, PrintedFormReparses) {
  for (const char* text : {"d(x,p) -. 1/2", "sup x. inf y. max(d(x,y), 1/3*(d(x,p) + d(y,p)))",
                           "abs(d(a,b) - (d(a,p) -. 1))", "d(a,b) -. (d(a,p) + 1)", "-2*d(a,b)"}) {
    const Formula f = parse_formula(text);
    EXPECT_TRUE(alpha_equal(f.root(), parse_formula(f.str()).root())) << text << " -> " << f.str();
  }
}

TEST(Parse, ErrorsCarryPosition) {
  try {
    parse_formula("sup x.\n  d(x,p) -. 1.5");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 14u);
  }
  EXPECT_THROW(parse_formula("max(d(x,p))"), ParseError);
  EXPECT_THROW(parse_formula("1/0"), ParseError);
  EXPECT_THROW(parse_formula("sup x. sup x. d(x,p)"), ParseError);
  EXPECT_THROW(parse_formula("d(x,p) +"), ParseError);
}

TEST(Alpha, RenamingBoundVariables) {
  EXPECT_TRUE(alpha_equal(parse_formula("sup u. d(u,p)").root(), parse_formula("sup v. d(v,p)").root()));
  EXPECT_FALSE(alpha_equal(parse_formula("sup u. d(u,a)").root(), parse_formula("sup v. d(v,b)").root()));
  EXPECT_FALSE(alpha_equal(parse_formula("sup u. sup v. d(u,v)").root(), parse_formula("sup v. sup u. d(u,p)").root()));
}

TEST(EvalQf, TripodExamples) {
  const Tree t = testing::tripod();
  EXPECT_EQ(eval_qf(t, parse_formula("d(a,b)"), {}), Rat(2));
  for (NodeIndex n = 0; n < t.node_count(); ++n)
    EXPECT_EQ(eval_qf(t, parse_formula("d(x,x)"), {{"x", PointRef::vertex(n)}}), Rat(0));
  EXPECT_EQ(eval_qf(t, parse_formula("d(a,p) -. 3"), {}), Rat(0));
  EXPECT_EQ(eval_qf(t, parse_formula("abs(d(a,y) - 3/2*d(a,b))"), {}), Rat(2));
  EXPECT_THROW(eval_qf(t, parse_formula("d(a,zz)"), {}), Error);
}

TEST(EvalQuantified, TripodExamples) {
  const Tree t = testing::tripod();
  const auto s = eval_quantified(t, parse_formula("sup x. d(x,p)"), {}, Rat(1, 4));
  EXPECT_TRUE(s.is_exact());
  EXPECT_EQ(s.upper, Rat(2));
  const auto i = eval_quantified(t, parse_formula("inf x. d(x,a)"), {}, Rat(1, 4));
  EXPECT_TRUE(i.is_exact());
  EXPECT_EQ(i.upper, Rat(0));
  // The minimum of a non-vertex breakpoint: |d(x,a) − d(x,b)| vanishes on [p,y].
  const auto m = eval_quantified(t, parse_formula("inf x. abs(d(x,a) - d(x,b)) + d(x,a)"), {}, Rat(1, 4));
  EXPECT_EQ(m.upper, Rat(1));
}

TEST(EvalQuantified, NamedAxiomsAreExact) {
  const Tree t = testing::tripod();
  const auto ax3 = eval_quantified(
      t,
      parse_formula("sup a1. sup a2. sup a3. sup a4. min(1/2*(d(a1,a4) + d(a3,a4)) -. 1/2*d(a1,a3), "
                    "1/2*(d(a2,a4) + d(a3,a4)) -. 1/2*d(a2,a3)) -. (1/2*(d(a1,a4) + d(a2,a4)) -. 1/2*d(a1,a2))"),
      {}, Rat(1, 4));
  EXPECT_TRUE(ax3.is_exact());
  EXPECT_EQ(ax3.upper, Rat(0));
  const auto ax2 = eval_quantified(t, midpoint_axiom(), {}, Rat(1, 4));
  EXPECT_TRUE(ax2.is_exact());
  EXPECT_EQ(ax2.upper, Rat(0));
  const auto phi = eval_quantified(t, phi_formula(Rat(2)), {}, Rat(1, 4));
  EXPECT_EQ(phi.upper, rb_deficiency(t, Rat(2)));
  const auto psi = eval_quantified(t, psi_formula(Rat(2), "q"), {{"q", at(t, "y")}}, Rat(1, 4));
  EXPECT_EQ(psi.upper, Rat(0));
}

TEST(EvalQuantified, NestedGridEnclosesTrueValue) {
  const Tree t = testing::tripod();
  const Rat mesh(1, 4);
  // Diameter 2, reached at the pair of leaves.
  const auto diam = eval_quantified(t, parse_formula("sup x. sup y. d(x,y)"), {}, mesh);
  EXPECT_LE(diam.lower, Rat(2));
  EXPECT_GE(diam.upper, Rat(2));
  EXPECT_LE(diam.upper - diam.lower, mesh);
  const auto zero = eval_quantified(t, parse_formula("sup x. inf y. d(x,y) + d(y,x)"), {}, mesh);
  EXPECT_EQ(zero.lower, Rat(0));
  // ψ through the generic path (a harmless "+ 0" defeats recognition).
  const Formula psi_generic = parse_formula(
      "inf y1. inf y2. inf y3. max(max(max(abs(d(q,y1) - 2 -. d(p,q)), abs(d(q,y2) - 2 -. d(p,q))), "
      "abs(d(q,y3) - 2 -. d(p,q))), max(max(d(q,y1) + d(q,y2) -. d(y1,y2), d(q,y1) + d(q,y3) -. d(y1,y3)), "
      "d(q,y2) + d(q,y3) -. d(y2,y3))) + 0");
  const PointRef q = t.edge_point(t.node("p"), t.node("y"), Rat(1, 2));
  const auto g = eval_quantified(t, psi_generic, {{"q", q}}, Rat(1, 2));
  EXPECT_FALSE(g.is_exact());
  EXPECT_LE(g.lower, psi_at(t, q, Rat(2)));
  EXPECT_GE(g.upper, psi_at(t, q, Rat(2)));
}

TEST(Axioms, Report) {
  const Tree t = testing::tripod();
  const auto ok = check_rt_axioms(t, Rat(2), Rat(1, 4));
  EXPECT_TRUE(ok.ok());
  EXPECT_EQ(ok.str(), "axiom1=2≤2 axiom2=0 axiom3=0");
  const auto bad = check_rt_axioms(t, Rat(3, 2), Rat(1, 4));
  EXPECT_FALSE(bad.bound_ok());
  EXPECT_EQ(bad.bound.upper, Rat(2));
  const auto pt = check_rt_axioms(Tree::point(), Rat(1), Rat(1, 4));
  EXPECT_EQ(pt.str(), "axiom1=0≤1 axiom2=0 axiom3=0");
}

// Random quantifier-free body in the variable x over the points p, a, b.
FormulaPtr random_body(std::mt19937_64& rng, int depth) {
  const char* names[] = {"x", "p", "a", "b"};
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
  switch (pick(rng)) {
    case 0: return build::dist("x", names[rng() % 4]);
    case 1: return build::dist(names[rng() % 4], names[rng() % 4]);
    case 2: return build::add(random_body(rng, depth - 1), random_body(rng, depth - 1));
    case 3: return build::monus(random_body(rng, depth - 1), random_body(rng, depth - 1));
    case 4: return build::max(random_body(rng, depth - 1), random_body(rng, depth - 1));
    case 5: return build::min(random_body(rng, depth - 1), random_body(rng, depth - 1));
    case 6: return build::absdiff(random_body(rng, depth - 1), random_body(rng, depth - 1));
    default: return build::scale(Rat(static_cast<int>(rng() % 5) - 2, 1 + static_cast<int>(rng() % 3)), random_body(rng, depth - 1));
  }
}

class RandomFormulas : public ::testing::TestWithParam<int> {};

TEST_P(RandomFormulas, SingleBlockIsExactAndGridConverges) {
  std::mt19937_64 rng(GetParam());
  const Tree t = testing::random_tree(rng, 6);
  const auto pts = testing::sample_points(t);
  const Valuation named{{"a", pts[rng() % pts.size()]}, {"b", pts[rng() % pts.size()]}};
  const FormulaPtr body = random_body(rng, 3);
  for (bool sup : {true, false}) {
    const Formula f(sup ? build::sup("x", body) : build::inf("x", body));
    const auto v = eval_quantified(t, f, {}, Rat(1, 2), named);
    ASSERT_TRUE(v.is_exact()) << f.str();
    const Rat L = lipschitz(*body, "x");
    for (const Rat mesh : {Rat(1, 4), Rat(1, 16)}) {
      // Brute force over the plain grid never beats the exact optimum and
      // gets within L·mesh of it.
      std::optional<Rat> g;
      for (NodeIndex n = 0; n < t.node_count(); ++n) {
        Valuation x = named;
        x.insert_or_assign("x", PointRef::vertex(n));
        const Rat val = eval_qf(t, Formula(body), x);
        if (!g || (sup ? val > *g : val < *g)) g = val;
      }
      for (EdgeIndex e = 0; e < t.edge_count(); ++e)
        for (Rat off = mesh; off < t.edge(e).length; off += mesh) {
          Valuation x = named;
          x.insert_or_assign("x", t.edge_point(e, off));
          const Rat val = eval_qf(t, Formula(body), x);
          if (sup ? val > *g : val < *g) g = val;
        }
      if (sup) {
        ASSERT_LE(*g, v.upper) << f.str();
        ASSERT_LE(v.upper - *g, L * mesh) << f.str();
      } else {
        ASSERT_GE(*g, v.upper) << f.str();
        ASSERT_LE(*g - v.upper, L * mesh) << f.str();
      }
    }
  }
}

TEST_P(RandomFormulas, QuantifierFreeIsLipschitz) {
  std::mt19937_64 rng(GetParam() + 100);
  const Tree t = testing::random_tree(rng, 6);
  const auto pts = testing::sample_points(t);
  const Formula f(random_body(rng, 3));
  const Rat L = lipschitz(f.root(), "x");
  const Valuation base{{"a", pts[rng() % pts.size()]}, {"b", pts[rng() % pts.size()]}};
  for (int k = 0; k < 20; ++k) {
    const PointRef x = pts[rng() % pts.size()], y = pts[rng() % pts.size()];
    Valuation vx = base, vy = base;
    vx.insert_or_assign("x", x);
    vy.insert_or_assign("x", y);
    ASSERT_LE((eval_qf(t, f, vx) - eval_qf(t, f, vy)).abs(), L * t.distance(x, y)) << f.str();
  }
}

TEST_P(RandomFormulas, HyperbolicityAxiomVanishes) {
  std::mt19937_64 rng(GetParam() + 200);
  const Tree t = testing::random_tree(rng, 3 + GetParam() % 8);
  ASSERT_EQ(eval_quantified(t, hyperbolicity_axiom(), {}, Rat(1, 2)).upper, Rat(0));
  ASSERT_TRUE(check_rt_axioms(t, t.max_depth(), Rat(1, 2)).ok());
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomFormulas, ::testing::Range(0, 25));

}  // namespace
}  // namespace rtree
