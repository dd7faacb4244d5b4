#include "rtree/types.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

#include "rtree/amalgamation.hpp"
#include "rtree/error.hpp"
#include "rtree/io.hpp"
#include "rtree/realization.hpp"

namespace rtree {

namespace {

bool raw_equal(const Tree& a, const Tree& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  if (a.id(a.basepoint()) != b.id(b.basepoint())) return false;
  for (NodeIndex n = 0; n < a.node_count(); ++n)
    if (a.id(n) != b.id(n)) return false;
  for (EdgeIndex e = 0; e < a.edge_count(); ++e) {
    const Edge &x = a.edge(e), &y = b.edge(e);
    if (x.u != y.u || x.v != y.v || x.length != y.length) return false;
  }
  return true;
}

// The closest points of two descriptors over the same context, as points of
// one tree.
struct Common {
  Tree tree;
  std::vector<PointRef> first;
  std::vector<PointRef> second;
};

Common common_points(const TypeDescriptor& q1, const TypeDescriptor& q2) {
  if (!same_context(q1, q2)) throw ContextMismatch("descriptors are over different contexts");
  if (q1.context.ambient().same_storage(q2.context.ambient())) {
    Common c{q1.context.ambient(), {}, {}};
    for (const auto& e : q1.closest) c.first.push_back(c.tree.normalize(e));
    for (const auto& e : q2.closest) c.second.push_back(c.tree.normalize(e));
    return c;
  }
  auto in_realized = [](const TypeDescriptor& q, const PointRef& e) {
    auto x = q.context.locate(e);
    if (!x) throw InconsistentDescriptor("closest point outside the context");
    return *x;
  };
  Common c{q1.context.realized(), {}, {}};
  for (const auto& e : q1.closest) c.first.push_back(in_realized(q1, e));
  for (const auto& e : q2.closest) c.second.push_back(in_realized(q2, e));
  return c;
}

std::string index_str(std::size_t i) { return std::to_string(i + 1); }

}  // namespace

TypeDescriptor type_of(const Tree& t, std::span<const PointRef> a, std::span<const PointRef> b, const Rat& r) {
  for (const auto& x : a) t.check(x);
  for (const auto& x : b) t.check(x);
  TypeDescriptor q{spanned_subtree(t, a), {}, {}, {}, r};
  for (const auto& x : b) {
    const Projection pr = project_to_subtree(q.context, x);
    q.closest.push_back(t.normalize(pr.point));
    q.offsets.push_back(pr.distance);
  }
  q.pairwise.assign(b.size(), std::vector<Rat>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) q.pairwise[i][j] = t.distance(b[i], b[j]);
  return q;
}

std::string_view to_string(DescriptorCheck::Kind k) {
  switch (k) {
    case DescriptorCheck::Kind::Ok: return "ok";
    case DescriptorCheck::Kind::Shape: return "shape";
    case DescriptorCheck::Kind::OutsideContext: return "outside-context";
    case DescriptorCheck::Kind::OffsetBound: return "offset-bound";
    case DescriptorCheck::Kind::Asymmetric: return "asymmetric";
    case DescriptorCheck::Kind::Triangle: return "triangle";
    case DescriptorCheck::Kind::FourPoint: return "four-point";
  }
  return "?";
}

MetricMatrix combined_matrix(const TypeDescriptor& q) {
  const std::size_t n = q.arity();
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("e" + index_str(i));
  for (std::size_t i = 0; i < n; ++i) labels.push_back("x" + index_str(i));
  MetricMatrix m = MetricMatrix::zeros(std::move(labels));
  const Tree& t = q.context.ambient();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Rat e = t.distance(q.closest[i], q.closest[j]);
      if (i < j) m.set(i, j, e);
      m.entries[n + i][j] = m.entries[j][n + i] = e + q.offsets[i];
      if (i < j) m.set(n + i, n + j, q.pairwise[i][j]);
    }
  return m;
}

DescriptorCheck validate_descriptor(const TypeDescriptor& q) {
  using K = DescriptorCheck::Kind;
  const std::size_t n = q.arity();
  if (q.offsets.size() != n || q.pairwise.size() != n ||
      std::any_of(q.pairwise.begin(), q.pairwise.end(), [n](const auto& row) { return row.size() != n; }))
    return {K::Shape, "closest, offset and pair data disagree in length", {}};
  const Tree& t = q.context.ambient();
  for (std::size_t i = 0; i < n; ++i) {
    t.check(q.closest[i]);
    if (!q.context.contains(q.closest[i]))
      return {K::OutsideContext, "e" + index_str(i) + " is not in the context", {}};
    const Rat room = q.radius - t.depth(q.closest[i]);
    if (q.offsets[i].sign() < 0 || q.offsets[i] > room)
      return {K::OffsetBound, "s" + index_str(i) + "=" + q.offsets[i].str() + " outside [0," + room.str() + "]", {}};
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Rat& v = q.pairwise[i][j];
      if ((i == j && !v.is_zero()) || v.sign() < 0 || v != q.pairwise[j][i])
        return {K::Asymmetric, "rho(" + index_str(i) + "," + index_str(j) + ")=" + v.str(), {}};
    }
  const MetricMatrix m = combined_matrix(q);
  if (auto tv = triangle_violation(m)) {
    const auto [a, b, c] = *tv;
    return {K::Triangle, "d(" + m.labels[a] + "," + m.labels[c] + ") > d(" + m.labels[a] + "," + m.labels[b] +
                             ") + d(" + m.labels[b] + "," + m.labels[c] + ")", {}};
  }
  if (auto w = four_point_check(m))
    return {K::FourPoint,
            "(" + m.labels[w->x] + "," + m.labels[w->y] + "," + m.labels[w->z] + "," + m.labels[w->t] + ") " +
                w->lhs.str() + " > " + w->rhs.str(),
            w};
  return {};
}

bool same_context(const TypeDescriptor& q1, const TypeDescriptor& q2) {
  if (q1.context.ambient().same_storage(q2.context.ambient())) return q1.context.same_set(q2.context);
  return raw_equal(q1.context.realized(), q2.context.realized());
}

bool types_equal(const TypeDescriptor& q1, const TypeDescriptor& q2) {
  const Common c = common_points(q1, q2);
  return q1.arity() == q2.arity() && c.first == c.second && q1.offsets == q2.offsets && q1.pairwise == q2.pairwise;
}

Realization realize_type(const Tree& t, const TypeDescriptor& q) {
  if (const auto chk = validate_descriptor(q); !chk)
    throw InconsistentDescriptor(std::string(to_string(chk.kind)) + ": " + chk.detail);
  const Tree& amb = q.context.ambient();
  if (!t.same_storage(amb) && !raw_equal(t, amb))
    throw ContextMismatch("the tree is not the context's ambient tree");
  const std::size_t n = q.arity();

  // Indices grouped by closest point; indices at distance 0 from each other
  // are one point.
  std::map<PointRef, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < n; ++i) classes[amb.normalize(q.closest[i])].push_back(i);

  GlueSpec spec{t, {}};
  std::vector<std::pair<std::size_t, std::size_t>> where(n);  // (attachment, matrix row) or none
  std::vector<std::vector<PointRef>> hang_points;
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  for (const auto& [e, members] : classes) {
    std::vector<std::size_t> reps;
    std::vector<std::size_t> row_of(n, none);
    for (std::size_t i : members) {
      if (q.offsets[i].is_zero()) {
        where[i] = {none, none};
        continue;
      }
      for (std::size_t j : reps)
        if (q.pairwise[i][j].is_zero()) row_of[i] = row_of[j];
      if (row_of[i] == none) {
        row_of[i] = reps.size() + 1;
        reps.push_back(i);
      }
    }
    if (reps.empty()) continue;
    std::vector<std::string> labels{"e"};
    for (std::size_t i : reps) labels.push_back("x" + index_str(i));
    MetricMatrix m = MetricMatrix::zeros(std::move(labels));
    for (std::size_t a = 0; a < reps.size(); ++a) {
      m.set(0, a + 1, q.offsets[reps[a]]);
      for (std::size_t b = a + 1; b < reps.size(); ++b) m.set(a + 1, b + 1, q.pairwise[reps[a]][reps[b]]);
    }
    const RealizedTree k = realize(m, "e");
    for (std::size_t i : members)
      if (row_of[i] != none) where[i] = {spec.attachments.size(), row_of[i]};
    hang_points.push_back(k.points);
    spec.attachments.push_back({k.tree, k.tree.basepoint_ref(), e});
  }
  const GlueResult g = glue_family(spec, q.radius);
  Realization out{g.tree, g.base, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const auto [att, row] = where[i];
    out.points.push_back(att == none ? g.base(q.closest[i]) : g.parts[att](hang_points[att][row]));
  }
  return out;
}

Rat one_type_distance(const TypeDescriptor& q1, const TypeDescriptor& q2) {
  if (q1.arity() != 1 || q2.arity() != 1) throw Error("one_type_distance needs 1-types");
  const Common c = common_points(q1, q2);
  if (c.first[0] == c.second[0]) return (q1.offsets[0] - q2.offsets[0]).abs();
  return q1.offsets[0] + c.tree.distance(c.first[0], c.second[0]) + q2.offsets[0];
}

namespace {

struct Candidate {
  PointRef at;
  Rat cost;   // d(a_i, c) + s'_i
  Rat slack;  // s'_i = s_i − d(c, e_i)
};

// Points c of `e1` whose projection on the context is e and with d(c,e) ≤ s.
std::vector<Candidate> candidates(const Tree& e1, const SpannedSubtree& ctx, const PointRef& e, const Rat& s,
                                  const std::vector<Rat>& heights, const PointRef& a, const Rat& mesh) {
  std::set<PointRef> pts{e};
  auto admit = [&](const PointRef& x) {
    const Rat h = e1.distance(x, e);
    if (h <= s && ctx.distance_to(x) == h) pts.insert(e1.normalize(x));
  };
  for (NodeIndex v = 0; v < e1.node_count(); ++v) {
    const PointRef pv = PointRef::vertex(v);
    admit(pv);
    const Rat len = e1.distance(pv, e);
    if (ctx.distance_to(pv) != len) continue;
    for (const Rat& h : heights)
      if (h.sign() > 0 && h <= len && h <= s) admit(e1.point_along(e, pv, h));
  }
  for (EdgeIndex ed = 0; ed < e1.edge_count(); ++ed)
    for (Rat off = mesh; off < e1.edge(ed).length; off += mesh) admit(e1.edge_point(ed, off));
  std::vector<Candidate> out;
  for (const auto& c : pts) {
    const Rat slack = s - e1.distance(c, e);
    out.push_back({c, e1.distance(a, c) + slack, slack});
  }
  std::sort(out.begin(), out.end(), [](const Candidate& x, const Candidate& y) { return x.cost < y.cost; });
  return out;
}

}  // namespace

CertifiedValue type_distance_search(const TypeDescriptor& q1, const TypeDescriptor& q2, const Rat& mesh,
                                    std::size_t budget) {
  if (mesh.sign() <= 0) throw Error("mesh must be positive");
  if (q1.arity() != q2.arity()) throw Error("types of different arity");
  for (const auto* q : {&q1, &q2})
    if (const auto chk = validate_descriptor(*q); !chk)
      throw InconsistentDescriptor(std::string(to_string(chk.kind)) + ": " + chk.detail);
  const Common c = common_points(q1, q2);
  const std::size_t n = q1.arity();
  if (n == 0) return CertifiedValue::exact(Rat(0));

  // Realize q1 on the bare context.
  const Tree& k = c.tree;
  std::vector<PointRef> all;
  for (NodeIndex v = 0; v < k.node_count(); ++v) all.push_back(PointRef::vertex(v));
  TypeDescriptor base{spanned_subtree(k, all), c.first, q1.offsets, q1.pairwise, q1.radius};
  const Realization real = realize_type(k, base);
  const Tree& e1 = real.tree;
  std::vector<PointRef> ctx_pts;
  for (NodeIndex v = 0; v < k.node_count(); ++v) ctx_pts.push_back(real.base(v));
  const SpannedSubtree ctx(e1, ctx_pts);

  // Heights along a branch at which the second tuple's own tree branches.
  std::vector<PointRef> e2;
  for (const auto& x : c.second) e2.push_back(real.base(x));
  std::vector<std::vector<Rat>> heights(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = j; l < n; ++l)
        if (e2[j] == e2[i] && e2[l] == e2[i])
          heights[i].push_back((q2.offsets[j] + q2.offsets[l] - q2.pairwise[j][l]) / 2);

  Rat step = mesh;
  std::vector<std::vector<Candidate>> cand(n);
  for (;;) {
    double count = 1;
    for (std::size_t i = 0; i < n; ++i) {
      cand[i] = candidates(e1, ctx, e2[i], q2.offsets[i], heights[i], real.points[i], step);
      count *= static_cast<double>(cand[i].size());
    }
    if (count <= static_cast<double>(budget) || n == 1) break;
    step *= 2;
  }

  // Branch and bound over placements; a placement is feasible when the
  // second tuple's data over the enlarged tree satisfies the 4-point
  // condition.
  std::optional<Rat> best;
  std::vector<std::size_t> pick(n);
  MetricMatrix m = MetricMatrix::zeros([&] {
    std::vector<std::string> l;
    for (std::size_t i = 0; i < 2 * n; ++i) l.push_back(std::to_string(i));
    return l;
  }());
  auto feasible = [&] {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const Rat d = e1.distance(cand[i][pick[i]].at, cand[j][pick[j]].at);
        if (i < j) m.set(i, j, d);
        m.entries[n + i][j] = m.entries[j][n + i] = d + cand[i][pick[i]].slack;
        if (i < j) m.set(n + i, n + j, q2.pairwise[i][j]);
      }
    return !triangle_violation(m) && !four_point_check(m);
  };
  auto search = [&](auto& self, std::size_t i, const Rat& so_far) -> void {
    if (i == n) {
      if (feasible()) best = so_far;
      return;
    }
    for (std::size_t k2 = 0; k2 < cand[i].size(); ++k2) {
      const Rat v = std::max(so_far, cand[i][k2].cost);
      if (best && v >= *best) break;
      pick[i] = k2;
      self(self, i + 1, v);
    }
  };
  search(search, 0, Rat(0));
  if (!best) throw Error("no feasible placement found");
  if (n == 1) return CertifiedValue::exact(*best);
  return {rtree::max(Rat(0), *best - 2 * step), *best, step};
}

bool is_principal(const TypeDescriptor& q) {
  if (!q.context.total_length().is_zero()) throw ContextMismatch("principality is decided over the empty context");
  const std::size_t n = q.arity();
  if (n == 0) return true;
  const std::size_t j = static_cast<std::size_t>(std::max_element(q.offsets.begin(), q.offsets.end()) - q.offsets.begin());
  for (std::size_t i = 0; i < n; ++i)
    if (q.offsets[j] != q.offsets[i] + q.pairwise[i][j]) return false;
  return true;
}

SpannedSubtree dcl_acl(const Tree& t, std::span<const PointRef> a) { return spanned_subtree(t, a); }

TypeDescriptor pushforward(const TypeDescriptor& q, const PointMap& f) {
  std::vector<PointRef> gens;
  for (const auto& g : q.context.generators()) gens.push_back(f(g));
  TypeDescriptor out{SpannedSubtree(f.target(), gens), {}, q.offsets, q.pairwise, q.radius};
  for (const auto& e : q.closest) out.closest.push_back(f.target().normalize(f(e)));
  return out;
}

TypeDescriptor parse_descriptor_text(std::string_view text, const std::string& base_dir) {
  std::optional<LoadedTree> ctx;
  std::map<std::size_t, PointRef> closest;
  std::map<std::size_t, Rat> offsets;
  std::map<std::pair<std::size_t, std::size_t>, Rat> pairs;
  auto fail = [](const Token& t, const std::string& what) -> void { throw ParseError(what, t.line, t.column); };
  auto index = [&](const Token& t) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(t.text, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != t.text.size() || v == 0) fail(t, "expected a positive index, got '" + t.text + "'");
    return static_cast<std::size_t>(v - 1);
  };
  std::size_t n = 0;
  for (const auto& toks : tokenize_lines(text)) {
    const std::string& kw = toks[0].text;
    if (kw == "context") {
      if (toks.size() != 2) fail(toks[0], "expected: context <tree-file>");
      if (ctx) fail(toks[0], "second context line");
      std::filesystem::path p(toks[1].text);
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      ctx = read_tree_file(p.string());
    } else if (kw == "closest") {
      if (!ctx) fail(toks[0], "closest before context");
      if (toks.size() < 3) fail(toks[0], "expected: closest <i> <point>");
      const std::size_t i = index(toks[1]);
      const Tree& t = ctx->tree;
      PointRef x = t.basepoint_ref();
      try {
        if (toks[2].text == "edge") {
          if (toks.size() != 6) fail(toks[2], "expected: edge <u> <v> <offset>");
          x = t.edge_point(t.node(toks[3].text), t.node(toks[4].text), parse_rat(toks[5]));
        } else if (toks[2].text == "node") {
          if (toks.size() != 4) fail(toks[2], "expected: node <id>");
          x = PointRef::vertex(t.node(toks[3].text));
        } else {
          if (toks.size() != 3) fail(toks[2], "expected: closest <i> <point>");
          if (auto it = ctx->points.find(toks[2].text); it != ctx->points.end())
            x = it->second;
          else
            x = PointRef::vertex(t.node(toks[2].text));
        }
      } catch (const TreeError& e) {
        fail(toks[2], e.what());
      }
      if (!closest.emplace(i, x).second) fail(toks[1], "closest point given twice");
      n = std::max(n, i + 1);
    } else if (kw == "offset") {
      if (toks.size() != 3) fail(toks[0], "expected: offset <i> <rat>");
      const std::size_t i = index(toks[1]);
      if (!offsets.emplace(i, parse_rat(toks[2])).second) fail(toks[1], "offset given twice");
      n = std::max(n, i + 1);
    } else if (kw == "pair") {
      if (toks.size() != 4) fail(toks[0], "expected: pair <i> <j> <rat>");
      std::size_t i = index(toks[1]), j = index(toks[2]);
      if (i == j) fail(toks[2], "pair needs two different indices");
      if (i > j) std::swap(i, j);
      if (!pairs.emplace(std::pair{i, j}, parse_rat(toks[3])).second) fail(toks[1], "pair given twice");
      n = std::max(n, j + 1);
    } else {
      fail(toks[0], "unknown keyword '" + kw + "'");
    }
  }
  if (!ctx) throw ParseError("missing context line");
  std::vector<PointRef> all;
  for (NodeIndex v = 0; v < ctx->tree.node_count(); ++v) all.push_back(PointRef::vertex(v));
  TypeDescriptor q{spanned_subtree(ctx->tree, all), {}, {}, std::vector<std::vector<Rat>>(n, std::vector<Rat>(n)),
                   ctx->radius};
  for (std::size_t i = 0; i < n; ++i) {
    if (!closest.count(i)) throw ParseError("missing closest " + index_str(i));
    if (!offsets.count(i)) throw ParseError("missing offset " + index_str(i));
    q.closest.push_back(ctx->tree.normalize(closest.at(i)));
    q.offsets.push_back(offsets.at(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      auto it = pairs.find({i, j});
      if (it == pairs.end()) throw ParseError("missing pair " + index_str(i) + " " + index_str(j));
      q.pairwise[i][j] = q.pairwise[j][i] = it->second;
    }
  }
  return q;
}

TypeDescriptor read_descriptor_file(const std::string& path) {
  return parse_descriptor_text(read_file(path), std::filesystem::path(path).parent_path().string());
}

std::string write_descriptor(const TypeDescriptor& q, const std::string& context_path) {
  // Points are written against the context tree as a standalone tree.
  const Tree& t = q.context.realized();
  std::string out = "context " + context_path + "\n";
  for (std::size_t i = 0; i < q.arity(); ++i) {
    const auto x = q.context.locate(q.closest[i]);
    if (!x) throw InconsistentDescriptor("closest point outside the context");
    out += "closest " + index_str(i) + " ";
    if (x->is_vertex()) {
      out += t.id(x->node());
    } else {
      const Edge& e = t.edge(x->edge());
      out += "edge " + t.id(e.u) + " " + t.id(e.v) + " " + x->offset().str();
    }
    out += "\n";
  }
  for (std::size_t i = 0; i < q.arity(); ++i) out += "offset " + index_str(i) + " " + q.offsets[i].str() + "\n";
  for (std::size_t i = 0; i < q.arity(); ++i)
    for (std::size_t j = i + 1; j < q.arity(); ++j)
      out += "pair " + index_str(i) + " " + index_str(j) + " " + q.pairwise[i][j].str() + "\n";
  return out;
}

}  // namespace rtree
