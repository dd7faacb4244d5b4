#include "rtree/amalgamation.hpp"

#include <functional>
#include <map>
#include <set>

#include "rtree/error.hpp"
#include "rtree/geometry.hpp"

namespace rtree {

namespace {

// Accumulates a glued tree as raw data on top of a base tree whose edges may
// get subdivided where other trees are attached. The result is not yet
// canonical: a glued leaf landing inside a base edge leaves a degree-2 node.
class Builder {
 public:
  Builder(Tree base, const std::string& prefix) : base_(std::move(base)), prefix_(prefix) {
    for (NodeIndex n = 0; n < base_.node_count(); ++n) {
      names_.push_back(fresh(prefix + base_.id(n)));
      for (const auto& l : base_.labels(n)) raw_.labels[names_.back()].push_back(prefix + l);
    }
    raw_.basepoint = names_[base_.basepoint()];
  }

  // Node for a point of the base, splitting its edge if needed.
  std::string node_at(const PointRef& x, const std::string& hint) {
    const PointRef y = base_.normalize(x);
    if (y.is_vertex()) return names_[y.node()];
    auto& at = splits_[y.edge()];
    auto it = at.find(y.offset());
    if (it == at.end()) it = at.emplace(y.offset(), fresh(hint.empty() ? prefix_ + base_.describe(y) : hint)).first;
    return it->second;
  }

  std::string add_node(const std::string& id) { return fresh(id); }
  void add_label(const std::string& node, const std::string& label) { raw_.labels[node].push_back(label); }
  void add_edge(const std::string& a, const std::string& b, const Rat& len) { extra_.push_back({a, b, len}); }

  Tree finish(const Rat& r) {
    for (EdgeIndex e = 0; e < base_.edge_count(); ++e) {
      const Edge& ed = base_.edge(e);
      std::string prev = names_[ed.u];
      Rat at;
      if (auto it = splits_.find(e); it != splits_.end())
        for (const auto& [off, name] : it->second) {
          raw_.edges.push_back({prev, name, off - at});
          prev = name;
          at = off;
        }
      raw_.edges.push_back({prev, names_[ed.v], ed.length - at});
    }
    raw_.edges.insert(raw_.edges.end(), extra_.begin(), extra_.end());
    raw_.nodes = order_;
    Tree out = Tree::build(raw_);
    for (NodeIndex n = 0; n < out.node_count(); ++n)
      if (out.depth(n) > r) {
        NodeIndex far = n;
        for (NodeIndex m = 0; m < out.node_count(); ++m)
          if (out.depth(m) > out.depth(far)) far = m;
        throw RadiusExceeded(out.id(far), out.depth(far).str(), r.str());
      }
    return out;
  }

  // Where a base point ended up in the finished tree.
  PointRef image(const Tree& out, const PointRef& x) const {
    const PointRef y = base_.normalize(x);
    if (y.is_vertex()) return PointRef::vertex(out.node(names_[y.node()]));
    const Edge& e = base_.edge(y.edge());
    return out.point_along(PointRef::vertex(out.node(names_[e.u])), PointRef::vertex(out.node(names_[e.v])),
                           y.offset());
  }

  const Tree& base() const { return base_; }

 private:
  std::string fresh(const std::string& want) {
    std::string id = want;
    for (int k = 2; taken_.count(id); ++k) id = want + "#" + std::to_string(k);
    taken_.insert(id);
    order_.push_back(id);
    return id;
  }

  Tree base_;
  std::string prefix_;
  RawTree raw_;
  std::vector<std::string> names_;
  std::map<EdgeIndex, std::map<Rat, std::string>> splits_;
  std::vector<RawEdge> extra_;
  std::set<std::string> taken_;
  std::vector<std::string> order_;
};

// How one tree sits against the base: distance of each vertex to the glued
// part, and the base point that the nearest glued point is identified with.
struct Part {
  const Tree* tree;
  std::string prefix;
  std::function<Rat(NodeIndex)> dist;
  std::function<PointRef(NodeIndex)> image_of_projection;
};

struct Placed {
  std::vector<std::optional<PointRef>> on_base;  // vertices inside the glued part
  std::vector<std::string> names;                // the rest
};

Placed place(Builder& b, const Part& part) {
  const Tree& t = *part.tree;
  const std::size_t n = t.node_count();
  std::vector<Rat> dist(n);
  for (NodeIndex v = 0; v < n; ++v) dist[v] = part.dist(v);
  Placed out{std::vector<std::optional<PointRef>>(n), std::vector<std::string>(n)};
  for (NodeIndex v = 0; v < n; ++v) {
    const std::string own = part.prefix + t.id(v);
    if (dist[v].is_zero()) {
      const PointRef at = part.image_of_projection(v);
      out.on_base[v] = at;
      const std::string node = b.node_at(at, own);
      if (node != own) b.add_label(node, own);
      for (const auto& l : t.labels(v)) b.add_label(node, part.prefix + l);
    } else {
      out.names[v] = b.add_node(own);
      for (const auto& l : t.labels(v)) b.add_label(out.names[v], part.prefix + l);
    }
  }
  for (NodeIndex v = 0; v < n; ++v) {
    if (dist[v].is_zero()) continue;
    std::optional<NodeIndex> toward;
    for (const auto& inc : t.incident(v))
      if (!dist[inc.other].is_zero() && dist[inc.other] + t.edge(inc.edge).length == dist[v]) toward = inc.other;
    // Every edge outside the glued part is added from its far endpoint.
    if (toward)
      b.add_edge(out.names[*toward], out.names[v], dist[v] - dist[*toward]);
    else
      b.add_edge(b.node_at(part.image_of_projection(v), ""), out.names[v], dist[v]);
  }
  return out;
}

PointMap embedding(const Builder& b, const Tree& out, const Tree& source, const Placed& placed) {
  std::vector<PointRef> images;
  images.reserve(source.node_count());
  for (NodeIndex v = 0; v < source.node_count(); ++v)
    images.push_back(placed.on_base[v] ? b.image(out, *placed.on_base[v]) : PointRef::vertex(out.node(placed.names[v])));
  return PointMap(source, out, std::move(images));
}

PointMap base_embedding(const Builder& b, const Tree& out) {
  std::vector<PointRef> images;
  for (NodeIndex v = 0; v < b.base().node_count(); ++v) images.push_back(b.image(out, PointRef::vertex(v)));
  return PointMap(b.base(), out, std::move(images));
}

Part point_part(const Tree& sub, const PointRef& in_sub, const PointRef& in_base, std::string prefix) {
  sub.check(in_sub);
  const PointRef q = sub.normalize(in_sub);
  return Part{&sub, std::move(prefix), [&sub, q](NodeIndex v) { return sub.distance(PointRef::vertex(v), q); },
              [in_base](NodeIndex) { return in_base; }};
}

}  // namespace

GlueResult glue_family(const GlueSpec& spec, const Rat& r) {
  Builder b(spec.base, "");
  std::vector<Placed> placed;
  for (std::size_t i = 0; i < spec.attachments.size(); ++i) {
    const Attachment& a = spec.attachments[i];
    spec.base.check(a.in_base);
    placed.push_back(place(b, point_part(a.sub, a.in_sub, a.in_base, "a" + std::to_string(i + 1) + ":")));
  }
  const Tree out = b.finish(r);
  const auto c = out.canonical();
  GlueResult res{c.tree, base_embedding(b, out).then(c.map), {}};
  for (std::size_t i = 0; i < placed.size(); ++i)
    res.parts.push_back(embedding(b, out, spec.attachments[i].sub, placed[i]).then(c.map));
  return res;
}

Amalgam amalgamate(const Tree& m1, const Tree& m2, const SharedPoints& shared, const Rat& r) {
  std::vector<PointRef> left{m1.basepoint_ref()}, right{m2.basepoint_ref()};
  for (const auto& [a, c] : shared) {
    m1.check(a);
    m2.check(c);
    left.push_back(m1.normalize(a));
    right.push_back(m2.normalize(c));
  }
  for (std::size_t i = 0; i < left.size(); ++i)
    for (std::size_t j = i + 1; j < left.size(); ++j) {
      const Rat dl = m1.distance(left[i], left[j]), dr = m2.distance(right[i], right[j]);
      if (dl != dr) throw NotIsometric(i, j, dl.str(), dr.str());
    }

  const SpannedSubtree s2(m2, right);
  // The shared part of m2 is the union of the segments [p, right[k]]; each
  // of its points goes to the matching point of [p, left[k]].
  auto carry = [&](const PointRef& x) {
    const Rat h = m2.depth(x);
    for (std::size_t k = 0; k < right.size(); ++k)
      if (h + m2.distance(x, right[k]) == m2.depth(right[k])) return m1.point_along(left[0], left[k], h);
    throw Error("point outside the shared subtree");
  };
  Builder b(m1, "left:");
  const Placed placed =
      place(b, Part{&m2, "right:", [&](NodeIndex v) { return s2.distance_to(PointRef::vertex(v)); },
                    [&](NodeIndex v) { return carry(project_to_subtree(s2, PointRef::vertex(v)).point); }});
  const Tree out = b.finish(r);
  const auto c = out.canonical();
  return Amalgam{c.tree, base_embedding(b, out).then(c.map), embedding(b, out, m2, placed).then(c.map)};
}

Tree star_amalgam(const std::vector<Tree>& trees, const Rat& r) {
  const Tree hub = Tree::point("p");
  Builder b(hub, "");
  for (std::size_t i = 0; i < trees.size(); ++i)
    place(b, point_part(trees[i], trees[i].basepoint_ref(), hub.basepoint_ref(), "t" + std::to_string(i + 1) + ":"));
  return b.finish(r).canonical().tree;
}

}  // namespace rtree
