#include "rtree/tree.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>

#include "rtree/error.hpp"

namespace rtree {

struct Tree::Impl {
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> labels;
  std::vector<Edge> edges;
  std::vector<std::vector<Incidence>> adj;
  NodeIndex base = 0;
  std::vector<NodeIndex> parent;  // parent[base] == base
  std::vector<EdgeIndex> parent_edge;
  std::vector<Rat> depth;
  std::vector<std::uint32_t> level;
  std::vector<NodeIndex> order;
  std::unordered_map<std::string, NodeIndex> index;

  // A point on the parent edge of `below`, at distance `up` above it.
  struct Loc {
    NodeIndex below;
    Rat up;
  };

  Loc loc(const PointRef& x) const {
    if (x.is_vertex()) return {x.node(), Rat(0)};
    const Edge& e = edges[x.edge()];
    if (parent[e.v] == e.u && parent_edge[e.v] == x.edge()) return {e.v, e.length - x.offset()};
    return {e.u, x.offset()};
  }

  PointRef ref(const Loc& l) const {
    if (l.up.is_zero()) return PointRef::vertex(l.below);
    const EdgeIndex ei = parent_edge[l.below];
    const Edge& e = edges[ei];
    if (l.up == e.length) return PointRef::vertex(parent[l.below]);
    return PointRef::on_edge(ei, e.u == l.below ? l.up : e.length - l.up);
  }

  Rat depth_of(const Loc& l) const { return depth[l.below] - l.up; }

  NodeIndex lca(NodeIndex a, NodeIndex b) const {
    while (level[a] > level[b]) a = parent[a];
    while (level[b] > level[a]) b = parent[b];
    while (a != b) {
      a = parent[a];
      b = parent[b];
    }
    return a;
  }

  // Ancestor point of l at the given (smaller or equal) depth.
  Loc climb_to(const Loc& l, const Rat& target) const {
    NodeIndex n = l.below;
    while (n != base && depth[parent[n]] > target) n = parent[n];
    if (n == base) return {base, Rat(0)};
    return {n, depth[n] - target};
  }

  Rat distance(const Loc& a, const Loc& b) const {
    if (a.below == b.below) return (a.up - b.up).abs();
    const NodeIndex w = lca(a.below, b.below);
    if (w == a.below) return depth_of(b) - depth_of(a);
    if (w == b.below) return depth_of(a) - depth_of(b);
    return depth_of(a) + depth_of(b) - depth[w] - depth[w];
  }
};

namespace {

std::shared_ptr<Tree::Impl> make_impl(const RawTree& raw) {
  auto impl = std::make_shared<Tree::Impl>();
  const std::size_t n = raw.nodes.size();
  if (n == 0) throw TreeError("tree has no nodes");
  impl->ids = raw.nodes;
  impl->labels.resize(n);
  impl->adj.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!impl->index.emplace(raw.nodes[i], static_cast<NodeIndex>(i)).second)
      throw TreeError("duplicate node '" + raw.nodes[i] + "'");
  }
  auto lookup = [&](const std::string& id) {
    auto it = impl->index.find(id);
    if (it == impl->index.end()) throw TreeError("unknown node '" + id + "'");
    return it->second;
  };
  for (const auto& [id, ls] : raw.labels) {
    auto& dst = impl->labels[lookup(id)];
    for (const auto& l : ls)
      if (std::find(dst.begin(), dst.end(), l) == dst.end()) dst.push_back(l);
  }
  if (raw.edges.size() != n - 1)
    throw TreeError("a tree on " + std::to_string(n) + " nodes needs " + std::to_string(n - 1) +
                    " edges, got " + std::to_string(raw.edges.size()));
  for (const auto& e : raw.edges) {
    const NodeIndex u = lookup(e.u), v = lookup(e.v);
    if (e.length.sign() <= 0)
      throw TreeError("edge " + e.u + "-" + e.v + " has non-positive length " + e.length.str());
    if (u == v) throw TreeError("self-loop at '" + e.u + "'");
    const auto ei = static_cast<EdgeIndex>(impl->edges.size());
    impl->edges.push_back({u, v, e.length});
    impl->adj[u].push_back({ei, v});
    impl->adj[v].push_back({ei, u});
  }
  if (raw.basepoint.empty()) throw TreeError("no basepoint");
  impl->base = lookup(raw.basepoint);

  impl->parent.assign(n, impl->base);
  impl->parent_edge.assign(n, 0);
  impl->depth.assign(n, Rat(0));
  impl->level.assign(n, 0);
  impl->order.reserve(n);
  std::vector<char> seen(n, 0);
  seen[impl->base] = 1;
  impl->order.push_back(impl->base);
  for (std::size_t head = 0; head < impl->order.size(); ++head) {
    const NodeIndex x = impl->order[head];
    for (const auto& inc : impl->adj[x]) {
      if (seen[inc.other]) {
        if (inc.other != impl->parent[x] || inc.edge != impl->parent_edge[x])
          throw TreeError("cycle through '" + impl->ids[inc.other] + "'");
        continue;
      }
      seen[inc.other] = 1;
      impl->parent[inc.other] = x;
      impl->parent_edge[inc.other] = inc.edge;
      impl->depth[inc.other] = impl->depth[x] + impl->edges[inc.edge].length;
      impl->level[inc.other] = impl->level[x] + 1;
      impl->order.push_back(inc.other);
    }
  }
  if (impl->order.size() != n) {
    for (std::size_t i = 0; i < n; ++i)
      if (!seen[i]) throw TreeError("node '" + impl->ids[i] + "' is not connected to the basepoint");
  }
  return impl;
}

}  // namespace

Tree Tree::build(const RawTree& raw) { return Tree(make_impl(raw)); }

Tree Tree::point(std::string id) {
  RawTree raw;
  raw.nodes.push_back(id);
  raw.basepoint = std::move(id);
  return build(raw);
}

RawTree Tree::raw() const {
  RawTree r;
  r.nodes = impl_->ids;
  for (std::size_t i = 0; i < impl_->ids.size(); ++i)
    if (!impl_->labels[i].empty()) r.labels[impl_->ids[i]] = impl_->labels[i];
  for (const auto& e : impl_->edges) r.edges.push_back({impl_->ids[e.u], impl_->ids[e.v], e.length});
  r.basepoint = impl_->ids[impl_->base];
  return r;
}

std::size_t Tree::node_count() const { return impl_->ids.size(); }
std::size_t Tree::edge_count() const { return impl_->edges.size(); }
NodeIndex Tree::basepoint() const { return impl_->base; }
const std::string& Tree::id(NodeIndex n) const { return impl_->ids.at(n); }
const std::vector<std::string>& Tree::labels(NodeIndex n) const { return impl_->labels.at(n); }
const Edge& Tree::edge(EdgeIndex e) const { return impl_->edges.at(e); }
std::span<const Incidence> Tree::incident(NodeIndex n) const { return impl_->adj.at(n); }

std::optional<NodeIndex> Tree::find(std::string_view id) const {
  auto it = impl_->index.find(std::string(id));
  if (it == impl_->index.end()) return std::nullopt;
  return it->second;
}

NodeIndex Tree::node(std::string_view id) const {
  if (auto n = find(id)) return *n;
  throw TreeError("unknown node '" + std::string(id) + "'");
}

std::optional<EdgeIndex> Tree::find_edge(NodeIndex a, NodeIndex b) const {
  for (const auto& inc : incident(a))
    if (inc.other == b) return inc.edge;
  return std::nullopt;
}

const Rat& Tree::depth(NodeIndex n) const { return impl_->depth.at(n); }

std::optional<NodeIndex> Tree::parent(NodeIndex n) const {
  if (n == impl_->base) return std::nullopt;
  return impl_->parent.at(n);
}

EdgeIndex Tree::parent_edge(NodeIndex n) const {
  if (n == impl_->base) throw TreeError("basepoint has no parent edge");
  return impl_->parent_edge.at(n);
}

std::span<const NodeIndex> Tree::order() const { return impl_->order; }

PointRef Tree::edge_point(EdgeIndex e, const Rat& offset) const {
  return normalize(PointRef::on_edge(e, offset));
}

PointRef Tree::edge_point(NodeIndex from, NodeIndex to, const Rat& offset) const {
  auto e = find_edge(from, to);
  if (!e) throw TreeError("no edge " + id(from) + "-" + id(to));
  const Edge& ed = edge(*e);
  return edge_point(*e, ed.u == from ? offset : ed.length - offset);
}

void Tree::check(const PointRef& x) const {
  if (x.is_vertex()) {
    if (x.node() >= node_count()) throw TreeError("vertex index out of range");
    return;
  }
  if (x.edge() >= edge_count()) throw TreeError("edge index out of range");
  const Rat& len = edge(x.edge()).length;
  if (x.offset().sign() < 0 || x.offset() > len)
    throw TreeError("offset " + x.offset().str() + " outside edge of length " + len.str());
}

PointRef Tree::normalize(const PointRef& x) const {
  check(x);
  if (x.is_vertex()) return x;
  const Edge& e = edge(x.edge());
  if (x.offset().is_zero()) return PointRef::vertex(e.u);
  if (x.offset() == e.length) return PointRef::vertex(e.v);
  return x;
}

Rat Tree::distance(const PointRef& a, const PointRef& b) const {
  return impl_->distance(impl_->loc(a), impl_->loc(b));
}

Rat Tree::depth(const PointRef& x) const { return impl_->depth_of(impl_->loc(x)); }

PointRef Tree::point_along(const PointRef& a, const PointRef& b, const Rat& dist) const {
  const auto& I = *impl_;
  const auto la = I.loc(a), lb = I.loc(b);
  const Rat da = I.depth_of(la), db = I.depth_of(lb);
  if (la.below == lb.below) {
    const Rat target = da < db ? da + dist : da - dist;
    return I.ref({la.below, I.depth[la.below] - target});
  }
  const NodeIndex w = I.lca(la.below, lb.below);
  if (w == la.below) return I.ref(I.climb_to(lb, da + dist));  // a is above b
  if (w == lb.below) return I.ref(I.climb_to(la, da - dist));
  const Rat up_a = da - I.depth[w];
  if (dist <= up_a) return I.ref(I.climb_to(la, da - dist));
  const Rat total = up_a + db - I.depth[w];
  return I.ref(I.climb_to(lb, db - (total - dist)));
}

Rat Tree::total_length() const {
  Rat s;
  for (const auto& e : impl_->edges) s += e.length;
  return s;
}

Rat Tree::max_depth() const {
  Rat m;
  for (const auto& d : impl_->depth) m = max(m, d);
  return m;
}

std::string Tree::describe(const PointRef& x) const {
  if (x.is_vertex()) return id(x.node());
  const Edge& e = edge(x.edge());
  return id(e.u) + "-" + id(e.v) + "@" + x.offset().str();
}

bool Tree::is_canonical() const {
  for (NodeIndex n = 0; n < node_count(); ++n)
    if (n != basepoint() && !is_labeled(n) && degree(n) == 2) return false;
  return true;
}

Tree::Canonicalized Tree::canonical() const {
  const auto& I = *impl_;
  const std::size_t n = node_count();
  auto kept = [&](NodeIndex x) { return x == I.base || !I.labels[x].empty() || I.adj[x].size() != 2; };
  std::vector<NodeIndex> new_index(n, 0);
  RawTree raw;
  raw.basepoint = I.ids[I.base];
  for (NodeIndex x = 0; x < n; ++x) {
    if (!kept(x)) continue;
    new_index[x] = static_cast<NodeIndex>(raw.nodes.size());
    raw.nodes.push_back(I.ids[x]);
    if (!I.labels[x].empty()) raw.labels[I.ids[x]] = I.labels[x];
  }
  // Suppressed nodes sit on the new edge between two kept nodes.
  struct Pending {
    NodeIndex node, top, bottom;
  };
  std::vector<Pending> pending;
  for (NodeIndex x : I.order) {
    if (x == I.base || !kept(x)) continue;
    const std::size_t first = pending.size();
    NodeIndex a = I.parent[x];
    while (!kept(a)) {
      pending.push_back({a, a, x});
      a = I.parent[a];
    }
    for (std::size_t k = first; k < pending.size(); ++k) pending[k].top = a;
    raw.edges.push_back({I.ids[a], I.ids[x], I.depth[x] - I.depth[a]});
  }
  Tree out = build(raw);
  std::vector<PointRef> images(n, PointRef::vertex(0));
  for (NodeIndex x = 0; x < n; ++x)
    if (kept(x)) images[x] = PointRef::vertex(new_index[x]);
  for (const auto& pd : pending) {
    const NodeIndex a = pd.top;
    const NodeIndex na = new_index[a], nb = new_index[pd.bottom];
    images[pd.node] = out.edge_point(na, nb, I.depth[pd.node] - I.depth[a]);
  }
  return {out, PointMap(*this, out, std::move(images))};
}

PointMap::PointMap(Tree source, Tree target, std::vector<PointRef> vertex_images)
    : source_(std::move(source)), target_(std::move(target)), images_(std::move(vertex_images)) {
  if (images_.size() != source_.node_count()) throw TreeError("point map needs one image per vertex");
}

PointMap PointMap::identity(const Tree& t) {
  std::vector<PointRef> im;
  im.reserve(t.node_count());
  for (NodeIndex n = 0; n < t.node_count(); ++n) im.push_back(PointRef::vertex(n));
  return PointMap(t, t, std::move(im));
}

PointRef PointMap::operator()(const PointRef& x) const {
  const PointRef y = source_.normalize(x);
  if (y.is_vertex()) return images_.at(y.node());
  const Edge& e = source_.edge(y.edge());
  return target_.point_along(images_[e.u], images_[e.v], y.offset());
}

PointMap PointMap::then(const PointMap& g) const {
  std::vector<PointRef> im;
  im.reserve(images_.size());
  for (const auto& y : images_) im.push_back(g(y));
  return PointMap(source_, g.target(), std::move(im));
}

std::string_view to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::DuplicateNode: return "duplicate-node";
    case Violation::Kind::UnknownNode: return "unknown-node";
    case Violation::Kind::MissingBasepoint: return "missing-basepoint";
    case Violation::Kind::NonPositiveEdge: return "non-positive-edge";
    case Violation::Kind::Cycle: return "cycle";
    case Violation::Kind::Disconnected: return "disconnected";
    case Violation::Kind::NonCanonical: return "non-canonical";
    case Violation::Kind::RadiusExceeded: return "radius-exceeded";
  }
  return "?";
}

bool ValidationReport::has(Violation::Kind k) const {
  return std::any_of(violations.begin(), violations.end(), [k](const auto& v) { return v.kind == k; });
}

ValidationReport validate(const RawTree& raw, const Rat& radius) {
  using K = Violation::Kind;
  ValidationReport rep;
  std::unordered_map<std::string, std::size_t> idx;
  for (const auto& id : raw.nodes)
    if (!idx.emplace(id, idx.size()).second) rep.violations.push_back({K::DuplicateNode, "duplicate node", {id}, {}});
  std::vector<std::string> names(idx.size());
  for (const auto& [id, i] : idx) names[i] = id;
  const std::size_t n = names.size();

  for (const auto& [id, ls] : raw.labels)
    if (!idx.count(id)) rep.violations.push_back({K::UnknownNode, "label on unknown node", {id}, {}});
  if (raw.basepoint.empty() || !idx.count(raw.basepoint))
    rep.violations.push_back({K::MissingBasepoint, "basepoint is not a node", {raw.basepoint}, {}});

  std::vector<std::size_t> comp(n);
  for (std::size_t i = 0; i < n; ++i) comp[i] = i;
  auto find = [&](std::size_t x) {
    while (comp[x] != x) x = comp[x] = comp[comp[x]];
    return x;
  };
  std::vector<std::vector<std::size_t>> forest(n);
  std::vector<std::size_t> degree(n, 0);
  for (const auto& e : raw.edges) {
    auto iu = idx.find(e.u), iv = idx.find(e.v);
    if (iu == idx.end() || iv == idx.end()) {
      rep.violations.push_back(
          {K::UnknownNode, "edge endpoint is not a node", {iu == idx.end() ? e.u : e.v}, {}});
      continue;
    }
    if (e.length.sign() <= 0)
      rep.violations.push_back({K::NonPositiveEdge, "edge length must be positive", {e.u, e.v}, e.length});
    const std::size_t u = iu->second, v = iv->second;
    ++degree[u];
    ++degree[v];
    if (find(u) == find(v)) {
      // Path u..v in the forest built so far closes the cycle.
      std::vector<std::size_t> prev(n, n);
      std::deque<std::size_t> q{u};
      prev[u] = u;
      while (!q.empty() && prev[v] == n) {
        const std::size_t x = q.front();
        q.pop_front();
        for (std::size_t y : forest[x])
          if (prev[y] == n) {
            prev[y] = x;
            q.push_back(y);
          }
      }
      std::vector<std::string> cyc;
      if (u == v) {
        cyc.push_back(names[u]);
      } else {
        for (std::size_t x = v;; x = prev[x]) {
          cyc.push_back(names[x]);
          if (x == u) break;
        }
      }
      rep.violations.push_back({K::Cycle, "cycle", std::move(cyc), {}});
      continue;
    }
    comp[find(u)] = find(v);
    forest[u].push_back(v);
    forest[v].push_back(u);
  }

  if (n > 0) {
    const std::size_t root = idx.count(raw.basepoint) ? idx[raw.basepoint] : 0;
    std::map<std::size_t, std::vector<std::string>> others;
    for (std::size_t i = 0; i < n; ++i)
      if (find(i) != find(root)) others[find(i)].push_back(names[i]);
    for (auto& [c, members] : others)
      rep.violations.push_back({K::Disconnected, "component not connected to the basepoint", std::move(members), {}});
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto lit = raw.labels.find(names[i]);
    const bool labeled = lit != raw.labels.end() && !lit->second.empty();
    if (degree[i] == 2 && !labeled && names[i] != raw.basepoint)
      rep.violations.push_back({K::NonCanonical, "unlabeled degree-2 node", {names[i]}, {}});
  }

  const bool structural = std::none_of(rep.violations.begin(), rep.violations.end(), [](const auto& v) {
    return v.kind != K::NonCanonical;
  });
  if (structural && n > 0) {
    const Tree t = Tree::build(raw);
    Rat best(-1);
    std::vector<std::string> over;
    for (NodeIndex x : t.order()) {
      if (t.depth(x) > best) {
        best = t.depth(x);
        rep.farthest = t.id(x);
      }
      if (t.depth(x) > radius) over.push_back(t.id(x));
    }
    rep.max_distance = best;
    if (!over.empty())
      rep.violations.push_back({K::RadiusExceeded, "distance from basepoint exceeds radius", std::move(over), best});
  }
  return rep;
}

ValidationReport validate(const Tree& tree, const Rat& radius) { return validate(tree.raw(), radius); }

}  // namespace rtree
