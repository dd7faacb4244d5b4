#include "rtree/geometry.hpp"

#include <algorithm>
#include <functional>

#include "rtree/error.hpp"

namespace rtree {

Rat gromov_product(const Tree& t, const PointRef& x, const PointRef& y, const PointRef& w) {
  return (t.distance(x, w) + t.distance(y, w) - t.distance(x, y)) / 2;
}

PointRef median(const Tree& t, const PointRef& a, const PointRef& b, const PointRef& c) {
  return t.point_along(a, b, gromov_product(t, b, c, a));
}

bool is_between(const Tree& t, const PointRef& a, const PointRef& b, const PointRef& c) {
  return t.distance(a, c) == t.distance(a, b) + t.distance(b, c);
}

bool piecewise_segment_check(const Tree& t, std::span<const PointRef> points) {
  if (points.size() < 2) throw Error("piecewise segment needs at least two points");
  Rat sum;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) sum += t.distance(points[i], points[i + 1]);
  return sum == t.distance(points.front(), points.back());
}

PointRef interpolate(const Tree& t, const PointRef& x1, const PointRef& x2, const Rat& s) {
  if (s.sign() < 0 || s > Rat(1)) throw Error("interpolation parameter outside [0,1]");
  return t.point_along(x1, x2, s * t.distance(x1, x2));
}

Rat dist_to_center_ball(const Tree& t, const PointRef& x, const Rat& s) {
  return monus(t.depth(x), s);
}

namespace {

bool same_tree(const Tree& a, const Tree& b) {
  if (a.same_storage(b)) return true;
  if (a.node_count() != b.node_count() || a.basepoint() != b.basepoint()) return false;
  for (NodeIndex n = 0; n < a.node_count(); ++n)
    if (a.id(n) != b.id(n)) return false;
  for (EdgeIndex e = 0; e < a.edge_count(); ++e) {
    const Edge &x = a.edge(e), &y = b.edge(e);
    if (x.u != y.u || x.v != y.v || x.length != y.length) return false;
  }
  return true;
}

}  // namespace

SpannedSubtree::SpannedSubtree(Tree ambient, std::vector<PointRef> generators) : ambient_(std::move(ambient)) {
  const Tree& t = ambient_;
  generators_.push_back(t.basepoint_ref());
  for (const auto& g : generators) {
    PointRef x = t.normalize(g);
    if (std::find(generators_.begin(), generators_.end(), x) == generators_.end()) generators_.push_back(x);
  }

  const std::size_t n = t.node_count();
  std::vector<char> full(n, 0);
  std::vector<Rat> partial(n);
  full[t.basepoint()] = 1;
  auto mark = [&](NodeIndex x) {
    while (!full[x]) {
      full[x] = 1;
      x = *t.parent(x);
    }
  };
  for (const auto& g : generators_) {
    if (g.is_vertex()) {
      mark(g.node());
      continue;
    }
    const Edge& e = t.edge(g.edge());
    const NodeIndex child = (t.parent(e.v) == e.u && t.parent_edge(e.v) == g.edge()) ? e.v : e.u;
    const NodeIndex top = *t.parent(child);
    partial[child] = max(partial[child], t.depth(g) - t.depth(top));
    mark(top);
  }

  RawTree raw;
  raw.basepoint = t.id(t.basepoint());
  std::vector<PointRef> pre_images;
  for (NodeIndex x : t.order()) {
    if (full[x]) {
      raw.nodes.push_back(t.id(x));
      if (t.is_labeled(x)) raw.labels[t.id(x)] = t.labels(x);
      pre_images.push_back(PointRef::vertex(x));
      if (x != t.basepoint()) raw.edges.push_back({t.id(*t.parent(x)), t.id(x), t.edge(t.parent_edge(x)).length});
    } else if (partial[x].sign() > 0) {
      const NodeIndex top = *t.parent(x);
      const PointRef end = t.edge_point(top, x, partial[x]);
      raw.nodes.push_back(t.describe(end));
      pre_images.push_back(end);
      raw.edges.push_back({t.id(top), raw.nodes.back(), partial[x]});
    }
  }
  const Tree pre = Tree::build(raw);
  realized_ = pre.canonical().tree;
  to_ambient_.reserve(realized_.node_count());
  for (NodeIndex m = 0; m < realized_.node_count(); ++m) to_ambient_.push_back(pre_images[pre.node(realized_.id(m))]);
}

PointRef SpannedSubtree::ambient_point(const PointRef& x) const {
  const PointRef y = realized_.normalize(x);
  if (y.is_vertex()) return to_ambient_[y.node()];
  const Edge& e = realized_.edge(y.edge());
  return ambient_.point_along(to_ambient_[e.u], to_ambient_[e.v], y.offset());
}

std::optional<PointRef> SpannedSubtree::locate(const PointRef& x) const {
  const Tree& t = ambient_;
  const NodeIndex root = realized_.basepoint();
  if (t.distance(x, to_ambient_[root]).is_zero()) return PointRef::vertex(root);
  for (NodeIndex m : realized_.order()) {
    if (m == root) continue;
    const NodeIndex q = *realized_.parent(m);
    const PointRef &a = to_ambient_[m], &b = to_ambient_[q];
    if (is_between(t, b, x, a)) return realized_.edge_point(q, m, t.distance(b, x));
  }
  return std::nullopt;
}

Rat SpannedSubtree::distance_to(const PointRef& x) const {
  const PointRef& p = generators_.front();
  std::optional<Rat> best;
  for (const auto& g : generators_) {
    Rat d = gromov_product(ambient_, p, g, x);
    if (!best || d < *best) best = std::move(d);
  }
  return *best;
}

bool SpannedSubtree::same_set(const SpannedSubtree& other) const {
  if (!same_tree(ambient_, other.ambient_)) return false;
  if (total_length() != other.total_length()) return false;
  return std::all_of(other.generators_.begin(), other.generators_.end(),
                     [&](const PointRef& g) { return contains(g); });
}

SpannedSubtree spanned_subtree(const Tree& t, std::span<const PointRef> points) {
  return SpannedSubtree(t, std::vector<PointRef>(points.begin(), points.end()));
}

Projection project_to_subtree(const SpannedSubtree& sub, const PointRef& a) {
  const Tree& t = sub.ambient();
  Rat d = sub.distance_to(a);
  PointRef e = t.point_along(a, t.basepoint_ref(), d);
  return {std::move(e), std::move(d)};
}

std::vector<PointRef> endpoints(const Tree& t) {
  if (t.node_count() == 1) return {t.basepoint_ref()};
  std::vector<PointRef> out;
  for (NodeIndex n = 0; n < t.node_count(); ++n)
    if (t.degree(n) == 1) out.push_back(PointRef::vertex(n));
  return out;
}

std::optional<PointMap> branch_swap(const Tree& t, NodeIndex v, EdgeIndex e1, EdgeIndex e2) {
  if (e1 == e2) return std::nullopt;
  auto far_end = [&](EdgeIndex e) {
    const Edge& ed = t.edge(e);
    if (ed.u == v) return ed.v;
    if (ed.v == v) return ed.u;
    throw TreeError("edge is not incident to the branch vertex");
  };
  std::function<std::string(NodeIndex, NodeIndex)> code = [&](NodeIndex x, NodeIndex from) {
    std::vector<std::string> parts;
    for (const auto& inc : t.incident(x))
      if (inc.other != from) parts.push_back(t.edge(inc.edge).length.str() + code(inc.other, x));
    std::sort(parts.begin(), parts.end());
    std::string s = "(";
    for (const auto& p : parts) s += p + ",";
    return s + ")";
  };
  const NodeIndex w1 = far_end(e1), w2 = far_end(e2);
  if (t.edge(e1).length != t.edge(e2).length || code(w1, v) != code(w2, v)) return std::nullopt;

  std::vector<PointRef> images;
  images.reserve(t.node_count());
  for (NodeIndex n = 0; n < t.node_count(); ++n) images.push_back(PointRef::vertex(n));
  std::function<void(NodeIndex, NodeIndex, NodeIndex, NodeIndex)> pair = [&](NodeIndex x, NodeIndex fx,
                                                                             NodeIndex y, NodeIndex fy) {
    images[x] = PointRef::vertex(y);
    auto children = [&](NodeIndex z, NodeIndex fz) {
      std::vector<std::pair<std::string, NodeIndex>> c;
      for (const auto& inc : t.incident(z))
        if (inc.other != fz) c.emplace_back(t.edge(inc.edge).length.str() + code(inc.other, z), inc.other);
      std::sort(c.begin(), c.end());
      return c;
    };
    const auto cx = children(x, fx), cy = children(y, fy);
    for (std::size_t i = 0; i < cx.size(); ++i) pair(cx[i].second, x, cy[i].second, y);
  };
  pair(w1, v, w2, v);
  pair(w2, v, w1, v);
  return PointMap(t, t, std::move(images));
}

}  // namespace rtree
