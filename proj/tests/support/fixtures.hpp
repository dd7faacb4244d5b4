#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtree/tree.hpp"

namespace rtree::testing {

// p–y, y–a, y–b, each of length 1.
inline RawTree tripod_raw() {
  RawTree r;
  r.nodes = {"p", "y", "a", "b"};
  r.basepoint = "p";
  r.edges = {{"p", "y", Rat(1)}, {"y", "a", Rat(1)}, {"y", "b", Rat(1)}};
  return r;
}

inline Tree tripod() { return Tree::build(tripod_raw()); }

inline PointRef at(const Tree& t, const std::string& id) { return PointRef::vertex(t.node(id)); }

// Random canonical tree with up to `nodes` vertices and lengths in (0, 4]
// with denominators up to 3. About half the vertices get a label.
inline Tree random_tree(std::mt19937_64& rng, std::size_t nodes) {
  std::uniform_int_distribution<int> num(1, 12);
  std::uniform_int_distribution<int> den(1, 3);
  RawTree r;
  r.basepoint = "n0";
  for (std::size_t i = 0; i < nodes; ++i) {
    r.nodes.push_back("n" + std::to_string(i));
    if (i > 0) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      r.edges.push_back({"n" + std::to_string(pick(rng)), r.nodes.back(), Rat(num(rng), den(rng))});
    }
    if (rng() % 2 == 0) r.labels[r.nodes.back()] = {"l" + std::to_string(i)};
  }
  return Tree::build(r).canonical().tree;
}

// Every vertex plus interior points at a few fractions of every edge.
inline std::vector<PointRef> sample_points(const Tree& t) {
  std::vector<PointRef> out;
  for (NodeIndex n = 0; n < t.node_count(); ++n) out.push_back(PointRef::vertex(n));
  for (EdgeIndex e = 0; e < t.edge_count(); ++e)
    for (int k : {1, 2})
      out.push_back(t.edge_point(e, t.edge(e).length * Rat(k, 3)));
  return out;
}

// p–q of the given length.
inline Tree segment(const Rat& len, const std::string& far = "q") {
  RawTree r;
  r.nodes = {"p", far};
  r.basepoint = "p";
  r.edges = {{"p", far, len}};
  return Tree::build(r);
}

// Vertex with this id, or else the vertex carrying this label.
inline PointRef named(const Tree& t, const std::string& name) {
  if (auto n = t.find(name)) return PointRef::vertex(*n);
  for (NodeIndex n = 0; n < t.node_count(); ++n)
    for (const auto& l : t.labels(n))
      if (l == name) return PointRef::vertex(n);
  throw std::out_of_range("no node or label " + name);
}

// A larger tree containing `t` isometrically, grown by hanging `extra` new
// leaves off vertices or interior points of edges. Existing ids are kept.
struct Grown {
  Tree tree;
  Tree original;
  PointRef carry(const PointRef& x) const {
    const PointRef y = original.normalize(x);
    if (y.is_vertex()) return PointRef::vertex(tree.node(original.id(y.node())));
    const Edge& e = original.edge(y.edge());
    return tree.point_along(PointRef::vertex(tree.node(original.id(e.u))),
                            PointRef::vertex(tree.node(original.id(e.v))), y.offset());
  }
};

inline Grown grow(std::mt19937_64& rng, const Tree& t, int extra, const std::string& tag = "g") {
  RawTree r = t.raw();
  std::uniform_int_distribution<int> num(1, 9);
  for (int k = 0; k < extra; ++k) {
    std::string at;
    if (r.edges.empty() || rng() % 2 == 0) {
      at = r.nodes[rng() % r.nodes.size()];
    } else {
      const std::size_t i = rng() % r.edges.size();
      const RawEdge e = r.edges[i];
      const Rat off = e.length * Rat(1 + static_cast<int>(rng() % 3), 4);
      at = tag + "s" + std::to_string(k);
      r.nodes.push_back(at);
      r.edges[i] = {e.u, at, off};
      r.edges.push_back({at, e.v, e.length - off});
    }
    const std::string leaf = tag + std::to_string(k);
    r.nodes.push_back(leaf);
    r.edges.push_back({at, leaf, Rat(num(rng), 1 + static_cast<int>(rng() % 2))});
  }
  return Grown{Tree::build(r), t};
}

}  // namespace rtree::testing
