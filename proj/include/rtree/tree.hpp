#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtree/rational.hpp"

namespace rtree {

using NodeIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;

/// A location in a tree: a vertex, or a point strictly inside an edge at
/// `offset` from the edge's first endpoint. Use Tree::normalize (or the Tree
/// factories) so that two refs to the same metric point compare equal.
class PointRef {
 public:
  static PointRef vertex(NodeIndex n) { return PointRef(true, n, Rat(0)); }
  static PointRef on_edge(EdgeIndex e, Rat offset) { return PointRef(false, e, std::move(offset)); }

  bool is_vertex() const { return vertex_; }
  NodeIndex node() const { return index_; }
  EdgeIndex edge() const { return index_; }
  const Rat& offset() const { return offset_; }

  friend bool operator==(const PointRef& a, const PointRef& b) {
    return a.vertex_ == b.vertex_ && a.index_ == b.index_ && a.offset_ == b.offset_;
  }
  friend bool operator<(const PointRef& a, const PointRef& b) {
    if (a.vertex_ != b.vertex_) return a.vertex_;
    if (a.index_ != b.index_) return a.index_ < b.index_;
    return a.offset_ < b.offset_;
  }

 private:
  PointRef(bool vertex, std::uint32_t index, Rat offset)
      : vertex_(vertex), index_(index), offset_(std::move(offset)) {}

  bool vertex_;
  std::uint32_t index_;
  Rat offset_;
};

struct RawEdge {
  std::string u;
  std::string v;
  Rat length;
};

/// Tree data exactly as written: nothing is checked. validate() reports what
/// is wrong with it; Tree::build() turns it into a usable tree.
struct RawTree {
  std::vector<std::string> nodes;
  std::map<std::string, std::vector<std::string>> labels;
  std::vector<RawEdge> edges;
  std::string basepoint;
};

struct Edge {
  NodeIndex u;
  NodeIndex v;
  Rat length;
};

struct Incidence {
  EdgeIndex edge;
  NodeIndex other;
};

class PointMap;

/// Immutable finite edge-weighted tree with a basepoint p: the skeleton of a
/// finitely spanned pointed R-tree. Copies share storage.
///
/// Construction checks connectivity, acyclicity and positive lengths; radius
/// and canonical form are properties reported by validate().
class Tree {
 public:
  static Tree build(const RawTree& raw);
  /// The one-point tree {p}.
  static Tree point(std::string id = "p");

  RawTree raw() const;

  std::size_t node_count() const;
  std::size_t edge_count() const;
  NodeIndex basepoint() const;
  const std::string& id(NodeIndex n) const;
  const std::vector<std::string>& labels(NodeIndex n) const;
  bool is_labeled(NodeIndex n) const { return !labels(n).empty(); }
  const Edge& edge(EdgeIndex e) const;
  std::span<const Incidence> incident(NodeIndex n) const;
  std::size_t degree(NodeIndex n) const { return incident(n).size(); }

  std::optional<NodeIndex> find(std::string_view id) const;
  NodeIndex node(std::string_view id) const;
  std::optional<EdgeIndex> find_edge(NodeIndex a, NodeIndex b) const;

  /// Rooted structure at the basepoint.
  const Rat& depth(NodeIndex n) const;
  std::optional<NodeIndex> parent(NodeIndex n) const;
  EdgeIndex parent_edge(NodeIndex n) const;
  /// Nodes in breadth-first order from p.
  std::span<const NodeIndex> order() const;

  PointRef basepoint_ref() const { return PointRef::vertex(basepoint()); }
  /// Normalized point at `offset` from the first endpoint of `e`.
  PointRef edge_point(EdgeIndex e, const Rat& offset) const;
  /// Point at `offset` from `from` along the edge joining `from` and `to`.
  PointRef edge_point(NodeIndex from, NodeIndex to, const Rat& offset) const;
  PointRef normalize(const PointRef& x) const;
  /// Throws TreeError for out-of-range indices or offsets.
  void check(const PointRef& x) const;

  Rat distance(const PointRef& a, const PointRef& b) const;
  Rat depth(const PointRef& x) const;
  /// The point of [a,b] at distance `dist` from a (0 <= dist <= d(a,b)).
  PointRef point_along(const PointRef& a, const PointRef& b, const Rat& dist) const;

  Rat total_length() const;
  Rat max_depth() const;
  std::string describe(const PointRef& x) const;

  /// Suppresses unlabeled, non-basepoint vertices of degree 2.
  bool is_canonical() const;
  struct Canonicalized;
  Canonicalized canonical() const;

  bool same_storage(const Tree& other) const { return impl_ == other.impl_; }

  struct Impl;

 private:
  explicit Tree(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Isometric embedding of one tree into another, given by vertex images;
/// edge points are carried along the image segment.
class PointMap {
 public:
  PointMap(Tree source, Tree target, std::vector<PointRef> vertex_images);
  static PointMap identity(const Tree& t);

  const Tree& source() const { return source_; }
  const Tree& target() const { return target_; }
  PointRef operator()(const PointRef& x) const;
  PointRef operator()(NodeIndex n) const { return images_.at(n); }
  /// g∘this, requires g.source() to be this->target().
  PointMap then(const PointMap& g) const;

 private:
  Tree source_;
  Tree target_;
  std::vector<PointRef> images_;
};

struct Tree::Canonicalized {
  Tree tree;
  PointMap map;
};

struct Violation {
  enum class Kind {
    DuplicateNode,
    UnknownNode,
    MissingBasepoint,
    NonPositiveEdge,
    Cycle,
    Disconnected,
    NonCanonical,
    RadiusExceeded,
  };
  Kind kind;
  std::string detail;
  std::vector<std::string> witness;
  std::optional<Rat> value;
};

std::string_view to_string(Violation::Kind k);

struct ValidationReport {
  std::vector<Violation> violations;
  std::optional<Rat> max_distance;
  std::optional<std::string> farthest;

  bool ok() const { return violations.empty(); }
  bool has(Violation::Kind k) const;
};

ValidationReport validate(const RawTree& raw, const Rat& radius);
ValidationReport validate(const Tree& tree, const Rat& radius);

}  // namespace rtree
