#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rtree/tree.hpp"

namespace rtree {

/// (x·y)_w = ½[d(x,w) + d(y,w) − d(x,y)], the distance from w to [x,y].
Rat gromov_product(const Tree& t, const PointRef& x, const PointRef& y, const PointRef& w);

/// The Y-point of a, b, c.
PointRef median(const Tree& t, const PointRef& a, const PointRef& b, const PointRef& c);

/// b ∈ [a,c].
bool is_between(const Tree& t, const PointRef& a, const PointRef& b, const PointRef& c);

/// The points lie in order along [x_0, x_n].
bool piecewise_segment_check(const Tree& t, std::span<const PointRef> points);

/// The point of [x1,x2] at distance s·d(x1,x2) from x1.
PointRef interpolate(const Tree& t, const PointRef& x1, const PointRef& x2, const Rat& s);

/// d(x,p) ∸ s.
Rat dist_to_center_ball(const Tree& t, const PointRef& x, const Rat& s);

/// The subtree spanned by a finite set of points together with the basepoint.
class SpannedSubtree {
 public:
  SpannedSubtree(Tree ambient, std::vector<PointRef> generators);

  const Tree& ambient() const { return ambient_; }
  /// Normalized generators, basepoint first, without repeats.
  const std::vector<PointRef>& generators() const { return generators_; }
  /// The subtree as its own canonical tree, rooted at the same basepoint.
  const Tree& realized() const { return realized_; }
  /// Ambient image of a realized vertex.
  const PointRef& ambient_point(NodeIndex n) const { return to_ambient_.at(n); }
  PointRef ambient_point(const PointRef& x) const;
  /// Realized point for an ambient point of the subtree.
  std::optional<PointRef> locate(const PointRef& ambient_point) const;

  /// Distance from an ambient point to the subtree.
  Rat distance_to(const PointRef& x) const;
  bool contains(const PointRef& x) const { return distance_to(x).is_zero(); }
  Rat total_length() const { return realized_.total_length(); }
  bool is_whole() const { return total_length() == ambient_.total_length(); }

  /// Same ambient storage and the same point set.
  bool same_set(const SpannedSubtree& other) const;

 private:
  Tree ambient_;
  std::vector<PointRef> generators_;
  Tree realized_{Tree::point()};
  std::vector<PointRef> to_ambient_;
};

SpannedSubtree spanned_subtree(const Tree& t, std::span<const PointRef> points);

struct Projection {
  PointRef point;
  Rat distance;
};

/// Closest point of the subtree to a, and the distance to it.
Projection project_to_subtree(const SpannedSubtree& sub, const PointRef& a);

/// Degree-one vertices; {p} for the one-point tree.
std::vector<PointRef> endpoints(const Tree& t);

/// Isometry of t exchanging the branches at v that leave through edges e1
/// and e2, when those branches are isometric as rooted trees. Labels are
/// ignored except that they keep degree-2 vertices in the comparison.
std::optional<PointMap> branch_swap(const Tree& t, NodeIndex v, EdgeIndex e1, EdgeIndex e2);

}  // namespace rtree
