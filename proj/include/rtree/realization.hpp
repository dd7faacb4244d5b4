#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtree/error.hpp"
#include "rtree/matrix.hpp"
#include "rtree/tree.hpp"

namespace rtree {

class FourPointViolation : public Error {
 public:
  FourPointViolation(const MetricMatrix& m, FourPointWitness w);
  const FourPointWitness& witness() const { return witness_; }

 private:
  FourPointWitness witness_;
};

std::optional<FourPointWitness> four_point_check(const MetricMatrix& m);
Rat delta_hyperbolicity(const MetricMatrix& m);
/// First (i,j,k) with m(i,k) > m(i,j) + m(j,k).
std::optional<std::array<std::size_t, 3>> triangle_violation(const MetricMatrix& m);

struct RealizedTree {
  Tree tree;
  /// Vertex carrying each matrix label, in matrix order.
  std::vector<PointRef> points;
};

/// Minimal tree spanned by points at the given distances, rooted at the
/// point labeled `basepoint_label`. Points at distance 0 share a vertex.
/// Branch points that carry no label get ids `steiner<k>`.
RealizedTree realize(const MetricMatrix& m, const std::string& basepoint_label);
inline Tree realize_tree(const MetricMatrix& m, const std::string& basepoint_label) {
  return realize(m, basepoint_label).tree;
}

/// Pairwise distances; labels default to Tree::describe of each point.
MetricMatrix tree_to_matrix(const Tree& t, std::span<const PointRef> points, std::vector<std::string> labels = {});

}  // namespace rtree
