#pragma once

#include <string>
#include <vector>

#include "rtree/rational.hpp"

namespace rtree {

/// Symmetric matrix of exact distances between labeled points.
struct MetricMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<Rat>> entries;

  std::size_t size() const { return labels.size(); }
  const Rat& operator()(std::size_t i, std::size_t j) const { return entries[i][j]; }

  static MetricMatrix zeros(std::vector<std::string> labels);
  void set(std::size_t i, std::size_t j, const Rat& d);
  /// Throws Error unless square, symmetric, zero on the diagonal and non-negative.
  void check() const;
  std::size_t index(const std::string& label) const;
};

bool operator==(const MetricMatrix& a, const MetricMatrix& b);

}  // namespace rtree

namespace rtree {

/// A quadruple violating d(x,y)+d(z,t) ≤ max{d(x,z)+d(y,t), d(y,z)+d(x,t)}.
struct FourPointWitness {
  std::size_t x, y, z, t;
  Rat lhs;
  Rat rhs;
};

}  // namespace rtree
