#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rtree/tree.hpp"

namespace rtree {

struct Attachment {
  Tree sub;
  PointRef in_sub;
  PointRef in_base;
};

struct GlueSpec {
  Tree base;
  std::vector<Attachment> attachments;
};

/// A glued tree with the embedding of each input. Base vertices keep their
/// ids; vertices of attachment i are renamed `a<i>:<id>`.
struct GlueResult {
  Tree tree;
  PointMap base;
  std::vector<PointMap> parts;
};

/// Attaches every `sub` to `base` by identifying in_sub with in_base.
/// Throws RadiusExceeded if the result has radius above r.
GlueResult glue_family(const GlueSpec& spec, const Rat& r);

/// Correspondence between points of two trees spanning isomorphic subtrees;
/// the basepoints are identified implicitly.
using SharedPoints = std::vector<std::pair<PointRef, PointRef>>;

struct Amalgam {
  Tree tree;
  PointMap left;
  PointMap right;
};

/// Pushout of m1 ← M0 → m2, where M0 is spanned by the shared points. Nodes
/// of m1 are renamed `left:<id>`; nodes of m2 outside the shared part are
/// renamed `right:<id>` and those inside become labels of their image.
///
/// Throws NotIsometric when two shared points are at different distances on
/// the two sides. Pair indices are 1-based; 0 stands for the basepoint.
Amalgam amalgamate(const Tree& m1, const Tree& m2, const SharedPoints& shared, const Rat& r);

/// All trees glued at their basepoints into one node `p`. Vertices of tree i
/// are renamed `t<i>:<id>`.
Tree star_amalgam(const std::vector<Tree>& trees, const Rat& r);

}  // namespace rtree
