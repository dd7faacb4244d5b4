#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtree/evaluate.hpp"
#include "rtree/geometry.hpp"
#include "rtree/matrix.hpp"
#include "rtree/tree.hpp"

namespace rtree {

/// The data determining the type of b_1..b_n over a finite set A: the
/// closest points e_i of the spanned subtree E_A, the distances s_i to it,
/// and the pairwise distances ρ_ij. Closest points are points of
/// context.ambient().
struct TypeDescriptor {
  SpannedSubtree context;
  std::vector<PointRef> closest;
  std::vector<Rat> offsets;
  std::vector<std::vector<Rat>> pairwise;
  Rat radius;

  std::size_t arity() const { return closest.size(); }
};

TypeDescriptor type_of(const Tree& t, std::span<const PointRef> a, std::span<const PointRef> b, const Rat& r);

struct DescriptorCheck {
  enum class Kind { Ok, Shape, OutsideContext, OffsetBound, Asymmetric, Triangle, FourPoint };
  Kind kind = Kind::Ok;
  std::string detail;
  /// Indices into the combined matrix `e1..en x1..xn` for metric failures.
  std::optional<FourPointWitness> witness;

  explicit operator bool() const { return kind == Kind::Ok; }
};

std::string_view to_string(DescriptorCheck::Kind k);

/// Symbols e1..en, x1..xn with d(x_i,e_j) = d(e_i,e_j) + s_i and d(x_i,x_j) = ρ_ij.
MetricMatrix combined_matrix(const TypeDescriptor& q);

DescriptorCheck validate_descriptor(const TypeDescriptor& q);

/// Same spanned subtree: the same point set of one ambient tree, or
/// identical standalone context trees.
bool same_context(const TypeDescriptor& q1, const TypeDescriptor& q2);

/// Throws ContextMismatch if the contexts differ.
bool types_equal(const TypeDescriptor& q1, const TypeDescriptor& q2);

struct Realization {
  Tree tree;
  /// Embedding of the input tree.
  PointMap base;
  std::vector<PointRef> points;
};

/// Extends `t` (the context's ambient tree) by fresh branches carrying a
/// tuple of type q. Throws InconsistentDescriptor if q is invalid.
Realization realize_type(const Tree& t, const TypeDescriptor& q);

/// Distance between 1-types over the same context.
Rat one_type_distance(const TypeDescriptor& q1, const TypeDescriptor& q2);

/// inf over joint realizations of max_i d(a_i, b_i), searched over the
/// placements of b̄ against a fixed realization of q1: each b_i leaves the
/// tree spanned by the context and ā at a candidate point whose projection
/// on the context is e_i. Candidates are vertices, points spaced at most
/// `mesh`, and points at the branching heights of either tuple. The mesh is
/// coarsened when the number of placements exceeds `budget`.
CertifiedValue type_distance_search(const TypeDescriptor& q1, const TypeDescriptor& q2, const Rat& mesh,
                                    std::size_t budget = 2'000'000);

/// Over the context {p}: with j maximizing s_j, s_j = s_i + ρ_ij for all i.
bool is_principal(const TypeDescriptor& q);

/// dcl(A) = acl(A) is the subtree spanned by A and p.
SpannedSubtree dcl_acl(const Tree& t, std::span<const PointRef> a);

/// The descriptor of the image tuple under an isometric embedding.
TypeDescriptor pushforward(const TypeDescriptor& q, const PointMap& f);

/// Text form: `context <tree-file>`, then `closest <i> <point>`,
/// `offset <i> <rat>` and `pair <i> <j> <rat>` lines with 1-based indices.
/// A point is a named point of the tree file, a node id, or
/// `edge <u> <v> <offset>`. The context is the whole tree.
TypeDescriptor parse_descriptor_text(std::string_view text, const std::string& base_dir = ".");
TypeDescriptor read_descriptor_file(const std::string& path);
std::string write_descriptor(const TypeDescriptor& q, const std::string& context_path);

}  // namespace rtree
