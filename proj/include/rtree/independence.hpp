#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rtree/geometry.hpp"
#include "rtree/types.hpp"

namespace rtree {

struct IndependenceWitness {
  std::size_t index;     // position in A
  PointRef point;
  Projection with_b;     // onto E_{B∪C}
  Projection without_b;  // onto E_C
};

struct IndependenceResult {
  std::optional<IndependenceWitness> witness;
  bool independent() const { return !witness; }
  explicit operator bool() const { return independent(); }
};

/// A ⫫*_C B: every a ∈ A has the same closest point in E_{B∪C} as in E_C.
/// The witness is the first a that fails.
IndependenceResult is_star_independent(const Tree& t, std::span<const PointRef> a, std::span<const PointRef> b,
                                       std::span<const PointRef> c);

/// The type over the context plus B with the same closest points, offsets
/// and distances.
TypeDescriptor extend_nonforking(const Tree& t, const TypeDescriptor& q, std::span<const PointRef> b);

/// The restriction of q to the subtree spanned by `a` (which must lie in
/// q's context): closest points move to their projections and the offsets
/// grow by the distance moved.
TypeDescriptor restrict_type(const TypeDescriptor& q, std::span<const PointRef> a);

/// Throws ContextMismatch unless small's context lies inside big's.
bool is_nonforking_extension(const TypeDescriptor& small, const TypeDescriptor& big);

/// The distinct closest points, in index order.
std::vector<PointRef> canonical_base(const TypeDescriptor& q);

}  // namespace rtree
