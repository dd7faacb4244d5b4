#include "rtree/independence.hpp"

#include <algorithm>

#include "rtree/error.hpp"

namespace rtree {

IndependenceResult is_star_independent(const Tree& t, std::span<const PointRef> a, std::span<const PointRef> b,
                                       std::span<const PointRef> c) {
  std::vector<PointRef> bc(b.begin(), b.end());
  bc.insert(bc.end(), c.begin(), c.end());
  const SpannedSubtree big(t, bc), small(t, std::vector<PointRef>(c.begin(), c.end()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    t.check(a[i]);
    Projection with = project_to_subtree(big, a[i]), without = project_to_subtree(small, a[i]);
    if (with.distance != without.distance)
      return {IndependenceWitness{i, t.normalize(a[i]), std::move(with), std::move(without)}};
  }
  return {};
}

TypeDescriptor extend_nonforking(const Tree& t, const TypeDescriptor& q, std::span<const PointRef> b) {
  if (!t.same_storage(q.context.ambient())) throw ContextMismatch("the descriptor lives in another tree");
  if (const auto chk = validate_descriptor(q); !chk)
    throw InconsistentDescriptor(std::string(to_string(chk.kind)) + ": " + chk.detail);
  std::vector<PointRef> gens = q.context.generators();
  for (const auto& x : b) {
    t.check(x);
    gens.push_back(x);
  }
  TypeDescriptor out{SpannedSubtree(t, gens), q.closest, q.offsets, q.pairwise, q.radius};
  if (!validate_descriptor(out)) throw InconsistentDescriptor("extension of a valid descriptor is invalid");
  return out;
}

TypeDescriptor restrict_type(const TypeDescriptor& q, std::span<const PointRef> a) {
  const Tree& t = q.context.ambient();
  TypeDescriptor out{SpannedSubtree(t, std::vector<PointRef>(a.begin(), a.end())), {}, {}, q.pairwise, q.radius};
  for (const auto& g : out.context.generators())
    if (!q.context.contains(g)) throw ContextMismatch("restriction to a set outside the context");
  for (std::size_t i = 0; i < q.arity(); ++i) {
    const Projection pr = project_to_subtree(out.context, q.closest[i]);
    out.closest.push_back(t.normalize(pr.point));
    out.offsets.push_back(q.offsets[i] + pr.distance);
  }
  return out;
}

bool is_nonforking_extension(const TypeDescriptor& small, const TypeDescriptor& big) {
  const Tree& t = big.context.ambient();
  if (!t.same_storage(small.context.ambient()) ||
      !std::all_of(small.context.generators().begin(), small.context.generators().end(),
                   [&](const PointRef& g) { return big.context.contains(g); }))
    throw ContextMismatch("the smaller context is not inside the larger one");
  if (small.arity() != big.arity()) return false;
  for (std::size_t i = 0; i < big.arity(); ++i)
    if (!small.context.contains(big.closest[i]) || t.normalize(big.closest[i]) != t.normalize(small.closest[i]))
      return false;
  return small.offsets == big.offsets && small.pairwise == big.pairwise;
}

std::vector<PointRef> canonical_base(const TypeDescriptor& q) {
  std::vector<PointRef> out;
  for (const auto& e : q.closest) {
    const PointRef x = q.context.ambient().normalize(e);
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  }
  return out;
}

}  // namespace rtree
