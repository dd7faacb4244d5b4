#pragma once

#include "rtree/tree.hpp"

namespace rtree {

/// ψ(x) = inf over y1,y2,y3 of max{ |d(x,y_i) − (r − d(p,x))|, d(x,y_i) + d(x,y_j) − d(y_i,y_j) }.
/// Exact. Requires d(p,x) ≤ r.
Rat psi_at(const Tree& t, const PointRef& x, const Rat& r);

struct Deficiency {
  Rat value;
  PointRef where;
};

/// φ = sup_x ψ(x) over the whole tree, exact, with a point attaining it.
/// Throws RadiusExceeded if the tree does not fit in radius r.
Deficiency rb_deficiency_at(const Tree& t, const Rat& r);
inline Rat rb_deficiency(const Tree& t, const Rat& r) { return rb_deficiency_at(t, r).value; }

namespace kernels {
namespace serial {
Deficiency rb_deficiency(const Tree& t, const Rat& r);
}
namespace parallel {
Deficiency rb_deficiency(const Tree& t, const Rat& r);
}
}  // namespace kernels

}  // namespace rtree
