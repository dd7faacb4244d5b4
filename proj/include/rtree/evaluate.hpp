#pragma once

#include <map>
#include <string>

#include "rtree/formula.hpp"
#include "rtree/tree.hpp"

namespace rtree {

using Valuation = std::map<std::string, PointRef>;

/// [lower, upper] enclosing the true value; lower == upper when exact.
struct CertifiedValue {
  Rat lower;
  Rat upper;
  Rat mesh;

  static CertifiedValue exact(const Rat& v) { return {v, v, Rat(0)}; }
  bool is_exact() const { return lower == upper; }
  std::string str() const;
};

/// Quantifier-free formulas only. `named` holds the tree's named points and
/// is consulted after the valuation.
Rat eval_qf(const Tree& t, const Formula& f, const Valuation& v, const Valuation& named = {});

/// A quantifier whose body is quantifier-free is optimized exactly along
/// every edge. Nested quantifiers are enumerated over a grid of spacing at
/// most `mesh` with a Lipschitz error bound. The named axioms (midpoint,
/// hyperbolicity, ψ and φ) are recognized up to renaming of bound variables
/// and evaluated exactly.
CertifiedValue eval_quantified(const Tree& t, const Formula& f, const Valuation& v, const Rat& mesh,
                               const Valuation& named = {});

struct AxiomReport {
  Rat radius;
  CertifiedValue bound;        // sup_x d(x,p), compared with r
  CertifiedValue midpoint;     // should be 0
  CertifiedValue hyperbolic;   // should be 0
  bool bound_ok() const { return bound.upper <= radius; }
  bool ok() const { return bound_ok() && midpoint.upper.is_zero() && hyperbolic.upper.is_zero(); }
  /// `axiom1=2≤2 axiom2=0 axiom3=0`
  std::string str() const;
};

AxiomReport check_rt_axioms(const Tree& t, const Rat& r, const Rat& mesh);

/// Largest midpoint-axiom body value over pairs of the given points, taking
/// z = the midpoint of [x,y].
Rat midpoint_defect(const Tree& t, const std::vector<PointRef>& points);
/// δ of the finite metric on the vertices plus grid points (at most `cap`
/// points; the spacing is coarsened to fit).
Rat hyperbolicity_defect(const Tree& t, const Rat& mesh, std::size_t cap = 96);

}  // namespace rtree
