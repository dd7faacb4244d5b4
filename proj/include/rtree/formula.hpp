#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rtree/rational.hpp"

namespace rtree {

struct FormulaNode;
using FormulaPtr = std::shared_ptr<const FormulaNode>;

struct FormulaNode {
  enum class Kind { Dist, Const, Add, Monus, Max, Min, AbsDiff, Scale, Inf, Sup };
  Kind kind;
  // Dist: the two point names. Inf/Sup: the bound variable in `left`.
  std::string left;
  std::string right;
  // Const value, or the Scale factor.
  Rat value;
  std::vector<FormulaPtr> kids;
  std::size_t line = 0;
  std::size_t column = 0;

  bool is_quantifier() const { return kind == Kind::Inf || kind == Kind::Sup; }
};

/// A parsed formula. Names that are not bound by a quantifier are free; they
/// are resolved at evaluation time (valuation, then named points, then node
/// ids; `p` is always the basepoint).
class Formula {
 public:
  explicit Formula(FormulaPtr root);

  const FormulaNode& root() const { return *root_; }
  const FormulaPtr& ptr() const { return root_; }
  /// Free names other than the basepoint constant `p`.
  const std::set<std::string>& free_names() const { return free_; }
  bool quantifier_free() const;
  std::string str() const;

 private:
  FormulaPtr root_;
  std::set<std::string> free_;
};

Formula parse_formula(std::string_view text);

namespace build {
FormulaPtr dist(std::string a, std::string b);
FormulaPtr constant(Rat v);
FormulaPtr add(FormulaPtr a, FormulaPtr b);
FormulaPtr monus(FormulaPtr a, FormulaPtr b);
FormulaPtr max(FormulaPtr a, FormulaPtr b);
FormulaPtr min(FormulaPtr a, FormulaPtr b);
FormulaPtr absdiff(FormulaPtr a, FormulaPtr b);
FormulaPtr scale(Rat c, FormulaPtr a);
FormulaPtr inf(std::string var, FormulaPtr body);
FormulaPtr sup(std::string var, FormulaPtr body);
}  // namespace build

std::string to_string(const FormulaNode& n);

/// Syntactic Lipschitz bound of `n` in the variable `var`.
Rat lipschitz(const FormulaNode& n, const std::string& var);

/// Equal up to renaming of bound variables.
bool alpha_equal(const FormulaNode& a, const FormulaNode& b);

/// The midpoint axiom: sup x sup y inf z max{|d(x,z) − ½d(x,y)|, |d(y,z) − ½d(x,y)|}.
Formula midpoint_axiom();
/// The hyperbolicity axiom: sup x,y,z,w (min{(x·z)_w, (y·z)_w} ∸ (x·y)_w).
Formula hyperbolicity_axiom();
/// ψ(x) for radius r, with free variable `x`.
Formula psi_formula(const Rat& r, const std::string& x = "x");
/// φ = sup_x ψ(x).
Formula phi_formula(const Rat& r);

}  // namespace rtree
