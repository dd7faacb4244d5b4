#include "rtree/evaluate.hpp"

#include <algorithm>
#include <functional>
#include <optional>

#include <omp.h>

#include "rtree/deficiency.hpp"
#include "rtree/error.hpp"
#include "rtree/geometry.hpp"
#include "rtree/realization.hpp"

namespace rtree {

std::string CertifiedValue::str() const {
  if (is_exact()) return lower.str();
  return "[" + lower.str() + "," + upper.str() + "]";
}

std::string AxiomReport::str() const {
  return "axiom1=" + bound.str() + (bound_ok() ? "≤" : ">") + radius.str() + " axiom2=" + midpoint.str() +
         " axiom3=" + hyperbolic.str();
}

namespace {

using Kind = FormulaNode::Kind;

struct Interval {
  Rat lo;
  Rat hi;
};

Interval abs_of(const Rat& lo, const Rat& hi) {
  if (lo.sign() >= 0) return {lo, hi};
  if (hi.sign() <= 0) return {-hi, -lo};
  return {Rat(0), max(-lo, hi)};
}

// Piecewise linear function on [0, L], given by its values at sorted breakpoints.
struct Pl {
  std::vector<Rat> ts;
  std::vector<Rat> vs;

  Rat at(const Rat& t) const {
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - ts.begin());
    if (k < ts.size() && ts[k] == t) return vs[k];
    const Rat &t0 = ts[k - 1], &t1 = ts[k];
    return vs[k - 1] + (vs[k] - vs[k - 1]) * (t - t0) / (t1 - t0);
  }
};

Pl constant_pl(const Rat& L, const Rat& v) {
  if (L.is_zero()) return {{Rat(0)}, {v}};
  return {{Rat(0), L}, {v, v}};
}

// Pointwise op(f, g) where op is linear wherever f − g keeps its sign.
Pl combine(const Pl& f, const Pl& g, const std::function<Rat(const Rat&, const Rat&)>& op, bool split_on_sign) {
  std::vector<Rat> ts;
  std::merge(f.ts.begin(), f.ts.end(), g.ts.begin(), g.ts.end(), std::back_inserter(ts));
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::vector<Rat> all;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (split_on_sign && i > 0) {
      const Rat d0 = f.at(ts[i - 1]) - g.at(ts[i - 1]);
      const Rat d1 = f.at(ts[i]) - g.at(ts[i]);
      if (d0.sign() * d1.sign() < 0) all.push_back(ts[i - 1] + (ts[i] - ts[i - 1]) * d0 / (d0 - d1));
    }
    all.push_back(ts[i]);
  }
  Pl out;
  out.ts = std::move(all);
  for (const auto& t : out.ts) out.vs.push_back(op(f.at(t), g.at(t)));
  return out;
}

class Evaluator {
 public:
  Evaluator(const Tree& t, const Valuation& v, const Valuation& named, Rat mesh)
      : t_(t), val_(v), named_(named), mesh_(std::move(mesh)) {}

  PointRef resolve(const std::string& name) const {
    for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
      if (it->first == name) return it->second;
    if (name == "p") return t_.basepoint_ref();
    if (auto it = val_.find(name); it != val_.end()) return t_.normalize(it->second);
    if (auto it = named_.find(name); it != named_.end()) return t_.normalize(it->second);
    if (auto n = t_.find(name)) return PointRef::vertex(*n);
    throw Error("unbound name '" + name + "'");
  }

  Interval eval(const FormulaNode& n) {
    switch (n.kind) {
      case Kind::Dist: {
        Rat d = t_.distance(resolve(n.left), resolve(n.right));
        return {d, d};
      }
      case Kind::Const: return {n.value, n.value};
      case Kind::Add: {
        const Interval a = eval(*n.kids[0]), b = eval(*n.kids[1]);
        return {a.lo + b.lo, a.hi + b.hi};
      }
      case Kind::Monus: {
        const Interval a = eval(*n.kids[0]), b = eval(*n.kids[1]);
        return {monus(a.lo, b.hi), monus(a.hi, b.lo)};
      }
      case Kind::Max: {
        const Interval a = eval(*n.kids[0]), b = eval(*n.kids[1]);
        return {max(a.lo, b.lo), max(a.hi, b.hi)};
      }
      case Kind::Min: {
        const Interval a = eval(*n.kids[0]), b = eval(*n.kids[1]);
        return {min(a.lo, b.lo), min(a.hi, b.hi)};
      }
      case Kind::AbsDiff: {
        const Interval a = eval(*n.kids[0]), b = eval(*n.kids[1]);
        return abs_of(a.lo - b.hi, a.hi - b.lo);
      }
      case Kind::Scale: {
        const Interval a = eval(*n.kids[0]);
        if (n.value.sign() >= 0) return {n.value * a.lo, n.value * a.hi};
        return {n.value * a.hi, n.value * a.lo};
      }
      case Kind::Inf:
      case Kind::Sup: return quantifier(n);
    }
    throw Error("bad formula node");
  }

 private:
  static bool qf(const FormulaNode& n) {
    if (n.is_quantifier()) return false;
    return std::all_of(n.kids.begin(), n.kids.end(), [](const FormulaPtr& k) { return qf(*k); });
  }

  Interval quantifier(const FormulaNode& n) {
    const bool sup = n.kind == Kind::Sup;
    const FormulaNode& body = *n.kids[0];
    if (qf(body)) {
      const Rat v = exact_optimum(n.left, body, sup);
      return {v, v};
    }
    const auto cands = candidates();
    std::vector<Interval> vals(cands.size());
    const auto count = static_cast<std::int64_t>(cands.size());
    std::optional<Error> failure;
#pragma omp parallel for schedule(dynamic) if (!omp_in_parallel() && count > 8)
    for (std::int64_t k = 0; k < count; ++k) {
      Evaluator inner(*this);
      inner.bound_.emplace_back(n.left, cands[k]);
      try {
        vals[k] = inner.eval(body);
      } catch (const Error& e) {
#pragma omp critical
        failure = e;
      }
    }
    if (failure) throw *failure;
    Interval best = vals[0];
    for (const auto& v : vals) {
      best.lo = sup ? max(best.lo, v.lo) : min(best.lo, v.lo);
      best.hi = sup ? max(best.hi, v.hi) : min(best.hi, v.hi);
    }
    const Rat slack = lipschitz(body, n.left) * mesh_;
    if (sup) best.hi += slack;
    else best.lo -= slack;
    return best;
  }

  // Vertices, points at most `mesh` apart on every edge, and projections of
  // every point in scope onto every edge.
  std::vector<PointRef> candidates() const {
    std::vector<PointRef> out;
    for (NodeIndex v = 0; v < t_.node_count(); ++v) out.push_back(PointRef::vertex(v));
    std::vector<PointRef> fixed;
    for (const auto& [name, x] : bound_) fixed.push_back(x);
    for (const auto& [name, x] : val_) fixed.push_back(t_.normalize(x));
    for (const auto& [name, x] : named_) fixed.push_back(t_.normalize(x));
    for (EdgeIndex e = 0; e < t_.edge_count(); ++e) {
      const Edge& ed = t_.edge(e);
      std::vector<Rat> offs;
      const mpz_class pieces = ceil(ed.length / mesh_);
      const long k = pieces.get_si();
      for (long i = 1; i < k; ++i) offs.push_back(ed.length * Rat(i, k));
      for (const auto& q : fixed) {
        const Rat du = t_.distance(q, PointRef::vertex(ed.u)), dv = t_.distance(q, PointRef::vertex(ed.v));
        const Rat tq = (du - dv + ed.length) / 2;
        if (tq.sign() > 0 && tq < ed.length) offs.push_back(tq);
      }
      std::sort(offs.begin(), offs.end());
      offs.erase(std::unique(offs.begin(), offs.end()), offs.end());
      for (const auto& o : offs) out.push_back(PointRef::on_edge(e, o));
    }
    return out;
  }

  // Body as a function of the quantified variable along edge e.
  Pl along(const FormulaNode& n, const std::string& var, EdgeIndex e) {
    const Edge& ed = t_.edge(e);
    const Rat& L = ed.length;
    switch (n.kind) {
      case Kind::Dist: {
        const bool l = n.left == var, r = n.right == var;
        if (l && r) return constant_pl(L, Rat(0));
        if (!l && !r) return constant_pl(L, eval(n).lo);
        const PointRef q = resolve(l ? n.right : n.left);
        const Rat du = t_.distance(q, PointRef::vertex(ed.u)), dv = t_.distance(q, PointRef::vertex(ed.v));
        const Rat tq = (du - dv + L) / 2, c = (du + dv - L) / 2;
        Pl f;
        f.ts.push_back(Rat(0));
        f.vs.push_back(du);
        if (tq.sign() > 0 && tq < L) {
          f.ts.push_back(tq);
          f.vs.push_back(c);
        }
        f.ts.push_back(L);
        f.vs.push_back(dv);
        return f;
      }
      case Kind::Const: return constant_pl(L, n.value);
      case Kind::Add:
        return combine(along(*n.kids[0], var, e), along(*n.kids[1], var, e),
                       [](const Rat& a, const Rat& b) { return a + b; }, false);
      case Kind::Monus:
        return combine(along(*n.kids[0], var, e), along(*n.kids[1], var, e),
                       [](const Rat& a, const Rat& b) { return monus(a, b); }, true);
      case Kind::Max:
        return combine(along(*n.kids[0], var, e), along(*n.kids[1], var, e),
                       [](const Rat& a, const Rat& b) { return max(a, b); }, true);
      case Kind::Min:
        return combine(along(*n.kids[0], var, e), along(*n.kids[1], var, e),
                       [](const Rat& a, const Rat& b) { return min(a, b); }, true);
      case Kind::AbsDiff:
        return combine(along(*n.kids[0], var, e), along(*n.kids[1], var, e),
                       [](const Rat& a, const Rat& b) { return (a - b).abs(); }, true);
      case Kind::Scale: {
        Pl f = along(*n.kids[0], var, e);
        for (auto& v : f.vs) v *= n.value;
        return f;
      }
      default: throw Error("quantifier inside a quantifier-free body");
    }
  }

  Rat exact_optimum(const std::string& var, const FormulaNode& body, bool sup) {
    std::optional<Rat> best;
    auto take = [&](const Rat& v) {
      if (!best || (sup ? v > *best : v < *best)) best = v;
    };
    bound_.emplace_back(var, t_.basepoint_ref());
    for (NodeIndex v = 0; v < t_.node_count(); ++v) {
      bound_.back().second = PointRef::vertex(v);
      take(eval(body).lo);
    }
    bound_.pop_back();
    for (EdgeIndex e = 0; e < t_.edge_count(); ++e)
      for (const auto& v : along(body, var, e).vs) take(v);
    return *best;
  }

  const Tree& t_;
  const Valuation& val_;
  const Valuation& named_;
  Rat mesh_;
  std::vector<std::pair<std::string, PointRef>> bound_;
};

std::optional<Rat> first_constant(const FormulaNode& n) {
  if (n.kind == Kind::Const) return n.value;
  for (const auto& k : n.kids)
    if (auto c = first_constant(*k)) return c;
  return std::nullopt;
}

// Points used for the constructive and finite checks of the axioms.
std::vector<PointRef> axiom_points(const Tree& t, const Rat& mesh, std::size_t cap) {
  std::vector<PointRef> out;
  for (NodeIndex v = 0; v < t.node_count(); ++v) out.push_back(PointRef::vertex(v));
  if (t.edge_count() == 0 || out.size() >= cap) return out;
  Rat step = mesh;
  while (true) {
    std::vector<PointRef> extra;
    bool fits = true;
    for (EdgeIndex e = 0; e < t.edge_count() && fits; ++e) {
      for (Rat off = step; off < t.edge(e).length; off += step) {
        extra.push_back(PointRef::on_edge(e, off));
        if (out.size() + extra.size() > cap) {
          fits = false;
          break;
        }
      }
    }
    if (fits) {
      out.insert(out.end(), extra.begin(), extra.end());
      return out;
    }
    step *= 2;
  }
}

}  // namespace

Rat eval_qf(const Tree& t, const Formula& f, const Valuation& v, const Valuation& named) {
  if (!f.quantifier_free()) throw Error("formula has quantifiers; use eval_quantified");
  Evaluator ev(t, v, named, Rat(1));
  return ev.eval(f.root()).lo;
}

Rat midpoint_defect(const Tree& t, const std::vector<PointRef>& points) {
  Rat worst;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i; j < points.size(); ++j) {
      const PointRef z = interpolate(t, points[i], points[j], Rat(1, 2));
      const Rat half = t.distance(points[i], points[j]) / 2;
      worst = max(worst, max((t.distance(points[i], z) - half).abs(), (t.distance(points[j], z) - half).abs()));
    }
  return worst;
}

Rat hyperbolicity_defect(const Tree& t, const Rat& mesh, std::size_t cap) {
  const auto pts = axiom_points(t, mesh, cap);
  return delta_hyperbolicity(tree_to_matrix(t, pts));
}

CertifiedValue eval_quantified(const Tree& t, const Formula& f, const Valuation& v, const Rat& mesh,
                               const Valuation& named) {
  if (mesh.sign() <= 0) throw Error("mesh must be positive");
  const FormulaNode& root = f.root();
  if (alpha_equal(root, midpoint_axiom().root()))
    return CertifiedValue::exact(midpoint_defect(t, axiom_points(t, mesh, 96)));
  if (alpha_equal(root, hyperbolicity_axiom().root())) return CertifiedValue::exact(hyperbolicity_defect(t, mesh));
  if (auto r = first_constant(root)) {
    if (alpha_equal(root, phi_formula(*r).root())) return CertifiedValue::exact(rb_deficiency(t, *r));
    for (const auto& name : f.free_names()) {
      if (!alpha_equal(root, psi_formula(*r, name).root())) continue;
      Evaluator ev(t, v, named, mesh);
      return CertifiedValue::exact(psi_at(t, ev.resolve(name), *r));
    }
  }
  Evaluator ev(t, v, named, mesh);
  const Interval i = ev.eval(root);
  return {i.lo, i.hi, i.lo == i.hi ? Rat(0) : mesh};
}

AxiomReport check_rt_axioms(const Tree& t, const Rat& r, const Rat& mesh) {
  AxiomReport rep;
  rep.radius = r;
  rep.bound = CertifiedValue::exact(t.max_depth());
  rep.midpoint = CertifiedValue::exact(midpoint_defect(t, axiom_points(t, mesh, 48)));
  rep.hyperbolic = CertifiedValue::exact(hyperbolicity_defect(t, mesh));
  return rep;
}

}  // namespace rtree
