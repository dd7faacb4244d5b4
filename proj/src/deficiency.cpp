#include "rtree/deficiency.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>

#include "rtree/error.hpp"

namespace rtree {

namespace {

// c + s·t
struct Lin {
  Rat c;
  Rat s;
  Lin() = default;
  Lin(Rat c_, Rat s_ = Rat(0)) : c(std::move(c_)), s(std::move(s_)) {}  // NOLINT
  Rat at(const Rat& t) const { return c + s * t; }
  friend Lin operator+(const Lin& a, const Lin& b) { return {a.c + b.c, a.s + b.s}; }
  friend Lin operator-(const Lin& a, const Lin& b) { return {a.c - b.c, a.s - b.s}; }
  friend Lin operator*(const Rat& k, const Lin& a) { return {k * a.c, k * a.s}; }
};

// Compares linear forms just to the right of t0 and remembers the first
// later point where any comparison made so far would change.
struct Clock {
  Rat t0;
  std::optional<Rat> horizon;

  int cmp(const Lin& a, const Lin& b) {
    const Lin d = a - b;
    const Rat v = d.at(t0);
    if (!d.s.is_zero()) {
      const Rat cross = -d.c / d.s;
      if (cross > t0 && (!horizon || cross < *horizon)) horizon = cross;
    }
    if (!v.is_zero()) return v.sign();
    return d.s.sign();
  }
  Lin max(const Lin& a, const Lin& b) { return cmp(a, b) >= 0 ? a : b; }
  Lin min(const Lin& a, const Lin& b) { return cmp(a, b) <= 0 ? a : b; }
};

// Reach along each directed edge: the farthest distance from the tail going
// through that edge.
class Reaches {
 public:
  explicit Reaches(const Tree& t) : t_(t), down_(t.node_count()), up_(t.node_count()) {
    const auto order = t.order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const NodeIndex c = *it;
      if (c == t.basepoint()) continue;
      const NodeIndex q = *t.parent(c);
      down_[q] = max(down_[q], t.edge(t.parent_edge(c)).length + down_[c]);
    }
    for (NodeIndex q : order) {
      // Best two child branches at q, plus the branch through q's parent.
      Rat best1(-1), best2(-1);
      NodeIndex arg1 = q;
      for (const auto& inc : t.incident(q)) {
        if (q != t.basepoint() && inc.other == *t.parent(q)) continue;
        const Rat v = t.edge(inc.edge).length + down_[inc.other];
        if (v > best1) {
          best2 = best1;
          best1 = v;
          arg1 = inc.other;
        } else if (v > best2) {
          best2 = v;
        }
      }
      const Rat above = q == t.basepoint() ? Rat(0) : up_[q];
      for (const auto& inc : t.incident(q)) {
        if (q != t.basepoint() && inc.other == *t.parent(q)) continue;
        const Rat sib = inc.other == arg1 ? best2 : best1;
        up_[inc.other] = t.edge(inc.edge).length + max(above, max(sib, Rat(0)));
      }
    }
  }

  // Reach leaving `from` along edge e.
  Rat dir(EdgeIndex e, NodeIndex from) const {
    const Edge& ed = t_.edge(e);
    const NodeIndex other = ed.u == from ? ed.v : ed.u;
    if (other != t_.basepoint() && *t_.parent(other) == from) return ed.length + down_[other];
    return up_[from];
  }

  // Farthest reach from v, not using edge `skip`.
  Rat far(NodeIndex v, std::optional<EdgeIndex> skip) const {
    Rat m;
    for (const auto& inc : t_.incident(v))
      if (!skip || inc.edge != *skip) m = max(m, dir(inc.edge, v));
    return m;
  }

 private:
  const Tree& t_;
  std::vector<Rat> down_;
  std::vector<Rat> up_;
};

// Vertices reachable from `root` without crossing `skip`, within distance
// `bound`, in order of distance.
struct Side {
  struct Item {
    Rat dist;
    NodeIndex node;
    std::optional<EdgeIndex> via;
  };
  std::vector<Item> items;
  Lin offset;

  Side(const Tree& t, NodeIndex root, std::optional<EdgeIndex> skip, const Rat& bound, Lin off)
      : offset(std::move(off)) {
    std::deque<Item> queue{{Rat(0), root, skip}};
    while (!queue.empty()) {
      Item it = std::move(queue.front());
      queue.pop_front();
      for (const auto& inc : t.incident(it.node)) {
        if (it.via && inc.edge == *it.via) continue;
        Rat d = it.dist + t.edge(inc.edge).length;
        if (d <= bound) queue.push_back({std::move(d), inc.other, inc.edge});
      }
      items.push_back(std::move(it));
    }
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.dist < b.dist; });
    if (skip) items.front().via = skip;
  }
};

// Everything needed to evaluate ψ at x, for x fixed or moving along an edge.
struct Situation {
  std::vector<Side> sides;
  std::map<NodeIndex, Lin> initial_exits;
  Lin depth;
  Lin reach;  // farthest distance from x; only used through Clock::max below
  std::optional<Lin> reach2;
};

Lin evaluate(const Tree& t, const Reaches& R, const Situation& s, const Rat& r, Clock& clock) {
  const Lin h = Lin(r) - s.depth;
  const Lin m = s.reach2 ? clock.max(s.reach, *s.reach2) : s.reach;
  Lin best = clock.max(Rat(2, 3) * h, h - m);

  std::map<NodeIndex, Lin> exits = s.initial_exits;
  std::vector<std::size_t> pos(s.sides.size(), 0);
  Lin rho0(0);
  auto dx = [&](std::size_t side) { return s.sides[side].offset + Lin(s.sides[side].items[pos[side]].dist); };

  while (true) {
    std::optional<Lin> next;
    for (std::size_t k = 0; k < s.sides.size(); ++k) {
      if (pos[k] >= s.sides[k].items.size()) continue;
      const Lin d = dx(k);
      if (!next || clock.cmp(d, *next) < 0) next = d;
    }
    if (clock.cmp(Rat(2) * rho0, best) >= 0) break;

    // Third-largest reach among the current exits.
    std::optional<Lin> top[3];
    for (const auto& [far, reach] : exits) {
      Lin v = reach;
      for (auto& slot : top) {
        if (!slot) {
          slot = v;
          break;
        }
        if (clock.cmp(v, *slot) > 0) std::swap(v, *slot);
      }
    }
    if (top[2]) {
      const Lin cand = clock.max(Rat(2) * rho0, h - *top[2]);
      if (!next || clock.cmp(cand, Rat(2) * *next) < 0) {
        best = clock.min(best, cand);
        break;
      }
    }
    if (!next) break;

    for (std::size_t k = 0; k < s.sides.size(); ++k) {
      while (pos[k] < s.sides[k].items.size() && clock.cmp(dx(k), *next) == 0) {
        const auto& item = s.sides[k].items[pos[k]];
        const Lin d = dx(k);
        exits.erase(item.node);
        for (const auto& inc : t.incident(item.node)) {
          if (item.via && inc.edge == *item.via) continue;
          exits[inc.other] = d + Lin(R.dir(inc.edge, item.node));
        }
        ++pos[k];
      }
    }
    rho0 = *next;
  }
  return best;
}

Rat bound_for(const Rat& r, const Rat& min_depth) { return (r - min_depth) / 3; }

Situation vertex_situation(const Tree& t, const Reaches& R, NodeIndex v, const Rat& r) {
  Situation s;
  s.sides.emplace_back(t, v, std::nullopt, bound_for(r, t.depth(v)), Lin(0));
  s.depth = Lin(t.depth(v));
  s.reach = Lin(R.far(v, std::nullopt));
  return s;
}

// x at distance t from e.u along e.
Situation edge_situation(const Tree& t, const Reaches& R, EdgeIndex e, const Rat& r) {
  const Edge& ed = t.edge(e);
  const Rat& L = ed.length;
  const bool u_above = ed.u == t.basepoint() ? true : (t.parent(ed.v) && *t.parent(ed.v) == ed.u);
  const Rat top = min(t.depth(ed.u), t.depth(ed.v));
  const Rat b = bound_for(r, top);
  Situation s;
  s.sides.emplace_back(t, ed.u, e, b, Lin(0, 1));
  s.sides.emplace_back(t, ed.v, e, b, Lin(L, -1));
  const Rat far_u = R.far(ed.u, e), far_v = R.far(ed.v, e);
  s.initial_exits[ed.u] = Lin(far_u, 1);
  s.initial_exits[ed.v] = Lin(L + far_v, -1);
  s.depth = u_above ? Lin(t.depth(ed.u), 1) : Lin(t.depth(ed.u), -1);
  s.reach = Lin(far_u, 1);
  s.reach2 = Lin(L + far_v, -1);
  return s;
}

void check_radius(const Tree& t, const Rat& r) {
  for (NodeIndex n = 0; n < t.node_count(); ++n)
    if (t.depth(n) > r) throw RadiusExceeded(t.id(n), t.depth(n).str(), r.str());
}

Rat psi_vertex(const Tree& t, const Reaches& R, NodeIndex v, const Rat& r) {
  Clock clock{Rat(0), std::nullopt};
  return evaluate(t, R, vertex_situation(t, R, v, r), r, clock).c;
}

// Largest ψ over the closed edge, scanning its linear pieces.
Deficiency edge_sup(const Tree& t, const Reaches& R, EdgeIndex e, const Rat& r) {
  const Situation s = edge_situation(t, R, e, r);
  const Rat& L = t.edge(e).length;
  Deficiency best{Rat(-1), PointRef::vertex(0)};
  Rat t0;
  while (t0 < L) {
    Clock clock{t0, std::nullopt};
    const Lin f = evaluate(t, R, s, r, clock);
    const Rat t1 = clock.horizon && *clock.horizon < L ? *clock.horizon : L;
    for (const Rat& at : {t0, t1}) {
      const Rat v = f.at(at);
      if (v > best.value) best = {v, t.edge_point(e, at)};
    }
    t0 = t1;
  }
  return best;
}

template <bool Parallel>
Deficiency sweep(const Tree& t, const Rat& r) {
  check_radius(t, r);
  const Reaches R(t);
  const auto nv = static_cast<std::int64_t>(t.node_count());
  const auto ne = static_cast<std::int64_t>(t.edge_count());
  std::vector<Deficiency> per(static_cast<std::size_t>(nv + ne), Deficiency{Rat(-1), PointRef::vertex(0)});
#pragma omp parallel for schedule(dynamic, 16) if (Parallel)
  for (std::int64_t k = 0; k < nv + ne; ++k) {
    if (k < nv) {
      const auto v = static_cast<NodeIndex>(k);
      per[k] = {psi_vertex(t, R, v, r), PointRef::vertex(v)};
    } else {
      per[k] = edge_sup(t, R, static_cast<EdgeIndex>(k - nv), r);
    }
  }
  // Deterministic: first maximum in index order.
  Deficiency best = per[0];
  for (const auto& d : per)
    if (d.value > best.value) best = d;
  return best;
}

}  // namespace

Rat psi_at(const Tree& t, const PointRef& x, const Rat& r) {
  const PointRef y = t.normalize(x);
  if (t.depth(y) > r) throw RadiusExceeded(t.describe(y), t.depth(y).str(), r.str());
  const Reaches R(t);
  if (y.is_vertex()) return psi_vertex(t, R, y.node(), r);
  Clock clock{y.offset(), std::nullopt};
  return evaluate(t, R, edge_situation(t, R, y.edge(), r), r, clock).at(y.offset());
}

namespace kernels {
namespace serial {
Deficiency rb_deficiency(const Tree& t, const Rat& r) { return sweep<false>(t, r); }
}  // namespace serial
namespace parallel {
Deficiency rb_deficiency(const Tree& t, const Rat& r) { return sweep<true>(t, r); }
}  // namespace parallel
}  // namespace kernels

Deficiency rb_deficiency_at(const Tree& t, const Rat& r) { return kernels::parallel::rb_deficiency(t, r); }

}  // namespace rtree
