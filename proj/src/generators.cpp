#include "rtree/generators.hpp"

#include <algorithm>
#include <random>

#include "rtree/amalgamation.hpp"
#include "rtree/error.hpp"
#include "rtree/realization.hpp"

namespace rtree {

namespace {

// A rooted tree under construction, with every node's depth.
class Grower {
 public:
  Grower(std::string prefix, std::size_t max_nodes) : prefix_(std::move(prefix)), max_nodes_(max_nodes) {}

  explicit Grower(const Tree& t, std::size_t max_nodes) : max_nodes_(max_nodes) {
    prefix_ = "rb";
    for (bool clash = true; clash;) {
      clash = false;
      for (NodeIndex n = 0; n < t.node_count() && !clash; ++n) clash = t.id(n).rfind(prefix_, 0) == 0;
      if (clash) prefix_ += "_";
    }
    // Breadth-first order keeps parents before children.
    std::vector<NodeIndex> index(t.node_count());
    for (NodeIndex n : t.order()) {
      index[n] = static_cast<NodeIndex>(ids_.size());
      ids_.push_back(t.id(n));
      parent_.push_back(t.parent(n) ? index[*t.parent(n)] : index[n]);
      depth_.push_back(t.depth(n));
      children_.push_back(0);
      if (t.parent(n)) ++children_[index[*t.parent(n)]];
      if (t.is_labeled(n)) labels_[t.id(n)] = t.labels(n);
    }
  }

  NodeIndex root(const std::string& id) {
    ids_.push_back(id);
    parent_.push_back(0);
    depth_.push_back(Rat(0));
    children_.push_back(0);
    return 0;
  }

  std::size_t size() const { return ids_.size(); }
  const Rat& depth(NodeIndex v) const { return depth_[v]; }
  std::size_t degree(NodeIndex v) const { return children_[v] + (v == 0 ? 0 : 1); }

  NodeIndex add_child(NodeIndex u, const Rat& depth) {
    if (ids_.size() >= max_nodes_)
      throw GenerationLimit("generator would exceed " + std::to_string(max_nodes_) + " nodes");
    const NodeIndex w = static_cast<NodeIndex>(ids_.size());
    ids_.push_back(prefix_ + std::to_string(next_++));
    parent_.push_back(u);
    depth_.push_back(depth);
    children_.push_back(0);
    ++children_[u];
    return w;
  }

  void add_legs(NodeIndex v, std::size_t count, const Rat& r) {
    for (std::size_t k = 0; k < count; ++k) add_child(v, r);
  }

  // All points at depth D, as nodes (edges crossing D are split).
  std::vector<NodeIndex> level(const Rat& D) {
    std::vector<NodeIndex> out;
    if (D.is_zero()) out.push_back(0);
    const std::size_t n = ids_.size();
    for (NodeIndex v = 1; v < n; ++v) {
      if (depth_[v] == D) {
        out.push_back(v);
      } else if (depth_[parent_[v]] < D && D < depth_[v]) {
        const NodeIndex w = add_child(parent_[v], D);
        --children_[parent_[v]];
        parent_[v] = w;
        ++children_[w];
        out.push_back(w);
      }
    }
    return out;
  }

  Tree build() const {
    RawTree raw;
    raw.nodes = ids_;
    raw.basepoint = ids_[0];
    raw.labels = labels_;
    raw.edges.reserve(ids_.size());
    for (NodeIndex v = 1; v < ids_.size(); ++v)
      raw.edges.push_back({ids_[parent_[v]], ids_[v], depth_[v] - depth_[parent_[v]]});
    return Tree::build(raw);
  }

 private:
  std::string prefix_;
  std::size_t max_nodes_;
  std::size_t next_ = 0;
  std::vector<std::string> ids_;
  std::vector<NodeIndex> parent_;
  std::vector<Rat> depth_;
  std::vector<std::size_t> children_;
  std::map<std::string, std::vector<std::string>> labels_;
};

void check_radius(const Tree& t, const Rat& r) {
  for (NodeIndex n = 0; n < t.node_count(); ++n)
    if (t.depth(n) > r) throw RadiusExceeded(t.id(n), t.depth(n).str(), r.str());
}

}  // namespace

Tree rb_extend(const Tree& t, const Rat& r, unsigned depth, std::size_t max_nodes) {
  if (t.max_depth() > r) throw RadiusExceeded("", t.max_depth().str(), r.str());
  Grower g(t, max_nodes);
  const std::size_t original = g.size();
  for (NodeIndex v = 0; v < original; ++v)
    if (g.depth(v) < r && g.degree(v) < 3) g.add_legs(v, 3 - g.degree(v), r);
  const Rat step = r / Rat(mpz_class(1) << depth);
  for (Rat D(0); D < r; D += step)
    for (NodeIndex v : g.level(D))
      if (g.degree(v) < 3) g.add_legs(v, 3 - g.degree(v), r);
  return g.build();
}

Tree degree_family_tree(const GeneratorConfig& cfg, std::size_t max_nodes) {
  if (cfg.degree_set.empty()) throw Error("degree set is empty");
  if (*cfg.degree_set.begin() < 3) throw Error("degrees must be at least 3");
  if (cfg.mesh.sign() <= 0 || cfg.radius.sign() <= 0) throw Error("mesh and radius must be positive");
  std::vector<int> order(cfg.degree_set.begin(), cfg.degree_set.end());
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(order.begin(), order.end(), rng);

  Grower g("n", max_nodes);
  const NodeIndex p = g.root("p");
  g.add_child(p, cfg.radius);
  g.add_child(p, cfg.radius);
  for (unsigned j = 0; j < cfg.depth; ++j) {
    const int k = order[j % order.size()];
    const Rat delta = cfg.mesh / Rat(mpz_class(1) << (j + 1));
    for (Rat D = delta; D < cfg.radius; D += 2 * delta)
      for (NodeIndex v : g.level(D)) g.add_legs(v, static_cast<std::size_t>(k) - 2, cfg.radius);
  }
  return g.build();
}

std::vector<std::size_t> branch_degrees(const Tree& t) {
  std::vector<std::size_t> out;
  for (NodeIndex n = 0; n < t.node_count(); ++n)
    if (t.degree(n) >= 3) out.push_back(t.degree(n));
  std::sort(out.begin(), out.end());
  return out;
}

int StepFunction::at(const Rat& t) const {
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  return it == breakpoints.begin() ? 0 : values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

bool StepFunction::canonical() const {
  if (breakpoints.size() != values.size()) return false;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (i > 0 && !(breakpoints[i - 1] < breakpoints[i])) return false;
    if (values[i] == (i == 0 ? 0 : values[i - 1]) || values[i] < 0) return false;
  }
  return breakpoints.empty() || breakpoints.back() < rho;
}

std::string StepFunction::str() const {
  std::string out = "0";
  for (std::size_t i = 0; i < breakpoints.size(); ++i)
    out += " [" + breakpoints[i].str() + "]" + std::to_string(values[i]);
  return out + " |" + rho.str();
}

Rat au_agreement(const StepFunction& f, const StepFunction& g) {
  const Rat end = rtree::min(f.rho, g.rho);
  std::vector<Rat> cuts = f.breakpoints;
  cuts.insert(cuts.end(), g.breakpoints.begin(), g.breakpoints.end());
  std::sort(cuts.begin(), cuts.end());
  for (const Rat& t : cuts) {
    if (!(t < end)) break;
    if (f.at(t) != g.at(t)) return t;
  }
  return end;
}

Rat au_distance(const StepFunction& f, const StepFunction& g) {
  const Rat s = au_agreement(f, g);
  return (f.rho - s) + (g.rho - s);
}

UniversalSample au_sample_ball(unsigned mu, std::size_t count, const Rat& radius, std::uint64_t seed) {
  if (mu < 3) throw Error("mu must be at least 3");
  if (count == 0) throw Error("count must be positive");
  if (radius.sign() < 0) throw Error("radius must be non-negative");
  std::mt19937_64 rng(seed);
  auto uniform = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };
  constexpr long grid = 32;
  const Rat unit = radius / Rat(grid);
  const int top = static_cast<int>(mu) - 2;

  UniversalSample out{{StepFunction::zero(Rat(0))}, Tree::point()};
  while (out.functions.size() < count) {
    // Agreement with the basepoint ends at −a; then ρ + 2a ≤ radius.
    const long a = uniform(0, grid / 2);
    const long rho = uniform(-a, grid - 2 * a);
    StepFunction f = StepFunction::zero(unit * Rat(rho));
    if (rho > -a) {
      std::vector<long> cuts{-a};
      for (long k = uniform(0, 2); k > 0; --k)
        if (rho + a > 1) cuts.push_back(uniform(-a + 1, rho - 1));
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      int prev = 0;
      for (long c : cuts) {
        int v = static_cast<int>(uniform(0, top - 1));
        if (v >= prev) ++v;  // any symbol other than the previous one
        f.breakpoints.push_back(unit * Rat(c));
        f.values.push_back(v);
        prev = v;
      }
    }
    out.functions.push_back(std::move(f));
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < count; ++i) labels.push_back("f" + std::to_string(i));
  MetricMatrix m = MetricMatrix::zeros(std::move(labels));
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i + 1; j < count; ++j) m.set(i, j, au_distance(out.functions[i], out.functions[j]));
  out.tree = realize_tree(m, "f0");
  return out;
}

namespace primitives {

namespace {
Tree built(RawTree raw, const Rat& r) {
  for (const auto& e : raw.edges)
    if (e.length.sign() <= 0) throw Error("lengths must be positive");
  Tree t = Tree::build(raw);
  check_radius(t, r);
  return t;
}
}  // namespace

Tree segment(const Rat& len, const Rat& r) {
  return built({{"p", "q"}, {}, {{"p", "q", len}}, "p"}, r);
}

Tree tripod(const Rat& to_p, const Rat& to_a, const Rat& to_b, const Rat& r) {
  return built({{"p", "y", "a", "b"}, {}, {{"p", "y", to_p}, {"y", "a", to_a}, {"y", "b", to_b}}, "p"}, r);
}

Tree k_star(std::size_t k, const Rat& len, const Rat& r) {
  RawTree raw{{"p"}, {}, {}, "p"};
  for (std::size_t i = 1; i <= k; ++i) {
    raw.nodes.push_back("l" + std::to_string(i));
    raw.edges.push_back({"p", raw.nodes.back(), len});
  }
  return built(raw, r);
}

Tree caterpillar(std::size_t n, const Rat& spine, const Rat& leg, const Rat& r) {
  RawTree raw{{"p"}, {}, {}, "p"};
  for (std::size_t i = 1; i <= n; ++i) {
    const std::string prev = i == 1 ? "p" : "s" + std::to_string(i - 1);
    raw.nodes.push_back("s" + std::to_string(i));
    raw.edges.push_back({prev, raw.nodes.back(), spine});
    if (i < n) {
      raw.nodes.push_back("leg" + std::to_string(i));
      raw.edges.push_back({"s" + std::to_string(i), raw.nodes.back(), leg});
    }
  }
  return built(raw, r);
}

}  // namespace primitives

}  // namespace rtree
