#include "rtree/realization.hpp"

#include <set>

#include "rtree/kernels.hpp"

namespace rtree {

FourPointViolation::FourPointViolation(const MetricMatrix& m, FourPointWitness w)
    : Error("four-point condition fails at (" + m.labels[w.x] + "," + m.labels[w.y] + "," + m.labels[w.z] + "," +
            m.labels[w.t] + "): " + w.lhs.str() + " > " + w.rhs.str()),
      witness_(std::move(w)) {}

std::optional<FourPointWitness> four_point_check(const MetricMatrix& m) {
  m.check();
  return kernels::parallel::four_point(m);
}

Rat delta_hyperbolicity(const MetricMatrix& m) {
  m.check();
  return kernels::parallel::delta(m);
}

std::optional<std::array<std::size_t, 3>> triangle_violation(const MetricMatrix& m) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (m(i, k) > m(i, j) + m(j, k)) return std::array<std::size_t, 3>{i, j, k};
  return std::nullopt;
}

RealizedTree realize(const MetricMatrix& m, const std::string& basepoint_label) {
  if (auto w = four_point_check(m)) throw FourPointViolation(m, *w);
  const std::size_t b = m.index(basepoint_label);
  const std::size_t n = m.size();

  // Working tree rooted at the basepoint label; node 0 is the root.
  std::vector<std::size_t> parent{0};
  std::vector<Rat> depth{Rat(0)};
  std::vector<std::vector<std::size_t>> labels_at{{b}};
  std::vector<std::size_t> node_of(n, 0);
  std::vector<std::size_t> inserted{b};

  for (std::size_t x = 0; x < n; ++x) {
    if (x == b) continue;
    // The attach point lies on [b, j*] at distance (j*·x)_b from b.
    std::size_t best_j = b;
    Rat best_g;
    for (std::size_t j : inserted) {
      Rat g = (m(b, j) + m(b, x) - m(j, x)) / 2;
      if (g > best_g) {
        best_g = std::move(g);
        best_j = j;
      }
    }
    std::size_t at = node_of[best_j];
    while (at != 0 && depth[parent[at]] >= best_g) at = parent[at];
    if (depth[at] != best_g) {
      // Split the edge above `at`.
      const std::size_t mid = parent.size();
      parent.push_back(parent[at]);
      depth.push_back(best_g);
      labels_at.emplace_back();
      parent[at] = mid;
      at = mid;
    }
    const Rat hang = m(b, x) - best_g;
    if (hang.is_zero()) {
      labels_at[at].push_back(x);
      node_of[x] = at;
    } else {
      node_of[x] = parent.size();
      parent.push_back(at);
      depth.push_back(m(b, x));
      labels_at.push_back({x});
    }
    inserted.push_back(x);
  }

  std::set<std::string> taken(m.labels.begin(), m.labels.end());
  std::size_t next = 0;
  RawTree raw;
  std::vector<std::string> ids(parent.size());
  for (std::size_t k = 0; k < parent.size(); ++k) {
    if (labels_at[k].empty()) {
      std::string id;
      do id = "steiner" + std::to_string(next++);
      while (taken.count(id));
      ids[k] = id;
    } else {
      ids[k] = m.labels[labels_at[k][0]];
      for (std::size_t l : labels_at[k]) raw.labels[ids[k]].push_back(m.labels[l]);
    }
    raw.nodes.push_back(ids[k]);
  }
  raw.basepoint = ids[0];
  for (std::size_t k = 1; k < parent.size(); ++k) raw.edges.push_back({ids[parent[k]], ids[k], depth[k] - depth[parent[k]]});

  Tree t = Tree::build(raw).canonical().tree;
  RealizedTree out{t, {}};
  for (std::size_t x = 0; x < n; ++x) out.points.push_back(PointRef::vertex(t.node(ids[node_of[x]])));
  return out;
}

MetricMatrix tree_to_matrix(const Tree& t, std::span<const PointRef> points, std::vector<std::string> labels) {
  if (labels.empty())
    for (const auto& x : points) labels.push_back(t.describe(x));
  if (labels.size() != points.size()) throw Error("one label per point is required");
  MetricMatrix m = MetricMatrix::zeros(std::move(labels));
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) m.set(i, j, t.distance(points[i], points[j]));
  return m;
}

}  // namespace rtree
