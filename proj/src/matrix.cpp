#include "rtree/matrix.hpp"

#include <algorithm>

#include "rtree/error.hpp"

namespace rtree {

MetricMatrix MetricMatrix::zeros(std::vector<std::string> labels) {
  MetricMatrix m;
  const std::size_t n = labels.size();
  m.labels = std::move(labels);
  m.entries.assign(n, std::vector<Rat>(n));
  return m;
}

void MetricMatrix::set(std::size_t i, std::size_t j, const Rat& d) {
  entries.at(i).at(j) = d;
  entries.at(j).at(i) = d;
}

void MetricMatrix::check() const {
  const std::size_t n = labels.size();
  if (entries.size() != n) throw Error("matrix has " + std::to_string(entries.size()) + " rows, expected " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (entries[i].size() != n) throw Error("matrix row " + labels[i] + " has the wrong length");
    if (!entries[i][i].is_zero()) throw Error("nonzero diagonal entry at " + labels[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (entries[i][j] != entries[j][i]) throw Error("matrix is not symmetric at " + labels[i] + "," + labels[j]);
      if (entries[i][j].sign() < 0) throw Error("negative distance at " + labels[i] + "," + labels[j]);
    }
  }
}

std::size_t MetricMatrix::index(const std::string& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw Error("unknown label '" + label + "'");
  return static_cast<std::size_t>(it - labels.begin());
}

bool operator==(const MetricMatrix& a, const MetricMatrix& b) {
  return a.labels == b.labels && a.entries == b.entries;
}

}  // namespace rtree
