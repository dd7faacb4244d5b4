#pragma once

#include <optional>

#include "rtree/matrix.hpp"

// Quadruple scans over a metric matrix. The serial versions are the
// reference; the parallel versions must return identical results.
namespace rtree::kernels {

namespace serial {
/// Lexicographically first violating ordered quadruple, if any.
std::optional<FourPointWitness> four_point(const MetricMatrix& m);
Rat delta(const MetricMatrix& m);
}  // namespace serial

namespace parallel {
std::optional<FourPointWitness> four_point(const MetricMatrix& m);
Rat delta(const MetricMatrix& m);
}  // namespace parallel

}  // namespace rtree::kernels
