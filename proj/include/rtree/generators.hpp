#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "rtree/tree.hpp"

namespace rtree {

/// Adds fresh edges reaching the sphere of radius r so that every vertex of
/// `t` and every point at a depth that is a multiple of r/2^depth (below r)
/// has at least three branches. Levels are processed top down, so edges
/// added at one level are enriched at the levels below it.
/// Throws GenerationLimit when the result would exceed `max_nodes`.
Tree rb_extend(const Tree& t, const Rat& r, unsigned depth, std::size_t max_nodes = 2'000'000);

struct GeneratorConfig {
  std::uint64_t seed = 0;
  unsigned depth = 2;
  Rat mesh{1};
  std::set<int> degree_set{3};
  Rat radius{1};
};

/// Truncation of the construction of a tree whose branch points have
/// degrees in the configured set: start from the line through p cut at
/// ±radius; in round j (j < depth) add k_j − 2 edges to the sphere at every
/// point whose depth is an odd multiple of mesh/2^(j+1). The sequence k_j
/// cycles through the degree set in a seed-dependent order.
Tree degree_family_tree(const GeneratorConfig& cfg, std::size_t max_nodes = 2'000'000);

/// The multiset of degrees of vertices with degree at least 3, sorted.
std::vector<std::size_t> branch_degrees(const Tree& t);

/// f : (−∞, rho) → {0, …, μ−2}, equal to 0 before breakpoints[0] and to
/// values[i] on [breakpoints[i], breakpoints[i+1]).
struct StepFunction {
  std::vector<Rat> breakpoints;
  std::vector<int> values;
  Rat rho;

  static StepFunction zero(const Rat& rho) { return {{}, {}, rho}; }
  /// Value at t < rho.
  int at(const Rat& t) const;
  /// Strictly increasing breakpoints below rho, adjacent values different,
  /// first value non-zero.
  bool canonical() const;
  std::string str() const;
  friend bool operator==(const StepFunction&, const StepFunction&) = default;
};

/// sup{t | f = g on (−∞, t)}, at most min(ρ_f, ρ_g).
Rat au_agreement(const StepFunction& f, const StepFunction& g);
/// (ρ_f − s) + (ρ_g − s) with s the agreement bound.
Rat au_distance(const StepFunction& f, const StepFunction& g);

struct UniversalSample {
  /// functions[0] is the basepoint, the zero function with ρ = 0.
  std::vector<StepFunction> functions;
  /// Realization of the distance matrix; function i carries label `f<i>`.
  Tree tree;
};

/// `count` functions (the basepoint included) within `radius` of the
/// basepoint, with symbols below mu − 1. Requires mu ≥ 3.
UniversalSample au_sample_ball(unsigned mu, std::size_t count, const Rat& radius, std::uint64_t seed);

namespace primitives {

/// p–q of length len.
Tree segment(const Rat& len, const Rat& r);
/// Leaves p (the basepoint), a and b joined at y by legs of the given lengths.
Tree tripod(const Rat& to_p, const Rat& to_a, const Rat& to_b, const Rat& r);
/// k legs l1..lk of length len at the basepoint.
Tree k_star(std::size_t k, const Rat& len, const Rat& r);
/// A spine p = s0, s1, …, sn of edges `spine`, with a leg `leg` at each
/// interior spine vertex.
Tree caterpillar(std::size_t n, const Rat& spine, const Rat& leg, const Rat& r);

}  // namespace primitives

}  // namespace rtree
