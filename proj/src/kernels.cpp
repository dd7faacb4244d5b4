#include "rtree/kernels.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <limits>

#include <omp.h>

namespace rtree::kernels {

namespace {

// Entries over a common denominator, when they all fit comfortably in int64.
struct Scaled {
  std::size_t n = 0;
  std::vector<std::int64_t> d;
  mpz_class den{1};
  std::int64_t operator()(std::size_t i, std::size_t j) const { return d[i * n + j]; }
};

std::optional<Scaled> scale(const MetricMatrix& m) {
  Scaled s;
  s.n = m.size();
  for (const auto& row : m.entries)
    for (const auto& v : row) mpz_lcm(s.den.get_mpz_t(), s.den.get_mpz_t(), v.raw().get_den_mpz_t());
  const mpz_class limit = mpz_class(1) << 59;
  s.d.reserve(s.n * s.n);
  for (const auto& row : m.entries) {
    for (const auto& v : row) {
      mpz_class x = v.raw().get_num() * (s.den / v.raw().get_den());
      if (abs(x) > limit) return std::nullopt;
      s.d.push_back(x.get_si());
    }
  }
  return s;
}

struct RatView {
  const MetricMatrix& m;
  const Rat& operator()(std::size_t i, std::size_t j) const { return m.entries[i][j]; }
};

template <class D>
std::optional<std::array<std::size_t, 3>> violation_at(const D& d, std::size_t n, std::size_t x) {
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t z = 0; z < n; ++z)
      for (std::size_t t = 0; t < n; ++t) {
        const auto lhs = d(x, y) + d(z, t);
        const auto a = d(x, z) + d(y, t);
        const auto b = d(y, z) + d(x, t);
        if (lhs > a && lhs > b) return std::array<std::size_t, 3>{y, z, t};
      }
  return std::nullopt;
}

FourPointWitness witness(const MetricMatrix& m, std::size_t x, const std::array<std::size_t, 3>& r) {
  const auto [y, z, t] = r;
  return {x, y, z, t, m(x, y) + m(z, t), max(m(x, z) + m(y, t), m(y, z) + m(x, t))};
}

// Twice the largest min{(x·z)_w, (y·z)_w} − (x·y)_w over x, y, z for a fixed w.
template <class D, class V>
V doubled_delta_at(const D& d, std::size_t n, std::size_t w, V best) {
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      const V gxy = d(x, w) + d(y, w) - d(x, y);
      for (std::size_t z = 0; z < n; ++z) {
        const V gxz = d(x, w) + d(z, w) - d(x, z);
        const V gyz = d(y, w) + d(z, w) - d(y, z);
        const V v = (gxz < gyz ? gxz : gyz) - gxy;
        if (v > best) best = v;
      }
    }
  return best;
}

Rat from_doubled(std::int64_t v, const mpz_class& den) { return Rat(mpq_class(mpz_class(static_cast<long>(v)), den * 2)); }

}  // namespace

namespace serial {

std::optional<FourPointWitness> four_point(const MetricMatrix& m) {
  const std::size_t n = m.size();
  if (auto s = scale(m)) {
    for (std::size_t x = 0; x < n; ++x)
      if (auto r = violation_at(*s, n, x)) return witness(m, x, *r);
    return std::nullopt;
  }
  const RatView v{m};
  for (std::size_t x = 0; x < n; ++x)
    if (auto r = violation_at(v, n, x)) return witness(m, x, *r);
  return std::nullopt;
}

Rat delta(const MetricMatrix& m) {
  const std::size_t n = m.size();
  if (auto s = scale(m)) {
    std::int64_t best = 0;
    for (std::size_t w = 0; w < n; ++w) best = doubled_delta_at(*s, n, w, best);
    return from_doubled(best, s->den);
  }
  Rat best;
  const RatView v{m};
  for (std::size_t w = 0; w < n; ++w) best = doubled_delta_at(v, n, w, best);
  return best / 2;
}

}  // namespace serial

namespace parallel {

namespace {

template <class D>
std::optional<FourPointWitness> four_point_with(const MetricMatrix& m, const D& d) {
  const std::size_t n = m.size();
  std::vector<std::optional<std::array<std::size_t, 3>>> hits(n);
  std::atomic<std::size_t> first{n};
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t xi = 0; xi < count; ++xi) {
    const auto x = static_cast<std::size_t>(xi);
    if (x > first.load(std::memory_order_relaxed)) continue;
    hits[x] = violation_at(d, n, x);
    if (hits[x]) {
      std::size_t cur = first.load();
      while (x < cur && !first.compare_exchange_weak(cur, x)) {
      }
    }
  }
  const std::size_t x = first.load();
  if (x == n) return std::nullopt;
  return witness(m, x, *hits[x]);
}

}  // namespace

std::optional<FourPointWitness> four_point(const MetricMatrix& m) {
  if (auto s = scale(m)) return four_point_with(m, *s);
  return four_point_with(m, RatView{m});
}

Rat delta(const MetricMatrix& m) {
  const std::size_t n = m.size();
  const auto count = static_cast<std::int64_t>(n);
  if (auto s = scale(m)) {
    std::int64_t best = 0;
#pragma omp parallel for schedule(dynamic) reduction(max : best)
    for (std::int64_t w = 0; w < count; ++w) best = doubled_delta_at(*s, n, static_cast<std::size_t>(w), best);
    return from_doubled(best, s->den);
  }
  std::vector<Rat> per(n);
  const RatView v{m};
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t w = 0; w < count; ++w)
    per[w] = doubled_delta_at(v, n, static_cast<std::size_t>(w), Rat(0));
  Rat best;
  for (const auto& x : per) best = max(best, x);
  return best / 2;
}

}  // namespace parallel

}  // namespace rtree::kernels
