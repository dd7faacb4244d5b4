#pragma once

#include <compare>
#include <concepts>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace rtree {

/// Exact rational number in canonical reduced form (denominator > 0).
///
/// Every length, offset and formula value in the library is a Rat. There is
/// deliberately no conversion from floating point.
class Rat {
 public:
  Rat() = default;
  template <std::integral I>
  Rat(I v) : v_(static_cast<long>(v)) {}  // NOLINT(google-explicit-constructor)
  Rat(long num, long den);
  explicit Rat(mpq_class v);

  /// Parses `<int>` or `<int>/<int>`; rejects anything else (including
  /// decimal points and exponents).
  static Rat parse(std::string_view text);
  static std::optional<Rat> try_parse(std::string_view text);

  /// `a` for integers, `a/b` otherwise.
  std::string str() const;

  const mpq_class& raw() const { return v_; }
  int sign() const { return sgn(v_); }
  bool is_zero() const { return sgn(v_) == 0; }
  bool is_integer() const;
  Rat abs() const;
  mpz_class numerator() const { return v_.get_num(); }
  mpz_class denominator() const { return v_.get_den(); }

  Rat& operator+=(const Rat& o);
  Rat& operator-=(const Rat& o);
  Rat& operator*=(const Rat& o);
  Rat& operator/=(const Rat& o);

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }
  friend Rat operator-(const Rat& a);

  friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) == 0; }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    const int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

 private:
  mpq_class v_{0};
};

inline const Rat& max(const Rat& a, const Rat& b) { return a < b ? b : a; }
inline const Rat& min(const Rat& a, const Rat& b) { return b < a ? b : a; }

/// x ∸ y = max(x - y, 0).
Rat monus(const Rat& x, const Rat& y);

/// Smallest integer >= q.
mpz_class ceil(const Rat& q);

}  // namespace rtree
