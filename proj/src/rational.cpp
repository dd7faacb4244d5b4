#include "rtree/rational.hpp"

#include <cctype>

#include "rtree/error.hpp"

namespace rtree {

namespace {

bool is_integer_literal(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

std::string strip_plus(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  return std::string(s);
}

}  // namespace

Rat::Rat(long num, long den) : v_(num, den) {
  if (den == 0) throw Error("rational with zero denominator");
  v_.canonicalize();
}

Rat::Rat(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

std::optional<Rat> Rat::try_parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    if (!is_integer_literal(text)) return std::nullopt;
    return Rat(mpq_class(mpz_class(strip_plus(text))));
  }
  const auto num = text.substr(0, slash);
  const auto den = text.substr(slash + 1);
  if (!is_integer_literal(num) || den.empty() || den.front() == '-' || den.front() == '+' ||
      !is_integer_literal(den))
    return std::nullopt;
  mpz_class d(std::string{den});
  if (d == 0) return std::nullopt;
  return Rat(mpq_class(mpz_class(strip_plus(num)), d));
}

Rat Rat::parse(std::string_view text) {
  if (auto r = try_parse(text)) return *r;
  throw ParseError("malformed rational '" + std::string(text) + "' (expected <int> or <int>/<int>)");
}

std::string Rat::str() const {
  if (v_.get_den() == 1) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

bool Rat::is_integer() const { return v_.get_den() == 1; }

Rat Rat::abs() const { return sign() < 0 ? -*this : *this; }

Rat& Rat::operator+=(const Rat& o) {
  v_ += o.v_;
  return *this;
}
Rat& Rat::operator-=(const Rat& o) {
  v_ -= o.v_;
  return *this;
}
Rat& Rat::operator*=(const Rat& o) {
  v_ *= o.v_;
  return *this;
}
Rat& Rat::operator/=(const Rat& o) {
  if (o.is_zero()) throw Error("division by zero");
  v_ /= o.v_;
  return *this;
}

Rat operator-(const Rat& a) {
  Rat r;
  r.v_ = -a.v_;
  return r;
}

Rat monus(const Rat& x, const Rat& y) {
  Rat d = x - y;
  return d.sign() > 0 ? d : Rat(0);
}

mpz_class ceil(const Rat& q) {
  mpz_class out;
  mpz_cdiv_q(out.get_mpz_t(), q.raw().get_num_mpz_t(), q.raw().get_den_mpz_t());
  return out;
}

}  // namespace rtree
