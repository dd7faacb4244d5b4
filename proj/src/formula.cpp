#include "rtree/formula.hpp"

#include <cctype>
#include <functional>

#include "rtree/error.hpp"

namespace rtree {

namespace build {

namespace {
FormulaPtr node(FormulaNode::Kind k, std::vector<FormulaPtr> kids, Rat v = Rat(0), std::string l = {},
                std::string r = {}) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = k;
  n->kids = std::move(kids);
  n->value = std::move(v);
  n->left = std::move(l);
  n->right = std::move(r);
  return n;
}
}  // namespace

FormulaPtr dist(std::string a, std::string b) { return node(FormulaNode::Kind::Dist, {}, Rat(0), std::move(a), std::move(b)); }
FormulaPtr constant(Rat v) { return node(FormulaNode::Kind::Const, {}, std::move(v)); }
FormulaPtr add(FormulaPtr a, FormulaPtr b) { return node(FormulaNode::Kind::Add, {std::move(a), std::move(b)}); }
FormulaPtr monus(FormulaPtr a, FormulaPtr b) { return node(FormulaNode::Kind::Monus, {std::move(a), std::move(b)}); }
FormulaPtr max(FormulaPtr a, FormulaPtr b) { return node(FormulaNode::Kind::Max, {std::move(a), std::move(b)}); }
FormulaPtr min(FormulaPtr a, FormulaPtr b) { return node(FormulaNode::Kind::Min, {std::move(a), std::move(b)}); }
FormulaPtr absdiff(FormulaPtr a, FormulaPtr b) { return node(FormulaNode::Kind::AbsDiff, {std::move(a), std::move(b)}); }
FormulaPtr scale(Rat c, FormulaPtr a) { return node(FormulaNode::Kind::Scale, {std::move(a)}, std::move(c)); }
FormulaPtr inf(std::string var, FormulaPtr body) {
  return node(FormulaNode::Kind::Inf, {std::move(body)}, Rat(0), std::move(var));
}
FormulaPtr sup(std::string var, FormulaPtr body) {
  return node(FormulaNode::Kind::Sup, {std::move(body)}, Rat(0), std::move(var));
}

}  // namespace build

namespace {

using Kind = FormulaNode::Kind;

void collect_free(const FormulaNode& n, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (n.kind) {
    case Kind::Dist:
      for (const auto* name : {&n.left, &n.right})
        if (*name != "p" && std::find(bound.begin(), bound.end(), *name) == bound.end()) out.insert(*name);
      return;
    case Kind::Inf:
    case Kind::Sup:
      if (std::find(bound.begin(), bound.end(), n.left) != bound.end())
        throw ParseError("variable '" + n.left + "' is already bound here", n.line, n.column);
      bound.push_back(n.left);
      collect_free(*n.kids[0], bound, out);
      bound.pop_back();
      return;
    default:
      for (const auto& k : n.kids) collect_free(*k, bound, out);
  }
}

struct Lexeme {
  enum class Type { Ident, Number, Symbol, End };
  Type type;
  std::string text;
  std::size_t line, column;
};

std::vector<Lexeme> lex(std::string_view s) {
  std::vector<Lexeme> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    const std::size_t l = line, cc = col, start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == ':' || s[j] == '\''))
        ++j;
      out.push_back({Lexeme::Type::Ident, std::string(s.substr(start, j - start)), l, cc});
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Lexeme::Type::Number, std::string(s.substr(start, j - start)), l, cc});
      advance(j - i);
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '.') {
      out.push_back({Lexeme::Type::Symbol, "-.", l, cc});
      advance(2);
    } else if (std::string_view("+-*/(),.").find(c) != std::string_view::npos) {
      out.push_back({Lexeme::Type::Symbol, std::string(1, c), l, cc});
      advance(1);
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", l, cc);
    }
  }
  out.push_back({Lexeme::Type::End, "", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Lexeme> toks) : toks_(std::move(toks)) {}

  FormulaPtr parse() {
    FormulaPtr e = expr();
    if (peek().type != Lexeme::Type::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Lexeme& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool is(const char* sym, std::size_t k = 0) const {
    return peek(k).type == Lexeme::Type::Symbol && peek(k).text == sym;
  }
  bool is_word(const char* w, std::size_t k = 0) const {
    return peek(k).type == Lexeme::Type::Ident && peek(k).text == w;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, peek().line, peek().column); }
  void expect(const char* sym) {
    if (!is(sym)) fail(std::string("expected '") + sym + "'" + (peek().text.empty() ? "" : ", got '" + peek().text + "'"));
    ++pos_;
  }

  FormulaPtr mark(FormulaPtr n, const Lexeme& at) {
    auto m = std::const_pointer_cast<FormulaNode>(n);
    m->line = at.line;
    m->column = at.column;
    return n;
  }

  FormulaPtr expr() {
    FormulaPtr lhs = unary();
    while (is("+") || is("-.")) {
      const Lexeme op = peek();
      ++pos_;
      FormulaPtr rhs = unary();
      lhs = mark(op.text == "+" ? build::add(lhs, rhs) : build::monus(lhs, rhs), op);
    }
    return lhs;
  }

  Rat rational() {
    const Lexeme at = peek();
    bool negative = false;
    if (is("-")) {
      negative = true;
      ++pos_;
    }
    if (peek().type != Lexeme::Type::Number) fail("expected a rational constant");
    std::string text = peek().text;
    ++pos_;
    if (is("/")) {
      ++pos_;
      if (peek().type != Lexeme::Type::Number) fail("expected a denominator");
      if (peek().text.find_first_not_of('0') == std::string::npos) fail("zero denominator");
      text += "/" + peek().text;
      ++pos_;
    }
    Rat v = Rat::parse(text);
    (void)at;
    return negative ? -v : v;
  }

  bool starts_rational() const {
    return peek().type == Lexeme::Type::Number || (is("-") && peek(1).type == Lexeme::Type::Number);
  }

  FormulaPtr unary() {
    const Lexeme at = peek();
    if ((is_word("inf") || is_word("sup")) && peek(1).type == Lexeme::Type::Ident && is(".", 2)) {
      const bool inf = at.text == "inf";
      ++pos_;
      std::string var = peek().text;
      pos_ += 2;
      FormulaPtr body = expr();
      return mark(inf ? build::inf(var, body) : build::sup(var, body), at);
    }
    if (starts_rational()) {
      Rat c = rational();
      if (is("*")) {
        ++pos_;
        return mark(build::scale(c, unary()), at);
      }
      return mark(build::constant(c), at);
    }
    return primary();
  }

  std::string point() {
    if (peek().type != Lexeme::Type::Ident) fail("expected a point name");
    return toks_[pos_++].text;
  }

  FormulaPtr primary() {
    const Lexeme at = peek();
    if (is("(")) {
      ++pos_;
      FormulaPtr e = expr();
      expect(")");
      return e;
    }
    if (at.type == Lexeme::Type::Ident && is("(", 1)) {
      const std::string& w = at.text;
      if (w == "d") {
        pos_ += 2;
        std::string a = point();
        expect(",");
        std::string b = point();
        expect(")");
        return mark(build::dist(a, b), at);
      }
      if (w == "max" || w == "min") {
        pos_ += 2;
        FormulaPtr a = expr();
        expect(",");
        FormulaPtr b = expr();
        expect(")");
        return mark(w == "max" ? build::max(a, b) : build::min(a, b), at);
      }
      if (w == "abs") {
        pos_ += 2;
        FormulaPtr a = expr();
        expect("-");
        FormulaPtr b = expr();
        expect(")");
        return mark(build::absdiff(a, b), at);
      }
    }
    if (at.type == Lexeme::Type::End) fail("unexpected end of formula");
    fail("expected an expression, got '" + at.text + "'");
  }

  std::vector<Lexeme> toks_;
  std::size_t pos_ = 0;
};

bool alpha_equal(const FormulaNode& a, const FormulaNode& b, std::vector<std::pair<std::string, std::string>>& bound) {
  if (a.kind != b.kind || a.kids.size() != b.kids.size()) return false;
  auto same_name = [&](const std::string& x, const std::string& y) {
    for (auto it = bound.rbegin(); it != bound.rend(); ++it) {
      const bool bx = it->first == x, by = it->second == y;
      if (bx || by) return bx && by;
    }
    return x == y;
  };
  switch (a.kind) {
    case Kind::Dist:
      return same_name(a.left, b.left) && same_name(a.right, b.right);
    case Kind::Const:
    case Kind::Scale:
      if (a.value != b.value) return false;
      break;
    case Kind::Inf:
    case Kind::Sup: {
      bound.emplace_back(a.left, b.left);
      const bool eq = alpha_equal(*a.kids[0], *b.kids[0], bound);
      bound.pop_back();
      return eq;
    }
    default:
      break;
  }
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!alpha_equal(*a.kids[i], *b.kids[i], bound)) return false;
  return true;
}

}  // namespace

Formula::Formula(FormulaPtr root) : root_(std::move(root)) {
  std::vector<std::string> bound;
  collect_free(*root_, bound, free_);
}

bool Formula::quantifier_free() const {
  std::function<bool(const FormulaNode&)> qf = [&](const FormulaNode& n) {
    if (n.is_quantifier()) return false;
    for (const auto& k : n.kids)
      if (!qf(*k)) return false;
    return true;
  };
  return qf(*root_);
}

std::string Formula::str() const { return to_string(*root_); }

Formula parse_formula(std::string_view text) { return Formula(Parser(lex(text)).parse()); }

std::string to_string(const FormulaNode& n) {
  auto sub = [](const FormulaNode& k) {
    const bool wrap = k.kind == Kind::Add || k.kind == Kind::Monus || k.is_quantifier();
    return wrap ? "(" + to_string(k) + ")" : to_string(k);
  };
  switch (n.kind) {
    case Kind::Dist: return "d(" + n.left + "," + n.right + ")";
    case Kind::Const: return n.value.sign() < 0 ? "(" + n.value.str() + ")" : n.value.str();
    case Kind::Add: return to_string(*n.kids[0]) + " + " + sub(*n.kids[1]);
    case Kind::Monus: return to_string(*n.kids[0]) + " -. " + sub(*n.kids[1]);
    case Kind::Max: return "max(" + to_string(*n.kids[0]) + ", " + to_string(*n.kids[1]) + ")";
    case Kind::Min: return "min(" + to_string(*n.kids[0]) + ", " + to_string(*n.kids[1]) + ")";
    case Kind::AbsDiff: return "abs(" + to_string(*n.kids[0]) + " - " + to_string(*n.kids[1]) + ")";
    case Kind::Scale: return n.value.str() + "*" + sub(*n.kids[0]);
    case Kind::Inf: return "inf " + n.left + ". " + to_string(*n.kids[0]);
    case Kind::Sup: return "sup " + n.left + ". " + to_string(*n.kids[0]);
  }
  return "?";
}

Rat lipschitz(const FormulaNode& n, const std::string& var) {
  switch (n.kind) {
    case Kind::Dist:
      if (n.left == var && n.right == var) return Rat(0);
      return Rat(static_cast<int>(n.left == var) + static_cast<int>(n.right == var));
    case Kind::Const: return Rat(0);
    case Kind::Add:
    case Kind::Monus:
    case Kind::AbsDiff: return lipschitz(*n.kids[0], var) + lipschitz(*n.kids[1], var);
    case Kind::Max:
    case Kind::Min: return max(lipschitz(*n.kids[0], var), lipschitz(*n.kids[1], var));
    case Kind::Scale: return n.value.abs() * lipschitz(*n.kids[0], var);
    case Kind::Inf:
    case Kind::Sup: return n.left == var ? Rat(0) : lipschitz(*n.kids[0], var);
  }
  return Rat(0);
}

bool alpha_equal(const FormulaNode& a, const FormulaNode& b) {
  std::vector<std::pair<std::string, std::string>> bound;
  return alpha_equal(a, b, bound);
}

namespace {

FormulaPtr gp(const std::string& x, const std::string& y, const std::string& w) {
  using namespace build;
  return monus(scale(Rat(1, 2), add(dist(x, w), dist(y, w))), scale(Rat(1, 2), dist(x, y)));
}

}  // namespace

Formula midpoint_axiom() {
  using namespace build;
  auto half_xy = [] { return scale(Rat(1, 2), dist("x", "y")); };
  return Formula(sup("x", sup("y", inf("z", max(absdiff(dist("x", "z"), half_xy()), absdiff(dist("y", "z"), half_xy()))))));
}

Formula hyperbolicity_axiom() {
  using namespace build;
  return Formula(
      sup("x", sup("y", sup("z", sup("w", monus(min(gp("x", "z", "w"), gp("y", "z", "w")), gp("x", "y", "w")))))));
}

namespace {

FormulaPtr psi_node(const Rat& r, const std::string& x) {
  using namespace build;
  const std::string y[3] = {"y1", "y2", "y3"};
  auto height = [&](int i) { return absdiff(dist(x, y[i]), monus(constant(r), dist("p", x))); };
  auto cross = [&](int i, int j) { return monus(add(dist(x, y[i]), dist(x, y[j])), dist(y[i], y[j])); };
  FormulaPtr body = max(max(max(height(0), height(1)), height(2)), max(max(cross(0, 1), cross(0, 2)), cross(1, 2)));
  return inf(y[0], inf(y[1], inf(y[2], body)));
}

}  // namespace

Formula psi_formula(const Rat& r, const std::string& x) { return Formula(psi_node(r, x)); }

Formula phi_formula(const Rat& r) { return Formula(build::sup("x", psi_node(r, "x"))); }

}  // namespace rtree
