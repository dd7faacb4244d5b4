#include "rtree/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "rtree/error.hpp"

namespace rtree {

std::vector<std::vector<Token>> tokenize_lines(std::string_view text) {
  std::vector<std::vector<Token>> out;
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line;
    std::string_view row = text.substr(pos, end - pos);
    std::vector<Token> toks;
    std::size_t i = 0;
    while (i < row.size()) {
      if (std::isspace(static_cast<unsigned char>(row[i]))) {
        ++i;
        continue;
      }
      if (row[i] == '#') break;
      const std::size_t start = i;
      while (i < row.size() && !std::isspace(static_cast<unsigned char>(row[i]))) ++i;
      toks.push_back({std::string(row.substr(start, i - start)), line, start + 1});
    }
    if (!toks.empty()) out.push_back(std::move(toks));
    pos = end + 1;
  }
  return out;
}

Rat parse_rat(const Token& tok) {
  if (auto r = Rat::try_parse(tok.text)) return *r;
  throw ParseError("malformed rational '" + tok.text + "'", tok.line, tok.column);
}

namespace {

[[noreturn]] void fail(const Token& at, const std::string& what) { throw ParseError(what, at.line, at.column); }

void expect_count(const std::vector<Token>& toks, std::size_t n, const std::string& usage) {
  if (toks.size() != n) fail(toks.size() > n ? toks[n] : toks.back(), "expected: " + usage);
}

}  // namespace

TreeDocument parse_tree_text(std::string_view text) {
  TreeDocument doc;
  std::optional<Token> radius_at;
  for (const auto& toks : tokenize_lines(text)) {
    const std::string& kw = toks[0].text;
    if (kw == "node") {
      if (toks.size() < 2 || toks.size() > 3) fail(toks[0], "expected: node <id> [basepoint|label=<name>]");
      const std::string& id = toks[1].text;
      if (std::find(doc.raw.nodes.begin(), doc.raw.nodes.end(), id) == doc.raw.nodes.end()) doc.raw.nodes.push_back(id);
      if (toks.size() == 3) {
        const std::string& attr = toks[2].text;
        if (attr == "basepoint") {
          if (!doc.raw.basepoint.empty() && doc.raw.basepoint != id) fail(toks[2], "second basepoint");
          doc.raw.basepoint = id;
        } else if (attr.rfind("label=", 0) == 0 && attr.size() > 6) {
          doc.raw.labels[id].push_back(attr.substr(6));
        } else {
          fail(toks[2], "unknown node attribute '" + attr + "'");
        }
      }
    } else if (kw == "edge") {
      expect_count(toks, 4, "edge <u> <v> <len>");
      doc.raw.edges.push_back({toks[1].text, toks[2].text, parse_rat(toks[3])});
    } else if (kw == "point") {
      if (toks.size() < 4) fail(toks.back(), "expected: point <name> node <id> | point <name> edge <u> <v> <offset>");
      if (toks[2].text == "node") {
        expect_count(toks, 4, "point <name> node <id>");
        doc.points.push_back({toks[1].text, toks[3].text, std::nullopt, Rat(0)});
      } else if (toks[2].text == "edge") {
        expect_count(toks, 6, "point <name> edge <u> <v> <offset>");
        doc.points.push_back({toks[1].text, toks[3].text, toks[4].text, parse_rat(toks[5])});
      } else {
        fail(toks[2], "expected 'node' or 'edge'");
      }
    } else if (kw == "radius") {
      expect_count(toks, 2, "radius <len>");
      if (radius_at) fail(toks[0], "radius given twice");
      radius_at = toks[0];
      doc.radius = parse_rat(toks[1]);
      if (doc.radius.sign() < 0) fail(toks[1], "negative radius");
    } else {
      fail(toks[0], "unknown keyword '" + kw + "'");
    }
  }
  if (!radius_at) throw ParseError("missing radius line");
  if (doc.raw.basepoint.empty()) throw ParseError("no node is marked basepoint");
  return doc;
}

LoadedTree load_tree(const TreeDocument& doc) {
  LoadedTree out{Tree::build(doc.raw), {}, doc.radius};
  for (const auto& np : doc.points) {
    const NodeIndex u = out.tree.node(np.u);
    PointRef x = np.v ? out.tree.edge_point(u, out.tree.node(*np.v), np.offset) : PointRef::vertex(u);
    if (!out.points.emplace(np.name, x).second) throw TreeError("point '" + np.name + "' defined twice");
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadedTree read_tree_file(const std::string& path) { return load_tree(parse_tree_text(read_file(path))); }

std::string write_tree(const Tree& t, const Rat& radius, const std::map<std::string, PointRef>& points) {
  std::ostringstream os;
  for (NodeIndex n = 0; n < t.node_count(); ++n) {
    os << "node " << t.id(n) << (n == t.basepoint() ? " basepoint" : "") << '\n';
    for (const auto& l : t.labels(n)) os << "node " << t.id(n) << " label=" << l << '\n';
  }
  for (EdgeIndex e = 0; e < t.edge_count(); ++e) {
    const Edge& ed = t.edge(e);
    os << "edge " << t.id(ed.u) << ' ' << t.id(ed.v) << ' ' << ed.length << '\n';
  }
  for (const auto& [name, x] : points) {
    const PointRef y = t.normalize(x);
    if (y.is_vertex()) {
      os << "point " << name << " node " << t.id(y.node()) << '\n';
    } else {
      const Edge& ed = t.edge(y.edge());
      os << "point " << name << " edge " << t.id(ed.u) << ' ' << t.id(ed.v) << ' ' << y.offset() << '\n';
    }
  }
  os << "radius " << radius << '\n';
  return os.str();
}

MetricMatrix parse_matrix_text(std::string_view text) {
  const auto lines = tokenize_lines(text);
  if (lines.empty() || lines[0][0].text != "labels") throw ParseError("matrix must start with a 'labels' line", 1, 1);
  std::vector<std::string> labels;
  for (std::size_t i = 1; i < lines[0].size(); ++i) {
    if (std::find(labels.begin(), labels.end(), lines[0][i].text) != labels.end())
      fail(lines[0][i], "duplicate label '" + lines[0][i].text + "'");
    labels.push_back(lines[0][i].text);
  }
  std::vector<Token> values;
  for (std::size_t l = 1; l < lines.size(); ++l) values.insert(values.end(), lines[l].begin(), lines[l].end());
  const std::size_t n = labels.size();
  const std::size_t strict = n * (n - (n > 0 ? 1 : 0)) / 2;
  const bool with_diagonal = values.size() == strict + n && values.size() != strict;
  if (values.size() != strict && !with_diagonal)
    throw ParseError("expected " + std::to_string(strict) + " upper-triangle entries, got " + std::to_string(values.size()),
                     values.empty() ? lines[0][0].line : values.back().line, values.empty() ? 1 : values.back().column);
  MetricMatrix m = MetricMatrix::zeros(std::move(labels));
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = with_diagonal ? i : i + 1; j < n; ++j) {
      const Token& tok = values[k++];
      Rat d = parse_rat(tok);
      if (i == j && !d.is_zero()) fail(tok, "diagonal entry must be 0");
      if (d.sign() < 0) fail(tok, "negative distance");
      m.set(i, j, d);
    }
  }
  return m;
}

std::string write_matrix(const MetricMatrix& m) {
  std::ostringstream os;
  os << "labels";
  for (const auto& l : m.labels) os << ' ' << l;
  os << '\n';
  for (std::size_t i = 0; i + 1 < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) os << (j == i + 1 ? "" : " ") << m(i, j);
    os << '\n';
  }
  return os.str();
}

std::vector<std::pair<std::string, std::string>> parse_pairs_text(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& toks : tokenize_lines(text)) {
    if (toks[0].text != "pair") fail(toks[0], "expected 'pair <left> <right>'");
    expect_count(toks, 3, "pair <left> <right>");
    out.emplace_back(toks[1].text, toks[2].text);
  }
  return out;
}

}  // namespace rtree
