#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rtree/matrix.hpp"
#include "rtree/tree.hpp"

namespace rtree {

/// `point <name> node <id>` or `point <name> edge <u> <v> <offset>`.
struct NamedPoint {
  std::string name;
  std::string u;
  std::optional<std::string> v;
  Rat offset;
};

struct TreeDocument {
  RawTree raw;
  std::vector<NamedPoint> points;
  Rat radius;
};

struct LoadedTree {
  Tree tree;
  std::map<std::string, PointRef> points;
  Rat radius;
};

TreeDocument parse_tree_text(std::string_view text);
/// Builds the tree and resolves the named points. Throws TreeError.
LoadedTree load_tree(const TreeDocument& doc);
LoadedTree read_tree_file(const std::string& path);

std::string write_tree(const Tree& t, const Rat& radius, const std::map<std::string, PointRef>& points = {});

/// `labels a b c` then the strict upper triangle, row by row. A triangle that
/// includes the (zero) diagonal is also accepted.
MetricMatrix parse_matrix_text(std::string_view text);
std::string write_matrix(const MetricMatrix& m);

/// `pair <left> <right>` lines.
std::vector<std::pair<std::string, std::string>> parse_pairs_text(std::string_view text);

std::string read_file(const std::string& path);

/// Splits text into whitespace-separated tokens per line, skipping blank
/// lines and `#` comments. Columns are 1-based.
struct Token {
  std::string text;
  std::size_t line;
  std::size_t column;
};
std::vector<std::vector<Token>> tokenize_lines(std::string_view text);
Rat parse_rat(const Token& tok);

}  // namespace rtree
