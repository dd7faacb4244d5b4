#include "rtree/error.hpp"

namespace rtree {

namespace {
std::string located(const std::string& what, std::size_t line, std::size_t column) {
  if (line == 0) return what;
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
}
}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : Error(located(what, line, column)), line_(line), column_(column) {}

RadiusExceeded::RadiusExceeded(const std::string& witness, const std::string& distance,
                               const std::string& radius)
    : Error("radius exceeded: d(p," + witness + ")=" + distance + " > " + radius),
      witness_(witness),
      distance_(distance) {}

NotIsometric::NotIsometric(std::size_t first, std::size_t second, const std::string& left_distance,
                           const std::string& right_distance)
    : Error("shared map is not isometric: pairs " + std::to_string(first) + "," +
            std::to_string(second) + " have distances " + left_distance + " vs " + right_distance),
      first_(first),
      second_(second) {}

}  // namespace rtree
