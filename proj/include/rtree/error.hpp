#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rtree {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Structurally invalid tree data or an unknown node/edge/point reference.
class TreeError : public Error {
 public:
  using Error::Error;
};

class RadiusExceeded : public Error {
 public:
  RadiusExceeded(const std::string& witness, const std::string& distance, const std::string& radius);
  const std::string& witness() const { return witness_; }
  const std::string& distance() const { return distance_; }

 private:
  std::string witness_;
  std::string distance_;
};

class NotIsometric : public Error {
 public:
  NotIsometric(std::size_t first, std::size_t second, const std::string& left_distance,
               const std::string& right_distance);
  std::size_t first() const { return first_; }
  std::size_t second() const { return second_; }

 private:
  std::size_t first_;
  std::size_t second_;
};

class InconsistentDescriptor : public Error {
 public:
  using Error::Error;
};

class ContextMismatch : public Error {
 public:
  using Error::Error;
};

/// A generator would exceed its configured node budget.
class GenerationLimit : public Error {
 public:
  using Error::Error;
};

}  // namespace rtree
