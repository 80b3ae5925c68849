#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace shapelim {

// Base for every error raised by the library. The CLI maps the concrete
// types onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A matrix does not send relators into the target relation lattice.
class IllDefined : public Error {
 public:
  using Error::Error;
};

class IndexUndefined : public Error {
 public:
  using Error::Error;
};

class DepthLimited : public Error {
 public:
  DepthLimited(const std::string& what, std::size_t depth)
      : Error(what), depth_(depth) {}
  std::size_t depth() const { return depth_; }

 private:
  std::size_t depth_;
};

class NoStabilization : public Error {
 public:
  using Error::Error;
};

class NotExact : public Error {
 public:
  NotExact(std::size_t level, const std::string& condition)
      : Error("not exact at level " + std::to_string(level) + ": " + condition),
        level_(level),
        condition_(condition) {}
  std::size_t level() const { return level_; }
  const std::string& condition() const { return condition_; }

 private:
  std::size_t level_;
  std::string condition_;
};

class NotCommuting : public Error {
 public:
  explicit NotCommuting(std::size_t level)
      : Error("level map does not commute with bonds at level " +
              std::to_string(level)),
        level_(level) {}
  std::size_t level() const { return level_; }

 private:
  std::size_t level_;
};

class UnknownFamily : public Error {
 public:
  using Error::Error;
};

class UnknownExample : public Error {
 public:
  using Error::Error;
};

class UnknownSuite : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

// Raised when a joint of a six-term sequence that can be checked exactly
// fails; always an implementation bug.
class InconsistentSES : public Error {
 public:
  using Error::Error;
};

// Two independent computations of the same quantity disagree.
class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("parse error at " + std::to_string(line) + ":" +
              std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnresolvedReference : public Error {
 public:
  explicit UnresolvedReference(const std::string& name)
      : Error("unresolved reference: " + name), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

}  // namespace shapelim
