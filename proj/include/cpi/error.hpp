#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpi {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed sentence or knowledge-base text. `line` is 0 for single-sentence input.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnknownAtomError : public Error {
 public:
  explicit UnknownAtomError(const std::string& atom);
  UnknownAtomError(const std::string& atom, std::size_t line);
  const std::string& atom() const { return atom_; }

 private:
  std::string atom_;
};

class EmptyWorldSpaceError : public Error {
 public:
  EmptyWorldSpaceError() : Error("background theory is inconsistent: no possible world survives") {}
};

class SizeLimitError : public Error {
 public:
  using Error::Error;
};

class InvalidBoundError : public Error {
 public:
  using Error::Error;
};

/// The axiom set admits no probability distribution.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class NotInfeasibleError : public Error {
 public:
  NotInfeasibleError() : Error("knowledge base is consistent; nothing to diagnose") {}
};

class TotalConflictError : public Error {
 public:
  TotalConflictError(std::size_t first, std::size_t second);
  TotalConflictError(std::size_t first, std::size_t second, const std::string& first_name,
                     const std::string& second_name);
  std::size_t first() const { return first_; }
  std::size_t second() const { return second_; }

 private:
  std::size_t first_;
  std::size_t second_;
};

class FrameMappingError : public Error {
 public:
  using Error::Error;
};

/// A propagation rule emptied an interval.
class InconsistencySignal : public Error {
 public:
  InconsistencySignal(std::string rule, std::string sentence);
  const std::string& rule() const { return rule_; }
  const std::string& sentence() const { return sentence_; }

 private:
  std::string rule_;
  std::string sentence_;
};

class CoverageMismatchError : public Error {
 public:
  using Error::Error;
};

class NonPointInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace cpi
