#include "cpi/error.hpp"

#include <utility>

namespace cpi {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : Error(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message
                     : "column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

UnknownAtomError::UnknownAtomError(const std::string& atom) : Error("unknown atom '" + atom + "'"), atom_(atom) {}

UnknownAtomError::UnknownAtomError(const std::string& atom, std::size_t line)
    : Error("line " + std::to_string(line) + ": undeclared atom '" + atom + "'"), atom_(atom) {}

TotalConflictError::TotalConflictError(std::size_t first, std::size_t second)
    : Error("total conflict combining sources " + std::to_string(first) + " and " + std::to_string(second)),
      first_(first),
      second_(second) {}

TotalConflictError::TotalConflictError(std::size_t first, std::size_t second, const std::string& first_name,
                                       const std::string& second_name)
    : Error("total conflict: source '" + second_name + "' contradicts the evidence through '" + first_name + "'"),
      first_(first),
      second_(second) {}

InconsistencySignal::InconsistencySignal(std::string rule, std::string sentence)
    : Error("rule '" + rule + "' emptied the interval of " + sentence), rule_(std::move(rule)),
      sentence_(std::move(sentence)) {}

}  // namespace cpi
