#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cohort {

/// Input data violates a documented format or domain (exit code 2 in the CLI).
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A line of a line-oriented input could not be parsed.
class ParseError : public DataError {
  public:
    ParseError(std::size_t line, const std::string& message)
        : DataError("line " + std::to_string(line) + ": " + message), m_line(line)
    {}

    [[nodiscard]] std::size_t line() const noexcept { return m_line; }

  private:
    std::size_t m_line;
};

/// Query text that reduces to no index terms after analysis.
class UnsearchableQuery : public DataError {
  public:
    using DataError::DataError;
};

/// Invalid configuration value; the message names the offending field.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// The scorer could not be reached, or kept failing after retries.
class ScorerTransportError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The scorer answered, but the answer breaks the wire contract.
class ScorerProtocolError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace cohort
