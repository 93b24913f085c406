#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tedeval {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Degenerate or otherwise invalid geometry.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed annotation input. Carries the 1-based line number (0 when the
// error is not tied to a line) and the source name when known.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t line = 0, std::string source = {})
      : Error(format(message, line, source)),
        detail_(std::move(message)),
        line_(line),
        source_(std::move(source)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& source() const noexcept { return source_; }
  const std::string& detail() const noexcept { return detail_; }

  ParseError located(std::string source) const {
    return ParseError(detail_, line_, std::move(source));
  }
  ParseError at_line(std::size_t line) const {
    return ParseError(detail_, line, source_);
  }

 private:
  static std::string format(const std::string& message, std::size_t line,
                            const std::string& source) {
    std::string out;
    if (!source.empty()) out += source + ":";
    if (line != 0) out += std::to_string(line) + ":";
    if (!out.empty()) out += " ";
    return out + message;
  }

  std::string detail_;
  std::size_t line_;
  std::string source_;
};

// An input source (directory, archive, file) could not be read.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tedeval
