#pragma once

#include <stdexcept>
#include <string>

namespace tgraph {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_ = 0;
};

class InvalidLink : public Error {
  using Error::Error;
};

/// An event lies within tolerance of the requested slice time.
class NonGenericSlice : public Error {
  using Error::Error;
};

/// Two events are closer than the resolution tolerance.
class UnresolvedEvent : public Error {
  using Error::Error;
};

class TangentialContact : public Error {
  using Error::Error;
};

class TrackingLoss : public Error {
  using Error::Error;
};

class VertexOnSlice : public Error {
  using Error::Error;
};

class InconsistentLabels : public Error {
  using Error::Error;
};

class NonRealizable : public Error {
  using Error::Error;
};

class PatternMismatch : public Error {
  using Error::Error;
};

class SymmetryViolation : public Error {
  using Error::Error;
};

}  // namespace tgraph
