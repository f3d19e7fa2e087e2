#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace glyphforge {

enum class ErrorKind {
  MalformedLine,
  InvalidControl,
  OutOfRange,
  BadTermination,
  LengthMismatch,
  DimensionMismatch,
  ShapeMismatch,
  NonFinite,
  ZeroDensity,
  ZeroVector,
  BatchMismatch,
  LabelOutOfRange,
  StrokeBoundaryMismatch,
  EmptySequence,
  InvalidArgument,
  Io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::InvalidControl: return "InvalidControl";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::BadTermination: return "BadTermination";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::ZeroDensity: return "ZeroDensity";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::BatchMismatch: return "BatchMismatch";
    case ErrorKind::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorKind::StrokeBoundaryMismatch: return "StrokeBoundaryMismatch";
    case ErrorKind::EmptySequence: return "EmptySequence";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Library error. `line()` is the 1-based input line for parse errors and
/// `index()` the offending step/point index where one applies; both are 0
/// when not meaningful.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::size_t line = 0, std::size_t index = 0)
      : std::runtime_error(format(kind, what, line)), kind_(kind), line_(line), index_(index) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t index() const noexcept { return index_; }

 private:
  static std::string format(ErrorKind kind, const std::string& what, std::size_t line) {
    std::string msg(to_string(kind));
    if (line != 0) msg += " (line " + std::to_string(line) + ")";
    msg += ": ";
    msg += what;
    return msg;
  }

  ErrorKind kind_;
  std::size_t line_;
  std::size_t index_;
};

}  // namespace glyphforge
