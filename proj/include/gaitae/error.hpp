#pragma once

#include <stdexcept>
#include <string>

namespace gaitae {

// Error categories surface in the CLI's machine-readable error JSON.
enum class ErrorKind {
  validation,  // malformed skeleton / frame data
  argument,    // bad call arguments (empty batch, single-class scores, ...)
  numeric,     // non-finite value during a forward pass
  state,       // object used before it was ready (e.g. untrained model)
  training,    // divergence or insufficient training data
  degenerate,  // e.g. a zero training error feeding fusion weights
  parse,       // file format problems
  io,
};

const char* error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gaitae
