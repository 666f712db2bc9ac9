#pragma once

#include <stdexcept>
#include <string>

namespace codemin {

enum class ErrorKind {
  Invalid,     // malformed input or violated precondition
  Infeasible,  // the target rate cannot be reached on the instance
  Cyclic,      // operation requires an acyclic network
  Protocol,    // distributed simulator saw an out-of-order message
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace codemin
