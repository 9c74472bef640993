#pragma once

#include <stdexcept>
#include <string>

namespace vtrace {

// Two failure classes, matching the CLI exit-code contract:
// validation = bad data or configuration (exit 1), io = filesystem or
// codec failure (exit 2).
class Error : public std::runtime_error {
 public:
  enum class Kind { validation, io };

  Error(Kind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline Error validation_error(std::string message) {
  return Error(Error::Kind::validation, std::move(message));
}

inline Error io_error(std::string message) {
  return Error(Error::Kind::io, std::move(message));
}

}  // namespace vtrace
