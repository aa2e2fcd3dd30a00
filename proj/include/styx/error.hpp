#pragma once

#include <stdexcept>
#include <string>

namespace styx {

// Which side of the world failed. The CLI maps these onto exit codes.
enum class ErrorKind {
  Input,     // bad file, bad row, validation failure
  External,  // network, remote service, authentication
};

class Error : public std::runtime_error {
 public:
  explicit Error(std::string what, ErrorKind kind = ErrorKind::Input)
      : std::runtime_error(std::move(what)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace styx
