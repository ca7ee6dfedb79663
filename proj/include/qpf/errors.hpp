#pragma once

#include <stdexcept>

namespace qpf {

/// A result violated an identity the algorithm guarantees; always a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A truncation or run setting cannot be honoured.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qpf
