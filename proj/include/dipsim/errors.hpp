#pragma once

#include <stdexcept>
#include <string>

namespace dipsim {

// Error categories mapped to CLI exit codes: ConfigError -> 2,
// EngineOverflow -> 3, QuadratureError -> 4. Anything else -> 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EngineOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dipsim
