#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ess {

// Invalid combination of structural parameters (e.g. energy bound below
// the block length, unsupported code rate).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Index outside the codebook, or a sequence outside the shaping set.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class InvalidSequenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration file problems; carries every violation found, not just
// the first one.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& p : v) {
      if (!s.empty()) s += "; ";
      s += p;
    }
    return s;
  }

  std::vector<std::string> problems_;
};

}  // namespace ess
