#pragma once

#include <stdexcept>
#include <string>

namespace satolab {

/// Invalid user-supplied configuration (bad field, out-of-range parameter).
/// The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical contract was checked and found violated (sandwich broken,
/// degree residual too large, ...). The CLI maps this to exit code 1.
class ContractError : public std::runtime_error {
 public:
  explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace satolab
