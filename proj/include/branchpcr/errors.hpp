#ifndef BRANCHPCR_ERRORS_HPP
#define BRANCHPCR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace branchpcr {

/// A parameter lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A configuration document is malformed or incomplete.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// An exact computation or a simulation would exceed its resource cap.
class CapExceeded : public std::runtime_error {
 public:
  explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace branchpcr

#endif  // BRANCHPCR_ERRORS_HPP
