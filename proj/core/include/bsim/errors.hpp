#ifndef BSIM_ERRORS_HPP
#define BSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bsim {

// Bad input data: missing columns, non-binary arms, out-of-support responses.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A linear system stayed singular after jitter, a fit diverged, etc.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function (e.g. logit(0)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed configuration or command-line usage.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bsim

#endif  // BSIM_ERRORS_HPP
