#pragma once

#include <stdexcept>
#include <string>

namespace linbandit {

// Precondition on a numeric domain was violated (e.g. an arm outside the
// unit ball).
class DomainViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An operation was called in a state that does not admit it (e.g. a
// round-robin sampler that ran past its ensemble).
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A deterministic identity that must hold on every step failed. Signals an
// implementation bug, never a statistical fluke.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace linbandit
