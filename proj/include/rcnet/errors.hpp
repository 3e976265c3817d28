#pragma once

#include <stdexcept>
#include <string>

namespace rcnet {

// rho = lambda/mu >= 1: the counter random walk has no stationary regime and
// the closed forms diverge.
class UnstableCounterError : public std::domain_error {
 public:
  explicit UnstableCounterError(const std::string& what)
      : std::domain_error(what) {}
};

// A constraint (e.g. a hard cap on E[R]) cannot be met by any admissible K.
class InfeasibleConstraintError : public std::domain_error {
 public:
  explicit InfeasibleConstraintError(const std::string& what)
      : std::domain_error(what) {}
};

// A content with demand cannot reach any cache that stores it, so its flow
// balance has no finite solution.
class UnplacedContentError : public std::runtime_error {
 public:
  UnplacedContentError(const std::string& what, int file)
      : std::runtime_error(what), file_index(file) {}
  int file_index;
};

// Miss traffic arrives at a cache with no outgoing link.
class SinkWithoutStorageError : public std::runtime_error {
 public:
  SinkWithoutStorageError(const std::string& what, int cache, int file)
      : std::runtime_error(what), cache_index(cache), file_index(file) {}
  int cache_index;
  int file_index;
};

}  // namespace rcnet
