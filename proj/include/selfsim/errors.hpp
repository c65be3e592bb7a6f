#pragma once

#include <stdexcept>
#include <string>

namespace selfsim {

/// Malformed or inconsistent input (bad file, bad word, precondition failure).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A configured resource budget (orbit size, power size, search depth) was hit.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// A certificate failed its own verification. Never returned as a result.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

/// Resource limits shared by the closure/power/search routines.
struct Budgets {
  std::size_t orbit_vertices = 100000;   // orbital-graph closure cap
  std::size_t power_vertices = 1000000;  // |A|^k cap for transducer powers
  std::size_t search_nodes = 1000000;    // generic BFS caps (kernel search, rho walks)
};

}  // namespace selfsim
