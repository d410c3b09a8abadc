#pragma once

#include <stdexcept>
#include <string>

namespace dfot {

// Malformed or inconsistent input (dimension mismatch, bad weights, bad file).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// Marginals that cannot be coupled (total masses differ).
class Infeasible : public std::runtime_error {
 public:
  explicit Infeasible(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dfot
