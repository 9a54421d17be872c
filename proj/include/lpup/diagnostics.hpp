#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lpup {

/// Truncation, blow-up or resolution failure of a numerical computation.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Warnings are collected per thread; callers drain them with take_warnings().
void warn(std::string message);
std::vector<std::string> take_warnings();

}  // namespace lpup
