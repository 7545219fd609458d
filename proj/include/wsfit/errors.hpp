#pragma once

#include <stdexcept>
#include <string>

namespace wsfit {

// Bad or malformed input data (files, tables, CLI-supplied values).
class input_error : public std::runtime_error {
 public:
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed to converge or left its domain of validity.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wsfit
