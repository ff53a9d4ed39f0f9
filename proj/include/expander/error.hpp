#pragma once

#include <stdexcept>
#include <string>

namespace expander {

/// Raised for every precondition or input-format violation in the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace expander
