#pragma once

#include <stdexcept>
#include <string>

namespace litterscan {

/// Every module reports contract violations and I/O failures with this type.
/// The CLI turns it into a one-line diagnostic and a nonzero exit status.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace litterscan
