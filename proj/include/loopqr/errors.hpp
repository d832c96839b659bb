#pragma once

#include <stdexcept>
#include <string>

namespace loopqr {

// Rejected configuration input.  The message names the offending field so CLI
// users can fix their config without reading source.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace loopqr
