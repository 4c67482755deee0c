#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sedna {

enum class Errc {
  kInvalidRandomness,
  kInvalidConfig,
  kNeedMoreShares,
  kInfeasible,
  kInfeasibleReliability,
  kMalformedInput,
};

std::string_view to_string(Errc code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sedna
