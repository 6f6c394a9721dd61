#pragma once

#include <stdexcept>
#include <string>

namespace gaplab {

/// Error type thrown on contract violations (bad inputs, malformed files,
/// stepping finished episodes, ...). Message carries the offending context.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

}  // namespace gaplab
