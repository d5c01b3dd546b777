#pragma once

#include <stdexcept>
#include <string>

namespace mgtm {

/// Problems with user-supplied data: malformed files, inconsistent corpora,
/// version or hash mismatches. The CLI maps these to exit code 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mgtm
