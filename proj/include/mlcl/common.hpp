#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace mlcl {

// Argument/contract violations throw std::invalid_argument, runtime failures
// (I/O, non-finite values mid-computation) throw std::runtime_error. Both
// carry a [context] tag naming the operation that rejected the input.
#define MLCL_CHECK(cond, msg)                  \
  do {                                         \
    if (!(cond)) {                             \
      std::ostringstream oss_;                 \
      oss_ << msg;                             \
      throw std::invalid_argument(oss_.str()); \
    }                                          \
  } while (0)

#define MLCL_RUNTIME_CHECK(cond, msg)        \
  do {                                       \
    if (!(cond)) {                           \
      std::ostringstream oss_;               \
      oss_ << msg;                           \
      throw std::runtime_error(oss_.str()); \
    }                                        \
  } while (0)

}  // namespace mlcl
