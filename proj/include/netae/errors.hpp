#pragma once

#include <stdexcept>

namespace netae {

// malformed input files, dimension mismatches, contract violations on data
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// non-finite values produced by training or scoring
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace netae
