#pragma once

#include <iosfwd>

namespace cls {

// Quick invariant suite behind `clstool selftest`.  Prints one line per
// check and returns the number of failures.
int run_selftest(std::ostream& os);

}  // namespace cls
