#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nehari {

// One randomized property suite: named after the invariant it exercises,
// with the executed trial count and the first failing witness (if any).
struct PropertyResult {
  std::string name;
  long trials = 0;
  long failures = 0;
  std::string first_failure;
};

struct PropertyOptions {
  std::uint64_t seed = 0;
  int trials = 1000;   // per suite; eigensolve-heavy suites run a capped share
  int threads = 1;     // suites are independent; results merge by index
  std::string filter;  // substring match on suite names (empty = all)
};

std::vector<std::string> property_names();

// Runs every suite whose name contains `filter`.  Deterministic for a fixed
// (seed, trials) regardless of thread count: randomness is pre-split per
// suite and per trial.
std::vector<PropertyResult> run_properties(const PropertyOptions& opts);

}  // namespace nehari
