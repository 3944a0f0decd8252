#pragma once

#include <string>
#include <vector>

namespace tensorchan {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant checks across all modules (a few seconds on one core).
std::vector<SelftestCheck> run_selftest();

}  // namespace tensorchan
