#pragma once

// Aggregated property suite: one measured residual per module invariant, each
// gated by a pinned tolerance.  Powers the `verify` CLI command; the desk
// scale is d = m = 1 with small grids so the whole suite stays interactive.

#include <string>
#include <vector>

namespace htg {

struct VerifyCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_pass() const;
};

VerifyReport run_verify();

}  // namespace htg
