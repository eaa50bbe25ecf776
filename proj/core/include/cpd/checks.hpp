#pragma once

// Fast self-check suite: gradient consistency of the built-in fields,
// rotation orthogonality, per-step modified-energy identities on random
// states, and agreement of the closed-form baseline solve with its
// fixed-point iteration. Deterministically seeded; runs in well under a
// second.

#include <string>
#include <vector>

namespace cpd {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  // worst observed value vs bound
};

std::vector<CheckResult> run_self_checks();

/// Prints one `[PASS]`/`[FAIL]` line per check to stdout; returns true
/// iff all passed.
bool print_self_checks(const std::vector<CheckResult>& results);

}  // namespace cpd
