#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ldpcdo {

enum class VerifyLevel { Quick, Full };

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<CriterionResult> results;
    bool all_passed = false;
};

/// Runs the ten-point verification suite. Quick uses reduced path counts
/// and finishes in about a minute; Full uses the budgets the pass/fail
/// thresholds were sized for. If `log` is non-null, one line per criterion
/// is written as it completes.
VerifyReport run_verification(VerifyLevel level, std::ostream* log = nullptr);

}  // namespace ldpcdo
