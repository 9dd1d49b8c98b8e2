#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace efqs {

/// quick caps system sizes at L = 10; full goes to L = 12.
enum class ValidationLevel { quick, full };

struct ValidationOptions {
    ValidationLevel level = ValidationLevel::quick;
    /// "" or "det" (perturbs the product-form determinant by a relative 1e-6).
    std::string fault;
    /// Where the determinism check writes its two runs; defaults to a fresh directory under the
    /// system temp path.
    std::filesystem::path scratch;
    /// Criterion ids to run; empty runs all.
    std::vector<int> only;
};

struct CriterionResult {
    int         id = 0;
    std::string name;
    bool        passed = false;
    std::string detail;
    double      seconds = 0.0;
};

struct ValidationReport {
    std::vector<CriterionResult> results;
    bool                         all_passed() const;
};

inline constexpr int kCriteria = 13;

/// Runs the acceptance criteria on the Neel state of the open chain with J = 1, h_x = 1.2,
/// h_z = 0.8. Criterion failures are report content, not exceptions. Throws ConfigError for an
/// unknown fault name or criterion id.
ValidationReport run_validation(const ValidationOptions& options = {});

/// "PASS [ 7] short-filter entropy ... (1.2 s)" followed by the detail line.
std::string format_result(const CriterionResult& r);

} // namespace efqs
