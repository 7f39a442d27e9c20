#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pvboost/scan.hpp"
#include "pvboost/sim_oracle.hpp"

namespace pvboost {

/// One closed-form-vs-integrator comparison.
struct ValidationRecord {
    double q;
    double x_minus;
    std::string quantity;  ///< "x_f", "df" or "average_power"
    double closed_form;
    double oracle;
    double abs_err;
};

struct ValidationReport {
    std::vector<ValidationRecord> records;
    double max_abs_err = 0.0;
    double tolerance = 1e-6;

    bool passed() const { return max_abs_err <= tolerance; }
};

/// Draws n seeded random feasible stable points from the box and compares
/// closed-form x_f, Df and average power against the event-detecting
/// integrator.
ValidationReport run_validation(int n, std::uint64_t seed,
                                const LatticeSpec& box,
                                const FixedParams& fixed,
                                const SimOptions& opts = {},
                                double tolerance = 1e-6);

/// Writes the report as a JSON array of records plus a summary object.
void write_validation_report(const ValidationReport& report,
                             const std::filesystem::path& file);

}  // namespace pvboost
