#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "eigbound/bounds.hpp"
#include "eigbound/mesh.hpp"
#include "eigbound/spectra.hpp"

namespace eigbound {

enum class ProblemPreset {
    laplace_lshape,
    elliptic_square,
    steklov_lshape,
    elasticity_cook_bounds,
};

ProblemPreset preset_from_string(const std::string& name);
const char* to_string(ProblemPreset preset);

enum class TableFormat { csv, markdown };

struct ExperimentConfig {
    ProblemPreset problem = ProblemPreset::laplace_lshape;
    int levels = 5;                    // 1..8
    int num_eigs = 1;                  // J >= 1
    double tol = 1e-9;
    PoincareConstant constant = PoincareConstant::poincare_pi;
    TableFormat format = TableFormat::csv;
    std::string out;                   // empty: no file written

    void validate() const;
};

struct ReferenceTable {
    struct Row {
        std::string h_descriptor;
        double lambda_h = 0.0;
        double lower = 0.0;
        double upper = 0.0;
    };
    std::vector<Row> rows;
    std::string source;
};

/// The benchmark reference tables shipped with the tool; also available as
/// CSV data files under data/.
const ReferenceTable& builtin_reference(ProblemPreset preset);

/// Builds the mesh hierarchy, runs the eigensolves and bound transforms, and
/// writes the table when config.out is set. For elasticity_cook_bounds the
/// discrete eigenvalues are taken from the shipped reference data
/// (the mixed elasticity discretization is not part of this tool) and only
/// the transform and the upper bounds are computed.
std::vector<BoundReport> run(const ExperimentConfig& config);

std::string format_table(const std::vector<BoundReport>& reports,
                         ProblemPreset preset, TableFormat format);

ReferenceTable read_reference_csv(std::istream& in);

struct VerifyCheck {
    int row = 0;
    std::string column;
    double computed = 0.0;
    double reference = 0.0;
    double rel_error = 0.0;
    double rtol = 0.0;
    bool pass = false;
};

struct VerifyReport {
    bool pass = true;
    std::vector<VerifyCheck> checks;
};

/// Per-cell relative comparison of computed reports against a reference
/// table with per-column tolerances. Throws on shape mismatch.
VerifyReport verify(const ReferenceTable& reference,
                    const std::vector<BoundReport>& computed, double rtol_lambda,
                    double rtol_lower, double rtol_upper);

void print_verify_report(const VerifyReport& report, std::ostream& out);

} // namespace eigbound
