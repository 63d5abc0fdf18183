#include "eigbound/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "eigbound/coefficients.hpp"

namespace eigbound {

ProblemPreset preset_from_string(const std::string& name) {
    if (name == "laplace-lshape") return ProblemPreset::laplace_lshape;
    if (name == "elliptic-square") return ProblemPreset::elliptic_square;
    if (name == "steklov-lshape") return ProblemPreset::steklov_lshape;
    if (name == "elasticity-cook-bounds") return ProblemPreset::elasticity_cook_bounds;
    throw std::invalid_argument("unknown problem '" + name + "'");
}

const char* to_string(ProblemPreset preset) {
    switch (preset) {
    case ProblemPreset::laplace_lshape: return "laplace-lshape";
    case ProblemPreset::elliptic_square: return "elliptic-square";
    case ProblemPreset::steklov_lshape: return "steklov-lshape";
    case ProblemPreset::elasticity_cook_bounds: return "elasticity-cook-bounds";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (levels < 1 || levels > 8)
        throw std::invalid_argument("config: levels must lie in 1..8");
    if (num_eigs < 1) throw std::invalid_argument("config: eigs must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("config: tol must be positive");
}

namespace {

ReferenceTable make_reference(const char* source,
                              std::initializer_list<ReferenceTable::Row> rows) {
    ReferenceTable t;
    t.source = source;
    t.rows.assign(rows);
    return t;
}

const ReferenceTable& table1() {
    static const ReferenceTable t = make_reference(
        "table1", {{"2^0", 8.60144, 5.99088, 13.1991},
                   {"2^-1", 9.25186, 8.28147, 10.5739},
                   {"2^-2", 9.49208, 9.21512, 9.91654},
                   {"2^-3", 9.58268, 9.51054, 9.72837},
                   {"2^-4", 9.61746, 9.59919, 9.66981}});
    return t;
}

const ReferenceTable& table2() {
    static const ReferenceTable t = make_reference(
        "table2", {{"2^0", 13.4656, 10.3977, 15.4049},
                   {"2^-1", 13.4010, 12.4008, 13.9124},
                   {"2^-2", 13.3898, 13.1187, 13.5205},
                   {"2^-3", 13.3877, 13.3185, 13.4207},
                   {"2^-4", 13.3873, 13.3699, 13.3956}});
    return t;
}

const ReferenceTable& table3() {
    static const ReferenceTable t = make_reference(
        "table3", {{"33.14", 5.62812e-4, 4.40411e-5, 1.00153e-3},
                   {"16.57", 5.68410e-4, 1.43028e-4, 9.07262e-4},
                   {"8.287", 5.71724e-4, 3.27099e-4, 7.68356e-4},
                   {"4.143", 5.73587e-4, 4.82990e-4, 6.58116e-4},
                   {"2.071", 5.74507e-4, 5.48734e-4, 6.05333e-4}});
    return t;
}

const ReferenceTable& table4() {
    static const ReferenceTable t = make_reference(
        "table4", {{"2^0", 0.340304, 0.188241, 0.344375},
                   {"2^-1", 0.341129, 0.242816, 0.342217},
                   {"2^-2", 0.341342, 0.283844, 0.341624},
                   {"2^-3", 0.341397, 0.309994, 0.341469},
                   {"2^-4", 0.341411, 0.324951, 0.341430}});
    return t;
}

std::string pow2_descriptor(int level) {
    return level == 0 ? "2^0" : "2^-" + std::to_string(level);
}

std::string sig6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string descriptor_for(ProblemPreset preset, const BoundReport& r) {
    if (preset == ProblemPreset::elasticity_cook_bounds) return sig6(r.h);
    return pow2_descriptor(r.level);
}

std::vector<BoundReport> write_and_return(const ExperimentConfig& config,
                                          std::vector<BoundReport> reports) {
    if (!config.out.empty()) {
        std::ofstream f(config.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file '" + config.out + "'");
        f << format_table(reports, config.problem, config.format);
    }
    return reports;
}

} // namespace

const ReferenceTable& builtin_reference(ProblemPreset preset) {
    switch (preset) {
    case ProblemPreset::laplace_lshape: return table1();
    case ProblemPreset::elliptic_square: return table2();
    case ProblemPreset::elasticity_cook_bounds: return table3();
    case ProblemPreset::steklov_lshape: return table4();
    }
    throw std::invalid_argument("unknown preset");
}

std::vector<BoundReport> run(const ExperimentConfig& config) {
    config.validate();

    SolveOptions opts;
    opts.tol = config.tol;
    opts.num_eigenvalues = config.num_eigs;

    std::vector<ReportInput> inputs;
    const int J = config.num_eigs;

    switch (config.problem) {
    case ProblemPreset::laplace_lshape: {
        Mesh mesh = builtin_mesh(BuiltinMesh::lshape_fig1);
        for (int level = 0; level < config.levels; ++level) {
            const CoefficientField c = unit_coefficients(mesh);
            const double h = mesh.max_diameter();
            const SpectrumResult mixed = mixed_eigs_scalar(mesh, c, opts);
            const SpectrumResult upper =
                p1_upper_eigs(mesh, UpperProblem::laplace, c, opts);
            inputs.push_back({level, h, mixed.eigenvalues[J - 1],
                              delta_laplace(h, config.constant).delta_sq,
                              upper.eigenvalues[J - 1]});
            if (level + 1 < config.levels) mesh = refine_red(mesh);
        }
        return write_and_return(config,
                                assemble_report(BoundProblem::laplace, inputs));
    }
    case ProblemPreset::elliptic_square: {
        Mesh mesh = builtin_mesh(BuiltinMesh::square_fig3);
        for (int level = 0; level < config.levels; ++level) {
            const CoefficientField c = square_fig3_coefficients(mesh);
            const double h = mesh.max_diameter();
            const SpectrumResult mixed = mixed_eigs_scalar(mesh, c, opts);
            const SpectrumResult upper =
                p1_upper_eigs(mesh, UpperProblem::elliptic, c, opts);
            inputs.push_back({level, h, mixed.eigenvalues[J - 1],
                              delta_elliptic(h, c.a0).delta_sq,
                              upper.eigenvalues[J - 1]});
            if (level + 1 < config.levels) mesh = refine_red(mesh);
        }
        return write_and_return(
            config, assemble_report(BoundProblem::elliptic, inputs, 4.0));
    }
    case ProblemPreset::steklov_lshape: {
        Mesh mesh = builtin_mesh(BuiltinMesh::lshape_fig1, /*steklov_variant=*/true);
        for (int level = 0; level < config.levels; ++level) {
            const CoefficientField c = unit_coefficients(mesh);
            const double h = mesh.max_diameter();
            const SpectrumResult dual = steklov_eigs(mesh, opts);
            const SpectrumResult upper =
                p1_upper_eigs(mesh, UpperProblem::steklov, c, opts);
            inputs.push_back({level, h, dual.eigenvalues[J - 1],
                              delta_steklov(mesh).delta_sq,
                              upper.eigenvalues[J - 1]});
            if (level + 1 < config.levels) mesh = refine_red(mesh);
        }
        return write_and_return(config,
                                assemble_report(BoundProblem::steklov, inputs));
    }
    case ProblemPreset::elasticity_cook_bounds: {
        const ReferenceTable& ref = builtin_reference(config.problem);
        if (config.levels > static_cast<int>(ref.rows.size()))
            throw std::invalid_argument(
                "elasticity-cook-bounds: shipped eigenvalues cover 5 levels");
        Mesh mesh = builtin_mesh(BuiltinMesh::cook_fig4);
        const ElasticityParams elast{1.0, 100.0};
        for (int level = 0; level < config.levels; ++level) {
            const CoefficientField c = unit_coefficients(mesh);
            const double h = mesh.max_diameter();
            const SpectrumResult upper =
                p1_upper_eigs(mesh, UpperProblem::elasticity, c, opts, elast);
            // shipped discrete eigenvalues, conservative shear scaling
            inputs.push_back({level, h, ref.rows[level].lambda_h,
                              delta_elasticity(mesh, elast.mu, ShearScale::mu).delta_sq,
                              upper.eigenvalues[J - 1]});
            if (level + 1 < config.levels) mesh = refine_red(mesh);
        }
        return write_and_return(config,
                                assemble_report(BoundProblem::elasticity, inputs));
    }
    }
    throw std::invalid_argument("run: unknown problem");
}

std::string format_table(const std::vector<BoundReport>& reports,
                         ProblemPreset preset, TableFormat format) {
    std::ostringstream out;
    if (format == TableFormat::csv) {
        out << "level,h_descriptor,lambda_h,delta_sq,lower,upper\n";
        for (const BoundReport& r : reports) {
            out << r.level << "," << descriptor_for(preset, r) << ","
                << sig6(r.lambda_h) << "," << sig6(r.delta_sq) << ","
                << sig6(r.lower) << ",";
            if (r.upper) out << sig6(*r.upper);
            out << "\n";
        }
    } else {
        out << "| level | h | lambda_h | delta_sq | lower | upper |\n";
        out << "|---|---|---|---|---|---|\n";
        for (const BoundReport& r : reports) {
            out << "| " << r.level << " | " << descriptor_for(preset, r) << " | "
                << sig6(r.lambda_h) << " | " << sig6(r.delta_sq) << " | "
                << sig6(r.lower) << " | " << (r.upper ? sig6(*r.upper) : "") << " |\n";
        }
    }
    return out.str();
}

ReferenceTable read_reference_csv(std::istream& in) {
    ReferenceTable t;
    std::string line;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        if (line[b] == '#') {
            const auto pos = line.find("source:");
            if (pos != std::string::npos) {
                t.source = line.substr(pos + 7);
                const auto s = t.source.find_first_not_of(" \t");
                t.source = s == std::string::npos ? "" : t.source.substr(s);
                while (!t.source.empty() &&
                       (t.source.back() == '\r' || t.source.back() == ' '))
                    t.source.pop_back();
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;  // h_descriptor,lambda_h,lower,upper
            continue;
        }
        std::istringstream ss(line);
        ReferenceTable::Row row;
        std::string field;
        if (!std::getline(ss, row.h_descriptor, ',') || !std::getline(ss, field, ','))
            throw std::runtime_error("reference csv: bad row at line " +
                                     std::to_string(lineno));
        row.lambda_h = std::stod(field);
        if (!std::getline(ss, field, ','))
            throw std::runtime_error("reference csv: bad row at line " +
                                     std::to_string(lineno));
        row.lower = std::stod(field);
        if (!std::getline(ss, field, ','))
            throw std::runtime_error("reference csv: bad row at line " +
                                     std::to_string(lineno));
        row.upper = std::stod(field);
        t.rows.push_back(row);
    }
    if (t.rows.empty())
        throw std::runtime_error("reference csv: no data rows");
    return t;
}

VerifyReport verify(const ReferenceTable& reference,
                    const std::vector<BoundReport>& computed, double rtol_lambda,
                    double rtol_lower, double rtol_upper) {
    if (reference.rows.size() != computed.size())
        throw std::invalid_argument("verify: row count mismatch (reference " +
                                    std::to_string(reference.rows.size()) +
                                    ", computed " + std::to_string(computed.size()) +
                                    ")");
    VerifyReport report;
    for (std::size_t i = 0; i < computed.size(); ++i) {
        const auto& ref = reference.rows[i];
        const auto& cmp = computed[i];
        const auto check = [&](const char* col, double c, double r, double rtol) {
            VerifyCheck vc;
            vc.row = static_cast<int>(i);
            vc.column = col;
            vc.computed = c;
            vc.reference = r;
            vc.rel_error = std::abs(c - r) / std::max(std::abs(r), 1e-300);
            vc.rtol = rtol;
            vc.pass = vc.rel_error <= rtol;
            report.pass = report.pass && vc.pass;
            report.checks.push_back(vc);
        };
        check("lambda_h", cmp.lambda_h, ref.lambda_h, rtol_lambda);
        check("lower", cmp.lower, ref.lower, rtol_lower);
        if (cmp.upper) check("upper", *cmp.upper, ref.upper, rtol_upper);
    }
    return report;
}

void print_verify_report(const VerifyReport& report, std::ostream& out) {
    for (const VerifyCheck& c : report.checks) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "%s row=%d col=%s computed=%.8g reference=%.8g rel=%.3g rtol=%.3g",
                      c.pass ? "PASS" : "FAIL", c.row, c.column.c_str(), c.computed,
                      c.reference, c.rel_error, c.rtol);
        out << buf << "\n";
    }
    out << (report.pass ? "VERIFY PASS" : "VERIFY FAIL") << "\n";
}

} // namespace eigbound
