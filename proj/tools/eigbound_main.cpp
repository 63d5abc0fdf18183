#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "eigbound/experiment.hpp"
#include "eigbound/mesh.hpp"

namespace {

using namespace eigbound;

int cmd_run(const std::string& problem, int levels, int eigs, double tol,
            const std::string& constant, const std::string& format,
            const std::string& out) {
    ExperimentConfig config;
    config.problem = preset_from_string(problem);
    config.levels = levels;
    config.num_eigs = eigs;
    config.tol = tol;
    config.constant = constant == "bessel" ? PoincareConstant::bessel_j11
                                           : PoincareConstant::poincare_pi;
    config.format = format == "md" ? TableFormat::markdown : TableFormat::csv;
    config.out = out;
    const auto reports = run(config);
    std::cout << format_table(reports, config.problem, config.format);
    if (!out.empty()) std::cerr << "wrote " << out << "\n";
    return 0;
}

int cmd_verify(const std::string& problem, const std::string& reference,
               double rtol_lambda, double rtol_lower, double rtol_upper,
               double tol) {
    std::ifstream f(reference);
    if (!f) {
        std::cerr << "cannot open reference file '" << reference << "'\n";
        return 1;
    }
    const ReferenceTable ref = read_reference_csv(f);

    ExperimentConfig config;
    config.problem = preset_from_string(problem);
    config.levels = static_cast<int>(ref.rows.size());
    config.tol = tol;
    const auto reports = run(config);
    const VerifyReport vr = verify(ref, reports, rtol_lambda, rtol_lower, rtol_upper);
    print_verify_report(vr, std::cout);
    return vr.pass ? 0 : 2;
}

int cmd_mesh(const std::string& name, int refine, const std::string& out) {
    BuiltinMesh builtin;
    if (name == "lshape_fig1") builtin = BuiltinMesh::lshape_fig1;
    else if (name == "square_fig3") builtin = BuiltinMesh::square_fig3;
    else if (name == "cook_fig4") builtin = BuiltinMesh::cook_fig4;
    else throw CLI::ValidationError("--builtin", "unknown builtin '" + name + "'");

    Mesh mesh = builtin_mesh(builtin);
    for (int i = 0; i < refine; ++i) mesh = refine_red(mesh);
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        std::cerr << "cannot open output file '" << out << "'\n";
        return 1;
    }
    write_mesh(mesh, f);
    std::cerr << "wrote " << out << " (" << mesh.num_cells() << " cells)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Guaranteed PDE eigenvalue lower bounds via dual mixed finite elements"};
    app.require_subcommand(1);

    std::string problem = "laplace-lshape";
    int levels = 5, eigs = 1, refine = 0;
    double tol = 1e-9;
    std::string constant = "pi", format = "csv", out, reference, builtin;
    double rtol_lambda = 2e-5, rtol_lower = 2e-5, rtol_upper = 1e-3;

    auto* run_cmd = app.add_subcommand("run", "run a bound table experiment");
    run_cmd->add_option("--problem", problem,
                        "laplace-lshape | elliptic-square | steklov-lshape | "
                        "elasticity-cook-bounds")->required();
    run_cmd->add_option("--levels", levels, "refinement levels (1..8)");
    run_cmd->add_option("--eigs", eigs, "eigenvalue index J");
    run_cmd->add_option("--tol", tol, "eigensolver residual tolerance");
    run_cmd->add_option("--constant", constant)->check(CLI::IsMember({"pi", "bessel"}));
    run_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "md"}));
    run_cmd->add_option("--out", out, "output table path");

    auto* verify_cmd = app.add_subcommand("verify", "run and compare against a reference table");
    verify_cmd->add_option("--problem", problem)->required();
    verify_cmd->add_option("--reference", reference, "reference CSV")->required();
    verify_cmd->add_option("--rtol-lambda", rtol_lambda);
    verify_cmd->add_option("--rtol-lower", rtol_lower);
    verify_cmd->add_option("--rtol-upper", rtol_upper);
    verify_cmd->add_option("--tol", tol, "eigensolver residual tolerance");

    auto* mesh_cmd = app.add_subcommand("mesh", "write a builtin mesh file");
    mesh_cmd->add_option("--builtin", builtin, "lshape_fig1 | square_fig3 | cook_fig4")
        ->required();
    mesh_cmd->add_option("--refine", refine, "red refinements (>= 0)")
        ->check(CLI::NonNegativeNumber);
    mesh_cmd->add_option("--out", out, "output mesh path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed())
            return cmd_run(problem, levels, eigs, tol, constant, format, out);
        if (verify_cmd->parsed())
            return cmd_verify(problem, reference, rtol_lambda, rtol_lower, rtol_upper, tol);
        if (mesh_cmd->parsed()) return cmd_mesh(builtin, refine, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
