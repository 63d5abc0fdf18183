#include <doctest.h>

#include <fstream>
#include <sstream>

#include "eigbound/experiment.hpp"
#include "eigbound/sparse.hpp"
#include "test_support.hpp"

using namespace eigbound;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config validation") {
    ExperimentConfig config;
    config.levels = 9;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.levels = 5;
    config.num_eigs = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.num_eigs = 1;
    config.tol = -1.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("run: single-level smoke for every preset") {
    for (const ProblemPreset preset :
         {ProblemPreset::laplace_lshape, ProblemPreset::elliptic_square,
          ProblemPreset::steklov_lshape, ProblemPreset::elasticity_cook_bounds}) {
        ExperimentConfig config;
        config.problem = preset;
        config.levels = 1;
        const auto reports = run(config);
        REQUIRE(reports.size() == 1);
        CHECK(reports[0].lower <= reports[0].lambda_h);
        REQUIRE(reports[0].upper.has_value());
        CHECK(reports[0].lower <= *reports[0].upper);
        CHECK(reports[0].delta_sq > 0.0);
    }
}

TEST_CASE("run: report invariants over two levels") {
    ExperimentConfig config;
    config.problem = ProblemPreset::elliptic_square;
    config.levels = 2;
    const auto reports = run(config);
    REQUIRE(reports.size() == 2);
    for (const BoundReport& r : reports) {
        CHECK(r.lower <= r.lambda_h);
        CHECK(r.lower <= *r.upper);
        CHECK(r.gamma0 == 4.0);
    }
    CHECK(reports[1].h == doctest::Approx(reports[0].h / 2.0).epsilon(1e-14));
}

TEST_CASE("format_table: csv schema and markdown") {
    ExperimentConfig config;
    config.problem = ProblemPreset::laplace_lshape;
    config.levels = 1;
    const auto reports = run(config);
    const std::string csv = format_table(reports, config.problem, TableFormat::csv);
    CHECK(csv.find("level,h_descriptor,lambda_h,delta_sq,lower,upper\n") == 0);
    CHECK(csv.find("0,2^0,8.60144,0.0506606,5.99089,13.1992\n") != std::string::npos);
    const std::string md = format_table(reports, config.problem, TableFormat::markdown);
    CHECK(md.find("| 0 | 2^0 | 8.60144 |") != std::string::npos);
}

TEST_CASE("run output is deterministic") {
    ExperimentConfig config;
    config.problem = ProblemPreset::steklov_lshape;
    config.levels = 2;
    const std::string a = format_table(run(config), config.problem, TableFormat::csv);
    const std::string b = format_table(run(config), config.problem, TableFormat::csv);
    CHECK(a == b);
}

TEST_CASE("reference csv io") {
    const std::string text =
        "# source: table4\n"
        "h_descriptor,lambda_h,lower,upper\n"
        "2^0,0.340304,0.188241,0.344375\n"
        "2^-1,0.341129,0.242816,0.342217\n";
    std::istringstream in(text);
    const ReferenceTable t = read_reference_csv(in);
    CHECK(t.source == "table4");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].h_descriptor == "2^0");
    CHECK(t.rows[1].lower == doctest::Approx(0.242816));

    std::istringstream bad("h_descriptor,lambda_h,lower,upper\n2^0,1.0\n");
    CHECK_THROWS_AS(read_reference_csv(bad), std::runtime_error);
}

TEST_CASE("verify: pass, perturbation failure, and shape mismatch") {
    ExperimentConfig config;
    config.problem = ProblemPreset::laplace_lshape;
    config.levels = 2;
    const auto reports = run(config);

    ReferenceTable ref = builtin_reference(config.problem);
    ref.rows.resize(2);
    const VerifyReport ok = verify(ref, reports, 2e-5, 2e-5, 1e-3);
    CHECK(ok.pass);
    CHECK(ok.checks.size() == 6);

    ReferenceTable perturbed = ref;
    perturbed.rows[1].lower *= 1.01;
    const VerifyReport bad = verify(perturbed, reports, 2e-5, 2e-5, 1e-3);
    CHECK(!bad.pass);
    bool named = false;
    for (const VerifyCheck& c : bad.checks)
        if (!c.pass) {
            named = true;
            CHECK(c.row == 1);
            CHECK(c.column == "lower");
        }
    CHECK(named);

    ReferenceTable bigger = builtin_reference(config.problem);
    CHECK_THROWS_AS(verify(bigger, reports, 2e-5, 2e-5, 1e-3),
                    std::invalid_argument);

    std::ostringstream out;
    print_verify_report(bad, out);
    CHECK(out.str().find("FAIL row=1 col=lower") != std::string::npos);
    CHECK(out.str().find("VERIFY FAIL") != std::string::npos);
}

TEST_CASE("builtin references carry five rows each") {
    for (const ProblemPreset preset :
         {ProblemPreset::laplace_lshape, ProblemPreset::elliptic_square,
          ProblemPreset::steklov_lshape, ProblemPreset::elasticity_cook_bounds}) {
        CHECK(builtin_reference(preset).rows.size() == 5);
    }
    CHECK(builtin_reference(ProblemPreset::steklov_lshape).rows[0].lower ==
          doctest::Approx(0.188241));
}

TEST_CASE("shipped mesh files are the frozen builtins") {
    const std::pair<BuiltinMesh, const char*> files[] = {
        {BuiltinMesh::lshape_fig1, EIGBOUND_DATA_DIR "/lshape_fig1.mesh"},
        {BuiltinMesh::square_fig3, EIGBOUND_DATA_DIR "/square_fig3.mesh"},
        {BuiltinMesh::cook_fig4, EIGBOUND_DATA_DIR "/cook_fig4.mesh"},
    };
    for (const auto& [name, path] : files)
        CHECK(read_file(path) == write_mesh(builtin_mesh(name)));
}

TEST_CASE("shipped reference tables match the embedded ones") {
    const std::pair<ProblemPreset, const char*> files[] = {
        {ProblemPreset::laplace_lshape, EIGBOUND_DATA_DIR "/table1.csv"},
        {ProblemPreset::elliptic_square, EIGBOUND_DATA_DIR "/table2.csv"},
        {ProblemPreset::elasticity_cook_bounds, EIGBOUND_DATA_DIR "/table3.csv"},
        {ProblemPreset::steklov_lshape, EIGBOUND_DATA_DIR "/table4.csv"},
    };
    for (const auto& [preset, path] : files) {
        std::ifstream f(path);
        REQUIRE(f.good());
        const ReferenceTable shipped = read_reference_csv(f);
        const ReferenceTable& embedded = builtin_reference(preset);
        REQUIRE(shipped.rows.size() == embedded.rows.size());
        CHECK(shipped.source == embedded.source);
        for (std::size_t i = 0; i < shipped.rows.size(); ++i) {
            CHECK(shipped.rows[i].lambda_h ==
                  doctest::Approx(embedded.rows[i].lambda_h).epsilon(1e-12));
            CHECK(shipped.rows[i].lower ==
                  doctest::Approx(embedded.rows[i].lower).epsilon(1e-12));
            CHECK(shipped.rows[i].upper ==
                  doctest::Approx(embedded.rows[i].upper).epsilon(1e-12));
        }
    }
}

TEST_CASE("run with J = 2 reports the second eigenvalue") {
    ExperimentConfig config;
    config.problem = ProblemPreset::laplace_lshape;
    config.levels = 1;
    const double lam1 = run(config)[0].lambda_h;
    config.num_eigs = 2;
    const auto reports = run(config);
    CHECK(reports[0].lambda_h > lam1);
    CHECK(reports[0].lower <= reports[0].lambda_h);
}

TEST_CASE("sparse coordinate dump round trip") {
    const Mesh m = builtin_mesh(BuiltinMesh::lshape_fig1);
    const SparseMatrix B = div_matrix(m);
    std::stringstream buf;
    B.write_coordinate(buf);
    CHECK(buf.str().rfind("%%MatrixMarket-compatible", 0) == 0);
    const SparseMatrix re = SparseMatrix::read_coordinate(buf);
    CHECK(re.rows() == B.rows());
    CHECK(re.cols() == B.cols());
    CHECK((re.dense() - B.dense()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mesh tool operations") {
    SUBCASE("cook refined once has 64 cells") {
        const Mesh m = refine_red(builtin_mesh(BuiltinMesh::cook_fig4));
        CHECK(m.num_cells() == 64);
    }
    SUBCASE("square refined twice quarters h") {
        const Mesh m0 = builtin_mesh(BuiltinMesh::square_fig3);
        const Mesh m2 = refine_red(refine_red(m0));
        CHECK(m2.max_diameter() ==
              doctest::Approx(m0.max_diameter() / 4.0).epsilon(1e-14));
    }
    SUBCASE("write then parse is identical") {
        const Mesh m = builtin_mesh(BuiltinMesh::lshape_fig1);
        CHECK(write_mesh(parse_mesh(write_mesh(m))) == write_mesh(m));
    }
}
