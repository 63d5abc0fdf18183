#include <doctest.h>

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include "eigbound/assemble.hpp"
#include "eigbound/quadrature.hpp"
#include "test_support.hpp"

using namespace eigbound;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using testsupport::single_triangle;
using testsupport::two_cell_square;

namespace {

/// RT0 interpolant of a smooth field. The basis has unit normal value on its
/// edge, so the coefficient is the mean normal component (Simpson on the
/// edge, exact through quadratic normal components).
VectorXd rt0_interpolate(const Mesh& m, const std::function<Vec2(Vec2)>& field) {
    VectorXd g(m.num_edges());
    for (int e = 0; e < m.num_edges(); ++e) {
        const Vec2 pa = m.points()[m.edges()[e].a];
        const Vec2 pb = m.points()[m.edges()[e].b];
        const Vec2 t = (pb - pa) / norm(pb - pa);
        const Vec2 n{t.y, -t.x};
        const Vec2 f0 = field(pa), f1 = field(0.5 * (pa + pb)), f2 = field(pb);
        g[e] = (dot(f0, n) + 4.0 * dot(f1, n) + dot(f2, n)) / 6.0;
    }
    return g;
}

/// Slow independent reassembly of the RT0 mass matrix: signs recomputed from
/// scratch, degree-4 quadrature.
MatrixXd naive_rt0_mass(const Mesh& m, const CoefficientField& coeff) {
    MatrixXd M = MatrixXd::Zero(m.num_edges(), m.num_edges());
    const QuadRule& rule = triangle_quadrature(4);
    for (int t = 0; t < m.num_cells(); ++t) {
        const auto& v = m.cells()[t].v;
        const Vec2 P[3] = {m.points()[v[0]], m.points()[v[1]], m.points()[v[2]]};
        const double area = 0.5 * cross(P[1] - P[0], P[2] - P[0]);
        int eid[3];
        double sgn[3], len[3];
        for (int k = 0; k < 3; ++k) {
            const int a = v[(k + 1) % 3], b = v[(k + 2) % 3];
            eid[k] = m.edge_index(a, b);
            const Vec2 pa = m.points()[std::min(a, b)];
            const Vec2 pb = m.points()[std::max(a, b)];
            len[k] = norm(pb - pa);
            const Vec2 tg = (pb - pa) / len[k];
            const Vec2 n{tg.y, -tg.x};
            sgn[k] = dot(n, 0.5 * (pa + pb) - P[k]) > 0 ? 1.0 : -1.0;
        }
        for (const QuadPoint& q : rule.points) {
            const Vec2 x = barycentric_point(q, P[0], P[1], P[2]);
            Vec2 phi[3];
            for (int k = 0; k < 3; ++k)
                phi[k] = (sgn[k] * len[k] / (2.0 * area)) * (x - P[k]);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    M(eid[i], eid[j]) +=
                        q.w * area * dot(coeff.a_inv[t].apply(phi[i]), phi[j]);
        }
    }
    return M;
}

MatrixXd naive_p1_stiffness(const Mesh& m, const CoefficientField& coeff) {
    MatrixXd K = MatrixXd::Zero(m.num_points(), m.num_points());
    for (int t = 0; t < m.num_cells(); ++t) {
        const auto& v = m.cells()[t].v;
        const Vec2 P[3] = {m.points()[v[0]], m.points()[v[1]], m.points()[v[2]]};
        const double a2 = cross(P[1] - P[0], P[2] - P[0]);
        const Vec2 g[3] = {{(P[1].y - P[2].y) / a2, (P[2].x - P[1].x) / a2},
                           {(P[2].y - P[0].y) / a2, (P[0].x - P[2].x) / a2},
                           {(P[0].y - P[1].y) / a2, (P[1].x - P[0].x) / a2}};
        const SymMat2 a = coeff.a_inv[t].inverse();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                K(v[i], v[j]) += dot(a.apply(g[i]), g[j]) * a2 / 2.0 +
                                 coeff.gamma[t] * a2 / 24.0 * (i == j ? 2.0 : 1.0);
    }
    return K;
}

// (N g)_F is the outward flux through facet F
double total_flux_from_trace(const SparseMatrix& N, const VectorXd& g) {
    return N.apply(g).sum();
}

} // namespace

TEST_CASE("rt0_mass: reference right-isosceles element matrix") {
    const Mesh m = single_triangle({0, 0}, {1, 0}, {0, 1});
    const SparseMatrix M = rt0_mass(m, unit_coefficients(m));
    // global edges sorted: (0,1), (0,2), (1,2)
    MatrixXd ref(3, 3);
    ref << 1.0 / 3, 1.0 / 6, 0.0,
           1.0 / 6, 1.0 / 3, 0.0,
           0.0,     0.0,     1.0 / 3;
    CHECK((M.dense() - ref).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("rt0_mass: A = alpha I scales by 1/alpha") {
    const Mesh m = builtin_mesh(BuiltinMesh::lshape_fig1);
    const SparseMatrix M1 = rt0_mass(m, unit_coefficients(m));
    const SparseMatrix Ma = rt0_mass(m, constant_coefficients(m, 2.5, 0.0));
    CHECK((Ma.dense() * 2.5 - M1.dense()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("rt0_mass: SPD on the lshape") {
    const Mesh m = builtin_mesh(BuiltinMesh::lshape_fig1);
    const SparseMatrix M = rt0_mass(m, unit_coefficients(m));
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(M.dense());
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(M.matrix());
    CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("div_matrix: single triangle row") {
    const Mesh m = single_triangle({0, 0}, {1, 0}, {0, 1});
    const SparseMatrix B = div_matrix(m);
    CHECK(B.coeff(0, 0) == doctest::Approx(1.0));             // edge (0,1)
    CHECK(B.coeff(0, 1) == doctest::Approx(-1.0));            // edge (0,2)
    CHECK(B.coeff(0, 2) == doctest::Approx(std::sqrt(2.0)));  // hypotenuse
    double abs_sum = 0.0;
    for (int e = 0; e < 3; ++e) abs_sum += std::abs(B.coeff(0, e));
    CHECK(abs_sum == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("div_matrix: interior edge has opposite-sign entries") {
    const Mesh m = two_cell_square();
    const SparseMatrix B = div_matrix(m);
    const int diag = m.edge_index(0, 2);
    REQUIRE(diag >= 0);
    const double b0 = B.coeff(0, diag);
    const double b1 = B.coeff(1, diag);
    CHECK(b0 * b1 < 0.0);
    CHECK(std::abs(b0) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("div_matrix: interpolated constant field is divergence free") {
    const Mesh m = refine_red(two_cell_square());
    const SparseMatrix B = div_matrix(m);
    const VectorXd g = rt0_interpolate(m, [](Vec2) { return Vec2{0.3, -1.7}; });
    CHECK(B.apply(g).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("p0_mass") {
    const Mesh m = builtin_mesh(BuiltinMesh::square_fig3);
    SUBCASE("unit weight trace = area") {
        const SparseMatrix M = p0_mass(m, std::vector<double>(m.num_cells(), 1.0));
        double tr = 0.0;
        for (int t = 0; t < m.num_cells(); ++t) tr += M.coeff(t, t);
        CHECK(tr == doctest::Approx(4.0).epsilon(1e-14));
    }
    SUBCASE("zero weight") {
        const SparseMatrix M = p0_mass(m, std::vector<double>(m.num_cells(), 0.0));
        CHECK(M.dense().cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("gamma strips") {
        const CoefficientField c = square_fig3_coefficients(m);
        const SparseMatrix M = p0_mass(m, c.gamma);
        for (int t = 0; t < m.num_cells(); ++t) {
            const Vec2 cen = (m.points()[m.cells()[t].v[0]] +
                              m.points()[m.cells()[t].v[1]] +
                              m.points()[m.cells()[t].v[2]]) / 3.0;
            const double expect = (std::abs(cen.y) > 0.5 ? 5.0 : 4.0) *
                                  cell_geometry(m, t).area;
            CHECK(M.coeff(t, t) == doctest::Approx(expect).epsilon(1e-14));
        }
    }
}

TEST_CASE("boundary_trace_matrix") {
    SUBCASE("two-cell unit square, all steklov") {
        const Mesh m = two_cell_square(0, 0, 1, BoundaryLabel::steklov);
        const SparseMatrix N = boundary_trace_matrix(m, BoundaryLabel::steklov);
        CHECK(N.rows() == 4);
        CHECK(N.matrix().nonZeros() == 4);
        for (int k = 0; k < N.matrix().outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(N.matrix(), k); it; ++it)
                CHECK(std::abs(it.value()) == doctest::Approx(1.0));
    }
    SUBCASE("label absent") {
        const Mesh m = two_cell_square();
        CHECK_THROWS_AS(boundary_trace_matrix(m, BoundaryLabel::steklov),
                        std::invalid_argument);
    }
    SUBCASE("outward flux of (x,y)/2 on the centered square is |F|/2") {
        const Mesh m = two_cell_square(-1, -1, 2, BoundaryLabel::steklov);
        const SparseMatrix N = boundary_trace_matrix(m, BoundaryLabel::steklov);
        const VectorXd g = rt0_interpolate(m, [](Vec2 p) { return 0.5 * p; });
        const VectorXd ng = N.apply(g);
        const DofMap map = p0_bfacet_dofmap(m, BoundaryLabel::steklov);
        for (int f = 0; f < m.num_boundary_facets(); ++f) {
            const double len = m.facet_length(f);
            CHECK(ng[map.entity_dof[f]] ==
                  doctest::Approx(len / 2).epsilon(1e-13));
        }
    }
}

TEST_CASE("divergence theorem: cell sums equal total boundary flux") {
    const Mesh meshes[] = {builtin_mesh(BuiltinMesh::lshape_fig1),
                           refine_red(two_cell_square())};
    for (const Mesh& m : meshes) {
        const SparseMatrix B = div_matrix(m);
        const SparseMatrix N = boundary_trace_matrix(m, BoundaryLabel::dirichlet);
        const VectorXd g = rt0_interpolate(m, [](Vec2) { return Vec2{1.25, -0.4}; });
        const double vol_sum = B.apply(g).sum();
        const double flux = total_flux_from_trace(N, g);
        CHECK(vol_sum - flux == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(std::abs(vol_sum) < 1e-12);  // constant field
    }
}

TEST_CASE("p1_operator: reference stiffness element matrix") {
    const Mesh m = single_triangle({0, 0}, {1, 0}, {0, 1});
    const DofMap map = p1_dofmap(m, false);
    const SparseMatrix K = p1_operator(m, map, unit_coefficients(m), P1Kind::stiffness);
    MatrixXd ref(3, 3);
    ref << 1.0, -0.5, -0.5,
          -0.5, 0.5, 0.0,
          -0.5, 0.0, 0.5;
    CHECK((K.dense() - ref).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("p1_operator: mass total = area") {
    const Mesh m = refine_red(two_cell_square());
    const DofMap map = p1_dofmap(m, false);
    const SparseMatrix M = p1_operator(m, map, unit_coefficients(m), P1Kind::mass);
    CHECK(M.dense().sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("p1_operator: elastic stiffness annihilates rigid motions") {
    const Mesh m = builtin_mesh(BuiltinMesh::cook_fig4);
    const DofMap map = p1_vector_dofmap(m, /*eliminate_dirichlet=*/false);
    P1Params params;
    params.mu = 1.0;
    params.kappa = 100.0;
    const SparseMatrix K =
        p1_operator(m, map, unit_coefficients(m), P1Kind::elastic_stiffness, params);
    const double kscale = K.dense().cwiseAbs().maxCoeff();
    for (int mode = 0; mode < 3; ++mode) {
        VectorXd r(map.count);
        for (int v = 0; v < m.num_points(); ++v) {
            const Vec2 p = m.points()[v];
            Vec2 val;
            if (mode == 0) val = {1, 0};
            else if (mode == 1) val = {0, 1};
            else val = {-p.y, p.x};
            r[map.entity_dof[2 * v]] = val.x;
            r[map.entity_dof[2 * v + 1]] = val.y;
        }
        CHECK(K.apply(r).cwiseAbs().maxCoeff() <
              1e-12 * kscale * r.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("slow reassembly oracle (<= 50 cells)") {
    const Mesh meshes[] = {builtin_mesh(BuiltinMesh::lshape_fig1),
                           builtin_mesh(BuiltinMesh::cook_fig4)};
    for (const Mesh& m : meshes) {
        const CoefficientField c = constant_coefficients(m, 1.0, 0.7);
        const MatrixXd fast = rt0_mass(m, c).dense();
        const MatrixXd slow = naive_rt0_mass(m, c);
        CHECK((fast - slow).cwiseAbs().maxCoeff() <
              1e-13 * slow.cwiseAbs().maxCoeff());

        const DofMap map = p1_dofmap(m, false);
        const MatrixXd kfast = p1_operator(m, map, c, P1Kind::stiffness).dense();
        const MatrixXd kslow = naive_p1_stiffness(m, c);
        CHECK((kfast - kslow).cwiseAbs().maxCoeff() <
              1e-13 * kslow.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("assembled matrices are symmetric and stiffness is SPD") {
    const Mesh m = builtin_mesh(BuiltinMesh::square_fig3);
    const CoefficientField c = square_fig3_coefficients(m);
    const MatrixXd Ms = rt0_mass(m, c).dense();
    CHECK((Ms - Ms.transpose()).cwiseAbs().maxCoeff() <
          1e-15 * Ms.cwiseAbs().maxCoeff());

    const DofMap map = p1_dofmap(m, true);
    const SparseMatrix K = p1_operator(m, map, c, P1Kind::stiffness);
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(K.matrix());
    CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("assembly stays local under refinement") {
    const Mesh m = refine_red(builtin_mesh(BuiltinMesh::cook_fig4));
    const CoefficientField c = unit_coefficients(m);
    const MatrixXd fast = rt0_mass(m, c).dense();
    const MatrixXd slow = naive_rt0_mass(m, c);
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-13 * slow.cwiseAbs().maxCoeff());
}

TEST_CASE("quadrature rules integrate monomials exactly") {
    // reference-triangle integral of x^a y^b is a! b! / (a+b+2)!
    auto exact = [](int a, int b) {
        auto fact = [](int n) {
            double f = 1.0;
            for (int i = 2; i <= n; ++i) f *= i;
            return f;
        };
        return fact(a) * fact(b) / fact(a + b + 2);
    };
    for (int degree : {2, 4, 6, 8}) {
        const QuadRule& rule = triangle_quadrature(degree);
        for (int a = 0; a <= degree; ++a) {
            for (int b = 0; a + b <= degree; ++b) {
                double val = 0.0;
                for (const QuadPoint& q : rule.points)
                    val += q.w * std::pow(q.l1, a) * std::pow(q.l2, b);
                val *= 0.5;  // reference area
                CHECK(val == doctest::Approx(exact(a, b)).epsilon(1e-12));
            }
        }
    }
    CHECK_THROWS_AS(triangle_quadrature(9), std::invalid_argument);
}

TEST_CASE("dofmaps") {
    const Mesh m = builtin_mesh(BuiltinMesh::lshape_fig1);
    CHECK(rt0_dofmap(m).count == m.num_edges());
    CHECK(p0_dofmap(m).count == m.num_cells());
    CHECK(p0_bfacet_dofmap(m, BoundaryLabel::dirichlet).count == 16);
    CHECK(p1_dofmap(m, false).count == 21);
    CHECK(p1_dofmap(m, true).count == 5);  // 16 boundary vertices eliminated
    CHECK(p1_vector_dofmap(m, true).count == 10);
}
