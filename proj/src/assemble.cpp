#include "eigbound/assemble.hpp"

#include <numeric>
#include <stdexcept>

#include "eigbound/quadrature.hpp"

namespace eigbound {

DofMap rt0_dofmap(const Mesh& mesh) {
    DofMap m{SpaceKind::rt0, mesh.num_edges(), {}};
    m.entity_dof.resize(mesh.num_edges());
    std::iota(m.entity_dof.begin(), m.entity_dof.end(), 0);
    return m;
}

DofMap p0_dofmap(const Mesh& mesh) {
    DofMap m{SpaceKind::p0_cells, mesh.num_cells(), {}};
    m.entity_dof.resize(mesh.num_cells());
    std::iota(m.entity_dof.begin(), m.entity_dof.end(), 0);
    return m;
}

DofMap p0_bfacet_dofmap(const Mesh& mesh, BoundaryLabel label) {
    DofMap m{SpaceKind::p0_bfacets, 0, {}};
    m.entity_dof.assign(mesh.num_boundary_facets(), -1);
    for (int f = 0; f < mesh.num_boundary_facets(); ++f)
        if (mesh.boundary()[f].label == label) m.entity_dof[f] = m.count++;
    if (m.count == 0)
        throw std::invalid_argument("p0_bfacet_dofmap: label absent from mesh");
    return m;
}

DofMap p1_dofmap(const Mesh& mesh, bool eliminate_dirichlet) {
    DofMap m{SpaceKind::p1, 0, {}};
    m.entity_dof.assign(mesh.num_points(), 0);
    if (eliminate_dirichlet) {
        for (const BoundaryFacet& f : mesh.boundary()) {
            if (f.label == BoundaryLabel::dirichlet) {
                m.entity_dof[f.a] = -1;
                m.entity_dof[f.b] = -1;
            }
        }
    }
    for (int v = 0; v < mesh.num_points(); ++v)
        if (m.entity_dof[v] == 0) m.entity_dof[v] = m.count++;
        else m.entity_dof[v] = -1;
    if (m.count == 0)
        throw std::invalid_argument("p1_dofmap: no dofs left after elimination");
    return m;
}

DofMap p1_vector_dofmap(const Mesh& mesh, bool eliminate_dirichlet) {
    DofMap scalar = p1_dofmap(mesh, eliminate_dirichlet);
    DofMap m{SpaceKind::p1_vector, 2 * scalar.count, {}};
    m.entity_dof.assign(2 * mesh.num_points(), -1);
    for (int v = 0; v < mesh.num_points(); ++v) {
        if (scalar.entity_dof[v] >= 0) {
            m.entity_dof[2 * v] = 2 * scalar.entity_dof[v];
            m.entity_dof[2 * v + 1] = 2 * scalar.entity_dof[v] + 1;
        }
    }
    return m;
}

namespace {

struct CellFrame {
    std::array<Vec2, 3> p;
    double area;
};

CellFrame frame(const Mesh& mesh, int t) {
    const auto& v = mesh.cells()[t].v;
    CellFrame f{{mesh.points()[v[0]], mesh.points()[v[1]], mesh.points()[v[2]]}, 0.0};
    f.area = 0.5 * cross(f.p[1] - f.p[0], f.p[2] - f.p[0]);
    if (!(f.area > 0.0)) throw std::runtime_error("assemble: degenerate cell");
    return f;
}

} // namespace

SparseMatrix rt0_mass(const Mesh& mesh, const CoefficientField& coeff) {
    coeff.validate(mesh);
    SparseMatrix M(mesh.num_edges(), mesh.num_edges(), /*symmetric=*/true);
    const QuadRule& rule = triangle_quadrature(2);
    for (int t = 0; t < mesh.num_cells(); ++t) {
        const CellFrame fr = frame(mesh, t);
        const CellEdges& ce = mesh.cell_edges(t);
        const SymMat2 a_inv = coeff.a_inv[t];
        for (const QuadPoint& q : rule.points) {
            const Vec2 x = barycentric_point(q, fr.p[0], fr.p[1], fr.p[2]);
            std::array<Vec2, 3> phi;
            for (int k = 0; k < 3; ++k)
                phi[k] = (ce.sign[k] * ce.length[k] / (2.0 * fr.area)) * (x - fr.p[k]);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    M.add(ce.edge[i], ce.edge[j],
                          q.w * fr.area * dot(a_inv.apply(phi[i]), phi[j]));
        }
    }
    M.finalize();
    return M;
}

SparseMatrix div_matrix(const Mesh& mesh) {
    SparseMatrix B(mesh.num_cells(), mesh.num_edges());
    for (int t = 0; t < mesh.num_cells(); ++t) {
        const CellEdges& ce = mesh.cell_edges(t);
        for (int k = 0; k < 3; ++k)
            B.add(t, ce.edge[k], ce.sign[k] * ce.length[k]);
    }
    B.finalize();
    return B;
}

SparseMatrix p0_mass(const Mesh& mesh, const std::vector<double>& weight) {
    if (weight.size() != static_cast<std::size_t>(mesh.num_cells()))
        throw std::invalid_argument("p0_mass: weight size mismatch");
    SparseMatrix M(mesh.num_cells(), mesh.num_cells(), /*symmetric=*/true);
    for (int t = 0; t < mesh.num_cells(); ++t) {
        if (weight[t] < 0.0)
            throw std::invalid_argument("p0_mass: negative weight");
        M.add(t, t, weight[t] * frame(mesh, t).area);
    }
    M.finalize();
    return M;
}

SparseMatrix boundary_trace_matrix(const Mesh& mesh, BoundaryLabel label) {
    const DofMap map = p0_bfacet_dofmap(mesh, label);
    SparseMatrix N(map.count, mesh.num_edges());
    for (int f = 0; f < mesh.num_boundary_facets(); ++f) {
        if (map.entity_dof[f] < 0) continue;
        const int e = mesh.facet_edge(f);
        const int t = mesh.facet_cell(f);
        const CellEdges& ce = mesh.cell_edges(t);
        for (int k = 0; k < 3; ++k) {
            if (ce.edge[k] == e)
                N.add(map.entity_dof[f], e, ce.sign[k] * ce.length[k]);
        }
    }
    N.finalize();
    return N;
}

SparseMatrix rt0_divdiv(const Mesh& mesh) {
    SparseMatrix D(mesh.num_edges(), mesh.num_edges(), /*symmetric=*/true);
    for (int t = 0; t < mesh.num_cells(); ++t) {
        const CellFrame fr = frame(mesh, t);
        const CellEdges& ce = mesh.cell_edges(t);
        // div phi_k = sign * |e_k| / |T|, constant
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                D.add(ce.edge[i], ce.edge[j],
                      ce.sign[i] * ce.length[i] * ce.sign[j] * ce.length[j] / fr.area);
    }
    D.finalize();
    return D;
}

namespace {

// gradients of the barycentric functions
std::array<Vec2, 3> p1_gradients(const CellFrame& fr) {
    const double a2 = 2.0 * fr.area;
    return {Vec2{(fr.p[1].y - fr.p[2].y) / a2, (fr.p[2].x - fr.p[1].x) / a2},
            Vec2{(fr.p[2].y - fr.p[0].y) / a2, (fr.p[0].x - fr.p[2].x) / a2},
            Vec2{(fr.p[0].y - fr.p[1].y) / a2, (fr.p[1].x - fr.p[0].x) / a2}};
}

SparseMatrix p1_scalar_operator(const Mesh& mesh, const DofMap& map,
                                const CoefficientField& coeff, P1Kind kind,
                                const P1Params& params) {
    SparseMatrix M(map.count, map.count, /*symmetric=*/true);
    if (kind == P1Kind::boundary_mass) {
        for (int f = 0; f < mesh.num_boundary_facets(); ++f) {
            const BoundaryFacet& bf = mesh.boundary()[f];
            if (bf.label != params.boundary) continue;
            const double len = mesh.facet_length(f);
            const int d[2] = {map.entity_dof[bf.a], map.entity_dof[bf.b]};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    if (d[i] >= 0 && d[j] >= 0)
                        M.add(d[i], d[j], len / 6.0 * (i == j ? 2.0 : 1.0));
        }
        M.finalize();
        return M;
    }

    for (int t = 0; t < mesh.num_cells(); ++t) {
        const CellFrame fr = frame(mesh, t);
        const auto& v = mesh.cells()[t].v;
        const int d[3] = {map.entity_dof[v[0]], map.entity_dof[v[1]],
                          map.entity_dof[v[2]]};
        const auto g = p1_gradients(fr);
        const SymMat2 a = coeff.a_inv[t].inverse();
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (d[i] < 0 || d[j] < 0) continue;
                double val = 0.0;
                if (kind == P1Kind::stiffness)
                    val = dot(a.apply(g[i]), g[j]) * fr.area +
                          coeff.gamma[t] * fr.area / 12.0 * (i == j ? 2.0 : 1.0);
                else  // mass
                    val = fr.area / 12.0 * (i == j ? 2.0 : 1.0);
                M.add(d[i], d[j], val);
            }
        }
    }
    M.finalize();
    return M;
}

SparseMatrix p1_vector_operator(const Mesh& mesh, const DofMap& map, P1Kind kind,
                                const P1Params& params) {
    SparseMatrix M(map.count, map.count, /*symmetric=*/true);
    for (int t = 0; t < mesh.num_cells(); ++t) {
        const CellFrame fr = frame(mesh, t);
        const auto& v = mesh.cells()[t].v;
        const auto g = p1_gradients(fr);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                for (int ci = 0; ci < 2; ++ci) {
                    const int di = map.entity_dof[2 * v[i] + ci];
                    if (di < 0) continue;
                    for (int cj = 0; cj < 2; ++cj) {
                        const int dj = map.entity_dof[2 * v[j] + cj];
                        if (dj < 0) continue;
                        double val = 0.0;
                        if (kind == P1Kind::vector_mass) {
                            if (ci == cj) val = fr.area / 12.0 * (i == j ? 2.0 : 1.0);
                        } else {
                            // eps(e_ci lam_i) : eps(e_cj lam_j) terms
                            const double gi[2] = {g[i].x, g[i].y};
                            const double gj[2] = {g[j].x, g[j].y};
                            double eps_ij = 0.0;  // 2 eps_i : eps_j
                            if (ci == cj)
                                eps_ij = gi[0] * gj[0] + gi[1] * gj[1] +
                                         gi[ci] * gj[cj];
                            else
                                eps_ij = gi[cj] * gj[ci];
                            const double div_i = gi[ci];
                            const double div_j = gj[cj];
                            val = (params.mu * eps_ij +
                                   params.kappa * div_i * div_j) * fr.area;
                        }
                        M.add(di, dj, val);
                    }
                }
            }
        }
    }
    M.finalize();
    return M;
}

} // namespace

SparseMatrix p1_operator(const Mesh& mesh, const DofMap& map,
                         const CoefficientField& coeff, P1Kind kind,
                         const P1Params& params) {
    switch (kind) {
    case P1Kind::stiffness:
    case P1Kind::mass:
    case P1Kind::boundary_mass:
        if (map.kind != SpaceKind::p1)
            throw std::invalid_argument("p1_operator: scalar kind needs a p1 dofmap");
        return p1_scalar_operator(mesh, map, coeff, kind, params);
    case P1Kind::elastic_stiffness:
    case P1Kind::vector_mass:
        if (map.kind != SpaceKind::p1_vector)
            throw std::invalid_argument("p1_operator: vector kind needs a p1_vector dofmap");
        return p1_vector_operator(mesh, map, kind, params);
    }
    throw std::invalid_argument("p1_operator: unknown kind");
}

} // namespace eigbound
