#pragma once

#include <vector>

#include "eigbound/coefficients.hpp"
#include "eigbound/mesh.hpp"
#include "eigbound/sparse.hpp"

namespace eigbound {

enum class SpaceKind { rt0, p0_cells, p0_bfacets, p1, p1_vector };

/// Maps mesh entities to global degrees of freedom. Eliminated entities
/// carry -1. RT0 signs live in Mesh::cell_edges().
struct DofMap {
    SpaceKind kind = SpaceKind::p0_cells;
    int count = 0;
    std::vector<int> entity_dof;  // per edge / cell / facet / vertex

    int dof(int entity) const { return entity_dof[entity]; }
};

DofMap rt0_dofmap(const Mesh& mesh);
DofMap p0_dofmap(const Mesh& mesh);
DofMap p0_bfacet_dofmap(const Mesh& mesh, BoundaryLabel label);
/// P1 vertex dofs; when eliminate_dirichlet is set, vertices touching a
/// dirichlet facet are constrained out.
DofMap p1_dofmap(const Mesh& mesh, bool eliminate_dirichlet);

/// RT0 mass matrix with coefficient A^{-1}:  M[e,f] = sum_T (A^{-1} phi_e, phi_f)_T
/// with the basis phi_e = +-(|e|/2|T|)(x - p_e) and p_e the opposite vertex.
/// Exact for cell-wise constant A (degree-2 quadrature).
SparseMatrix rt0_mass(const Mesh& mesh, const CoefficientField& coeff);

/// Divergence form B[T,e] = (div phi_e, 1)_T = +-|e|.
SparseMatrix div_matrix(const Mesh& mesh);

/// Diagonal piecewise-constant mass with entries weight(T) * area(T).
SparseMatrix p0_mass(const Mesh& mesh, const std::vector<double>& weight);

/// Normal-trace form (tau.n, eta) on facets with the given label:
/// N[F,e] = +-|F| when edge e is facet F, the sign reconciling the global
/// edge orientation with the outward normal. The RT0 basis carries unit
/// normal value on its edge, so (N g)_F is the outward flux through F.
SparseMatrix boundary_trace_matrix(const Mesh& mesh, BoundaryLabel label);

/// RT0 div-div form D[e,f] = sum_T (div phi_e, div phi_f)_T.
SparseMatrix rt0_divdiv(const Mesh& mesh);

enum class P1Kind { stiffness, mass, boundary_mass, elastic_stiffness, vector_mass };

struct P1Params {
    double mu = 1.0;      // elastic_stiffness
    double kappa = 0.0;   // elastic_stiffness: C(E) = 2 mu E + kappa tr(E) I
    BoundaryLabel boundary = BoundaryLabel::steklov;  // boundary_mass facets
};

/// Conforming P1 operators on the dofs of `map` (scalar kinds expect a p1
/// map, vector kinds a p1_vector map). stiffness assembles
/// (A grad u, grad v) + (gamma u, v) with the lower-order term folded in.
SparseMatrix p1_operator(const Mesh& mesh, const DofMap& map,
                         const CoefficientField& coeff, P1Kind kind,
                         const P1Params& params = {});

DofMap p1_vector_dofmap(const Mesh& mesh, bool eliminate_dirichlet);

} // namespace eigbound
