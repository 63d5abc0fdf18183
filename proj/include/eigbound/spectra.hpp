#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "eigbound/assemble.hpp"
#include "eigbound/coefficients.hpp"
#include "eigbound/mesh.hpp"
#include "eigbound/sparse.hpp"

namespace eigbound {

struct SolveOptions {
    double tol = 1e-9;            // relative residual target
    int max_iterations = 2000;
    int num_eigenvalues = 3;      // J
    std::uint64_t seed = 0x1d872b41c8e5a365ull;
    int dense_threshold = 600;    // dense route for pencils up to this size
};

struct SpectrumResult {
    std::vector<double> eigenvalues;   // ascending
    std::vector<double> residuals;     // per pair: |K x - lambda M x| / |K x|
    int dof_count = 0;
    int finite_count = 0;
};

enum class Which { smallest, largest };

/// Generalized symmetric pencil K x = lambda M x for explicit sparse
/// matrices. M may be positive semidefinite; only finite eigenvalues are
/// reported and finite_count gives their number. Deterministic for a fixed
/// seed.
SpectrumResult generalized_sym_eig(const SparseMatrix& K, const SparseMatrix& M,
                                   const SolveOptions& opts, Which which);

/// Smallest eigenvalues of the dual mixed discretization of
/// -div(A grad u) + gamma u = lambda u with Dirichlet boundary: the P0
/// pencil (B Msigma^{-1} B^T + C) u = lambda M u, with Msigma^{-1} applied
/// through a cached sparse factorization (dense fallback below the
/// threshold).
SpectrumResult mixed_eigs_scalar(const Mesh& mesh, const CoefficientField& coeff,
                                 const SolveOptions& opts);

/// Steklov eigenvalues from the positive definite dual form
/// (sigma,tau) + (div sigma, div tau) = lambda^{-1} (sigma.n, tau.n):
/// boundary-Schur reduction of the pencil to the steklov facet dofs.
/// finite_count equals the number of steklov facets.
SpectrumResult steklov_eigs(const Mesh& mesh, const SolveOptions& opts);

enum class UpperProblem { laplace, elliptic, steklov, elasticity };

struct ElasticityParams {
    double mu = 1.0;
    double kappa = 100.0;
};

/// Conforming P1 (or vector-P1) eigenvalues; Rayleigh-Ritz upper bounds for
/// the exact eigenvalues.
SpectrumResult p1_upper_eigs(const Mesh& mesh, UpperProblem problem,
                             const CoefficientField& coeff, const SolveOptions& opts,
                             const ElasticityParams& elast = {});

/// Discrete gradient: solves Msigma g = -B^T v for per-cell values v.
Eigen::VectorXd discrete_gradient(const Mesh& mesh, const CoefficientField& coeff,
                                  const Eigen::VectorXd& v);

/// a-orthogonal projection of a closed-form vector field onto RT0:
/// solves Msigma p = r with r_e = integral (A^{-1} field) . phi_e.
Eigen::VectorXd a_project_field(const Mesh& mesh, const CoefficientField& coeff,
                                const std::function<Vec2(Vec2)>& field,
                                int quad_degree);

/// Cell averages of a closed-form function (the P0 projection), integrated
/// with the given quadrature degree.
Eigen::VectorXd p0_project(const Mesh& mesh, const std::function<double(Vec2)>& f,
                           int quad_degree);

} // namespace eigbound
