#include "eigbound/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCholesky>

#include "eigbound/quadrature.hpp"

namespace eigbound {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;
using Chol = Eigen::SimplicialLLT<SpMat>;

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

VectorXd start_vector(int n, std::uint64_t seed) {
    VectorXd v(n);
    std::uint64_t s = seed;
    for (int i = 0; i < n; ++i)
        v[i] = 2.0 * (static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53) - 1.0;
    const double nrm = v.norm();
    if (nrm == 0.0) throw std::runtime_error("eigensolver: zero start vector");
    return v / nrm;
}

struct LanczosResult {
    std::vector<double> theta;  // converged Ritz values, as ordered by `which`
    MatrixXd vectors;           // corresponding Ritz vectors
    int iterations = 0;
};

/// Plain symmetric Lanczos with full reorthogonalization on an operator.
/// `which` selects the end of the spectrum the requested values are taken
/// from; values are returned ascending. Throws on non-convergence.
LanczosResult lanczos_sym(const std::function<VectorXd(const VectorXd&)>& op,
                          int n, int nev, Which which, const SolveOptions& opts) {
    if (nev > n) throw std::invalid_argument("lanczos: more eigenvalues than dofs");
    const int maxit = std::min(opts.max_iterations, n);

    MatrixXd V(n, std::min(maxit + 1, 256));
    std::vector<double> alpha, beta;
    V.col(0) = start_vector(n, opts.seed);

    // index into the ascending Ritz values for requested position i
    const auto select = [&](int count, int i) {
        return which == Which::smallest ? i : count - nev + i;
    };

    VectorXd w, prev_targets;
    for (int k = 0; k < maxit; ++k) {
        if (k + 1 >= V.cols())
            V.conservativeResize(Eigen::NoChange,
                                 std::min(maxit + 1, 2 * static_cast<int>(V.cols())));
        w = op(V.col(k));
        const double a = V.col(k).dot(w);
        alpha.push_back(a);
        w -= a * V.col(k);
        if (k > 0) w -= beta[k - 1] * V.col(k - 1);
        for (int pass = 0; pass < 2; ++pass)
            w -= V.leftCols(k + 1) * (V.leftCols(k + 1).transpose() * w);
        const double b = w.norm();

        const int m = static_cast<int>(alpha.size());
        const bool breakdown = b < 1e-14;
        const bool check = m >= nev && (breakdown || k + 1 == maxit || m % 20 == 0);
        if (check) {
            const Eigen::Map<const VectorXd> diag(alpha.data(), m);
            const VectorXd sub =
                m > 1 ? VectorXd(Eigen::Map<const VectorXd>(beta.data(), m - 1))
                      : VectorXd();
            Eigen::SelfAdjointEigenSolver<MatrixXd> es;
            // cheap stabilization check first; eigenvectors only when close
            es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
            VectorXd targets(nev);
            for (int i = 0; i < nev; ++i) targets[i] = es.eigenvalues()[select(m, i)];
            bool stable = prev_targets.size() == nev;
            for (int i = 0; stable && i < nev; ++i)
                stable = std::abs(targets[i] - prev_targets[i]) <=
                         0.1 * opts.tol * std::max(std::abs(targets[i]), 1e-30);
            prev_targets = targets;

            if (stable || breakdown || k + 1 == maxit) {
                es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
                bool all_ok = true;
                for (int i = 0; i < nev && all_ok; ++i) {
                    const int idx = select(m, i);
                    const double resid = std::abs(b * es.eigenvectors()(m - 1, idx));
                    if (resid > opts.tol *
                                    std::max(std::abs(es.eigenvalues()[idx]), 1e-30))
                        all_ok = false;
                }
                if (all_ok || breakdown) {
                    LanczosResult out;
                    out.iterations = k + 1;
                    out.vectors.resize(n, nev);
                    out.theta.resize(nev);
                    for (int i = 0; i < nev; ++i) {
                        const int idx = select(m, i);
                        out.theta[i] = es.eigenvalues()[idx];
                        out.vectors.col(i) = V.leftCols(m) * es.eigenvectors().col(idx);
                    }
                    return out;
                }
            }
        }
        if (breakdown)
            throw std::runtime_error("lanczos: breakdown before convergence");
        beta.push_back(b);
        V.col(k + 1) = w / b;
    }
    throw std::runtime_error("lanczos: no convergence within max_iterations");
}

struct PencilOps {
    std::function<VectorXd(const VectorXd&)> apply_k;
    std::function<VectorXd(const VectorXd&)> apply_m;
};

void fill_residuals(SpectrumResult& r, const MatrixXd& vecs, const PencilOps& ops) {
    r.residuals.resize(r.eigenvalues.size());
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
        const VectorXd x = vecs.col(static_cast<int>(i));
        const VectorXd kx = ops.apply_k(x);
        const VectorXd mx = ops.apply_m(x);
        const double denom = std::max(kx.norm(), std::abs(r.eigenvalues[i]) * mx.norm());
        r.residuals[i] = denom > 0.0 ? (kx - r.eigenvalues[i] * mx).norm() / denom : 0.0;
    }
}

/// Factorized-K transform: y = L^{-1} P M P^T L^{-T} y maps the pencil
/// (K, M) to ordinary eigenvalues theta = 1/lambda.
struct KInverseTransform {
    const Chol& chol;
    const SpMat& m;

    VectorXd apply(const VectorXd& y) const {
        VectorXd u = chol.matrixU().solve(y);
        u = chol.permutationPinv() * u;
        VectorXd w = m * u;
        w = chol.permutationP() * w;
        return chol.matrixL().solve(w);
    }
    VectorXd back_transform(const VectorXd& y) const {
        VectorXd u = chol.matrixU().solve(y);
        return chol.permutationPinv() * u;
    }
};

SpectrumResult dense_generalized(const MatrixXd& K, const MatrixXd& M,
                                 const SolveOptions& opts, Which which,
                                 const PencilOps& ops) {
    const int n = static_cast<int>(K.rows());
    const int nev = opts.num_eigenvalues;
    SpectrumResult out;
    out.dof_count = n;

    Eigen::LLT<MatrixXd> mllt(M);
    MatrixXd vecs;
    std::vector<double> lambda;
    if (mllt.info() == Eigen::Success && M.diagonal().minCoeff() > 0.0) {
        Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(K, M);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("dense eigensolver failed");
        out.finite_count = n;
        if (nev > n) throw std::invalid_argument("fewer finite eigenvalues than requested");
        lambda.resize(nev);
        vecs.resize(n, nev);
        for (int i = 0; i < nev; ++i) {
            const int idx = which == Which::smallest ? i : n - nev + i;
            lambda[i] = es.eigenvalues()[idx];
            vecs.col(i) = es.eigenvectors().col(idx);
        }
    } else {
        // semidefinite M: reduce on K = L L^T, theta = 1/lambda
        Eigen::LLT<MatrixXd> kllt(K);
        if (kllt.info() != Eigen::Success)
            throw std::runtime_error("singular pencil: neither side is positive definite");
        const MatrixXd L = kllt.matrixL();
        const MatrixXd C = L.triangularView<Eigen::Lower>().solve(
            MatrixXd(L.triangularView<Eigen::Lower>().solve(M).transpose()));
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (C + C.transpose()));
        const VectorXd& th = es.eigenvalues();  // ascending
        const double cutoff = std::max(th.cwiseAbs().maxCoeff(), 1.0) * n * 1e-14;
        std::vector<int> finite;
        for (int i = n - 1; i >= 0; --i)
            if (th[i] > cutoff) finite.push_back(i);  // descending theta = ascending lambda
        out.finite_count = static_cast<int>(finite.size());
        if (nev > out.finite_count)
            throw std::invalid_argument("fewer finite eigenvalues than requested");
        lambda.resize(nev);
        vecs.resize(n, nev);
        for (int i = 0; i < nev; ++i) {
            const int idx = which == Which::smallest
                                ? finite[i]
                                : finite[out.finite_count - nev + i];
            lambda[i] = 1.0 / th[idx];
            VectorXd x = kllt.matrixU().solve(es.eigenvectors().col(idx));
            vecs.col(i) = x / x.norm();
        }
    }
    out.eigenvalues = std::move(lambda);
    fill_residuals(out, vecs, ops);
    return out;
}

int nonzero_diagonal_count(const SpMat& m) {
    int count = 0;
    for (int i = 0; i < m.rows(); ++i)
        if (m.coeff(i, i) != 0.0) ++count;
    return count;
}

} // namespace

SpectrumResult generalized_sym_eig(const SparseMatrix& K, const SparseMatrix& M,
                                   const SolveOptions& opts, Which which) {
    if (K.rows() != K.cols() || M.rows() != M.cols() || K.rows() != M.rows())
        throw std::invalid_argument("generalized_sym_eig: dimension mismatch");
    if (opts.num_eigenvalues < 0 || !(opts.tol > 0.0))
        throw std::invalid_argument("generalized_sym_eig: invalid options");
    const int n = K.rows();
    const PencilOps ops{[&](const VectorXd& x) { return K.apply(x); },
                        [&](const VectorXd& x) { return M.apply(x); }};
    if (opts.num_eigenvalues == 0)
        return {.eigenvalues = {}, .residuals = {}, .dof_count = n, .finite_count = 0};

    if (n <= opts.dense_threshold)
        return dense_generalized(K.dense(), M.dense(), opts, which, ops);

    SpectrumResult out;
    out.dof_count = n;
    if (which == Which::smallest) {
        Chol chol(K.matrix());
        if (chol.info() != Eigen::Success)
            throw std::runtime_error("generalized_sym_eig: K factorization failed");
        const KInverseTransform tr{chol, M.matrix()};
        LanczosResult lr = lanczos_sym([&](const VectorXd& y) { return tr.apply(y); },
                                       n, opts.num_eigenvalues, Which::largest, opts);
        MatrixXd vecs(n, opts.num_eigenvalues);
        out.eigenvalues.resize(opts.num_eigenvalues);
        // largest theta, ascending within the block: reverse to ascending lambda
        for (int i = 0; i < opts.num_eigenvalues; ++i) {
            const int src = opts.num_eigenvalues - 1 - i;
            if (!(lr.theta[src] > 0.0))
                throw std::runtime_error("generalized_sym_eig: nonpositive transform value");
            out.eigenvalues[i] = 1.0 / lr.theta[src];
            VectorXd x = tr.back_transform(lr.vectors.col(src));
            vecs.col(i) = x / x.norm();
        }
        const int nnzdiag = nonzero_diagonal_count(M.matrix());
        out.finite_count = nnzdiag;  // exact for block-diagonal PSD mass forms
        fill_residuals(out, vecs, ops);
        return out;
    }

    // largest: reduce on M, which must be definite
    Chol chol(M.matrix());
    if (chol.info() != Eigen::Success)
        throw std::runtime_error("generalized_sym_eig: M factorization failed for largest");
    const KInverseTransform tr{chol, K.matrix()};
    LanczosResult lr = lanczos_sym([&](const VectorXd& y) { return tr.apply(y); },
                                   n, opts.num_eigenvalues, Which::largest, opts);
    MatrixXd vecs(n, opts.num_eigenvalues);
    out.eigenvalues.resize(opts.num_eigenvalues);
    for (int i = 0; i < opts.num_eigenvalues; ++i) {
        out.eigenvalues[i] = lr.theta[i];
        VectorXd x = tr.back_transform(lr.vectors.col(i));
        vecs.col(i) = x / x.norm();
    }
    out.finite_count = n;
    fill_residuals(out, vecs, ops);
    return out;
}

namespace {

void require_all_dirichlet(const Mesh& mesh) {
    for (const BoundaryFacet& f : mesh.boundary())
        if (f.label != BoundaryLabel::dirichlet)
            throw std::invalid_argument("mixed solve expects an all-dirichlet boundary");
}

} // namespace

SpectrumResult mixed_eigs_scalar(const Mesh& mesh, const CoefficientField& coeff,
                                 const SolveOptions& opts) {
    require_all_dirichlet(mesh);
    const int nc = mesh.num_cells();
    const int nev = opts.num_eigenvalues;
    if (nev > nc)
        throw std::invalid_argument("mixed_eigs_scalar: more eigenvalues than cells");

    const SparseMatrix Ms = rt0_mass(mesh, coeff);
    const SparseMatrix B = div_matrix(mesh);
    const SparseMatrix Cg = p0_mass(mesh, coeff.gamma);
    const SparseMatrix Ml = p0_mass(mesh, std::vector<double>(nc, 1.0));

    Chol chol(Ms.matrix());
    if (chol.info() != Eigen::Success)
        throw std::runtime_error("mixed_eigs_scalar: RT0 mass factorization failed");

    const auto schur = [&](const VectorXd& u) -> VectorXd {
        const VectorXd f = B.apply_transpose(u);
        return B.apply(chol.solve(f)) + Cg.apply(u);
    };
    const PencilOps ops{schur, [&](const VectorXd& u) { return Ml.apply(u); }};

    SpectrumResult out;
    out.dof_count = nc;
    out.finite_count = nc;

    if (nc <= opts.dense_threshold) {
        const MatrixXd Bt = B.dense().transpose();
        const MatrixXd S = B.dense() * chol.solve(Bt) + Cg.dense();
        Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(
            0.5 * (S + S.transpose()), Ml.dense());
        if (es.info() != Eigen::Success)
            throw std::runtime_error("mixed_eigs_scalar: dense eigensolver failed");
        out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + nev);
        fill_residuals(out, es.eigenvectors().leftCols(nev), ops);
        return out;
    }

    // diagonal mass transform: D^{-1/2} S D^{-1/2}
    VectorXd dhalf(nc);
    for (int t = 0; t < nc; ++t) dhalf[t] = 1.0 / std::sqrt(Ml.coeff(t, t));
    const auto op = [&](const VectorXd& x) -> VectorXd {
        const VectorXd u = dhalf.cwiseProduct(x);
        return dhalf.cwiseProduct(schur(u));
    };
    LanczosResult lr = lanczos_sym(op, nc, nev, Which::smallest, opts);
    out.eigenvalues.assign(lr.theta.begin(), lr.theta.end());
    MatrixXd vecs(nc, nev);
    for (int i = 0; i < nev; ++i) {
        VectorXd u = dhalf.cwiseProduct(lr.vectors.col(i));
        vecs.col(i) = u / u.norm();
    }
    fill_residuals(out, vecs, ops);
    for (double r : out.residuals)
        if (r > 10.0 * opts.tol)
            throw std::runtime_error("mixed_eigs_scalar: residual above tolerance");
    return out;
}

SpectrumResult steklov_eigs(const Mesh& mesh, const SolveOptions& opts) {
    if (!mesh.has_label(BoundaryLabel::steklov))
        throw std::invalid_argument("steklov_eigs: no steklov facets");
    const int ne = mesh.num_edges();

    const SparseMatrix Ms = rt0_mass(mesh, unit_coefficients(mesh));
    const SparseMatrix D = rt0_divdiv(mesh);
    SpMat K = Ms.matrix() + D.matrix();

    std::vector<int> bedge;
    std::vector<double> blen;
    for (int f = 0; f < mesh.num_boundary_facets(); ++f) {
        if (mesh.boundary()[f].label != BoundaryLabel::steklov) continue;
        bedge.push_back(mesh.facet_edge(f));
        blen.push_back(mesh.facet_length(f));
    }
    const int nb = static_cast<int>(bedge.size());
    const int nev = opts.num_eigenvalues;
    if (nev > nb)
        throw std::invalid_argument("steklov_eigs: more eigenvalues than steklov facets");

    Chol chol(K);
    if (chol.info() != Eigen::Success)
        throw std::runtime_error("steklov_eigs: factorization failed");

    // W = (K^{-1}) restricted to the boundary dofs
    MatrixXd X(ne, nb);
    VectorXd e = VectorXd::Zero(ne);
    for (int j = 0; j < nb; ++j) {
        e[bedge[j]] = 1.0;
        X.col(j) = chol.solve(e);
        e[bedge[j]] = 0.0;
    }
    MatrixXd A(nb, nb);
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j)
            A(i, j) = std::sqrt(blen[i]) * X(bedge[i], j) * std::sqrt(blen[j]);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (A + A.transpose()));

    SpectrumResult out;
    out.dof_count = ne;
    out.finite_count = nb;
    out.eigenvalues.resize(nev);
    MatrixXd vecs(ne, nev);
    for (int i = 0; i < nev; ++i) {
        out.eigenvalues[i] = es.eigenvalues()[i];  // ascending, smallest first
        VectorXd zb(nb);
        for (int j = 0; j < nb; ++j)
            zb[j] = std::sqrt(blen[j]) * es.eigenvectors()(j, i);
        VectorXd x = X * zb;
        vecs.col(i) = x / x.norm();
    }

    const auto apply_r = [&](const VectorXd& x) {
        VectorXd y = VectorXd::Zero(ne);
        for (int j = 0; j < nb; ++j) y[bedge[j]] = blen[j] * x[bedge[j]];
        return y;
    };
    // pencil R x = lambda K x
    out.residuals.resize(nev);
    for (int i = 0; i < nev; ++i) {
        const VectorXd x = vecs.col(i);
        const VectorXd rx = apply_r(x);
        const VectorXd kx = K * x;
        out.residuals[i] = (rx - out.eigenvalues[i] * kx).norm() /
                           std::max(rx.norm(), out.eigenvalues[i] * kx.norm());
    }
    return out;
}

SpectrumResult p1_upper_eigs(const Mesh& mesh, UpperProblem problem,
                             const CoefficientField& coeff, const SolveOptions& opts,
                             const ElasticityParams& elast) {
    switch (problem) {
    case UpperProblem::laplace: {
        const DofMap map = p1_dofmap(mesh, /*eliminate_dirichlet=*/true);
        const CoefficientField unit = unit_coefficients(mesh);
        const SparseMatrix K = p1_operator(mesh, map, unit, P1Kind::stiffness);
        const SparseMatrix M = p1_operator(mesh, map, unit, P1Kind::mass);
        return generalized_sym_eig(K, M, opts, Which::smallest);
    }
    case UpperProblem::elliptic: {
        const DofMap map = p1_dofmap(mesh, true);
        const SparseMatrix K = p1_operator(mesh, map, coeff, P1Kind::stiffness);
        const SparseMatrix M = p1_operator(mesh, map, coeff, P1Kind::mass);
        return generalized_sym_eig(K, M, opts, Which::smallest);
    }
    case UpperProblem::steklov: {
        if (!mesh.has_label(BoundaryLabel::steklov))
            throw std::invalid_argument("p1_upper_eigs: no steklov facets");
        const DofMap map = p1_dofmap(mesh, false);
        // -Laplace + identity: fold gamma = 1 into the stiffness
        const CoefficientField c = constant_coefficients(mesh, 1.0, 1.0);
        const SparseMatrix K = p1_operator(mesh, map, c, P1Kind::stiffness);
        P1Params params;
        params.boundary = BoundaryLabel::steklov;
        const SparseMatrix M =
            p1_operator(mesh, map, c, P1Kind::boundary_mass, params);
        return generalized_sym_eig(K, M, opts, Which::smallest);
    }
    case UpperProblem::elasticity: {
        const DofMap map = p1_vector_dofmap(mesh, true);
        P1Params params;
        params.mu = elast.mu;
        params.kappa = elast.kappa;
        const CoefficientField unit = unit_coefficients(mesh);
        const SparseMatrix K =
            p1_operator(mesh, map, unit, P1Kind::elastic_stiffness, params);
        const SparseMatrix M = p1_operator(mesh, map, unit, P1Kind::vector_mass);
        return generalized_sym_eig(K, M, opts, Which::smallest);
    }
    }
    throw std::invalid_argument("p1_upper_eigs: unknown problem");
}

Eigen::VectorXd discrete_gradient(const Mesh& mesh, const CoefficientField& coeff,
                                  const Eigen::VectorXd& v) {
    if (v.size() != mesh.num_cells())
        throw std::invalid_argument("discrete_gradient: one value per cell required");
    const SparseMatrix Ms = rt0_mass(mesh, coeff);
    const SparseMatrix B = div_matrix(mesh);
    Chol chol(Ms.matrix());
    if (chol.info() != Eigen::Success)
        throw std::runtime_error("discrete_gradient: factorization failed");
    return chol.solve(-B.apply_transpose(v));
}

Eigen::VectorXd a_project_field(const Mesh& mesh, const CoefficientField& coeff,
                                const std::function<Vec2(Vec2)>& field,
                                int quad_degree) {
    coeff.validate(mesh);
    const QuadRule& rule = triangle_quadrature(quad_degree);
    VectorXd r = VectorXd::Zero(mesh.num_edges());
    for (int t = 0; t < mesh.num_cells(); ++t) {
        const auto& v = mesh.cells()[t].v;
        const Vec2 p0 = mesh.points()[v[0]];
        const Vec2 p1 = mesh.points()[v[1]];
        const Vec2 p2 = mesh.points()[v[2]];
        const double area = 0.5 * cross(p1 - p0, p2 - p0);
        const CellEdges& ce = mesh.cell_edges(t);
        const std::array<Vec2, 3> corner{p0, p1, p2};
        for (const QuadPoint& q : rule.points) {
            const Vec2 x = barycentric_point(q, p0, p1, p2);
            const Vec2 af = coeff.a_inv[t].apply(field(x));
            for (int k = 0; k < 3; ++k) {
                const Vec2 phi =
                    (ce.sign[k] * ce.length[k] / (2.0 * area)) * (x - corner[k]);
                r[ce.edge[k]] += q.w * area * dot(af, phi);
            }
        }
    }
    const SparseMatrix Ms = rt0_mass(mesh, coeff);
    Chol chol(Ms.matrix());
    if (chol.info() != Eigen::Success)
        throw std::runtime_error("a_project_field: factorization failed");
    return chol.solve(r);
}

Eigen::VectorXd p0_project(const Mesh& mesh, const std::function<double(Vec2)>& f,
                           int quad_degree) {
    const QuadRule& rule = triangle_quadrature(quad_degree);
    VectorXd out(mesh.num_cells());
    for (int t = 0; t < mesh.num_cells(); ++t) {
        const auto& v = mesh.cells()[t].v;
        const Vec2 p0 = mesh.points()[v[0]];
        const Vec2 p1 = mesh.points()[v[1]];
        const Vec2 p2 = mesh.points()[v[2]];
        double avg = 0.0;
        for (const QuadPoint& q : rule.points)
            avg += q.w * f(barycentric_point(q, p0, p1, p2));
        out[t] = avg;  // weights sum to one
    }
    return out;
}

} // namespace eigbound
