#include "eigbound/coefficients.hpp"

#include <stdexcept>

namespace eigbound {

void CoefficientField::validate(const Mesh& mesh) const {
    const std::size_t n = static_cast<std::size_t>(mesh.num_cells());
    if (a_inv.size() != n || gamma.size() != n)
        throw std::invalid_argument("CoefficientField: size does not match mesh");
    if (!(a0 > 0.0) || gamma0 < 0.0)
        throw std::invalid_argument("CoefficientField: invalid bounds");
    for (std::size_t t = 0; t < n; ++t) {
        const SymMat2 a = a_inv[t].inverse();
        if (!(a.min_eigenvalue() > 0.0))
            throw std::invalid_argument("CoefficientField: A not positive definite");
        if (a.min_eigenvalue() < a0 * (1.0 - 1e-12))
            throw std::invalid_argument("CoefficientField: a0 exceeds min eigenvalue of A");
        if (gamma[t] < 0.0 || gamma[t] < gamma0 * (1.0 - 1e-12))
            throw std::invalid_argument("CoefficientField: gamma below gamma0 or negative");
    }
}

CoefficientField unit_coefficients(const Mesh& mesh) {
    return constant_coefficients(mesh, 1.0, 0.0);
}

CoefficientField constant_coefficients(const Mesh& mesh, double a, double g) {
    CoefficientField c;
    c.a_inv.assign(mesh.num_cells(), SymMat2::scaled_identity(1.0 / a));
    c.gamma.assign(mesh.num_cells(), g);
    c.a0 = a;
    c.gamma0 = g;
    return c;
}

CoefficientField square_fig3_coefficients(const Mesh& mesh) {
    CoefficientField c;
    c.a_inv.reserve(mesh.num_cells());
    c.gamma.reserve(mesh.num_cells());
    for (const Cell& cell : mesh.cells()) {
        const double a = (cell.region & 1) ? 3.0 : 1.0;
        c.a_inv.push_back(SymMat2::scaled_identity(1.0 / a));
        c.gamma.push_back((cell.region & 2) ? 5.0 : 4.0);
    }
    c.a0 = 1.0;
    c.gamma0 = 4.0;
    return c;
}

} // namespace eigbound
