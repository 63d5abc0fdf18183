#pragma once

#include <vector>

#include "eigbound/geometry.hpp"
#include "eigbound/mesh.hpp"

namespace eigbound {

/// Piecewise-constant diffusion A (stored as its inverse) and reaction gamma,
/// one value per cell, with global lower bounds a0 and gamma0.
struct CoefficientField {
    std::vector<SymMat2> a_inv;   // per cell
    std::vector<double> gamma;    // per cell, >= 0
    double a0 = 1.0;              // lower spectral bound of A
    double gamma0 = 0.0;          // lower bound of gamma

    void validate(const Mesh& mesh) const;
};

/// A = I, gamma = 0.
CoefficientField unit_coefficients(const Mesh& mesh);

/// Constant isotropic A = a*I and constant gamma.
CoefficientField constant_coefficients(const Mesh& mesh, double a, double g);

/// The checkerboard/strip coefficients of the square_fig3 problem, resolved
/// through the mesh region tags: A = (3 or 1) I by quadrant, gamma = 4 or 5
/// by horizontal strip; a0 = 1, gamma0 = 4.
CoefficientField square_fig3_coefficients(const Mesh& mesh);

} // namespace eigbound
