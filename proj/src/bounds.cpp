#include "eigbound/bounds.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eigbound {

namespace {

constexpr double kPi = std::numbers::pi;

double poincare_value(PoincareConstant c) {
    return c == PoincareConstant::poincare_pi ? kPi : kBesselJ11;
}

double shear_factor(ShearScale s) { return s == ShearScale::two_mu ? 2.0 : 1.0; }

} // namespace

double lb_transform(double lambda_h, double delta_sq) {
    if (lambda_h < 0.0 || delta_sq < 0.0)
        throw std::invalid_argument("lb_transform: negative argument");
    if (lambda_h == 0.0) return 0.0;
    return lambda_h / (1.0 + delta_sq * lambda_h);
}

double lb_transform_shifted(double lambda_h, double delta_sq, double gamma0) {
    if (gamma0 < 0.0 || delta_sq < 0.0)
        throw std::invalid_argument("lb_transform_shifted: negative argument");
    if (lambda_h < gamma0)
        throw std::invalid_argument("lb_transform_shifted: lambda_h below gamma0");
    const double x = (lambda_h - gamma0) * delta_sq;
    return (lambda_h + gamma0 * x) / (1.0 + x);
}

double DeltaBound::reevaluate() const {
    const DeltaIngredients& g = ingredients;
    switch (problem) {
    case BoundProblem::laplace: {
        const double c = poincare_value(g.constant);
        return g.h * g.h / (c * c);
    }
    case BoundProblem::elliptic:
        return g.h * g.h / (g.a0 * kPi * kPi);
    case BoundProblem::elasticity: {
        const double d = g.max_cell_value / (std::sqrt(shear_factor(g.shear_scale) * g.mu) * kPi);
        return d * d;
    }
    case BoundProblem::steklov:
        return (g.m_faces - 1) * g.max_cell_value * (2.0 + 2.0 * kPi) / (2.0 * kPi * kPi);
    }
    throw std::logic_error("DeltaBound: unknown problem");
}

DeltaBound delta_laplace(double h, PoincareConstant constant) {
    if (!(h > 0.0)) throw std::invalid_argument("delta_laplace: h must be positive");
    DeltaBound b;
    b.problem = BoundProblem::laplace;
    b.ingredients.h = h;
    b.ingredients.constant = constant;
    const double c = poincare_value(constant);
    b.delta_sq = h * h / (c * c);
    return b;
}

DeltaBound delta_elliptic(double h, double a0) {
    if (!(h > 0.0) || !(a0 > 0.0))
        throw std::invalid_argument("delta_elliptic: h and a0 must be positive");
    DeltaBound b;
    b.problem = BoundProblem::elliptic;
    b.ingredients.h = h;
    b.ingredients.a0 = a0;
    b.delta_sq = h * h / (a0 * kPi * kPi);
    return b;
}

double cdiv_bound(double d) {
    if (!(d > 0.0) || d > 1.0)
        throw std::invalid_argument("cdiv_bound: d must lie in (0,1]");
    return std::sqrt(2.0 / (d * d) * (1.0 + std::sqrt(std::max(0.0, 1.0 - d * d))));
}

double korn_bound(double d) {
    if (!(d > 0.0) || d > 1.0)
        throw std::invalid_argument("korn_bound: d must lie in (0,1]");
    return std::sqrt(1.0 + 4.0 / (d * d) * (1.0 + std::sqrt(std::max(0.0, 1.0 - d * d))));
}

DeltaBound delta_elasticity(const Mesh& mesh, double mu, ShearScale scale) {
    if (!(mu > 0.0)) throw std::invalid_argument("delta_elasticity: mu must be positive");
    DeltaBound b;
    b.problem = BoundProblem::elasticity;
    b.ingredients.mu = mu;
    b.ingredients.shear_scale = scale;
    for (int t = 0; t < mesh.num_cells(); ++t) {
        const CellGeometry g = cell_geometry(mesh, t);
        const double value = korn_bound(inscribed_param_d(mesh, t)) * g.diameter;
        if (value > b.ingredients.max_cell_value) {
            b.ingredients.max_cell_value = value;
            b.ingredients.max_cell = t;
        }
    }
    const double delta =
        b.ingredients.max_cell_value / (std::sqrt(shear_factor(scale) * mu) * kPi);
    b.delta_sq = delta * delta;
    return b;
}

double trace_const(double meas_f, double meas_t, double h_t, int n) {
    if (!(meas_f > 0.0) || !(meas_t > 0.0) || !(h_t > 0.0) || n < 2)
        throw std::invalid_argument("trace_const: nonpositive input");
    return std::sqrt(meas_f / meas_t) * h_t * std::sqrt((n + 2.0 * kPi) / (n * kPi * kPi));
}

DeltaBound delta_steklov(const Mesh& mesh) {
    if (!mesh.has_label(BoundaryLabel::steklov))
        throw std::invalid_argument("delta_steklov: no steklov facets");
    DeltaBound b;
    b.problem = BoundProblem::steklov;
    b.ingredients.m_faces = 3;
    for (int f = 0; f < mesh.num_boundary_facets(); ++f) {
        if (mesh.boundary()[f].label != BoundaryLabel::steklov) continue;
        const int t = mesh.facet_cell(f);
        const CellGeometry g = cell_geometry(mesh, t);
        const double value = g.diameter * g.diameter * g.diameter / g.area;
        if (value > b.ingredients.max_cell_value) {
            b.ingredients.max_cell_value = value;
            b.ingredients.max_cell = t;
            b.ingredients.max_facet = f;
        }
    }
    b.delta_sq = b.reevaluate();
    return b;
}

std::vector<BoundReport> assemble_report(BoundProblem problem,
                                         const std::vector<ReportInput>& levels,
                                         double gamma0) {
    std::vector<BoundReport> out;
    out.reserve(levels.size());
    for (const ReportInput& in : levels) {
        BoundReport r;
        r.level = in.level;
        r.h = in.h;
        r.lambda_h = in.lambda_h;
        r.delta_sq = in.delta_sq;
        r.upper = in.upper;
        r.gamma0 = gamma0;
        r.lower = (problem == BoundProblem::elliptic && gamma0 > 0.0)
                      ? lb_transform_shifted(in.lambda_h, in.delta_sq, gamma0)
                      : lb_transform(in.lambda_h, in.delta_sq);
        if (r.lower > r.lambda_h * (1.0 + 1e-14))
            throw std::runtime_error("assemble_report: lower bound above lambda_h");
        if (r.upper && r.lower > *r.upper)
            throw std::runtime_error("assemble_report: lower bound above upper bound");
        out.push_back(r);
    }
    return out;
}

std::vector<BoundReport> assemble_report(BoundProblem problem,
                                         std::span<const double> h,
                                         std::span<const double> lambda_h,
                                         std::span<const double> delta_sq,
                                         std::span<const double> upper,
                                         double gamma0) {
    if (lambda_h.size() != h.size() || delta_sq.size() != h.size() ||
        (!upper.empty() && upper.size() != h.size()))
        throw std::invalid_argument("assemble_report: inconsistent column lengths");
    std::vector<ReportInput> levels(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        levels[i].level = static_cast<int>(i);
        levels[i].h = h[i];
        levels[i].lambda_h = lambda_h[i];
        levels[i].delta_sq = delta_sq[i];
        if (!upper.empty()) levels[i].upper = upper[i];
    }
    return assemble_report(problem, levels, gamma0);
}

} // namespace eigbound
