#pragma once

#include <optional>
#include <vector>

#include "eigbound/mesh.hpp"

namespace eigbound {

enum class BoundProblem { laplace, elliptic, elasticity, steklov };

enum class PoincareConstant { poincare_pi, bessel_j11 };

/// First positive root of the Bessel function J1.
inline constexpr double kBesselJ11 = 3.8317059702075123156;

/// Shear scaling of the elasticity constant: two_mu divides by sqrt(2 mu),
/// mu by sqrt(mu). The mu variant is the more conservative choice used by
/// the shipped Cook reference table.
enum class ShearScale { two_mu, mu };

/// Everything needed to re-derive delta_sq; kept for auditability.
struct DeltaIngredients {
    double h = 0.0;                 // mesh size (laplace / elliptic)
    double a0 = 1.0;                // elliptic
    double mu = 0.0;                // elasticity
    ShearScale shear_scale = ShearScale::two_mu;
    PoincareConstant constant = PoincareConstant::poincare_pi;
    int max_cell = -1;              // elasticity / steklov argmax cell
    double max_cell_value = 0.0;    // elasticity: C_K(T) h_T; steklov: h_T^3/|T|
    int max_facet = -1;             // steklov argmax facet
    int m_faces = 3;                // steklov overlap parameter
};

struct DeltaBound {
    double delta_sq = 0.0;
    BoundProblem problem = BoundProblem::laplace;
    DeltaIngredients ingredients;

    /// Recomputes delta_sq from the stored ingredients.
    double reevaluate() const;
};

struct BoundReport {
    int level = 0;
    double h = 0.0;
    double lambda_h = 0.0;
    double delta_sq = 0.0;
    double lower = 0.0;
    std::optional<double> upper;
    double gamma0 = 0.0;
};

/// The guaranteed lower-bound transform lambda_h / (1 + delta^2 lambda_h);
/// 0/0 is defined as 0.
double lb_transform(double lambda_h, double delta_sq);

/// Shifted variant: gamma0 + lb_transform(lambda_h - gamma0, delta_sq).
/// Requires lambda_h >= gamma0.
double lb_transform_shifted(double lambda_h, double delta_sq, double gamma0);

DeltaBound delta_laplace(double h, PoincareConstant constant);
DeltaBound delta_elliptic(double h, double a0);

/// C_div bound on a convex polygon with inscribed-ball parameter d:
/// sqrt(2/d^2 (1 + sqrt(1 - d^2))).
double cdiv_bound(double d);

/// Korn bound sqrt(1 + 4/d^2 (1 + sqrt(1 - d^2))) = sqrt(1 + 2 cdiv^2).
double korn_bound(double d);

/// delta = max_T korn_bound(d(T)) h_T / (sqrt(s mu) pi) with d(T) at the
/// incenter and s from the shear scale.
DeltaBound delta_elasticity(const Mesh& mesh, double mu,
                            ShearScale scale = ShearScale::two_mu);

/// Trace constant sqrt(meas_F / meas_T) h_T sqrt((n + 2 pi)/(n pi^2)).
double trace_const(double meas_f, double meas_t, double h_t, int n);

/// delta = sqrt(m-1) max over cells owning a steklov facet of
/// trace_const(h_T, |T|, h_T, 2): the longest cell edge stands in for the
/// face measure (the facet-length variant is too small against the shipped
/// reference data).
DeltaBound delta_steklov(const Mesh& mesh);

struct ReportInput {
    int level = 0;
    double h = 0.0;
    double lambda_h = 0.0;
    double delta_sq = 0.0;
    std::optional<double> upper;
};

/// Applies the appropriate transform per level and enforces
/// lower <= lambda_h and lower <= upper.
std::vector<BoundReport> assemble_report(BoundProblem problem,
                                         const std::vector<ReportInput>& levels,
                                         double gamma0 = 0.0);

/// Column-wise variant; upper may be empty, all other spans must agree in
/// length.
std::vector<BoundReport> assemble_report(BoundProblem problem,
                                         std::span<const double> h,
                                         std::span<const double> lambda_h,
                                         std::span<const double> delta_sq,
                                         std::span<const double> upper,
                                         double gamma0 = 0.0);

} // namespace eigbound
