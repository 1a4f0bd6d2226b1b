#pragma once

#include "fillrad/metric.hpp"

#include <Eigen/Dense>
#include <gmpxx.h>

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fillrad {

inline constexpr double kAlgebraTolerance = 1e-10;

/// One k x k complex matrix per domain point. `lip` is the audited Lipschitz constant in the
/// operator norm; make_field sets it.
struct MatrixField {
    std::shared_ptr<const FiniteMetricSpace> domain;
    std::size_t k = 0;
    std::vector<Eigen::MatrixXcd> values;
    double lip = 0.0;
    std::optional<Eigen::MatrixXcd> at_infinity;
    std::vector<std::size_t> outside;  // points declared outside the bounded region
};

/// Validates shapes and audits lip. Throws InvalidArgument on a shape mismatch.
MatrixField make_field(std::shared_ptr<const FiniteMetricSpace> domain, std::vector<Eigen::MatrixXcd> values,
                       std::optional<Eigen::MatrixXcd> at_infinity = std::nullopt,
                       std::vector<std::size_t> outside = {});

double operator_norm(const Eigen::MatrixXcd& m);

struct FieldAudit {
    double lip = 0.0;                // max over pairs of |F(x) - F(y)| / d(x, y)
    double sup_norm = 0.0;
    double projection_defect = 0.0;  // max of |F^2 - F| and |F* - F|
    double unitary_defect = 0.0;     // max of |F F* - I|
    double infinity_defect = 0.0;    // max over `outside` of |F - F(infinity)|
    bool is_projection = false;
    bool is_unitary = false;
    std::optional<int> rank_at_infinity;
};
FieldAudit audit_field(const MatrixField& field);

struct LipschitzProjection {
    MatrixField field;
    std::optional<int> rank_at_infinity;  // absent on compact domains
};
struct LipschitzUnitary {
    MatrixField field;
};
/// Present iff the audit accepts the field.
std::optional<LipschitzProjection> as_projection(const MatrixField& field);
std::optional<LipschitzUnitary> as_unitary(const MatrixField& field);

/// Straight-line path between two projection fields, retracted spectrally onto projections.
/// Throws InvalidArgument unless sup |P - Q| < 1 on a common domain.
std::vector<LipschitzProjection> projection_homotopy(const LipschitzProjection& p, const LipschitzProjection& q,
                                                     std::size_t steps);

/// 1/2 (I + u . sigma) for a unit vector u.
Eigen::MatrixXcd bott_matrix(const Eigen::Vector3d& u);
/// Degree-one projection on a sampled sphere; `unit_vectors` holds one row per sample point.
LipschitzProjection bott_projection(std::shared_ptr<const FiniteMetricSpace> sphere,
                                    const Eigen::MatrixXd& unit_vectors);

/// Unit ball in R^n with boundary directions from the vertex frame of the regular simplex.
struct BallModel {
    Eigen::MatrixXd boundary;  // unit vectors, one per row
    Eigen::MatrixXd ball;      // points rho * boundary row, plus the origin
    std::vector<std::size_t> direction;  // ball point -> boundary row (origin: npos)
};
/// Boundary: lattice points of the boundary faces of the frame simplex with `subdivisions` steps
/// per edge, projected radially. Ball: `radial_steps` equally spaced radii in (0, 1].
BallModel simplex_ball_model(std::size_t n, std::size_t subdivisions, std::size_t radial_steps);
/// Polar grid model of the 2-ball: `angles` boundary directions, `radial_steps` radii.
BallModel polar_ball_model(std::size_t angles, std::size_t radial_steps);

struct RadialExtension {
    MatrixField field;
    double boundary_lip = 0.0;  // L, chordal metric on the boundary sample
    double boundary_sup = 0.0;  // |f|
    double bound = 0.0;         // 2L + 2|f|
};
/// F(x) = f(x/|x|)(2|x| - 1) for |x| >= 1/2, zero inside. Ball points are matched to boundary
/// directions within `tolerance`; throws IncompleteBoundary when a direction or value is missing.
/// Asserts the audited lip is at most 2L + 2|f|.
RadialExtension radial_extend(const Eigen::MatrixXd& boundary, const std::vector<Eigen::MatrixXcd>& values,
                              const Eigen::MatrixXd& ball, double tolerance = 1e-9);

/// Euclidean distances between rows.
std::shared_ptr<const FiniteMetricSpace> euclidean_space(const Eigen::MatrixXd& points);

struct Pullback {
    MatrixField field;
    double lambda = 0.0;     // certified lip of the map
    double snap = 0.0;       // largest snap distance
    double slack = 0.0;      // 2 lip(F) snap / (min positive distance of the new domain)
    double bound = 0.0;      // lambda lip(F) + slack
};
/// Pulls F back along g. `image_distance(x, y)` is the distance from g(x) to field point y; each
/// x snaps to its nearest field point. Throws DomainMismatch when a snap exceeds `tolerance`.
Pullback scale_lipschitz(const MatrixField& field, std::shared_ptr<const FiniteMetricSpace> new_domain,
                         const std::function<double(std::size_t, std::size_t)>& image_distance, double lambda,
                         double tolerance);

/// L_j = A1 L_{j-1} + A2 in exact rationals, with the closed form and an optional check of
/// L_j <= C1 exp(C2 j) for every j <= m.
struct LmBudget {
    int m = 0;
    mpq_class a1, a2, l0;
    std::vector<mpq_class> sequence;  // L_0 .. L_m
    mpq_class closed_form;
    bool closed_form_matches = false;
    std::optional<mpq_class> c1, c2;
    std::optional<bool> exponential_bound_holds;
    std::optional<double> worst_log_margin;  // min over j of ln(C1) + C2 j - ln(L_j)
};
/// Throws InvalidArgument unless m >= 0, A1 >= 1, A2 >= 0 and C1 > 0 when given.
LmBudget lm_budget(int m, mpq_class a1, mpq_class a2, mpq_class l0,
                   std::optional<mpq_class> c1 = std::nullopt, std::optional<mpq_class> c2 = std::nullopt);

/// Exact decimal parse: "3", "-2.5", "1e20", "7/3". Throws ParseError.
mpq_class parse_rational(const std::string& text);
/// Natural logarithm of a positive rational, accurate to double precision at any magnitude.
double log_rational(const mpq_class& x);

/// Header "n k", then per point k*k row-major "re im" pairs.
void write_matrix_field(std::ostream& out, const MatrixField& field);
MatrixField read_matrix_field(std::istream& in, std::shared_ptr<const FiniteMetricSpace> domain);

}  // namespace fillrad
