#pragma once

#include "fillrad/ktheory.hpp"
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

/// Odd-part tolerance and Hermitian tolerance of a graded operator.
inline constexpr double kGradingTolerance = 1e-12;

/// chi(x) = (2/pi) int_0^x (1 - cos y) / y^2 dy: odd, nondecreasing, limits +-1.
double chi_eval(double x);

/// D = [[0, D+], [D-, 0]] on H+ (+) H-, both of dimension `half`.
struct GradedOperator {
    Eigen::MatrixXcd d;
    std::size_t half = 0;
    std::optional<double> gap;  // smallest singular value of D+, when claimed
    /// Optional locality metadata: site of each basis vector of H+ (the same for H-) and a site metric.
    std::vector<std::size_t> site_of;
    std::shared_ptr<const FiniteMetricSpace> sites;

    Eigen::MatrixXcd d_plus() const { return d.topRightCorner(static_cast<Eigen::Index>(half), static_cast<Eigen::Index>(half)); }
};

/// Validates Hermitian and grading-odd to kGradingTolerance; computes the gap when `claim_gap`.
/// Throws InvalidArgument on a malformed operator or a claimed gap that is not positive.
GradedOperator make_graded_operator(Eigen::MatrixXcd d, bool claim_gap = false);
GradedOperator graded_from_plus(const Eigen::MatrixXcd& d_plus, bool claim_gap = false);

/// chi(D/t) through the singular value decomposition of D+, so that oddness is exact.
struct ChiBlocks {
    Eigen::MatrixXcd u;  // H- -> H+
    Eigen::MatrixXcd v;  // U*
    Eigen::MatrixXcd full() const;
};
/// Caches the decomposition of D+ for repeated scales.
class ChiCalculus {
public:
    explicit ChiCalculus(const GradedOperator& op);
    ChiBlocks operator()(double t) const;
    const Eigen::VectorXd& singular_values() const noexcept { return sigma_; }

private:
    Eigen::MatrixXcd x_, y_;
    Eigen::VectorXd sigma_;
};
/// Throws SpectralFailure when the decomposition fails, InvalidArgument unless t > 0.
ChiBlocks chi_of_operator(const GradedOperator& op, double t);

/// Smallest b such that every entry of chi(D/t) between sites farther than b apart is below 1e-10.
/// Requires locality metadata.
double propagation_width(const GradedOperator& op, double t);

/// P_{t,D} = W e11 W^-1 written through U and V.
Eigen::MatrixXcd p_t(const ChiBlocks& chi);

/// Z(beta), its closed-form inverse (exact for idempotent beta), and the two forms of d(alpha, beta) as 4 x 4 block matrices.
Eigen::MatrixXcd z_matrix(const Eigen::MatrixXcd& beta);
Eigen::MatrixXcd z_inverse(const Eigen::MatrixXcd& beta);
/// Z^-1 diag(alpha, 1 - beta, 0, 0) Z.
Eigen::MatrixXcd difference_product(const Eigen::MatrixXcd& alpha, const Eigen::MatrixXcd& beta);
/// e + [beta; 0; 1 - beta; 0] (alpha - beta) [beta, 0, 1 - beta, 0]; equals the product form when
/// beta is idempotent and equals e exactly when alpha = beta.
Eigen::MatrixXcd difference_d(const Eigen::MatrixXcd& alpha, const Eigen::MatrixXcd& beta);
/// e_{1,3} pattern: identity in block (1, 1), zero elsewhere.
Eigen::MatrixXcd e13(Eigen::Index block);

/// Largest singular value through Lanczos on M* M with full reorthogonalization.
double spectral_norm(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply,
                     const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply_adjoint,
                     Eigen::Index dim, double relative_tolerance = 1e-10);

/// All blocks are stored compressed to the difference blocks (1, 3) of each 4 x 4 construction;
/// rows and columns (2, 4) are identically zero and drop out of traces and norms.
struct DifferencePackage {
    double t = 0.0;
    std::size_t k = 0;
    ChiBlocks chi;
    Eigen::MatrixXcd pt;     // P_t (dimension 2 half)
    Eigen::MatrixXcd alpha;  // P_t p, on H (x) C^k
    Eigen::MatrixXcd beta;   // P_t q
    Eigen::MatrixXcd a;      // compressed a_{t,p,q}
    Eigen::MatrixXcd b;      // compressed b_{p,q}
    double b_idempotent_defect = 0.0;
    double defect_idempotent = 0.0;  // |d^2 - d|
    double defect_to_e = 0.0;        // |d - e|

    /// Compressed d_{t,p,q} (dimension 2 dim(a)); intended for small models.
    Eigen::MatrixXcd d() const;
    Eigen::MatrixXcd e() const;
};
/// p, q are projection fields on the operator's sites. `region` lists the sites where p - q may be
/// nonzero (empty: every site). Throws SupportViolation when p - q leaves the region.
DifferencePackage build_package(const GradedOperator& op, double t, const MatrixField& p, const MatrixField& q,
                                const std::vector<std::size_t>& region = {});

enum class ThetaMethod { Spectral, Contour };
struct ThetaResult {
    Eigen::MatrixXcd theta;
    double idempotent_residual = 0.0;
    std::size_t contour_nodes = 0;  // Contour only
};
/// Riesz projection onto the spectrum with Re z > 1/2. Spectral: Newton iteration for the sign of
/// 2d - 1. Contour: trapezoid rule on |z - 1| = 1/2 from 64 nodes, doubling until successive
/// results agree to 1e-10. Throws SpectralGapLost unless |d^2 - d| < 1/4.
ThetaResult theta(const Eigen::MatrixXcd& d, ThetaMethod method = ThetaMethod::Spectral);

struct PairingOptions {
    double t = 1.0;
    /// Contour cross-check only when dim(a) is at most this size.
    Eigen::Index contour_cap = 256;
};
struct PairingReport {
    int index = 0;
    double raw_index = 0.0;       // trace Theta(d) - trace e
    double rounding_residual = 0.0;
    double t = 0.0;
    double defect_idempotent = 0.0;
    double defect_to_e = 0.0;
    double theta_residual = 0.0;
    double theta_to_e = 0.0;       // |Theta(d) - e|
    bool equivalence_certificate = false;  // |Theta(d) - e| < 1
    std::optional<double> method_agreement;  // |Theta_contour - Theta_spectral|
    std::string method = "spectral";
};
/// Theta(d) is evaluated through the similarity d(a, b) = Z(b)^-1 diag(a, 1 - b, 0, 0) Z(b), valid because b
/// is an exact idempotent: trace Theta(d) - trace e = trace Theta(a) - trace b. Throws IndeterminateIndex
/// when the rounding residual is at least 0.1.
PairingReport pairing(const GradedOperator& op, const MatrixField& p, const MatrixField& q,
                      const PairingOptions& options, const std::vector<std::size_t>& region = {});
PairingReport pairing(const DifferencePackage& package, const PairingOptions& options);

/// Periodic N x N lattice with Euclidean distances through the shortest wrap.
std::shared_ptr<const FiniteMetricSpace> torus_lattice(std::size_t n);

/// Projection pair on the lattice: q = diag(0, 1); p = Bott matrix of a unit vector whose angle from the
/// south pole falls linearly from `amplitude` at the center to 0 at `radius`, with azimuth `degree` times
/// the polar angle. amplitude = pi gives a degree-`degree` generator.
struct ProjectionPair {
    MatrixField p;
    MatrixField q;
    std::vector<std::size_t> region;
    double lip = 0.0;
};
ProjectionPair twisted_projection_pair(std::size_t n, double radius, double amplitude, int degree);

struct LatticeModel {
    GradedOperator op;
    ProjectionPair fields;
    std::size_t n = 0;
    int flux = 0;
    double mass = 0.0;
    double gap_bound = 0.0;  // m0 - (sqrt 2 - 1)
};
/// D+ = (1/2)(T_x - T_x*) + (i/2)(T_y - T_y*) + sum_mu (1 - (T_mu + T_mu*)/2) + m0 with U(1) links of total
/// flux q. Throws InvalidArgument unless N >= 8, FluxAliased when |q| > N/4.
LatticeModel lattice_dirac_torus(std::size_t n, int flux, double mass);

/// Kernel-count oracle: zero modes of the overlap operator built from the two-spinor Wilson operator with
/// the same links, split by chirality.
struct KernelCount {
    std::size_t positive = 0;
    std::size_t negative = 0;
    int index() const { return static_cast<int>(positive) - static_cast<int>(negative); }
};
KernelCount overlap_kernel_count(std::size_t n, int flux, double overlap_mass = 1.0);

struct LinearFit {
    double slope = 0.0;
    double r_squared = 0.0;
    double max_ratio = 0.0;  // max y / x
};
/// Least squares through the origin. R^2 = 1 - SS_res / SS_tot (centered). Throws InvalidArgument with
/// fewer than 5 points, FitUnreliable when R^2 < min_r_squared.
LinearFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y, double min_r_squared = 0.9);

struct DefectSample {
    double t = 0.0;
    double lip = 0.0;
    double sigma = 0.0;
    double defect_idempotent = 0.0;
    double defect_to_e = 0.0;
};
struct ConstantEstimate {
    LinearFit c1;  // |d^2 - d| against L / t
    LinearFit c2;  // |d - e| against t / sigma
};
/// Each family needs at least 5 samples.
ConstantEstimate estimate_constants(const std::vector<DefectSample>& large_t, const std::vector<DefectSample>& small_t,
                                    double min_r_squared = 0.9);

struct VanishingRow {
    double lip = 0.0;
    double t0 = 0.0;
    bool below_threshold = false;
    PairingReport report;
};
struct VanishingReport {
    double sigma = 0.0;
    double c1 = 0.0, c2 = 0.0;
    double threshold = 0.0;  // sigma / (16 c1 c2)
    std::vector<VanishingRow> rows;
    std::size_t violations = 0;  // rows below threshold with nonzero index or |Theta - e| >= 1
};
/// Runs the pairing at t0 = 4 c1 L for each generator; `generator(L)` returns a pair with lip close to L.
VanishingReport vanishing_experiment(const GradedOperator& op, double sigma,
                                     const std::function<ProjectionPair(double)>& generator,
                                     const std::vector<double>& lips, double c1, double c2);

using ControlFunction = std::function<mpq_class(const mpq_class&)>;
struct MainBound {
    mpq_class even_argument, odd_argument;  // 16 c1 c2 (m+1)^3 L_m / sigma and 16 c1 c2 (m+2)^3 L_{m+1} / sigma
    mpq_class even_value, odd_value;
    bool even_dimension = true;
    mpq_class value;
};
/// `budget` must extend to L_{m+1}. Throws BadControlFunction when D fails D(s) >= s or monotonicity on
/// the probe grid, InvalidArgument on sigma <= 0 or a short budget.
MainBound main_bound(const mpq_class& sigma, int m, const ControlFunction& control, const mpq_class& c1,
                     const mpq_class& c2, const LmBudget& budget, bool even_dimension);

/// Header "2N", then 2N rows of 2N "re im" pairs.
void write_operator(std::ostream& out, const GradedOperator& op);
GradedOperator read_operator(std::istream& in);

}  // namespace fillrad
