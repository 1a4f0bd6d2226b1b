#pragma once

#include "fillrad/chains.hpp"
#include "fillrad/cover.hpp"
#include "fillrad/models.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fillrad {

struct FillOptions {
    Field field = Field::Rational;
    /// 0 searches the exact set of pairwise distances; h > 0 searches radii h, 2h, ...
    double resolution = 0.0;
    bool collapse = true;
};

struct FillingEstimate {
    double radius = 0.0;           // smallest grid radius at which the cycle bounds
    double bracket_low = 0.0;      // largest grid radius at which it does not (or the cycle's own scale)
    double bracket_high = 0.0;
    bool no_fill = false;          // cycle survives up to diam; radius is then diam
    std::size_t boundary_solves = 0;
};

/// Half the Vietoris-Rips death scale of the cycle, by bisection over the grid.
FillingEstimate discrete_filling_radius(const FiniteMetricSpace& space, const ChainVector& cycle,
                                        const FillOptions& options = {});
FillingEstimate discrete_filling_radius(const SampledModel& model, const FillOptions& options = {});

struct ProductCheck {
    FillingEstimate base;
    FillingEstimate product;
    double half_length = 0.0;
    double relative_gap = 0.0;     // |product - base| / base
    bool interval_too_short = false;
};

/// Estimates the base and base x [-T, T] filling radii. The product cycle is the prism chain
/// closed by caps that fill the end circles inside the end layers. T = 0 returns the base
/// estimate for both. Only rational coefficients are in contract.
ProductCheck product_fillrad_check(const ModelSpaceSpec& base, double half_length, double layer_spacing,
                                   const FillOptions& options = {});

/// diam of a cover with multiplicity <= k + 1; throws MultiplicityTooHigh otherwise.
double uryson_width_upper(const Cover& cover, int k);

/// Parameters of the model that are known in closed form.
struct AnalyticMetadata {
    int manifold_dimension = 0;
    std::optional<double> injectivity_radius;
    std::optional<double> radsphere_certificate;  // lower bound from an explicit map
    std::optional<double> diameter;
};
AnalyticMetadata analytic_metadata(const ModelKind& kind);

struct InvariantInputs {
    std::string space;
    AnalyticMetadata metadata;
    std::optional<double> fillrad;
    std::map<int, double> width_upper;  // k -> certified bound
    std::optional<double> diam;
};

struct InvariantRow {
    std::string space;
    std::string invariant;
    double value = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound - value
    bool pass = false;    // value <= bound
};

struct InvariantReport {
    std::string space;
    std::vector<InvariantRow> rows;
    bool all_pass() const;
};

/// Evaluates inj/(n+2) <= fillrad <= width_k <= diam, width monotonicity and
/// radsphere <= (4/pi) fillrad. Throws IncompleteReport when an input is missing.
InvariantReport invariant_report(const InvariantInputs& inputs);

/// Width bounds used by the invariant harness: width_0 from the single-member cover, plus
/// width_1 from audited multiplicity-2 band covers for surfaces.
std::map<int, double> model_width_bounds(const SampledModel& model, const ModelKind& kind);

}  // namespace fillrad
