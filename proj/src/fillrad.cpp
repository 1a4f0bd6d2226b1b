#include "fillrad/fillrad.hpp"

#include "fillrad/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <variant>

namespace fillrad {
namespace {

double cycle_scale(const FiniteMetricSpace& space, const ChainVector& cycle)
{
    double s = 0.0;
    for (const auto& [simplex, c] : cycle.coefficients)
        for (std::size_t i = 0; i < simplex.size(); ++i)
            for (std::size_t j = i + 1; j < simplex.size(); ++j) s = std::max(s, space(simplex[i], simplex[j]));
    return s;
}

/// Candidate Rips scales from `floor` up to diam: every pairwise distance, or multiples of 2h.
std::vector<double> scale_grid(const FiniteMetricSpace& space, double floor, double resolution)
{
    std::vector<double> grid;
    const double diam = space.diameter();
    if (resolution > 0.0) {
        for (std::size_t j = 1;; ++j) {
            const double s = 2.0 * resolution * static_cast<double>(j);
            if (s >= diam) break;
            if (s >= floor) grid.push_back(s);
        }
        grid.push_back(std::max(diam, floor));
        return grid;
    }
    for (std::size_t i = 0; i < space.size(); ++i)
        for (std::size_t j = i + 1; j < space.size(); ++j)
            if (space(i, j) >= floor) grid.push_back(space(i, j));
    grid.push_back(floor);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

/// Smallest grid index whose scale passes the monotone predicate.
FillingEstimate bisect(const std::vector<double>& grid, const std::function<bool(double)>& bounds)
{
    FillingEstimate est;
    std::size_t hi = grid.size() - 1;
    ++est.boundary_solves;
    if (!bounds(grid[hi])) {
        est.no_fill = true;
        est.radius = grid[hi];
        est.bracket_low = est.bracket_high = grid[hi] / 2.0;
        return est;
    }
    std::size_t lo = 0;
    ++est.boundary_solves;
    if (bounds(grid[0])) {
        hi = 0;
    } else {
        // invariant: grid[lo] fails, grid[hi] passes
        while (hi - lo > 1) {
            const std::size_t mid = lo + (hi - lo) / 2;
            ++est.boundary_solves;
            (bounds(grid[mid]) ? hi : lo) = mid;
        }
    }
    est.radius = grid[hi] / 2.0;
    est.bracket_high = est.radius;
    est.bracket_low = hi == 0 ? est.radius : grid[hi - 1] / 2.0;
    return est;
}

bool is_closed_kind(const ModelKind& kind)
{
    return std::holds_alternative<CircleModel>(kind) || std::holds_alternative<Sphere2Model>(kind) ||
           std::holds_alternative<FlatTorusModel>(kind);
}

}  // namespace

FillingEstimate discrete_filling_radius(const FiniteMetricSpace& space, const ChainVector& cycle,
                                        const FillOptions& options)
{
    if (options.resolution < 0.0)
        throw Error(ErrorCode::InvalidArgument, "resolution must be nonnegative");
    const auto grid = scale_grid(space, cycle_scale(space, cycle), options.resolution);
    return bisect(grid, [&](double s) { return is_rips_boundary(space, s, cycle, options.collapse); });
}

FillingEstimate discrete_filling_radius(const SampledModel& model, const FillOptions& options)
{
    if (!model.fundamental_cycle)
        throw Error(ErrorCode::InvalidArgument, "model carries no fundamental cycle");
    return discrete_filling_radius(model.space, chain_from_descriptor(*model.fundamental_cycle, options.field),
                                   options);
}

ProductCheck product_fillrad_check(const ModelSpaceSpec& base, double half_length, double layer_spacing,
                                   const FillOptions& options)
{
    if (!is_closed_kind(base.kind))
        throw Error(ErrorCode::InvalidArgument, "product check needs a closed base model");
    if (half_length < 0.0 || !(layer_spacing > 0.0))
        throw Error(ErrorCode::InvalidArgument, "interval half-length must be >= 0 and spacing > 0");
    ProductCheck out;
    out.half_length = half_length;
    const SampledModel base_model = sample_model_space(base);
    out.base = discrete_filling_radius(base_model, options);
    out.interval_too_short = half_length < 4.0 * out.base.radius;
    if (half_length == 0.0) {
        out.product = out.base;
        return out;
    }

    const auto layers = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::llround(2.0 * half_length / layer_spacing)) + 1);
    ModelSpaceSpec spec = base;
    spec.kind = ProductModel{std::visit(
                                 [](const auto& m) -> ClosedOrSegmentModel {
                                     if constexpr (std::is_same_v<std::decay_t<decltype(m)>, ProductModel>)
                                         throw Error(ErrorCode::InvalidArgument, "nested product");
                                     else return m;
                                 },
                                 base.kind),
                             -half_length, half_length, layers};
    const SampledModel product = sample_model_space(spec);
    const std::size_t nb = base_model.space.size();
    const ChainVector prism = chain_from_descriptor(*product.fundamental_cycle, options.field);
    const ChainVector end_cycle = chain_from_descriptor(*base_model.fundamental_cycle, options.field);

    std::vector<std::size_t> bottom(nb), top(nb);
    for (std::size_t v = 0; v < nb; ++v) {
        bottom[v] = v;
        top[v] = (layers - 1) * nb + v;
    }
    // Fills the end cycle inside one end layer and relabels the filling to product ids.
    auto cap = [&](const std::vector<std::size_t>& layer, double s) -> std::optional<ChainVector> {
        const auto complex = vr_complex_on(product.space, layer, s, end_cycle.dimension + 1);
        auto verdict = is_boundary(end_cycle, complex, true);
        if (!verdict.is_boundary) return std::nullopt;
        return push_forward(*verdict.witness, layer);
    };
    auto capped_bounds = [&](double s) {
        const auto top_cap = cap(top, s);
        if (!top_cap) return false;
        const auto bottom_cap = cap(bottom, s);
        if (!bottom_cap) return false;
        ChainVector closed = prism;
        for (const auto& [simplex, c] : top_cap->coefficients) closed.add(simplex, -c);
        for (const auto& [simplex, c] : bottom_cap->coefficients) closed.add(simplex, c);
        return is_rips_boundary(product.space, s, closed, options.collapse);
    };
    const auto grid = scale_grid(product.space, cycle_scale(product.space, prism), options.resolution);
    out.product = bisect(grid, capped_bounds);
    out.relative_gap = std::abs(out.product.radius - out.base.radius) / out.base.radius;
    return out;
}

double uryson_width_upper(const Cover& cover, int k)
{
    if (k < 0)
        throw Error(ErrorCode::InvalidArgument, "k must be nonnegative");
    if (cover.multiplicity() > static_cast<std::size_t>(k) + 1)
        throw Error(ErrorCode::MultiplicityTooHigh, "cover multiplicity " + std::to_string(cover.multiplicity()) +
                                                        " exceeds k+1 = " + std::to_string(k + 1));
    return cover.diameter();
}

AnalyticMetadata analytic_metadata(const ModelKind& kind)
{
    constexpr double pi = std::numbers::pi;
    AnalyticMetadata m;
    if (const auto* c = std::get_if<CircleModel>(&kind)) {
        m.manifold_dimension = 1;
        m.injectivity_radius = pi * c->radius;
        m.radsphere_certificate = c->radius;
        m.diameter = pi * c->radius;
    } else if (const auto* s = std::get_if<Sphere2Model>(&kind)) {
        m.manifold_dimension = 2;
        m.injectivity_radius = pi * s->radius;
        m.radsphere_certificate = s->radius;
        m.diameter = pi * s->radius;
    } else if (const auto* t = std::get_if<FlatTorusModel>(&kind)) {
        const double shortest = std::min(t->length1, t->length2);
        m.manifold_dimension = 2;
        m.injectivity_radius = shortest / 2.0;
        // Exponential map of a disc of radius shortest/2 onto S^2(shortest/(2 pi)), rest to a pole.
        m.radsphere_certificate = shortest / (2.0 * pi);
        m.diameter = std::hypot(t->length1 / 2.0, t->length2 / 2.0);
    } else if (const auto* l = std::get_if<LineSegmentModel>(&kind)) {
        m.manifold_dimension = 1;
        m.diameter = l->length;
    } else {
        m.manifold_dimension = 1 + std::visit([](const auto& b) { return analytic_metadata(ModelKind{b}).manifold_dimension; },
                                              std::get<ProductModel>(kind).base);
    }
    return m;
}

bool InvariantReport::all_pass() const
{
    return std::all_of(rows.begin(), rows.end(), [](const InvariantRow& r) { return r.pass; });
}

InvariantReport invariant_report(const InvariantInputs& in)
{
    const auto& meta = in.metadata;
    if (!in.fillrad || !in.diam || !meta.injectivity_radius || !meta.radsphere_certificate || in.width_upper.empty())
        throw Error(ErrorCode::IncompleteReport, "report for " + in.space + " lacks an estimate");
    InvariantReport report{in.space, {}};
    auto row = [&](std::string name, double value, double bound) {
        report.rows.push_back({in.space, std::move(name), value, bound, bound - value, value <= bound});
    };
    const double n = meta.manifold_dimension;
    row("inj/(n+2)<=fillrad", *meta.injectivity_radius / (n + 2.0), *in.fillrad);
    for (const auto& [k, w] : in.width_upper) {
        row("fillrad<=width_" + std::to_string(k), *in.fillrad, w);
        row("width_" + std::to_string(k) + "<=diam", w, *in.diam);
        const auto prev = in.width_upper.find(k - 1);
        if (prev != in.width_upper.end())
            row("width_" + std::to_string(k) + "<=width_" + std::to_string(k - 1), w, prev->second);
    }
    row("radsphere<=4/pi*fillrad", *meta.radsphere_certificate, 4.0 / std::numbers::pi * *in.fillrad);
    return report;
}

std::map<int, double> model_width_bounds(const SampledModel& model, const ModelKind& kind)
{
    auto base = std::make_shared<const FiniteMetricSpace>(model.space);
    const std::size_t n = base->size();
    PointSet all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    std::map<int, double> widths;
    widths[0] = uryson_width_upper(Cover(base, {all}), 0);

    std::vector<PointSet> bands;
    if (std::holds_alternative<Sphere2Model>(kind)) {
        // Two closed hemispherical caps meeting along the equator.
        PointSet north, south;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = model.params(static_cast<Eigen::Index>(i), 2);
            if (z >= 0.0) north.push_back(i);
            if (z <= 0.0) south.push_back(i);
        }
        bands = {north, south};
    } else if (const auto* t = std::get_if<FlatTorusModel>(&kind)) {
        // Four closed cyclic bands in the first coordinate; neighbours share a boundary column.
        constexpr int count = 4;
        const double w = t->length1 / count;
        for (int j = 0; j < count; ++j) {
            PointSet band;
            for (std::size_t i = 0; i < n; ++i) {
                const double x = model.params(static_cast<Eigen::Index>(i), 0);
                const double lo = w * j, hi = w * (j + 1);
                const bool inside = (x >= lo - 1e-12 && x <= hi + 1e-12) || (j == count - 1 && x <= 1e-12);
                if (inside) band.push_back(i);
            }
            bands.push_back(band);
        }
    }
    if (!bands.empty()) {
        std::erase_if(bands, [](const PointSet& b) { return b.empty(); });
        widths[1] = uryson_width_upper(Cover(base, bands), 1);
    }
    return widths;
}

}  // namespace fillrad
