#pragma once

#include "fillrad/metric.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fillrad {

struct CircleModel {
    double radius = 1.0;
};
struct Sphere2Model {
    double radius = 1.0;
};
struct FlatTorusModel {
    double length1 = 1.0;
    double length2 = 1.0;
};
struct LineSegmentModel {
    double length = 1.0;
};

using ClosedOrSegmentModel = std::variant<CircleModel, Sphere2Model, FlatTorusModel, LineSegmentModel>;

/// base x [lower, upper] with the Riemannian product metric.
struct ProductModel {
    ClosedOrSegmentModel base;
    double lower = 0.0;
    double upper = 1.0;
    std::size_t layers = 2;
};

using ModelKind = std::variant<CircleModel, Sphere2Model, FlatTorusModel, LineSegmentModel, ProductModel>;

enum class Placement { Regular, Random };

struct ModelSpaceSpec {
    ModelKind kind = CircleModel{};
    std::size_t sample_count = 16;  // for products: samples of the base factor
    std::uint64_t seed = 0;
    Placement placement = Placement::Regular;
};

/// Oriented top simplices; vertex order fixes the orientation.
struct CycleDescriptor {
    int dimension = 0;
    std::vector<std::vector<std::size_t>> simplices;
    std::vector<long> coefficients;
};

struct SampledModel {
    FiniteMetricSpace space;
    /// Per-point parameter coordinates: angle (circle), unit vector (sphere), (x, y) (torus),
    /// x (segment); products append the interval coordinate.
    Eigen::MatrixXd params;
    std::optional<std::vector<double>> interval_coordinate;
    /// Closed kinds: the fundamental cycle of the triangulated sample.
    /// Products: the product chain, whose boundary lies in the two end layers.
    std::optional<CycleDescriptor> fundamental_cycle;
    /// Products only: index of the base sample and of the layer for every point.
    std::vector<std::size_t> base_index;
    std::vector<std::size_t> layer_index;
    int manifold_dimension = 0;
    std::string descriptor;
};

/// Throws UnsupportedModel for names outside {circle, sphere2, flat-torus, line-segment, product-with-interval}.
void check_model_kind_name(std::string_view name);

/// Throws UnsupportedModel for placements a kind does not offer, InvalidArgument on bad parameters.
SampledModel sample_model_space(const ModelSpaceSpec& spec);

std::string describe(const ModelKind& kind);

}  // namespace fillrad
