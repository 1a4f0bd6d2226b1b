#pragma once

#include "fillrad/cover.hpp"
#include "fillrad/metric.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <vector>

namespace fillrad {

enum class NerveMetric { L1, Spherical };

using Simplex = std::vector<std::size_t>;  // sorted vertex ids

/// Vertices of the regular n-simplex inscribed in the unit ball of R^n; column j is v_n^j.
Eigen::MatrixXd regular_simplex_frame(std::size_t n);

/// Point of a nerve: support vertices (sorted) with positive barycentric weights summing to 1.
struct NervePoint {
    std::vector<std::size_t> vertices;
    std::vector<double> weights;

    static NervePoint vertex(std::size_t v) { return NervePoint{{v}, {1.0}}; }
    double weight_of(std::size_t v) const;
};

/// Nerve of a cover: one vertex per member, one simplex per set of members with a common point.
class NerveComplex {
public:
    NerveComplex(const Cover& cover, NerveMetric flavor, std::vector<std::size_t> anchors = {});

    NerveMetric flavor() const noexcept { return flavor_; }
    std::size_t vertex_count() const noexcept { return vertex_count_; }
    int dimension() const noexcept { return static_cast<int>(simplices_.size()) - 1; }
    /// simplices()[k] lists the k-simplices.
    const std::vector<std::vector<Simplex>>& simplices() const noexcept { return simplices_; }
    const std::vector<Simplex>& maximal_simplices() const noexcept { return maximal_; }
    const std::vector<std::size_t>& anchors() const noexcept { return anchors_; }
    bool contains(const Simplex& s) const;

    /// Path metric: the flavor's simplex metric inside a maximal simplex, shortest paths through
    /// sampled points of shared faces across simplices. Infinity when no path exists.
    double distance(const NervePoint& a, const NervePoint& b) const;
    /// Subdivision count per edge of the face-point graph.
    std::size_t face_subdivisions() const noexcept { return subdivisions_; }
    void set_face_subdivisions(std::size_t k);

    /// One maximal simplex per line.
    void write(std::ostream& out) const;

private:
    double local_distance(const Simplex& top, const NervePoint& a, const NervePoint& b) const;
    void build_face_graph() const;

    NerveMetric flavor_;
    std::size_t vertex_count_ = 0;
    std::vector<std::vector<Simplex>> simplices_;
    std::vector<Simplex> maximal_;
    std::vector<std::size_t> anchors_;
    std::size_t subdivisions_ = 8;

    // Lazily built face-point graph with all-pairs shortest paths.
    struct FaceGraph {
        std::vector<NervePoint> nodes;
        std::vector<std::vector<std::size_t>> nodes_of_top;  // per maximal simplex
        Eigen::MatrixXd shortest;
    };
    mutable std::optional<FaceGraph> graph_;
};

/// Median of each member: the point minimizing the largest distance to the rest of the member.
std::vector<std::size_t> metric_median_anchors(const Cover& cover);

/// Builds the nerve of the thickened members. Anchors default to metric medians.
NerveComplex build_nerve(const ThickenedCover& cover, NerveMetric flavor);

/// f_r(x) = sum_i d(x, X - U_i) U_i / sum_i d(x, X - U_i). Throws CoverageGap for uncovered points.
/// A member equal to the whole space uses diam(X) + r as its complement distance.
std::vector<NervePoint> project_to_nerve(const ThickenedCover& cover);

/// Max over pairs of output distance over input distance. Throws NotWellDefined when distinct
/// points at distance zero have different images.
double lipschitz_audit(const FiniteMetricSpace& domain,
                       const std::function<double(std::size_t, std::size_t)>& output_distance);

/// g_r(y) = sum_i a_i Psi(p_{U_i}), affine on every simplex.
class HomotopyInverse {
public:
    /// Throws BadAnchor when some anchor is outside its member.
    HomotopyInverse(const NerveComplex& nerve, const Cover& thickened, KuratowskiImage ambient);

    Eigen::VectorXd operator()(const NervePoint& y) const;
    /// sup-norm(g_r(f_r(p)) - Psi(p)) for every sample point.
    std::vector<double> round_trip_displacements(const std::vector<NervePoint>& images) const;

private:
    std::vector<std::size_t> anchors_;
    KuratowskiImage ambient_;
};

HomotopyInverse build_g_r(const NerveComplex& nerve, const Cover& thickened, KuratowskiImage ambient);

}  // namespace fillrad
