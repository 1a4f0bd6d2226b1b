#pragma once

#include "fillrad/metric.hpp"
#include "fillrad/models.hpp"

#include <iosfwd>
#include <memory>
#include <vector>

namespace fillrad {

using PointSet = std::vector<std::size_t>;  // sorted, duplicate-free

/// Finite cover of a sampled space by point subsets.
class Cover {
public:
    /// Throws InvalidArgument unless members are nonempty, in range and jointly cover every point.
    Cover(std::shared_ptr<const FiniteMetricSpace> base, std::vector<PointSet> members);

    const FiniteMetricSpace& base() const noexcept { return *base_; }
    const std::shared_ptr<const FiniteMetricSpace>& base_ptr() const noexcept { return base_; }
    const std::vector<PointSet>& members() const noexcept { return members_; }
    const std::vector<double>& diameters() const noexcept { return diameters_; }
    std::size_t size() const noexcept { return members_.size(); }
    double diameter() const;  // max member diameter
    bool contains(std::size_t member, std::size_t point) const;
    /// Largest number of members sharing a single point.
    std::size_t multiplicity() const;

private:
    std::shared_ptr<const FiniteMetricSpace> base_;
    std::vector<PointSet> members_;
    std::vector<double> diameters_;
};

/// Members U^r = {x : d(x, U) < r} of an origin cover.
struct ThickenedCover {
    Cover origin;
    double radius;
    Cover thickened;
};

/// Max over points p of the number of members meeting the open ball B(p, r).
std::size_t r_multiplicity(const Cover& cover, double r);

/// Min over points of the largest inclusion radius d(p, X \ U) over members containing p.
/// A member equal to the whole space has infinite inclusion radius.
double lebesgue_number(const Cover& cover);

/// Asserts per-member diameter growth <= 2r and Lebesgue number >= r.
ThickenedCover thicken_cover(const Cover& cover, double r);

/// Interval cores [4Rk, 4R(k+1)] thickened by R along the interval coordinate; consecutive
/// cores alternate between two families, so r-multiplicity <= 2 for r < R (asserted for r < R/2).
/// Throws NotAProduct when the sample carries no interval coordinate.
Cover build_cover_strips(const SampledModel& model, double strip_radius, double r);

/// Farthest-point centers, members = closed balls of the given radius around them.
Cover build_ball_cover(std::shared_ptr<const FiniteMetricSpace> base, double ball_radius, std::uint64_t seed);

/// Text format: member count, then one line of point indices per member.
Cover read_cover_file(std::istream& in, std::shared_ptr<const FiniteMetricSpace> base);
void write_cover_file(std::ostream& out, const Cover& cover);

}  // namespace fillrad
