#include "fillrad/cover.hpp"

#include "fillrad/error.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

namespace fillrad {
namespace {

double set_diameter(const FiniteMetricSpace& space, const PointSet& set)
{
    double d = 0.0;
    for (std::size_t a = 0; a < set.size(); ++a)
        for (std::size_t b = a + 1; b < set.size(); ++b) d = std::max(d, space(set[a], set[b]));
    return d;
}

double distance_to_set(const FiniteMetricSpace& space, std::size_t p, const PointSet& set)
{
    double d = std::numeric_limits<double>::infinity();
    for (auto q : set) d = std::min(d, space(p, q));
    return d;
}

}  // namespace

Cover::Cover(std::shared_ptr<const FiniteMetricSpace> base, std::vector<PointSet> members)
    : base_(std::move(base)), members_(std::move(members))
{
    if (!base_)
        throw Error(ErrorCode::InvalidArgument, "cover needs a base space");
    const std::size_t n = base_->size();
    std::vector<bool> covered(n, false);
    for (auto& m : members_) {
        std::sort(m.begin(), m.end());
        m.erase(std::unique(m.begin(), m.end()), m.end());
        if (m.empty())
            throw Error(ErrorCode::InvalidArgument, "cover member is empty");
        if (m.back() >= n)
            throw Error(ErrorCode::InvalidArgument, "cover member references a missing point");
        for (auto p : m) covered[p] = true;
        diameters_.push_back(set_diameter(*base_, m));
    }
    for (std::size_t p = 0; p < n; ++p)
        if (!covered[p])
            throw Error(ErrorCode::InvalidArgument, "point " + std::to_string(p) + " is not covered");
}

double Cover::diameter() const
{
    return diameters_.empty() ? 0.0 : *std::max_element(diameters_.begin(), diameters_.end());
}

bool Cover::contains(std::size_t member, std::size_t point) const
{
    const auto& m = members_.at(member);
    return std::binary_search(m.begin(), m.end(), point);
}

std::size_t Cover::multiplicity() const
{
    std::vector<std::size_t> count(base_->size(), 0);
    for (const auto& m : members_)
        for (auto p : m) ++count[p];
    return count.empty() ? 0 : *std::max_element(count.begin(), count.end());
}

std::size_t r_multiplicity(const Cover& cover, double r)
{
    if (!(r > 0.0))
        throw Error(ErrorCode::InvalidArgument, "r must be positive");
    const auto& space = cover.base();
    std::size_t best = 0;
    for (std::size_t p = 0; p < space.size(); ++p) {
        std::size_t meets = 0;
        for (const auto& m : cover.members())
            if (distance_to_set(space, p, m) < r) ++meets;
        best = std::max(best, meets);
    }
    return best;
}

double lebesgue_number(const Cover& cover)
{
    const auto& space = cover.base();
    const std::size_t n = space.size();
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < n; ++p) {
        double best = 0.0;
        for (std::size_t i = 0; i < cover.size(); ++i) {
            if (!cover.contains(i, p)) continue;
            double reach = std::numeric_limits<double>::infinity();
            for (std::size_t q = 0; q < n; ++q)
                if (!cover.contains(i, q)) reach = std::min(reach, space(p, q));
            best = std::max(best, reach);
        }
        worst = std::min(worst, best);
    }
    return worst;
}

ThickenedCover thicken_cover(const Cover& cover, double r)
{
    if (!(r > 0.0))
        throw Error(ErrorCode::InvalidArgument, "r must be positive");
    const auto& space = cover.base();
    std::vector<PointSet> grown;
    for (const auto& m : cover.members()) {
        PointSet g;
        for (std::size_t p = 0; p < space.size(); ++p)
            if (distance_to_set(space, p, m) < r) g.push_back(p);
        grown.push_back(std::move(g));
    }
    Cover thick(cover.base_ptr(), std::move(grown));
    for (std::size_t i = 0; i < cover.size(); ++i)
        if (thick.diameters()[i] > cover.diameters()[i] + 2.0 * r + kMetricTolerance)
            throw Error(ErrorCode::InvalidArgument, "thickened member grew by more than 2r");
    if (lebesgue_number(thick) < r - kMetricTolerance)
        throw Error(ErrorCode::InvalidArgument, "thickened cover has Lebesgue number below r");
    return ThickenedCover{cover, r, std::move(thick)};
}

Cover build_cover_strips(const SampledModel& model, double strip_radius, double r)
{
    if (!model.interval_coordinate)
        throw Error(ErrorCode::NotAProduct, "sample carries no interval coordinate");
    if (!(strip_radius > 0.0) || !(r > 0.0))
        throw Error(ErrorCode::InvalidArgument, "strip radius and r must be positive");
    const auto& z = *model.interval_coordinate;
    const double lo = *std::min_element(z.begin(), z.end());
    const double hi = *std::max_element(z.begin(), z.end());
    const double period = 4.0 * strip_radius;
    std::vector<PointSet> members;
    if (hi - lo < period) {
        PointSet all(z.size());
        for (std::size_t p = 0; p < z.size(); ++p) all[p] = p;
        members.push_back(std::move(all));
    } else {
        const auto kmin = static_cast<long>(std::floor((lo - strip_radius) / period));
        const auto kmax = static_cast<long>(std::ceil((hi + strip_radius) / period));
        for (long k = kmin; k <= kmax; ++k) {
            const double a = period * static_cast<double>(k) - strip_radius;
            const double b = period * static_cast<double>(k + 1) + strip_radius;
            PointSet m;
            for (std::size_t p = 0; p < z.size(); ++p)
                if (z[p] > a && z[p] < b) m.push_back(p);
            if (!m.empty()) members.push_back(std::move(m));
        }
    }
    auto base = std::make_shared<const FiniteMetricSpace>(model.space);
    Cover cover(base, std::move(members));
    if (r < strip_radius / 2.0 && r_multiplicity(cover, r) > 2)
        throw Error(ErrorCode::InvalidArgument, "strip cover exceeds r-multiplicity 2");
    return cover;
}

Cover build_ball_cover(std::shared_ptr<const FiniteMetricSpace> base, double ball_radius, std::uint64_t seed)
{
    if (!(ball_radius > 0.0))
        throw Error(ErrorCode::InvalidArgument, "ball radius must be positive");
    const std::size_t n = base->size();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> centers{pick(rng)};
    std::vector<double> reach(n);
    for (std::size_t p = 0; p < n; ++p) reach[p] = (*base)(p, centers[0]);
    while (true) {
        const auto far = static_cast<std::size_t>(std::max_element(reach.begin(), reach.end()) - reach.begin());
        if (reach[far] <= ball_radius) break;
        centers.push_back(far);
        for (std::size_t p = 0; p < n; ++p) reach[p] = std::min(reach[p], (*base)(p, far));
    }
    std::vector<PointSet> members;
    for (auto c : centers) {
        PointSet m;
        for (std::size_t p = 0; p < n; ++p)
            if ((*base)(p, c) <= ball_radius) m.push_back(p);
        members.push_back(std::move(m));
    }
    return Cover(std::move(base), std::move(members));
}

Cover read_cover_file(std::istream& in, std::shared_ptr<const FiniteMetricSpace> base)
{
    std::string line;
    long long count = -1;
    if (!std::getline(in, line) || !(std::istringstream(line) >> count) || count < 0)
        throw Error(ErrorCode::ParseError, "cover file: missing member count");
    std::vector<PointSet> members;
    for (long long i = 0; i < count; ++i) {
        if (!std::getline(in, line))
            throw Error(ErrorCode::ParseError, "cover file: expected " + std::to_string(count) + " members");
        std::istringstream row(line);
        PointSet m;
        long long p = 0;
        while (row >> p) {
            if (p < 0)
                throw Error(ErrorCode::ParseError, "cover file: negative point index");
            m.push_back(static_cast<std::size_t>(p));
        }
        members.push_back(std::move(m));
    }
    return Cover(std::move(base), std::move(members));
}

void write_cover_file(std::ostream& out, const Cover& cover)
{
    out << cover.size() << '\n';
    for (const auto& m : cover.members()) {
        for (std::size_t i = 0; i < m.size(); ++i) out << (i ? " " : "") << m[i];
        out << '\n';
    }
}

}  // namespace fillrad
