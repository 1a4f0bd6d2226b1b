#include "fillrad/models.hpp"

#include "fillrad/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace fillrad {
namespace {

constexpr double kPi = std::numbers::pi;

struct BaseSample {
    Eigen::MatrixXd dist;
    Eigen::MatrixXd params;
    std::optional<CycleDescriptor> cycle;
    std::optional<std::vector<double>> interval;
    int dimension = 0;
    std::string descriptor;
};

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

void require_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
}

/// Sorts each simplex increasingly and folds the permutation sign into its coefficient.
void normalize_orientation(CycleDescriptor& c)
{
    for (std::size_t s = 0; s < c.simplices.size(); ++s) {
        auto& v = c.simplices[s];
        int sign = 1;
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = 0; j + 1 < v.size() - i; ++j)
                if (v[j] > v[j + 1]) {
                    std::swap(v[j], v[j + 1]);
                    sign = -sign;
                }
        c.coefficients[s] *= sign;
    }
}

BaseSample sample_circle(const CircleModel& m, std::size_t n, std::uint64_t seed, Placement placement)
{
    require_positive(m.radius, "circle radius");
    std::vector<double> theta(n);
    if (placement == Placement::Regular) {
        for (std::size_t i = 0; i < n; ++i) theta[i] = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    } else {
        auto rng = make_rng(seed);
        std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
        for (auto& t : theta) t = u(rng);
        std::sort(theta.begin(), theta.end());
    }
    BaseSample out;
    out.dimension = 1;
    out.params.resize(static_cast<Eigen::Index>(n), 1);
    out.dist.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        out.params(static_cast<Eigen::Index>(i), 0) = theta[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double a = std::abs(theta[i] - theta[j]);
            out.dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                m.radius * std::min(a, 2.0 * kPi - a);
        }
    }
    CycleDescriptor c;
    c.dimension = 1;
    for (std::size_t i = 0; i < n; ++i) {
        c.simplices.push_back({i, (i + 1) % n});
        c.coefficients.push_back(1);
    }
    normalize_orientation(c);
    out.cycle = std::move(c);
    std::ostringstream d;
    d << "circle(R=" << m.radius << ")";
    out.descriptor = d.str();
    return out;
}

using Vec3 = Eigen::Vector3d;

/// Incremental convex hull of points in general position; faces oriented outward.
std::vector<std::array<std::size_t, 3>> convex_hull(const std::vector<Vec3>& pts)
{
    const std::size_t n = pts.size();
    if (n < 4)
        throw Error(ErrorCode::InvalidArgument, "hull needs at least 4 points");
    // Seed tetrahedron from four points spanning a positive volume.
    std::array<std::size_t, 4> seed{0, 1, 2, 3};
    {
        std::size_t b = 1;
        while (b < n && (pts[b] - pts[0]).norm() < 1e-12) ++b;
        std::size_t c = b + 1;
        while (c < n && ((pts[b] - pts[0]).cross(pts[c] - pts[0])).norm() < 1e-10) ++c;
        std::size_t d = c + 1;
        while (d < n && std::abs((pts[b] - pts[0]).cross(pts[c] - pts[0]).dot(pts[d] - pts[0])) < 1e-10) ++d;
        if (d >= n)
            throw Error(ErrorCode::InvalidArgument, "hull input is degenerate");
        seed = {0, b, c, d};
    }
    const Vec3 interior = (pts[seed[0]] + pts[seed[1]] + pts[seed[2]] + pts[seed[3]]) / 4.0;
    std::vector<std::array<std::size_t, 3>> faces;
    std::vector<bool> alive;
    auto add_face = [&](std::size_t a, std::size_t b, std::size_t c) {
        const Vec3 normal = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
        if (normal.dot(pts[a] - interior) < 0.0) std::swap(b, c);
        faces.push_back({a, b, c});
        alive.push_back(true);
    };
    add_face(seed[0], seed[1], seed[2]);
    add_face(seed[0], seed[1], seed[3]);
    add_face(seed[0], seed[2], seed[3]);
    add_face(seed[1], seed[2], seed[3]);
    std::vector<bool> used(n, false);
    for (auto s : seed) used[s] = true;

    for (std::size_t p = 0; p < n; ++p) {
        if (used[p]) continue;
        std::vector<std::size_t> visible;
        for (std::size_t f = 0; f < faces.size(); ++f) {
            if (!alive[f]) continue;
            const auto& [a, b, c] = faces[f];
            const Vec3 normal = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
            if (normal.dot(pts[p] - pts[a]) > 1e-14) visible.push_back(f);
        }
        if (visible.empty()) continue;
        std::map<std::pair<std::size_t, std::size_t>, int> edges;
        for (auto f : visible) {
            const auto& t = faces[f];
            for (int k = 0; k < 3; ++k) edges[{t[k], t[(k + 1) % 3]}] += 1;
            alive[f] = false;
        }
        for (const auto& [e, count] : edges) {
            if (edges.count({e.second, e.first})) continue;
            faces.push_back({e.first, e.second, p});
            alive.push_back(true);
        }
        used[p] = true;
    }
    std::vector<std::array<std::size_t, 3>> out;
    for (std::size_t f = 0; f < faces.size(); ++f)
        if (alive[f]) out.push_back(faces[f]);
    return out;
}

BaseSample sample_sphere(const Sphere2Model& m, std::size_t n, std::uint64_t seed, Placement placement)
{
    require_positive(m.radius, "sphere radius");
    auto rng = make_rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Vec3> pts(n);
    if (placement == Placement::Regular) {
        // Fibonacci lattice under a seeded rotation.
        const double golden = kPi * (3.0 - std::sqrt(5.0));
        Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
        q.normalize();
        const Eigen::Matrix3d rot = q.toRotationMatrix();
        for (std::size_t i = 0; i < n; ++i) {
            const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * static_cast<double>(i);
            pts[i] = rot * Vec3(r * std::cos(phi), r * std::sin(phi), z);
        }
    } else {
        for (auto& p : pts) {
            Vec3 v(g(rng), g(rng), g(rng));
            p = v.normalized();
        }
    }
    BaseSample out;
    out.dimension = 2;
    out.params.resize(static_cast<Eigen::Index>(n), 3);
    out.dist.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        out.params.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
        for (std::size_t j = 0; j < n; ++j) {
            const double c = std::clamp(pts[i].dot(pts[j]), -1.0, 1.0);
            out.dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = i == j ? 0.0 : m.radius * std::acos(c);
        }
    }
    CycleDescriptor c;
    c.dimension = 2;
    for (const auto& f : convex_hull(pts)) {
        c.simplices.push_back({f[0], f[1], f[2]});
        c.coefficients.push_back(1);
    }
    normalize_orientation(c);
    out.cycle = std::move(c);
    std::ostringstream d;
    d << "sphere2(R=" << m.radius << ")";
    out.descriptor = d.str();
    return out;
}

BaseSample sample_torus(const FlatTorusModel& m, std::size_t n, Placement placement)
{
    require_positive(m.length1, "torus length1");
    require_positive(m.length2, "torus length2");
    if (placement != Placement::Regular)
        throw Error(ErrorCode::UnsupportedModel, "flat-torus offers regular grid placement only");
    const auto n1 = std::max<std::size_t>(
        3, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n) * m.length1 / m.length2))));
    const auto n2 = std::max<std::size_t>(3, static_cast<std::size_t>(std::lround(static_cast<double>(n) / n1)));
    const std::size_t total = n1 * n2;
    BaseSample out;
    out.dimension = 2;
    out.params.resize(static_cast<Eigen::Index>(total), 2);
    auto id = [n2](std::size_t i, std::size_t j) { return i * n2 + j; };
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            out.params(static_cast<Eigen::Index>(id(i, j)), 0) = m.length1 * static_cast<double>(i) / n1;
            out.params(static_cast<Eigen::Index>(id(i, j)), 1) = m.length2 * static_cast<double>(j) / n2;
        }
    out.dist.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
    for (Eigen::Index a = 0; a < static_cast<Eigen::Index>(total); ++a)
        for (Eigen::Index b = 0; b < static_cast<Eigen::Index>(total); ++b) {
            double dx = std::abs(out.params(a, 0) - out.params(b, 0));
            double dy = std::abs(out.params(a, 1) - out.params(b, 1));
            dx = std::min(dx, m.length1 - dx);
            dy = std::min(dy, m.length2 - dy);
            out.dist(a, b) = std::hypot(dx, dy);
        }
    CycleDescriptor c;
    c.dimension = 2;
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            const auto a = id(i, j), b = id((i + 1) % n1, j), cc = id((i + 1) % n1, (j + 1) % n2),
                       d = id(i, (j + 1) % n2);
            c.simplices.push_back({a, b, cc});
            c.coefficients.push_back(1);
            c.simplices.push_back({a, cc, d});
            c.coefficients.push_back(1);
        }
    normalize_orientation(c);
    out.cycle = std::move(c);
    std::ostringstream d;
    d << "flat-torus(L1=" << m.length1 << ",L2=" << m.length2 << ")";
    out.descriptor = d.str();
    return out;
}

BaseSample sample_segment(const LineSegmentModel& m, std::size_t n, std::uint64_t seed, Placement placement)
{
    require_positive(m.length, "segment length");
    std::vector<double> x(n);
    if (placement == Placement::Regular) {
        for (std::size_t i = 0; i < n; ++i) x[i] = m.length * static_cast<double>(i) / static_cast<double>(n - 1);
    } else {
        auto rng = make_rng(seed);
        std::uniform_real_distribution<double> u(0.0, m.length);
        for (auto& v : x) v = u(rng);
        std::sort(x.begin(), x.end());
    }
    BaseSample out;
    out.dimension = 1;
    out.params.resize(static_cast<Eigen::Index>(n), 1);
    out.dist.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        out.params(static_cast<Eigen::Index>(i), 0) = x[i];
        for (std::size_t j = 0; j < n; ++j)
            out.dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::abs(x[i] - x[j]);
    }
    out.interval = x;
    std::ostringstream d;
    d << "line-segment(L=" << m.length << ")";
    out.descriptor = d.str();
    return out;
}

BaseSample sample_base(const ClosedOrSegmentModel& base, std::size_t n, std::uint64_t seed, Placement placement)
{
    return std::visit(
        [&](const auto& m) -> BaseSample {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, CircleModel>) return sample_circle(m, n, seed, placement);
            else if constexpr (std::is_same_v<T, Sphere2Model>) return sample_sphere(m, n, seed, placement);
            else if constexpr (std::is_same_v<T, FlatTorusModel>) return sample_torus(m, n, placement);
            else return sample_segment(m, n, seed, placement);
        },
        base);
}

/// Prism chain over consecutive layers; requires increasingly sorted base simplices.
CycleDescriptor product_chain(const CycleDescriptor& base, std::size_t base_count, std::size_t layers)
{
    CycleDescriptor out;
    out.dimension = base.dimension + 1;
    auto vid = [base_count](std::size_t v, std::size_t layer) { return layer * base_count + v; };
    for (std::size_t layer = 0; layer + 1 < layers; ++layer)
        for (std::size_t s = 0; s < base.simplices.size(); ++s) {
            const auto& simplex = base.simplices[s];
            for (std::size_t i = 0; i < simplex.size(); ++i) {
                std::vector<std::size_t> cell;
                for (std::size_t j = 0; j <= i; ++j) cell.push_back(vid(simplex[j], layer));
                for (std::size_t j = i; j < simplex.size(); ++j) cell.push_back(vid(simplex[j], layer + 1));
                out.simplices.push_back(std::move(cell));
                out.coefficients.push_back((i % 2 == 0 ? 1 : -1) * base.coefficients[s]);
            }
        }
    normalize_orientation(out);
    return out;
}

}  // namespace

void check_model_kind_name(std::string_view name)
{
    static constexpr std::array<std::string_view, 5> known{"circle", "sphere2", "flat-torus", "line-segment",
                                                           "product-with-interval"};
    if (std::find(known.begin(), known.end(), name) == known.end())
        throw Error(ErrorCode::UnsupportedModel, "unknown model kind '" + std::string(name) + "'");
}

std::string describe(const ModelKind& kind)
{
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            std::ostringstream d;
            if constexpr (std::is_same_v<T, CircleModel>) d << "circle(R=" << m.radius << ")";
            else if constexpr (std::is_same_v<T, Sphere2Model>) d << "sphere2(R=" << m.radius << ")";
            else if constexpr (std::is_same_v<T, FlatTorusModel>)
                d << "flat-torus(L1=" << m.length1 << ",L2=" << m.length2 << ")";
            else if constexpr (std::is_same_v<T, LineSegmentModel>) d << "line-segment(L=" << m.length << ")";
            else {
                ModelKind base = std::visit([](const auto& b) -> ModelKind { return b; }, m.base);
                d << describe(base) << "x[" << m.lower << "," << m.upper << "]";
            }
            return d.str();
        },
        kind);
}

SampledModel sample_model_space(const ModelSpaceSpec& spec)
{
    if (spec.sample_count < 4)
        throw Error(ErrorCode::InvalidArgument, "sample-count must be at least 4");
    SampledModel out;
    if (const auto* product = std::get_if<ProductModel>(&spec.kind)) {
        if (!(product->upper > product->lower))
            throw Error(ErrorCode::InvalidArgument, "product interval must have positive length");
        if (product->layers < 2)
            throw Error(ErrorCode::InvalidArgument, "product needs at least two layers");
        BaseSample base = sample_base(product->base, spec.sample_count, spec.seed, spec.placement);
        const auto nb = static_cast<std::size_t>(base.dist.rows());
        const std::size_t total = nb * product->layers;
        std::vector<double> z(product->layers);
        for (std::size_t l = 0; l < product->layers; ++l)
            z[l] = product->lower +
                   (product->upper - product->lower) * static_cast<double>(l) / static_cast<double>(product->layers - 1);
        Eigen::MatrixXd dist(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
        out.params.resize(static_cast<Eigen::Index>(total), base.params.cols() + 1);
        std::vector<double> interval(total);
        for (std::size_t a = 0; a < total; ++a) {
            const std::size_t la = a / nb, ba = a % nb;
            out.base_index.push_back(ba);
            out.layer_index.push_back(la);
            interval[a] = z[la];
            out.params.row(static_cast<Eigen::Index>(a)) << base.params.row(static_cast<Eigen::Index>(ba)), z[la];
            for (std::size_t b = 0; b < total; ++b) {
                const std::size_t lb = b / nb, bb = b % nb;
                dist(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                    std::hypot(base.dist(static_cast<Eigen::Index>(ba), static_cast<Eigen::Index>(bb)), z[la] - z[lb]);
            }
        }
        out.descriptor = describe(spec.kind);
        out.space = validate_metric(std::move(dist), out.descriptor);
        out.interval_coordinate = std::move(interval);
        if (base.cycle) out.fundamental_cycle = product_chain(*base.cycle, nb, product->layers);
        out.manifold_dimension = base.dimension + 1;
        return out;
    }
    ClosedOrSegmentModel base_kind = std::visit(
        [](const auto& m) -> ClosedOrSegmentModel {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, ProductModel>)
                throw Error(ErrorCode::UnsupportedModel, "nested product");
            else return m;
        },
        spec.kind);
    BaseSample base = sample_base(base_kind, spec.sample_count, spec.seed, spec.placement);
    out.descriptor = base.descriptor;
    out.space = validate_metric(std::move(base.dist), out.descriptor);
    out.params = std::move(base.params);
    out.fundamental_cycle = std::move(base.cycle);
    out.interval_coordinate = std::move(base.interval);
    out.manifold_dimension = base.dimension;
    return out;
}

}  // namespace fillrad
