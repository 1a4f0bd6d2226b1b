#include "fillrad/nerve.hpp"

#include "fillrad/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

namespace fillrad {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_subset(const Simplex& small, const Simplex& big)
{
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

Simplex support_union(const NervePoint& a, const NervePoint& b)
{
    Simplex u;
    std::set_union(a.vertices.begin(), a.vertices.end(), b.vertices.begin(), b.vertices.end(), std::back_inserter(u));
    return u;
}

/// All barycentric points of `face` whose weights are multiples of 1/k.
void lattice_points(const Simplex& face, std::size_t k, std::vector<NervePoint>& out)
{
    const std::size_t d = face.size();
    std::vector<std::size_t> counts(d, 0);
    // Enumerate compositions of k into d nonnegative parts.
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
        if (i + 1 == d) {
            counts[i] = left;
            NervePoint p;
            for (std::size_t j = 0; j < d; ++j)
                if (counts[j] > 0) {
                    p.vertices.push_back(face[j]);
                    p.weights.push_back(static_cast<double>(counts[j]) / static_cast<double>(k));
                }
            out.push_back(std::move(p));
            return;
        }
        for (std::size_t c = 0; c <= left; ++c) {
            counts[i] = c;
            rec(i + 1, left - c);
        }
    };
    rec(0, k);
}

}  // namespace

Eigen::MatrixXd regular_simplex_frame(std::size_t n)
{
    if (n == 0) return Eigen::MatrixXd::Zero(0, 1);
    Eigen::MatrixXd v(1, 2);
    v << 1.0, -1.0;
    for (std::size_t m = 2; m <= n; ++m) {
        const auto mi = static_cast<Eigen::Index>(m);
        const double md = static_cast<double>(m);
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(mi, mi + 1);
        next.topLeftCorner(mi - 1, mi) = std::sqrt(1.0 - 1.0 / (md * md)) * v;
        next.row(mi - 1).head(mi).setConstant(-1.0 / md);
        next(mi - 1, mi) = 1.0;
        v = std::move(next);
    }
    return v;
}

double NervePoint::weight_of(std::size_t v) const
{
    const auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
    return (it != vertices.end() && *it == v) ? weights[static_cast<std::size_t>(it - vertices.begin())] : 0.0;
}

NerveComplex::NerveComplex(const Cover& cover, NerveMetric flavor, std::vector<std::size_t> anchors)
    : flavor_(flavor), vertex_count_(cover.size()), anchors_(std::move(anchors))
{
    const std::size_t n = cover.base().size();
    std::set<Simplex> stars;
    for (std::size_t p = 0; p < n; ++p) {
        Simplex s;
        for (std::size_t i = 0; i < cover.size(); ++i)
            if (cover.contains(i, p)) s.push_back(i);
        if (s.size() > 20)
            throw Error(ErrorCode::InvalidArgument, "nerve simplex dimension exceeds 19");
        stars.insert(std::move(s));
    }
    std::set<Simplex> all;
    for (const auto& s : stars) {
        const std::size_t k = s.size();
        for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
            Simplex f;
            for (std::size_t j = 0; j < k; ++j)
                if (mask & (std::size_t{1} << j)) f.push_back(s[j]);
            all.insert(std::move(f));
        }
    }
    for (const auto& s : all) {
        if (simplices_.size() < s.size()) simplices_.resize(s.size());
        simplices_[s.size() - 1].push_back(s);
    }
    for (const auto& s : stars) {
        bool maximal = true;
        for (const auto& t : stars)
            if (t.size() > s.size() && is_subset(s, t)) {
                maximal = false;
                break;
            }
        if (maximal) maximal_.push_back(s);
    }
    if (!anchors_.empty() && anchors_.size() != vertex_count_)
        throw Error(ErrorCode::InvalidArgument, "one anchor per nerve vertex is required");
}

bool NerveComplex::contains(const Simplex& s) const
{
    if (s.empty() || s.size() > simplices_.size()) return false;
    const auto& level = simplices_[s.size() - 1];
    return std::binary_search(level.begin(), level.end(), s);
}

void NerveComplex::set_face_subdivisions(std::size_t k)
{
    if (k == 0)
        throw Error(ErrorCode::InvalidArgument, "face subdivision count must be positive");
    subdivisions_ = k;
    graph_.reset();
}

double NerveComplex::local_distance(const Simplex& top, const NervePoint& a, const NervePoint& b) const
{
    if (flavor_ == NerveMetric::L1) {
        double d = 0.0;
        for (auto v : top) d += std::abs(a.weight_of(v) - b.weight_of(v));
        return d;
    }
    if (top.size() < 2) return 0.0;
    const Eigen::MatrixXd frame = regular_simplex_frame(top.size() - 1);
    Eigen::VectorXd diff = Eigen::VectorXd::Zero(frame.rows());
    for (std::size_t j = 0; j < top.size(); ++j)
        diff += (a.weight_of(top[j]) - b.weight_of(top[j])) * frame.col(static_cast<Eigen::Index>(j));
    return diff.norm();
}

void NerveComplex::build_face_graph() const
{
    FaceGraph g;
    std::set<Simplex> shared;
    for (std::size_t i = 0; i < maximal_.size(); ++i)
        for (std::size_t j = i + 1; j < maximal_.size(); ++j) {
            Simplex s;
            std::set_intersection(maximal_[i].begin(), maximal_[i].end(), maximal_[j].begin(), maximal_[j].end(),
                                  std::back_inserter(s));
            if (!s.empty()) shared.insert(std::move(s));
        }
    std::set<std::pair<Simplex, std::vector<double>>> seen;
    for (const auto& face : shared) {
        std::vector<NervePoint> pts;
        lattice_points(face, subdivisions_, pts);
        for (auto& p : pts)
            if (seen.insert({p.vertices, p.weights}).second) g.nodes.push_back(std::move(p));
    }
    g.nodes_of_top.resize(maximal_.size());
    for (std::size_t t = 0; t < maximal_.size(); ++t)
        for (std::size_t v = 0; v < g.nodes.size(); ++v)
            if (is_subset(g.nodes[v].vertices, maximal_[t])) g.nodes_of_top[t].push_back(v);
    const auto m = static_cast<Eigen::Index>(g.nodes.size());
    g.shortest = Eigen::MatrixXd::Constant(m, m, kInf);
    for (Eigen::Index v = 0; v < m; ++v) g.shortest(v, v) = 0.0;
    for (std::size_t t = 0; t < maximal_.size(); ++t) {
        const auto& ids = g.nodes_of_top[t];
        for (std::size_t a = 0; a < ids.size(); ++a)
            for (std::size_t b = a + 1; b < ids.size(); ++b) {
                const double w = local_distance(maximal_[t], g.nodes[ids[a]], g.nodes[ids[b]]);
                const auto ia = static_cast<Eigen::Index>(ids[a]), ib = static_cast<Eigen::Index>(ids[b]);
                if (w < g.shortest(ia, ib)) g.shortest(ia, ib) = g.shortest(ib, ia) = w;
            }
    }
    for (Eigen::Index k = 0; k < m; ++k)
        for (Eigen::Index i = 0; i < m; ++i) {
            const double ik = g.shortest(i, k);
            if (ik == kInf) continue;
            for (Eigen::Index j = 0; j < m; ++j) {
                const double via = ik + g.shortest(k, j);
                if (via < g.shortest(i, j)) g.shortest(i, j) = via;
            }
        }
    graph_ = std::move(g);
}

double NerveComplex::distance(const NervePoint& a, const NervePoint& b) const
{
    if (a.vertices == b.vertices && a.weights == b.weights) return 0.0;
    const Simplex joint = support_union(a, b);
    double best = kInf;
    for (const auto& top : maximal_)
        if (is_subset(joint, top)) best = std::min(best, local_distance(top, a, b));
    if (flavor_ == NerveMetric::L1 && best < kInf) return best;
    if (!graph_) build_face_graph();
    const auto& g = *graph_;
    for (std::size_t ta = 0; ta < maximal_.size(); ++ta) {
        if (!is_subset(a.vertices, maximal_[ta])) continue;
        for (std::size_t tb = 0; tb < maximal_.size(); ++tb) {
            if (!is_subset(b.vertices, maximal_[tb])) continue;
            for (auto x : g.nodes_of_top[ta]) {
                const double ax = local_distance(maximal_[ta], a, g.nodes[x]);
                if (ax >= best) continue;
                for (auto y : g.nodes_of_top[tb]) {
                    const double total = ax + g.shortest(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) +
                                         local_distance(maximal_[tb], g.nodes[y], b);
                    best = std::min(best, total);
                }
            }
        }
    }
    return best;
}

void NerveComplex::write(std::ostream& out) const
{
    for (const auto& s : maximal_) {
        for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
        out << '\n';
    }
}

std::vector<std::size_t> metric_median_anchors(const Cover& cover)
{
    std::vector<std::size_t> anchors;
    for (const auto& m : cover.members()) {
        std::size_t best = m.front();
        double best_reach = kInf;
        for (auto p : m) {
            double reach = 0.0;
            for (auto q : m) reach = std::max(reach, cover.base()(p, q));
            if (reach < best_reach) {
                best_reach = reach;
                best = p;
            }
        }
        anchors.push_back(best);
    }
    return anchors;
}

NerveComplex build_nerve(const ThickenedCover& cover, NerveMetric flavor)
{
    return NerveComplex(cover.thickened, flavor, metric_median_anchors(cover.thickened));
}

std::vector<NervePoint> project_to_nerve(const ThickenedCover& cover)
{
    const Cover& thick = cover.thickened;
    const auto& space = thick.base();
    const std::size_t n = space.size();
    const double whole_space_reach = space.diameter() + cover.radius;
    std::vector<double> complement_reach(thick.size());
    std::vector<NervePoint> out(n);
    for (std::size_t x = 0; x < n; ++x) {
        NervePoint& y = out[x];
        double total = 0.0;
        for (std::size_t i = 0; i < thick.size(); ++i) {
            if (!thick.contains(i, x)) continue;
            double reach = kInf;
            for (std::size_t q = 0; q < n; ++q)
                if (!thick.contains(i, q)) reach = std::min(reach, space(x, q));
            if (reach == kInf) reach = whole_space_reach;
            y.vertices.push_back(i);
            y.weights.push_back(reach);
            total += reach;
        }
        if (y.vertices.empty() || !(total > 0.0))
            throw Error(ErrorCode::CoverageGap, "point " + std::to_string(x) + " lies in no member");
        for (auto& w : y.weights) w /= total;
    }
    return out;
}

double lipschitz_audit(const FiniteMetricSpace& domain,
                       const std::function<double(std::size_t, std::size_t)>& output_distance)
{
    constexpr double kZero = 1e-12;
    double lip = 0.0;
    for (std::size_t i = 0; i < domain.size(); ++i)
        for (std::size_t j = i + 1; j < domain.size(); ++j) {
            const double out = output_distance(i, j);
            const double in = domain(i, j);
            if (in <= 0.0) {
                if (out > kZero)
                    throw Error(ErrorCode::NotWellDefined, "coincident points with distinct images");
                continue;
            }
            lip = std::max(lip, out / in);
        }
    return lip;
}

HomotopyInverse::HomotopyInverse(const NerveComplex& nerve, const Cover& thickened, KuratowskiImage ambient)
    : anchors_(nerve.anchors()), ambient_(std::move(ambient))
{
    if (anchors_.size() != thickened.size())
        throw Error(ErrorCode::BadAnchor, "nerve carries no anchor per member");
    for (std::size_t i = 0; i < anchors_.size(); ++i)
        if (!thickened.contains(i, anchors_[i]))
            throw Error(ErrorCode::BadAnchor, "anchor of member " + std::to_string(i) + " lies outside it");
}

Eigen::VectorXd HomotopyInverse::operator()(const NervePoint& y) const
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(ambient_.coords.cols());
    for (std::size_t j = 0; j < y.vertices.size(); ++j)
        out += y.weights[j] * ambient_.point(anchors_.at(y.vertices[j]));
    return out;
}

std::vector<double> HomotopyInverse::round_trip_displacements(const std::vector<NervePoint>& images) const
{
    std::vector<double> out;
    out.reserve(images.size());
    for (std::size_t p = 0; p < images.size(); ++p) out.push_back(sup_distance((*this)(images[p]), ambient_.point(p)));
    return out;
}

HomotopyInverse build_g_r(const NerveComplex& nerve, const Cover& thickened, KuratowskiImage ambient)
{
    return HomotopyInverse(nerve, thickened, std::move(ambient));
}

}  // namespace fillrad
