#include "fillrad/chains.hpp"

#include "fillrad/error.hpp"

#include "bits.hpp"
#include "cohomology.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

namespace fillrad {
namespace {

using detail::Bits;
using SparseColumn = std::vector<std::pair<std::size_t, mpq_class>>;

mpq_class reduce_coefficient(const mpq_class& c, Field field)
{
    if (field == Field::Rational) return c;
    if (c.get_den() != 1)
        throw Error(ErrorCode::InvalidArgument, "Z2 coefficient must be an integer");
    return mpz_class(c.get_num() % 2) == 0 ? mpq_class(0) : mpq_class(1);
}

/// Sign of the permutation sorting `s`; zero if `s` has a repeated entry.
int sort_with_sign(Simplex& s)
{
    int sign = 1;
    for (std::size_t i = 1; i < s.size(); ++i)
        for (std::size_t j = i; j > 0 && s[j - 1] >= s[j]; --j) {
            if (s[j - 1] == s[j]) return 0;
            std::swap(s[j - 1], s[j]);
            sign = -sign;
        }
    return sign;
}

SparseMatrix build_boundary(const SimplicialComplex& complex, int k, Field field)
{
    SparseMatrix m;
    m.rows = complex.count(k - 1);
    const auto& cells = complex.simplices(k);
    m.columns.reserve(cells.size());
    for (const auto& s : cells) {
        SparseColumn col;
        for (std::size_t i = 0; i < s.size(); ++i) {
            Simplex face = s;
            face.erase(face.begin() + static_cast<long>(i));
            const auto row = complex.index_of(face);
            if (!row)
                throw Error(ErrorCode::InvalidArgument, "complex is not face-closed");
            const mpq_class sign = (field == Field::Z2 || i % 2 == 0) ? 1 : -1;
            col.emplace_back(*row, sign);
        }
        std::sort(col.begin(), col.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        m.columns.push_back(std::move(col));
    }
    return m;
}

/// col += factor * other, dropping cancellations.
void axpy(SparseColumn& col, const mpq_class& factor, const SparseColumn& other)
{
    SparseColumn out;
    out.reserve(col.size() + other.size());
    std::size_t a = 0, b = 0;
    while (a < col.size() || b < other.size()) {
        if (b == other.size() || (a < col.size() && col[a].first < other[b].first)) {
            out.push_back(std::move(col[a++]));
        } else if (a == col.size() || other[b].first < col[a].first) {
            out.emplace_back(other[b].first, factor * other[b].second);
            ++b;
        } else {
            mpq_class v = col[a].second + factor * other[b].second;
            if (v != 0) out.emplace_back(col[a].first, std::move(v));
            ++a;
            ++b;
        }
    }
    col = std::move(out);
}

/// Lowest-pivot column reduction over Q, optionally recording each reduced column as a
/// combination of original columns.
class RationalReducer {
public:
    RationalReducer(const SparseMatrix& m, bool track) : pivot_of_(m.rows, npos), track_(track)
    {
        for (std::size_t j = 0; j < m.columns.size(); ++j) {
            SparseColumn col = m.columns[j];
            SparseColumn combo;
            if (track_) combo.emplace_back(j, 1);
            while (!col.empty()) {
                const std::size_t low = col.back().first;
                const std::size_t p = pivot_of_[low];
                if (p == npos) break;
                const mpq_class factor = -col.back().second / reduced_[p].back().second;
                axpy(col, factor, reduced_[p]);
                if (track_) axpy(combo, factor, combos_[p]);
            }
            if (col.empty()) continue;
            pivot_of_[col.back().first] = reduced_.size();
            reduced_.push_back(std::move(col));
            combos_.push_back(std::move(combo));
        }
    }

    std::size_t rank() const noexcept { return reduced_.size(); }

    /// Reduces `target` to zero if it lies in the column space; returns the solution combination.
    std::optional<SparseColumn> solve(SparseColumn target) const
    {
        SparseColumn solution;
        while (!target.empty()) {
            const std::size_t p = pivot_of_[target.back().first];
            if (p == npos) return std::nullopt;
            const mpq_class factor = -target.back().second / reduced_[p].back().second;
            axpy(target, factor, reduced_[p]);
            if (track_) axpy(solution, -factor, combos_[p]);
        }
        return solution;
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<std::size_t> pivot_of_;
    std::vector<SparseColumn> reduced_;
    std::vector<SparseColumn> combos_;
    bool track_;
};

class Z2Reducer {
public:
    Z2Reducer(const SparseMatrix& m, bool track) : rows_(m.rows), cols_(m.columns.size()), pivot_of_(m.rows, npos), track_(track)
    {
        for (std::size_t j = 0; j < m.columns.size(); ++j) {
            Bits col(rows_);
            for (const auto& [row, v] : m.columns[j])
                if (v.get_num() % 2 != 0) col.set(row);
            Bits combo(track_ ? cols_ : 0);
            if (track_) combo.set(j);
            std::size_t low = col.last();
            while (low != Bits::npos && pivot_of_[low] != npos) {
                col.flip_with(reduced_[pivot_of_[low]]);
                if (track_) combo.flip_with(combos_[pivot_of_[low]]);
                low = col.last();
            }
            if (low == Bits::npos) continue;
            pivot_of_[low] = reduced_.size();
            reduced_.push_back(std::move(col));
            combos_.push_back(std::move(combo));
        }
    }

    std::size_t rank() const noexcept { return reduced_.size(); }

    std::optional<SparseColumn> solve(const SparseColumn& target) const
    {
        Bits b(rows_);
        for (const auto& [row, v] : target)
            if (v.get_num() % 2 != 0) b.set(row);
        Bits solution(track_ ? cols_ : 0);
        for (std::size_t low = b.last(); low != Bits::npos; low = b.last()) {
            if (pivot_of_[low] == npos) return std::nullopt;
            b.flip_with(reduced_[pivot_of_[low]]);
            if (track_) solution.flip_with(combos_[pivot_of_[low]]);
        }
        SparseColumn out;
        if (track_)
            for (std::size_t j = 0; j < cols_; ++j)
                if (solution.test(j)) out.emplace_back(j, 1);
        return out;
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t rows_, cols_;
    std::vector<std::size_t> pivot_of_;
    std::vector<Bits> reduced_;
    std::vector<Bits> combos_;
    bool track_;
};

void enumerate_cliques(Simplex& current,
                       const std::vector<std::size_t>& candidates, int max_dim,
                       std::vector<std::vector<Simplex>>& out, const std::vector<Bits>& adjacency)
{
    const auto dim = static_cast<int>(current.size()) - 1;
    if (out.size() <= static_cast<std::size_t>(dim)) out.resize(static_cast<std::size_t>(dim) + 1);
    out[static_cast<std::size_t>(dim)].push_back(current);
    if (dim == max_dim) return;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const std::size_t v = candidates[i];
        std::vector<std::size_t> next;
        for (std::size_t j = i + 1; j < candidates.size(); ++j)
            if (adjacency[v].test(candidates[j])) next.push_back(candidates[j]);
        current.push_back(v);
        enumerate_cliques(current, next, max_dim, out, adjacency);
        current.pop_back();
    }
}

/// Flag complex of a graph given by adjacency bitsets, up to max_dim.
SimplicialComplex flag_complex(const std::vector<Bits>& adjacency, int max_dim)
{
    const std::size_t n = adjacency.size();
    std::vector<std::vector<Simplex>> levels(1);
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<std::size_t> candidates;
        for (std::size_t w = v + 1; w < n; ++w)
            if (adjacency[v].test(w)) candidates.push_back(w);
        Simplex current{v};
        enumerate_cliques(current, candidates, max_dim, levels, adjacency);
    }
    return SimplicialComplex::from_levels(n, std::move(levels));
}

}  // namespace

SimplicialComplex SimplicialComplex::from_levels(std::size_t vertex_count, std::vector<std::vector<Simplex>> levels)
{
    SimplicialComplex c;
    c.vertex_count_ = vertex_count;
    while (levels.size() > 1 && levels.back().empty()) levels.pop_back();
    if (levels.empty()) levels.resize(1);
    for (auto& level : levels) std::sort(level.begin(), level.end());
    c.simplices_ = std::move(levels);
    return c;
}

SimplicialComplex SimplicialComplex::from_simplices(std::size_t vertex_count, const std::vector<Simplex>& generators)
{
    std::vector<std::set<Simplex>> levels;
    for (auto g : generators) {
        std::sort(g.begin(), g.end());
        if (g.empty() || std::adjacent_find(g.begin(), g.end()) != g.end() || g.back() >= vertex_count)
            throw Error(ErrorCode::InvalidArgument, "invalid simplex");
        const std::size_t k = g.size();
        if (levels.size() < k) levels.resize(k);
        for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
            Simplex f;
            for (std::size_t j = 0; j < k; ++j)
                if (mask & (std::size_t{1} << j)) f.push_back(g[j]);
            levels[f.size() - 1].insert(std::move(f));
        }
    }
    SimplicialComplex c;
    c.vertex_count_ = vertex_count;
    c.simplices_.resize(std::max<std::size_t>(levels.size(), 1));
    for (std::size_t v = 0; v < vertex_count; ++v) c.simplices_[0].push_back({v});
    for (std::size_t k = 1; k < levels.size(); ++k) c.simplices_[k].assign(levels[k].begin(), levels[k].end());
    return c;
}

const std::vector<Simplex>& SimplicialComplex::simplices(int k) const
{
    static const std::vector<Simplex> none;
    if (k < 0 || static_cast<std::size_t>(k) >= simplices_.size()) return none;
    return simplices_[static_cast<std::size_t>(k)];
}

std::optional<std::size_t> SimplicialComplex::index_of(const Simplex& s) const
{
    const auto& level = simplices(static_cast<int>(s.size()) - 1);
    const auto it = std::lower_bound(level.begin(), level.end(), s);
    if (it == level.end() || *it != s) return std::nullopt;
    return static_cast<std::size_t>(it - level.begin());
}

void ChainVector::add(const Simplex& s, const mpq_class& c)
{
    const mpq_class v = reduce_coefficient(c, field);
    if (v == 0) return;
    auto [it, fresh] = coefficients.try_emplace(s, v);
    if (fresh) return;
    it->second = reduce_coefficient(it->second + v, field);
    if (it->second == 0) coefficients.erase(it);
}

ChainVector chain_from_descriptor(const CycleDescriptor& cycle, Field field)
{
    ChainVector c{cycle.dimension, field, {}};
    for (std::size_t i = 0; i < cycle.simplices.size(); ++i) {
        Simplex s = cycle.simplices[i];
        const int sign = sort_with_sign(s);
        if (sign == 0)
            throw Error(ErrorCode::InvalidArgument, "degenerate simplex in cycle descriptor");
        c.add(s, mpq_class(sign * cycle.coefficients[i]));
    }
    return c;
}

ChainVector boundary(const ChainVector& chain)
{
    ChainVector out{chain.dimension - 1, chain.field, {}};
    if (chain.dimension == 0) return out;
    for (const auto& [s, c] : chain.coefficients)
        for (std::size_t i = 0; i < s.size(); ++i) {
            Simplex face = s;
            face.erase(face.begin() + static_cast<long>(i));
            out.add(face, i % 2 == 0 ? c : mpq_class(-c));
        }
    return out;
}

SparseMatrix boundary_matrix(const SimplicialComplex& complex, int k, Field field)
{
    if (k < 1)
        throw Error(ErrorCode::InvalidArgument, "boundary degree must be at least 1");
    SparseMatrix m = build_boundary(complex, k, field);
    if (k + 1 <= complex.dimension()) {
        const SparseMatrix up = build_boundary(complex, k + 1, field);
        for (const auto& col : up.columns) {
            SparseColumn acc;
            for (const auto& [row, v] : col) axpy(acc, v, m.columns[row]);
            for (auto& [row, v] : acc) v = reduce_coefficient(v, field);
            acc.erase(std::remove_if(acc.begin(), acc.end(), [](const auto& e) { return e.second == 0; }), acc.end());
            if (!acc.empty())
                throw Error(ErrorCode::InvalidArgument, "boundary of boundary is nonzero");
        }
    }
    return m;
}

std::size_t rank(const SparseMatrix& m, Field field)
{
    if (field == Field::Z2) return Z2Reducer(m, false).rank();
    return RationalReducer(m, false).rank();
}

BoundaryVerdict is_boundary(const ChainVector& chain, const SimplicialComplex& complex, bool want_witness)
{
    const int k = chain.dimension;
    SparseColumn target;
    for (const auto& [s, c] : chain.coefficients) {
        if (static_cast<int>(s.size()) != k + 1)
            throw Error(ErrorCode::InvalidArgument, "chain simplex has the wrong dimension");
        const auto row = complex.index_of(s);
        if (!row)
            throw Error(ErrorCode::InvalidArgument, "chain is not supported on the complex");
        target.emplace_back(*row, c);
    }
    if (!boundary(chain).empty())
        throw Error(ErrorCode::NotACycle, "chain has nonzero boundary");
    BoundaryVerdict verdict;
    ChainVector witness{k + 1, chain.field, {}};
    if (target.empty()) {
        verdict.is_boundary = true;
        if (want_witness) verdict.witness = witness;
        return verdict;
    }
    if (complex.count(k + 1) == 0) return verdict;
    std::sort(target.begin(), target.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    const SparseMatrix m = build_boundary(complex, k + 1, chain.field);
    const auto solution = chain.field == Field::Z2 ? Z2Reducer(m, want_witness).solve(target)
                                                   : RationalReducer(m, want_witness).solve(target);
    if (!solution) return verdict;
    verdict.is_boundary = true;
    if (want_witness) {
        for (const auto& [col, v] : *solution) witness.add(complex.simplices(k + 1)[col], v);
        verdict.witness = std::move(witness);
    }
    return verdict;
}

SimplicialComplex vr_complex_on(const FiniteMetricSpace& space, const std::vector<std::size_t>& vertices,
                                double scale, int max_dim)
{
    if (!(scale >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "scale must be nonnegative");
    if (max_dim < 1)
        throw Error(ErrorCode::InvalidArgument, "max-dim must be at least 1");
    const std::size_t n = vertices.size();
    std::vector<Bits> adjacency(n, Bits(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && space(vertices[i], vertices[j]) <= scale) adjacency[i].set(j);
    SimplicialComplex c = flag_complex(adjacency, max_dim);
    c.scale = scale;
    return c;
}

SimplicialComplex vr_complex(const FiniteMetricSpace& space, double scale, int max_dim)
{
    std::vector<std::size_t> all(space.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return vr_complex_on(space, all, scale, max_dim);
}

CollapsedRips strong_collapse(const FiniteMetricSpace& space, double scale)
{
    const std::size_t n = space.size();
    std::vector<Bits> closed(n, Bits(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (space(i, j) <= scale) closed[i].set(j);
    Bits alive(n);
    for (std::size_t i = 0; i < n; ++i) alive.set(i);
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t v = 0; v < n; ++v) {
            if (!alive.test(v)) continue;
            for (std::size_t w = 0; w < n; ++w) {
                if (w == v || !alive.test(w) || !closed[v].test(w)) continue;
                if (closed[v].subset_of_within(closed[w], alive)) {
                    parent[v] = w;
                    alive.reset(v);
                    changed = true;
                    break;
                }
            }
        }
    }
    CollapsedRips out;
    std::vector<std::size_t> position(n, static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < n; ++i)
        if (alive.test(i)) {
            position[i] = out.core.size();
            out.core.push_back(i);
        }
    out.retract.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = i;
        while (parent[r] != r) r = parent[r];
        out.retract[i] = position[r];
    }
    return out;
}

ChainVector push_forward(const ChainVector& chain, const std::vector<std::size_t>& vertex_map)
{
    ChainVector out{chain.dimension, chain.field, {}};
    for (const auto& [s, c] : chain.coefficients) {
        Simplex image(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) image[i] = vertex_map.at(s[i]);
        const int sign = sort_with_sign(image);
        if (sign != 0) out.add(image, sign > 0 ? c : mpq_class(-c));
    }
    return out;
}

namespace {

struct ReducedGraph {
    std::vector<std::size_t> core;
    std::vector<Bits> adjacency;  // on core positions
    ChainVector cycle;
    std::size_t removed_edges = 0;
};

ReducedGraph reduce_graph(const FiniteMetricSpace& space, double scale, const ChainVector& cycle)
{
    const std::size_t n = space.size();
    std::vector<Bits> closed(n, Bits(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (space(i, j) <= scale) closed[i].set(j);
    std::vector<bool> alive(n, true);
    ChainVector current = cycle;
    std::vector<std::size_t> identity(n);
    for (std::size_t i = 0; i < n; ++i) identity[i] = i;
    ReducedGraph out;

    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t v = 0; v < n; ++v) {
            if (!alive[v]) continue;
            std::size_t dominator = Bits::npos;
            closed[v].each([&](std::size_t w) {
                if (dominator == Bits::npos && w != v && closed[v].subset_of(closed[w])) dominator = w;
            });
            if (dominator == Bits::npos) continue;
            closed[v].each([&](std::size_t u) { closed[u].reset(v); });
            closed[v] = Bits(n);
            alive[v] = false;
            identity[v] = dominator;
            current = push_forward(current, identity);
            identity[v] = v;
            changed = true;
        }
        std::set<std::pair<std::size_t, std::size_t>> pinned;
        for (const auto& [simplex, c] : current.coefficients)
            for (std::size_t i = 0; i < simplex.size(); ++i)
                for (std::size_t j = i + 1; j < simplex.size(); ++j) pinned.insert({simplex[i], simplex[j]});
        for (std::size_t u = 0; u < n; ++u) {
            if (!alive[u]) continue;
            std::vector<std::size_t> up;
            closed[u].each([&](std::size_t v) {
                if (v > u) up.push_back(v);
            });
            for (auto v : up) {
                if (pinned.count({u, v})) continue;
                const Bits common = closed[u] & closed[v];
                bool dominated = false;
                common.each([&](std::size_t w) {
                    if (!dominated && w != u && w != v && common.subset_of(closed[w])) dominated = true;
                });
                if (!dominated) continue;
                closed[u].reset(v);
                closed[v].reset(u);
                ++out.removed_edges;
                changed = true;
            }
        }
    }

    std::vector<std::size_t> position(n, Bits::npos);
    for (std::size_t i = 0; i < n; ++i)
        if (alive[i]) {
            position[i] = out.core.size();
            out.core.push_back(i);
        }
    const std::size_t m = out.core.size();
    out.adjacency.assign(m, Bits(m));
    for (std::size_t a = 0; a < m; ++a)
        closed[out.core[a]].each([&](std::size_t w) {
            if (w != out.core[a]) out.adjacency[a].set(position[w]);
        });
    out.cycle = push_forward(current, position);
    return out;
}

}  // namespace

ReducedRips reduce_rips(const FiniteMetricSpace& space, double scale, const ChainVector& cycle)
{
    ReducedGraph graph = reduce_graph(space, scale, cycle);
    ReducedRips out{std::move(graph.core), flag_complex(graph.adjacency, cycle.dimension + 1), std::move(graph.cycle),
                    graph.removed_edges};
    out.complex.scale = scale;
    return out;
}

std::optional<SimplexContraction> simplex_contraction(const FiniteMetricSpace& space, double scale,
                                                     const ChainVector& cycle, std::size_t max_vertices)
{
    const std::size_t n = space.size();
    std::vector<std::size_t> support;
    for (const auto& [simplex, c] : cycle.coefficients) support.insert(support.end(), simplex.begin(), simplex.end());
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    if (support.empty()) return SimplexContraction{};

    for (std::size_t start = 0; start < n; ++start) {
        std::vector<std::size_t> chosen{start};
        std::vector<double> nearest(n);
        std::vector<std::size_t> image(n, start);
        for (std::size_t p = 0; p < n; ++p) nearest[p] = space(p, start);
        while (true) {
            bool contiguous = true;
            for (const auto& [simplex, c] : cycle.coefficients) {
                for (auto p : simplex)
                    for (auto q : simplex)
                        if (space(p, image[q]) > scale) contiguous = false;
                if (!contiguous) break;
            }
            if (contiguous) {
                SimplexContraction out{chosen, std::vector<std::size_t>(n)};
                for (std::size_t p = 0; p < n; ++p)
                    out.image[p] =
                        static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), image[p]) - chosen.begin());
                return out;
            }
            if (chosen.size() == max_vertices) break;
            // Farthest candidate that keeps every pairwise distance within scale.
            std::size_t best = Bits::npos;
            for (std::size_t q = 0; q < n; ++q) {
                bool fits = nearest[q] > 0.0;
                for (auto x : chosen) fits = fits && space(q, x) <= scale;
                if (fits && (best == Bits::npos || nearest[q] > nearest[best])) best = q;
            }
            if (best == Bits::npos) break;
            chosen.push_back(best);
            for (std::size_t p = 0; p < n; ++p)
                if (space(p, best) < nearest[p]) {
                    nearest[p] = space(p, best);
                    image[p] = best;
                }
        }
    }
    return std::nullopt;
}

bool is_rips_boundary(const FiniteMetricSpace& space, double scale, const ChainVector& cycle, bool collapse)
{
    const int top = cycle.dimension + 1;
    if (!collapse) return is_boundary(cycle, vr_complex(space, scale, top)).is_boundary;
    if (!boundary(cycle).empty())
        throw Error(ErrorCode::NotACycle, "chain has nonzero boundary");
    if (const auto contraction = simplex_contraction(space, scale, cycle, 16)) {
        if (contraction->vertices.empty()) return true;
        const ChainVector pushed = push_forward(cycle, contraction->image);
        if (is_boundary(pushed, vr_complex_on(space, contraction->vertices, scale, top)).is_boundary) return true;
    }
    const ReducedGraph reduced = reduce_graph(space, scale, cycle);
    return detail::flag_cycle_bounds(
        reduced.adjacency, [&](std::size_t a, std::size_t b) { return space(reduced.core[a], reduced.core[b]); },
        reduced.cycle);
}

bool is_rips_boundary_cohomology(const FiniteMetricSpace& space, double scale, const ChainVector& cycle)
{
    const std::size_t n = space.size();
    std::vector<Bits> adjacency(n, Bits(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && space(i, j) <= scale) adjacency[i].set(j);
    return detail::flag_cycle_bounds(adjacency, [&](std::size_t a, std::size_t b) { return space(a, b); }, cycle);
}

ChainVector read_cycle_file(std::istream& in, Field field)
{
    std::string line;
    int dim = -1;
    if (!std::getline(in, line) || !(std::istringstream(line) >> dim) || dim < 0)
        throw Error(ErrorCode::ParseError, "cycle file: missing dimension");
    ChainVector c{dim, field, {}};
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string coeff;
        if (!(row >> coeff)) continue;
        mpq_class value;
        if (value.set_str(coeff, 10) != 0)
            throw Error(ErrorCode::ParseError, "cycle file: bad coefficient '" + coeff + "'");
        value.canonicalize();
        Simplex s;
        long long v = 0;
        while (row >> v) {
            if (v < 0)
                throw Error(ErrorCode::ParseError, "cycle file: negative vertex");
            s.push_back(static_cast<std::size_t>(v));
        }
        if (!row.eof() || static_cast<int>(s.size()) != dim + 1)
            throw Error(ErrorCode::ParseError, "cycle file: simplex of wrong size");
        const int sign = sort_with_sign(s);
        if (sign == 0)
            throw Error(ErrorCode::ParseError, "cycle file: repeated vertex");
        c.add(s, sign > 0 ? value : mpq_class(-value));
    }
    return c;
}

void write_cycle_file(std::ostream& out, const ChainVector& chain)
{
    out << chain.dimension << '\n';
    for (const auto& [s, c] : chain.coefficients) {
        out << c.get_str();
        for (auto v : s) out << ' ' << v;
        out << '\n';
    }
}

}  // namespace fillrad
