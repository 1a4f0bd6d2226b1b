#include "cohomology.hpp"

#include "fillrad/error.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <utility>
#include <unordered_map>
#include <unordered_set>

namespace fillrad::detail {
namespace {

constexpr std::size_t max_vertices = 6;

struct Cell {
    double diam = 0.0;
    std::uint64_t index = 0;  // combinatorial number system, unique within a dimension
    std::array<std::uint32_t, max_vertices> v{};
    std::uint8_t size = 0;
};

/// Filtration order: diameter, then index.
bool earlier(double da, std::uint64_t ia, double db, std::uint64_t ib)
{
    return da < db || (da == db && ia < ib);
}

// Coefficient arithmetic. Each policy provides T, one(), from(), zero(), add(), mul(), neg(), div().

struct Overflow {};

struct SmallRational {
    std::int64_t num = 0;
    std::int64_t den = 1;
};

/// Rationals with 64-bit parts; throws Overflow so the caller can retry with GMP.
struct SmallQ {
    using T = SmallRational;
    static T one() { return {1, 1}; }
    static T from(const mpq_class& q)
    {
        if (!q.get_num().fits_slong_p() || !q.get_den().fits_slong_p()) throw Overflow{};
        return make(q.get_num().get_si(), q.get_den().get_si());
    }
    static bool zero(const T& a) { return a.num == 0; }
    static T add(const T& a, const T& b)
    {
        if (a.den == 1 && b.den == 1) return make(static_cast<__int128>(a.num) + b.num, 1);
        return make(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                    static_cast<__int128>(a.den) * b.den);
    }
    static T mul(const T& a, const T& b)
    {
        return make(static_cast<__int128>(a.num) * b.num, static_cast<__int128>(a.den) * b.den);
    }
    static T neg(const T& a) { return {-a.num, a.den}; }
    static T div(const T& a, const T& b)
    {
        const __int128 num = static_cast<__int128>(a.num) * b.den, den = static_cast<__int128>(a.den) * b.num;
        return den < 0 ? make(-num, -den) : make(num, den);
    }

private:
    static T make(__int128 num, __int128 den)
    {
        if (den != 1) {
            unsigned __int128 x = num < 0 ? -num : num, y = den;
            while (y != 0) x = std::exchange(y, x % y);
            if (x > 1) {
                num /= static_cast<__int128>(x);
                den /= static_cast<__int128>(x);
            }
        }
        constexpr __int128 limit = std::int64_t{1} << 62;
        if (num >= limit || num <= -limit || den >= limit) throw Overflow{};
        return {static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
    }
};

struct BigQ {
    using T = mpq_class;
    static T one() { return 1; }
    static T from(const mpq_class& q) { return q; }
    static bool zero(const T& a) { return a == 0; }
    static T add(const T& a, const T& b) { return a + b; }
    static T mul(const T& a, const T& b) { return a * b; }
    static T neg(const T& a) { return -a; }
    static T div(const T& a, const T& b) { return a / b; }
};

struct Mod2 {
    using T = std::uint8_t;
    static T one() { return 1; }
    static T from(const mpq_class& q)
    {
        if (q.get_den() != 1)
            throw Error(ErrorCode::InvalidArgument, "Z2 coefficient must be an integer");
        return mpz_class(q.get_num() % 2) == 0 ? 0 : 1;
    }
    static bool zero(T a) { return a == 0; }
    static T add(T a, T b) { return a ^ b; }
    static T mul(T a, T b) { return a & b; }
    static T neg(T a) { return a; }
    static T div(T a, T) { return a; }
};

/// Flag complex of a graph with cells indexed in the combinatorial number system.
class FlagComplex {
public:
    FlagComplex(const std::vector<Bits>& adjacency, const std::function<double(std::size_t, std::size_t)>& weight)
        : adjacency_(adjacency), n_(adjacency.size()), words_(n_ == 0 ? 0 : adjacency[0].word_count())
    {
        binomial_.assign((n_ + 1) * (max_vertices + 2), 0);
        for (std::size_t a = 0; a <= n_; ++a) {
            binom(a, 0) = 1;
            for (std::size_t b = 1; b <= max_vertices + 1 && b <= a; ++b) {
                const std::uint64_t x = binom(a - 1, b - 1), y = b <= a - 1 ? binom(a - 1, b) : 0;
                if (x > std::numeric_limits<std::uint64_t>::max() - y)
                    throw Error(ErrorCode::InvalidArgument, "graph too large for simplex indexing");
                binom(a, b) = x + y;
            }
        }
        dist_.assign(n_ * n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                if (i != j) dist_[i * n_ + j] = weight(i, j);
    }

    /// Vertices must be increasing.
    Cell make(const std::uint32_t* v, std::size_t size) const
    {
        Cell c;
        c.size = static_cast<std::uint8_t>(size);
        for (std::size_t i = 0; i < size; ++i) {
            c.v[i] = v[i];
            c.index += binom(v[i], i + 1);
            for (std::size_t j = 0; j < i; ++j) c.diam = std::max(c.diam, dist_[v[j] * n_ + v[i]]);
        }
        return c;
    }

    /// Calls f(diam, index, sign) for every cofacet; sign is its coefficient in the coboundary.
    template <class F>
    void cofacets(const Cell& c, std::vector<std::uint64_t>& scratch, F&& f) const
    {
        scratch.assign(adjacency_[c.v[0]].data(), adjacency_[c.v[0]].data() + words_);
        for (std::size_t i = 1; i < c.size; ++i) {
            const std::uint64_t* row = adjacency_[c.v[i]].data();
            for (std::size_t w = 0; w < words_; ++w) scratch[w] &= row[w];
        }
        // low[p]: index part of vertices below position p; high[p]: shifted part from p on.
        std::array<std::uint64_t, max_vertices + 1> low{}, high{};
        for (std::size_t i = 0; i < c.size; ++i) low[i + 1] = low[i] + binom(c.v[i], i + 1);
        for (std::size_t i = c.size; i-- > 0;) high[i] = high[i + 1] + binom(c.v[i], i + 2);
        std::size_t pos = 0;
        for (std::size_t w = 0; w < words_; ++w)
            for (std::uint64_t bits = scratch[w]; bits; bits &= bits - 1) {
                const std::size_t u = w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits));
                while (pos < c.size && c.v[pos] < u) ++pos;
                double diam = c.diam;
                const double* row = &dist_[u * n_];
                for (std::size_t i = 0; i < c.size; ++i) diam = std::max(diam, row[c.v[i]]);
                f(diam, low[pos] + binom(u, pos + 1) + high[pos], pos % 2 == 0 ? 1 : -1);
            }
    }

    /// All cells with 1..max_size vertices, grouped by vertex count - 1.
    std::vector<std::vector<Cell>> cells(std::size_t max_size) const
    {
        std::vector<std::vector<Cell>> out(max_size);
        std::array<std::uint32_t, max_vertices> current{};
        auto grow = [&](auto&& self, std::size_t size, const Bits& candidates) -> void {
            out[size - 1].push_back(make(current.data(), size));
            if (size == max_size) return;
            candidates.each([&](std::size_t w) {
                if (w <= current[size - 1]) return;
                current[size] = static_cast<std::uint32_t>(w);
                self(self, size + 1, candidates & adjacency_[w]);
            });
        };
        for (std::size_t v = 0; v < n_; ++v) {
            current[0] = static_cast<std::uint32_t>(v);
            grow(grow, 1, adjacency_[v]);
        }
        return out;
    }

private:
    std::uint64_t& binom(std::size_t a, std::size_t b) { return binomial_[a * (max_vertices + 2) + b]; }
    std::uint64_t binom(std::size_t a, std::size_t b) const { return binomial_[a * (max_vertices + 2) + b]; }

    const std::vector<Bits>& adjacency_;
    std::size_t n_;
    std::size_t words_;
    std::vector<std::uint64_t> binomial_;
    std::vector<double> dist_;
};

template <class P>
struct Entry {
    double diam;
    std::uint64_t index;
    typename P::T coefficient;
};

/// Working coboundary column kept as a heap with lazy cancellation.
template <class P>
class WorkingColumn {
public:
    void push(double diam, std::uint64_t index, typename P::T c)
    {
        heap_.push_back({diam, index, std::move(c)});
        std::push_heap(heap_.begin(), heap_.end(), later);
    }
    /// Earliest entry with nonzero total coefficient, left on top of the heap.
    const Entry<P>* pivot()
    {
        while (!heap_.empty()) {
            std::pop_heap(heap_.begin(), heap_.end(), later);
            Entry<P> top = std::move(heap_.back());
            heap_.pop_back();
            while (!heap_.empty() && heap_.front().index == top.index && heap_.front().diam == top.diam) {
                std::pop_heap(heap_.begin(), heap_.end(), later);
                top.coefficient = P::add(top.coefficient, heap_.back().coefficient);
                heap_.pop_back();
            }
            if (!P::zero(top.coefficient)) {
                heap_.push_back(std::move(top));
                std::push_heap(heap_.begin(), heap_.end(), later);
                return &heap_.front();
            }
        }
        return nullptr;
    }
    void clear() { heap_.clear(); }

private:
    static bool later(const Entry<P>& a, const Entry<P>& b) { return earlier(b.diam, b.index, a.diam, a.index); }
    std::vector<Entry<P>> heap_;
};

template <class P>
struct Pivot {
    std::vector<std::pair<const Cell*, typename P::T>> combination;
    typename P::T coefficient;
};

/// Reduces coboundary matrices of dimension 0..k with clearing; a zero column in dimension k is a
/// cocycle, and the non-cleared ones form a cohomology basis. The cycle bounds iff all pair to 0.
template <class P>
bool solve(const FlagComplex& complex, const std::vector<std::vector<Cell>>& levels,
           const std::unordered_map<std::uint64_t, mpq_class>& target_in)
{
    using T = typename P::T;
    std::unordered_map<std::uint64_t, T> target;
    for (const auto& [index, c] : target_in) target.emplace(index, P::from(c));
    const std::size_t k = levels.size() - 1;

    std::vector<std::uint64_t> scratch;
    WorkingColumn<P> column;
    std::unordered_set<std::uint64_t> cleared;
    for (std::size_t d = 0; d <= k; ++d) {
        std::unordered_map<std::uint64_t, Pivot<P>> pivots;
        std::vector<std::pair<const Cell*, T>> combination;
        auto add_coboundary = [&](const Cell& s, const T& factor) {
            complex.cofacets(s, scratch, [&](double diam, std::uint64_t index, int sign) {
                column.push(diam, index, sign > 0 ? factor : P::neg(factor));
            });
        };
        for (const Cell& sigma : levels[d]) {
            if (cleared.count(sigma.index)) continue;
            column.clear();
            combination.assign(1, {&sigma, P::one()});
            add_coboundary(sigma, P::one());
            const Entry<P>* low = nullptr;
            while ((low = column.pivot()) != nullptr) {
                const auto found = pivots.find(low->index);
                if (found == pivots.end()) break;
                const Pivot<P>& other = found->second;
                const T factor = P::neg(P::div(low->coefficient, other.coefficient));
                for (const auto& [cell, c] : other.combination) {
                    const T scaled = P::mul(factor, c);
                    add_coboundary(*cell, scaled);
                    combination.emplace_back(cell, scaled);
                }
            }
            if (low != nullptr) {
                Pivot<P> p{{}, low->coefficient};
                // Merge repeated cells so stored combinations stay short.
                std::sort(combination.begin(), combination.end(),
                          [](const auto& a, const auto& b) { return a.first->index < b.first->index; });
                for (auto& [cell, c] : combination) {
                    if (!p.combination.empty() && p.combination.back().first == cell)
                        p.combination.back().second = P::add(p.combination.back().second, c);
                    else
                        p.combination.emplace_back(cell, std::move(c));
                }
                std::erase_if(p.combination, [](const auto& e) { return P::zero(e.second); });
                pivots.emplace(low->index, std::move(p));
            } else if (d == k) {
                T pairing{};
                for (const auto& [cell, c] : combination) {
                    const auto t = target.find(cell->index);
                    if (t != target.end()) pairing = P::add(pairing, P::mul(c, t->second));
                }
                if (!P::zero(pairing)) return false;
            }
        }
        cleared.clear();
        for (const auto& [index, p] : pivots) cleared.insert(index);
    }
    return true;
}

}  // namespace

bool flag_cycle_bounds(const std::vector<Bits>& adjacency,
                       const std::function<double(std::size_t, std::size_t)>& weight, const ChainVector& cycle)
{
    if (!boundary(cycle).empty())
        throw Error(ErrorCode::NotACycle, "chain has nonzero boundary");
    if (cycle.empty()) return true;
    const auto k = static_cast<std::size_t>(cycle.dimension);
    if (k + 2 > max_vertices)
        throw Error(ErrorCode::InvalidArgument, "cycle dimension too large for the cohomology solver");
    const FlagComplex complex(adjacency, weight);

    std::unordered_map<std::uint64_t, mpq_class> target;
    for (const auto& [simplex, c] : cycle.coefficients) {
        std::array<std::uint32_t, max_vertices> v{};
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (simplex[i] >= adjacency.size())
                throw Error(ErrorCode::InvalidArgument, "cycle simplex outside the complex");
            for (std::size_t j = 0; j < i; ++j)
                if (!adjacency[simplex[j]].test(simplex[i]))
                    throw Error(ErrorCode::InvalidArgument, "cycle simplex outside the complex");
            v[i] = static_cast<std::uint32_t>(simplex[i]);
        }
        target[complex.make(v.data(), simplex.size()).index] = c;
    }

    auto levels = complex.cells(k + 1);
    for (auto& level : levels)
        std::sort(level.begin(), level.end(),
                  [](const Cell& a, const Cell& b) { return earlier(b.diam, b.index, a.diam, a.index); });
    if (cycle.field == Field::Z2) return solve<Mod2>(complex, levels, target);
    try {
        return solve<SmallQ>(complex, levels, target);
    } catch (const Overflow&) {
        return solve<BigQ>(complex, levels, target);
    }
}

}  // namespace fillrad::detail
