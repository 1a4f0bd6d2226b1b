#pragma once

#include "fillrad/metric.hpp"
#include "fillrad/models.hpp"

#include <gmpxx.h>

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

namespace fillrad {

using Simplex = std::vector<std::size_t>;  // sorted vertex ids

enum class Field { Rational, Z2 };

/// Face-closed simplicial complex; simplices()[k] holds the k-simplices in lexicographic order.
class SimplicialComplex {
public:
    SimplicialComplex() = default;
    /// Adds every face of the given simplices.
    static SimplicialComplex from_simplices(std::size_t vertex_count, const std::vector<Simplex>& generators);
    /// Takes face-closed per-dimension simplex lists as given; only sorts them.
    static SimplicialComplex from_levels(std::size_t vertex_count, std::vector<std::vector<Simplex>> levels);

    std::size_t vertex_count() const noexcept { return vertex_count_; }
    int dimension() const noexcept { return static_cast<int>(simplices_.size()) - 1; }
    const std::vector<Simplex>& simplices(int k) const;
    std::size_t count(int k) const { return simplices(k).size(); }
    /// Position of s among the simplices of its dimension.
    std::optional<std::size_t> index_of(const Simplex& s) const;
    bool contains(const Simplex& s) const { return index_of(s).has_value(); }
    std::optional<double> scale;

private:
    std::size_t vertex_count_ = 0;
    std::vector<std::vector<Simplex>> simplices_;
};

/// Sparse chain; coefficients are kept reduced mod 2 for Z2 and never stored as zero.
struct ChainVector {
    int dimension = 0;
    Field field = Field::Rational;
    std::map<Simplex, mpq_class> coefficients;

    void add(const Simplex& s, const mpq_class& c);
    bool empty() const noexcept { return coefficients.empty(); }
};

ChainVector chain_from_descriptor(const CycleDescriptor& cycle, Field field);
ChainVector boundary(const ChainVector& chain);

/// Column-sparse matrix; column j lists (row, value) pairs with increasing rows.
struct SparseMatrix {
    std::size_t rows = 0;
    std::vector<std::vector<std::pair<std::size_t, mpq_class>>> columns;
};

/// Matrix of the boundary map from k-simplices to (k-1)-simplices; asserts the composite with
/// the next boundary map vanishes whenever both exist.
SparseMatrix boundary_matrix(const SimplicialComplex& complex, int k, Field field);
std::size_t rank(const SparseMatrix& m, Field field);

struct BoundaryVerdict {
    bool is_boundary = false;
    std::optional<ChainVector> witness;  // present when requested and is_boundary
};

/// Solves boundary(x) = chain over the chain's field in exact arithmetic. Throws NotACycle.
BoundaryVerdict is_boundary(const ChainVector& chain, const SimplicialComplex& complex, bool want_witness = false);

/// Closed rule: a vertex set spans a simplex iff all pairwise distances are <= scale.
SimplicialComplex vr_complex(const FiniteMetricSpace& space, double scale, int max_dim);
/// Vietoris-Rips complex on a vertex subset; vertex ids are positions in `vertices`.
SimplicialComplex vr_complex_on(const FiniteMetricSpace& space, const std::vector<std::size_t>& vertices,
                                double scale, int max_dim);

/// Strong collapse of the Rips complex at a fixed scale: dominated vertices are retracted onto
/// their dominators until none is left. The retraction is a homotopy equivalence, so a cycle is
/// a boundary iff its pushforward is.
struct CollapsedRips {
    std::vector<std::size_t> core;       // surviving original vertex ids, increasing
    std::vector<std::size_t> retract;    // original vertex -> position in core
};
CollapsedRips strong_collapse(const FiniteMetricSpace& space, double scale);
/// Image of a chain under a vertex map; degenerate simplices are dropped.
ChainVector push_forward(const ChainVector& chain, const std::vector<std::size_t>& vertex_map);

/// Rips complex at a fixed scale reduced for one cycle: dominated vertices are retracted (and
/// the cycle pushed forward), then dominated edges outside the cycle's support are removed.
/// Both steps preserve the homotopy type of the flag complex and keep the cycle inside it.
struct ReducedRips {
    std::vector<std::size_t> core;  // surviving original vertex ids
    SimplicialComplex complex;      // flag complex of the reduced graph on core positions
    ChainVector cycle;              // pushed-forward cycle in core positions
    std::size_t removed_edges = 0;
};
ReducedRips reduce_rips(const FiniteMetricSpace& space, double scale, const ChainVector& cycle);

/// Map from the sample onto a vertex set spanning one Rips simplex such that every simplex of
/// the cycle together with its image spans a simplex. Contiguity makes the cycle homologous to
/// its image, which bounds inside the simplex.
struct SimplexContraction {
    std::vector<std::size_t> vertices;  // pairwise within scale; empty for the zero cycle
    std::vector<std::size_t> image;     // sample point -> position in vertices
};
/// Greedy search from every start point, growing up to max_vertices spread-out vertices.
std::optional<SimplexContraction> simplex_contraction(const FiniteMetricSpace& space, double scale,
                                                     const ChainVector& cycle, std::size_t max_vertices);

/// is_boundary in the Rips complex at `scale` with max-dim = chain dimension + 1. Unless
/// `collapse` is false, a simplex contraction settles yes-verdicts directly and everything else
/// is decided by cohomology on the reduced graph.
bool is_rips_boundary(const FiniteMetricSpace& space, double scale, const ChainVector& cycle, bool collapse = true);

/// is_boundary in the full Rips complex at `scale` with max-dim = chain dimension + 1, decided by
/// pairing the cycle with a cocycle basis read off the reduced coboundary matrices. Top simplices
/// are enumerated on the fly, never stored.
bool is_rips_boundary_cohomology(const FiniteMetricSpace& space, double scale, const ChainVector& cycle);

/// Cycle file: first line the dimension, then one line "coeff v0 ... vk" per simplex.
ChainVector read_cycle_file(std::istream& in, Field field = Field::Rational);
void write_cycle_file(std::ostream& out, const ChainVector& chain);

}  // namespace fillrad
