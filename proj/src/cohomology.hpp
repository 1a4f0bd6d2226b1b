#pragma once

#include "fillrad/chains.hpp"

#include "bits.hpp"

#include <functional>
#include <vector>

namespace fillrad::detail {

/// True iff `cycle` bounds in the flag complex of the graph, truncated at cycle dimension + 1.
/// Simplices are ordered by their largest edge weight; the verdict does not depend on it.
bool flag_cycle_bounds(const std::vector<Bits>& adjacency,
                       const std::function<double(std::size_t, std::size_t)>& weight, const ChainVector& cycle);

}  // namespace fillrad::detail
