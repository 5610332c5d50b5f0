#ifndef SPLITREE_BRANCHING_HPP
#define SPLITREE_BRANCHING_HPP

#include <cstdint>

#include "splitree/rng.hpp"
#include "splitree/split_source.hpp"

namespace splitree {

struct HeavyCountResult {
    std::int64_t count = 0;     // vertices with M_v^n >= K
    int max_depth_reached = 0;
    std::int64_t expansions = 0; // split vectors sampled
};

// Monte Carlo over the weighted branching process M_v^n = n * prod W,
// independent of the ball-based tree. Weights are nonincreasing along
// root paths, so pruning below K is exact.
HeavyCountResult count_heavy(const SplitVectorSource& source, double n, double K,
                             Rng& rng);

} // namespace splitree

#endif
