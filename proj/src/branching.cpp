#include "splitree/branching.hpp"

#include <stdexcept>
#include <vector>

namespace splitree {

HeavyCountResult count_heavy(const SplitVectorSource& source, double n, double K,
                             Rng& rng) {
    if (!(K >= 1.0)) throw std::invalid_argument("count_heavy: need K >= 1");

    HeavyCountResult result;
    if (n < K) return result;

    struct Node {
        double weight;
        int depth;
    };
    std::vector<Node> stack;
    std::vector<double> probs(static_cast<std::size_t>(source.branch_factor()));
    stack.push_back({n, 0});

    while (!stack.empty()) {
        const Node node = stack.back();
        stack.pop_back();
        ++result.count;
        if (node.depth > result.max_depth_reached)
            result.max_depth_reached = node.depth;

        source.sample(rng, probs);
        ++result.expansions;
        for (double p : probs) {
            const double w = node.weight * p;
            if (w >= K) stack.push_back({w, node.depth + 1});
        }
    }
    return result;
}

} // namespace splitree
