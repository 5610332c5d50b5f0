#ifndef SPLITREE_PARAMS_HPP
#define SPLITREE_PARAMS_HPP

#include <string>

namespace splitree {

// Structural parameters of a split tree: branch factor b, leaf capacity s,
// balls kept by a splitting vertex s0, balls seeded to each child s1.
struct SplitParams {
    int b = 2;
    int s = 1;
    int s0 = 1;
    int s1 = 0;
};

struct ParamCheck {
    bool ok = true;
    std::string message; // names the violated inequality when !ok
    explicit operator bool() const { return ok; }
};

ParamCheck validate_params(const SplitParams& p);

// Throws std::invalid_argument with the violation report when invalid.
void require_valid(const SplitParams& p);

} // namespace splitree

#endif
