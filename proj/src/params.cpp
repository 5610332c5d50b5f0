#include "splitree/params.hpp"

#include <stdexcept>
#include <string>

namespace splitree {

ParamCheck validate_params(const SplitParams& p) {
    if (p.b < 2)
        return {false, "b >= 2 violated: b = " + std::to_string(p.b)};
    if (p.s < 1)
        return {false, "s >= 1 violated: s = " + std::to_string(p.s)};
    if (p.s0 < 0 || p.s0 > p.s)
        return {false, "0 <= s0 <= s violated: s0 = " + std::to_string(p.s0) +
                           ", s = " + std::to_string(p.s)};
    const long long bs1 = static_cast<long long>(p.b) * p.s1;
    const long long cap = static_cast<long long>(p.s) + 1 - p.s0;
    if (p.s1 < 0 || bs1 > cap)
        return {false, "0 <= b*s1 <= s+1-s0 violated: b*s1 = " + std::to_string(bs1) +
                           ", s+1-s0 = " + std::to_string(cap)};
    return {};
}

void require_valid(const SplitParams& p) {
    if (auto check = validate_params(p); !check)
        throw std::invalid_argument("invalid split parameters: " + check.message);
}

} // namespace splitree
