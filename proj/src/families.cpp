#include "splitree/families.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace splitree {

namespace {

FamilySpec finish(std::string name, SplitParams params, SplitVectorSource source,
                  std::string notes) {
    require_valid(params);
    FamilySpec spec{std::move(name), params, std::move(source), {}, false,
                    std::move(notes)};
    spec.constants = spec.source.constants();
    spec.lattice_suspect = spec.source.lattice_suspect();
    return spec;
}

} // namespace

FamilySpec preset_bst() {
    return finish("bst", {2, 1, 1, 0}, SplitVectorSource::dirichlet_symmetric(1.0, 2),
                  "binary search tree; N = n exactly");
}

FamilySpec preset_mary(int m) {
    if (m < 2) throw std::invalid_argument("mary: need m >= 2");
    std::ostringstream name;
    name << "mary(" << m << ")";
    return finish(name.str(), {m, m - 1, m - 1, 0},
                  SplitVectorSource::uniform_spacings(m),
                  "m-ary search tree with uniform pivot spacings");
}

FamilySpec preset_trie(std::vector<double> p) {
    std::ostringstream name;
    name << "trie(";
    for (std::size_t i = 0; i < p.size(); ++i) name << (i ? "," : "") << p[i];
    name << ")";
    const int b = static_cast<int>(p.size());
    return finish(name.str(), {b, 1, 0, 0},
                  SplitVectorSource::deterministic_permuted(std::move(p)),
                  "trie over a randomly permuted deterministic alphabet law");
}

std::vector<std::string> preset_names() { return {"bst", "mary", "trie"}; }

FamilySpec make_family(const std::string& name,
                       const std::vector<double>& family_params) {
    if (name == "bst") {
        if (!family_params.empty())
            throw std::invalid_argument("bst takes no family parameters");
        return preset_bst();
    }
    if (name == "mary") {
        if (family_params.size() != 1)
            throw std::invalid_argument("mary needs exactly one parameter: m");
        const double m = family_params[0];
        if (m != std::floor(m))
            throw std::invalid_argument("mary: m must be an integer");
        return preset_mary(static_cast<int>(m));
    }
    if (name == "trie") {
        if (family_params.size() < 2)
            throw std::invalid_argument("trie needs a probability vector of length >= 2");
        return preset_trie(family_params);
    }
    std::ostringstream msg;
    msg << "unknown family '" << name << "'; available presets:";
    for (const auto& p : preset_names()) msg << " " << p;
    throw std::invalid_argument(msg.str());
}

FamilySpec parse_family(const std::string& canonical) {
    const auto open = canonical.find('(');
    if (open == std::string::npos) return make_family(canonical, {});
    const auto close = canonical.rfind(')');
    if (close == std::string::npos || close < open)
        throw std::invalid_argument("parse_family: malformed family string");
    const std::string name = canonical.substr(0, open);
    std::vector<double> params;
    std::string body = canonical.substr(open + 1, close - open - 1);
    std::istringstream in(body);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) params.push_back(std::stod(item));
    return make_family(name, params);
}

} // namespace splitree
