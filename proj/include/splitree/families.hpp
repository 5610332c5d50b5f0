#ifndef SPLITREE_FAMILIES_HPP
#define SPLITREE_FAMILIES_HPP

#include <string>
#include <vector>

#include "splitree/params.hpp"
#include "splitree/split_source.hpp"

namespace splitree {

struct FamilySpec {
    std::string name; // canonical, e.g. "bst", "mary(3)", "trie(0.5,0.5)"
    SplitParams params;
    SplitVectorSource source;
    AnalyticConstants constants;
    bool lattice_suspect = false;
    std::string notes;
};

FamilySpec preset_bst();
FamilySpec preset_mary(int m);
FamilySpec preset_trie(std::vector<double> p);

// CLI entry point: name in {bst, mary, trie}, numeric family parameters
// (m for mary, the probability vector for trie). Unknown names throw with
// the list of available presets.
FamilySpec make_family(const std::string& name,
                       const std::vector<double>& family_params);

// Parses a canonical family string such as "mary(3)" back into a spec.
FamilySpec parse_family(const std::string& canonical);

std::vector<std::string> preset_names();

} // namespace splitree

#endif
