#ifndef SPLITREE_EXPERIMENT_HPP
#define SPLITREE_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "splitree/families.hpp"
#include "splitree/statistics.hpp"
#include "splitree/tree.hpp"

namespace splitree {

// Invalid configuration (exit code 2 territory).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RenewalOptions {
    double h = 1e-3;
    double t_max = 15.0;
};

struct HeavyOptions {
    double K = 100.0;
    std::int64_t runs = 1000;
};

struct ExperimentConfig {
    std::string family = "bst";
    std::vector<double> family_params;
    std::vector<std::int64_t> n_grid;
    int replications = 2;
    std::uint64_t base_seed = 1;
    double epsilon = 0.25;
    double beta = 2.0;
    BuildMode mode = BuildMode::CountsOnly;
    std::string out_csv;
    std::string out_json;
    RenewalOptions renewal;
    HeavyOptions heavy;
};

// Plain `key = value` config file; unknown keys are errors.
ExperimentConfig parse_config_file(const std::string& path);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value);
void validate_config(const ExperimentConfig& cfg);

BuildMode parse_build_mode(const std::string& name);
const char* build_mode_name(BuildMode mode);

// Runs R replications of (family, n) with seeds derive_seed(base_seed, n, i).
// Replications execute concurrently up to `workers`; results are returned in
// replication-index order, so output is identical to a serial run.
std::vector<TreeStatistics> run_replications(const FamilySpec& family,
                                             std::int64_t n, int R,
                                             std::uint64_t base_seed,
                                             BuildMode mode, double epsilon,
                                             int workers);

// Worker count: SPLITREE_WORKERS env var, else hardware concurrency.
int default_worker_count();

// CSV schema: rep,seed,family,n,N,height,D_n,D_n_star,Psi,Upsilon,N_bad,epsilon
// with traced-only columns left empty outside traced mode.
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, int rep, std::uint64_t seed,
                   const std::string& family, const TreeStatistics& stats);

// One JSON object per n, floats with 12 significant digits.
std::string format_json_summaries(const std::vector<ReplicationSummary>& summaries);

// Re-aggregates CSV rows (as written by write_csv_row) grouped by n.
std::vector<ReplicationSummary> summarize_csv(std::istream& in);

// Full experiment run: per-replication CSV plus summary JSON.
// Returns 0 on success, 2 on config error, 3 on runtime fault.
int run(const ExperimentConfig& cfg, std::ostream& log);

} // namespace splitree

#endif
