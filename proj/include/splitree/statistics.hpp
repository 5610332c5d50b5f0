#ifndef SPLITREE_STATISTICS_HPP
#define SPLITREE_STATISTICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "splitree/split_source.hpp"
#include "splitree/tree.hpp"

namespace splitree {

// Per-build summary. Depth profile indices are depths.
struct TreeStatistics {
    std::int64_t n = 0;
    std::int64_t N = 0;
    std::vector<std::int64_t> profile;      // depth -> vertex count
    std::vector<std::int64_t> ball_profile; // depth -> ball count
    int height = 0;                         // H_n
    int D_n = -1;                           // depth of the last inserted ball
    double D_n_star = 0.0;                  // average ball depth
    std::int64_t Psi = 0;                   // sum of ball depths
    std::int64_t Upsilon = 0;               // sum of vertex depths
    std::int64_t N_good = 0;
    std::int64_t N_bad = 0;
    double sum_sq_dev = 0.0; // sum over v of (d(v) - mu^-1 ln n)^2
    double epsilon = 0.0;
    bool traced = false;
};

struct ReplicationSummary {
    std::string family;
    std::int64_t n = 0;
    int R = 0;
    std::uint64_t base_seed = 0;
    double epsilon = 0.0;

    double mean_N_over_n = 0.0, se_N_over_n = 0.0;
    double mean_D_n = 0.0, se_D_n = 0.0;
    double var_D_n = 0.0, se_var_D_n = 0.0; // unbiased sample variance of D_n
    double mean_D_n_star = 0.0, se_D_n_star = 0.0;
    double mean_Psi_over_n = 0.0, se_Psi_over_n = 0.0;
    double mean_Upsilon_over_n = 0.0, se_Upsilon_over_n = 0.0;
    double mean_bad_fraction = 0.0, se_bad_fraction = 0.0;
    double alpha_hat = 0.0;
    double q_hat = 0.0;
    double r_hat = 0.0;
    double ks_statistic = 0.0;
};

// Populates every field derivable from the build mode; cross-checks Psi
// against the subtree-size identity. Throws std::invalid_argument for
// epsilon <= 0 and std::logic_error if the identity fails.
TreeStatistics summarize(const Tree& tree, const AnalyticConstants& constants,
                         double epsilon);

// Exact identities Psi = sum_{v != root} n_v and Upsilon = sum_{v != root} N_v.
bool path_length_identity_check(const Tree& tree);

struct ConcentrationReport {
    double fraction = 0.0;          // share with |n_v - n * weight(v)| > n^0.6
    std::int64_t vertices_at_depth = 0;
};

// Instrumented trees only; throws if the depth holds no vertices.
ConcentrationReport concentration_report(const Tree& tree, int depth);

struct SubtreeSums {
    int L = 0;                 // subtree root depth, floor(beta * log_b ln n)
    std::int64_t subtree_count = 0; // subtrees included after the n_i guard
    double corollary_sum = 0.0;     // sum_i sum_v (d_i(v)-mu^-1 ln n_i)^2 / (mu^-3 ln^3 n_i)
    double upsilon_sum = 0.0;       // sum_i Upsilon(T_i) / (mu^-2 ln^2 n_i)
    double upsilon_first_order = 0.0; // sum_i alpha_hat n_i / (mu^-1 ln n_i)
};

// Subtrees with n_i <= s are excluded (degenerate log denominators).
// Throws std::invalid_argument when L < 1.
SubtreeSums subtree_sums(const Tree& tree, double beta,
                         const AnalyticConstants& constants, double alpha_hat);

// Cross-replication aggregation; replications must share (n, epsilon).
ReplicationSummary aggregate(const std::vector<TreeStatistics>& replications,
                             const AnalyticConstants& constants);

double standard_normal_cdf(double x);

} // namespace splitree

#endif
