// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Monte Carlo batches are shared across criteria and fully
// deterministic (fixed base seeds), so a pass is reproducible.

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "splitree/branching.hpp"
#include "splitree/experiment.hpp"
#include "splitree/families.hpp"
#include "splitree/renewal.hpp"
#include "splitree/statistics.hpp"

using namespace splitree;

namespace {

constexpr double kEulerGamma = 0.5772156649015329;
constexpr std::uint64_t kBaseSeed = 20260823;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %-28s %s\n", pass ? "PASS" : "FAIL", id,
                name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

double harmonic(std::int64_t n) {
    // H_n = ln n + gamma + 1/(2n) - 1/(12n^2) + ... exact enough for n >= 1e4.
    const double x = static_cast<double>(n);
    return std::log(x) + kEulerGamma + 1.0 / (2.0 * x) - 1.0 / (12.0 * x * x);
}

double harmonic2(std::int64_t n) {
    // H_n^(2) = pi^2/6 - 1/n + 1/(2n^2) - ...
    const double x = static_cast<double>(n);
    return 1.6449340668482264 - 1.0 / x + 1.0 / (2.0 * x * x);
}

// Exact last-ball depth oracles for the binary-search-tree family. The
// classical insertion depth has mean 2(H_n - 1) and variance
// 2H_n - 4H_n^(2) + 2; here the inserted ball's routing path couples exactly
// to a classical insertion, after which the ball stays one level above the
// new vertex with probability 1/2 (it may be the retained ball of the split).
// Hence mean - 1/2 and variance + 1/4. Sanity anchor: E(D_2) = 1/2 exactly.
double depth_mean_oracle(std::int64_t n) {
    return 2.0 * (harmonic(n) - 1.0) - 0.5;
}
double depth_var_oracle(std::int64_t n) {
    return 2.0 * harmonic(n) - 4.0 * harmonic2(n) + 2.0 + 0.25;
}

// Gamma-sum oracle for the binary-search-tree renewal function.
double bst_renewal_oracle(double t) {
    double sum = 0.0, pow2 = 1.0;
    for (int k = 1; k < 200; ++k) {
        pow2 *= 2.0;
        const double term = pow2 * boost::math::gamma_p(static_cast<double>(k), t);
        sum += term;
        if (k > t && term < 1e-14 * (sum + 1.0)) break;
    }
    return sum;
}

struct Batch {
    std::int64_t n = 0;
    ReplicationSummary summary;
    std::vector<TreeStatistics> reps;
};

Batch make_batch(const FamilySpec& fam, std::int64_t n, int R, BuildMode mode) {
    const auto t0 = std::chrono::steady_clock::now();
    Batch b;
    b.n = n;
    b.reps = run_replications(fam, n, R, kBaseSeed, mode, 0.25, default_worker_count());
    b.summary = aggregate(b.reps, fam.constants);
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    std::printf("  (batch %s n=%lld R=%d mode=%s: %.1fs)\n", fam.name.c_str(),
                static_cast<long long>(n), R, build_mode_name(mode), secs);
    std::fflush(stdout);
    return b;
}

} // namespace

int main() {
    const FamilySpec bst = preset_bst();

    // Shared Monte Carlo batches.
    const Batch b4 = make_batch(bst, 10000, 1200, BuildMode::CountsOnly);
    const Batch b5 = make_batch(bst, 100000, 1200, BuildMode::CountsOnly);
    const Batch b6 = make_batch(bst, 1000000, 1000, BuildMode::CountsOnly);
    const Batch bt = make_batch(bst, 100000, 400, BuildMode::Traced);

    // 1. Exact identities on every build.
    {
        bool ok = true;
        std::string detail = "identities, nonleaf law, ball conservation";
        for (const FamilySpec& fam : {preset_bst(), preset_mary(3), preset_mary(5),
                                      preset_trie({0.5, 0.3, 0.2})}) {
            for (std::int64_t n : {1LL, 32LL, 1000LL}) {
                for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                    const Tree tree =
                        build(fam.params, fam.source, n, seed, BuildMode::CountsOnly);
                    if (!path_length_identity_check(tree)) ok = false;
                    std::int64_t balls = 0;
                    for (const auto& v : tree.vertices()) balls += v.ball_count;
                    if (balls != n) ok = false;
                    for (std::size_t v = 0; v < tree.vertices().size(); ++v)
                        if (!tree.is_leaf(static_cast<std::int32_t>(v)) &&
                            tree.vertices()[v].ball_count != fam.params.s0)
                            ok = false;
                }
            }
        }
        report(1, "exact identities", ok, detail);
    }

    // 2. BST structural law N = n for n = 1..10^4.
    {
        bool ok = true;
        for (std::int64_t n = 1; n <= 10000; ++n) {
            const Tree tree = build(bst.params, bst.source, n,
                                    derive_seed(kBaseSeed, static_cast<std::uint64_t>(n), 0),
                                    BuildMode::CountsOnly);
            if (tree.vertex_count() != n) {
                ok = false;
                break;
            }
        }
        report(2, "bst N = n sweep", ok, "n = 1..10^4, one seed each");
    }

    // 3. Depth mean at n = 10^5 vs exact oracle 2(H_n - 1) - 1/2.
    {
        const double oracle = depth_mean_oracle(100000);
        const double rel = std::abs(bt.summary.mean_D_n - oracle) / oracle;
        report(3, "depth mean", rel < 0.015,
               fmt("mean D_n = %.4f (se %.3f), oracle %.4f, rel err %.4f",
                   bt.summary.mean_D_n, bt.summary.se_D_n, oracle, rel));
    }

    // 4. Depth variance law.
    {
        bool ok = true;
        std::string detail;
        const Batch* batches[] = {&b4, &b5, &b6};
        double prev = -1e9, prev_se = 0.0;
        for (const Batch* b : batches) {
            const double log_n = std::log(static_cast<double>(b->n));
            const double ratio = b->summary.var_D_n / log_n;
            const double ratio_se = b->summary.se_var_D_n / log_n;
            const double oracle = depth_var_oracle(b->n);
            if (std::abs(b->summary.var_D_n - oracle) > 3.0 * b->summary.se_var_D_n)
                ok = false;
            if (ratio < prev - 2.0 * std::sqrt(ratio_se * ratio_se + prev_se * prev_se))
                ok = false;
            prev = ratio;
            prev_se = ratio_se;
            detail += fmt("%.3f ", ratio);
        }
        const double final_ratio =
            b6.summary.var_D_n / std::log(static_cast<double>(b6.n));
        if (final_ratio < 1.6 || final_ratio > 2.0) ok = false;
        report(4, "depth variance", ok,
               fmt("Var/ln n over n grid: %s(limit 2; band [1.6, 2.0] at 10^6)",
                   detail.c_str()));
    }

    // 5. Depth CLT via Kolmogorov-Smirnov. The limit law centers at
    // mu^-1 ln n; at finite n the known O(1) mean shift (exact oracle above)
    // must be removed before comparing with the standard normal, otherwise
    // the KS statistic measures the shift, not the CLT.
    {
        const double log_n = std::log(1e5);
        const double sd = std::sqrt(2.0 * log_n); // sigma^2 mu^-3 ln n
        const double center = depth_mean_oracle(100000);
        std::vector<double> z;
        z.reserve(b5.reps.size());
        for (const auto& r : b5.reps)
            z.push_back((static_cast<double>(r.D_n) - center) / sd);
        std::sort(z.begin(), z.end());
        double ks = 0.0;
        const double R = static_cast<double>(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double phi = standard_normal_cdf(z[i]);
            ks = std::max(ks, std::abs(static_cast<double>(i + 1) / R - phi));
            ks = std::max(ks, std::abs(static_cast<double>(i) / R - phi));
        }
        report(5, "depth CLT", ks < 0.12,
               fmt("KS = %.4f after O(1) shift (threshold 0.12, R = %d; "
                   "unshifted spec statistic %.4f)",
                   ks, b5.summary.R, b5.summary.ks_statistic));
    }

    // 6. Bad-node profile.
    {
        bool ok = true;
        const Batch* batches[] = {&b4, &b5, &b6};
        double prev = 1e9, prev_se = 0.0;
        std::string detail = "bad fraction ";
        for (const Batch* b : batches) {
            const double f = b->summary.mean_bad_fraction;
            const double se = b->summary.se_bad_fraction;
            if (f > prev + 2.0 * std::sqrt(se * se + prev_se * prev_se)) ok = false;
            prev = f;
            prev_se = se;
            detail += fmt("%.4f ", f);
        }
        // Normal approximation for the strip mass at n = 10^6: depth of a
        // random vertex ~ Normal(mu^-1 ln n + (2 gamma - 4), sigma^2 mu^-3 ln n).
        const double log_n = std::log(1e6);
        const double shift = 2.0 * kEulerGamma - 4.0;
        const double sd = std::sqrt(2.0 * log_n);
        const double w = std::pow(log_n, 0.75);
        const double predicted =
            1.0 - (standard_normal_cdf((w - shift) / sd) -
                   standard_normal_cdf((-w - shift) / sd));
        const double gap = std::abs(b6.summary.mean_bad_fraction - predicted);
        if (gap > 0.05) ok = false;
        report(6, "bad-node profile", ok,
               detail + fmt("(prediction at 10^6: %.4f, gap %.4f)", predicted, gap));
    }

    // 7. Renewal limit and Gamma-sum oracle.
    const GridSpec grid{1e-3, 15.0};
    const auto renewal_sol = solve_split_renewal(bst.source, grid);
    {
        bool ok = std::abs(renewal_sol.U_hat.back() - 2.0) < 0.02;
        double worst = 0.0;
        for (double t = 1.0; t <= 15.0; t += 0.25) {
            const std::size_t i = static_cast<std::size_t>(std::round(t / grid.h));
            const double gap =
                std::abs(renewal_sol.U_hat[i] - std::exp(-t) * bst_renewal_oracle(t));
            worst = std::max(worst, gap);
        }
        if (worst >= 0.02) ok = false;
        report(7, "renewal limit", ok,
               fmt("U_hat(15) = %.5f (target 2 +/- 0.02), worst oracle gap %.5f",
                   renewal_sol.U_hat.back(), worst));
    }

    // 8. W(x) limit.
    {
        const double w15 = renewal_sol.W.back();
        report(8, "W(x) limit", std::abs(w15 - (-2.0)) < 0.05,
               fmt("W(15) = %.4f (target -2 +/- 0.05)", w15));
    }

    // 9. Heavy-count triangle at n = 10^4, K = 100.
    {
        const int runs = 1000;
        double sum = 0.0;
        for (int i = 0; i < runs; ++i) {
            Rng rng(derive_seed(kBaseSeed, 0xb7a2c4, static_cast<std::uint64_t>(i)));
            sum += static_cast<double>(count_heavy(bst.source, 1e4, 100.0, rng).count);
        }
        const double mc = sum / runs;
        const double ren = expected_heavy_count(renewal_sol, 1e4, 100.0);
        const double limit = 200.0;
        auto within = [](double a, double b) {
            return std::abs(a - b) / std::max(std::abs(a), std::abs(b)) < 0.05;
        };
        report(9, "heavy-count triangle",
               within(mc, ren) && within(mc, limit) && within(ren, limit),
               fmt("Monte Carlo %.2f, renewal %.2f, limit %.0f (pairwise 5%%)", mc,
                   ren, limit));
    }

    // 10. General renewal theorem.
    {
        GeneralRenewalProblem p1;
        p1.z = [](double u) { return std::exp(-u); };
        p1.F = [](double u) { return 1.0 - std::exp(-u); };
        p1.mu = 1.0;
        p1.sigma2 = 1.0;
        const auto s1 = solve_general(p1, grid);

        GeneralRenewalProblem p2 = p1;
        p2.z = [](double u) { return u <= 1.0 ? 1.0 : 0.0; };
        const auto s2 = solve_general(p2, grid);

        const bool ok = std::abs(s1.G_limit) < 0.01 && std::abs(s1.G.back()) < 0.01 &&
                        std::abs(s2.G_limit - 0.5) < 0.01 &&
                        std::abs(s2.G.back() - 0.5) < 0.01;
        report(10, "general renewal theorem", ok,
               fmt("G_limit = %.5f (target 0), %.5f (target 0.5)", s1.G_limit,
                   s2.G_limit));
    }

    // 11. Path-length second order at n = 10^5.
    {
        const double zeta = 2.0 * kEulerGamma - 4.0;
        bool ok = std::abs(b5.summary.q_hat - zeta) < 0.2;
        // r = q exactly for this family: Psi = Upsilon per replication.
        for (const auto& r : b5.reps)
            if (r.Psi != r.Upsilon || r.N != r.n) ok = false;
        if (std::abs(b5.summary.q_hat - b5.summary.r_hat) > 1e-9) ok = false;
        report(11, "path-length second order", ok,
               fmt("q_hat = %.4f (target %.4f +/- 0.2), r_hat = %.4f",
                   b5.summary.q_hat, zeta, b5.summary.r_hat));
    }

    // 12. Concentration of subtree sizes at n = 10^6, depth 8.
    {
        const Tree tree = build(bst.params, bst.source, 1000000,
                                derive_seed(kBaseSeed, 1000000, 0xabcd),
                                BuildMode::Instrumented);
        const auto rep = concentration_report(tree, 8);
        report(12, "concentration", rep.fraction <= 0.25,
               fmt("violating fraction %.4f over %lld vertices (bound 0.25)",
                   rep.fraction, static_cast<long long>(rep.vertices_at_depth)));
    }

    std::printf("%d of 12 criteria passed\n", 12 - failures);
    return failures;
}
