// splitree: split-tree simulation and renewal-analysis harness.
//
// Subcommands: families, simulate, renewal, heavy, report.
// Exit codes: 0 success, 2 config error, 3 runtime fault.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "splitree/branching.hpp"
#include "splitree/experiment.hpp"
#include "splitree/families.hpp"
#include "splitree/renewal.hpp"

using namespace splitree;

namespace {

struct PendingEntry {
    std::string key;
    std::string* value;
};

// Flags mirror config keys; a flag that was actually passed overrides the
// config file through the same key=value path (fail-closed on bad values).
void add_config_flags(CLI::App* cmd, std::vector<std::pair<CLI::Option*, PendingEntry>>& pending,
                      std::vector<std::unique_ptr<std::string>>& storage,
                      std::initializer_list<std::pair<const char*, const char*>> keys) {
    for (const auto& [key, help] : keys) {
        storage.push_back(std::make_unique<std::string>());
        std::string flag = "--";
        for (const char* c = key; *c; ++c) flag += (*c == '.') ? '-' : *c;
        CLI::Option* opt = cmd->add_option(flag, *storage.back(), help);
        pending.push_back({opt, {key, storage.back().get()}});
    }
}

int apply_pending(ExperimentConfig& cfg,
                  const std::vector<std::pair<CLI::Option*, PendingEntry>>& pending) {
    for (const auto& [opt, entry] : pending) {
        if (opt->count() == 0) continue;
        apply_config_entry(cfg, entry.key, *entry.value);
    }
    return 0;
}

void print_constants(const FamilySpec& spec) {
    std::printf("family: %s\n", spec.name.c_str());
    std::printf("  params: b=%d s=%d s0=%d s1=%d\n", spec.params.b, spec.params.s,
                spec.params.s0, spec.params.s1);
    std::printf("  mu=%.12g sigma2=%.12g c=%.12g\n", spec.constants.mu,
                spec.constants.sigma2, spec.constants.c);
    std::printf("  alpha (heavy-count scale 1/mu where applicable): %.12g\n",
                1.0 / spec.constants.mu);
    std::printf("  lattice_suspect: %s\n", spec.lattice_suspect ? "yes" : "no");
    if (!spec.notes.empty()) std::printf("  notes: %s\n", spec.notes.c_str());
}

void dump_grid(const std::string& path, const GridSpec& grid,
               const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "t,value\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", grid.t(i), values[i]);
        out << buf;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"split-tree simulation and renewal analysis"};
    app.require_subcommand(1);

    std::vector<std::unique_ptr<std::string>> storage;

    // families -------------------------------------------------------------
    auto* cmd_families = app.add_subcommand("families", "list preset split-tree families");
    std::string families_show;
    cmd_families->add_option("family", families_show,
                             "optional canonical family string, e.g. mary(3)");

    // simulate ---------------------------------------------------------------
    auto* cmd_sim = app.add_subcommand("simulate", "run replicated builds over an n grid");
    std::string sim_config;
    cmd_sim->add_option("--config", sim_config, "key = value config file");
    std::vector<std::pair<CLI::Option*, PendingEntry>> sim_pending;
    add_config_flags(cmd_sim, sim_pending, storage,
                     {{"family", "preset name: bst, mary, trie"},
                      {"family_params", "comma-separated family parameters"},
                      {"n_grid", "comma-separated ball counts"},
                      {"replications", "replications per n (>= 2)"},
                      {"base_seed", "64-bit base seed"},
                      {"epsilon", "good-strip half-width exponent offset"},
                      {"beta", "subtree-sum depth scale"},
                      {"mode", "counts-only, traced or instrumented"},
                      {"out_csv", "per-replication CSV path"},
                      {"out_json", "summary JSON path"}});

    // renewal ----------------------------------------------------------------
    auto* cmd_renewal = app.add_subcommand("renewal", "solve the split renewal equation");
    std::string ren_config;
    cmd_renewal->add_option("--config", ren_config, "key = value config file");
    std::vector<std::pair<CLI::Option*, PendingEntry>> ren_pending;
    add_config_flags(cmd_renewal, ren_pending, storage,
                     {{"family", "preset name"},
                      {"family_params", "comma-separated family parameters"},
                      {"renewal.h", "grid step"},
                      {"renewal.t_max", "grid endpoint"}});
    std::string ren_dump, ren_quantity = "U_hat";
    cmd_renewal->add_option("--dump", ren_dump, "write the grid as t,value CSV");
    cmd_renewal->add_option("--quantity", ren_quantity, "dumped quantity: U, U_hat or W")
        ->check(CLI::IsMember({"U", "U_hat", "W"}));

    // heavy --------------------------------------------------------------
    auto* cmd_heavy = app.add_subcommand(
        "heavy", "heavy-vertex counts: branching Monte Carlo vs renewal prediction");
    std::string heavy_config;
    cmd_heavy->add_option("--config", heavy_config, "key = value config file");
    std::vector<std::pair<CLI::Option*, PendingEntry>> heavy_pending;
    add_config_flags(cmd_heavy, heavy_pending, storage,
                     {{"family", "preset name"},
                      {"family_params", "comma-separated family parameters"},
                      {"base_seed", "64-bit base seed"},
                      {"heavy.K", "weight threshold"},
                      {"heavy.runs", "Monte Carlo runs"},
                      {"renewal.h", "grid step for the renewal cross-check"},
                      {"renewal.t_max", "grid endpoint for the renewal cross-check"}});
    double heavy_n = 1e4;
    cmd_heavy->add_option("--n", heavy_n, "root weight n");

    // report -------------------------------------------------------------
    auto* cmd_report = app.add_subcommand("report", "recompute summary JSON from a CSV");
    std::string report_in, report_out;
    cmd_report->add_option("csv", report_in, "CSV written by simulate")->required();
    cmd_report->add_option("--out_json", report_out, "summary JSON path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_families) {
            if (!families_show.empty()) {
                print_constants(parse_family(families_show));
                return 0;
            }
            std::printf("bst          binary search tree (b=2, s=1, s0=1, s1=0)\n");
            std::printf("mary(m)      m-ary search tree (b=m, s=m-1, s0=m-1, s1=0)\n");
            std::printf("trie(p1,..)  trie over a permuted deterministic law (s=1, s0=0)\n");
            std::printf("\nuse `families <name(params)>` for governing constants\n");
            return 0;
        }

        if (*cmd_sim) {
            ExperimentConfig cfg;
            try {
                if (!sim_config.empty()) cfg = parse_config_file(sim_config);
                apply_pending(cfg, sim_pending);
            } catch (const std::exception& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return 2;
            }
            return run(cfg, std::cerr);
        }

        if (*cmd_renewal) {
            ExperimentConfig cfg;
            FamilySpec family;
            try {
                if (!ren_config.empty()) cfg = parse_config_file(ren_config);
                apply_pending(cfg, ren_pending);
                family = make_family(cfg.family, cfg.family_params);
            } catch (const std::exception& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return 2;
            }
            GridSpec grid{cfg.renewal.h, cfg.renewal.t_max};
            RenewalSolution sol;
            try {
                sol = solve_split_renewal(family.source, grid);
            } catch (const std::invalid_argument& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return 2;
            }
            const std::size_t last = sol.U_hat.size() - 1;
            std::printf("family: %s  h=%g t_max=%g\n", family.name.c_str(), grid.h,
                        grid.t_max);
            std::printf("U_hat(t_max) = %.12g   (1/mu = %.12g)\n", sol.U_hat[last],
                        1.0 / sol.mu_used);
            std::printf("W(t_max)     = %.12g\n", sol.W[last]);
            std::printf("tail slope of U_hat: %.3g\n", sol.tail_slope);
            std::printf("tilted measure total mass: %.12g\n", sol.omega_total_mass);
            if (sol.cdf_sample_budget)
                std::printf("empirical CDF budget: %zu samples\n", sol.cdf_sample_budget);
            if (!ren_dump.empty()) {
                const std::vector<double>& values = ren_quantity == "U"    ? sol.U
                                                    : ren_quantity == "W" ? sol.W
                                                                          : sol.U_hat;
                dump_grid(ren_dump, grid, values);
                std::printf("wrote %s to %s\n", ren_quantity.c_str(), ren_dump.c_str());
            }
            return 0;
        }

        if (*cmd_heavy) {
            ExperimentConfig cfg;
            FamilySpec family;
            try {
                if (!heavy_config.empty()) cfg = parse_config_file(heavy_config);
                apply_pending(cfg, heavy_pending);
                family = make_family(cfg.family, cfg.family_params);
                if (cfg.heavy.runs < 1) throw ConfigError("heavy.runs must be >= 1");
            } catch (const std::exception& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return 2;
            }
            const double K = cfg.heavy.K;
            double sum = 0.0, sumsq = 0.0;
            for (std::int64_t i = 0; i < cfg.heavy.runs; ++i) {
                Rng rng(derive_seed(cfg.base_seed, 0xb7a2c4, static_cast<std::uint64_t>(i)));
                const auto r = count_heavy(family.source, heavy_n, K, rng);
                sum += static_cast<double>(r.count);
                sumsq += static_cast<double>(r.count) * static_cast<double>(r.count);
            }
            const double runs = static_cast<double>(cfg.heavy.runs);
            const double mean = sum / runs;
            const double var = cfg.heavy.runs > 1
                                   ? (sumsq - runs * mean * mean) / (runs - 1.0)
                                   : 0.0;
            std::printf("family: %s  n=%g K=%g runs=%lld\n", family.name.c_str(), heavy_n,
                        K, static_cast<long long>(cfg.heavy.runs));
            std::printf("Monte Carlo mean heavy count: %.6g (se %.3g)\n", mean,
                        std::sqrt(std::max(0.0, var) / runs));
            std::printf("scale limit (1/mu) n/K:       %.6g\n",
                        heavy_n / (K * family.constants.mu));
            if (!family.lattice_suspect) {
                GridSpec grid{cfg.renewal.h, cfg.renewal.t_max};
                const auto sol = solve_split_renewal(family.source, grid);
                std::printf("renewal prediction U+1:       %.6g\n",
                            expected_heavy_count(sol, heavy_n, K));
            } else {
                std::printf("renewal prediction skipped: lattice_suspect family\n");
            }
            return 0;
        }

        if (*cmd_report) {
            std::ifstream in(report_in);
            if (!in) {
                std::cerr << "config error: cannot open " << report_in << "\n";
                return 2;
            }
            const std::string json = format_json_summaries(summarize_csv(in));
            if (report_out.empty()) {
                std::cout << json;
            } else {
                std::ofstream out(report_out);
                if (!out) {
                    std::cerr << "config error: cannot write " << report_out << "\n";
                    return 2;
                }
                out << json;
            }
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime fault: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
