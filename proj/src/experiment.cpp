#include "splitree/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace splitree {

namespace {

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string json_number(double x) {
    if (!std::isfinite(x)) return "null";
    return fmt_double(x);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto a = item.find_first_not_of(" \t");
        const auto b = item.find_last_not_of(" \t");
        if (a != std::string::npos) items.push_back(item.substr(a, b - a + 1));
    }
    return items;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

BuildMode parse_build_mode(const std::string& name) {
    if (name == "counts-only") return BuildMode::CountsOnly;
    if (name == "traced") return BuildMode::Traced;
    if (name == "instrumented") return BuildMode::Instrumented;
    throw ConfigError("unknown mode '" + name +
                      "' (expected counts-only, traced or instrumented)");
}

const char* build_mode_name(BuildMode mode) {
    switch (mode) {
    case BuildMode::CountsOnly: return "counts-only";
    case BuildMode::Traced: return "traced";
    case BuildMode::Instrumented: return "instrumented";
    }
    return "?";
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value) {
    try {
        if (key == "family") {
            cfg.family = value;
        } else if (key == "family_params") {
            cfg.family_params.clear();
            for (const auto& item : split_list(value))
                cfg.family_params.push_back(std::stod(item));
        } else if (key == "n_grid") {
            cfg.n_grid.clear();
            for (const auto& item : split_list(value))
                cfg.n_grid.push_back(std::stoll(item));
        } else if (key == "replications") {
            cfg.replications = std::stoi(value);
        } else if (key == "base_seed") {
            cfg.base_seed = std::stoull(value);
        } else if (key == "epsilon") {
            cfg.epsilon = std::stod(value);
        } else if (key == "beta") {
            cfg.beta = std::stod(value);
        } else if (key == "mode") {
            cfg.mode = parse_build_mode(value);
        } else if (key == "out_csv") {
            cfg.out_csv = value;
        } else if (key == "out_json") {
            cfg.out_json = value;
        } else if (key == "renewal.h") {
            cfg.renewal.h = std::stod(value);
        } else if (key == "renewal.t_max") {
            cfg.renewal.t_max = std::stod(value);
        } else if (key == "heavy.K") {
            cfg.heavy.K = std::stod(value);
        } else if (key == "heavy.runs") {
            cfg.heavy.runs = std::stoll(value);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad value for config key '" + key + "': " + value);
    }
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              " is not 'key = value': " + stripped);
        apply_config_entry(cfg, trim(stripped.substr(0, eq)),
                           trim(stripped.substr(eq + 1)));
    }
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.n_grid.empty()) throw ConfigError("n_grid is empty");
    for (auto n : cfg.n_grid)
        if (n < 1) throw ConfigError("n_grid entries must be >= 1");
    if (cfg.replications < 2) throw ConfigError("replications must be >= 2");
    if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
    if (!(cfg.beta > 0.0)) throw ConfigError("beta must be > 0");
    try {
        make_family(cfg.family, cfg.family_params);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

int default_worker_count() {
    if (const char* env = std::getenv("SPLITREE_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) return w;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<TreeStatistics> run_replications(const FamilySpec& family,
                                             std::int64_t n, int R,
                                             std::uint64_t base_seed,
                                             BuildMode mode, double epsilon,
                                             int workers) {
    std::vector<TreeStatistics> out(static_cast<std::size_t>(R));
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= R) return;
            try {
                const std::uint64_t seed =
                    derive_seed(base_seed, static_cast<std::uint64_t>(n),
                                static_cast<std::uint64_t>(i));
                const Tree tree = build(family.params, family.source, n, seed, mode);
                out[static_cast<std::size_t>(i)] =
                    summarize(tree, family.constants, epsilon);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    const int count = std::max(1, std::min(workers, R));
    if (count == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    return out;
}

void write_csv_header(std::ostream& out) {
    out << "rep,seed,family,n,N,height,D_n,D_n_star,Psi,Upsilon,N_bad,epsilon\n";
}

void write_csv_row(std::ostream& out, int rep, std::uint64_t seed,
                   const std::string& family, const TreeStatistics& stats) {
    out << rep << ',' << seed << ',' << family << ',' << stats.n << ','
        << stats.N << ',' << stats.height << ',';
    if (stats.traced) out << stats.D_n;
    out << ',';
    if (stats.traced) out << fmt_double(stats.D_n_star);
    out << ',' << stats.Psi << ',' << stats.Upsilon << ',' << stats.N_bad << ','
        << fmt_double(stats.epsilon) << '\n';
}

std::string format_json_summaries(const std::vector<ReplicationSummary>& summaries) {
    std::ostringstream out;
    out << "[\n";
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const auto& s = summaries[i];
        out << "  {\n"
            << "    \"family\": \"" << s.family << "\",\n"
            << "    \"n\": " << s.n << ",\n"
            << "    \"replications\": " << s.R << ",\n"
            << "    \"base_seed\": " << s.base_seed << ",\n"
            << "    \"epsilon\": " << json_number(s.epsilon) << ",\n"
            << "    \"alpha_hat\": " << json_number(s.alpha_hat) << ",\n"
            << "    \"mean_N_over_n\": " << json_number(s.mean_N_over_n) << ",\n"
            << "    \"se_N_over_n\": " << json_number(s.se_N_over_n) << ",\n"
            << "    \"mean_D_n\": " << json_number(s.mean_D_n) << ",\n"
            << "    \"se_D_n\": " << json_number(s.se_D_n) << ",\n"
            << "    \"var_D_n\": " << json_number(s.var_D_n) << ",\n"
            << "    \"se_var_D_n\": " << json_number(s.se_var_D_n) << ",\n"
            << "    \"mean_D_n_star\": " << json_number(s.mean_D_n_star) << ",\n"
            << "    \"se_D_n_star\": " << json_number(s.se_D_n_star) << ",\n"
            << "    \"mean_Psi_over_n\": " << json_number(s.mean_Psi_over_n) << ",\n"
            << "    \"se_Psi_over_n\": " << json_number(s.se_Psi_over_n) << ",\n"
            << "    \"mean_Upsilon_over_n\": " << json_number(s.mean_Upsilon_over_n)
            << ",\n"
            << "    \"se_Upsilon_over_n\": " << json_number(s.se_Upsilon_over_n)
            << ",\n"
            << "    \"mean_bad_fraction\": " << json_number(s.mean_bad_fraction)
            << ",\n"
            << "    \"se_bad_fraction\": " << json_number(s.se_bad_fraction) << ",\n"
            << "    \"q_hat\": " << json_number(s.q_hat) << ",\n"
            << "    \"r_hat\": " << json_number(s.r_hat) << ",\n"
            << "    \"ks_statistic\": " << json_number(s.ks_statistic) << "\n"
            << "  }" << (i + 1 < summaries.size() ? "," : "") << "\n";
    }
    out << "]\n";
    return out.str();
}

std::vector<ReplicationSummary> summarize_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error("summarize_csv: empty input");
    if (trim(header) != "rep,seed,family,n,N,height,D_n,D_n_star,Psi,Upsilon,N_bad,epsilon")
        throw std::runtime_error("summarize_csv: unexpected CSV header");

    struct Group {
        std::string family;
        std::vector<TreeStatistics> stats;
    };
    std::vector<Group> groups;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> cols;
        std::istringstream row(line);
        std::string col;
        while (std::getline(row, col, ',')) cols.push_back(col);
        if (cols.size() == 11) cols.push_back(""); // trailing empty column
        if (cols.size() != 12)
            throw std::runtime_error("summarize_csv: malformed row: " + line);

        TreeStatistics st;
        st.n = std::stoll(cols[3]);
        st.N = std::stoll(cols[4]);
        st.height = std::stoi(cols[5]);
        st.traced = !cols[6].empty();
        st.D_n = st.traced ? std::stoi(cols[6]) : -1;
        st.D_n_star = cols[7].empty() ? 0.0 : std::stod(cols[7]);
        st.Psi = std::stoll(cols[8]);
        st.Upsilon = std::stoll(cols[9]);
        st.N_bad = std::stoll(cols[10]);
        st.epsilon = std::stod(cols[11]);
        if (!st.traced)
            st.D_n_star = static_cast<double>(st.Psi) / static_cast<double>(st.n);

        const std::string& family = cols[2];
        Group* group = nullptr;
        for (auto& g : groups)
            if (g.family == family && g.stats.front().n == st.n) group = &g;
        if (!group) {
            groups.push_back({family, {}});
            group = &groups.back();
        }
        group->stats.push_back(st);
    }

    std::vector<ReplicationSummary> summaries;
    for (const auto& g : groups) {
        const FamilySpec family = parse_family(g.family);
        ReplicationSummary s = aggregate(g.stats, family.constants);
        s.family = g.family;
        summaries.push_back(s);
    }
    return summaries;
}

int run(const ExperimentConfig& cfg, std::ostream& log) {
    FamilySpec family;
    try {
        validate_config(cfg);
        family = make_family(cfg.family, cfg.family_params);
    } catch (const std::exception& e) {
        log << "config error: " << e.what() << "\n";
        return 2;
    }

    std::ofstream csv;
    std::ofstream json;
    if (!cfg.out_csv.empty()) {
        csv.open(cfg.out_csv);
        if (!csv) {
            log << "config error: cannot write " << cfg.out_csv << "\n";
            return 2;
        }
    }
    if (!cfg.out_json.empty()) {
        json.open(cfg.out_json);
        if (!json) {
            log << "config error: cannot write " << cfg.out_json << "\n";
            return 2;
        }
    }

    try {
        if (csv.is_open()) write_csv_header(csv);
        std::vector<ReplicationSummary> summaries;
        for (std::int64_t n : cfg.n_grid) {
            auto reps = run_replications(family, n, cfg.replications, cfg.base_seed,
                                         cfg.mode, cfg.epsilon,
                                         default_worker_count());
            if (csv.is_open()) {
                for (std::size_t i = 0; i < reps.size(); ++i)
                    write_csv_row(csv, static_cast<int>(i),
                                  derive_seed(cfg.base_seed,
                                              static_cast<std::uint64_t>(n), i),
                                  family.name, reps[i]);
            }
            ReplicationSummary s = aggregate(reps, family.constants);
            s.family = family.name;
            s.base_seed = cfg.base_seed;
            summaries.push_back(s);
            log << family.name << " n=" << n << " R=" << cfg.replications
                << " alpha_hat=" << fmt_double(s.alpha_hat)
                << " q_hat=" << fmt_double(s.q_hat) << "\n";
        }
        if (json.is_open()) json << format_json_summaries(summaries);
        return 0;
    } catch (const std::exception& e) {
        log << "runtime fault: " << e.what() << "\n";
        return 3;
    }
}

} // namespace splitree
