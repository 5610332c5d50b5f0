#include "splitree/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace splitree {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct MeanSe {
    double mean = kNaN;
    double se = kNaN;
};

template <typename Get>
MeanSe mean_se(const std::vector<TreeStatistics>& reps, Get get) {
    const std::size_t R = reps.size();
    double sum = 0.0;
    for (const auto& r : reps) sum += get(r);
    const double mean = sum / static_cast<double>(R);
    double ss = 0.0;
    for (const auto& r : reps) {
        const double d = get(r) - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(R - 1);
    return {mean, std::sqrt(var / static_cast<double>(R))};
}

} // namespace

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

TreeStatistics summarize(const Tree& tree, const AnalyticConstants& constants,
                         double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("summarize: epsilon must be > 0");

    TreeStatistics st;
    st.n = tree.n_balls();
    st.N = tree.vertex_count();
    st.epsilon = epsilon;
    st.traced = tree.mode() == BuildMode::Traced;

    const auto& verts = tree.vertices();
    int height = 0;
    for (const auto& v : verts) height = std::max(height, static_cast<int>(v.depth));
    st.height = height;
    st.profile.assign(static_cast<std::size_t>(height) + 1, 0);
    st.ball_profile.assign(static_cast<std::size_t>(height) + 1, 0);
    for (const auto& v : verts) {
        ++st.profile[v.depth];
        st.ball_profile[v.depth] += v.ball_count;
    }

    const double log_n = std::log(static_cast<double>(st.n));
    const double center = log_n / constants.mu;
    const double half_width = std::pow(log_n, 0.5 + epsilon);
    for (std::size_t d = 0; d < st.profile.size(); ++d) {
        const double depth = static_cast<double>(d);
        st.Psi += static_cast<std::int64_t>(d) * st.ball_profile[d];
        st.Upsilon += static_cast<std::int64_t>(d) * st.profile[d];
        const double dev = depth - center;
        st.sum_sq_dev += dev * dev * static_cast<double>(st.profile[d]);
        if (depth >= center - half_width && depth <= center + half_width)
            st.N_good += st.profile[d];
    }
    st.N_bad = st.N - st.N_good;
    st.D_n = tree.last_ball_depth();
    st.D_n_star = static_cast<double>(st.Psi) / static_cast<double>(st.n);

    // Psi equals the sum of subtree ball counts below the root.
    const auto nv = subtree_ball_counts(tree);
    std::int64_t subtree_total = 0;
    for (std::size_t v = 1; v < nv.size(); ++v) subtree_total += nv[v];
    if (subtree_total != st.Psi)
        throw std::logic_error("summarize: Psi / subtree-size identity violated");

    return st;
}

bool path_length_identity_check(const Tree& tree) {
    const auto& verts = tree.vertices();
    std::int64_t psi = 0, upsilon = 0;
    for (const auto& v : verts) {
        psi += static_cast<std::int64_t>(v.depth) * v.ball_count;
        upsilon += v.depth;
    }

    const auto nv = subtree_ball_counts(tree);
    std::vector<std::int64_t> nvert(verts.size(), 1);
    for (std::size_t v = verts.size(); v-- > 1;) nvert[verts[v].parent] += nvert[v];

    std::int64_t nv_sum = 0, nvert_sum = 0;
    for (std::size_t v = 1; v < verts.size(); ++v) {
        nv_sum += nv[v];
        nvert_sum += nvert[v];
    }
    return psi == nv_sum && upsilon == nvert_sum;
}

ConcentrationReport concentration_report(const Tree& tree, int depth) {
    if (tree.mode() != BuildMode::Instrumented)
        throw std::logic_error("concentration_report: needs an instrumented tree");
    const auto nv = subtree_ball_counts(tree);
    const double n = static_cast<double>(tree.n_balls());
    const double threshold = std::pow(n, 0.6);

    ConcentrationReport report;
    std::int64_t violations = 0;
    const auto& verts = tree.vertices();
    for (std::size_t v = 0; v < verts.size(); ++v) {
        if (verts[v].depth != depth) continue;
        ++report.vertices_at_depth;
        if (std::abs(static_cast<double>(nv[v]) - n * verts[v].cum_weight) > threshold)
            ++violations;
    }
    if (report.vertices_at_depth == 0)
        throw std::invalid_argument("concentration_report: no vertices at that depth");
    report.fraction = static_cast<double>(violations) /
                      static_cast<double>(report.vertices_at_depth);
    return report;
}

SubtreeSums subtree_sums(const Tree& tree, double beta,
                         const AnalyticConstants& constants, double alpha_hat) {
    const double log_n = std::log(static_cast<double>(tree.n_balls()));
    const int L = static_cast<int>(
        std::floor(beta * std::log(log_n) / std::log(static_cast<double>(tree.params().b))));
    if (L < 1) throw std::invalid_argument("subtree_sums: L < 1, increase beta or n");

    SubtreeSums out;
    out.L = L;

    const auto& verts = tree.vertices();
    const auto nv = subtree_ball_counts(tree);

    // Subtree root at depth L for every vertex at depth >= L.
    std::vector<std::int32_t> anc(verts.size(), -1);
    for (std::size_t v = 0; v < verts.size(); ++v) {
        if (verts[v].depth == L)
            anc[v] = static_cast<std::int32_t>(v);
        else if (verts[v].depth > L)
            anc[v] = anc[verts[v].parent];
    }

    const double mu = constants.mu;

    // Slot per included subtree root, then one accumulation pass.
    std::vector<std::int32_t> slot(verts.size(), -1);
    std::vector<double> centers;
    std::vector<double> sumsq, upsilon_i;
    for (std::size_t r = 0; r < verts.size(); ++r) {
        if (verts[r].depth != L) continue;
        if (nv[r] <= tree.params().s) continue; // degenerate log denominators
        const double log_ni = std::log(static_cast<double>(nv[r]));
        slot[r] = static_cast<std::int32_t>(centers.size());
        centers.push_back(log_ni);
        out.upsilon_first_order += alpha_hat * static_cast<double>(nv[r]) * mu / log_ni;
    }
    out.subtree_count = static_cast<std::int64_t>(centers.size());
    sumsq.assign(centers.size(), 0.0);
    upsilon_i.assign(centers.size(), 0.0);

    for (std::size_t v = 0; v < verts.size(); ++v) {
        if (verts[v].depth < L || anc[v] < 0) continue;
        const std::int32_t i = slot[anc[v]];
        if (i < 0) continue;
        const double di = static_cast<double>(verts[v].depth - L);
        upsilon_i[i] += di;
        const double dev = di - centers[i] / mu;
        sumsq[i] += dev * dev;
    }
    for (std::size_t i = 0; i < centers.size(); ++i) {
        out.corollary_sum += sumsq[i] * mu * mu * mu / std::pow(centers[i], 3);
        out.upsilon_sum += upsilon_i[i] * mu * mu / (centers[i] * centers[i]);
    }
    return out;
}

ReplicationSummary aggregate(const std::vector<TreeStatistics>& reps,
                             const AnalyticConstants& constants) {
    if (reps.size() < 2) throw std::invalid_argument("aggregate: need R >= 2");
    const std::int64_t n = reps.front().n;
    const double eps = reps.front().epsilon;
    for (const auto& r : reps)
        if (r.n != n || r.epsilon != eps)
            throw std::invalid_argument("aggregate: mixed replication configurations");

    const int R = static_cast<int>(reps.size());
    const double nd = static_cast<double>(n);
    const double log_n = std::log(nd);

    ReplicationSummary s;
    s.n = n;
    s.R = R;
    s.epsilon = eps;

    auto nn = mean_se(reps, [&](const TreeStatistics& r) {
        return static_cast<double>(r.N) / nd;
    });
    s.mean_N_over_n = nn.mean;
    s.se_N_over_n = nn.se;

    auto psi = mean_se(reps, [&](const TreeStatistics& r) {
        return static_cast<double>(r.Psi) / nd;
    });
    s.mean_Psi_over_n = psi.mean;
    s.se_Psi_over_n = psi.se;

    auto ups = mean_se(reps, [&](const TreeStatistics& r) {
        return static_cast<double>(r.Upsilon) / nd;
    });
    s.mean_Upsilon_over_n = ups.mean;
    s.se_Upsilon_over_n = ups.se;

    auto bad = mean_se(reps, [&](const TreeStatistics& r) {
        return static_cast<double>(r.N_bad) / static_cast<double>(r.N);
    });
    s.mean_bad_fraction = bad.mean;
    s.se_bad_fraction = bad.se;

    auto dstar = mean_se(reps, [](const TreeStatistics& r) { return r.D_n_star; });
    s.mean_D_n_star = dstar.mean;
    s.se_D_n_star = dstar.se;

    s.alpha_hat = s.mean_N_over_n;
    s.q_hat = s.mean_Psi_over_n - log_n / constants.mu;
    s.r_hat = s.mean_Upsilon_over_n - s.alpha_hat * log_n / constants.mu;

    const bool have_dn =
        std::all_of(reps.begin(), reps.end(),
                    [](const TreeStatistics& r) { return r.D_n >= 0; });
    if (have_dn) {
        auto dn = mean_se(reps, [](const TreeStatistics& r) {
            return static_cast<double>(r.D_n);
        });
        s.mean_D_n = dn.mean;
        s.se_D_n = dn.se;

        // Unbiased sample variance, with its standard error from the fourth
        // central moment.
        double m2 = 0.0, m4 = 0.0;
        for (const auto& r : reps) {
            const double d = static_cast<double>(r.D_n) - dn.mean;
            m2 += d * d;
            m4 += d * d * d * d;
        }
        const double Rd = static_cast<double>(R);
        s.var_D_n = m2 / (Rd - 1.0);
        m2 /= Rd;
        m4 /= Rd;
        const double var_of_var =
            (m4 - (Rd - 3.0) / (Rd - 1.0) * m2 * m2) / Rd;
        s.se_var_D_n = std::sqrt(std::max(0.0, var_of_var));

        const double denom = std::sqrt(constants.sigma2 * log_n /
                                       std::pow(constants.mu, 3));
        if (denom > 0.0) {
            std::vector<double> z(reps.size());
            for (std::size_t i = 0; i < reps.size(); ++i)
                z[i] = (static_cast<double>(reps[i].D_n) - log_n / constants.mu) / denom;
            std::sort(z.begin(), z.end());
            double ks = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) {
                const double phi = standard_normal_cdf(z[i]);
                ks = std::max(ks, std::abs(static_cast<double>(i + 1) / Rd - phi));
                ks = std::max(ks, std::abs(static_cast<double>(i) / Rd - phi));
            }
            s.ks_statistic = ks;
        } else {
            s.ks_statistic = kNaN;
        }
    } else {
        s.mean_D_n = s.se_D_n = s.var_D_n = s.se_var_D_n = s.ks_statistic = kNaN;
    }

    return s;
}

} // namespace splitree
