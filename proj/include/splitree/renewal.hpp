#ifndef SPLITREE_RENEWAL_HPP
#define SPLITREE_RENEWAL_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "splitree/split_source.hpp"

namespace splitree {

struct GridSpec {
    double h = 1e-3;
    double t_max = 15.0;
    // Number of grid points including t = 0.
    std::size_t size() const;
    double t(std::size_t i) const { return static_cast<double>(i) * h; }
};

struct RenewalSolution {
    GridSpec grid;
    std::vector<double> U;     // renewal function on the grid
    std::vector<double> U_hat; // e^{-t} U(t)
    std::vector<double> W;     // int_0^x (U_hat(t) - 1/mu) dt
    double mu_used = 0.0;
    double tail_slope = 0.0;        // slope of U_hat over the last 10% of the grid
    double omega_total_mass = 0.0;  // conjugation diagnostic, should be ~1
    std::size_t cdf_sample_budget = 0; // nonzero when nu came from an empirical CDF
};

// Solves U = nu + U * dnu through the tilted equation
// U_hat = nu_hat + U_hat * domega with domega(t) = e^{-t} dnu(t).
// Rejects lattice-suspect sources and non-monotone nu.
RenewalSolution solve_split_renewal(const SplitVectorSource& source,
                                    const GridSpec& grid);

// U(ln(n/K)) + 1: expected number of vertices with M_v^n >= K.
// Requires 1 <= K <= n and ln(n/K) <= t_max.
double expected_heavy_count(const RenewalSolution& solution, double n, double K);

struct GeneralRenewalProblem {
    std::function<double(double)> z; // nonnegative, integrable on [0, inf)
    std::function<double(double)> F; // probability CDF on [0, inf)
    double mu = 0.0;                 // mean of F
    double sigma2 = 0.0;             // variance of F
};

struct GeneralRenewalSolution {
    GridSpec grid;
    std::vector<double> Z;
    std::vector<double> G; // int_0^x (Z(t) - a/mu) dt
    double a = 0.0;        // int z
    double G_limit = 0.0;  // -inf when int u z(u) du diverges on the grid
};

GeneralRenewalSolution solve_general(const GeneralRenewalProblem& problem,
                                     const GridSpec& grid);

} // namespace splitree

#endif
