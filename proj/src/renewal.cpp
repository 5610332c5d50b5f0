#include "splitree/renewal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace splitree {

namespace {

// Forward substitution for Z = z + Z * dF on a uniform grid, with a
// trapezoidal treatment of the convolution. dF total mass <= 1 keeps the
// iteration unconditionally stable.
std::vector<double> solve_volterra(const std::vector<double>& z,
                                   const std::vector<double>& dF) {
    const std::size_t m = z.size();
    std::vector<double> Z(m, 0.0);
    Z[0] = z[0];
    for (std::size_t i = 1; i < m; ++i) {
        double acc = z[i] + 0.5 * Z[i - 1] * dF[1];
        for (std::size_t j = 2; j <= i; ++j)
            acc += 0.5 * (Z[i - j] + Z[i - j + 1]) * dF[j];
        Z[i] = acc / (1.0 - 0.5 * dF[1]);
    }
    return Z;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& f, double h) {
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i)
        out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return out;
}

} // namespace

std::size_t GridSpec::size() const {
    if (!(h > 0.0) || !(t_max > 0.0))
        throw std::invalid_argument("grid: need h > 0 and t_max > 0");
    const double steps = t_max / h;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * steps)
        throw std::invalid_argument("grid: t_max must be an integer multiple of h");
    return static_cast<std::size_t>(rounded) + 1;
}

RenewalSolution solve_split_renewal(const SplitVectorSource& source,
                                    const GridSpec& grid) {
    if (source.lattice_suspect())
        throw std::invalid_argument(
            "solve_split_renewal: source is lattice_suspect; the renewal limit "
            "does not apply");

    const std::size_t m = grid.size();
    const int b = source.branch_factor();

    std::vector<double> nu(m);
    for (std::size_t i = 0; i < m; ++i) {
        nu[i] = b * source.neg_log_cdf(grid.t(i));
        if (i > 0 && nu[i] < nu[i - 1] - 1e-12)
            throw std::invalid_argument("solve_split_renewal: nu is not monotone");
    }

    // domega(t) = e^{-t} dnu(t); midpoint tilt of the first-difference mass.
    std::vector<double> domega(m, 0.0);
    double mass = 0.0;
    for (std::size_t j = 1; j < m; ++j) {
        domega[j] = std::exp(-(grid.t(j) - 0.5 * grid.h)) * (nu[j] - nu[j - 1]);
        mass += domega[j];
    }

    std::vector<double> nu_hat(m);
    for (std::size_t i = 0; i < m; ++i) nu_hat[i] = std::exp(-grid.t(i)) * nu[i];

    RenewalSolution sol;
    sol.grid = grid;
    sol.omega_total_mass = mass;
    sol.mu_used = source.constants().mu;
    sol.U_hat = solve_volterra(nu_hat, domega);
    sol.U.resize(m);
    for (std::size_t i = 0; i < m; ++i) sol.U[i] = std::exp(grid.t(i)) * sol.U_hat[i];
    if (!source.has_closed_form_cdf()) sol.cdf_sample_budget = source.cdf_sample_budget();

    std::vector<double> integrand(m);
    for (std::size_t i = 0; i < m; ++i) integrand[i] = sol.U_hat[i] - 1.0 / sol.mu_used;
    sol.W = cumulative_trapezoid(integrand, grid.h);

    const std::size_t tail_start = m - 1 - (m - 1) / 10;
    sol.tail_slope = (sol.U_hat[m - 1] - sol.U_hat[tail_start]) /
                     (grid.t(m - 1) - grid.t(tail_start));
    return sol;
}

double expected_heavy_count(const RenewalSolution& solution, double n, double K) {
    if (!(K >= 1.0) || !(K <= n))
        throw std::invalid_argument("expected_heavy_count: need 1 <= K <= n");
    const double t = std::log(n / K);
    const GridSpec& grid = solution.grid;
    if (t > grid.t_max + 1e-12)
        throw std::out_of_range("expected_heavy_count: ln(n/K) beyond the grid");
    const double pos = t / grid.h;
    const std::size_t i = std::min(static_cast<std::size_t>(pos),
                                   solution.U_hat.size() - 2);
    const double frac = pos - static_cast<double>(i);
    const double u_hat =
        (1.0 - frac) * solution.U_hat[i] + frac * solution.U_hat[i + 1];
    return std::exp(t) * u_hat + 1.0;
}

GeneralRenewalSolution solve_general(const GeneralRenewalProblem& problem,
                                     const GridSpec& grid) {
    if (!problem.z || !problem.F)
        throw std::invalid_argument("solve_general: z and F are required");
    if (!(problem.mu > 0.0))
        throw std::invalid_argument("solve_general: need mu > 0");

    const std::size_t m = grid.size();
    std::vector<double> z(m), dF(m, 0.0);
    double f_prev = problem.F(0.0);
    if (f_prev < -1e-12) throw std::invalid_argument("solve_general: F(0) < 0");
    for (std::size_t i = 0; i < m; ++i) {
        z[i] = problem.z(grid.t(i));
        if (z[i] < 0.0) throw std::invalid_argument("solve_general: z must be nonnegative");
        if (i > 0) {
            const double f = problem.F(grid.t(i));
            if (f < f_prev - 1e-12)
                throw std::invalid_argument("solve_general: F is not monotone");
            dF[i] = f - f_prev;
            f_prev = f;
        }
    }

    GeneralRenewalSolution sol;
    sol.grid = grid;
    sol.Z = solve_volterra(z, dF);

    // a = int z and int u z(u) du on the grid, with a tail-mass check: when
    // u z(u) is still contributing at the end of the grid the first-moment
    // integral is treated as divergent.
    double a = 0.0, uz = 0.0, uz_tail = 0.0;
    const std::size_t tail_start = m - 1 - (m - 1) / 10;
    for (std::size_t i = 1; i < m; ++i) {
        const double t0 = grid.t(i - 1), t1 = grid.t(i);
        a += 0.5 * grid.h * (z[i - 1] + z[i]);
        const double piece = 0.5 * grid.h * (t0 * z[i - 1] + t1 * z[i]);
        uz += piece;
        if (i > tail_start) uz_tail += piece;
    }
    sol.a = a;

    std::vector<double> integrand(m);
    for (std::size_t i = 0; i < m; ++i) integrand[i] = sol.Z[i] - a / problem.mu;
    sol.G = cumulative_trapezoid(integrand, grid.h);

    if (uz_tail > std::max(1e-8, 1e-3 * uz)) {
        sol.G_limit = -std::numeric_limits<double>::infinity();
    } else {
        sol.G_limit = -uz / problem.mu +
                      a * (problem.sigma2 + problem.mu * problem.mu) /
                          (2.0 * problem.mu * problem.mu);
    }
    return sol;
}

} // namespace splitree
