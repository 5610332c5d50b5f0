#ifndef SPLITREE_SPLIT_SOURCE_HPP
#define SPLITREE_SPLIT_SOURCE_HPP

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "splitree/rng.hpp"

namespace splitree {

enum class ConstantsMethod { ClosedForm, Quadrature, MonteCarlo };

// The governing constants of a split-vector law:
//   mu     = b E(-V ln V)        (nats)
//   sigma2 = b E(V ln^2 V) - mu^2
//   c      = b E(V^2)
struct AnalyticConstants {
    double mu = 0.0;
    double sigma2 = 0.0;
    double c = 0.0;
    ConstantsMethod method = ConstantsMethod::ClosedForm;
    std::optional<double> standard_error; // Monte Carlo only, for mu
};

// The law of the split vector (V_1, ..., V_b). Immutable after construction
// and freely shareable across concurrent replications; every sampling call
// takes the caller's random stream.
class SplitVectorSource {
public:
    struct CustomSpec {
        int b = 2;
        // Fills a length-b probability vector.
        std::function<void(Rng&, std::span<double>)> sampler;
        // Optional closed-form CDF of -ln V; empirical fallback when absent.
        std::function<double(double)> neg_log_cdf;
    };

    // Defaults to the Dirichlet(1, 2) law (uniform stick break).
    SplitVectorSource() = default;

    static SplitVectorSource dirichlet_symmetric(double concentration, int b);
    static SplitVectorSource uniform_spacings(int b);
    static SplitVectorSource deterministic_permuted(std::vector<double> p);
    static SplitVectorSource custom(CustomSpec spec,
                                    std::size_t cdf_sample_budget = 10'000'000);

    int branch_factor() const { return b_; }
    bool lattice_suspect() const { return lattice_suspect_; }
    std::string describe() const;

    // Samples one split vector into out (size b). Components are nonnegative
    // and sum to 1 within 1e-12.
    void sample(Rng& rng, std::span<double> out) const;
    std::vector<double> sample(Rng& rng) const;

    // P(-ln V <= t), i.e. nu(t)/b. Closed form where available, empirical
    // CDF (built once, from cdf_sample_budget samples) otherwise.
    double neg_log_cdf(double t) const;
    bool has_closed_form_cdf() const;
    std::size_t cdf_sample_budget() const { return cdf_budget_; }

    // One draw of the size-biased component Delta.
    double sample_size_biased(Rng& rng) const;

    // Governing constants. Closed form for Dirichlet-symmetric and
    // deterministic-permuted sources, quadrature for uniform spacings,
    // Monte Carlo (with standard error) for custom sources.
    AnalyticConstants constants(std::size_t mc_budget = 1'000'000) const;

private:
    enum class Kind { DirichletSymmetric, UniformSpacings, DeterministicPermuted, Custom };

    Kind kind_ = Kind::DirichletSymmetric;
    int b_ = 2;
    double concentration_ = 1.0;
    std::vector<double> probs_; // DeterministicPermuted
    bool lattice_suspect_ = false;
    CustomSpec custom_;
    std::size_t cdf_budget_ = 1'000'000;

    struct EmpiricalCdf;
    std::shared_ptr<EmpiricalCdf> ecdf_; // lazy, thread-safe build
};

// Free-function spellings of the operations above.
inline std::vector<double> sample_split_vector(const SplitVectorSource& src, Rng& rng) {
    return src.sample(rng);
}
inline double neg_log_V_cdf(const SplitVectorSource& src, double t) {
    return src.neg_log_cdf(t);
}
inline double sample_size_biased(const SplitVectorSource& src, Rng& rng) {
    return src.sample_size_biased(rng);
}
inline AnalyticConstants constants(const SplitVectorSource& src,
                                   std::size_t mc_budget = 1'000'000) {
    return src.constants(mc_budget);
}

} // namespace splitree

#endif
