#include "splitree/split_source.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "splitree/quadrature.hpp"

namespace splitree {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Euclid on reals with tolerance; returns ~0 when no common span exists.
double float_gcd(double a, double b, double tol) {
    a = std::abs(a);
    b = std::abs(b);
    while (b > tol) {
        const double r = std::fmod(a, b);
        a = b;
        b = (r > b - tol) ? 0.0 : r; // fmod can land just below the divisor
    }
    return a;
}

bool on_arithmetic_grid(const std::vector<double>& values) {
    double g = 0.0;
    for (double v : values) g = float_gcd(g, v, 1e-9);
    if (g < 1e-8) return false;
    for (double v : values) {
        const double k = std::round(v / g);
        if (std::abs(v - k * g) > 1e-8 * std::max(1.0, v)) return false;
    }
    return true;
}

void normalize(std::span<double> v) {
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& x : v) x /= total;
}

} // namespace

struct SplitVectorSource::EmpiricalCdf {
    std::once_flag built;
    std::vector<double> neg_logs; // sorted
};

SplitVectorSource SplitVectorSource::dirichlet_symmetric(double concentration, int b) {
    if (b < 2 || !(concentration > 0.0))
        throw std::invalid_argument("dirichlet_symmetric: need b >= 2 and a > 0");
    SplitVectorSource s;
    s.kind_ = Kind::DirichletSymmetric;
    s.b_ = b;
    s.concentration_ = concentration;
    return s;
}

SplitVectorSource SplitVectorSource::uniform_spacings(int b) {
    if (b < 2) throw std::invalid_argument("uniform_spacings: need b >= 2");
    SplitVectorSource s;
    s.kind_ = Kind::UniformSpacings;
    s.b_ = b;
    return s;
}

SplitVectorSource SplitVectorSource::deterministic_permuted(std::vector<double> p) {
    if (p.size() < 2)
        throw std::invalid_argument("deterministic_permuted: need at least 2 components");
    double total = 0.0;
    for (double x : p) {
        if (x < 0.0) throw std::invalid_argument("deterministic_permuted: negative component");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("deterministic_permuted: components must sum to 1");
    for (double& x : p) x /= total;

    SplitVectorSource s;
    s.kind_ = Kind::DeterministicPermuted;
    s.b_ = static_cast<int>(p.size());
    s.probs_ = std::move(p);

    std::vector<double> neg_logs;
    for (double x : s.probs_)
        if (x > 0.0) neg_logs.push_back(-std::log(x));
    s.lattice_suspect_ = on_arithmetic_grid(neg_logs);
    return s;
}

SplitVectorSource SplitVectorSource::custom(CustomSpec spec, std::size_t cdf_sample_budget) {
    if (spec.b < 2 || !spec.sampler)
        throw std::invalid_argument("custom source: need b >= 2 and a sampler");
    SplitVectorSource s;
    s.kind_ = Kind::Custom;
    s.b_ = spec.b;
    s.custom_ = std::move(spec);
    s.cdf_budget_ = cdf_sample_budget;
    if (!s.custom_.neg_log_cdf) s.ecdf_ = std::make_shared<EmpiricalCdf>();
    return s;
}

std::string SplitVectorSource::describe() const {
    std::ostringstream out;
    switch (kind_) {
    case Kind::DirichletSymmetric:
        out << "dirichlet_symmetric(a=" << concentration_ << ", b=" << b_ << ")";
        break;
    case Kind::UniformSpacings:
        out << "uniform_spacings(b=" << b_ << ")";
        break;
    case Kind::DeterministicPermuted: {
        out << "deterministic_permuted(";
        for (std::size_t i = 0; i < probs_.size(); ++i)
            out << (i ? "," : "") << probs_[i];
        out << ")";
        break;
    }
    case Kind::Custom:
        out << "custom(b=" << b_ << ")";
        break;
    }
    return out.str();
}

void SplitVectorSource::sample(Rng& rng, std::span<double> out) const {
    if (static_cast<int>(out.size()) != b_)
        throw std::invalid_argument("sample: output span must have length b");
    switch (kind_) {
    case Kind::DirichletSymmetric: {
        std::gamma_distribution<double> gamma(concentration_, 1.0);
        for (double& x : out) x = gamma(rng);
        normalize(out);
        break;
    }
    case Kind::UniformSpacings: {
        // Spacings of b-1 uniform points on [0, 1].
        for (int i = 0; i + 1 < b_; ++i) out[i] = uniform01(rng);
        std::sort(out.begin(), out.end() - 1);
        double prev = 0.0;
        for (int i = 0; i + 1 < b_; ++i) {
            const double cut = out[i];
            out[i] = cut - prev;
            prev = cut;
        }
        out[b_ - 1] = 1.0 - prev;
        break;
    }
    case Kind::DeterministicPermuted: {
        std::copy(probs_.begin(), probs_.end(), out.begin());
        for (int i = b_ - 1; i > 0; --i) {
            const int j = static_cast<int>(
                std::uniform_int_distribution<int>(0, i)(rng));
            std::swap(out[i], out[j]);
        }
        break;
    }
    case Kind::Custom: {
        custom_.sampler(rng, out);
        double total = 0.0;
        for (double x : out) {
            if (!(x >= 0.0))
                throw std::runtime_error(
                    "custom sampler returned a negative or non-finite component");
            total += x;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::runtime_error(
                "custom sampler returned a vector with sum " + std::to_string(total));
        normalize(out);
        break;
    }
    }
}

std::vector<double> SplitVectorSource::sample(Rng& rng) const {
    std::vector<double> v(static_cast<std::size_t>(b_));
    sample(rng, v);
    return v;
}

bool SplitVectorSource::has_closed_form_cdf() const {
    return kind_ != Kind::Custom || static_cast<bool>(custom_.neg_log_cdf);
}

double SplitVectorSource::neg_log_cdf(double t) const {
    if (t <= 0.0) return 0.0;
    switch (kind_) {
    case Kind::DirichletSymmetric: {
        // V ~ Beta(a, a(b-1)); P(-ln V <= t) = P(V >= e^{-t}).
        const double x = std::exp(-t);
        return 1.0 - boost::math::ibeta(concentration_,
                                        concentration_ * (b_ - 1), x);
    }
    case Kind::UniformSpacings:
        // V ~ Beta(1, b-1).
        return std::pow(1.0 - std::exp(-t), b_ - 1);
    case Kind::DeterministicPermuted: {
        int hits = 0;
        for (double p : probs_)
            if (p > 0.0 && -std::log(p) <= t) ++hits;
        return static_cast<double>(hits) / b_;
    }
    case Kind::Custom: {
        if (custom_.neg_log_cdf) return custom_.neg_log_cdf(t);
        std::call_once(ecdf_->built, [this] {
            Rng rng(0x5eedc0de12345678ULL);
            std::vector<double> buf(static_cast<std::size_t>(b_));
            auto& xs = ecdf_->neg_logs;
            xs.reserve(cdf_budget_);
            for (std::size_t i = 0; i < cdf_budget_; ++i) {
                sample(rng, buf);
                if (buf[0] > 0.0) xs.push_back(-std::log(buf[0]));
            }
            std::sort(xs.begin(), xs.end());
        });
        const auto& xs = ecdf_->neg_logs;
        const auto it = std::upper_bound(xs.begin(), xs.end(), t);
        return static_cast<double>(it - xs.begin()) / cdf_budget_;
    }
    }
    return 0.0;
}

double SplitVectorSource::sample_size_biased(Rng& rng) const {
    std::vector<double> v(static_cast<std::size_t>(b_));
    sample(rng, v);
    const double u = uniform01(rng);
    double acc = 0.0;
    int last_positive = -1;
    for (int i = 0; i < b_; ++i) {
        if (v[i] <= 0.0) continue;
        acc += v[i];
        last_positive = i;
        if (u < acc) return v[i];
    }
    return v[last_positive];
}

AnalyticConstants SplitVectorSource::constants(std::size_t mc_budget) const {
    AnalyticConstants out;
    switch (kind_) {
    case Kind::DirichletSymmetric: {
        const double a = concentration_;
        const double ab = a * b_;
        out.mu = boost::math::digamma(ab + 1.0) - boost::math::digamma(a + 1.0);
        out.sigma2 = boost::math::trigamma(a + 1.0) - boost::math::trigamma(ab + 1.0);
        out.c = (a + 1.0) / (ab + 1.0);
        out.method = ConstantsMethod::ClosedForm;
        break;
    }
    case Kind::UniformSpacings: {
        // Marginal density f(x) = (b-1)(1-x)^{b-2} on (0, 1).
        const int b = b_;
        auto density = [b](double x) {
            return b == 2 ? 1.0 : (b - 1) * std::pow(1.0 - x, b - 2);
        };
        const double ev_lnv = adaptive_simpson(
            [&](double x) { return -xlogx(x) * density(x); }, 0.0, 1.0, 1e-10);
        const double ev_ln2v = adaptive_simpson(
            [&](double x) { return x * std::pow(std::log(std::max(x, 1e-300)), 2) * density(x); },
            0.0, 1.0, 1e-10);
        const double ev2 = adaptive_simpson(
            [&](double x) { return x * x * density(x); }, 0.0, 1.0, 1e-10);
        out.mu = b * ev_lnv;
        out.sigma2 = b * ev_ln2v - out.mu * out.mu;
        out.c = b * ev2;
        out.method = ConstantsMethod::Quadrature;
        break;
    }
    case Kind::DeterministicPermuted: {
        double mu = 0.0, m2 = 0.0, c = 0.0;
        for (double p : probs_) {
            mu -= xlogx(p);
            m2 += p > 0.0 ? p * std::pow(std::log(p), 2) : 0.0;
            c += p * p;
        }
        out.mu = mu;
        out.sigma2 = std::max(0.0, m2 - mu * mu);
        out.c = c;
        out.method = ConstantsMethod::ClosedForm;
        break;
    }
    case Kind::Custom:
        break; // handled below
    }
    if (kind_ == Kind::Custom) {
        Rng rng(0xca57a7e5eedULL);
        std::vector<double> v(static_cast<std::size_t>(b_));
        double sum_x = 0.0, sum_x2 = 0.0, sum_y = 0.0, sum_z = 0.0;
        for (std::size_t m = 0; m < mc_budget; ++m) {
            sample(rng, v);
            double x = 0.0, y = 0.0, z = 0.0;
            for (double vi : v) {
                x -= xlogx(vi);
                y += vi > 0.0 ? vi * std::pow(std::log(vi), 2) : 0.0;
                z += vi * vi;
            }
            if (!std::isfinite(x) || !std::isfinite(y))
                throw std::runtime_error("constants: non-finite Monte Carlo term");
            sum_x += x;
            sum_x2 += x * x;
            sum_y += y;
            sum_z += z;
        }
        const double M = static_cast<double>(mc_budget);
        out.mu = sum_x / M;
        out.sigma2 = std::max(0.0, sum_y / M - out.mu * out.mu);
        out.c = sum_z / M;
        out.method = ConstantsMethod::MonteCarlo;
        out.standard_error =
            std::sqrt(std::max(0.0, sum_x2 / M - out.mu * out.mu) / M);
    }
    return out;
}

} // namespace splitree
