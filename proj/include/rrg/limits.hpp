#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rrg/chebyshev.hpp"
#include "rrg/rng.hpp"
#include "rrg/words.hpp"

namespace rrg {

// Probability mass on the lattice {offset, offset+step, ...}, truncated so
// that at most eps of the mass is missing.
struct Pmf {
    std::int64_t offset = 0;
    std::int64_t step = 1;
    std::vector<double> probs;
    double eps = 0.0;

    double total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i)
            m += probs[i] * static_cast<double>(offset + step * static_cast<std::int64_t>(i));
        return m;
    }

    double variance() const {
        double m = mean(), v = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            double x = static_cast<double>(offset + step * static_cast<std::int64_t>(i)) - m;
            v += probs[i] * x * x;
        }
        return v;
    }
};

inline Pmf poisson_pmf(double lambda, double eps = 1e-12) {
    if (lambda < 0.0) throw std::invalid_argument("poisson_pmf: lambda must be nonnegative");
    Pmf pmf;
    pmf.eps = eps;
    if (lambda == 0.0) {
        pmf.probs = {1.0};
        return pmf;
    }
    double p = std::exp(-lambda);
    double cum = p;
    pmf.probs.push_back(p);
    for (std::int64_t k = 1; cum < 1.0 - eps; ++k) {
        p *= lambda / static_cast<double>(k);
        pmf.probs.push_back(p);
        cum += p;
        if (k > 100 && static_cast<double>(k) > 20.0 * lambda)
            break;  // guards against eps below achievable resolution
    }
    return pmf;
}

// The law of c * X when X has pmf p.
inline Pmf scale_lattice(const Pmf& p, std::int64_t c) {
    if (c < 1) throw std::invalid_argument("scale_lattice: factor must be positive");
    return Pmf{p.offset * c, p.step * c, p.probs, p.eps};
}

// Law of the sum of two independent lattice variables, on a step-1 lattice.
inline Pmf convolve(const Pmf& a, const Pmf& b) {
    Pmf out;
    out.offset = a.offset + b.offset;
    out.step = 1;
    out.eps = a.eps + b.eps;
    std::size_t len = (a.probs.size() - 1) * static_cast<std::size_t>(a.step) +
                      (b.probs.size() - 1) * static_cast<std::size_t>(b.step) + 1;
    out.probs.assign(len, 0.0);
    for (std::size_t i = 0; i < a.probs.size(); ++i) {
        if (a.probs[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.probs.size(); ++j)
            out.probs[i * static_cast<std::size_t>(a.step) + j * static_cast<std::size_t>(b.step)] +=
                a.probs[i] * b.probs[j];
    }
    return out;
}

// Law of CNBW_k^infty = sum_{j|k} 2j Poi(a(d,j)/2j) by exact lattice
// convolution over the divisors of k.
inline Pmf cnbw_infty_pmf(int d, int k, double eps = 1e-12) {
    if (d < 1 || k < 1) throw std::invalid_argument("cnbw_infty_pmf: d, k must be >= 1");
    std::vector<Pmf> parts;
    for (int j = 1; j <= k; ++j) {
        if (k % j != 0) continue;
        double lambda = static_cast<double>(a_closed_form(d, j)) / (2.0 * j);
        parts.push_back(scale_lattice(poisson_pmf(lambda, eps / (2.0 * k)), 2 * j));
    }
    Pmf acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) acc = convolve(acc, parts[i]);
    return acc;
}

struct LatticeMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// (1/2) sum |p - q| over the union support, plus the truncated tail mass.
inline double tv_distance(const Pmf& p, const Pmf& q) {
    if (p.step != q.step || (p.offset - q.offset) % p.step != 0)
        throw LatticeMismatchError("tv_distance: incomparable lattices");
    std::int64_t lo = std::min(p.offset, q.offset);
    std::int64_t hi = std::max(p.offset + p.step * static_cast<std::int64_t>(p.probs.size() - 1),
                               q.offset + q.step * static_cast<std::int64_t>(q.probs.size() - 1));
    auto value_at = [](const Pmf& f, std::int64_t x) -> double {
        std::int64_t idx = (x - f.offset) / f.step;
        if (idx < 0 || idx >= static_cast<std::int64_t>(f.probs.size())) return 0.0;
        return f.probs[static_cast<std::size_t>(idx)];
    };
    double sum = 0.0;
    for (std::int64_t x = lo; x <= hi; x += p.step) sum += std::abs(value_at(p, x) - value_at(q, x));
    return 0.5 * (sum + (1.0 - p.total()) + (1.0 - q.total()));
}

// Integer count table collected from Monte Carlo trials.
struct EmpiricalCounts {
    std::map<std::int64_t, std::int64_t> counts;
    std::int64_t trials = 0;

    void add(std::int64_t value) {
        counts[value]++;
        trials++;
    }
};

inline double tv_distance(const EmpiricalCounts& e, const Pmf& q) {
    if (e.trials <= 0) throw std::invalid_argument("tv_distance: empty empirical distribution");
    auto value_at = [&](std::int64_t x) -> double {
        if (x % q.step != (q.offset % q.step + q.step) % q.step) return 0.0;
        std::int64_t idx = (x - q.offset) / q.step;
        if (idx < 0 || idx >= static_cast<std::int64_t>(q.probs.size())) return 0.0;
        return q.probs[static_cast<std::size_t>(idx)];
    };
    double sum = 0.0, q_seen = 0.0;
    for (const auto& [x, c] : e.counts) {
        double qx = value_at(x);
        sum += std::abs(static_cast<double>(c) / static_cast<double>(e.trials) - qx);
        q_seen += qx;
    }
    return 0.5 * (sum + (1.0 - q_seen));
}

// Joint TV between an empirical law of integer vectors and a product of
// independent lattice marginals.
inline double tv_empirical_vs_product(const std::map<std::vector<std::int64_t>, std::int64_t>& counts,
                                      std::int64_t trials, const std::vector<Pmf>& marginals) {
    double sum = 0.0, q_seen = 0.0;
    for (const auto& [vec, c] : counts) {
        if (vec.size() != marginals.size())
            throw LatticeMismatchError("tv_empirical_vs_product: dimension mismatch");
        double q = 1.0;
        for (std::size_t i = 0; i < vec.size(); ++i) {
            const Pmf& m = marginals[i];
            std::int64_t idx = (vec[i] - m.offset) / m.step;
            bool on = (vec[i] - m.offset) % m.step == 0 && idx >= 0 &&
                      idx < static_cast<std::int64_t>(m.probs.size());
            q *= on ? m.probs[static_cast<std::size_t>(idx)] : 0.0;
        }
        sum += std::abs(static_cast<double>(c) / static_cast<double>(trials) - q);
        q_seen += q;
    }
    return 0.5 * (sum + (1.0 - q_seen));
}

inline double normal_cdf(double x, double mean, double variance) {
    return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

// Kolmogorov-Smirnov sup distance against N(mean, variance).
inline double ks_statistic(std::vector<double> samples, double mean, double variance) {
    if (samples.size() < 100) throw std::invalid_argument("ks_statistic: need at least 100 samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double cdf = normal_cdf(samples[i], mean, variance);
        ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - cdf));
    }
    return ks;
}

// Deterministic Poisson draw by cdf inversion; fine for the desk-scale
// means used here (lambda well below 1e4).
inline std::int64_t poisson_sample(double lambda, Xoshiro256pp& rng) {
    double u = rng.uniform();
    double p = std::exp(-lambda), cum = p;
    std::int64_t k = 0;
    while (u > cum && k < 1000000) {
        ++k;
        p *= lambda / static_cast<double>(k);
        cum += p;
    }
    return k;
}

struct YfReference {
    std::vector<double> samples;
    double analytic_mean = 0.0;
    double analytic_variance = 0.0;
};

// Monte Carlo reference for Y_f = sum_k c_k (2d-1)^(-k/2) CNBW_k^infty,
// with one shared family of divisor Poissons C_j per trial. The analytic
// variance regroups by shared divisors:
//   var = sum_j lambda_j (sum_{k<=K, j|k} c_k (2d-1)^(-k/2) 2j)^2.
inline YfReference yf_reference(int d, const ChebSeries& series, int K, std::int64_t trials,
                                std::uint64_t seed) {
    if (series.basis != SeriesBasis::Gamma)
        throw std::invalid_argument("yf_reference: expected a Gamma-basis series");
    if (K < 1) throw std::invalid_argument("yf_reference: K must be >= 1");
    K = std::min(K, series.degree());

    std::vector<double> lambda(static_cast<std::size_t>(K) + 1, 0.0);
    std::vector<double> weight(static_cast<std::size_t>(K) + 1, 0.0);  // coefficient of C_j in Y_f
    for (int j = 1; j <= K; ++j) {
        lambda[static_cast<std::size_t>(j)] = static_cast<double>(a_closed_form(d, j)) / (2.0 * j);
        for (int k = j; k <= K; k += j)
            weight[static_cast<std::size_t>(j)] += series.coeffs(k) * std::pow(2.0 * d - 1.0, -0.5 * k) * 2.0 * j;
    }

    YfReference out;
    for (int j = 1; j <= K; ++j) {
        out.analytic_mean += weight[static_cast<std::size_t>(j)] * lambda[static_cast<std::size_t>(j)];
        out.analytic_variance += lambda[static_cast<std::size_t>(j)] * weight[static_cast<std::size_t>(j)] *
                                 weight[static_cast<std::size_t>(j)];
    }

    out.samples.reserve(static_cast<std::size_t>(trials));
    for (std::int64_t t = 0; t < trials; ++t) {
        Xoshiro256pp rng(seed, static_cast<std::uint64_t>(t));
        double y = 0.0;
        for (int j = 1; j <= K; ++j)
            y += weight[static_cast<std::size_t>(j)] *
                 static_cast<double>(poisson_sample(lambda[static_cast<std::size_t>(j)], rng));
        out.samples.push_back(y);
    }
    return out;
}

// sigma_f^2 = sum_{k>=1} 2k c_k^2 for a Phi-basis series.
inline double sigma_f_squared(const ChebSeries& series) {
    if (series.basis != SeriesBasis::Phi)
        throw std::invalid_argument("sigma_f_squared: expected a Phi-basis series");
    double s = 0.0;
    for (int k = 1; k <= series.degree(); ++k) s += 2.0 * k * series.coeffs(k) * series.coeffs(k);
    return s;
}

}  // namespace rrg
