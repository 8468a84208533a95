#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rrg/limits.hpp"

using namespace rrg;

TEST_CASE("poisson pmf has the right mass, mean and variance") {
    for (double lambda : {0.5, 3.0, 16.0}) {
        Pmf p = poisson_pmf(lambda);
        CHECK(p.total() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(p.mean() == doctest::Approx(lambda).epsilon(1e-9));
        CHECK(p.variance() == doctest::Approx(lambda).epsilon(1e-9));
    }
    Pmf zero = poisson_pmf(0.0);
    CHECK(zero.probs.size() == 1);
    CHECK(zero.mean() == 0.0);
}

TEST_CASE("convolving Poissons reproduces the summed-rate Poisson") {
    Pmf sum = convolve(poisson_pmf(1.3), poisson_pmf(2.2));
    CHECK(tv_distance(sum, poisson_pmf(3.5)) < 1e-10);
}

TEST_CASE("lattice scaling multiplies the mean") {
    Pmf p = scale_lattice(poisson_pmf(2.0), 4);
    CHECK(p.step == 4);
    CHECK(p.mean() == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("compound CNBW law reproduces mu_k and Theta_k - mu_k^2") {
    Pmf p = cnbw_infty_pmf(2, 2);
    CHECK(p.total() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.mean() == doctest::Approx(16.0).epsilon(1e-8));
    CHECK(p.variance() == doctest::Approx(56.0).epsilon(1e-7));  // Theta - mu^2 = 312 - 256
    // k = 2 with divisors {1, 2}: lattice offset 0, step 1 after convolution
    CHECK(p.offset == 0);
    CHECK(p.step == 1);
}

TEST_CASE("tv distance basics") {
    Pmf p = poisson_pmf(3.0);
    CHECK(tv_distance(p, p) < 1e-12);
    Pmf q = p;
    q.offset = 1000;  // same lattice, disjoint support
    CHECK(tv_distance(p, q) == doctest::Approx(1.0).epsilon(1e-9));
    Pmf stepped = scale_lattice(p, 2);
    CHECK_THROWS_AS(tv_distance(p, stepped), LatticeMismatchError);
}

TEST_CASE("empirical tv converges for a matching sampler") {
    Pmf ref = poisson_pmf(3.0);
    EmpiricalCounts counts;
    Xoshiro256pp rng(31);
    for (int t = 0; t < 40000; ++t) counts.add(poisson_sample(3.0, rng));
    CHECK(tv_distance(counts, ref) < 0.03);
    EmpiricalCounts shifted;
    for (int t = 0; t < 100; ++t) shifted.add(500 + t);
    CHECK(tv_distance(shifted, ref) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("product-law tv is small for independent coordinates") {
    std::map<std::vector<std::int64_t>, std::int64_t> counts;
    Xoshiro256pp rng(17);
    const int trials = 40000;
    for (int t = 0; t < trials; ++t)
        counts[{poisson_sample(1.0, rng), poisson_sample(2.0, rng)}]++;
    std::vector<Pmf> marginals{poisson_pmf(1.0), poisson_pmf(2.0)};
    CHECK(tv_empirical_vs_product(counts, trials, marginals) < 0.05);
}

TEST_CASE("ks statistic: gaussian quantile grid scores near zero") {
    std::vector<double> samples;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        // midpoint quantiles of N(1, 4) by bisection on the cdf
        double u = (i + 0.5) / n, lo = -20.0, hi = 20.0;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            (normal_cdf(mid, 1.0, 4.0) < u ? lo : hi) = mid;
        }
        samples.push_back(0.5 * (lo + hi));
    }
    CHECK(ks_statistic(samples, 1.0, 4.0) < 1e-3);
    CHECK(ks_statistic(samples, 0.0, 4.0) > 0.1);
    CHECK_THROWS_AS(ks_statistic({1.0, 2.0}, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("poisson sampler hits its mean") {
    Xoshiro256pp rng(23);
    double sum = 0.0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) sum += static_cast<double>(poisson_sample(5.0, rng));
    CHECK(sum / trials == doctest::Approx(5.0).epsilon(0.03));
}

TEST_CASE("Y_f reference: analytic moments for f = x^2 at d = 2") {
    ChebSeries gamma = expand([](double x) { return x * x; }, 4, SeriesBasis::Gamma, 2);
    YfReference ref = yf_reference(2, gamma, 4, 50000, 91);
    CHECK(ref.analytic_mean == doctest::Approx(16.0 / 3.0).epsilon(1e-10));
    CHECK(ref.analytic_variance == doctest::Approx(56.0 / 9.0).epsilon(1e-10));
    double mean = 0.0;
    for (double y : ref.samples) mean += y;
    mean /= static_cast<double>(ref.samples.size());
    double sd = std::sqrt(ref.analytic_variance / static_cast<double>(ref.samples.size()));
    CHECK(std::abs(mean - ref.analytic_mean) < 4.0 * sd);
}

TEST_CASE("sigma_f^2 closed form on Phi coefficients") {
    ChebSeries sq = expand([](double x) { return x * x; }, 4, SeriesBasis::Phi);
    CHECK(sigma_f_squared(sq) == doctest::Approx(4.0).epsilon(1e-12));
    ChebSeries phi13{SeriesBasis::Phi, 0, Eigen::Vector4d{0.0, 1.0, 0.0, 1.0}};
    CHECK(sigma_f_squared(phi13) == 8.0);
    CHECK_THROWS_AS(sigma_f_squared(to_gamma_basis(sq, 2)), std::invalid_argument);
}
