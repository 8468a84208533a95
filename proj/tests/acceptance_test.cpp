// Acceptance gate: one pass/fail line per criterion. All tolerances are
// pinned here, not configurable.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "rrg/harness.hpp"

using namespace rrg;

namespace {

int g_failures = 0;

void report(int idx, bool ok, const std::string& what) {
    std::printf("criterion %2d: %s  %s\n", idx, ok ? "PASS" : "FAIL", what.c_str());
    if (!ok) ++g_failures;
}

int worker_threads() {
    unsigned hc = std::thread::hardware_concurrency();
    return static_cast<int>(std::max(1u, hc));
}

ExperimentConfig base_config(StatKind stat, long long n, int d, int r, long long trials,
                             std::uint64_t seed) {
    ExperimentConfig c;
    c.stat = stat;
    c.n = n;
    c.d = d;
    c.r = r;
    c.trials = trials;
    c.seed = seed;
    c.threads = worker_threads();
    return c;
}

double aggregate_variance(const ExperimentReport& rep, std::size_t col) {
    std::vector<double> xs;
    for (const auto& row : rep.per_trial)
        if (!row.empty()) xs.push_back(row[col]);
    return detail::sample_variance(xs);
}

// 1. exact word-count identity across all three computations
void criterion_word_counts() {
    bool ok = true;
    for (int d = 1; d <= 3 && ok; ++d)
        for (int k = 1; k <= 8 && ok; ++k) {
            BigInt closed = a_closed_form(d, k);
            ok = closed == a_inclusion_exclusion(d, k) &&
                 closed == BigInt(enumerate_cyclically_reduced(d, k).size());
        }
    report(1, ok, "a(d,k): closed form = inclusion-exclusion = enumeration, d<=3, k<=8");
}

// 2. spectral CNBW reconstruction rounds to the transfer-operator value
void criterion_trace_identity() {
    const int r = 12, per_d = 25;
    std::vector<int> ok(2 * per_d, 0);
    detail::run_trials(2 * per_d, worker_threads(), [&](long long t) {
        int d = t < per_d ? 2 : 3;
        auto g = sample_graph(100, d, 1000 + static_cast<std::uint64_t>(t));
        CountVector exact = count_cnbw_transfer(g, r);
        std::vector<double> dist;
        CountVector spectral = cnbw_from_spectrum(eigenvalues(g), r, &dist);
        bool good = spectral.values == exact.values;
        for (int k = 1; k <= r; ++k)
            good = good &&
                   dist[static_cast<std::size_t>(k - 1)] <=
                       1e-6 * std::max<double>(1.0, static_cast<double>(exact.at(k)));
        ok[static_cast<std::size_t>(t)] = good ? 1 : 0;
    });
    bool all = std::all_of(ok.begin(), ok.end(), [](int x) { return x == 1; });
    report(2, all, "trace identity: 50 graphs, n=100, d in {2,3}, r=12, deviation <= 1e-6*max(1,CNBW)");
}

// 3. counting oracles agree exactly on small instances
void criterion_walk_oracles() {
    bool ok = true;
    for (int d = 1; d <= 2 && ok; ++d)
        for (int n : {5, 12, 23, 40})
            for (std::uint64_t seed : {10ULL, 20ULL, 30ULL}) {
                auto g = sample_graph(n, d, seed);
                CountVector cnbw_w = count_cnbw_words(g, 8);
                CountVector cnbw_t = count_cnbw_transfer(g, 8);
                ok = ok && cnbw_w.values == cnbw_t.values &&
                     count_nbw_from_cnbw(cnbw_t).values == count_nbw_dp(g, 8).values;
            }
    report(3, ok, "oracle equivalence: words = transfer, NBW recursion = DP, n<=40, d<=2, r=8");
}

// 4. empirical cycle means track the exact expectation
void criterion_cycle_means() {
    ExperimentReport rep = run_experiment(base_config(StatKind::Cycles, 1000, 2, 4, 2000, 41));
    bool ok = rep.failed_trials == 0;
    for (const AggregateRow& a : rep.aggregates) {
        double limit = static_cast<double>(a_closed_form(2, a.k)) / (2.0 * a.k);
        ok = ok && std::abs(a.mean - a.ref_mean) <= 3.0 * a.se &&
             std::abs(a.ref_mean - limit) <= 0.02 * limit;
    }
    report(4, ok, "cycle means: n=1000, d=2, 2000 trials, k<=4, within 3 SE of exact");
}

// 5. TV against Poi(3) shrinks with n
void criterion_tv_decay() {
    auto tv_at = [&](long long n, std::uint64_t seed) {
        ExperimentReport rep = run_experiment(base_config(StatKind::Cycles, n, 2, 2, 5000, seed));
        return rep.aggregates.at(1).tv;  // k = 2
    };
    double tv_small = tv_at(200, 50);
    double tv_large = tv_at(2000, 51);
    bool ok = tv_large < tv_small && tv_large <= 0.15;
    char buf[128];
    std::snprintf(buf, sizeof buf, "TV(C_2, Poi(3)): %.4f at n=200 vs %.4f at n=2000", tv_small,
                  tv_large);
    report(5, ok, buf);
}

// 6. bad walks become rarer as n grows
void criterion_bad_walks() {
    auto freq_at = [&](long long n, std::uint64_t seed) {
        ExperimentReport rep = run_experiment(base_config(StatKind::Badwalks, n, 2, 4, 500, seed));
        return rep.aggregates.at(0).mean;
    };
    double f_small = freq_at(400, 60);
    double f_large = freq_at(4000, 61);
    char buf[128];
    std::snprintf(buf, sizeof buf, "P(exists k<=4: B_k>0): %.3f at n=400 vs %.3f at n=4000", f_small,
                  f_large);
    report(6, f_large < f_small, buf);
}

// 7. coupling containment + removed-edge shape; exact micro law
void criterion_coupling() {
    ExperimentReport rep = run_experiment(base_config(StatKind::Coupling, 60, 2, 3, 200, 70));
    bool ok = rep.assertion_violations == 0 && rep.failed_trials == 0 &&
              rep.aggregates.at(0).mean == 1.0;

    // exact law: conditioning on a loop at 0 over all 24 permutations of
    // {0..3} must give the uniform law on the 6 permutations fixing 0
    TrailSpec s;
    s.vertices = {0};
    s.word = {{1, false}};
    Permutation base{0, 1, 2, 3};
    std::map<Permutation, int> law;
    do {
        PermutationGraph g(4, {base});
        law[couple_conditioned(g, s).perms[0]]++;
    } while (std::next_permutation(base.begin(), base.end()));
    ok = ok && law.size() == 6;
    for (const auto& [perm, count] : law) ok = ok && perm[0] == 0 && count == 4;
    report(7, ok, "coupling: 200 samples contain s with valid removed edges; n=4 law exact");
}

// 8. second-eigenvalue bound with the theorem constant
void criterion_second_eigenvalue() {
    ExperimentConfig c = base_config(StatKind::Lambda2, 500, 3, 1, 200, 80);
    c.m = 1.0;
    ExperimentReport rep = run_experiment(c);
    bool ok = rep.assertion_violations == 0 && rep.failed_trials == 0;
    const AggregateRow& a = rep.aggregates.at(0);
    double soft = 2.0 * std::sqrt(5.0) + 0.5;  // soft, non-gating yardstick
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "lambda2 <= 38400*sqrt(3) always; p95 = %.3f vs soft 2*sqrt(2d-1)+0.5 = %.3f%s",
                  a.extra, soft, a.extra <= soft ? "" : " (soft bound exceeded, non-gating)");
    report(8, ok, buf);
}

// 9. discrepancy property holds for every sampled pair
void criterion_discrepancy() {
    ExperimentConfig c = base_config(StatKind::Discrepancy, 500, 3, 1, 1, 90);
    c.m = 1.0;
    c.pairs = 1000;
    ExperimentReport rep = run_experiment(c);
    bool ok = rep.assertion_violations == 0 && rep.failed_trials == 0;
    report(9, ok, "discrepancy: n=500, d=3, 1000 pairs, no pair violates both properties");
}

// 10. standardized CNBW_1 approaches N(0,2) as d grows
void criterion_gaussian_limit() {
    ExperimentConfig c = base_config(StatKind::Ntilde, 10000, 13, 1, 2000, 101);
    c.method = "words";
    ExperimentReport rep = run_experiment(c);
    const AggregateRow& a = rep.aggregates.at(0);
    double var = aggregate_variance(rep, 1);
    bool ok = rep.failed_trials == 0 && std::abs(a.mean) <= 3.0 * a.se &&
              std::abs(var - 2.0) <= 0.2 && a.extra <= 0.08;
    char buf[128];
    std::snprintf(buf, sizeof buf, "Ntilde_1: mean %.4f (se %.4f), var %.3f, KS %.4f", a.mean, a.se,
                  var, a.extra);
    report(10, ok, buf);
}

// 11. fixed-d linear statistic matches the compound-Poisson limit Y_f
void criterion_linear_statistics() {
    ExperimentConfig c = base_config(StatKind::Linstat, 2000, 2, 2, 1000, 110);
    c.function = "square";
    c.expansion_order = 2;
    c.mode = "fixed";
    ExperimentReport rep = run_experiment(c);
    const AggregateRow& a = rep.aggregates.at(0);
    const double mean_ref = 16.0 / 3.0, var_ref = 56.0 / 9.0;
    double var = a.tv;  // sample variance of the centered statistic
    bool ok = rep.failed_trials == 0 && std::abs(a.mean - mean_ref) <= 3.0 * a.se &&
              std::abs(var - var_ref) <= 0.15 * var_ref;

    // the Monte Carlo Y_f reference must reproduce the same moments
    ChebSeries gamma = expand([](double x) { return x * x; }, 2, SeriesBasis::Gamma, 2);
    YfReference ref = yf_reference(2, gamma, 2, 100000, 111);
    auto [mc_mean, mc_se] = detail::mean_se(ref.samples);
    double mc_var = detail::sample_variance(ref.samples);
    ok = ok && std::abs(mc_mean - a.mean) <= 3.0 * std::sqrt(mc_se * mc_se + a.se * a.se) &&
         std::abs(mc_var - var_ref) <= 0.15 * var_ref;

    // cross-check of the walk route against a direct eigensolve at n=100
    auto g = sample_graph(100, 2, 112);
    double spectral = linear_statistic(eigenvalues(g), gamma, LinStatMode::FixedD).centered;
    double walks = linear_statistic_from_walks(count_cnbw_words(g, 2), gamma, LinStatMode::FixedD);
    ok = ok && std::abs(spectral - walks) <= 1e-8;

    char buf[160];
    std::snprintf(buf, sizeof buf, "linstat x^2: mean %.4f vs 16/3, var %.4f vs 56/9, Y_f MC %.4f",
                  a.mean, var, mc_mean);
    report(11, ok, buf);
}

// 12. sigma_f^2 closed form
void criterion_sigma_f() {
    ChebSeries direct{SeriesBasis::Phi, 0, Eigen::Vector3d{2.0, 0.0, 1.0}};  // x^2 = 2 + Phi_2
    ChebSeries expanded = expand([](double x) { return x * x; }, 4, SeriesBasis::Phi);
    ChebSeries phi13{SeriesBasis::Phi, 0, Eigen::Vector4d{0.0, 1.0, 0.0, 1.0}};
    bool ok = sigma_f_squared(direct) == 4.0 &&
              std::abs(sigma_f_squared(expanded) - 4.0) <= 1e-12 && sigma_f_squared(phi13) == 8.0;
    report(12, ok, "sigma_f^2: x^2 -> 4, Phi_1 + Phi_3 -> 8");
}

// 13. expansion accuracy and Kesten-McKay moments
void criterion_chebyshev() {
    auto f = [](double x) { return std::exp(x); };
    ChebSeries s = expand(f, 30, SeriesBasis::Phi);
    bool ok = truncation_error(f, s, 30) <= 1e-10;
    for (int d : {2, 3}) {
        const int nodes = 20000;
        auto moment = [&](auto&& h) {
            double sum = 0.0;
            for (int j = 0; j < nodes; ++j) {
                double t = (j + 0.5) * std::numbers::pi / nodes;
                double x = 2.0 * std::cos(t);
                sum += kesten_mckay_density(d, x) * h(x) * 2.0 * std::sin(t);
            }
            return sum * std::numbers::pi / nodes;
        };
        ok = ok && std::abs(moment([](double) { return 1.0; }) - 1.0) <= 1e-8;
        for (int k = 1; k <= 8; ++k)
            ok = ok && std::abs(moment([&](double x) { return eval_basis(PolyKind::Gamma, k, x, d); })) <= 1e-6;
    }
    report(13, ok, "Chebyshev: exp expansion error <= 1e-10; Kesten-McKay mass 1, orthogonal to Gamma_k");
}

}  // namespace

int main() {
    struct Criterion {
        int idx;
        void (*run)();
    } criteria[] = {
        {1, criterion_word_counts},     {2, criterion_trace_identity},
        {3, criterion_walk_oracles},    {4, criterion_cycle_means},
        {5, criterion_tv_decay},        {6, criterion_bad_walks},
        {7, criterion_coupling},        {8, criterion_second_eigenvalue},
        {9, criterion_discrepancy},     {10, criterion_gaussian_limit},
        {11, criterion_linear_statistics}, {12, criterion_sigma_f},
        {13, criterion_chebyshev},
    };
    for (const Criterion& c : criteria) {
        try {
            c.run();
        } catch (const std::exception& e) {
            report(c.idx, false, std::string("exception: ") + e.what());
        }
    }
    if (g_failures) std::printf("%d criteria FAILED\n", g_failures);
    else std::printf("all 13 criteria passed\n");
    return g_failures == 0 ? 0 : 1;
}
