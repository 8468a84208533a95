#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rrg/chebyshev.hpp"
#include "rrg/graph.hpp"
#include "rrg/limits.hpp"
#include "rrg/spectra.hpp"
#include "rrg/walks.hpp"
#include "rrg/words.hpp"

namespace rrg {

enum class StatKind { Cycles, Cnbw, Ntilde, Linstat, Lambda2, Badwalks, Coupling, Discrepancy };

inline std::string to_string(StatKind s) {
    switch (s) {
        case StatKind::Cycles: return "cycles";
        case StatKind::Cnbw: return "cnbw";
        case StatKind::Ntilde: return "ntilde";
        case StatKind::Linstat: return "linstat";
        case StatKind::Lambda2: return "lambda2";
        case StatKind::Badwalks: return "badwalks";
        case StatKind::Coupling: return "coupling";
        case StatKind::Discrepancy: return "discrepancy";
    }
    throw std::logic_error("to_string(StatKind)");
}

inline StatKind stat_from_string(const std::string& s) {
    for (StatKind k : {StatKind::Cycles, StatKind::Cnbw, StatKind::Ntilde, StatKind::Linstat,
                       StatKind::Lambda2, StatKind::Badwalks, StatKind::Coupling, StatKind::Discrepancy})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown statistic: " + s);
}

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    StatKind stat = StatKind::Cycles;
    long long n = 100;
    int d = 2;
    int r = -1;           // exactly one of r / beta
    double beta = -1.0;
    long long trials = 1;
    std::uint64_t seed = 0;
    std::string function = "square";  // square | exp | cheb:k  (linstat)
    int expansion_order = 8;          // K for linstat
    std::string mode = "fixed";       // fixed | growing      (linstat)
    std::string method = "auto";      // words | transfer | spectral | auto (cnbw paths)
    double m = 1.0;                   // lambda2 / discrepancy exponent
    long long pairs = 1000;           // discrepancy pairs per trial
    int threads = 1;
    std::string out;                  // empty = stdout
    std::string format = "csv";       // csv | json

    void validate() const {
        if (n < 1 || d < 1) throw ConfigError("n and d must be >= 1");
        if (trials < 1) throw ConfigError("trials must be >= 1");
        if ((r > 0) == (beta > 0)) throw ConfigError("exactly one of r / beta must be set");
        if (beta > 0 && (beta >= 0.5)) throw ConfigError("beta must lie in (0, 1/2)");
        if (mode != "fixed" && mode != "growing") throw ConfigError("mode must be fixed or growing");
        if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
        if (threads < 1) throw ConfigError("threads must be >= 1");
    }

    int resolved_r() const { return r > 0 ? r : rn_rule(n, d, beta); }
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    j = nlohmann::json{{"stat", to_string(c.stat)}, {"n", c.n},       {"d", c.d},
                       {"r", c.r},                  {"beta", c.beta}, {"trials", c.trials},
                       {"seed", c.seed},            {"function", c.function},
                       {"K", c.expansion_order},    {"mode", c.mode}, {"method", c.method},
                       {"m", c.m},                  {"pairs", c.pairs}, {"threads", c.threads},
                       {"out", c.out},              {"format", c.format}};
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    if (j.contains("stat")) c.stat = stat_from_string(j.at("stat").get<std::string>());
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("n", c.n);
    get("d", c.d);
    get("r", c.r);
    get("beta", c.beta);
    get("trials", c.trials);
    get("seed", c.seed);
    get("function", c.function);
    get("K", c.expansion_order);
    get("mode", c.mode);
    get("method", c.method);
    get("m", c.m);
    get("pairs", c.pairs);
    get("threads", c.threads);
    get("out", c.out);
    get("format", c.format);
}

struct AggregateRow {
    int k = 0;
    double mean = 0.0;
    double se = 0.0;
    double ref_mean = 0.0;
    double tv = -1.0;     // -1 = not applicable
    double tv_se = -1.0;
    double extra = 0.0;   // stat-specific (KS, frequency, ...)
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<std::string> per_trial_columns;
    std::vector<std::vector<double>> per_trial;  // ordered by trial index
    std::vector<AggregateRow> aggregates;
    long long failed_trials = 0;
    long long assertion_violations = 0;  // hard paper-mapped assertions
    std::string note;
};

namespace detail {

// Deterministic parallel map over trial indices; results land in
// trial-indexed slots, so the merge never depends on scheduling.
template <class Fn>
inline long long run_trials(long long trials, int threads, Fn&& per_trial) {
    std::atomic<long long> next{0};
    std::atomic<long long> failed{0};
    auto worker = [&] {
        for (;;) {
            long long t = next.fetch_add(1);
            if (t >= trials) return;
            try {
                per_trial(t);
            } catch (const std::exception&) {
                failed.fetch_add(1);
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return failed.load();
}

inline std::pair<double, double> mean_se(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= std::max<double>(1.0, static_cast<double>(xs.size()) - 1.0);
    return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

inline double sample_variance(const std::vector<double>& xs) {
    auto [mean, se] = mean_se(xs);
    (void)mean;
    return se * se * static_cast<double>(xs.size());
}

// Rough delta-method error bar on the plug-in TV estimate.
inline double tv_standard_error(const EmpiricalCounts& e) {
    double s = 0.0;
    for (const auto& [x, c] : e.counts) {
        double p = static_cast<double>(c) / static_cast<double>(e.trials);
        s += p * (1.0 - p);
    }
    return 0.5 * std::sqrt(s / static_cast<double>(e.trials));
}

inline ChebSeries series_for(const std::string& function, int K, SeriesBasis basis, int d) {
    if (function == "square")
        return expand([](double x) { return x * x; }, std::max(K, 2), basis, d);
    if (function == "exp")
        return expand([](double x) { return std::exp(x); }, K, basis, d);
    if (function.rfind("cheb:", 0) == 0) {
        int k = std::stoi(function.substr(5));
        PolyKind kind = basis == SeriesBasis::Gamma ? PolyKind::Gamma : PolyKind::Phi;
        return expand([=](double x) { return eval_basis(kind, k, x, d); }, std::max(K, k), basis, d);
    }
    throw ConfigError("unknown function spec: " + function);
}

inline CountVector cnbw_by_method(const PermutationGraph& g, int r, const std::string& method) {
    if (method == "words") return count_cnbw_words(g, r);
    if (method == "transfer") return count_cnbw_transfer(g, r);
    if (method == "spectral") return cnbw_from_spectrum(eigenvalues(g), r);
    // auto: word enumeration while cheap, otherwise spectral
    long double words = 0;
    for (int k = 1; k <= r; ++k) words += static_cast<long double>(a_closed_form(g.d, k));
    if (words * r * g.n <= 5e8L) return count_cnbw_words(g, r);
    return cnbw_from_spectrum(eigenvalues(g), r);
}

}  // namespace detail

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const int r = cfg.resolved_r();
    const auto n = static_cast<int>(cfg.n);
    ExperimentReport rep;
    rep.config = cfg;

    switch (cfg.stat) {
        case StatKind::Cycles:
        case StatKind::Cnbw: {
            const bool cycles = cfg.stat == StatKind::Cycles;
            rep.per_trial_columns = {"trial"};
            for (int k = 1; k <= r; ++k) rep.per_trial_columns.push_back("k" + std::to_string(k));
            rep.per_trial.assign(static_cast<std::size_t>(cfg.trials), {});
            rep.failed_trials = detail::run_trials(cfg.trials, cfg.threads, [&](long long t) {
                auto g = sample_graph(n, cfg.d, cfg.seed, static_cast<std::uint64_t>(t));
                CountVector cv = cycles ? count_cycles(g, r) : detail::cnbw_by_method(g, r, cfg.method);
                std::vector<double> row{static_cast<double>(t)};
                for (int k = 1; k <= r; ++k) row.push_back(static_cast<double>(cv.at(k)));
                rep.per_trial[static_cast<std::size_t>(t)] = std::move(row);
            });
            for (int k = 1; k <= r; ++k) {
                std::vector<double> xs;
                EmpiricalCounts counts;
                for (const auto& row : rep.per_trial) {
                    if (row.empty()) continue;
                    xs.push_back(row[static_cast<std::size_t>(k)]);
                    counts.add(static_cast<std::int64_t>(row[static_cast<std::size_t>(k)]));
                }
                AggregateRow agg;
                agg.k = k;
                std::tie(agg.mean, agg.se) = detail::mean_se(xs);
                Pmf ref = cycles
                              ? poisson_pmf(static_cast<double>(a_closed_form(cfg.d, k)) / (2.0 * k))
                              : cnbw_infty_pmf(cfg.d, k);
                agg.ref_mean = cycles ? static_cast<double>(expected_cycle_count_exact(cfg.n, cfg.d, k))
                                      : ref.mean();
                agg.tv = tv_distance(counts, ref);
                agg.tv_se = detail::tv_standard_error(counts);
                rep.aggregates.push_back(agg);
            }
            break;
        }

        case StatKind::Ntilde: {
            rep.per_trial_columns = {"trial"};
            for (int k = 1; k <= r; ++k) rep.per_trial_columns.push_back("ntilde" + std::to_string(k));
            rep.per_trial.assign(static_cast<std::size_t>(cfg.trials), {});
            rep.failed_trials = detail::run_trials(cfg.trials, cfg.threads, [&](long long t) {
                auto g = sample_graph(n, cfg.d, cfg.seed, static_cast<std::uint64_t>(t));
                Eigen::VectorXd nt = centered_cnbw(detail::cnbw_by_method(g, r, cfg.method));
                std::vector<double> row{static_cast<double>(t)};
                for (int k = 1; k <= r; ++k) row.push_back(nt(k - 1));
                rep.per_trial[static_cast<std::size_t>(t)] = std::move(row);
            });
            for (int k = 1; k <= r; ++k) {
                std::vector<double> xs;
                for (const auto& row : rep.per_trial)
                    if (!row.empty()) xs.push_back(row[static_cast<std::size_t>(k)]);
                AggregateRow agg;
                agg.k = k;
                std::tie(agg.mean, agg.se) = detail::mean_se(xs);
                agg.ref_mean = 0.0;
                agg.extra = ks_statistic(xs, 0.0, 2.0 * k);  // KS vs N(0, 2k)
                rep.aggregates.push_back(agg);
            }
            break;
        }

        case StatKind::Linstat: {
            const SeriesBasis basis = cfg.mode == "fixed" ? SeriesBasis::Gamma : SeriesBasis::Phi;
            const ChebSeries series = detail::series_for(cfg.function, cfg.expansion_order, basis, cfg.d);
            const LinStatMode mode = cfg.mode == "fixed" ? LinStatMode::FixedD : LinStatMode::GrowingD;
            rep.per_trial_columns = {"trial", "raw", "centered"};
            rep.per_trial.assign(static_cast<std::size_t>(cfg.trials), {});
            const bool spectral = cfg.method == "spectral" || (cfg.method == "auto" && n <= 600);
            rep.failed_trials = detail::run_trials(cfg.trials, cfg.threads, [&](long long t) {
                auto g = sample_graph(n, cfg.d, cfg.seed, static_cast<std::uint64_t>(t));
                double raw, centered;
                if (spectral) {
                    LinStatResult res = linear_statistic(eigenvalues(g), series, mode, r);
                    raw = res.raw;
                    centered = res.centered;
                } else {
                    // exact via the trace identity: avoids a dense eigensolve
                    CountVector cnbw = count_cnbw_words(g, std::min(r, series.degree()));
                    centered = linear_statistic_from_walks(cnbw, series, mode, r);
                    raw = centered + n * series.coeffs(0);
                    if (mode == LinStatMode::GrowingD) raw += growing_centering(series, r, n, cfg.d);
                }
                rep.per_trial[static_cast<std::size_t>(t)] = {static_cast<double>(t), raw, centered};
            });
            std::vector<double> centered;
            for (const auto& row : rep.per_trial)
                if (!row.empty()) centered.push_back(row[2]);
            AggregateRow agg;
            agg.k = 0;
            std::tie(agg.mean, agg.se) = detail::mean_se(centered);
            if (cfg.mode == "fixed") {
                YfReference ref = yf_reference(cfg.d, series, series.degree(), 100000, cfg.seed ^ 0x9e3779b9ULL);
                agg.ref_mean = ref.analytic_mean;
                agg.extra = ref.analytic_variance;
            } else {
                agg.ref_mean = 0.0;
                agg.extra = sigma_f_squared(series);
            }
            agg.tv = detail::sample_variance(centered);  // reported next to extra = reference variance
            rep.aggregates.push_back(agg);
            rep.note = "aggregate row: mean/se of centered statistic; tv column holds the sample "
                       "variance, extra the reference variance";
            break;
        }

        case StatKind::Lambda2: {
            rep.per_trial_columns = {"trial", "lambda2"};
            rep.per_trial.assign(static_cast<std::size_t>(cfg.trials), {});
            rep.failed_trials = detail::run_trials(cfg.trials, cfg.threads, [&](long long t) {
                auto g = sample_graph(n, cfg.d, cfg.seed, static_cast<std::uint64_t>(t));
                rep.per_trial[static_cast<std::size_t>(t)] = {static_cast<double>(t),
                                                              second_eigenvalue(adjacency(g))};
            });
            const double bound = (36000.0 + 2400.0 * cfg.m) * std::sqrt(static_cast<double>(cfg.d));
            std::vector<double> xs;
            for (const auto& row : rep.per_trial)
                if (!row.empty()) {
                    xs.push_back(row[1]);
                    if (row[1] > bound) ++rep.assertion_violations;
                }
            AggregateRow agg;
            agg.k = 0;
            std::tie(agg.mean, agg.se) = detail::mean_se(xs);
            agg.ref_mean = bound;
            std::sort(xs.begin(), xs.end());
            agg.extra = xs[static_cast<std::size_t>(0.95 * (static_cast<double>(xs.size()) - 1))];
            rep.aggregates.push_back(agg);
            break;
        }

        case StatKind::Badwalks: {
            rep.per_trial_columns = {"trial", "any_bad"};
            rep.per_trial.assign(static_cast<std::size_t>(cfg.trials), {});
            rep.failed_trials = detail::run_trials(cfg.trials, cfg.threads, [&](long long t) {
                auto g = sample_graph(n, cfg.d, cfg.seed, static_cast<std::uint64_t>(t));
                CountVector b = bad_walks(count_cycles(g, r), count_cnbw_words(g, r));
                bool any = false;
                for (int k = 1; k <= r; ++k) any = any || b.at(k) > 0;
                rep.per_trial[static_cast<std::size_t>(t)] = {static_cast<double>(t), any ? 1.0 : 0.0};
            });
            std::vector<double> xs;
            for (const auto& row : rep.per_trial)
                if (!row.empty()) xs.push_back(row[1]);
            AggregateRow agg;
            agg.k = r;
            std::tie(agg.mean, agg.se) = detail::mean_se(xs);
            rep.aggregates.push_back(agg);
            break;
        }

        case StatKind::Coupling: {
            const int cycle_len = std::max(1, std::min<int>(r, n));
            rep.per_trial_columns = {"trial", "contains", "removed", "shape_ok"};
            rep.per_trial.assign(static_cast<std::size_t>(cfg.trials), {});
            rep.failed_trials = detail::run_trials(cfg.trials, cfg.threads, [&](long long t) {
                Xoshiro256pp rng(cfg.seed, static_cast<std::uint64_t>(t));
                auto g = sample_graph(n, cfg.d, rng);
                // random cycle: distinct vertices plus a cyclically reduced word
                TrailSpec s;
                Permutation verts = random_permutation(n, rng);
                s.vertices.assign(verts.begin(), verts.begin() + cycle_len);
                do {
                    s.word.clear();
                    for (int i = 0; i < cycle_len; ++i)
                        s.word.push_back({static_cast<int>(rng.bounded(static_cast<std::uint64_t>(cfg.d))) + 1,
                                          rng.bounded(2) == 1});
                } while (!is_cyclically_reduced(s.word));
                PermutationGraph gp = couple_conditioned(g, s);
                bool contains = contains_trail(gp, s);
                auto removed = removed_edges(g, gp);
                bool shape_ok = true;
                for (const LabeledEdge& e : removed) shape_ok = shape_ok && shares_tail_or_head(s, e);
                rep.per_trial[static_cast<std::size_t>(t)] = {static_cast<double>(t), contains ? 1.0 : 0.0,
                                                              static_cast<double>(removed.size()),
                                                              shape_ok ? 1.0 : 0.0};
            });
            AggregateRow agg;
            agg.k = cycle_len;
            std::vector<double> ok;
            for (const auto& row : rep.per_trial)
                if (!row.empty()) {
                    ok.push_back(row[1] * row[3]);
                    if (row[1] != 1.0 || row[3] != 1.0) ++rep.assertion_violations;
                }
            std::tie(agg.mean, agg.se) = detail::mean_se(ok);
            agg.ref_mean = 1.0;
            rep.aggregates.push_back(agg);
            break;
        }

        case StatKind::Discrepancy: {
            rep.per_trial_columns = {"trial", "pairs", "violations"};
            rep.per_trial.assign(static_cast<std::size_t>(cfg.trials), {});
            rep.failed_trials = detail::run_trials(cfg.trials, cfg.threads, [&](long long t) {
                Xoshiro256pp rng(cfg.seed, static_cast<std::uint64_t>(t));
                auto g = sample_graph(n, cfg.d, rng);
                // uniform random subsets at log-spaced sizes
                std::vector<std::pair<std::vector<std::int32_t>, std::vector<std::int32_t>>> ps;
                for (long long i = 0; i < cfg.pairs; ++i) {
                    auto draw_set = [&] {
                        double u = rng.uniform();
                        auto size = static_cast<int>(std::pow(static_cast<double>(n), u));
                        size = std::clamp(size, 1, n);
                        Permutation p = random_permutation(n, rng);
                        return std::vector<std::int32_t>(p.begin(), p.begin() + size);
                    };
                    ps.emplace_back(draw_set(), draw_set());
                }
                DiscrepancyReport dr = discrepancy_check(g, ps, cfg.m);
                rep.per_trial[static_cast<std::size_t>(t)] = {static_cast<double>(t),
                                                              static_cast<double>(cfg.pairs),
                                                              static_cast<double>(dr.violations)};
            });
            AggregateRow agg;
            agg.k = 0;
            std::vector<double> v;
            for (const auto& row : rep.per_trial)
                if (!row.empty()) {
                    v.push_back(row[2]);
                    rep.assertion_violations += static_cast<long long>(row[2]);
                }
            std::tie(agg.mean, agg.se) = detail::mean_se(v);
            rep.aggregates.push_back(agg);
            break;
        }
    }

    return rep;
}

inline std::string report_csv(const ExperimentReport& rep) {
    std::ostringstream os;
    os.precision(17);
    os << "# rrg experiment stat=" << to_string(rep.config.stat) << " seed=" << rep.config.seed
       << " trials=" << rep.config.trials << "\n";
    const bool counts = rep.config.stat == StatKind::Cycles || rep.config.stat == StatKind::Cnbw;
    if (counts) {
        // long format: one row per (trial, k)
        os << "trial,k,count\n";
        for (const auto& row : rep.per_trial) {
            if (row.empty()) continue;
            for (std::size_t k = 1; k < row.size(); ++k)
                os << static_cast<long long>(row[0]) << "," << k << ","
                   << static_cast<long long>(row[k]) << "\n";
        }
    } else {
        for (std::size_t i = 0; i < rep.per_trial_columns.size(); ++i)
            os << (i ? "," : "") << rep.per_trial_columns[i];
        os << "\n";
        for (const auto& row : rep.per_trial) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
            os << "\n";
        }
    }
    os << "k,mean,se,ref_mean,tv,tv_se" << (counts ? "" : ",extra") << "\n";
    for (const AggregateRow& a : rep.aggregates) {
        os << a.k << "," << a.mean << "," << a.se << "," << a.ref_mean << "," << a.tv << "," << a.tv_se;
        if (!counts) os << "," << a.extra;
        os << "\n";
    }
    return os.str();
}

inline nlohmann::json report_json(const ExperimentReport& rep) {
    nlohmann::json j;
    j["provenance"] = {{"seed", rep.config.seed}, {"config", rep.config}, {"version", "1.0"}};
    j["per_trial_columns"] = rep.per_trial_columns;
    j["per_trial"] = rep.per_trial;
    nlohmann::json aggs = nlohmann::json::array();
    for (const AggregateRow& a : rep.aggregates)
        aggs.push_back({{"k", a.k}, {"mean", a.mean}, {"se", a.se}, {"ref_mean", a.ref_mean},
                        {"tv", a.tv}, {"tv_se", a.tv_se}, {"extra", a.extra}});
    j["aggregates"] = aggs;
    j["failed_trials"] = rep.failed_trials;
    j["assertion_violations"] = rep.assertion_violations;
    if (!rep.note.empty()) j["note"] = rep.note;
    return j;
}

}  // namespace rrg
