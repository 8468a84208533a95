// rrg: sample 2d-regular permutation-model graphs and measure their walk,
// cycle and spectral statistics against the limiting reference laws.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rrg/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAssertion = 3;
constexpr int kExitPartialFailure = 4;

void emit(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw rrg::ConfigError("cannot open output file: " + out);
    f << text;
}

nlohmann::json graph_json(const rrg::PermutationGraph& g) {
    return {{"n", g.n}, {"d", g.d}, {"perms", g.perms}};
}

int finish_report(const rrg::ExperimentReport& rep, const std::string& out, const std::string& format) {
    if (format == "json")
        emit(out, report_json(rep).dump(2) + "\n");
    else
        emit(out, report_csv(rep));
    if (rep.assertion_violations > 0) return kExitAssertion;
    if (100 * rep.failed_trials > rep.config.trials) return kExitPartialFailure;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random 2d-regular graph statistics (permutation model)"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    int threads = 1;
    std::string out;
    std::string format = "csv";
    app.add_option("--seed", seed, "master seed")->capture_default_str();
    app.add_option("--threads", threads, "worker threads")->capture_default_str();
    app.add_option("--out", out, "output path (default stdout)");
    app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

    // adk
    auto* adk = app.add_subcommand("adk", "count cyclically reduced words a(d,k)");
    int adk_d = 2, adk_k = 3;
    std::string adk_method = "closed";
    bool adk_table = false;
    adk->add_option("--d", adk_d)->required();
    adk->add_option("--k", adk_k)->required();
    adk->add_option("--method", adk_method)->check(CLI::IsMember({"closed", "ie", "enum"}));
    adk->add_flag("--table", adk_table, "emit CSV d,k,a over 1..d x 1..k");

    // sample
    auto* sample = app.add_subcommand("sample", "sample a graph and emit its JSON");
    int s_n = 100, s_d = 2;
    sample->add_option("--n", s_n)->required();
    sample->add_option("--d", s_d)->required();

    // cycles / cnbw
    auto* cycles = app.add_subcommand("cycles", "cycle counts C_1..C_r of one sample");
    auto* cnbw = app.add_subcommand("cnbw", "CNBW counts of one sample");
    int w_n = 100, w_d = 2, w_r = 4;
    std::string cnbw_method = "words";
    for (auto* cmd : {cycles, cnbw}) {
        cmd->add_option("--n", w_n)->required();
        cmd->add_option("--d", w_d)->required();
        cmd->add_option("--r", w_r)->required();
    }
    cnbw->add_option("--method", cnbw_method)->check(CLI::IsMember({"words", "transfer", "spectral"}));

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the scaled adjacency");
    int sp_n = 100, sp_d = 2;
    std::string sp_emit;
    spectrum->add_option("--n", sp_n)->required();
    spectrum->add_option("--d", sp_d)->required();
    spectrum->add_option("--emit", sp_emit, "write eigenvalues CSV here");

    // linstat
    auto* linstat = app.add_subcommand("linstat", "linear eigenvalue statistic of one sample");
    int ls_n = 100, ls_d = 2, ls_k = 8;
    std::string ls_f = "square", ls_mode = "fixed";
    double ls_beta = -1.0;
    linstat->add_option("--n", ls_n)->required();
    linstat->add_option("--d", ls_d)->required();
    linstat->add_option("--f", ls_f, "square | exp | cheb:k");
    linstat->add_option("--K", ls_k, "expansion order");
    linstat->add_option("--mode", ls_mode)->check(CLI::IsMember({"fixed", "growing"}));
    linstat->add_option("--beta", ls_beta, "use r_n rule instead of r = K");

    // experiment
    auto* exp = app.add_subcommand("experiment", "seeded multi-trial experiment");
    rrg::ExperimentConfig cfg;
    std::string config_path, exp_stat = "cycles";
    exp->add_option("--config", config_path, "JSON config; explicit flags win");
    auto* o_stat = exp->add_option("--stat", exp_stat,
                                   "cycles|cnbw|ntilde|linstat|lambda2|badwalks|coupling|discrepancy");
    auto* o_n = exp->add_option("--n", cfg.n);
    auto* o_d = exp->add_option("--d", cfg.d);
    auto* o_r = exp->add_option("--r", cfg.r);
    auto* o_beta = exp->add_option("--beta", cfg.beta);
    auto* o_trials = exp->add_option("--trials", cfg.trials);
    auto* o_f = exp->add_option("--f", cfg.function);
    auto* o_k = exp->add_option("--K", cfg.expansion_order);
    auto* o_mode = exp->add_option("--mode", cfg.mode);
    auto* o_method = exp->add_option("--method", cfg.method);
    auto* o_m = exp->add_option("--m", cfg.m);
    auto* o_pairs = exp->add_option("--pairs", cfg.pairs);

    // coupling-check / discrepancy: thin fronts over the experiment runner
    auto* coupling = app.add_subcommand("coupling-check", "audit the size-biased coupling");
    int cc_n = 60, cc_d = 2, cc_len = 3;
    long long cc_trials = 200;
    coupling->add_option("--n", cc_n)->required();
    coupling->add_option("--d", cc_d)->required();
    coupling->add_option("--len", cc_len, "cycle length");
    coupling->add_option("--trials", cc_trials);

    auto* disc = app.add_subcommand("discrepancy", "audit the edge-discrepancy property");
    int dc_n = 500, dc_d = 3;
    long long dc_pairs = 1000;
    double dc_m = 1.0;
    disc->add_option("--n", dc_n)->required();
    disc->add_option("--d", dc_d)->required();
    disc->add_option("--pairs", dc_pairs);
    disc->add_option("--m", dc_m);

    // let --seed/--threads/--out/--format appear after the subcommand name
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);

        if (*adk) {
            std::ostringstream os;
            auto value = [&](int d, int k) -> rrg::BigInt {
                if (adk_method == "closed") return rrg::a_closed_form(d, k);
                if (adk_method == "ie") return rrg::a_inclusion_exclusion(d, k);
                return rrg::BigInt(rrg::enumerate_cyclically_reduced(d, k).size());
            };
            if (adk_table) {
                os << "d,k,a\n";
                for (int d = 1; d <= adk_d; ++d)
                    for (int k = 1; k <= adk_k; ++k) os << d << "," << k << "," << value(d, k) << "\n";
            } else {
                os << value(adk_d, adk_k) << "\n";
            }
            emit(out, os.str());
            return kExitOk;
        }

        if (*sample) {
            auto g = rrg::sample_graph(s_n, s_d, seed);
            emit(out, graph_json(g).dump(2) + "\n");
            return kExitOk;
        }

        if (*cycles || *cnbw) {
            auto g = rrg::sample_graph(w_n, w_d, seed);
            rrg::CountVector cv = *cycles ? rrg::count_cycles(g, w_r)
                                          : rrg::detail::cnbw_by_method(g, w_r, cnbw_method);
            std::ostringstream os;
            os << "k,value\n";
            for (int k = 1; k <= w_r; ++k) os << k << "," << cv.at(k) << "\n";
            emit(out, os.str());
            return kExitOk;
        }

        if (*spectrum) {
            auto g = rrg::sample_graph(sp_n, sp_d, seed);
            Eigen::MatrixXi A = rrg::adjacency(g);
            rrg::Spectrum s = rrg::eigenvalues(A, g.d);
            if (!sp_emit.empty()) {
                std::ostringstream os;
                os.precision(17);
                os << "i,lambda\n";
                for (int i = 0; i < s.n; ++i) os << i + 1 << "," << s.values(i) << "\n";
                emit(sp_emit, os.str());
            }
            nlohmann::json j{{"n", s.n},
                             {"d", s.d},
                             {"lambda1_scaled", s.values(0)},
                             {"lambda2_unscaled", rrg::second_eigenvalue(A)}};
            emit(out, j.dump(2) + "\n");
            return kExitOk;
        }

        if (*linstat) {
            using rrg::SeriesBasis;
            SeriesBasis basis = ls_mode == "fixed" ? SeriesBasis::Gamma : SeriesBasis::Phi;
            rrg::ChebSeries series = rrg::detail::series_for(ls_f, ls_k, basis, ls_d);
            int r = ls_beta > 0 ? rrg::rn_rule(ls_n, ls_d, ls_beta) : series.degree();
            auto g = rrg::sample_graph(ls_n, ls_d, seed);
            rrg::LinStatResult res = rrg::linear_statistic(
                rrg::eigenvalues(g), series,
                ls_mode == "fixed" ? rrg::LinStatMode::FixedD : rrg::LinStatMode::GrowingD, r);
            rrg::CountVector walk_counts = rrg::count_cnbw_transfer(g, std::min(r, series.degree()));
            nlohmann::json contrib = nlohmann::json::array();
            for (int k = 1; k <= walk_counts.r(); ++k)
                contrib.push_back(series.coeffs(k) * std::pow(2.0 * ls_d - 1.0, -0.5 * k) *
                                  static_cast<double>(walk_counts.at(k)));
            nlohmann::json j{{"raw", res.raw}, {"centered", res.centered},
                             {"per_k_contributions", contrib}};
            emit(out, j.dump(2) + "\n");
            return kExitOk;
        }

        if (*exp) {
            if (!config_path.empty()) {
                std::ifstream f(config_path);
                if (!f) throw rrg::ConfigError("cannot read config: " + config_path);
                nlohmann::json j = nlohmann::json::parse(f);
                rrg::ExperimentConfig from_file = cfg;
                from_json(j, from_file);
                // flags win over the file
                if (!*o_n) cfg.n = from_file.n;
                if (!*o_d) cfg.d = from_file.d;
                if (!*o_r) cfg.r = from_file.r;
                if (!*o_beta) cfg.beta = from_file.beta;
                if (!*o_trials) cfg.trials = from_file.trials;
                if (!*o_f) cfg.function = from_file.function;
                if (!*o_k) cfg.expansion_order = from_file.expansion_order;
                if (!*o_mode) cfg.mode = from_file.mode;
                if (!*o_method) cfg.method = from_file.method;
                if (!*o_m) cfg.m = from_file.m;
                if (!*o_pairs) cfg.pairs = from_file.pairs;
                if (!*o_stat) exp_stat = to_string(from_file.stat);
            }
            cfg.stat = rrg::stat_from_string(exp_stat);
            cfg.seed = seed;
            cfg.threads = threads;
            cfg.out = out;
            cfg.format = format;
            if (cfg.r <= 0 && cfg.beta <= 0) cfg.r = 2;  // modest default depth
            rrg::ExperimentReport rep = rrg::run_experiment(cfg);
            return finish_report(rep, out, format);
        }

        if (*coupling) {
            rrg::ExperimentConfig c;
            c.stat = rrg::StatKind::Coupling;
            c.n = cc_n;
            c.d = cc_d;
            c.r = cc_len;
            c.trials = cc_trials;
            c.seed = seed;
            c.threads = threads;
            return finish_report(rrg::run_experiment(c), out, format);
        }

        if (*disc) {
            rrg::ExperimentConfig c;
            c.stat = rrg::StatKind::Discrepancy;
            c.n = dc_n;
            c.d = dc_d;
            c.r = 1;
            c.m = dc_m;
            c.pairs = dc_pairs;
            c.seed = seed;
            c.threads = threads;
            return finish_report(rrg::run_experiment(c), out, format);
        }

        return kExitOk;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const rrg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const rrg::BudgetError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const rrg::EnumerationBudgetError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const rrg::TraceIdentityError& e) {
        std::cerr << "assertion failure: " << e.what() << "\n";
        return kExitAssertion;
    } catch (const std::logic_error& e) {
        std::cerr << "assertion failure: " << e.what() << "\n";
        return kExitAssertion;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
