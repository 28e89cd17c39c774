// aoimc: average age-of-information of multi-connectivity transmission
// schemes over parallel AWGN channels in the short-packet regime.
//
// Subcommands: eval, optimize, sweep, simulate, selftest. All machine output
// is CSV or JSON; see README.md for schemas and exit codes.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "aoimc/aoi.hpp"
#include "aoimc/channel.hpp"
#include "aoimc/optimize.hpp"
#include "aoimc/simulate.hpp"
#include "aoimc/sweep.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitDivergent = 3;
constexpr int kExitNoData = 4;

struct ChannelArgs {
    std::vector<double> snr;
    std::vector<double> snr_db;

    aoimc::ChannelSet make() const {
        if (!snr.empty() && !snr_db.empty())
            throw CLI::ValidationError("--snr and --snr-db are mutually exclusive");
        if (!snr_db.empty()) return aoimc::ChannelSet::from_db(snr_db);
        if (snr.empty()) throw CLI::ValidationError("one of --snr/--snr-db is required");
        return aoimc::ChannelSet(snr);
    }
};

void add_channel_options(CLI::App* cmd, ChannelArgs& args) {
    cmd->add_option("--snr", args.snr, "per-channel linear SNR, comma separated")->delimiter(',');
    cmd->add_option("--snr-db", args.snr_db, "per-channel SNR in dB, comma separated")
        ->delimiter(',');
}

json aoi_result_json(const aoimc::AoiResult& r) {
    json j;
    j["avg_aoi"] = std::isfinite(r.avg_aoi) ? json(r.avg_aoi) : json(nullptr);
    j["epsilon_used"] = r.epsilon_used.value;
    j["method"] = r.method == aoimc::AoiMethod::analytic ? "analytic" : "simulated";
    j["ci_halfwidth"] = r.ci_halfwidth;
    j["quality_flags"] = r.quality_flags;
    return j;
}

json report_json(const aoimc::OptimumReport& rep) {
    json j;
    j["scheme"] = aoimc::scheme_name(rep.scheme);
    j["best_n"] = rep.best_n;
    j["best_aoi"] = rep.best_aoi;
    if (rep.scheme == aoimc::Scheme::ms) j["best_splits"] = rep.best_splits.splits;
    if (rep.scheme == aoimc::Scheme::mp) {
        j["best_shifts"] = rep.best_shifts.shifts;
        j["shifts_exhaustive"] = rep.shifts_exhaustive;
    }
    j["boundary_minimum"] = rep.boundary_minimum;
    j["warnings"] = rep.warnings;
    json trace = json::array();
    for (const auto& p : rep.trace)
        trace.push_back({p.n, std::isfinite(p.aoi) ? json(p.aoi) : json(nullptr)});
    j["trace"] = trace;
    return j;
}

/// --output wins; otherwise $AOIMC_OUTPUT_DIR/<fallback>; otherwise stdout.
void emit(const std::string& text, const std::string& output, const std::string& fallback_name) {
    std::string path = output;
    if (path.empty()) {
        if (const char* dir = std::getenv("AOIMC_OUTPUT_DIR"); dir && *dir)
            path = std::string(dir) + "/" + fallback_name;
    }
    if (path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
    std::cerr << "wrote " << path << "\n";
}

aoimc::AoiResult evaluate(const aoimc::SchemeConfig& cfg, const aoimc::ChannelSet& channels) {
    if (cfg.scheme != aoimc::Scheme::mp) return aoimc::aoi_scheme(cfg, channels);
    const aoimc::Schedule schedule =
        cfg.shifts.empty() ? aoimc::Schedule::uniform(cfg.n, static_cast<int>(channels.size()))
                           : aoimc::Schedule(cfg.n, cfg.shifts);
    std::vector<aoimc::ErrorProbability> eps(channels.size());
    for (std::size_t i = 0; i < channels.size(); ++i)
        eps[i] = aoimc::epsilon_single(cfg.n, cfg.k, channels.snrs[i]);
    return aoimc::aoi_mp_general(schedule, eps).result;
}

int run_eval(const aoimc::SchemeConfig& cfg, const ChannelArgs& chan, bool as_json,
             bool allow_divergent) {
    const aoimc::ChannelSet channels = chan.make();
    if (cfg.scheme == aoimc::Scheme::ms) {
        long long sum = 0;
        for (int s : cfg.splits) sum += s;
        if (sum != cfg.k) throw CLI::ValidationError("--splits must sum to --k");
    }
    const aoimc::AoiResult r = evaluate(cfg, channels);
    if (as_json) {
        json j = aoi_result_json(r);
        j["scheme"] = aoimc::scheme_name(cfg.scheme);
        j["n"] = cfg.n;
        j["k"] = cfg.k;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "scheme=" << aoimc::scheme_name(cfg.scheme) << " n=" << cfg.n << " k=" << cfg.k
                  << " avg_aoi=" << aoimc::format_number(r.avg_aoi)
                  << " epsilon_used=" << aoimc::format_number(r.epsilon_used.value) << " flags=";
        if (r.quality_flags.empty()) {
            std::cout << "-";
        } else {
            for (std::size_t i = 0; i < r.quality_flags.size(); ++i)
                std::cout << (i ? "," : "") << r.quality_flags[i];
        }
        std::cout << "\n";
    }
    if (r.divergent() && !allow_divergent) return kExitDivergent;
    return 0;
}

int run_optimize(aoimc::Scheme scheme, int k, const ChannelArgs& chan, int n_min, int n_max,
                 const std::string& output) {
    const aoimc::ChannelSet channels = chan.make();
    aoimc::BlocklengthRange range = aoimc::default_blocklength_range(k, channels);
    if (n_min > 0) range.n_min = n_min;
    if (n_max > 0) range.n_max = n_max;

    aoimc::OptimumReport rep;
    if (scheme == aoimc::Scheme::ms)
        rep = aoimc::optimize_ms(k, channels, range.n_min, range.n_max, /*full_trace=*/true);
    else
        rep = aoimc::optimize_blocklength(scheme, k, channels, range.n_min, range.n_max);

    json j = report_json(rep);
    j["k"] = k;
    j["snr"] = channels.snrs;
    j["n_min"] = range.n_min;
    j["n_max"] = range.n_max;
    emit(j.dump(2) + "\n", output, std::string("optimize-") + aoimc::scheme_name(scheme) + ".json");
    for (const std::string& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

int run_sweep_cmd(aoimc::SweepSpec spec, const std::string& config_path, const std::string& format,
                  const std::string& output) {
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open config file: " + config_path);
        spec = aoimc::SweepSpec::from_json(json::parse(in));
    }
    const aoimc::SweepResult result = aoimc::run_sweep(spec);
    const std::string base = std::string("sweep-") + aoimc::sweep_kind_name(spec.kind);
    if (format == "csv")
        emit(aoimc::sweep_to_csv(result), output, base + ".csv");
    else
        emit(aoimc::sweep_to_json(result).dump(2) + "\n", output, base + ".json");
    return 0;
}

int run_simulate(const aoimc::SchemeConfig& cfg, const ChannelArgs& chan, std::int64_t horizon,
                 std::uint64_t seed, std::int64_t warmup) {
    aoimc::SimConfig sim;
    sim.scheme = cfg;
    sim.channels = chan.make();
    sim.horizon = horizon;
    sim.seed = seed;
    sim.warmup = warmup;

    const aoimc::SimResult emp = aoimc::simulate(sim);
    const aoimc::AoiResult ana = evaluate(cfg, sim.channels);
    const double tol = std::max(3.0 * emp.ci_halfwidth, 0.005 * ana.avg_aoi);
    const bool agree = std::isfinite(ana.avg_aoi) && std::abs(emp.avg_aoi - ana.avg_aoi) <= tol;

    json j;
    j["scheme"] = aoimc::scheme_name(cfg.scheme);
    j["n"] = cfg.n;
    j["k"] = cfg.k;
    j["horizon"] = horizon;
    j["seed"] = seed;
    j["empirical"] = {{"avg_aoi", emp.avg_aoi},
                      {"ci_halfwidth", emp.ci_halfwidth},
                      {"renewal_count", emp.renewal_count},
                      {"successes_per_channel", emp.successes_per_channel},
                      {"attempts_per_channel", emp.attempts_per_channel}};
    j["analytic"] = aoi_result_json(ana);
    j["verdict"] = agree ? "agree" : "disagree";
    std::cout << j.dump(2) << "\n";
    return 0;
}

bool check(bool ok, const std::string& name, int& failures) {
    std::cout << "selftest: " << name << " ... " << (ok ? "ok" : "FAIL") << "\n";
    if (!ok) ++failures;
    return ok;
}

int run_selftest() {
    using namespace aoimc;
    int failures = 0;

    bool q_sym = true;
    for (double x = -8.0; x <= 8.0; x += 0.25)
        q_sym = q_sym && std::abs(q_function(x) + q_function(-x) - 1.0) <= 1e-12;
    check(q_sym, "Q(x) + Q(-x) == 1", failures);

    bool logphi_ok = true;
    for (double x = -8.0; x <= 8.0; x += 0.25) {
        const double ref = 1.0 - q_function(x);
        logphi_ok = logphi_ok && std::abs(std::exp(log_phi(x)) - ref) <= 1e-9 * ref;
    }
    check(logphi_ok, "exp(log_phi) matches 1-Q", failures);

    const ChannelSet one({2.0});
    const double single = epsilon_single(80, 16, 2.0).value;
    check(epsilon_cs(80, 16, one).value == single && epsilon_pd(80, 16, one).value == single &&
              epsilon_ms(80, {16.0}, one).value == single,
          "N=1 reductions are exact", failures);

    bool gap_ok = true;
    for (int n_prime : {10, 100, 1000}) {
        const ErrorProbability eps = epsilon_single(n_prime, 16, 2.0);
        for (int n_ch = 1; n_ch <= 5; ++n_ch) {
            const double mp = aoi_mp_equal_snr(n_prime, n_ch, eps).avg_aoi;
            const double cs = aoi_renewal(static_cast<double>(n_prime) / n_ch, eps).avg_aoi;
            gap_ok = gap_ok && std::abs(mp - cs - mp_cs_gap(n_prime, n_ch)) <= 1e-10;
        }
    }
    check(gap_ok, "MP-CS gap identity", failures);

    bool thm_ok = true;
    for (double e : {0.05, 0.3, 0.7}) {
        for (int n_ch = 2; n_ch <= 5; ++n_ch) {
            const auto mp = aoi_mp_general(Schedule::uniform(120, n_ch),
                                           std::vector<ErrorProbability>(n_ch, ErrorProbability(e)));
            thm_ok = thm_ok &&
                     std::abs(mp.result.avg_aoi - aoi_mp_equal_snr(120, n_ch, ErrorProbability(e)).avg_aoi) <= 1e-9;
        }
    }
    check(thm_ok, "uniform schedule matches closed form", failures);

    bool eig_ok = true;
    for (double e : {0.01, 0.1, 0.5, 0.9}) {
        for (int n_ch = 2; n_ch <= 8; ++n_ch) {
            const Eigen::MatrixXd m = mp_quadratic_form(n_ch, ErrorProbability(e));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
            std::vector<double> closed = mp_eigenvalues(n_ch, ErrorProbability(e));
            std::sort(closed.begin(), closed.end());
            for (int i = 0; i < n_ch; ++i) {
                eig_ok = eig_ok && closed[i] > 0.0 &&
                         std::abs(closed[i] - es.eigenvalues()(i)) <= 1e-9;
            }
        }
    }
    check(eig_ok, "circulant eigenvalue formula", failures);

    const ChannelSet pair({2.0, 2.0});
    const SplitAllocation split = optimize_split(100, 16.0, pair);
    check(std::abs(split.splits[0] - 8.0) <= 1e-9 * 16 && std::abs(split.splits[1] - 8.0) <= 1e-9 * 16,
          "equal-SNR split is even", failures);

    std::cout << (failures == 0 ? "selftest: all checks passed\n"
                                : "selftest: " + std::to_string(failures) + " check(s) FAILED\n");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"average age of information for multi-connectivity schemes over parallel AWGN channels"};
    app.require_subcommand(1);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate the average AoI of one configuration");
    std::string eval_scheme = "sc";
    aoimc::SchemeConfig eval_cfg;
    ChannelArgs eval_chan;
    bool eval_json = false;
    bool eval_allow_divergent = false;
    eval_cmd->add_option("--scheme", eval_scheme, "sc|pd|mp|cs|ms")->required();
    eval_cmd->add_option("--n", eval_cfg.n, "blocklength / period in symbols")->required();
    eval_cmd->add_option("--k", eval_cfg.k, "message bits")->required();
    add_channel_options(eval_cmd, eval_chan);
    eval_cmd->add_option("--splits", eval_cfg.splits, "MS: per-channel bits, comma separated")
        ->delimiter(',');
    eval_cmd->add_option("--shifts", eval_cfg.shifts, "MP: per-channel offsets (default uniform)")
        ->delimiter(',');
    eval_cmd->add_flag("--json", eval_json, "emit JSON instead of one summary line");
    eval_cmd->add_flag("--allow-divergent", eval_allow_divergent,
                       "exit 0 even when the AoI diverges");

    // optimize
    auto* opt_cmd = app.add_subcommand("optimize", "optimize blocklength (and MS splits)");
    std::string opt_scheme = "sc";
    int opt_k = 16;
    int opt_n_min = -1;
    int opt_n_max = -1;
    std::string opt_output;
    ChannelArgs opt_chan;
    opt_cmd->add_option("--scheme", opt_scheme, "sc|pd|mp|cs|ms")->required();
    opt_cmd->add_option("--k", opt_k, "message bits")->required();
    add_channel_options(opt_cmd, opt_chan);
    opt_cmd->add_option("--n-min", opt_n_min, "search range lower end (default: capacity bound)");
    opt_cmd->add_option("--n-max", opt_n_max, "search range upper end (default: 50*k)");
    opt_cmd->add_option("-o,--output", opt_output, "output file (default: $AOIMC_OUTPUT_DIR or stdout)");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "grid experiments, CSV/JSON tables");
    aoimc::SweepSpec sweep_spec;
    std::string sweep_kind = "equal-snr";
    std::string sweep_config;
    std::string sweep_format = "csv";
    std::string sweep_output;
    sweep_cmd->add_option("--kind", sweep_kind,
                          "equal-snr|two-channel-heterogeneity|three-channel-split");
    sweep_cmd->add_option("--k", sweep_spec.k, "message bits");
    sweep_cmd->add_option("--channels", sweep_spec.num_channels, "equal-snr: N values")
        ->delimiter(',');
    sweep_cmd->add_option("--gammas", sweep_spec.gammas, "equal-snr: SNR grid")->delimiter(',');
    sweep_cmd->add_option("--sum-snr", sweep_spec.sum_snr, "heterogeneity: gamma0+gamma1");
    sweep_cmd->add_option("--gamma0-start", sweep_spec.gamma0_start, "heterogeneity grid start");
    sweep_cmd->add_option("--gamma0-stop", sweep_spec.gamma0_stop, "heterogeneity grid stop");
    sweep_cmd->add_option("--gamma0-step", sweep_spec.gamma0_step, "heterogeneity grid step");
    sweep_cmd->add_option("--gamma2", sweep_spec.gamma2, "three-channel: fixed third SNR");
    sweep_cmd->add_option("--n-min", sweep_spec.n_min, "override blocklength range lower end");
    sweep_cmd->add_option("--n-max", sweep_spec.n_max, "override blocklength range upper end");
    sweep_cmd->add_option("--config", sweep_config, "JSON sweep spec (overrides flags)");
    sweep_cmd->add_option("--format", sweep_format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    sweep_cmd->add_option("-o,--output", sweep_output,
                          "output file (default: $AOIMC_OUTPUT_DIR or stdout)");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo run vs the analytic value");
    std::string sim_scheme = "sc";
    aoimc::SchemeConfig sim_cfg;
    ChannelArgs sim_chan;
    std::int64_t sim_horizon = 10'000'000;
    std::uint64_t sim_seed = 1;
    std::int64_t sim_warmup = -1;
    sim_cmd->add_option("--scheme", sim_scheme, "sc|pd|mp|cs|ms")->required();
    sim_cmd->add_option("--n", sim_cfg.n, "blocklength / period in symbols")->required();
    sim_cmd->add_option("--k", sim_cfg.k, "message bits")->required();
    add_channel_options(sim_cmd, sim_chan);
    sim_cmd->add_option("--splits", sim_cfg.splits, "MS: per-channel bits")->delimiter(',');
    sim_cmd->add_option("--shifts", sim_cfg.shifts, "MP: per-channel offsets")->delimiter(',');
    sim_cmd->add_option("--horizon", sim_horizon, "simulated symbols (default 1e7)");
    sim_cmd->add_option("--seed", sim_seed, "PRNG master seed");
    sim_cmd->add_option("--warmup", sim_warmup, "symbols before measurement (default 10*n)");

    // selftest
    app.add_subcommand("selftest", "quick invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (eval_cmd->parsed()) {
            eval_cfg.scheme = aoimc::parse_scheme(eval_scheme);
            return run_eval(eval_cfg, eval_chan, eval_json, eval_allow_divergent);
        }
        if (opt_cmd->parsed())
            return run_optimize(aoimc::parse_scheme(opt_scheme), opt_k, opt_chan, opt_n_min,
                                opt_n_max, opt_output);
        if (sweep_cmd->parsed()) {
            sweep_spec.kind = aoimc::parse_sweep_kind(sweep_kind);
            return run_sweep_cmd(sweep_spec, sweep_config, sweep_format, sweep_output);
        }
        if (sim_cmd->parsed()) {
            sim_cfg.scheme = aoimc::parse_scheme(sim_scheme);
            return run_simulate(sim_cfg, sim_chan, sim_horizon, sim_seed, sim_warmup);
        }
        return run_selftest();
    } catch (const aoimc::NoDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoData;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
