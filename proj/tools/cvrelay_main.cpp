#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "cvrelay/attack.hpp"
#include "cvrelay/io.hpp"
#include "cvrelay/parallel.hpp"
#include "cvrelay/rate.hpp"
#include "cvrelay/sim.hpp"
#include "cvrelay/threshold.hpp"

namespace {

using namespace cvrelay;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct OutputOptions {
    std::string format = "csv";
    std::string out_path;
    std::string config_path;
    CLI::Option* format_opt = nullptr;
};

void add_output_options(CLI::App* cmd, OutputOptions& out) {
    out.format_opt =
        cmd->add_option("--format", out.format, "Output format: csv (default) or json");
    cmd->add_option("--out", out.out_path, "Write output to FILE instead of stdout");
    cmd->add_option("--config", out.config_path,
                    "key=value defaults file ('#' comments); explicit flags win");
}

void write_output(const Table& table, const OutputOptions& out) {
    const OutputFormat format = parse_format(out.format);
    if (out.out_path.empty()) {
        emit_table(std::cout, table, format);
        std::cout.flush();
        if (!std::cout) throw std::ios_base::failure("error writing to stdout");
        return;
    }
    std::ofstream file(out.out_path);
    if (!file) throw std::ios_base::failure("cannot open output file '" + out.out_path + "'");
    emit_table(file, table, format);
    file.flush();
    if (!file) throw std::ios_base::failure("error writing output file '" + out.out_path + "'");
}

// Which channel flags a subcommand exposes. Grid-shaped flags accept
// start:stop:step as well as single values.
struct FlagSet {
    bool grids = false;
    bool omega = true;
    bool attack = true;
    bool overrides = true;
    bool beta = true;
    bool mu = true;
};

struct ChannelOptions {
    std::string tau_text;
    std::string distance_text;
    std::string omega_text = "1";
    std::string attack_name = "collective";
    double g = 0.0;
    double gp = 0.0;
    double eta = 1.0;
    double etap = std::numeric_limits<double>::quiet_NaN();
    double beta = 1.0;
    std::string mu_text;

    CLI::Option* tau_opt = nullptr;
    CLI::Option* distance_opt = nullptr;
    CLI::Option* omega_opt = nullptr;
    CLI::Option* attack_opt = nullptr;
    CLI::Option* g_opt = nullptr;
    CLI::Option* gp_opt = nullptr;
    CLI::Option* eta_opt = nullptr;
    CLI::Option* etap_opt = nullptr;
    CLI::Option* beta_opt = nullptr;
    CLI::Option* mu_opt = nullptr;
};

void add_channel_options(CLI::App* cmd, ChannelOptions& ch, const FlagSet& flags) {
    const char* grid_hint = flags.grids ? " (single value or start:stop:step)" : "";
    ch.tau_opt = cmd->add_option("--tau", ch.tau_text,
                                 std::string("Link transmissivity in (0, 1]") + grid_hint);
    ch.distance_opt =
        cmd->add_option("--distance", ch.distance_text,
                        std::string("Link distance in km at 0.2 dB/km, alternative to --tau") +
                            grid_hint);
    ch.tau_opt->excludes(ch.distance_opt);
    ch.distance_opt->excludes(ch.tau_opt);
    if (flags.omega) {
        ch.omega_opt = cmd->add_option(
            "--omega", ch.omega_text, std::string("Eve ancilla variance, >= 1") + grid_hint);
    }
    if (flags.attack) {
        ch.attack_opt = cmd->add_option(
            "--attack", ch.attack_name,
            "Attack name: collective, sep-plus, sep-minus, sep-qcorr, sep-pcorr, "
            "epr-positive, epr-negative");
    }
    if (flags.overrides) {
        ch.g_opt = cmd->add_option("--g", ch.g, "Override the q-quadrature correlation g");
        ch.gp_opt = cmd->add_option("--gp", ch.gp, "Override the p-quadrature correlation g'");
    }
    ch.eta_opt = cmd->add_option("--eta", ch.eta, "Alice-side detector efficiency in (0, 1]");
    ch.etap_opt =
        cmd->add_option("--etap", ch.etap, "Bob-side detector efficiency; defaults to --eta");
    if (flags.beta) {
        ch.beta_opt = cmd->add_option("--beta", ch.beta, "Reconciliation efficiency in (0, 1]");
    }
    if (flags.mu) {
        ch.mu_opt = cmd->add_option(
            "--mu", ch.mu_text,
            std::string("Modulation variance, > 1; asymptotic mode when omitted") + grid_hint);
    }
}

double config_double(const std::string& value, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("value for '" + key + "' is not a number: '" + value + "'");
    }
    if (used != value.size())
        throw std::invalid_argument("value for '" + key + "' is not a number: '" + value + "'");
    return v;
}

long long config_integer(const std::string& value, const std::string& key) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("value for '" + key + "' is not an integer: '" + value + "'");
    }
    if (used != value.size())
        throw std::invalid_argument("value for '" + key + "' is not an integer: '" + value + "'");
    return v;
}

// A recognized config key: `opt` is the command-line flag that overrides it
// (null when the key does not apply to the active subcommand) and `set`
// injects the file value.
struct ConfigTarget {
    CLI::Option* opt = nullptr;
    std::function<void(const std::string&)> set;
};

using ConfigTargets = std::map<std::string, ConfigTarget>;

ConfigTargets config_targets(ChannelOptions& ch, OutputOptions& out) {
    ConfigTargets t;
    t["beta"] = {ch.beta_opt, [&ch](const std::string& v) { ch.beta = config_double(v, "beta"); }};
    t["eta"] = {ch.eta_opt, [&ch](const std::string& v) { ch.eta = config_double(v, "eta"); }};
    t["etap"] = {ch.etap_opt, [&ch](const std::string& v) { ch.etap = config_double(v, "etap"); }};
    t["mu"] = {ch.mu_opt, [&ch](const std::string& v) { ch.mu_text = v; }};
    t["format"] = {out.format_opt, [&out](const std::string& v) { out.format = v; }};
    t["omega_max"];
    t["scan_points"];
    t["seed"];
    t["rounds"];
    return t;
}

void apply_config(const OutputOptions& out, const ConfigTargets& targets) {
    if (out.config_path.empty()) return;
    const auto entries = load_config_file(out.config_path);
    for (const auto& [key, entry] : entries) {
        const auto it = targets.find(key);
        if (it == targets.end())
            throw std::invalid_argument(out.config_path + ":" + std::to_string(entry.line) +
                                        ": unknown key '" + key + "'");
        const ConfigTarget& target = it->second;
        if (target.opt == nullptr || !target.set) continue;
        if (target.opt->count() > 0) continue;
        try {
            target.set(entry.value);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(out.config_path + ":" + std::to_string(entry.line) + ": " +
                                        e.what());
        }
    }
}

// Transmissivity axis from --tau or --distance; `fallback` supplies the
// default grid text when neither flag is present, null makes one mandatory.
std::vector<double> resolve_tau_axis(const ChannelOptions& ch, const char* fallback) {
    if (ch.tau_opt->count() > 0) return parse_grid(ch.tau_text);
    if (ch.distance_opt->count() > 0) {
        std::vector<double> taus;
        for (double d : parse_grid(ch.distance_text)) {
            if (d < 0.0) throw std::invalid_argument("--distance must be >= 0");
            taus.push_back(tau_from_distance(d));
        }
        return taus;
    }
    if (fallback != nullptr) return parse_grid(fallback);
    throw std::invalid_argument("either --tau or --distance is required");
}

std::vector<std::optional<double>> resolve_mu_axis(const ChannelOptions& ch) {
    if (ch.mu_opt == nullptr || ch.mu_text.empty()) return {std::nullopt};
    std::vector<std::optional<double>> mus;
    for (double m : parse_grid(ch.mu_text)) mus.emplace_back(m);
    return mus;
}

double single_value(const std::vector<double>& grid, const char* flag, const char* cmd) {
    if (grid.size() != 1)
        throw std::invalid_argument(std::string(flag) + " takes a single value for " + cmd +
                                    "; use sweep for grids");
    return grid.front();
}

std::optional<double> single_mu(const std::vector<std::optional<double>>& mus, const char* cmd) {
    if (mus.size() != 1)
        throw std::invalid_argument(std::string("--mu takes a single value for ") + cmd +
                                    "; use sweep for grids");
    return mus.front();
}

double resolved_etap(const ChannelOptions& ch) {
    return std::isnan(ch.etap) ? ch.eta : ch.etap;
}

AttackParams make_params(const ChannelOptions& ch, double tau, double omega) {
    AttackParams p;
    p.tau = tau;
    p.omega = omega;
    auto [g, gp] = named_attack(attack_kind_from_name(ch.attack_name), omega);
    if (ch.g_opt != nullptr && ch.g_opt->count() > 0) g = ch.g;
    if (ch.gp_opt != nullptr && ch.gp_opt->count() > 0) gp = ch.gp;
    p.g = g;
    p.gp = gp;
    p.eta = ch.eta;
    p.etap = resolved_etap(ch);
    check_params(p);
    return p;
}

RateConfig make_rate_config(const ChannelOptions& ch, std::optional<double> mu) {
    RateConfig cfg;
    cfg.mu = mu;
    cfg.beta = ch.beta;
    check_config(cfg);
    return cfg;
}

const std::vector<std::string> kRateColumns = {"tau",  "omega",    "g",    "gp",  "eta",
                                               "etap", "beta",     "mu",   "lambda",
                                               "lambda_p", "i_ab", "i_e", "rate"};

void add_rate_row(Table& table, const AttackParams& p, const RateConfig& cfg,
                  const RateBreakdown& b) {
    table.add_row(p.tau, p.omega, p.g, p.gp, p.eta, p.etap, cfg.beta,
                  cfg.mu.has_value() ? *cfg.mu : kInf, b.noise.lambda, b.noise.lambda_p, b.i_ab,
                  b.i_e, b.rate);
}

void run_rate(const ChannelOptions& ch, const OutputOptions& out) {
    const double tau = single_value(resolve_tau_axis(ch, nullptr), "--tau/--distance", "rate");
    const double omega = single_value(parse_grid(ch.omega_text), "--omega", "rate");
    const AttackParams p = make_params(ch, tau, omega);
    const RateConfig cfg = make_rate_config(ch, single_mu(resolve_mu_axis(ch), "rate"));
    const RateBreakdown b = key_rate(p, cfg);
    Table table;
    table.columns = kRateColumns;
    add_rate_row(table, p, cfg, b);
    write_output(table, out);
}

void run_sweep(const ChannelOptions& ch, const OutputOptions& out) {
    const std::vector<double> taus = resolve_tau_axis(ch, nullptr);
    const std::vector<double> omegas = parse_grid(ch.omega_text);
    const std::vector<std::optional<double>> mus = resolve_mu_axis(ch);

    struct Point {
        AttackParams params;
        RateConfig cfg;
        RateBreakdown breakdown;
    };
    std::vector<Point> points;
    points.reserve(taus.size() * omegas.size() * mus.size());
    for (double tau : taus)
        for (double omega : omegas)
            for (const auto& mu : mus) {
                Point pt;
                pt.params = make_params(ch, tau, omega);
                pt.cfg = make_rate_config(ch, mu);
                points.push_back(pt);
            }
    parallel_for_indexed(points.size(), [&points](std::size_t i) {
        points[i].breakdown = key_rate(points[i].params, points[i].cfg);
    });

    Table table;
    table.columns = kRateColumns;
    for (const Point& pt : points) add_rate_row(table, pt.params, pt.cfg, pt.breakdown);
    write_output(table, out);
}

void run_threshold(const ChannelOptions& ch, const OutputOptions& out, double omega_max,
                   int scan_points) {
    const std::vector<double> taus = resolve_tau_axis(ch, nullptr);
    const AttackKind kind = attack_kind_from_name(ch.attack_name);
    const RateConfig cfg = make_rate_config(ch, single_mu(resolve_mu_axis(ch), "threshold"));
    const std::vector<ThresholdPoint> curve = threshold_curve(
        kind, cfg, taus, ch.eta, resolved_etap(ch), omega_max, scan_points);

    Table table;
    table.columns = {"tau", "d_km", "omega_root", "sign_below", "sign_above"};
    for (const ThresholdPoint& point : curve) {
        if (point.roots.empty()) {
            table.add_row(point.tau, point.distance_km, std::numeric_limits<double>::quiet_NaN(),
                          static_cast<long long>(point.constant_sign),
                          static_cast<long long>(point.constant_sign));
            continue;
        }
        for (const ThresholdRoot& root : point.roots)
            table.add_row(point.tau, point.distance_km, root.omega,
                          static_cast<long long>(root.sign_below),
                          static_cast<long long>(root.sign_above));
    }
    write_output(table, out);
}

void run_plane(const ChannelOptions& ch, const OutputOptions& out, int resolution) {
    const double tau = single_value(resolve_tau_axis(ch, "0.9"), "--tau/--distance", "plane");
    const double omega = single_value(parse_grid(ch.omega_text), "--omega", "plane");
    const RateConfig cfg = make_rate_config(ch, single_mu(resolve_mu_axis(ch), "plane"));
    const double eta = ch.eta;
    const double etap = resolved_etap(ch);

    const std::vector<PlaneCell> cells = classify_plane(omega, resolution);
    std::vector<double> rates(cells.size(), std::numeric_limits<double>::quiet_NaN());
    parallel_for_indexed(cells.size(), [&](std::size_t i) {
        if (cells[i].cls == AttackClass::nonphysical) return;
        AttackParams p;
        p.tau = tau;
        p.omega = omega;
        p.g = cells[i].g;
        p.gp = cells[i].gp;
        p.eta = eta;
        p.etap = etap;
        rates[i] = key_rate(p, cfg).rate;
    });

    Table table;
    table.columns = {"g", "gp", "class", "rate"};
    for (std::size_t i = 0; i < cells.size(); ++i)
        table.add_row(cells[i].g, cells[i].gp, std::string(attack_class_name(cells[i].cls)),
                      rates[i]);
    write_output(table, out);
}

void run_simulate(const ChannelOptions& ch, const OutputOptions& out, std::uint64_t rounds,
                  std::uint64_t seed, const std::string& dump_path) {
    SimConfig cfg;
    cfg.params = make_params(
        ch, single_value(resolve_tau_axis(ch, nullptr), "--tau/--distance", "simulate"),
        single_value(parse_grid(ch.omega_text), "--omega", "simulate"));
    const std::optional<double> mu = single_mu(resolve_mu_axis(ch), "simulate");
    if (!mu.has_value() || !(*mu > 1.0))
        throw std::invalid_argument("simulate requires a finite --mu > 1");
    cfg.mu = *mu;
    cfg.rounds = rounds;
    cfg.seed = seed;

    std::ofstream dump_file;
    std::ostream* dump = nullptr;
    if (!dump_path.empty()) {
        dump_file.open(dump_path);
        if (!dump_file) throw std::ios_base::failure("cannot open dump file '" + dump_path + "'");
        dump = &dump_file;
    }
    const SampleBatch batch = simulate(cfg, dump);
    if (dump != nullptr) {
        dump_file.flush();
        if (!dump_file)
            throw std::ios_base::failure("error writing dump file '" + dump_path + "'");
    }

    const double n = static_cast<double>(batch.rounds);
    const double var_se_scale = std::sqrt(2.0 / (n - 1.0));
    const auto record_cov = analytic_record_covariance(cfg);
    const CovarianceMatrix post = post_relay_cm(cfg.mu, cfg.params);
    const ConditionalCmEstimate cond = empirical_conditional_cm(batch);
    const MutualInformationEstimate mi = empirical_mutual_information(batch);
    const CorrelationEstimate corr = relay_difference_correlation(batch);

    RateConfig rate_cfg;
    rate_cfg.mu = cfg.mu;

    Table table;
    table.columns = {"quantity", "estimate", "se", "analytic", "z"};
    const auto add = [&table](const std::string& quantity, double estimate, double se,
                              double analytic) {
        table.add_row(quantity, estimate, se, analytic, (estimate - analytic) / se);
    };

    static const char* kRecordNames[kRecordChannels] = {"alpha_q", "alpha_p", "beta_q",
                                                        "beta_p",  "gamma_q", "gamma_p"};
    for (int i = 0; i < kRecordChannels; ++i) {
        const double est = batch.covariance(i, i);
        add(std::string("var_") + kRecordNames[i], est, est * var_se_scale,
            record_cov[static_cast<std::size_t>(i) * kRecordChannels + i]);
    }
    static const char* kInternalNames[kInternalChannels] = {"relay_qa", "relay_pa", "relay_qb",
                                                            "relay_pb"};
    const double relay_var =
        cfg.params.tau * cfg.mu + (1.0 - cfg.params.tau) * cfg.params.omega;
    for (int i = 0; i < kInternalChannels; ++i) {
        const double est = batch.internal_variance[static_cast<std::size_t>(i)];
        add(std::string("var_") + kInternalNames[i], est, est * var_se_scale, relay_var);
    }
    static const char* kModeNames[4] = {"qa", "pa", "qb", "pb"};
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            const double analytic = 0.5 * (post.at(i, j) + (i == j ? 1.0 : 0.0));
            add(std::string("cond_") + kModeNames[i] + "_" + kModeNames[j], cond.at(i, j),
                cond.stderr_at(i, j), analytic);
        }

    const auto corr_from_cov = [&record_cov](int gi, int ai, int bi, double sign_b) {
        const auto entry = [&record_cov](int i, int j) {
            return record_cov[static_cast<std::size_t>(i) * kRecordChannels + j];
        };
        const double var_comb =
            entry(ai, ai) + entry(bi, bi) + 2.0 * sign_b * entry(ai, bi);
        const double cov = entry(gi, ai) + sign_b * entry(gi, bi);
        return cov / std::sqrt(entry(gi, gi) * var_comb);
    };
    const double r0_q = corr_from_cov(4, 0, 2, -1.0);
    const double r0_p = corr_from_cov(5, 1, 3, 1.0);
    const double se_q = (1.0 - corr.corr_q * corr.corr_q) * corr.fisher_se;
    const double se_p = (1.0 - corr.corr_p * corr.corr_p) * corr.fisher_se;
    add("corr_gamma_diff_q", corr.corr_q, se_q, r0_q);
    add("corr_gamma_sum_p", corr.corr_p, se_p, r0_p);

    add("mi_ab_given_gamma", mi.ab_given_gamma, mi.ab_se,
        mutual_information(cfg.params, rate_cfg));
    add("mi_alpha_gamma", mi.alpha_gamma, mi.alpha_gamma_se,
        gaussian_pair_mi(record_cov, 0, 1, 4, 5));

    write_output(table, out);
}

void run_optimal_mu(const ChannelOptions& ch, const OutputOptions& out,
                    const std::string& mu_grid_text, bool full_grid) {
    const double tau =
        single_value(resolve_tau_axis(ch, nullptr), "--tau/--distance", "optimal-mu");
    const double omega = single_value(parse_grid(ch.omega_text), "--omega", "optimal-mu");
    const AttackKind kind = attack_kind_from_name(ch.attack_name);
    const std::vector<double> mu_grid = parse_grid(mu_grid_text);
    const OptimalModulation result =
        optimal_modulation(tau, omega, kind, ch.beta, ch.eta, resolved_etap(ch), mu_grid);

    Table table;
    if (full_grid) {
        table.columns = {"mu", "rate"};
        for (std::size_t i = 0; i < mu_grid.size(); ++i)
            table.add_row(mu_grid[i], result.rates[i]);
    } else {
        table.columns = {"mu_star", "rate_star", "all_negative"};
        table.add_row(result.mu_star, result.rate_star,
                      static_cast<long long>(result.all_negative ? 1 : 0));
    }
    write_output(table, out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Secret-key rates, attack analysis, security thresholds and Monte Carlo simulation "
        "for a symmetric untrusted-relay continuous-variable QKD protocol"};
    app.require_subcommand(1);

    ChannelOptions rate_ch;
    OutputOptions rate_out;
    CLI::App* rate_cmd = app.add_subcommand("rate", "Key-rate breakdown at a single point");
    add_channel_options(rate_cmd, rate_ch, FlagSet{});
    add_output_options(rate_cmd, rate_out);
    rate_cmd->callback([&] {
        apply_config(rate_out, config_targets(rate_ch, rate_out));
        run_rate(rate_ch, rate_out);
    });

    ChannelOptions sweep_ch;
    OutputOptions sweep_out;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Key rates over tau/omega/mu grids (tau outermost)");
    {
        FlagSet flags;
        flags.grids = true;
        add_channel_options(sweep_cmd, sweep_ch, flags);
    }
    add_output_options(sweep_cmd, sweep_out);
    sweep_cmd->callback([&] {
        apply_config(sweep_out, config_targets(sweep_ch, sweep_out));
        run_sweep(sweep_ch, sweep_out);
    });

    ChannelOptions thr_ch;
    OutputOptions thr_out;
    double thr_omega_max = 10.0;
    int thr_scan_points = 400;
    CLI::App* thr_cmd = app.add_subcommand(
        "threshold", "Security-threshold roots of R(omega) over a transmissivity grid");
    {
        FlagSet flags;
        flags.grids = true;
        flags.omega = false;
        flags.overrides = false;
        add_channel_options(thr_cmd, thr_ch, flags);
    }
    CLI::Option* omega_max_opt =
        thr_cmd->add_option("--omega-max", thr_omega_max, "Upper end of the omega scan");
    CLI::Option* scan_points_opt = thr_cmd->add_option("--scan-points", thr_scan_points,
                                                       "Coarse samples before bisection");
    add_output_options(thr_cmd, thr_out);
    thr_cmd->callback([&] {
        ConfigTargets targets = config_targets(thr_ch, thr_out);
        targets["omega_max"] = {omega_max_opt, [&](const std::string& v) {
                                    thr_omega_max = config_double(v, "omega_max");
                                }};
        targets["scan_points"] = {scan_points_opt, [&](const std::string& v) {
                                      thr_scan_points =
                                          static_cast<int>(config_integer(v, "scan_points"));
                                  }};
        apply_config(thr_out, targets);
        run_threshold(thr_ch, thr_out, thr_omega_max, thr_scan_points);
    });

    ChannelOptions plane_ch;
    OutputOptions plane_out;
    int plane_resolution = 201;
    CLI::App* plane_cmd = app.add_subcommand(
        "plane", "Classify the (g, g') correlation plane and rate each physical point");
    {
        FlagSet flags;
        flags.attack = false;
        flags.overrides = false;
        add_channel_options(plane_cmd, plane_ch, flags);
        plane_ch.omega_opt->required();
    }
    plane_cmd->add_option("--grid", plane_resolution, "Nodes per axis on [-omega, omega]");
    add_output_options(plane_cmd, plane_out);
    plane_cmd->callback([&] {
        apply_config(plane_out, config_targets(plane_ch, plane_out));
        run_plane(plane_ch, plane_out, plane_resolution);
    });

    ChannelOptions sim_ch;
    OutputOptions sim_out;
    std::uint64_t sim_rounds = 1000000;
    std::uint64_t sim_seed = 1;
    std::string sim_dump;
    CLI::App* sim_cmd = app.add_subcommand(
        "simulate", "Monte Carlo protocol run compared against the analytic model");
    {
        FlagSet flags;
        flags.beta = false;
        add_channel_options(sim_cmd, sim_ch, flags);
        sim_ch.mu_text = "100";
    }
    CLI::Option* rounds_opt =
        sim_cmd->add_option("--rounds", sim_rounds, "Protocol rounds, at least 1e4");
    CLI::Option* seed_opt = sim_cmd->add_option("--seed", sim_seed, "RNG seed");
    sim_cmd->add_option("--dump", sim_dump, "Write per-round records to FILE as CSV");
    add_output_options(sim_cmd, sim_out);
    sim_cmd->callback([&] {
        ConfigTargets targets = config_targets(sim_ch, sim_out);
        targets["rounds"] = {rounds_opt, [&](const std::string& v) {
                                 sim_rounds =
                                     static_cast<std::uint64_t>(config_integer(v, "rounds"));
                             }};
        targets["seed"] = {seed_opt, [&](const std::string& v) {
                               sim_seed = static_cast<std::uint64_t>(config_integer(v, "seed"));
                           }};
        apply_config(sim_out, targets);
        run_simulate(sim_ch, sim_out, sim_rounds, sim_seed, sim_dump);
    });

    ChannelOptions opt_ch;
    OutputOptions opt_out;
    std::string opt_mu_grid = "10:1000:10";
    bool opt_full_grid = false;
    CLI::App* opt_cmd = app.add_subcommand(
        "optimal-mu", "Modulation variance maximizing the finite-mu rate");
    {
        FlagSet flags;
        flags.mu = false;
        flags.overrides = false;
        add_channel_options(opt_cmd, opt_ch, flags);
    }
    opt_cmd->add_option("--mu-grid", opt_mu_grid, "Ascending mu grid start:stop:step");
    opt_cmd->add_flag("--full-grid", opt_full_grid, "Emit the whole mu, rate table");
    add_output_options(opt_cmd, opt_out);
    opt_cmd->callback([&] {
        apply_config(opt_out, config_targets(opt_ch, opt_out));
        run_optimal_mu(opt_ch, opt_out, opt_mu_grid, opt_full_grid);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: " << e.what() << "\n"
                  << "Run with --help for usage.\n";
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
