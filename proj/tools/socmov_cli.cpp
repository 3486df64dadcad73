// socmov: simulate, censor, fit, study and summarize from the command line.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "socmov/diagnostics.hpp"
#include "socmov/io.hpp"
#include "socmov/study.hpp"

#ifndef SOCMOV_VERSION
#define SOCMOV_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace socmov;

namespace {

constexpr const char* kTimeConvention =
    "transition into step t uses the network, alpha and beta at step t-1; the proxy restricts that "
    "network to labels observed at both t-1 and t";

/// Bad flags, unreadable or inconsistent configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    json cfg;
    try {
        cfg = json::parse(read_file(path));
    } catch (const std::exception& e) {
        throw ConfigError("cannot load config " + path + ": " + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config " + path + " must be a JSON object");
    return cfg;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
T value_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

json section(const json& cfg, const std::string& key) {
    return cfg.contains(key) ? cfg.at(key) : json::object();
}

std::uint64_t resolve_seed(const Options& opt, const json& cfg) {
    if (opt.seed) return *opt.seed;
    return value_or<std::uint64_t>(cfg, "seed", 1);
}

/// Phase boundaries are 1-based steps where "during" and "after" begin.
struct Phases {
    int during_start = 0;
    int after_start = 0;
};

Phases default_phases(int steps) { return {steps / 3 + 1, 2 * steps / 3 + 1}; }

Phases resolve_phases(const json& cfg, const std::string& flag, int steps) {
    Phases p = default_phases(steps);
    if (cfg.contains("phases")) {
        const auto& ph = cfg.at("phases");
        check_keys(ph, {"during_start", "after_start"}, "phases");
        p.during_start = value_or(ph, "during_start", p.during_start);
        p.after_start = value_or(ph, "after_start", p.after_start);
    }
    if (!flag.empty()) {
        const auto comma = flag.find(',');
        try {
            if (comma == std::string::npos) throw std::invalid_argument(flag);
            p.during_start = std::stoi(flag.substr(0, comma));
            p.after_start = std::stoi(flag.substr(comma + 1));
        } catch (const std::exception&) {
            throw ConfigError("--phases expects DURING,AFTER, got '" + flag + "'");
        }
    }
    if (!(1 <= p.during_start && p.during_start < p.after_start && p.after_start <= steps))
        throw ConfigError("phase boundaries must satisfy 1 <= during_start < after_start <= T (T=" +
                          std::to_string(steps) + ")");
    return p;
}

CovariateMatrix design_for(const Phases& p, int steps) {
    return phase_design(steps, p.during_start - 1, p.after_start - 1);
}

json phases_json(const Phases& p) { return {{"during_start", p.during_start}, {"after_start", p.after_start}}; }

Eigen::VectorXd vector_of(const json& obj, const std::string& key, const Eigen::VectorXd& fallback) {
    if (!obj.contains(key)) return fallback;
    const auto v = value_or<std::vector<double>>(obj, key, {});
    if (v.size() != 3) throw ConfigError("config key '" + key + "' must list 3 coefficients");
    return Eigen::Map<const Eigen::VectorXd>(v.data(), 3);
}

std::vector<double> std_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

json params_json(const ModelParams& p) {
    return {{"delta_alpha", std_vector(p.coefficients.delta_alpha)},
            {"delta_beta", std_vector(p.coefficients.delta_beta)},
            {"delta_p", std_vector(p.coefficients.delta_p)},
            {"sigma2", p.sigma2},
            {"phi", p.phi}};
}

SamplerConfig resolve_sampler(const json& cfg, std::optional<int> iterations, std::optional<int> burn_in,
                              std::optional<int> thin) {
    SamplerConfig s;
    const json sec = section(cfg, "sampler");
    check_keys(sec, {"iterations", "burn_in", "thin", "adapt", "coefficient_step", "log_sigma2_step",
                     "logit_phi_step"},
               "sampler");
    s.iterations = iterations.value_or(value_or(sec, "iterations", s.iterations));
    s.burn_in = burn_in.value_or(value_or(sec, "burn_in", s.burn_in));
    s.thin = thin.value_or(value_or(sec, "thin", s.thin));
    s.adapt = value_or(sec, "adapt", s.adapt);
    s.coefficient_step = value_or(sec, "coefficient_step", s.coefficient_step);
    s.log_sigma2_step = value_or(sec, "log_sigma2_step", s.log_sigma2_step);
    s.logit_phi_step = value_or(sec, "logit_phi_step", s.logit_phi_step);
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("sampler: ") + e.what());
    }
    return s;
}

json sampler_json(const SamplerConfig& s) {
    return {{"iterations", s.iterations},         {"burn_in", s.burn_in},
            {"thin", s.thin},                     {"adapt", s.adapt},
            {"coefficient_step", s.coefficient_step}, {"log_sigma2_step", s.log_sigma2_step},
            {"logit_phi_step", s.logit_phi_step}};
}

PriorSpec resolve_priors(const json& cfg) {
    PriorSpec p;
    const json sec = section(cfg, "priors");
    check_keys(sec, {"coefficient_sd", "sigma_scale"}, "priors");
    p.coefficient_sd = value_or(sec, "coefficient_sd", p.coefficient_sd);
    if (sec.contains("sigma_scale") && !sec.at("sigma_scale").is_null())
        p.sigma_scale = value_or(sec, "sigma_scale", 0.0);
    if (!(p.coefficient_sd > 0) || (p.sigma_scale && !(*p.sigma_scale > 0)))
        throw ConfigError("prior scales must be positive");
    return p;
}

json priors_json(const PriorSpec& p) {
    return {{"coefficient_sd", p.coefficient_sd},
            {"sigma_scale", p.sigma_scale ? json(*p.sigma_scale) : json(nullptr)}};
}

/// JSON has no NaN; missing values become null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json manifest(const std::string& command, std::uint64_t seed, json config, double seconds_per_step) {
    return {{"format_version", kFormatVersion},
            {"software", {{"name", "socmov"}, {"version", SOCMOV_VERSION}}},
            {"command", command},
            {"seed", seed},
            {"config", std::move(config)},
            {"time_convention", kTimeConvention},
            {"wall_clock", {{"seconds_per_step", seconds_per_step}}}};
}

fs::path prepare_out(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw std::runtime_error("cannot create output directory " + out);
    return fs::path(out);
}

void write_json(const fs::path& path, const json& doc) { write_file_atomic(path, doc.dump(2) + "\n"); }

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += (c == '\n' || c == '\r') ? ' ' : c;
    }
    return out + '"';
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
    std::optional<int> individuals, steps;
    std::string phases;
};

int cmd_simulate(const Options& opt, const SimulateArgs& args) {
    const json cfg = load_config(opt.config_path);
    check_keys(cfg, {"seed", "individuals", "steps", "params", "phases", "seconds_per_step"}, "config");
    const std::uint64_t seed = resolve_seed(opt, cfg);
    const int individuals = args.individuals.value_or(value_or(cfg, "individuals", 5));
    const int steps = args.steps.value_or(value_or(cfg, "steps", 300));
    if (individuals < 1 || steps < 2) throw ConfigError("simulate needs individuals >= 1 and steps >= 2");
    const Phases phases = resolve_phases(cfg, args.phases, steps);
    const double seconds = value_or(cfg, "seconds_per_step", 1.0);

    const json pj = section(cfg, "params");
    check_keys(pj, {"delta_alpha", "delta_beta", "delta_p", "sigma2", "phi"}, "params");
    const Eigen::Vector3d base(2.0, 1.0, 0.5);
    ModelParams params{{vector_of(pj, "delta_alpha", base), vector_of(pj, "delta_beta", base),
                        vector_of(pj, "delta_p", base)},
                       value_or(pj, "sigma2", 1.0),
                       value_or(pj, "phi", inv_logit(2.0))};
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }

    const fs::path out = prepare_out(opt.out);
    const CovariateMatrix x = design_for(phases, steps);
    Rng rng(seed);
    const PositionFrame init = initial_positions(individuals, params.sigma2, rng);
    const TrajectorySet traj = simulate_trajectories(individuals, steps, params, x, init, rng);
    const MlmdDataset data = as_dataset(traj);

    write_file_atomic(out / "trajectories.csv", trajectory_csv(data));
    write_file_atomic(out / "network.csv", network_csv(traj.network, data.label_names));
    json m = manifest("simulate", seed,
                      {{"individuals", individuals}, {"steps", steps}, {"phases", phases_json(phases)}}, seconds);
    m["true_parameters"] = params_json(params);
    m["outputs"] = {"trajectories.csv", "network.csv"};
    write_json(out / "manifest.json", m);
    std::cout << "simulated " << individuals << " individuals over " << steps << " steps into " << out.string() << "\n";
    return 0;
}

// censor --------------------------------------------------------------------

struct CensorArgs {
    std::string input;
    std::optional<double> lambda_obs, lambda_miss, p_init;
};

int cmd_censor(const Options& opt, const CensorArgs& args) {
    const json cfg = load_config(opt.config_path);
    check_keys(cfg, {"seed", "censoring", "seconds_per_step"}, "config");
    const std::uint64_t seed = resolve_seed(opt, cfg);
    const json cj = section(cfg, "censoring");
    check_keys(cj, {"lambda_obs", "lambda_miss", "p_init_observed"}, "censoring");
    const double lo = args.lambda_obs.value_or(value_or(cj, "lambda_obs", 10.0));
    const double lm = args.lambda_miss.value_or(value_or(cj, "lambda_miss", 10.0));
    const double p0 = args.p_init.value_or(value_or(cj, "p_init_observed", 0.5));
    if (!(lo > 0) || !(lm > 0) || !(p0 >= 0 && p0 <= 1))
        throw ConfigError("censoring needs positive rates and p_init_observed in [0,1]");
    const double seconds = value_or(cfg, "seconds_per_step", 1.0);

    const MlmdDataset complete = parse_trajectory_csv(read_file(args.input));
    if (!complete.uncensored())
        throw std::runtime_error("censor expects complete trajectories (every label at every step)");
    TrajectorySet traj;
    traj.positions = frames_of(complete);

    const fs::path out = prepare_out(opt.out);
    Rng rng(seed);
    const auto pattern = simulate_censoring(traj.individuals(), traj.steps(), lo, lm, p0, rng);
    const MlmdDataset data = apply_multilabeling(traj, pattern);

    write_file_atomic(out / "trajectories.csv", trajectory_csv(data));
    write_file_atomic(out / "label_map.csv", label_map_csv(data, complete.label_names));
    json m = manifest("censor", seed,
                      {{"input", args.input},
                       {"censoring",
                        {{"lambda_obs", number_or_null(lo)}, {"lambda_miss", number_or_null(lm)}, {"p_init_observed", p0}}}},
                      seconds);
    m["observed_fraction"] = pattern.observed_fraction();
    m["labels"] = data.label_count();
    m["outputs"] = {"trajectories.csv", "label_map.csv"};
    write_json(out / "manifest.json", m);
    std::cout << "kept " << data.record_count() << " of " << complete.record_count() << " rows with "
              << data.label_count() << " labels\n";
    return 0;
}

// fit -----------------------------------------------------------------------

struct FitArgs {
    std::string input;
    std::string phases;
    std::string likelihood;
    std::optional<int> iterations, burn_in, thin;
};

int cmd_fit(const Options& opt, const FitArgs& args) {
    const json cfg = load_config(opt.config_path);
    check_keys(cfg, {"seed", "phases", "sampler", "priors", "likelihood", "seconds_per_step"}, "config");
    SamplerConfig sampler = resolve_sampler(cfg, args.iterations, args.burn_in, args.thin);
    sampler.seed = resolve_seed(opt, cfg);
    const PriorSpec priors = resolve_priors(cfg);
    const double seconds = value_or(cfg, "seconds_per_step", 1.0);
    std::string requested = args.likelihood.empty() ? value_or<std::string>(cfg, "likelihood", "auto") : args.likelihood;
    if (requested != "auto" && requested != "proxy" && requested != "complete")
        throw ConfigError("likelihood must be auto, proxy or complete");

    const MlmdDataset data = parse_trajectory_csv(read_file(args.input));
    const Phases phases = resolve_phases(cfg, args.phases, data.steps());
    const CovariateMatrix x = design_for(phases, data.steps());
    LikelihoodKind kind = data.uncensored() ? LikelihoodKind::complete : LikelihoodKind::proxy;
    if (requested == "proxy") kind = LikelihoodKind::proxy;
    if (requested == "complete") {
        if (!data.uncensored()) throw ConfigError("the complete likelihood needs uncensored input");
        kind = LikelihoodKind::complete;
    }

    const fs::path out = prepare_out(opt.out);
    Sampler chain(data, x, priors, sampler, kind);
    const int every = std::max(1, sampler.iterations / 10);
    const auto samples = chain.run([&](int iter) {
        if (iter % every == 0 || iter == sampler.iterations)
            std::cerr << "fit: iteration " << iter << "/" << sampler.iterations << "\n";
    });

    json params = json::object();
    for (const auto& s : summarize_draws(samples)) {
        const auto k = samples.column(s.name);
        params[s.name] = {{"median", s.median},
                          {"mean", s.mean},
                          {"lower_95", s.lower},
                          {"upper_95", s.upper},
                          {"acceptance", samples.acceptance[k]},
                          {"proposal_scale", samples.proposal_scales[k]}};
    }
    const auto pc = phase_comparisons(samples, x);
    json table = json::object();
    const char* rows[] = {"alpha", "beta", "p1"};
    for (int r = 0; r < 3; ++r)
        table[rows[r]] = {pc.probability[r][0], pc.probability[r][1], pc.probability[r][2]};
    const auto curve = mean_degree_curve(samples);
    json curve_json = json::array();
    std::string curve_csv = "t,density\n";
    for (std::size_t t = 0; t < curve.size(); ++t) {
        curve_json.push_back(number_or_null(curve[t]));
        curve_csv += std::to_string(t + 1) + ',' + (std::isfinite(curve[t]) ? format_double(curve[t]) : "NA") + '\n';
    }
    const json summary = {{"likelihood", to_string(kind)},
                          {"retained_draws", samples.draws.rows()},
                          {"parameters", params},
                          {"phase_comparisons",
                           {{"columns", {"before<during", "before<after", "during<after"}}, {"rows", table}}},
                          {"mean_degree_curve", curve_json}};

    write_file_atomic(out / "chain.csv", chain_csv(samples));
    write_file_atomic(out / "mean_degree.csv", curve_csv);
    write_json(out / "summary.json", summary);
    json m = manifest("fit", sampler.seed,
                      {{"input", args.input},
                       {"phases", phases_json(phases)},
                       {"sampler", sampler_json(sampler)},
                       {"priors", priors_json(priors)},
                       {"likelihood_requested", requested}},
                      seconds);
    m["likelihood"] = to_string(kind);
    m["sigma_prior_scale"] = samples.sigma_prior_scale;
    m["outputs"] = {"chain.csv", "summary.json", "mean_degree.csv"};
    write_json(out / "manifest.json", m);
    std::cout << "fit (" << to_string(kind) << " likelihood) wrote " << samples.draws.rows() << " draws to "
              << out.string() << "\n";
    return 0;
}

// study ---------------------------------------------------------------------

struct StudyArgs {
    std::string preset;
    int workers = 1;
    std::optional<int> replicates, iterations, burn_in;
};

StudyGrid resolve_grid(const json& cfg, const StudyArgs& args, std::string& preset) {
    const json sj = section(cfg, "study");
    check_keys(sj, {"replicates", "individuals", "steps", "sigma2", "phi", "schemes", "include_control"}, "study");
    preset = !args.preset.empty() ? args.preset : value_or<std::string>(cfg, "preset", "desk");
    StudyGrid grid;
    if (preset == "desk") grid = StudyGrid::desk();
    else if (preset == "paper") grid = StudyGrid::full();
    else throw ConfigError("preset must be desk or paper");

    grid.replicates = args.replicates.value_or(value_or(sj, "replicates", grid.replicates));
    grid.individuals = value_or(sj, "individuals", grid.individuals);
    grid.steps = value_or(sj, "steps", grid.steps);
    grid.sigma2 = value_or(sj, "sigma2", grid.sigma2);
    grid.phi = value_or(sj, "phi", grid.phi);
    if (sj.contains("schemes")) {
        grid.schemes.clear();
        for (const auto& s : sj.at("schemes")) {
            check_keys(s, {"lambda_obs", "lambda_miss", "p_init_observed"}, "study.schemes[]");
            grid.schemes.push_back({value_or(s, "lambda_obs", 10.0), value_or(s, "lambda_miss", 10.0),
                                    value_or(s, "p_init_observed", 0.5)});
        }
    }
    const bool has_control = std::any_of(grid.schemes.begin(), grid.schemes.end(), [](const auto& s) { return s.is_control(); });
    if (value_or(sj, "include_control", true) && !has_control) grid.schemes.push_back(CensoringScheme::control());
    if (grid.replicates < 2) throw ConfigError("a study needs at least two replicates per cell");
    try {
        grid.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("study: ") + e.what());
    }
    return grid;
}

int cmd_study(const Options& opt, const StudyArgs& args) {
    const json cfg = load_config(opt.config_path);
    check_keys(cfg, {"seed", "preset", "study", "sampler", "priors", "seconds_per_step"}, "config");
    const std::uint64_t seed = resolve_seed(opt, cfg);
    std::string preset;
    const StudyGrid grid = resolve_grid(cfg, args, preset);
    const SamplerConfig sampler = resolve_sampler(cfg, args.iterations, args.burn_in, std::nullopt);
    const PriorSpec priors = resolve_priors(cfg);
    const double seconds = value_or(cfg, "seconds_per_step", 1.0);
    if (args.workers < 1) throw ConfigError("--workers must be at least 1");

    const fs::path out = prepare_out(opt.out);
    std::cerr << "study: " << grid.combos.size() << " combos x " << grid.schemes.size() << " schemes x "
              << grid.replicates << " replicates on " << args.workers << " worker(s)\n";
    const StudyResult result = run_study(grid, sampler, priors, args.workers, seed);
    const auto cells = summarize_study(result);

    std::string combos = "combo,block,k1,k2,k3\n";
    const char* blocks[] = {"delta_alpha", "delta_beta", "delta_p"};
    for (std::size_t c = 0; c < grid.combos.size(); ++c) {
        const Eigen::VectorXd* v[] = {&grid.combos[c].delta_alpha, &grid.combos[c].delta_beta, &grid.combos[c].delta_p};
        for (int b = 0; b < 3; ++b)
            combos += std::to_string(c) + ',' + blocks[b] + ',' + format_double((*v[b])(0)) + ',' +
                      format_double((*v[b])(1)) + ',' + format_double((*v[b])(2)) + '\n';
    }

    std::string records = "combo,scheme,scheme_name,replicate,parameter,d_theta\n";
    for (const auto& r : result.records)
        records += std::to_string(r.cell.combo) + ',' + std::to_string(r.cell.scheme) + ',' +
                   grid.schemes[r.cell.scheme].name() + ',' + std::to_string(r.cell.replicate) + ',' + r.parameter +
                   ',' + format_double(r.d_theta) + '\n';

    std::string failures = "combo,scheme,replicate,seed,message\n";
    for (const auto& f : result.failures)
        failures += std::to_string(f.cell.combo) + ',' + std::to_string(f.cell.scheme) + ',' +
                    std::to_string(f.cell.replicate) + ',' + std::to_string(f.seed) + ',' + csv_quote(f.message) + '\n';

    // Plot data: one block (file) per censoring scheme.
    const fs::path plot_dir = out / "plot_data";
    fs::create_directories(plot_dir);
    std::vector<std::string> plot(grid.schemes.size(),
                                  "combo,parameter,replicate,standardized,t_statistic,t_critical,significant,undefined\n");
    json per_scheme = json::array();
    std::vector<std::size_t> cell_count(grid.schemes.size(), 0), flagged_cells(grid.schemes.size(), 0);
    for (const auto& cell : cells) {
        bool any = false;
        for (const auto& p : cell.parameters) {
            any = any || p.significant;
            for (std::size_t r = 0; r < p.standardized.size(); ++r)
                plot[cell.scheme] += std::to_string(cell.combo) + ',' + p.parameter + ',' + std::to_string(r) + ',' +
                                     (p.undefined ? "NA" : format_double(p.standardized[r])) + ',' +
                                     (p.undefined ? "NA" : format_double(p.t_statistic)) + ',' +
                                     format_double(p.t_critical) + ',' + (p.significant ? "1" : "0") + ',' +
                                     (p.undefined ? "1" : "0") + '\n';
        }
        ++cell_count[cell.scheme];
        flagged_cells[cell.scheme] += any;
    }
    json plot_files = json::array();
    for (std::size_t s = 0; s < grid.schemes.size(); ++s) {
        const std::string name = "plot_data/" + grid.schemes[s].name() + ".csv";
        write_file_atomic(out / name, plot[s]);
        plot_files.push_back(name);
        per_scheme.push_back({{"scheme", grid.schemes[s].name()},
                              {"cells", cell_count[s]},
                              {"cells_with_significant_parameters", flagged_cells[s]}});
    }

    write_file_atomic(out / "combos.csv", combos);
    write_file_atomic(out / "bias_records.csv", records);
    write_file_atomic(out / "failures.csv", failures);
    json schemes = json::array();
    for (const auto& s : grid.schemes)
        schemes.push_back({{"name", s.name()},
                           {"lambda_obs", number_or_null(s.lambda_obs)},
                           {"lambda_miss", s.lambda_miss},
                           {"p_init_observed", s.p_init_observed}});
    json m = manifest("study", seed,
                      {{"preset", preset},
                       {"combos", grid.combos.size()},
                       {"schemes", schemes},
                       {"replicates", grid.replicates},
                       {"individuals", grid.individuals},
                       {"steps", grid.steps},
                       {"sigma2", grid.sigma2},
                       {"phi", grid.phi},
                       {"sampler", sampler_json(sampler)},
                       {"priors", priors_json(priors)}},
                      seconds);
    m["likelihood"] = "complete fit versus proxy fit per censoring scheme";
    m["t_critical"] = t_critical_value(grid.replicates - 1);
    m["significance_by_scheme"] = per_scheme;
    m["failures"] = result.failures.size();
    m["outputs"] = {"combos.csv", "bias_records.csv", "failures.csv"};
    for (const auto& f : plot_files) m["outputs"].push_back(f);
    write_json(out / "manifest.json", m);
    std::cout << "study wrote " << result.records.size() << " records (" << result.failures.size()
              << " failed cells) to " << out.string() << "\n";
    return 0;
}

// summarize -----------------------------------------------------------------

int cmd_summarize(const Options& opt, const std::vector<std::string>& inputs) {
    const json cfg = load_config(opt.config_path);
    check_keys(cfg, {"seconds_per_step"}, "config");
    std::vector<ChainTable> tables;
    for (const auto& path : inputs) tables.push_back(parse_chain_csv(read_file(path)));
    for (std::size_t k = 1; k < tables.size(); ++k) {
        if (tables[k].names != tables[0].names)
            throw std::runtime_error("chain " + inputs[k] + " has different columns from " + inputs[0]);
        if (tables[k].draws.rows() != tables[0].draws.rows())
            throw std::runtime_error("chain " + inputs[k] + " has a different number of draws from " + inputs[0]);
    }

    json params = json::object();
    for (std::size_t c = 0; c < tables[0].names.size(); ++c) {
        const auto col = static_cast<Eigen::Index>(c);
        std::vector<Eigen::VectorXd> chains;
        std::vector<double> pooled;
        for (const auto& t : tables) {
            chains.emplace_back(t.draws.col(col));
            pooled.insert(pooled.end(), t.draws.col(col).data(), t.draws.col(col).data() + t.draws.rows());
        }
        const double rhat = split_rhat(chains);
        const double ess = effective_sample_size(chains);
        params[tables[0].names[c]] = {{"median", quantile(pooled, 0.5)},
                                      {"lower_95", quantile(pooled, 0.025)},
                                      {"upper_95", quantile(pooled, 0.975)},
                                      {"rhat", number_or_null(rhat)},
                                      {"rhat_undefined", !std::isfinite(rhat)},
                                      {"ess", number_or_null(ess)}};
    }
    const fs::path out = prepare_out(opt.out);
    write_json(out / "summary.json",
               {{"chains", tables.size()}, {"draws_per_chain", tables[0].draws.rows()}, {"parameters", params}});
    json m = manifest("summarize", 0, {{"inputs", inputs}}, value_or(cfg, "seconds_per_step", 1.0));
    m.erase("seed");
    m["outputs"] = {"summary.json"};
    write_json(out / "manifest.json", m);
    std::cout << "summarized " << tables.size() << " chain(s) into " << out.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Social-movement model: simulation, censoring, MCMC fitting and simulation studies"};
    app.require_subcommand(1);
    Options opt;
    auto add_common = [&](CLI::App* cmd, bool seeded) {
        cmd->add_option("--config", opt.config_path, "JSON configuration file")->check(CLI::ExistingFile);
        cmd->add_option("--out", opt.out, "output directory")->capture_default_str();
        if (seeded) cmd->add_option("--seed", opt.seed, "random seed (overrides the config)");
    };

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "simulate complete trajectories and the latent network");
    add_common(simulate, true);
    simulate->add_option("--individuals", sim.individuals, "number of individuals J");
    simulate->add_option("--steps", sim.steps, "number of time steps T");
    simulate->add_option("--phases", sim.phases, "1-based steps where during and after begin, e.g. 101,201");

    CensorArgs cen;
    auto* censor = app.add_subcommand("censor", "censor complete trajectories and relabel re-entries");
    add_common(censor, true);
    censor->add_option("--input", cen.input, "complete trajectory file")->required()->check(CLI::ExistingFile);
    censor->add_option("--lambda-obs", cen.lambda_obs, "mean observed run length");
    censor->add_option("--lambda-miss", cen.lambda_miss, "mean missing run length");
    censor->add_option("--p-init", cen.p_init, "probability of being observed at the first step");

    FitArgs fit;
    auto* fitcmd = app.add_subcommand("fit", "fit the model by MCMC");
    add_common(fitcmd, true);
    fitcmd->add_option("--input", fit.input, "trajectory file")->required()->check(CLI::ExistingFile);
    fitcmd->add_option("--phases", fit.phases, "1-based steps where during and after begin, e.g. 101,201");
    fitcmd->add_option("--likelihood", fit.likelihood, "auto, proxy or complete");
    fitcmd->add_option("--iterations", fit.iterations, "MCMC sweeps");
    fitcmd->add_option("--burn-in", fit.burn_in, "sweeps discarded (and used for adaptation)");
    fitcmd->add_option("--thin", fit.thin, "keep every k-th sweep after burn-in");

    StudyArgs st;
    auto* study = app.add_subcommand("study", "run the complete-versus-proxy simulation study");
    add_common(study, true);
    study->add_option("--preset", st.preset, "desk grid or the full 512-combination grid (paper)")->check(CLI::IsMember({"desk", "paper"}));
    study->add_option("--workers", st.workers, "parallel workers")->capture_default_str();
    study->add_option("--replicates", st.replicates, "replicates per cell");
    study->add_option("--iterations", st.iterations, "MCMC sweeps per fit");
    study->add_option("--burn-in", st.burn_in, "burn-in sweeps per fit");

    std::vector<std::string> chain_files;
    auto* summarize = app.add_subcommand("summarize", "posterior summaries and convergence diagnostics of chain files");
    add_common(summarize, false);
    summarize->add_option("chains", chain_files, "chain files")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*simulate) return cmd_simulate(opt, sim);
        if (*censor) return cmd_censor(opt, cen);
        if (*fitcmd) return cmd_fit(opt, fit);
        if (*study) return cmd_study(opt, st);
        if (*summarize) return cmd_summarize(opt, chain_files);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
