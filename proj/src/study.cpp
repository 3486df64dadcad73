#include "socmov/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

namespace socmov {

std::string CensoringScheme::name() const {
    if (is_control()) return "control";
    std::ostringstream os;
    os << "obs" << lambda_obs << "_miss" << lambda_miss;
    return os.str();
}

void StudyGrid::validate() const {
    if (combos.empty() || schemes.empty()) throw std::invalid_argument("study grid is empty");
    if (replicates < 1) throw std::invalid_argument("replicates must be positive");
    if (individuals < 1 || steps < 3) throw std::invalid_argument("study needs J >= 1 and T >= 3");
    for (const auto& s : schemes)
        if (!(s.lambda_obs > 0) || !(s.lambda_miss > 0)) throw std::invalid_argument("censoring rates must be positive");
    ModelParams{combos.front(), sigma2, phi}.validate();
}

std::vector<GlmCoefficients> sign_pattern_combos() {
    std::vector<Eigen::VectorXd> block;
    for (double a : {-2.0, 2.0})
        for (double b : {-1.0, 1.0})
            for (double c : {-0.5, 0.5}) block.push_back(Eigen::Vector3d(a, b, c));
    std::vector<GlmCoefficients> combos;
    for (const auto& da : block)
        for (const auto& db : block)
            for (const auto& dp : block) combos.push_back({da, db, dp});
    return combos;
}

StudyGrid StudyGrid::full() {
    StudyGrid grid;
    grid.combos = sign_pattern_combos();
    for (double obs : {5.0, 10.0, 20.0})
        for (double miss : {5.0, 10.0, 20.0}) grid.schemes.push_back({obs, miss, 0.5});
    grid.replicates = 12;
    grid.phi = inv_logit(2.0);
    return grid;
}

StudyGrid StudyGrid::desk() {
    StudyGrid grid;
    const Eigen::Vector3d base(2.0, 1.0, 0.5);
    const Eigen::Vector3d flipped(-2.0, 1.0, 0.5);
    for (int mask = 0; mask < 8; ++mask)
        grid.combos.push_back({(mask & 4) ? flipped : base, (mask & 2) ? flipped : base,
                               (mask & 1) ? flipped : base});
    grid.schemes = {{5, 20, 0.5}, {10, 10, 0.5}, {20, 5, 0.5}, CensoringScheme::control()};
    grid.replicates = 4;
    grid.phi = inv_logit(2.0);
    return grid;
}

std::uint64_t derive_seed(std::uint64_t master, int combo, int replicate, int purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(combo), static_cast<std::uint32_t>(replicate),
                      static_cast<std::uint32_t>(purpose)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace {

struct UnitResult {
    std::vector<std::vector<double>> d_by_scheme;  // empty entry = failed
    std::vector<CellFailure> failures;
};

UnitResult run_unit(const StudyGrid& grid, const SamplerConfig& base, const PriorSpec& priors,
                    std::uint64_t master, int combo, int replicate) {
    UnitResult unit;
    unit.d_by_scheme.resize(grid.schemes.size());
    const std::uint64_t sim_seed = derive_seed(master, combo, replicate, 0);
    SamplerConfig config = base;
    config.seed = derive_seed(master, combo, replicate, 1);

    Eigen::VectorXd complete_medians;
    TrajectorySet trajectories;
    CovariateMatrix covariates = equal_phase_design(grid.steps);
    try {
        Rng rng(sim_seed);
        const ModelParams params{grid.combos[combo], grid.sigma2, grid.phi};
        const PositionFrame init = initial_positions(grid.individuals, grid.sigma2, rng);
        trajectories = simulate_trajectories(grid.individuals, grid.steps, params, covariates, init, rng);
        complete_medians = run_chain(as_dataset(trajectories), covariates, priors, config,
                                     LikelihoodKind::complete).medians();
    } catch (const std::exception& e) {
        for (std::size_t s = 0; s < grid.schemes.size(); ++s)
            unit.failures.push_back({{combo, static_cast<int>(s), replicate}, sim_seed,
                                     std::string("complete fit: ") + e.what()});
        return unit;
    }

    for (std::size_t s = 0; s < grid.schemes.size(); ++s) {
        const auto& scheme = grid.schemes[s];
        const std::uint64_t censor_seed = derive_seed(master, combo, replicate, 2 + static_cast<int>(s));
        try {
            Rng rng(censor_seed);
            const auto pattern = simulate_censoring(grid.individuals, grid.steps, scheme.lambda_obs,
                                                    scheme.lambda_miss, scheme.p_init_observed, rng);
            const auto data = apply_multilabeling(trajectories, pattern);
            const Eigen::VectorXd proxy = run_chain(data, covariates, priors, config).medians();
            const Eigen::VectorXd d = complete_medians - proxy;
            unit.d_by_scheme[s].assign(d.data(), d.data() + d.size());
        } catch (const std::exception& e) {
            unit.failures.push_back({{combo, static_cast<int>(s), replicate}, censor_seed, e.what()});
        }
    }
    return unit;
}

}  // namespace

StudyResult run_study(const StudyGrid& grid, const SamplerConfig& sampler, const PriorSpec& priors,
                      int workers, std::uint64_t seed) {
    grid.validate();
    sampler.validate();
    const int n_combo = static_cast<int>(grid.combos.size());
    const std::size_t n_units = static_cast<std::size_t>(n_combo) * static_cast<std::size_t>(grid.replicates);
    std::vector<UnitResult> units(n_units);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t u = next++; u < n_units; u = next++) {
            const int combo = static_cast<int>(u / static_cast<std::size_t>(grid.replicates));
            const int replicate = static_cast<int>(u % static_cast<std::size_t>(grid.replicates));
            units[u] = run_unit(grid, sampler, priors, seed, combo, replicate);
        }
    };
    const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(n_units)));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    const auto names = parameter_names(static_cast<int>(grid.combos.front().delta_alpha.size()));
    StudyResult result;
    for (int c = 0; c < n_combo; ++c)
        for (std::size_t s = 0; s < grid.schemes.size(); ++s)
            for (int r = 0; r < grid.replicates; ++r) {
                const auto& unit = units[static_cast<std::size_t>(c) * grid.replicates + r];
                const auto& d = unit.d_by_scheme[s];
                for (std::size_t k = 0; k < d.size(); ++k)
                    result.records.push_back({{c, static_cast<int>(s), r}, names[k], d[k]});
            }
    for (const auto& unit : units)
        result.failures.insert(result.failures.end(), unit.failures.begin(), unit.failures.end());
    std::sort(result.failures.begin(), result.failures.end(), [](const auto& a, const auto& b) {
        return std::tie(a.cell.combo, a.cell.scheme, a.cell.replicate) <
               std::tie(b.cell.combo, b.cell.scheme, b.cell.replicate);
    });
    return result;
}

double t_critical_value(int degrees_of_freedom) {
    if (degrees_of_freedom < 1) throw std::invalid_argument("t quantile needs at least one degree of freedom");
    const boost::math::students_t dist(static_cast<double>(degrees_of_freedom));
    return boost::math::quantile(boost::math::complement(dist, 0.025));
}

std::vector<StandardizedParameter> standardized_differences(
    const std::vector<std::string>& parameters, const std::vector<std::vector<double>>& d_by_replicate) {
    const auto reps = d_by_replicate.size();
    if (reps < 2) throw std::invalid_argument("standardized differences need at least two replicates");
    const double crit = t_critical_value(static_cast<int>(reps) - 1);
    const double root_r = std::sqrt(static_cast<double>(reps));

    std::vector<StandardizedParameter> out;
    for (std::size_t k = 0; k < parameters.size(); ++k) {
        StandardizedParameter sp;
        sp.parameter = parameters[k];
        sp.t_critical = crit;
        double sum = 0.0;
        for (const auto& row : d_by_replicate) sum += row.at(k);
        sp.mean = sum / static_cast<double>(reps);
        double ss = 0.0;
        for (const auto& row : d_by_replicate) ss += (row[k] - sp.mean) * (row[k] - sp.mean);
        const double sd = std::sqrt(ss / static_cast<double>(reps - 1));
        if (!(sd > 0.0)) {
            sp.undefined = true;
            sp.t_statistic = std::numeric_limits<double>::quiet_NaN();
            sp.standardized.assign(reps, std::numeric_limits<double>::quiet_NaN());
        } else {
            const double se = sd / root_r;
            for (const auto& row : d_by_replicate) sp.standardized.push_back((row[k] - sp.mean) / se);
            sp.t_statistic = sp.mean / se;
            sp.significant = std::abs(sp.t_statistic) > crit;
        }
        out.push_back(std::move(sp));
    }
    return out;
}

std::vector<CellSummary> summarize_study(const StudyResult& result) {
    std::map<std::pair<int, int>, std::map<int, std::vector<const BiasRecord*>>> groups;
    for (const auto& rec : result.records) groups[{rec.cell.combo, rec.cell.scheme}][rec.cell.replicate].push_back(&rec);

    std::vector<CellSummary> out;
    for (const auto& [key, by_rep] : groups) {
        if (by_rep.size() < 2) continue;
        std::vector<std::string> names;
        for (const auto* rec : by_rep.begin()->second) names.push_back(rec->parameter);
        std::vector<std::vector<double>> d;
        for (const auto& [rep, recs] : by_rep) {
            std::vector<double> row;
            for (const auto* rec : recs) row.push_back(rec->d_theta);
            d.push_back(std::move(row));
        }
        out.push_back({key.first, key.second, standardized_differences(names, d)});
    }
    return out;
}

LambdaEstimate estimate_lambdas(const MlmdDataset& data, int total_individuals) {
    const int steps = data.steps();
    if (steps == 0) throw EstimationError("no time steps");
    const double mean_labels = static_cast<double>(data.record_count()) / steps;
    if (!(mean_labels > 0.0)) throw EstimationError("no observations: mean labels per frame is 0");
    if (mean_labels >= total_individuals)
        throw EstimationError("mean labels per frame reaches the population size; missingness rate undefined");

    std::size_t completed = 0;
    double total_length = 0.0;
    for (const auto& [first, last] : data.label_runs()) {
        if (first <= 0 || last >= steps - 1) continue;
        total_length += last - first + 1;
        ++completed;
    }
    if (completed == 0) throw EstimationError("no observation run with both entry and exit observed");
    const double lambda_obs = total_length / static_cast<double>(completed);
    return {lambda_obs, lambda_obs * (total_individuals - mean_labels) / mean_labels, mean_labels, completed};
}

PhaseComparison phase_comparisons(const PosteriorSamples& samples, const CovariateMatrix& covariates) {
    if (covariates.cols() != 3) throw std::invalid_argument("phase comparisons need the before/during/after design");
    std::array<int, 3> row{-1, -1, -1};
    for (Eigen::Index t = 0; t < covariates.rows(); ++t) {
        const int phase = covariates(t, 1) != 0.0 ? 1 : (covariates(t, 2) != 0.0 ? 2 : 0);
        if (row[phase] < 0) row[phase] = static_cast<int>(t);
    }
    if (std::any_of(row.begin(), row.end(), [](int r) { return r < 0; }))
        throw std::invalid_argument("design lacks one of the before/during/after phases");

    PhaseComparison out;
    const auto n = samples.draws.rows();
    const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
    for (int block = 0; block < 3; ++block) {
        for (int c = 0; c < 3; ++c) {
            const Eigen::VectorXd early = covariates.row(row[pairs[c].first]).transpose();
            const Eigen::VectorXd late = covariates.row(row[pairs[c].second]).transpose();
            long count = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const Eigen::VectorXd delta = samples.draws.row(i).segment(3 * block, 3).transpose();
                count += glm_value(late, delta) > glm_value(early, delta);
            }
            out.probability[block][c] = n == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(n);
        }
    }
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<ParameterSummary> summarize_draws(const PosteriorSamples& samples) {
    std::vector<ParameterSummary> out;
    for (Eigen::Index c = 0; c < samples.draws.cols(); ++c) {
        std::vector<double> v(samples.draws.col(c).data(), samples.draws.col(c).data() + samples.draws.rows());
        const double mean = samples.draws.col(c).mean();
        out.push_back({samples.names[c], mean, quantile(v, 0.5), quantile(v, 0.025), quantile(v, 0.975)});
    }
    return out;
}

}  // namespace socmov
