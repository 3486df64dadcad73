#include "socmov/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Cholesky>

namespace socmov {

PositionFrame initial_positions(int individuals, double sigma2, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double radius = 5.0 * std::sqrt(sigma2);
    PositionFrame init(individuals, 2);
    for (int i = 0; i < individuals; ++i) {
        const double r = radius * std::sqrt(unif(rng));
        const double angle = 2.0 * std::numbers::pi * unif(rng);
        init(i, 0) = r * std::cos(angle);
        init(i, 1) = r * std::sin(angle);
    }
    return init;
}

TrajectorySet simulate_trajectories(int individuals, int steps, const ModelParams& params,
                                    const CovariateMatrix& covariates, const PositionFrame& init,
                                    Rng& rng) {
    params.validate();
    if (steps < 2) throw std::invalid_argument("trajectories need at least two steps");
    if (init.rows() != individuals || !init.allFinite())
        throw std::invalid_argument("initial frame must be finite with one row per individual");
    if (covariates.cols() != params.covariate_count())
        throw std::invalid_argument("covariate columns must match coefficient length");

    TrajectorySet out;
    out.params = params;
    out.covariates = covariates;
    out.network = simulate_network(individuals, steps, covariates, params.coefficients.delta_p,
                                   params.phi, rng);
    out.positions.reserve(static_cast<std::size_t>(steps));
    out.positions.push_back(init);

    std::normal_distribution<double> normal(0.0, 1.0);
    const double sigma = std::sqrt(params.sigma2);
    PositionFrame noise(individuals, 2);
    for (int t = 1; t < steps; ++t) {
        const auto& w_prev = out.network.frames[t - 1];
        const auto behavior = behavior_at(covariates.row(t - 1).transpose(), params.coefficients);
        const Eigen::MatrixXd a = build_propagator(w_prev, behavior.beta);
        const Eigen::LLT<Eigen::MatrixXd> llt(build_precision(w_prev, behavior.alpha));
        if (llt.info() != Eigen::Success) throw FactorizationError("precision matrix is not positive definite");

        for (int i = 0; i < individuals; ++i)
            for (int axis = 0; axis < 2; ++axis) noise(i, axis) = sigma * normal(rng);
        // eps = L^{-T} z has covariance Q^{-1}.
        llt.matrixU().solveInPlace(noise);
        out.positions.push_back(a * out.positions.back() + noise);
    }
    return out;
}

double CensoringPattern::observed_fraction() const {
    std::size_t seen = 0, total = 0;
    for (const auto& row : observed) {
        for (auto v : row) seen += v;
        total += row.size();
    }
    return total == 0 ? 0.0 : static_cast<double>(seen) / static_cast<double>(total);
}

namespace {

int draw_duration(double lambda, int horizon, Rng& rng) {
    if (std::isinf(lambda)) return horizon;
    if (lambda >= 1.0) {
        // Rejection: a zero has probability e^-lambda <= 0.37.
        std::poisson_distribution<int> poisson(lambda);
        int d = 0;
        while (d == 0) d = poisson(rng);
        return d;
    }
    // Inversion of the zero-truncated pmf, which stays cheap for tiny lambda.
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * -std::expm1(-lambda);
    double term = lambda * std::exp(-lambda);
    int d = 1;
    while (u > term && d < horizon) {
        u -= term;
        ++d;
        term *= lambda / d;
    }
    return d;
}

std::vector<int> entries_of(const std::vector<std::uint8_t>& row) {
    std::vector<int> entries;
    for (std::size_t t = 0; t < row.size(); ++t)
        if (row[t] && (t == 0 || !row[t - 1])) entries.push_back(static_cast<int>(t));
    return entries;
}

}  // namespace

CensoringPattern simulate_censoring(int individuals, int steps, double lambda_obs,
                                    double lambda_miss, double p_init_observed, Rng& rng) {
    if (!(lambda_obs > 0.0) || !(lambda_miss > 0.0))
        throw std::invalid_argument("censoring rates must be positive");
    if (!(p_init_observed >= 0.0 && p_init_observed <= 1.0))
        throw std::invalid_argument("initial observation probability must lie in [0,1]");

    std::vector<std::vector<std::uint8_t>> mask(static_cast<std::size_t>(individuals),
                                                std::vector<std::uint8_t>(static_cast<std::size_t>(steps), 0));
    std::bernoulli_distribution initial(p_init_observed);
    for (auto& row : mask) {
        bool observed = initial(rng);
        int t = 0;
        while (t < steps) {
            const int d = draw_duration(observed ? lambda_obs : lambda_miss, steps - t, rng);
            const int stop = std::min(steps, t + d);
            for (; t < stop; ++t) row[t] = observed;
            observed = !observed;
        }
    }
    return pattern_from_mask(std::move(mask));
}

CensoringPattern pattern_from_mask(std::vector<std::vector<std::uint8_t>> observed) {
    CensoringPattern pattern;
    for (const auto& row : observed) {
        if (row.size() != observed.front().size()) throw std::invalid_argument("ragged censoring mask");
        pattern.entry_times.push_back(entries_of(row));
    }
    pattern.observed = std::move(observed);
    return pattern;
}

std::size_t MlmdDataset::record_count() const {
    std::size_t n = 0;
    for (const auto& f : frames) n += f.labels.size();
    return n;
}

std::vector<std::pair<int, int>> MlmdDataset::label_runs() const {
    std::vector<std::pair<int, int>> runs(label_names.size(), {-1, -1});
    for (int t = 0; t < steps(); ++t)
        for (int label : frames[t].labels) {
            auto& run = runs[static_cast<std::size_t>(label)];
            if (run.first < 0) run.first = t;
            run.second = t;
        }
    return runs;
}

void MlmdDataset::validate() const {
    std::vector<int> count(label_names.size(), 0);
    for (const auto& f : frames) {
        if (static_cast<std::size_t>(f.positions.rows()) != f.labels.size())
            throw std::invalid_argument("frame labels and positions disagree");
        if (!f.positions.allFinite()) throw std::invalid_argument("positions must be finite");
        for (std::size_t k = 0; k < f.labels.size(); ++k) {
            const int label = f.labels[k];
            if (label < 0 || label >= label_count()) throw std::invalid_argument("label id out of range");
            if (k > 0 && f.labels[k - 1] >= label)
                throw std::invalid_argument("labels within a frame must be distinct and ascending");
            ++count[static_cast<std::size_t>(label)];
        }
    }
    const auto runs = label_runs();
    for (std::size_t l = 0; l < runs.size(); ++l) {
        if (runs[l].first < 0) throw std::invalid_argument("label " + label_names[l] + " never observed");
        if (runs[l].second - runs[l].first + 1 != count[l])
            throw std::invalid_argument("label " + label_names[l] + " is not observed contiguously");
    }
    if (!truth.empty() && truth.size() != label_names.size())
        throw std::invalid_argument("label map size mismatch");
}

bool MlmdDataset::uncensored() const {
    const auto n = label_names.size();
    for (const auto& f : frames)
        if (f.labels.size() != n) return false;
    return true;
}

MlmdDataset apply_multilabeling(const TrajectorySet& trajectories, const CensoringPattern& pattern) {
    const int steps = trajectories.steps();
    const int individuals = trajectories.individuals();
    if (pattern.individuals() != individuals || pattern.steps() != steps)
        throw std::invalid_argument("censoring pattern does not match trajectories");

    MlmdDataset data;
    data.frames.resize(static_cast<std::size_t>(steps));
    std::vector<int> current(static_cast<std::size_t>(individuals), -1);
    for (int t = 0; t < steps; ++t) {
        auto& frame = data.frames[t];
        for (int i = 0; i < individuals; ++i) {
            if (!pattern.observed[i][t]) {
                current[i] = -1;
                continue;
            }
            if (current[i] < 0) {
                current[i] = data.label_count();
                data.label_names.push_back("L" + std::to_string(current[i] + 1));
                data.truth.push_back(i);
            }
        }
        // Ids grow with entry order, so ascending id order is a stable sort
        // of the individuals present at t.
        std::vector<std::pair<int, int>> present;
        for (int i = 0; i < individuals; ++i)
            if (current[i] >= 0) present.emplace_back(current[i], i);
        std::sort(present.begin(), present.end());
        frame.positions.resize(static_cast<Eigen::Index>(present.size()), 2);
        for (std::size_t k = 0; k < present.size(); ++k) {
            frame.labels.push_back(present[k].first);
            frame.positions.row(static_cast<Eigen::Index>(k)) =
                trajectories.positions[t].row(present[k].second);
        }
    }
    return data;
}

MlmdDataset as_dataset(const TrajectorySet& trajectories) {
    MlmdDataset data;
    const int individuals = trajectories.individuals();
    for (int i = 0; i < individuals; ++i) {
        data.label_names.push_back(std::to_string(i + 1));
        data.truth.push_back(i);
    }
    data.frames.resize(static_cast<std::size_t>(trajectories.steps()));
    for (int t = 0; t < trajectories.steps(); ++t) {
        data.frames[t].labels.resize(static_cast<std::size_t>(individuals));
        std::iota(data.frames[t].labels.begin(), data.frames[t].labels.end(), 0);
        data.frames[t].positions = trajectories.positions[t];
    }
    return data;
}

}  // namespace socmov
