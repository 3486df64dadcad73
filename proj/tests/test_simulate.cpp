#include <doctest.h>

#include "oracles.hpp"
#include "socmov/simulate.hpp"

using namespace socmov;

namespace {

ModelParams constant_params(double alpha, double beta, double p1, double sigma2, double phi) {
    GlmCoefficients c{Eigen::VectorXd::Constant(1, logit(alpha)), Eigen::VectorXd::Constant(1, logit(beta)),
                      Eigen::VectorXd::Constant(1, logit(p1))};
    return {c, sigma2, phi};
}

ModelParams three_phase_params() {
    return {{Eigen::Vector3d(0.5, -1.0, 0.5), Eigen::Vector3d(-1.0, 1.0, 0.5), Eigen::Vector3d(0.0, 1.0, -0.5)},
            1.0,
            0.8};
}

}  // namespace

TEST_CASE("initial positions lie in the disc of radius 5 sigma") {
    Rng rng(1);
    const auto init = initial_positions(500, 4.0, rng);
    CHECK(init.rows() == 500);
    CHECK(init.rowwise().norm().maxCoeff() <= 10.0);
    CHECK(init.rowwise().norm().maxCoeff() > 9.0);
}

TEST_CASE("a lone individual performs a Gaussian random walk") {
    Rng rng(2);
    const int steps = 20000;
    const double sigma2 = 2.0;
    const auto traj = simulate_trajectories(1, steps, constant_params(0.5, 0.5, 0.5, sigma2, 0.5),
                                            CovariateMatrix::Ones(steps, 1), PositionFrame::Zero(1, 2), rng);
    Eigen::MatrixXd inc(steps - 1, 2);
    for (int t = 1; t < steps; ++t) inc.row(t - 1) = traj.positions[t].row(0) - traj.positions[t - 1].row(0);
    const Eigen::RowVector2d mean = inc.colwise().mean();
    const Eigen::RowVector2d var = (inc.rowwise() - mean).array().square().colwise().sum() / (steps - 2);
    CHECK(std::abs(mean(0)) < 0.05);
    CHECK(std::abs(mean(1)) < 0.05);
    CHECK(std::abs(var(0) - sigma2) < 0.1);
    CHECK(std::abs(var(1) - sigma2) < 0.1);
    CHECK(std::abs((inc.col(0).array() * inc.col(1).array()).mean()) < 0.1);
}

TEST_CASE("full attraction on a complete network collapses the group") {
    Rng rng(3);
    const int steps = 5;
    const auto params = constant_params(0.5, 1.0 - 1e-12, 1.0 - 1e-12, 1e-8, 0.5);
    const auto init = initial_positions(6, 1.0, rng);
    const auto traj = simulate_trajectories(6, steps, params, CovariateMatrix::Ones(steps, 1), init, rng);
    const Eigen::RowVector2d centroid = init.colwise().mean();
    for (int i = 0; i < 6; ++i) CHECK((traj.positions[1].row(i) - centroid).norm() < 1e-2);
}

TEST_CASE("one-step noise covariance is sigma2 Q^{-1}") {
    // phi = 1 with p1 near 1 keeps the network complete, so every replicate
    // shares the same Q.
    Rng rng(4);
    const int reps = 40000;
    const double sigma2 = 1.5;
    const auto params = constant_params(0.6, 0.3, 1.0 - 1e-12, sigma2, 1.0);
    const PositionFrame init = PositionFrame::Zero(3, 2);
    Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
    for (int r = 0; r < reps; ++r) {
        const auto traj = simulate_trajectories(3, 2, params, CovariateMatrix::Ones(2, 1), init, rng);
        const Eigen::MatrixXd eps = traj.positions[1];
        sum += eps.col(0) * eps.col(0).transpose() + eps.col(1) * eps.col(1).transpose();
    }
    const Eigen::Matrix3d empirical = sum / (2.0 * reps);
    Eigen::Matrix3d q;
    q << 3, -0.6, -0.6, -0.6, 3, -0.6, -0.6, -0.6, 3;
    const Eigen::Matrix3d expected = sigma2 * q.inverse();
    CHECK((empirical - expected).cwiseAbs().maxCoeff() < 0.05 * expected.cwiseAbs().maxCoeff());
}

TEST_CASE("trajectory simulation is deterministic under a seed") {
    const int steps = 30;
    const auto params = three_phase_params();
    const auto x = equal_phase_design(steps);
    Rng a(99), b(99);
    const auto ta = simulate_trajectories(5, steps, params, x, initial_positions(5, 1.0, a), a);
    const auto tb = simulate_trajectories(5, steps, params, x, initial_positions(5, 1.0, b), b);
    for (int t = 0; t < steps; ++t) {
        CHECK(ta.positions[t] == tb.positions[t]);
        CHECK(ta.network.frames[t] == tb.network.frames[t]);
    }
}

TEST_CASE("simulation rejects invalid inputs") {
    Rng rng(5);
    auto params = three_phase_params();
    const auto x = equal_phase_design(10);
    CHECK_THROWS_AS(simulate_trajectories(3, 1, params, x, PositionFrame::Zero(3, 2), rng), std::invalid_argument);
    CHECK_THROWS_AS(simulate_trajectories(3, 10, params, x, PositionFrame::Zero(2, 2), rng), std::invalid_argument);
    CHECK_THROWS_AS(simulate_trajectories(3, 10, params, CovariateMatrix::Ones(10, 1), PositionFrame::Zero(3, 2), rng),
                    std::invalid_argument);
    params.sigma2 = -1;
    CHECK_THROWS_AS(simulate_trajectories(3, 10, params, x, PositionFrame::Zero(3, 2), rng), std::invalid_argument);
}

TEST_CASE("censoring occupancy matches the alternating-renewal rate") {
    Rng rng(6);
    for (auto [lo, lm] : {std::pair{5.0, 20.0}, {10.0, 10.0}, {20.0, 5.0}}) {
        const auto pattern = simulate_censoring(60, 3000, lo, lm, 0.5, rng);
        CHECK(pattern.individuals() == 60);
        CHECK(pattern.steps() == 3000);
        // Durations are zero-truncated Poisson, whose mean is lambda / (1 - e^-lambda).
        const double mo = lo / (1 - std::exp(-lo)), mm = lm / (1 - std::exp(-lm));
        CHECK(std::abs(pattern.observed_fraction() - mo / (mo + mm)) < 0.02);
    }
}

TEST_CASE("zero censoring observes everyone throughout") {
    Rng rng(7);
    const auto pattern = simulate_censoring(5, 50, std::numeric_limits<double>::infinity(), 1.0, 1.0, rng);
    CHECK(pattern.observed_fraction() == 1.0);
    for (const auto& e : pattern.entry_times) CHECK(e == std::vector<int>{0});
    CHECK_THROWS_AS(simulate_censoring(5, 50, 0.0, 1.0, 0.5, rng), std::invalid_argument);
    CHECK_THROWS_AS(simulate_censoring(5, 50, 1.0, 1.0, 1.5, rng), std::invalid_argument);
}

TEST_CASE("entry times from a mask") {
    const auto p = pattern_from_mask({{1, 1, 0, 1}, {0, 0, 0, 0}, {0, 1, 1, 1}});
    CHECK(p.entry_times[0] == std::vector<int>{0, 3});
    CHECK(p.entry_times[1].empty());
    CHECK(p.entry_times[2] == std::vector<int>{1});
    CHECK(p.observed_fraction() == doctest::Approx(6.0 / 12.0));
}

TEST_CASE("multi-labeling invariants") {
    Rng rng(8);
    const int steps = 200, n = 6;
    const auto traj = simulate_trajectories(n, steps, three_phase_params(), equal_phase_design(steps),
                                            initial_positions(n, 1.0, rng), rng);
    const auto pattern = simulate_censoring(n, steps, 5.0, 5.0, 0.5, rng);
    const auto data = apply_multilabeling(traj, pattern);
    CHECK_NOTHROW(data.validate());

    std::size_t entries = 0, observed = 0;
    for (int i = 0; i < n; ++i) {
        entries += pattern.entry_times[i].size();
        for (int t = 0; t < steps; ++t) observed += pattern.observed[i][t];
    }
    CHECK(data.label_count() == static_cast<int>(entries));
    CHECK(data.record_count() == observed);
    CHECK(data.truth.size() == entries);

    // Positions are the true ones, and no individual holds two labels at once.
    const auto runs = data.label_runs();
    for (int t = 0; t < steps; ++t) {
        std::vector<int> seen;
        const auto& f = data.frames[t];
        for (std::size_t k = 0; k < f.labels.size(); ++k) {
            const int who = data.truth[f.labels[k]];
            seen.push_back(who);
            CHECK(f.positions.row(static_cast<Eigen::Index>(k)) == traj.positions[t].row(who));
            CHECK(pattern.observed[who][t]);
        }
        std::sort(seen.begin(), seen.end());
        CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    }
    // Labels are numbered by entry time.
    for (int l = 1; l < data.label_count(); ++l) CHECK(runs[l - 1].first <= runs[l].first);
    // Consecutive runs of one individual carry different labels separated by a gap.
    for (int l = 0; l < data.label_count(); ++l)
        for (int m = l + 1; m < data.label_count(); ++m)
            if (data.truth[l] == data.truth[m]) CHECK((runs[l].second + 1 < runs[m].first || runs[m].second + 1 < runs[l].first));
    CHECK_FALSE(data.uncensored());
}

TEST_CASE("a complete dataset has one label per individual") {
    Rng rng(9);
    const auto traj = simulate_trajectories(4, 20, three_phase_params(), equal_phase_design(20),
                                            initial_positions(4, 1.0, rng), rng);
    const auto data = as_dataset(traj);
    CHECK(data.uncensored());
    CHECK(data.label_count() == 4);
    CHECK(data.record_count() == 80);
    const auto relabeled = apply_multilabeling(traj, pattern_from_mask(std::vector<std::vector<std::uint8_t>>(
                                                         4, std::vector<std::uint8_t>(20, 1))));
    CHECK(relabeled.uncensored());
    CHECK(relabeled.truth == data.truth);
    for (int t = 0; t < 20; ++t) CHECK(relabeled.frames[t].positions == data.frames[t].positions);
}

TEST_CASE("dataset validation") {
    MlmdDataset d;
    d.label_names = {"a", "b"};
    d.frames.resize(3);
    d.frames[0].labels = {0, 1};
    d.frames[0].positions = PositionFrame::Zero(2, 2);
    d.frames[1].labels = {1};
    d.frames[1].positions = PositionFrame::Zero(1, 2);
    d.frames[2].labels = {0, 1};
    d.frames[2].positions = PositionFrame::Zero(2, 2);
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);  // label a has a gap
    d.frames[2].labels = {1};
    d.frames[2].positions = PositionFrame::Zero(1, 2);
    CHECK_NOTHROW(d.validate());
    d.frames[0].labels = {1, 0};
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("tiny censoring rates give unit-length runs") {
    Rng rng(10);
    const auto pattern = simulate_censoring(4, 100, 1e-9, 1e-9, 1.0, rng);
    for (const auto& row : pattern.observed)
        for (int t = 0; t < 100; ++t) CHECK(row[t] == (t % 2 == 0));
}
