#pragma once

/// Trajectory simulation from the movement model and the censoring /
/// multi-labeling observation process.

#include <string>
#include <vector>

#include "socmov/model.hpp"
#include "socmov/network.hpp"

namespace socmov {

/// Complete, labeled data: frame t holds all J positions at step t.
struct TrajectorySet {
    std::vector<PositionFrame> positions;
    DynamicNetwork network;
    ModelParams params;
    CovariateMatrix covariates;

    int steps() const noexcept { return static_cast<int>(positions.size()); }
    int individuals() const noexcept { return positions.empty() ? 0 : static_cast<int>(positions.front().rows()); }
};

/// J points drawn uniformly on a disc of radius 5 sigma around the origin.
PositionFrame initial_positions(int individuals, double sigma2, Rng& rng);

TrajectorySet simulate_trajectories(int individuals, int steps, const ModelParams& params,
                                    const CovariateMatrix& covariates, const PositionFrame& init,
                                    Rng& rng);

/// Observed/missing mask per individual and the steps at which observation
/// runs begin.
struct CensoringPattern {
    std::vector<std::vector<std::uint8_t>> observed;  ///< [individual][t]
    std::vector<std::vector<int>> entry_times;        ///< [individual], sorted

    int individuals() const noexcept { return static_cast<int>(observed.size()); }
    int steps() const noexcept { return observed.empty() ? 0 : static_cast<int>(observed.front().size()); }
    double observed_fraction() const;
};

/// Alternating observed/missing runs with Poisson durations; a zero draw is
/// redrawn. An infinite lambda yields a run covering the rest of the horizon.
CensoringPattern simulate_censoring(int individuals, int steps, double lambda_obs,
                                    double lambda_miss, double p_init_observed, Rng& rng);

/// Pattern built from an explicit mask; entry times are derived from it.
CensoringPattern pattern_from_mask(std::vector<std::vector<std::uint8_t>> observed);

/// Observations at one step. `labels` are ascending label ids; row k of
/// `positions` belongs to labels[k].
struct ObservedFrame {
    std::vector<int> labels;
    PositionFrame positions;
};

/// Censored, multiply-labeled observations.
struct MlmdDataset {
    std::vector<ObservedFrame> frames;
    std::vector<std::string> label_names;
    /// Ground truth label -> individual. Simulation only; empty otherwise.
    /// Inference never reads it.
    std::vector<int> truth;

    int steps() const noexcept { return static_cast<int>(frames.size()); }
    int label_count() const noexcept { return static_cast<int>(label_names.size()); }
    std::size_t record_count() const;

    /// First and last step of each label's run.
    std::vector<std::pair<int, int>> label_runs() const;

    /// Throws std::invalid_argument unless every label occupies one
    /// contiguous run and labels within a frame are distinct and ascending.
    void validate() const;

    /// True when every label is observed at every step.
    bool uncensored() const;
};

/// Emit observed positions with a fresh label at every entry time. Labels are
/// numbered in order of (entry time, individual).
MlmdDataset apply_multilabeling(const TrajectorySet& trajectories, const CensoringPattern& pattern);

/// The complete data viewed as an MLMD set with one label per individual.
MlmdDataset as_dataset(const TrajectorySet& trajectories);

}  // namespace socmov
