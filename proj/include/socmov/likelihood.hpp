#pragma once

/// Complete-data likelihood and the returner-restricted proxy likelihood for
/// censored, multiply-labeled data.
///
/// Time convention: the transition into step t is governed by the network at
/// t-1 and by alpha(t-1), beta(t-1). For the proxy, that network is
/// restricted to the returners of step t (labels observed at both t-1 and t)
/// and ego sizes are recomputed inside the restriction.

#include <vector>

#include "socmov/model.hpp"
#include "socmov/network.hpp"
#include "socmov/simulate.hpp"

namespace socmov {

struct StepIndex {
    std::vector<int> observed;   ///< labels observed at t
    std::vector<int> returners;  ///< observed at t-1 and t
    std::vector<int> newcomers;  ///< observed at t only
    std::vector<int> rows_prev;  ///< row of each returner in frame t-1
    std::vector<int> rows_cur;   ///< row of each returner in frame t
};

struct ObservationIndex {
    std::vector<StepIndex> steps;

    /// Total number of (label, t) pairs whose label was also observed at t-1.
    std::size_t returner_total() const;
};

ObservationIndex partition_observed(const MlmdDataset& data, int steps);

/// One pair chain per pair of labels whose runs overlap, all states 0.
ObservedNetwork observed_network_layout(const MlmdDataset& data);

/// Observed edge states read off a known network through the label map.
ObservedNetwork restrict_network(const DynamicNetwork& network, const MlmdDataset& data);

/// Per-step evaluator shared by the likelihood functions and the sampler.
class ProxyLikelihood {
public:
    ProxyLikelihood(const MlmdDataset& data, const ObservationIndex& index,
                    const ObservedNetwork& layout);

    int steps() const noexcept { return static_cast<int>(step_chains_.size()); }

    /// Terms of the transition into step t (t >= 1).
    StepTerms step_terms(int t, const ObservedNetwork& network, double alpha, double beta);

    /// Chains forming the restricted adjacency of step t, listed for returner
    /// pairs i < j in row-major order.
    const std::vector<std::size_t>& step_chains(int t) const { return step_chains_[t]; }
    int step_dimension(int t) const { return static_cast<int>(previous_[t].rows()); }

    const PositionFrame& returners_previous(int t) const { return previous_[t]; }
    const PositionFrame& returners_current(int t) const { return current_[t]; }

private:
    std::vector<std::vector<std::size_t>> step_chains_;
    std::vector<PositionFrame> previous_;
    std::vector<PositionFrame> current_;
    StepWorkspace workspace_;
};

/// Sum over t >= 2 of log N(mu_ret(t); A_ret mu_ret(t-1), sigma2 Q_ret^{-1}).
double proxy_log_likelihood(const ModelParams& theta, const ObservedNetwork& network,
                            const MlmdDataset& data, const ObservationIndex& index,
                            const CovariateMatrix& covariates);

/// Sum over t >= 2 of the full-population transition log densities.
double complete_log_likelihood(const ModelParams& theta, const DynamicNetwork& network,
                               const TrajectorySet& trajectories);

}  // namespace socmov
