#include "socmov/likelihood.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace socmov {

std::size_t ObservationIndex::returner_total() const {
    std::size_t n = 0;
    for (const auto& s : steps) n += s.returners.size();
    return n;
}

ObservationIndex partition_observed(const MlmdDataset& data, int steps) {
    if (steps != data.steps()) throw std::invalid_argument("step count disagrees with the dataset");
    ObservationIndex index;
    index.steps.resize(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t) {
        auto& s = index.steps[t];
        const auto& cur = data.frames[t].labels;
        s.observed = cur;
        if (t == 0) {
            s.newcomers = cur;
            continue;
        }
        const auto& prev = data.frames[t - 1].labels;
        // Both label lists are ascending: merge-walk.
        std::size_t a = 0;
        for (std::size_t b = 0; b < cur.size(); ++b) {
            while (a < prev.size() && prev[a] < cur[b]) ++a;
            if (a < prev.size() && prev[a] == cur[b]) {
                s.returners.push_back(cur[b]);
                s.rows_prev.push_back(static_cast<int>(a));
                s.rows_cur.push_back(static_cast<int>(b));
            } else {
                s.newcomers.push_back(cur[b]);
            }
        }
    }
    return index;
}

ObservedNetwork observed_network_layout(const MlmdDataset& data) {
    const auto runs = data.label_runs();
    std::vector<PairChain> chains;
    for (int a = 0; a < data.label_count(); ++a)
        for (int b = a + 1; b < data.label_count(); ++b) {
            const int start = std::max(runs[a].first, runs[b].first);
            const int end = std::min(runs[a].second, runs[b].second);
            if (runs[a].first < 0 || runs[b].first < 0 || start > end) continue;
            chains.push_back({a, b, start, end, 0});
        }
    return ObservedNetwork(data.steps(), std::move(chains));
}

ObservedNetwork restrict_network(const DynamicNetwork& network, const MlmdDataset& data) {
    if (data.truth.size() != static_cast<std::size_t>(data.label_count()))
        throw std::invalid_argument("restricting a network needs the ground-truth label map");
    if (network.steps() != data.steps()) throw std::invalid_argument("network and data horizons differ");
    ObservedNetwork out = observed_network_layout(data);
    for (std::size_t c = 0; c < out.chains().size(); ++c) {
        const auto& chain = out.chains()[c];
        const int i = data.truth[chain.first];
        const int j = data.truth[chain.second];
        for (int t = chain.start; t <= chain.end; ++t) out.set_state(c, t, network.frames[t](i, j));
    }
    return out;
}

ProxyLikelihood::ProxyLikelihood(const MlmdDataset& data, const ObservationIndex& index,
                                 const ObservedNetwork& layout) {
    const int steps = data.steps();
    if (static_cast<int>(index.steps.size()) != steps || layout.steps() != steps)
        throw std::invalid_argument("index, layout and data horizons differ");

    std::map<std::pair<int, int>, std::size_t> chain_of;
    for (std::size_t c = 0; c < layout.chains().size(); ++c)
        chain_of.emplace(std::pair{layout.chains()[c].first, layout.chains()[c].second}, c);

    step_chains_.resize(static_cast<std::size_t>(steps));
    previous_.resize(static_cast<std::size_t>(steps));
    current_.resize(static_cast<std::size_t>(steps));
    for (int t = 1; t < steps; ++t) {
        const auto& s = index.steps[t];
        const auto n = static_cast<Eigen::Index>(s.returners.size());
        previous_[t].resize(n, 2);
        current_[t].resize(n, 2);
        for (Eigen::Index k = 0; k < n; ++k) {
            previous_[t].row(k) = data.frames[t - 1].positions.row(s.rows_prev[k]);
            current_[t].row(k) = data.frames[t].positions.row(s.rows_cur[k]);
        }
        for (std::size_t i = 0; i < s.returners.size(); ++i)
            for (std::size_t j = i + 1; j < s.returners.size(); ++j) {
                const auto it = chain_of.find({s.returners[i], s.returners[j]});
                if (it == chain_of.end()) throw std::logic_error("returner pair without a chain");
                step_chains_[t].push_back(it->second);
            }
    }
}

StepTerms ProxyLikelihood::step_terms(int t, const ObservedNetwork& network, double alpha,
                                      double beta) {
    const int n = step_dimension(t);
    if (n == 0) return {};
    auto& adjacency = workspace_.adjacency_buffer(n);
    const auto& chains = step_chains_[t];
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++k)
            if (network.state(chains[k], t - 1)) adjacency(i, j) = adjacency(j, i) = 1.0;
    return workspace_.evaluate(adjacency, current_[t], previous_[t], alpha, beta);
}

double proxy_log_likelihood(const ModelParams& theta, const ObservedNetwork& network,
                            const MlmdDataset& data, const ObservationIndex& index,
                            const CovariateMatrix& covariates) {
    theta.validate();
    if (covariates.rows() != data.steps()) throw std::invalid_argument("covariate rows must equal steps");
    ProxyLikelihood engine(data, index, network);
    double total = 0.0;
    for (int t = 1; t < data.steps(); ++t) {
        const auto b = behavior_at(covariates.row(t - 1).transpose(), theta.coefficients);
        total += engine.step_terms(t, network, b.alpha, b.beta).log_density(theta.sigma2);
    }
    return total;
}

double complete_log_likelihood(const ModelParams& theta, const DynamicNetwork& network,
                               const TrajectorySet& trajectories) {
    theta.validate();
    const int steps = trajectories.steps();
    if (network.steps() != steps) throw std::invalid_argument("network and trajectory horizons differ");
    double total = 0.0;
    for (int t = 1; t < steps; ++t) {
        const auto b = behavior_at(trajectories.covariates.row(t - 1).transpose(), theta.coefficients);
        total += transition_log_density(trajectories.positions[t], trajectories.positions[t - 1],
                                        network.frames[t - 1], b.alpha, b.beta, theta.sigma2);
    }
    return total;
}

}  // namespace socmov
