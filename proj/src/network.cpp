#include "socmov/network.hpp"

#include <cmath>
#include <limits>

namespace socmov {

namespace {

double log_bernoulli(bool value, double p) {
    return value ? std::log(p) : std::log1p(-p);
}

}  // namespace

TransitionProbs transition_probs(double p1, double phi) {
    return {(1.0 - phi) * p1, 1.0 - (1.0 - phi) * (1.0 - p1)};
}

DynamicNetwork simulate_network(int individuals, int steps, const CovariateMatrix& covariates,
                                const Eigen::VectorXd& delta_p, double phi, Rng& rng) {
    if (steps < 1) throw std::invalid_argument("network needs at least one step");
    if (covariates.rows() != steps) throw std::invalid_argument("covariate rows must equal steps");
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    DynamicNetwork net;
    net.frames.reserve(static_cast<std::size_t>(steps));
    AdjacencyMatrix frame(individuals);
    const double p_first = glm_value(covariates.row(0).transpose(), delta_p);
    for (std::size_t k = 0; k < frame.pair_count(); ++k) frame.set_pair_state(k, unif(rng) < p_first);
    net.frames.push_back(frame);

    for (int t = 1; t < steps; ++t) {
        const auto probs = transition_probs(glm_value(covariates.row(t).transpose(), delta_p), phi);
        for (std::size_t k = 0; k < frame.pair_count(); ++k) {
            const double p = frame.pair_state(k) ? probs.p_1given1 : probs.p_1given0;
            frame.set_pair_state(k, unif(rng) < p);
        }
        net.frames.push_back(frame);
    }
    return net;
}

double edge_log_pmf_complete(bool w_t, std::optional<bool> w_prev, double p1, double phi) {
    if (!w_prev) return log_bernoulli(w_t, p1);
    const auto probs = transition_probs(p1, phi);
    return log_bernoulli(w_t, *w_prev ? probs.p_1given1 : probs.p_1given0);
}

double proxy_edge_log_pmf(bool w_t, std::optional<bool> w_prev, PairMembership membership,
                          double p1, double phi) {
    switch (membership) {
        case PairMembership::returner:
            if (!w_prev) throw ContractViolation("returner pair scored without a previous state");
            return edge_log_pmf_complete(w_t, w_prev, p1, phi);
        case PairMembership::newcomer:
            return log_bernoulli(w_t, p1);
        case PairMembership::unobserved:
            break;
    }
    throw ContractViolation("pairs with an unobserved member are never scored");
}

ObservedNetwork::ObservedNetwork(int steps, std::vector<PairChain> chains)
    : steps_(steps), chains_(std::move(chains)), active_(static_cast<std::size_t>(steps)) {
    std::size_t offset = 0;
    for (std::size_t c = 0; c < chains_.size(); ++c) {
        auto& chain = chains_[c];
        if (chain.first >= chain.second || chain.start > chain.end || chain.start < 0 ||
            chain.end >= steps)
            throw std::invalid_argument("malformed pair chain");
        chain.offset = offset;
        offset += static_cast<std::size_t>(chain.length());
        for (int t = chain.start; t <= chain.end; ++t) active_[t].push_back(c);
    }
    states_.assign(offset, 0);
}

void ObservedNetwork::assign_states(std::span<const std::uint8_t> states) {
    if (states.size() != states_.size()) throw std::invalid_argument("state vector length mismatch");
    states_.assign(states.begin(), states.end());
}

PairMembership ObservedNetwork::membership(std::size_t chain, int t) const {
    const auto& c = chains_[chain];
    if (t < c.start || t > c.end) return PairMembership::unobserved;
    return t == c.start ? PairMembership::newcomer : PairMembership::returner;
}

double ObservedNetwork::density(int t) const {
    const auto& ids = active_[t];
    if (ids.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::size_t connected = 0;
    for (auto c : ids) connected += states_[slot(c, t)];
    return static_cast<double>(connected) / static_cast<double>(ids.size());
}

double proxy_network_log_pmf(const ObservedNetwork& network, const CovariateMatrix& covariates,
                             const Eigen::VectorXd& delta_p, double phi) {
    if (covariates.rows() != network.steps())
        throw std::invalid_argument("covariate rows must equal steps");
    std::vector<double> p1(static_cast<std::size_t>(network.steps()));
    for (int t = 0; t < network.steps(); ++t) p1[t] = glm_value(covariates.row(t).transpose(), delta_p);

    double total = 0.0;
    for (std::size_t c = 0; c < network.chains().size(); ++c) {
        const auto& chain = network.chains()[c];
        bool prev = network.state(c, chain.start);
        total += log_bernoulli(prev, p1[chain.start]);
        for (int t = chain.start + 1; t <= chain.end; ++t) {
            const bool cur = network.state(c, t);
            total += edge_log_pmf_complete(cur, prev, p1[t], phi);
            prev = cur;
        }
    }
    return total;
}

double complete_network_log_pmf(const DynamicNetwork& network, const CovariateMatrix& covariates,
                                const Eigen::VectorXd& delta_p, double phi) {
    if (covariates.rows() != network.steps())
        throw std::invalid_argument("covariate rows must equal steps");
    double total = 0.0;
    for (int t = 0; t < network.steps(); ++t) {
        const double p1 = glm_value(covariates.row(t).transpose(), delta_p);
        const auto& frame = network.frames[t];
        for (std::size_t k = 0; k < frame.pair_count(); ++k) {
            const bool cur = frame.pair_state(k) != 0;
            std::optional<bool> prev;
            if (t > 0) prev = network.frames[t - 1].pair_state(k) != 0;
            total += edge_log_pmf_complete(cur, prev, p1, phi);
        }
    }
    return total;
}

}  // namespace socmov
