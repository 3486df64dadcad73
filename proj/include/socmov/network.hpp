#pragma once

/// Latent dynamic network: the pairwise stationary Markov edge process with a
/// time-varying density, and the proxy mass function used when only part of
/// the population is observed.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <random>
#include <vector>

#include "socmov/model.hpp"

namespace socmov {

using Rng = std::mt19937_64;

struct DynamicNetwork {
    std::vector<AdjacencyMatrix> frames;

    int steps() const noexcept { return static_cast<int>(frames.size()); }
    int size() const noexcept { return frames.empty() ? 0 : frames.front().size(); }
};

/// Two-state chain probabilities for one time step.
struct TransitionProbs {
    double p_1given0;
    double p_1given1;
};

TransitionProbs transition_probs(double p1, double phi);

/// W(1) ~ Bern(p1(1)) per pair, then the Markov transition driven by p1(t).
DynamicNetwork simulate_network(int individuals, int steps, const CovariateMatrix& covariates,
                                const Eigen::VectorXd& delta_p, double phi, Rng& rng);

/// log p(w_t | w_prev); the stationary Bernoulli(p1) when there is no previous state.
double edge_log_pmf_complete(bool w_t, std::optional<bool> w_prev, double p1, double phi);

enum class PairMembership {
    returner,    ///< both members observed at t-1 and t
    newcomer,    ///< at least one member is new at t
    unobserved,  ///< at least one member is not observed at t
};

class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Edge pmf restricted to observed pairs. Returner pairs use the Markov
/// transition; newcomer pairs the stationary density. Scoring an unobserved
/// pair throws ContractViolation, as does a returner pair without w_prev.
double proxy_edge_log_pmf(bool w_t, std::optional<bool> w_prev, PairMembership membership,
                          double p1, double phi);

/// Edge states of one label pair over the contiguous interval on which both
/// labels are observed. The first state is scored with the stationary
/// density, later ones with the transition.
struct PairChain {
    int first = 0;   ///< label index, first < second
    int second = 0;
    int start = 0;   ///< first time step (0-based) both are observed
    int end = 0;     ///< last time step, inclusive
    std::size_t offset = 0;

    int length() const noexcept { return end - start + 1; }
};

/// Edge states over every scored (observed) pair and time step.
class ObservedNetwork {
public:
    ObservedNetwork() = default;
    ObservedNetwork(int steps, std::vector<PairChain> chains);

    int steps() const noexcept { return steps_; }
    const std::vector<PairChain>& chains() const noexcept { return chains_; }
    std::size_t state_count() const noexcept { return states_.size(); }

    bool state(std::size_t chain, int t) const { return states_[slot(chain, t)] != 0; }
    void set_state(std::size_t chain, int t, bool connected) { states_[slot(chain, t)] = connected; }
    std::size_t slot(std::size_t chain, int t) const { return chains_[chain].offset + (t - chains_[chain].start); }

    /// Chain ids scored at time t.
    const std::vector<std::size_t>& active(int t) const { return active_[t]; }

    std::span<const std::uint8_t> raw_states() const noexcept { return states_; }
    void assign_states(std::span<const std::uint8_t> states);

    PairMembership membership(std::size_t chain, int t) const;

    /// Fraction of scored pairs connected at t; NaN when no pair is scored.
    double density(int t) const;

private:
    int steps_ = 0;
    std::vector<PairChain> chains_;
    std::vector<std::uint8_t> states_;
    std::vector<std::vector<std::size_t>> active_;
};

/// Sum of proxy edge log pmfs over all scored pairs and times.
double proxy_network_log_pmf(const ObservedNetwork& network, const CovariateMatrix& covariates,
                             const Eigen::VectorXd& delta_p, double phi);

/// Markov-process log pmf of a fully known network, stationary at the first step.
double complete_network_log_pmf(const DynamicNetwork& network, const CovariateMatrix& covariates,
                                const Eigen::VectorXd& delta_p, double phi);

}  // namespace socmov
