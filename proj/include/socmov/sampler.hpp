#pragma once

/// Metropolis-within-Gibbs sampler for the GLM coefficients, sigma2, phi and
/// the observed edge states.
///
/// Each sweep redraws every scored edge from its exact full conditional, then
/// updates each scalar parameter with a Gaussian random walk on the
/// unconstrained scale (identity for coefficients, log for sigma2, logit for
/// phi).

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "socmov/likelihood.hpp"

namespace socmov {

struct PriorSpec {
    double coefficient_sd = 1.5;
    /// Scale of the half-Gaussian prior on sigma. Defaults to five times the
    /// median observed returner step length.
    std::optional<double> sigma_scale;
};

struct SamplerConfig {
    int iterations = 4000;
    int burn_in = 2000;
    int thin = 1;
    double coefficient_step = 0.3;
    double log_sigma2_step = 0.05;
    double logit_phi_step = 0.3;
    bool adapt = true;
    std::uint64_t seed = 1;
    bool store_edges = false;

    void validate() const;
};

enum class LikelihoodKind { complete, proxy };

std::string to_string(LikelihoodKind kind);

/// Parameter column names: delta_alpha_1..P, delta_beta_1..P, delta_p_1..P, sigma2, phi.
std::vector<std::string> parameter_names(int covariates);

struct PosteriorSamples {
    std::vector<std::string> names;
    Eigen::MatrixXd draws;              ///< retained iterations x parameters
    std::vector<int> iterations;        ///< 1-based sweep number of each row
    Eigen::MatrixXd density;            ///< retained iterations x steps, NaN where unscored
    std::vector<std::vector<std::uint8_t>> edge_draws;  ///< when store_edges
    std::vector<double> acceptance;     ///< post burn-in acceptance per parameter
    std::vector<double> proposal_scales;
    LikelihoodKind likelihood = LikelihoodKind::proxy;
    double sigma_prior_scale = 0;

    Eigen::Index column(const std::string& name) const;
    Eigen::VectorXd medians() const;
};

class InitializationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Current values of every sampled quantity plus cached per-step likelihood
/// terms that always agree with them.
struct ChainState {
    GlmCoefficients coefficients;
    double sigma2 = 1.0;
    double phi = 0.5;
    ObservedNetwork edges;
    std::vector<StepTerms> step_terms;

    Eigen::VectorXd flat() const;
};

class Sampler {
public:
    Sampler(const MlmdDataset& data, const CovariateMatrix& covariates, PriorSpec priors,
            SamplerConfig config, LikelihoodKind kind = LikelihoodKind::proxy);

    int parameter_count() const noexcept { return 3 * covariate_count_ + 2; }
    const ObservationIndex& index() const noexcept { return index_; }
    const MlmdDataset& data() const noexcept { return data_; }
    double sigma_prior_scale() const noexcept { return sigma_scale_; }

    /// Defaults: coefficients 0, sigma2 from returner steps, phi 0.5, edges Bern(0.5).
    ChainState initial_state(Rng& rng);
    ChainState make_state(const GlmCoefficients& coefficients, double sigma2, double phi,
                          const ObservedNetwork& edges);
    void refresh(ChainState& state);

    /// Log posterior on the unconstrained scale, up to a constant.
    double log_target(const ChainState& state);
    double log_likelihood(const ChainState& state) const;
    double log_network_pmf(const ChainState& state) const;
    double log_prior_unconstrained(const ChainState& state) const;

    /// Exact P(edge = 1 | everything else).
    double edge_conditional(ChainState& state, std::size_t chain, int t);
    void gibbs_update_edges(ChainState& state, Rng& rng);

    /// Log acceptance ratio for moving scalar `parameter` to
    /// `unconstrained_value` (identity/log/logit scale).
    double log_acceptance_ratio(ChainState& state, int parameter, double unconstrained_value);
    bool metropolis_update(ChainState& state, int parameter, double step, Rng& rng);

    double unconstrained(const ChainState& state, int parameter) const;

    PosteriorSamples run(const std::function<void(int)>& progress = {});

private:
    void set_unconstrained(ChainState& state, int parameter, double value) const;
    /// Steps whose movement term depends on `parameter`.
    const std::vector<int>& steps_for(int parameter) const { return dependent_steps_[parameter]; }
    double step_log_density(const ChainState& state, int t) const;

    MlmdDataset data_;
    CovariateMatrix covariates_;
    PriorSpec priors_;
    SamplerConfig config_;
    LikelihoodKind kind_;
    int covariate_count_;
    double sigma_scale_ = 1.0;
    double sigma2_init_ = 1.0;
    ObservationIndex index_;
    ObservedNetwork layout_;
    ProxyLikelihood engine_;
    std::vector<std::vector<int>> dependent_steps_;
};

PosteriorSamples run_chain(const MlmdDataset& data, const CovariateMatrix& covariates,
                           const PriorSpec& priors, const SamplerConfig& config,
                           LikelihoodKind kind = LikelihoodKind::proxy);

/// Complete-likelihood fit of fully labeled trajectories.
PosteriorSamples run_chain(const TrajectorySet& trajectories, const PriorSpec& priors,
                           const SamplerConfig& config);

/// Pointwise posterior mean of the observed-pair edge density, from stored
/// edge draws. NaN where fewer than two labels are observed.
std::vector<double> mean_degree_curve(const std::vector<std::vector<std::uint8_t>>& edge_draws,
                                      const ObservedNetwork& layout);

/// Same curve from the per-draw densities recorded by the sampler.
std::vector<double> mean_degree_curve(const PosteriorSamples& samples);

}  // namespace socmov
