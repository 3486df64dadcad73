#include "socmov/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace socmov {

namespace {

constexpr int kAdaptBatch = 50;
constexpr double kTargetAcceptance = 0.44;

double log_bernoulli(bool value, double p) { return value ? std::log(p) : std::log1p(-p); }

double median_of(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    double m = values[mid];
    if (values.size() % 2 == 0) {
        const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (m + lower);
    }
    return m;
}

const MlmdDataset& validated(const MlmdDataset& data) {
    data.validate();
    return data;
}

}  // namespace

void SamplerConfig::validate() const {
    if (iterations < 1) throw std::invalid_argument("iterations must be positive");
    if (burn_in < 0 || burn_in >= iterations) throw std::invalid_argument("burn_in must be in [0, iterations)");
    if (thin < 1) throw std::invalid_argument("thin must be at least 1");
    if (!(coefficient_step > 0) || !(log_sigma2_step > 0) || !(logit_phi_step > 0))
        throw std::invalid_argument("proposal scales must be positive");
}

std::string to_string(LikelihoodKind kind) {
    return kind == LikelihoodKind::complete ? "complete" : "proxy";
}

std::vector<std::string> parameter_names(int covariates) {
    std::vector<std::string> names;
    for (const char* block : {"delta_alpha", "delta_beta", "delta_p"})
        for (int k = 1; k <= covariates; ++k) names.push_back(std::string(block) + "_" + std::to_string(k));
    names.emplace_back("sigma2");
    names.emplace_back("phi");
    return names;
}

Eigen::Index PosteriorSamples::column(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::out_of_range("unknown parameter " + name);
    return it - names.begin();
}

Eigen::VectorXd PosteriorSamples::medians() const {
    Eigen::VectorXd out(draws.cols());
    for (Eigen::Index c = 0; c < draws.cols(); ++c) {
        std::vector<double> v(draws.col(c).data(), draws.col(c).data() + draws.rows());
        out(c) = median_of(std::move(v));
    }
    return out;
}

Eigen::VectorXd ChainState::flat() const {
    const auto p = coefficients.delta_alpha.size();
    Eigen::VectorXd v(3 * p + 2);
    v << coefficients.delta_alpha, coefficients.delta_beta, coefficients.delta_p, sigma2, phi;
    return v;
}

Sampler::Sampler(const MlmdDataset& data, const CovariateMatrix& covariates, PriorSpec priors,
                 SamplerConfig config, LikelihoodKind kind)
    : data_(validated(data)),
      covariates_(covariates),
      priors_(priors),
      config_(config),
      kind_(kind),
      covariate_count_(static_cast<int>(covariates.cols())),
      index_(partition_observed(data, data.steps())),
      layout_(observed_network_layout(data)),
      engine_(data_, index_, layout_) {
    config_.validate();
    if (covariates_.rows() != data_.steps()) throw std::invalid_argument("covariate rows must equal steps");
    if (!(priors_.coefficient_sd > 0)) throw std::invalid_argument("coefficient prior sd must be positive");
    if (priors_.sigma_scale && !(*priors_.sigma_scale > 0))
        throw std::invalid_argument("sigma prior scale must be positive");
    if (kind_ == LikelihoodKind::complete && !data_.uncensored())
        throw std::invalid_argument("the complete likelihood needs uncensored data");

    std::vector<double> lengths;
    double squared = 0.0;
    for (int t = 1; t < data_.steps(); ++t) {
        const PositionFrame step = engine_.returners_current(t) - engine_.returners_previous(t);
        for (Eigen::Index k = 0; k < step.rows(); ++k) {
            const double sq = step.row(k).squaredNorm();
            squared += sq;
            lengths.push_back(std::sqrt(sq));
        }
    }
    if (!lengths.empty()) {
        // Per-axis variance of a step.
        sigma2_init_ = squared / static_cast<double>(lengths.size()) / 2.0;
        sigma_scale_ = priors_.sigma_scale.value_or(5.0 * median_of(lengths));
    } else if (priors_.sigma_scale) {
        sigma_scale_ = *priors_.sigma_scale;
        sigma2_init_ = sigma_scale_ * sigma_scale_;
    } else {
        sigma_scale_ = sigma2_init_ = std::numeric_limits<double>::quiet_NaN();
    }

    const int p = covariate_count_;
    dependent_steps_.assign(static_cast<std::size_t>(parameter_count()), {});
    for (int t = 1; t < data_.steps(); ++t) {
        if (engine_.step_dimension(t) == 0) continue;
        for (int k = 0; k < p; ++k)
            if (covariates_(t - 1, k) != 0.0) {
                dependent_steps_[k].push_back(t);
                dependent_steps_[p + k].push_back(t);
            }
        dependent_steps_[3 * p].push_back(t);
    }
}

ChainState Sampler::make_state(const GlmCoefficients& coefficients, double sigma2, double phi,
                               const ObservedNetwork& edges) {
    ChainState state;
    state.coefficients = coefficients;
    state.sigma2 = sigma2;
    state.phi = phi;
    state.edges = layout_;
    state.edges.assign_states(edges.raw_states());
    refresh(state);
    return state;
}

ChainState Sampler::initial_state(Rng& rng) {
    if (!std::isfinite(sigma2_init_) || !(sigma2_init_ > 0)) {
        std::ostringstream msg;
        msg << "cannot initialise sigma2: " << index_.returner_total()
            << " returner observations, empirical step variance " << sigma2_init_
            << "; supply a sigma prior scale or data with movement";
        throw InitializationError(msg.str());
    }
    const auto zero = Eigen::VectorXd::Zero(covariate_count_);
    ObservedNetwork edges = layout_;
    std::bernoulli_distribution coin(0.5);
    for (std::size_t c = 0; c < edges.chains().size(); ++c)
        for (int t = edges.chains()[c].start; t <= edges.chains()[c].end; ++t) edges.set_state(c, t, coin(rng));
    return make_state({zero, zero, zero}, sigma2_init_, 0.5, edges);
}

void Sampler::refresh(ChainState& state) {
    state.step_terms.assign(static_cast<std::size_t>(data_.steps()), StepTerms{});
    for (int t = 1; t < data_.steps(); ++t) {
        const auto b = behavior_at(covariates_.row(t - 1).transpose(), state.coefficients);
        state.step_terms[t] = engine_.step_terms(t, state.edges, b.alpha, b.beta);
    }
}

double Sampler::step_log_density(const ChainState& state, int t) const {
    return state.step_terms[t].log_density(state.sigma2);
}

double Sampler::log_likelihood(const ChainState& state) const {
    double total = 0.0;
    for (int t = 1; t < data_.steps(); ++t) total += step_log_density(state, t);
    return total;
}

double Sampler::log_network_pmf(const ChainState& state) const {
    return proxy_network_log_pmf(state.edges, covariates_, state.coefficients.delta_p, state.phi);
}

double Sampler::log_prior_unconstrained(const ChainState& state) const {
    const double var = priors_.coefficient_sd * priors_.coefficient_sd;
    double lp = -0.5 * (state.coefficients.delta_alpha.squaredNorm() +
                        state.coefficients.delta_beta.squaredNorm() +
                        state.coefficients.delta_p.squaredNorm()) / var;
    // Half-Gaussian on sigma, carried to log(sigma2).
    lp += -0.5 * state.sigma2 / (sigma_scale_ * sigma_scale_) + 0.5 * std::log(state.sigma2);
    // Uniform phi, carried to logit(phi).
    lp += std::log(state.phi) + std::log1p(-state.phi);
    return lp;
}

double Sampler::log_target(const ChainState& state) {
    return log_likelihood(state) + log_network_pmf(state) + log_prior_unconstrained(state);
}

double Sampler::unconstrained(const ChainState& state, int parameter) const {
    const int p = covariate_count_;
    if (parameter < p) return state.coefficients.delta_alpha(parameter);
    if (parameter < 2 * p) return state.coefficients.delta_beta(parameter - p);
    if (parameter < 3 * p) return state.coefficients.delta_p(parameter - 2 * p);
    if (parameter == 3 * p) return std::log(state.sigma2);
    return logit(state.phi);
}

void Sampler::set_unconstrained(ChainState& state, int parameter, double value) const {
    const int p = covariate_count_;
    if (parameter < p) state.coefficients.delta_alpha(parameter) = value;
    else if (parameter < 2 * p) state.coefficients.delta_beta(parameter - p) = value;
    else if (parameter < 3 * p) state.coefficients.delta_p(parameter - 2 * p) = value;
    else if (parameter == 3 * p) state.sigma2 = std::exp(value);
    else state.phi = inv_logit(value);
}

double Sampler::edge_conditional(ChainState& state, std::size_t chain, int t) {
    const auto& c = state.edges.chains()[chain];
    const bool current = state.edges.state(chain, t);
    const auto& delta_p = state.coefficients.delta_p;
    const double p1 = glm_value(covariates_.row(t).transpose(), delta_p);

    double log_odds = 0.0;
    if (t == c.start) {
        log_odds += log_bernoulli(true, p1) - log_bernoulli(false, p1);
    } else {
        const bool prev = state.edges.state(chain, t - 1);
        log_odds += edge_log_pmf_complete(true, prev, p1, state.phi) -
                    edge_log_pmf_complete(false, prev, p1, state.phi);
    }
    if (t < c.end) {
        const bool next = state.edges.state(chain, t + 1);
        const double p1_next = glm_value(covariates_.row(t + 1).transpose(), delta_p);
        log_odds += edge_log_pmf_complete(next, true, p1_next, state.phi) -
                    edge_log_pmf_complete(next, false, p1_next, state.phi);

        // The pair is a returner pair at t+1, so the edge enters that step.
        const auto b = behavior_at(covariates_.row(t).transpose(), state.coefficients);
        state.edges.set_state(chain, t, !current);
        const StepTerms flipped = engine_.step_terms(t + 1, state.edges, b.alpha, b.beta);
        state.edges.set_state(chain, t, current);
        const double ll_flipped = flipped.log_density(state.sigma2);
        const double ll_current = state.step_terms[t + 1].log_density(state.sigma2);
        log_odds += current ? ll_current - ll_flipped : ll_flipped - ll_current;
    }
    return inv_logit(log_odds);
}

void Sampler::gibbs_update_edges(ChainState& state, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const auto& delta_p = state.coefficients.delta_p;
    std::vector<double> p1(static_cast<std::size_t>(data_.steps()));
    std::vector<BehaviorValues> behavior(static_cast<std::size_t>(data_.steps()));
    for (int t = 0; t < data_.steps(); ++t) {
        p1[t] = glm_value(covariates_.row(t).transpose(), delta_p);
        behavior[t] = behavior_at(covariates_.row(t).transpose(), state.coefficients);
    }

    for (int t = 0; t < data_.steps(); ++t) {
        for (const std::size_t chain : state.edges.active(t)) {
            const auto& c = state.edges.chains()[chain];
            const bool current = state.edges.state(chain, t);
            double log_odds = 0.0;
            if (t == c.start) {
                log_odds += log_bernoulli(true, p1[t]) - log_bernoulli(false, p1[t]);
            } else {
                const bool prev = state.edges.state(chain, t - 1);
                log_odds += edge_log_pmf_complete(true, prev, p1[t], state.phi) -
                            edge_log_pmf_complete(false, prev, p1[t], state.phi);
            }
            StepTerms flipped;
            if (t < c.end) {
                const bool next = state.edges.state(chain, t + 1);
                log_odds += edge_log_pmf_complete(next, true, p1[t + 1], state.phi) -
                            edge_log_pmf_complete(next, false, p1[t + 1], state.phi);
                state.edges.set_state(chain, t, !current);
                flipped = engine_.step_terms(t + 1, state.edges, behavior[t].alpha, behavior[t].beta);
                state.edges.set_state(chain, t, current);
                const double ll_flipped = flipped.log_density(state.sigma2);
                const double ll_current = state.step_terms[t + 1].log_density(state.sigma2);
                log_odds += current ? ll_current - ll_flipped : ll_flipped - ll_current;
            }
            const bool draw = unif(rng) < inv_logit(log_odds);
            if (draw != current) {
                state.edges.set_state(chain, t, draw);
                if (t < c.end) state.step_terms[t + 1] = flipped;
            }
        }
    }
}

double Sampler::log_acceptance_ratio(ChainState& state, int parameter, double unconstrained_value) {
    const double old_value = unconstrained(state, parameter);
    const double before = log_prior_unconstrained(state);
    const int p = covariate_count_;

    double delta = 0.0;
    if (parameter == 3 * p) {
        const double old_ll = log_likelihood(state);
        set_unconstrained(state, parameter, unconstrained_value);
        delta = log_likelihood(state) - old_ll;
    } else if (parameter >= 2 * p) {
        const double old_net = log_network_pmf(state);
        set_unconstrained(state, parameter, unconstrained_value);
        delta = log_network_pmf(state) - old_net;
    } else {
        set_unconstrained(state, parameter, unconstrained_value);
        for (int t : steps_for(parameter)) {
            const auto b = behavior_at(covariates_.row(t - 1).transpose(), state.coefficients);
            const StepTerms proposed = engine_.step_terms(t, state.edges, b.alpha, b.beta);
            delta += proposed.log_density(state.sigma2) - step_log_density(state, t);
        }
    }
    delta += log_prior_unconstrained(state) - before;
    set_unconstrained(state, parameter, old_value);
    return delta;
}

bool Sampler::metropolis_update(ChainState& state, int parameter, double step, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double proposal = unconstrained(state, parameter) + step * normal(rng);
    const double log_ratio = log_acceptance_ratio(state, parameter, proposal);
    if (!(std::log(unif(rng)) < log_ratio)) return false;

    set_unconstrained(state, parameter, proposal);
    if (parameter < 2 * covariate_count_) {
        for (int t : steps_for(parameter)) {
            const auto b = behavior_at(covariates_.row(t - 1).transpose(), state.coefficients);
            state.step_terms[t] = engine_.step_terms(t, state.edges, b.alpha, b.beta);
        }
    }
    return true;
}

PosteriorSamples Sampler::run(const std::function<void(int)>& progress) {
    Rng rng(config_.seed);
    ChainState state = initial_state(rng);
    const double initial = log_target(state);
    if (!std::isfinite(initial)) {
        std::ostringstream msg;
        msg << "non-finite log posterior at initialisation: likelihood " << log_likelihood(state)
            << ", network " << log_network_pmf(state) << ", prior " << log_prior_unconstrained(state);
        throw InitializationError(msg.str());
    }

    const int n_par = parameter_count();
    std::vector<double> log_scale(static_cast<std::size_t>(n_par));
    for (int k = 0; k < n_par; ++k) {
        double s = config_.coefficient_step;
        if (k == 3 * covariate_count_) s = config_.log_sigma2_step;
        if (k == 3 * covariate_count_ + 1) s = config_.logit_phi_step;
        log_scale[k] = std::log(s);
    }
    std::vector<int> batch_accepts(static_cast<std::size_t>(n_par), 0);
    std::vector<long> kept_accepts(static_cast<std::size_t>(n_par), 0);

    PosteriorSamples out;
    out.names = parameter_names(covariate_count_);
    out.likelihood = kind_;
    out.sigma_prior_scale = sigma_scale_;
    const int rows = (config_.iterations - config_.burn_in) / config_.thin;
    out.draws.resize(rows, n_par);
    out.density.resize(rows, data_.steps());
    out.iterations.reserve(static_cast<std::size_t>(rows));

    int batch = 0;
    int row = 0;
    for (int iter = 1; iter <= config_.iterations; ++iter) {
        gibbs_update_edges(state, rng);
        for (int k = 0; k < n_par; ++k) {
            const bool accepted = metropolis_update(state, k, std::exp(log_scale[k]), rng);
            if (iter <= config_.burn_in) batch_accepts[k] += accepted;
            else kept_accepts[k] += accepted;
        }

        if (config_.adapt && iter <= config_.burn_in && iter % kAdaptBatch == 0) {
            ++batch;
            const double adjust = std::min(0.1, 1.0 / std::sqrt(static_cast<double>(batch)));
            for (int k = 0; k < n_par; ++k) {
                const double rate = static_cast<double>(batch_accepts[k]) / kAdaptBatch;
                log_scale[k] += rate > kTargetAcceptance ? adjust : -adjust;
                batch_accepts[k] = 0;
            }
        }

        if (iter > config_.burn_in && (iter - config_.burn_in) % config_.thin == 0) {
            out.draws.row(row) = state.flat().transpose();
            for (int t = 0; t < data_.steps(); ++t) out.density(row, t) = state.edges.density(t);
            if (config_.store_edges) {
                const auto raw = state.edges.raw_states();
                out.edge_draws.emplace_back(raw.begin(), raw.end());
            }
            out.iterations.push_back(iter);
            ++row;
        }
        if (progress) progress(iter);
    }

    const int kept = config_.iterations - config_.burn_in;
    for (int k = 0; k < n_par; ++k) {
        out.acceptance.push_back(static_cast<double>(kept_accepts[k]) / kept);
        out.proposal_scales.push_back(std::exp(log_scale[k]));
    }
    return out;
}

PosteriorSamples run_chain(const MlmdDataset& data, const CovariateMatrix& covariates,
                           const PriorSpec& priors, const SamplerConfig& config, LikelihoodKind kind) {
    Sampler sampler(data, covariates, priors, config, kind);
    return sampler.run();
}

PosteriorSamples run_chain(const TrajectorySet& trajectories, const PriorSpec& priors,
                           const SamplerConfig& config) {
    return run_chain(as_dataset(trajectories), trajectories.covariates, priors, config,
                     LikelihoodKind::complete);
}

std::vector<double> mean_degree_curve(const std::vector<std::vector<std::uint8_t>>& edge_draws,
                                      const ObservedNetwork& layout) {
    std::vector<double> curve(static_cast<std::size_t>(layout.steps()), 0.0);
    ObservedNetwork scratch = layout;
    for (const auto& draw : edge_draws) {
        scratch.assign_states(draw);
        for (int t = 0; t < layout.steps(); ++t) curve[t] += scratch.density(t);
    }
    for (auto& v : curve) v /= static_cast<double>(edge_draws.size());
    return curve;
}

std::vector<double> mean_degree_curve(const PosteriorSamples& samples) {
    std::vector<double> curve(static_cast<std::size_t>(samples.density.cols()));
    for (Eigen::Index t = 0; t < samples.density.cols(); ++t) curve[t] = samples.density.col(t).mean();
    return curve;
}

}  // namespace socmov
