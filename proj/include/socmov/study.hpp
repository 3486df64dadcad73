#pragma once

/// Simulation-study orchestration and posterior summaries: the coefficient
/// and censoring grid, complete-vs-proxy median differences, standardized
/// differences with t-test bands, censoring-rate estimators and
/// phase-comparison probabilities.

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "socmov/sampler.hpp"

namespace socmov {

struct CensoringScheme {
    double lambda_obs = 10;
    double lambda_miss = 10;
    double p_init_observed = 0.5;

    /// Zero censoring, used as a control that must reproduce the complete fit.
    static CensoringScheme control() {
        return {std::numeric_limits<double>::infinity(), 1.0, 1.0};
    }
    bool is_control() const noexcept { return lambda_obs == std::numeric_limits<double>::infinity(); }
    std::string name() const;
};

struct StudyGrid {
    std::vector<GlmCoefficients> combos;
    std::vector<CensoringScheme> schemes;
    int replicates = 12;
    int individuals = 5;
    int steps = 300;
    double sigma2 = 1.0;
    double phi = 0.0;

    void validate() const;
    std::size_t cell_count() const { return combos.size() * schemes.size() * static_cast<std::size_t>(replicates); }

    /// All 512 sign patterns over {-2,2} x {-1,1} x {-0.5,0.5} per block,
    /// the nine {5,10,20}^2 censoring schemes, 12 replicates.
    static StudyGrid full();
    /// Eight combos (each block either at the base (2,1,0.5) or with its
    /// intercept negated), schemes (5,20), (10,10), (20,5), 4 replicates,
    /// plus the zero-censoring control.
    static StudyGrid desk();
};

/// Every coefficient combination of the full grid, in lexicographic order.
std::vector<GlmCoefficients> sign_pattern_combos();

struct CellId {
    int combo = 0;
    int scheme = 0;
    int replicate = 0;
    bool operator==(const CellId&) const = default;
};

struct BiasRecord {
    CellId cell;
    std::string parameter;
    double d_theta = 0;
};

struct CellFailure {
    CellId cell;
    std::uint64_t seed = 0;
    std::string message;
};

struct StudyResult {
    std::vector<BiasRecord> records;
    std::vector<CellFailure> failures;
};

/// Deterministic stream seed for (master seed, combo, replicate, purpose).
std::uint64_t derive_seed(std::uint64_t master, int combo, int replicate, int purpose);

/// Per (combo, replicate): simulate complete data, fit it with the complete
/// likelihood, then censor it with each scheme and fit with the proxy
/// likelihood. d_theta = complete median - proxy median. Failures are
/// recorded and skipped.
StudyResult run_study(const StudyGrid& grid, const SamplerConfig& sampler, const PriorSpec& priors,
                      int workers, std::uint64_t seed);

struct StandardizedParameter {
    std::string parameter;
    std::vector<double> standardized;  ///< (d - mean d) / (sd d / sqrt R) per replicate
    double mean = 0;
    double t_statistic = 0;            ///< mean d / (sd d / sqrt R)
    double t_critical = 0;             ///< two-sided 0.05 quantile, R-1 dof
    bool undefined = false;            ///< zero variance across replicates
    bool significant = false;
};

/// Two-sided 0.05 critical value of Student's t.
double t_critical_value(int degrees_of_freedom);

/// Standardized differences for one (combo, scheme) cell across replicates.
/// `d_by_replicate[r][k]` is d_theta of parameter k in replicate r.
std::vector<StandardizedParameter> standardized_differences(
    const std::vector<std::string>& parameters, const std::vector<std::vector<double>>& d_by_replicate);

struct CellSummary {
    int combo = 0;
    int scheme = 0;
    std::vector<StandardizedParameter> parameters;
};

/// Group the records by (combo, scheme) and standardize each group.
std::vector<CellSummary> summarize_study(const StudyResult& result);

struct LambdaEstimate {
    double lambda_obs;
    double lambda_miss;
    double mean_labels;        ///< average labels per frame
    std::size_t completed_runs;
};

class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Moment estimators: lambda_obs is the mean length of observation runs with
/// both entry and exit inside the horizon; lambda_miss follows from the
/// stationary occupancy lambda_obs / (lambda_obs + lambda_miss) = nbar / J.
LambdaEstimate estimate_lambdas(const MlmdDataset& data, int total_individuals);

struct PhaseComparison {
    /// rows alpha, beta, p1; columns before<during, before<after, during<after
    std::array<std::array<double, 3>, 3> probability{};
};

/// Share of draws in which the later phase exceeds the earlier one, using
/// the first row of each phase in the design.
PhaseComparison phase_comparisons(const PosteriorSamples& samples, const CovariateMatrix& covariates);

struct ParameterSummary {
    std::string name;
    double mean;
    double median;
    double lower;  ///< 2.5% quantile
    double upper;  ///< 97.5% quantile
};

/// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

std::vector<ParameterSummary> summarize_draws(const PosteriorSamples& samples);

}  // namespace socmov
