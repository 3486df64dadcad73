#pragma once

/// Movement-model math: GLM links, the network-dependent precision and
/// propagator matrices, and the one-step Gaussian transition density.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace socmov {

/// Planar positions of J individuals at one time step, one row per individual.
using PositionFrame = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Covariate design: one row x(t) per time step.
using CovariateMatrix = Eigen::MatrixXd;

/// Symmetric binary adjacency matrix with unit diagonal.
///
/// Only the strict upper triangle is stored; reads mirror it and the diagonal
/// is always 1, so the invariants hold by construction.
class AdjacencyMatrix {
public:
    AdjacencyMatrix() = default;
    explicit AdjacencyMatrix(int size);

    static AdjacencyMatrix complete(int size);
    static AdjacencyMatrix from_dense(const Eigen::MatrixXi& dense);

    int size() const noexcept { return size_; }
    bool operator()(int i, int j) const;
    void set(int i, int j, bool connected);

    /// Number of unordered pairs i < j.
    std::size_t pair_count() const noexcept { return upper_.size(); }
    std::uint8_t pair_state(std::size_t pair) const { return upper_[pair]; }
    void set_pair_state(std::size_t pair, bool connected) { upper_[pair] = connected; }
    std::size_t pair_index(int i, int j) const;

    Eigen::MatrixXd dense() const;

    bool operator==(const AdjacencyMatrix&) const = default;

private:
    int size_ = 0;
    std::vector<std::uint8_t> upper_;
};

struct GlmCoefficients {
    Eigen::VectorXd delta_alpha;
    Eigen::VectorXd delta_beta;
    Eigen::VectorXd delta_p;
};

struct ModelParams {
    GlmCoefficients coefficients;
    double sigma2 = 1.0;
    double phi = 0.5;

    /// Throws std::invalid_argument when sigma2 <= 0, phi outside [0,1] or
    /// the coefficient vectors disagree in length.
    void validate() const;
    Eigen::Index covariate_count() const { return coefficients.delta_alpha.size(); }
};

/// Behavior values alpha(t), beta(t), p1(t) at one time step.
struct BehaviorValues {
    double alpha;
    double beta;
    double p1;
};

double inv_logit(double eta) noexcept;
double logit(double p) noexcept;

/// Inverse-logit of x'delta.
double glm_value(const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& delta);

BehaviorValues behavior_at(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const GlmCoefficients& coefficients);

/// Row sums of W including the self-edge.
Eigen::VectorXi ego_sizes(const AdjacencyMatrix& w);

/// Q_ii = w_i+, Q_ij = -alpha w_ij.
Eigen::MatrixXd build_precision(const AdjacencyMatrix& w, double alpha);

/// Row i is the mean position of the individuals connected to i (self included).
PositionFrame neighbor_mean(const AdjacencyMatrix& w, const PositionFrame& mu);

/// A = (1 - beta) I + beta Wbar, with Wbar the row-normalised adjacency.
Eigen::MatrixXd build_propagator(const AdjacencyMatrix& w, double beta);

/// Sufficient pieces of one transition density, separated from sigma2 so that
/// variance updates never need a refactorisation.
struct StepTerms {
    int dimension = 0;      ///< individuals in the step (per axis)
    double log_det_q = 0;   ///< log |Q|
    double quad_form = 0;   ///< sum over both axes of r' Q r, r = mu_t - A mu_prev

    double log_density(double sigma2) const noexcept;
};

/// Scratch buffers reused across step evaluations to avoid allocation in the
/// sampler's inner loops.
class StepWorkspace {
public:
    /// Evaluate the step with an adjacency supplied as a dense 0/1 matrix
    /// (unit diagonal) over rows of the previous/current frames.
    StepTerms evaluate(const Eigen::Ref<const Eigen::MatrixXd>& adjacency,
                       const Eigen::Ref<const PositionFrame>& mu_t,
                       const Eigen::Ref<const PositionFrame>& mu_prev, double alpha,
                       double beta);

    Eigen::MatrixXd& adjacency_buffer(int n);

private:
    Eigen::MatrixXd adjacency_;
    Eigen::MatrixXd precision_;
    Eigen::VectorXd ego_;
    PositionFrame residual_;
    PositionFrame mean_;
};

/// Raised when a precision matrix fails to factor. Given the construction
/// this indicates a bug rather than bad input.
class FactorizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

StepTerms transition_terms(const PositionFrame& mu_t, const PositionFrame& mu_prev,
                           const AdjacencyMatrix& w_prev, double alpha, double beta);

/// log N(mu_t; A mu_prev, sigma2 Q^{-1}) jointly over both coordinate axes.
double transition_log_density(const PositionFrame& mu_t, const PositionFrame& mu_prev,
                              const AdjacencyMatrix& w_prev, double alpha, double beta,
                              double sigma2);

/// Covariate rows for a before/during/after design with intercept.
/// `during_start` and `after_start` are 0-based time indices.
CovariateMatrix phase_design(int steps, int during_start, int after_start);

/// Study default: the horizon split into three equal phases.
CovariateMatrix equal_phase_design(int steps);

}  // namespace socmov
