#include "socmov/model.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

namespace socmov {

AdjacencyMatrix::AdjacencyMatrix(int size)
    : size_(size), upper_(static_cast<std::size_t>(size) * (size > 0 ? size - 1 : 0) / 2, 0) {
    if (size < 0) throw std::invalid_argument("adjacency size must be non-negative");
}

AdjacencyMatrix AdjacencyMatrix::complete(int size) {
    AdjacencyMatrix w(size);
    std::fill(w.upper_.begin(), w.upper_.end(), 1);
    return w;
}

AdjacencyMatrix AdjacencyMatrix::from_dense(const Eigen::MatrixXi& dense) {
    if (dense.rows() != dense.cols()) throw std::invalid_argument("adjacency must be square");
    const int n = static_cast<int>(dense.rows());
    AdjacencyMatrix w(n);
    for (int i = 0; i < n; ++i) {
        if (dense(i, i) != 1) throw std::invalid_argument("adjacency diagonal must be 1");
        for (int j = i + 1; j < n; ++j) {
            if (dense(i, j) != dense(j, i)) throw std::invalid_argument("adjacency must be symmetric");
            if (dense(i, j) != 0 && dense(i, j) != 1) throw std::invalid_argument("adjacency must be binary");
            w.set(i, j, dense(i, j) == 1);
        }
    }
    return w;
}

std::size_t AdjacencyMatrix::pair_index(int i, int j) const {
    if (i > j) std::swap(i, j);
    // Row-major strict upper triangle.
    const auto n = static_cast<std::size_t>(size_);
    const auto a = static_cast<std::size_t>(i);
    return a * n - a * (a + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

bool AdjacencyMatrix::operator()(int i, int j) const {
    if (i == j) return true;
    return upper_[pair_index(i, j)] != 0;
}

void AdjacencyMatrix::set(int i, int j, bool connected) {
    if (i == j) {
        if (!connected) throw std::invalid_argument("self-edges are fixed at 1");
        return;
    }
    upper_[pair_index(i, j)] = connected ? 1 : 0;
}

Eigen::MatrixXd AdjacencyMatrix::dense() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(size_, size_);
    for (int i = 0; i < size_; ++i)
        for (int j = i + 1; j < size_; ++j)
            if ((*this)(i, j)) out(i, j) = out(j, i) = 1.0;
    return out;
}

void ModelParams::validate() const {
    const auto p = coefficients.delta_alpha.size();
    if (coefficients.delta_beta.size() != p || coefficients.delta_p.size() != p)
        throw std::invalid_argument("GLM coefficient vectors must share a length");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("sigma2 must be positive");
    if (!(phi >= 0.0 && phi <= 1.0)) throw std::invalid_argument("phi must lie in [0,1]");
}

double inv_logit(double eta) noexcept {
    if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

double logit(double p) noexcept { return std::log(p) - std::log1p(-p); }

double glm_value(const Eigen::Ref<const Eigen::VectorXd>& x,
                 const Eigen::Ref<const Eigen::VectorXd>& delta) {
    if (x.size() != delta.size())
        throw std::invalid_argument("covariate and coefficient lengths differ");
    return inv_logit(x.dot(delta));
}

BehaviorValues behavior_at(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const GlmCoefficients& c) {
    return {glm_value(x, c.delta_alpha), glm_value(x, c.delta_beta), glm_value(x, c.delta_p)};
}

Eigen::VectorXi ego_sizes(const AdjacencyMatrix& w) {
    Eigen::VectorXi out = Eigen::VectorXi::Ones(w.size());
    for (int i = 0; i < w.size(); ++i)
        for (int j = i + 1; j < w.size(); ++j)
            if (w(i, j)) {
                ++out(i);
                ++out(j);
            }
    return out;
}

Eigen::MatrixXd build_precision(const AdjacencyMatrix& w, double alpha) {
    Eigen::MatrixXd q = -alpha * w.dense();
    q.diagonal() = ego_sizes(w).cast<double>();
    return q;
}

PositionFrame neighbor_mean(const AdjacencyMatrix& w, const PositionFrame& mu) {
    if (mu.rows() != w.size()) throw std::invalid_argument("frame and adjacency sizes differ");
    const Eigen::MatrixXd dense = w.dense();
    const Eigen::VectorXd ego = dense.rowwise().sum();
    return (dense * mu).array().colwise() / ego.array();
}

Eigen::MatrixXd build_propagator(const AdjacencyMatrix& w, double beta) {
    const Eigen::MatrixXd dense = w.dense();
    const Eigen::VectorXd ego = dense.rowwise().sum();
    Eigen::MatrixXd a = beta * (ego.cwiseInverse().asDiagonal() * dense);
    a.diagonal().array() += 1.0 - beta;
    return a;
}

double StepTerms::log_density(double sigma2) const noexcept {
    if (dimension == 0) return 0.0;
    // Two independent axes, each N(0, sigma2 Q^{-1}) of dimension `dimension`.
    return -dimension * std::log(2.0 * std::numbers::pi * sigma2) + log_det_q -
           0.5 * quad_form / sigma2;
}

Eigen::MatrixXd& StepWorkspace::adjacency_buffer(int n) {
    adjacency_.setIdentity(n, n);
    return adjacency_;
}

StepTerms StepWorkspace::evaluate(const Eigen::Ref<const Eigen::MatrixXd>& adjacency,
                                  const Eigen::Ref<const PositionFrame>& mu_t,
                                  const Eigen::Ref<const PositionFrame>& mu_prev, double alpha,
                                  double beta) {
    const auto n = adjacency.rows();
    StepTerms terms;
    terms.dimension = static_cast<int>(n);
    if (n == 0) return terms;

    ego_ = adjacency.rowwise().sum();
    // A mu_prev = mu_prev + beta (mean - mu_prev)
    mean_.noalias() = adjacency * mu_prev;
    mean_.array().colwise() /= ego_.array();
    residual_ = mu_t - mu_prev - beta * (mean_ - mu_prev);

    precision_ = -alpha * adjacency;
    precision_.diagonal() = ego_;
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(precision_);
    if (llt.info() != Eigen::Success)
        throw FactorizationError("precision matrix is not positive definite");

    const auto& factor = precision_;  // lower triangle now holds L
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) log_det += std::log(factor(i, i));
    terms.log_det_q = 2.0 * log_det;
    // r'Qr = |L'r|^2
    mean_.noalias() = factor.triangularView<Eigen::Lower>().transpose() * residual_;
    terms.quad_form = mean_.squaredNorm();
    return terms;
}

StepTerms transition_terms(const PositionFrame& mu_t, const PositionFrame& mu_prev,
                           const AdjacencyMatrix& w_prev, double alpha, double beta) {
    if (mu_t.rows() != w_prev.size() || mu_prev.rows() != w_prev.size())
        throw std::invalid_argument("frame and adjacency sizes differ");
    StepWorkspace ws;
    return ws.evaluate(w_prev.dense(), mu_t, mu_prev, alpha, beta);
}

double transition_log_density(const PositionFrame& mu_t, const PositionFrame& mu_prev,
                              const AdjacencyMatrix& w_prev, double alpha, double beta,
                              double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
    return transition_terms(mu_t, mu_prev, w_prev, alpha, beta).log_density(sigma2);
}

CovariateMatrix phase_design(int steps, int during_start, int after_start) {
    if (steps < 1) throw std::invalid_argument("design needs at least one step");
    if (!(0 <= during_start && during_start < after_start && after_start <= steps - 1))
        throw std::invalid_argument("phase boundaries must be increasing and inside the horizon");
    CovariateMatrix x = CovariateMatrix::Zero(steps, 3);
    x.col(0).setOnes();
    for (int t = during_start; t < after_start; ++t) x(t, 1) = 1.0;
    for (int t = after_start; t < steps; ++t) x(t, 2) = 1.0;
    return x;
}

CovariateMatrix equal_phase_design(int steps) {
    if (steps < 3) {
        CovariateMatrix x = CovariateMatrix::Zero(steps, 3);
        x.col(0).setOnes();
        return x;
    }
    return phase_design(steps, steps / 3, 2 * steps / 3);
}

}  // namespace socmov
