#pragma once

// Test-only reference computations. Everything here goes through dense
// covariance matrices, explicit loops or enumeration so that it shares no
// code path with the library routines it checks.

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "socmov/model.hpp"

namespace oracle {

inline double logistic(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

/// log N(x; mean, cov) from an LU inverse and determinant.
inline double gaussian_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                              const Eigen::MatrixXd& cov) {
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(cov);
    const Eigen::VectorXd r = x - mean;
    const double quad = r.dot(lu.inverse() * r);
    return -0.5 * static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi) -
           0.5 * std::log(lu.determinant()) - 0.5 * quad;
}

/// Dense 0/1 matrix with unit diagonal.
inline Eigen::MatrixXd with_self_edges(Eigen::MatrixXd w) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, i) = 1.0;
    return w;
}

/// Transition density with the stacked 2J-dimensional covariance
/// kron(I_2, sigma2 Q^{-1}) and a loop-built attraction mean.
inline double transition_logpdf(const socmov::PositionFrame& mu_t, const socmov::PositionFrame& mu_prev,
                                 const Eigen::MatrixXd& w_in, double alpha, double beta, double sigma2) {
    const auto j = mu_t.rows();
    const Eigen::MatrixXd w = with_self_edges(w_in);
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(j, j);
    for (Eigen::Index a = 0; a < j; ++a) {
        double ego = 0.0;
        for (Eigen::Index b = 0; b < j; ++b) ego += w(a, b);
        for (Eigen::Index b = 0; b < j; ++b) q(a, b) = (a == b) ? ego : -alpha * w(a, b);
    }
    const Eigen::MatrixXd cov_axis = sigma2 * q.inverse();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2 * j, 2 * j);
    cov.topLeftCorner(j, j) = cov_axis;
    cov.bottomRightCorner(j, j) = cov_axis;

    Eigen::VectorXd x(2 * j), mean(2 * j);
    for (Eigen::Index a = 0; a < j; ++a) {
        double ego = 0.0, mx = 0.0, my = 0.0;
        for (Eigen::Index b = 0; b < j; ++b) {
            ego += w(a, b);
            mx += w(a, b) * mu_prev(b, 0);
            my += w(a, b) * mu_prev(b, 1);
        }
        mean(a) = mu_prev(a, 0) + beta * (mx / ego - mu_prev(a, 0));
        mean(j + a) = mu_prev(a, 1) + beta * (my / ego - mu_prev(a, 1));
        x(a) = mu_t(a, 0);
        x(j + a) = mu_t(a, 1);
    }
    return gaussian_logpdf(x, mean, cov);
}

inline double log_bern(bool v, double p) { return v ? std::log(p) : std::log(1.0 - p); }

/// Markov edge log pmf written out from the transition table.
inline double edge_logpmf(bool cur, int prev /* -1 none */, double p1, double phi) {
    if (prev < 0) return log_bern(cur, p1);
    const double p10 = (1.0 - phi) * p1;
    const double p11 = 1.0 - (1.0 - phi) * (1.0 - p1);
    return log_bern(cur, prev ? p11 : p10);
}

}  // namespace oracle
