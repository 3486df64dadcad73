#pragma once

/// Convergence diagnostics across chains: split R-hat and effective sample
/// size.

#include <vector>

#include <Eigen/Core>

namespace socmov {

/// Split-chain potential scale reduction. Each chain is halved; the result is
/// NaN when the pooled within-chain variance is zero.
double split_rhat(const std::vector<Eigen::VectorXd>& chains);

/// Multi-chain effective sample size from variogram autocorrelations,
/// truncated at the first negative sum of an adjacent pair of lags. NaN when
/// the draws have no variance.
double effective_sample_size(const std::vector<Eigen::VectorXd>& chains);

}  // namespace socmov
