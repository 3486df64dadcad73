#include "socmov/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace socmov {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Pooled {
    double within = 0;     // W
    double between_n = 0;  // B / n
    double n = 0;
    double m = 0;
};

Pooled pool(const std::vector<Eigen::VectorXd>& chains) {
    Pooled p;
    p.m = static_cast<double>(chains.size());
    p.n = static_cast<double>(chains.front().size());
    Eigen::VectorXd means(chains.size());
    for (std::size_t j = 0; j < chains.size(); ++j) {
        means(static_cast<Eigen::Index>(j)) = chains[j].mean();
        p.within += (chains[j].array() - chains[j].mean()).square().sum() / (p.n - 1.0);
    }
    p.within /= p.m;
    p.between_n = p.m > 1 ? (means.array() - means.mean()).square().sum() / (p.m - 1.0) : 0.0;
    return p;
}

std::vector<Eigen::VectorXd> split_halves(const std::vector<Eigen::VectorXd>& chains) {
    if (chains.empty()) throw std::invalid_argument("no chains");
    const auto len = chains.front().size();
    for (const auto& c : chains)
        if (c.size() != len) throw std::invalid_argument("chains differ in length");
    if (len < 4) throw std::invalid_argument("chains need at least 4 draws");
    const auto half = len / 2;
    std::vector<Eigen::VectorXd> out;
    for (const auto& c : chains) {
        out.emplace_back(c.head(half));
        out.emplace_back(c.tail(half));
    }
    return out;
}

}  // namespace

double split_rhat(const std::vector<Eigen::VectorXd>& chains) {
    const auto halves = split_halves(chains);
    const Pooled p = pool(halves);
    if (!(p.within > 0)) return kNaN;
    const double var_plus = (p.n - 1.0) / p.n * p.within + p.between_n;
    return std::sqrt(var_plus / p.within);
}

double effective_sample_size(const std::vector<Eigen::VectorXd>& chains) {
    const auto halves = split_halves(chains);
    const Pooled p = pool(halves);
    const double var_plus = (p.n - 1.0) / p.n * p.within + p.between_n;
    if (!(var_plus > 0)) return kNaN;

    const auto n = static_cast<Eigen::Index>(p.n);
    auto rho = [&](Eigen::Index lag) {
        double v = 0.0;
        for (const auto& c : halves) v += (c.tail(n - lag) - c.head(n - lag)).squaredNorm();
        v /= p.m * static_cast<double>(n - lag);
        return 1.0 - v / (2.0 * var_plus);
    };
    // Geyer initial positive sequence over lag pairs (0,1), (2,3), ...
    double sum = 0.0;
    for (Eigen::Index lag = 0; lag + 1 < n; lag += 2) {
        const double pair = rho(lag) + rho(lag + 1);
        if (pair < 0) break;
        sum += pair;
    }
    // sum includes rho(0) = 1: tau = -1 + 2 * sum.
    const double tau = std::max(-1.0 + 2.0 * sum, 1.0 / std::log10(p.m * p.n));
    return p.m * p.n / tau;
}

}  // namespace socmov
