#include <doctest.h>

#include <cmath>
#include <random>

#include "socmov/diagnostics.hpp"

using namespace socmov;

namespace {

Eigen::VectorXd ar1(int n, double rho, std::mt19937_64& rng, double shift = 0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd x(n);
    double v = normal(rng) / std::sqrt(1 - rho * rho);
    for (int i = 0; i < n; ++i) {
        v = rho * v + normal(rng);
        x(i) = v + shift;
    }
    return x;
}

}  // namespace

TEST_CASE("constant chains leave R-hat undefined") {
    CHECK(std::isnan(split_rhat({Eigen::VectorXd::Constant(100, 2.0)})));
    CHECK(std::isnan(effective_sample_size({Eigen::VectorXd::Constant(100, 2.0)})));
}

TEST_CASE("identical chains with matching halves") {
    // Halves with equal means have no between-chain spread, which leaves
    // only the (n-1)/n within-chain factor of the pooled variance.
    Eigen::VectorXd half(50);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& v : half) v = normal(rng);
    Eigen::VectorXd chain(100);
    chain << half, half;
    CHECK(split_rhat({chain, chain}) == doctest::Approx(std::sqrt(49.0 / 50.0)).epsilon(1e-14));
}

TEST_CASE("independent well-mixed chains give R-hat near 1") {
    std::mt19937_64 rng(2);
    const std::vector<Eigen::VectorXd> chains{ar1(2000, 0.5, rng), ar1(2000, 0.5, rng), ar1(2000, 0.5, rng)};
    CHECK(split_rhat(chains) < 1.01);
    CHECK(split_rhat(chains) > 0.99);
}

TEST_CASE("chains stuck in different places give large R-hat") {
    std::mt19937_64 rng(3);
    CHECK(split_rhat({ar1(500, 0.2, rng, 0.0), ar1(500, 0.2, rng, 5.0)}) > 2.0);
}

TEST_CASE("ESS of white noise is close to the draw count") {
    std::mt19937_64 rng(4);
    const double ess = effective_sample_size({ar1(4000, 0.0, rng), ar1(4000, 0.0, rng)});
    CHECK(ess > 7000);
    CHECK(ess < 9000);
}

TEST_CASE("ESS of an AR(1) chain matches (1-rho)/(1+rho)") {
    std::mt19937_64 rng(5);
    const double rho = 0.8;
    std::vector<Eigen::VectorXd> chains;
    for (int k = 0; k < 4; ++k) chains.push_back(ar1(20000, rho, rng));
    const double expected = 80000.0 * (1 - rho) / (1 + rho);
    CHECK(effective_sample_size(chains) == doctest::Approx(expected).epsilon(0.15));
}

TEST_CASE("diagnostic input validation") {
    CHECK_THROWS_AS(split_rhat({}), std::invalid_argument);
    CHECK_THROWS_AS(split_rhat({Eigen::VectorXd::Zero(3)}), std::invalid_argument);
    CHECK_THROWS_AS(split_rhat({Eigen::VectorXd::Zero(10), Eigen::VectorXd::Zero(12)}), std::invalid_argument);
}
