#include <doctest.h>

#include "oracles.hpp"
#include "socmov/network.hpp"

using namespace socmov;

namespace {

CovariateMatrix intercept_only(int steps) { return CovariateMatrix::Ones(steps, 1); }

Eigen::VectorXd intercept_for(double p1) { return Eigen::VectorXd::Constant(1, logit(p1)); }

}  // namespace

TEST_CASE("transition probabilities") {
    auto tp = transition_probs(0.3, 0.0);
    CHECK(tp.p_1given0 == doctest::Approx(0.3));
    CHECK(tp.p_1given1 == doctest::Approx(0.3));
    tp = transition_probs(0.3, 1.0);
    CHECK(tp.p_1given0 == 0.0);
    CHECK(tp.p_1given1 == 1.0);
    tp = transition_probs(0.5, 0.88);
    CHECK(tp.p_1given0 == doctest::Approx(0.06));
    CHECK(tp.p_1given1 == doctest::Approx(0.94));
}

TEST_CASE("the edge chain is reversible with stationary Bernoulli(p1)") {
    for (double p1 : {0.01, 0.1, 0.37, 0.5, 0.8, 0.99})
        for (double phi : {0.0, 0.2, 0.5, 0.88, 1.0}) {
            const auto tp = transition_probs(p1, phi);
            CHECK(tp.p_1given0 <= p1 + 1e-15);
            CHECK(p1 <= tp.p_1given1 + 1e-15);
            CHECK(std::abs(p1 * (1.0 - tp.p_1given1) - (1.0 - p1) * tp.p_1given0) < 1e-15);
        }
}

TEST_CASE("simulated frames are symmetric with unit diagonal") {
    Rng rng(1);
    const auto net = simulate_network(6, 40, intercept_only(40), intercept_for(0.4), 0.6, rng);
    CHECK(net.steps() == 40);
    for (const auto& w : net.frames) {
        const Eigen::MatrixXd d = w.dense();
        CHECK(d.isApprox(d.transpose(), 0.0));
        CHECK(d.diagonal().isOnes());
    }
}

TEST_CASE("phi = 1 gives a static network and J = 1 a trivial one") {
    Rng rng(2);
    const auto net = simulate_network(5, 30, intercept_only(30), intercept_for(0.5), 1.0, rng);
    for (const auto& w : net.frames) CHECK(w == net.frames.front());

    const auto lone = simulate_network(1, 10, intercept_only(10), intercept_for(0.5), 0.3, rng);
    for (const auto& w : lone.frames) CHECK(w.dense() == Eigen::MatrixXd::Ones(1, 1));
}

TEST_CASE("edge frequency matches p1 at stationarity") {
    Rng rng(3);
    const auto net = simulate_network(2, 10000, intercept_only(10000), intercept_for(0.3), 0.5, rng);
    double freq = 0;
    for (const auto& w : net.frames) freq += w(0, 1);
    freq /= 10000.0;
    CHECK(std::abs(freq - 0.3) < 0.02);
}

TEST_CASE("phi = 0 frames are uncorrelated in time") {
    Rng rng(4);
    const int steps = 20000;
    const auto net = simulate_network(2, steps, intercept_only(steps), intercept_for(0.4), 0.0, rng);
    double m = 0;
    for (const auto& w : net.frames) m += w(0, 1);
    m /= steps;
    double num = 0, den = 0;
    for (int t = 0; t < steps; ++t) {
        const double a = net.frames[t](0, 1) - m;
        den += a * a;
        if (t + 1 < steps) num += a * (net.frames[t + 1](0, 1) - m);
    }
    // 4 standard errors of a lag-1 autocorrelation under independence.
    CHECK(std::abs(num / den) < 4.0 / std::sqrt(steps));
}

TEST_CASE("complete edge pmf") {
    CHECK(edge_log_pmf_complete(true, std::nullopt, 0.5, 0.3) == doctest::Approx(std::log(0.5)));
    CHECK(edge_log_pmf_complete(false, std::nullopt, 0.5, 0.3) == doctest::Approx(std::log(0.5)));
    CHECK(edge_log_pmf_complete(true, true, 0.4, 1.0) == 0.0);
    CHECK(edge_log_pmf_complete(true, false, 0.5, 0.88) == doctest::Approx(std::log(0.06)));
}

TEST_CASE("proxy edge pmf") {
    CHECK(proxy_edge_log_pmf(true, std::nullopt, PairMembership::newcomer, 0.5, 0.9) == doctest::Approx(std::log(0.5)));
    CHECK(proxy_edge_log_pmf(false, true, PairMembership::newcomer, 0.5, 0.9) == doctest::Approx(std::log(0.5)));
    CHECK(proxy_edge_log_pmf(false, true, PairMembership::returner, 0.5, 0.88) == doctest::Approx(std::log(0.06)));
    CHECK_THROWS_AS(proxy_edge_log_pmf(true, true, PairMembership::unobserved, 0.5, 0.5), ContractViolation);
    CHECK_THROWS_AS(proxy_edge_log_pmf(true, std::nullopt, PairMembership::returner, 0.5, 0.5), ContractViolation);

    for (double p1 : {0.1, 0.5, 0.93})
        for (double phi : {0.0, 0.4, 0.88})
            for (bool cur : {false, true})
                for (bool prev : {false, true})
                    CHECK(proxy_edge_log_pmf(cur, prev, PairMembership::returner, p1, phi) ==
                          edge_log_pmf_complete(cur, prev, p1, phi));
}

TEST_CASE("proxy network pmf equals the complete pmf without censoring") {
    Rng rng(5);
    const int steps = 25, n = 4;
    const CovariateMatrix x = equal_phase_design(steps);
    const Eigen::Vector3d delta(0.3, -1.0, 0.5);
    const auto net = simulate_network(n, steps, x, delta, 0.7, rng);

    std::vector<PairChain> chains;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) chains.push_back({i, j, 0, steps - 1, 0});
    ObservedNetwork observed(steps, chains);
    for (std::size_t c = 0; c < observed.chains().size(); ++c)
        for (int t = 0; t < steps; ++t)
            observed.set_state(c, t, net.frames[t](observed.chains()[c].first, observed.chains()[c].second));

    CHECK(proxy_network_log_pmf(observed, x, delta, 0.7) ==
          doctest::Approx(complete_network_log_pmf(net, x, delta, 0.7)).epsilon(1e-13));
}

TEST_CASE("single step with m absent edges") {
    std::vector<PairChain> chains;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) chains.push_back({i, j, 0, 0, 0});
    const ObservedNetwork observed(1, chains);
    CHECK(proxy_network_log_pmf(observed, intercept_only(1), intercept_for(0.5), 0.3) ==
          doctest::Approx(6 * std::log(0.5)));
}

TEST_CASE("proxy network pmf on a censored J=3, T=3 instance matches hand enumeration") {
    // Individuals A, B, C; C is missing at the middle step and returns with a
    // new label. Labels: 0=A, 1=B, 2=C(first run), 3=C(second run).
    const std::vector<PairChain> chains{{0, 1, 0, 2, 0}, {0, 2, 0, 0, 0}, {1, 2, 0, 0, 0},
                                        {0, 3, 2, 2, 0}, {1, 3, 2, 2, 0}};
    ObservedNetwork net(3, chains);
    const CovariateMatrix x = equal_phase_design(3);
    const Eigen::Vector3d delta(0.4, -0.7, 1.1);
    const double phi = 0.6;
    const double p[3] = {oracle::logistic(0.4), oracle::logistic(0.4 - 0.7), oracle::logistic(0.4 + 1.1)};

    for (int bits = 0; bits < (1 << 7); ++bits) {
        const bool ab0 = bits & 1, ab1 = bits & 2, ab2 = bits & 4, ac0 = bits & 8, bc0 = bits & 16,
                   ac2 = bits & 32, bc2 = bits & 64;
        net.set_state(0, 0, ab0);
        net.set_state(0, 1, ab1);
        net.set_state(0, 2, ab2);
        net.set_state(1, 0, ac0);
        net.set_state(2, 0, bc0);
        net.set_state(3, 2, ac2);
        net.set_state(4, 2, bc2);
        const double hand = oracle::edge_logpmf(ab0, -1, p[0], phi) + oracle::edge_logpmf(ac0, -1, p[0], phi) +
                            oracle::edge_logpmf(bc0, -1, p[0], phi) + oracle::edge_logpmf(ab1, ab0, p[1], phi) +
                            oracle::edge_logpmf(ab2, ab1, p[2], phi) + oracle::edge_logpmf(ac2, -1, p[2], phi) +
                            oracle::edge_logpmf(bc2, -1, p[2], phi);
        CHECK(proxy_network_log_pmf(net, x, delta, phi) == doctest::Approx(hand).epsilon(1e-13));
    }
    CHECK(net.membership(0, 0) == PairMembership::newcomer);
    CHECK(net.membership(0, 1) == PairMembership::returner);
    CHECK(net.membership(1, 1) == PairMembership::unobserved);
    CHECK(net.membership(3, 2) == PairMembership::newcomer);
}

TEST_CASE("observed network density") {
    ObservedNetwork net(2, {{0, 1, 0, 1, 0}, {0, 2, 1, 1, 0}});
    CHECK(net.density(0) == 0.0);
    net.set_state(0, 1, true);
    CHECK(net.density(1) == 0.5);
    ObservedNetwork lone(1, {});
    CHECK(std::isnan(lone.density(0)));
}
