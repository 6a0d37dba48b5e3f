#include <doctest.h>

#include "dgr/distributions.hpp"
#include "oracles.hpp"

using namespace dgr;
using doctest::Approx;

TEST_CASE("Beta central moments") {
    const auto uniform = beta_central_moments(0.5, 2.0);
    CHECK(uniform.mu2 == Approx(1.0 / 12.0).epsilon(1e-14));
    CHECK(uniform.mu3 == Approx(0.0));
    CHECK(uniform.mu4_minus_mu2sq == Approx(1.0 / 180.0).epsilon(1e-14));
    CHECK(beta_central_moments(0.5, 37.0).mu3 == 0.0);
    CHECK(beta_central_moments(0.45, 50.0).mu2 == Approx(0.2475 / 51.0).epsilon(1e-14));

    CHECK_THROWS_AS(beta_central_moments(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(beta_central_moments(0.5, -1.0), std::domain_error);
    for (double pi : {0.01, 0.3, 0.5, 0.9}) {
        for (double c : {0.1, 1.0, 50.0, 1e4}) {
            CHECK(beta_central_moments(pi, c).mu2 > 0.0);
        }
    }
}

TEST_CASE("Beta moments against Monte Carlo") {
    RngStream rng(2026, 1);
    const double pi = 0.3;
    const double c = 8.0;
    const auto w = sample_beta(c * pi, c * (1 - pi), rng, 1000000);
    const double m = w.mean();
    const Eigen::ArrayXd d = w.array() - m;
    const double mu2 = d.square().mean();
    const double mu3 = d.cube().mean();
    const double mu4 = d.square().square().mean();
    const auto exact = beta_central_moments(pi, c);
    const double n = static_cast<double>(w.size());
    CHECK(std::abs(m - pi) < 4 * std::sqrt(exact.mu2 / n));
    CHECK(mu2 == Approx(exact.mu2).epsilon(0.01));
    CHECK(mu3 == Approx(exact.mu3).epsilon(0.03));
    CHECK(mu4 - mu2 * mu2 == Approx(exact.mu4_minus_mu2sq).epsilon(0.02));
}

TEST_CASE("Beta-prime moments") {
    const auto m = beta_prime_moments(10.0, 0.5);
    REQUIRE(m.mean);
    CHECK(*m.mean == Approx(1.25));
    CHECK_FALSE(beta_prime_moments(4.0, 0.5).variance);
    CHECK(beta_prime_moments(4.0, 0.5).mean);
    CHECK_FALSE(beta_prime_moments(2.0, 0.5).mean);
    CHECK(*beta_prime_moments(1e9, 0.25).mean == Approx(3.0).epsilon(1e-6));

    // Monte Carlo over Beta(cF, c(1-F)) draws
    RngStream rng(11, 0);
    const double c = 20.0;
    const double F = 0.6;
    const Eigen::ArrayXd w = sample_beta(c * F, c * (1 - F), rng, 1000000).array();
    const Eigen::ArrayXd ratio = (1 - w) / w;
    const auto exact = beta_prime_moments(c, F);
    const double mean = ratio.mean();
    const double var = (ratio - mean).square().sum() / static_cast<double>(ratio.size() - 1);
    CHECK(std::abs(mean - *exact.mean) < 4 * std::sqrt(*exact.variance / static_cast<double>(ratio.size())));
    CHECK(var == Approx(*exact.variance).epsilon(0.02));
}

TEST_CASE("Gamma and negative binomial laws of large numbers") {
    RngStream rng(2026, 2);
    const double mu = 100.0;
    const auto g = sample_gamma(2.0, 2.0 / mu, rng, 1000000);
    CHECK(std::abs(g.mean() - mu) < 0.5);

    const auto nb = sample_negbin(50.0, 0.5, rng, 1000000);
    CHECK(nb.mean() == Approx(50.0).epsilon(0.01));
    CHECK(sample_negbin(3.0, 1.0, rng) == 0);

    const auto po = sample_poisson(3.5, rng, 1000000);
    CHECK(po.mean() == Approx(3.5).epsilon(0.01));
}

TEST_CASE("small Gamma shapes stay finite in log space") {
    RngStream rng(5, 5);
    for (int i = 0; i < 1000; ++i) {
        const double lg = sample_log_gamma(1e-3, rng);
        CHECK(std::isfinite(lg));
    }
    // E[log G] for shape a is digamma(a); at a = 1 that is -Euler's gamma
    double s = 0.0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
        s += sample_log_gamma(1.0, rng);
    }
    CHECK(s / n == Approx(-0.5772156649).epsilon(0.01));
}

TEST_CASE("Dirichlet draws lie on the open simplex") {
    RngStream rng(3, 3);
    Eigen::VectorXd alpha(5);
    alpha << 22.5, 12.5, 7.5, 5.0, 2.5;
    const auto d = sample_dirichlet(alpha, rng, 10000);
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        CHECK(d.row(i).sum() == Approx(1.0).epsilon(1e-12));
        CHECK(d.row(i).minCoeff() > 0.0);
    }
}

TEST_CASE("Dirichlet aggregation: partial sums are Beta") {
    const double c = 50.0;
    Eigen::VectorXd pi(5);
    pi << 0.45, 0.25, 0.15, 0.10, 0.05;
    RngStream rng(2026, 4);
    const std::size_t n = 100000;
    const auto d = sample_dirichlet(c * pi, rng, static_cast<Eigen::Index>(n));
    for (int k : {0, 1, 3}) {
        const double Fk = pi.head(k + 1).sum();
        std::vector<double> partial(n);
        for (std::size_t i = 0; i < n; ++i) {
            partial[i] = d.row(static_cast<Eigen::Index>(i)).head(k + 1).sum();
        }
        const auto reference = oracle::std_beta(c * Fk, c * (1 - Fk), n, 100 + static_cast<std::uint64_t>(k));
        CHECK(oracle::ks_two_sample_pvalue(partial, reference) > 1e-3);
    }
}

TEST_CASE("Gamma-Dirichlet factorisation") {
    const double shape = 3.0;
    const int K = 4;
    const std::size_t n = 100000;
    RngStream rng(2026, 5);
    std::vector<double> total(n);
    std::vector<double> first(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto g = sample_gamma(shape, 0.2, rng, K);
        total[i] = g.sum();
        first[i] = g[0] / total[i];
    }
    CHECK(std::abs(oracle::correlation(total, first)) < 4.0 / std::sqrt(static_cast<double>(n)));
    const auto reference = oracle::std_beta(shape, (K - 1) * shape, n, 77);
    CHECK(oracle::ks_two_sample_pvalue(first, reference) > 1e-3);
}

TEST_CASE("multinomial counts") {
    RngStream rng(1, 9);
    Eigen::VectorXd p(3);
    p << 0.5, 0.3, 0.2;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(3);
    for (int i = 0; i < 20000; ++i) {
        const auto x = sample_multinomial(100, p, rng);
        CHECK(x.sum() == 100);
        acc += x.cast<double>();
    }
    CHECK(acc[0] / 20000 == Approx(50.0).epsilon(0.005));
    CHECK(acc[2] / 20000 == Approx(20.0).epsilon(0.01));
}

TEST_CASE("Tweedie compound representation") {
    const auto tc = tweedie_compound(1.0, 1.0, 1.5);
    CHECK(tc.lambda == Approx(2.0));
    CHECK(tc.severity_shape == Approx(1.0));
    CHECK(tc.severity_scale == Approx(0.5));

    RngStream rng(2026, 6);
    int zeros = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        zeros += sample_tweedie_cell(1.0, 1.0, 1.5, rng) == 0.0;
    }
    const double p0 = std::exp(-2.0);
    CHECK(std::abs(zeros / double(n) - p0) < 4 * std::sqrt(p0 * (1 - p0) / n));

    CHECK(sample_tweedie_cell(0.0, 1.0, 1.5, rng) == 0.0);
    CHECK_THROWS_WITH(sample_tweedie_cell(1.0, 1.0, 2.0, rng), doctest::Contains("power"));

    std::vector<double> x(n);
    for (auto& v : x) {
        v = sample_tweedie_cell(10.0, 2.0, 1.8, rng);
    }
    CHECK(oracle::mean(x) == Approx(10.0).epsilon(0.01));
    CHECK(oracle::variance(x) == Approx(2.0 * std::pow(10.0, 1.8)).epsilon(0.03));
}

TEST_CASE("streams are deterministic and keyed") {
    auto a = keyed_stream(2026, {1, 2, 3});
    auto b = keyed_stream(2026, {1, 2, 3});
    auto c = keyed_stream(2026, {1, 2, 4});
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        differs |= x != c();
    }
    CHECK(differs);
    const RngStream parent(9, 9);
    auto copy = parent;
    (void)copy();
    CHECK(parent.split(4).stream_id() == copy.split(4).stream_id());
}
