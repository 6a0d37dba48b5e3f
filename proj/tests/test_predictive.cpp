#include <doctest.h>

#include "dgr/concentration.hpp"
#include "dgr/predictive.hpp"
#include "oracles.hpp"

using namespace dgr;
using doctest::Approx;

namespace {

DiagonalSummary single_row(double x, int lag)
{
    DiagonalSummary d;
    d.observed = Eigen::VectorXd::Constant(1, x);
    d.dev_lag = Eigen::VectorXi::Constant(1, lag);
    return d;
}

DevelopmentPattern two_lag(double F0)
{
    return DevelopmentPattern::from_cumulative((Eigen::VectorXd(2) << F0, 1.0).finished());
}

Triangle taylor_ashe() { return load_triangle(DGR_DATA_DIR "/taylor_ashe.csv", CsvLayout::long_format); }

} // namespace

TEST_CASE("type 7 quantiles") {
    Eigen::VectorXd x(5);
    x << 5, 1, 4, 2, 3;
    CHECK(quantile(x, 0.5) == 3.0);
    CHECK(quantile(x, 0.0) == 1.0);
    CHECK(quantile(x, 1.0) == 5.0);
    CHECK(quantile(x, 0.1) == Approx(1.4));
    CHECK_THROWS_AS(quantile(x, 1.5), std::invalid_argument);
}

TEST_CASE("single-row bootstrap mean matches the Beta-prime mean") {
    BootstrapOptions opts;
    opts.B = 1000000;
    opts.threads = 0;
    const auto d = multinomial_bootstrap(single_row(100.0, 0), two_lag(0.5), 10.0, opts);
    CHECK(d.summary.mean.value() == Approx(125.0).epsilon(0.01));
    const auto bp = beta_prime_moments(10.0, 0.5);
    CHECK(d.summary.sd == Approx(100.0 * std::sqrt(*bp.variance)).epsilon(0.03));
}

TEST_CASE("developed rows are degenerate at zero") {
    BootstrapOptions opts;
    opts.B = 100;
    DiagonalSummary d;
    d.observed = Eigen::Vector2d(100.0, 50.0);
    d.dev_lag = Eigen::Vector2i(1, 0);
    const auto r = multinomial_bootstrap(d, two_lag(0.5), 50.0, opts);
    CHECK(r.rows[0].status == RowStatus::fully_developed);
    CHECK(r.per_year.col(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.rows[1].status == RowStatus::included);
    // total equals the sum of the per-year draws
    CHECK((r.total - r.per_year.rowwise().sum()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.total.minCoeff() >= 0.0);
}

TEST_CASE("inclusion and mean-suppression thresholds") {
    DiagonalSummary d;
    d.observed = Eigen::Vector3d(100.0, 100.0, 100.0);
    d.dev_lag = Eigen::Vector3i(0, 1, 2);
    const auto p = DevelopmentPattern::from_cumulative((Eigen::VectorXd(4) << 0.04, 0.4, 0.9, 1.0).finished());
    BootstrapOptions opts;
    opts.B = 200;
    // c = 10: cF = 0.4 (excluded), 4 (included), 9 (included)
    auto r = multinomial_bootstrap(d, p, 10.0, opts);
    CHECK(r.rows[0].status == RowStatus::excluded);
    CHECK(r.excluded_point_reserve == Approx(100.0 * 0.96 / 0.04 + 100.0 * 0.6 / 0.4));
    CHECK(r.per_year.col(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.rows[1].status == RowStatus::excluded); // 4 < 5
    CHECK(r.summary.mean.has_value());

    opts.inclusion_threshold = 1.0;
    r = multinomial_bootstrap(d, p, 5.0, opts); // cF = 0.2, 2, 4.5
    CHECK(r.rows[0].status == RowStatus::excluded);
    CHECK(r.rows[1].status == RowStatus::mean_suppressed);
    CHECK(r.rows[2].status == RowStatus::included);
    CHECK_FALSE(r.summary.mean.has_value());
    CHECK_FALSE(r.row_summary(1).mean.has_value());
    CHECK(r.row_summary(2).mean.has_value());

    opts.inclusion_threshold = 100.0;
    CHECK_THROWS_AS(multinomial_bootstrap(d, p, 5.0, opts), std::domain_error);
}

TEST_CASE("argument validation") {
    BootstrapOptions opts;
    opts.B = 0;
    CHECK_THROWS_AS(multinomial_bootstrap(single_row(1, 0), two_lag(0.5), 10.0, opts), std::invalid_argument);
    opts.B = 10;
    CHECK_THROWS_AS(multinomial_bootstrap(single_row(1, 0), two_lag(0.5), -1.0, opts), std::invalid_argument);
    CHECK_THROWS_AS(multinomial_bootstrap(single_row(std::nan(""), 0), two_lag(0.5), 10.0, opts),
                    std::invalid_argument);
    CHECK_THROWS_AS(bf_bootstrap(single_row(1, 0), Eigen::VectorXd::Ones(2), 1.0, two_lag(0.5), 10.0, opts),
                    std::invalid_argument);
}

TEST_CASE("summary quantiles are ordered") {
    const auto t = taylor_ashe();
    BootstrapOptions opts;
    opts.B = 2000;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        opts.seed = seed;
        const auto d = multinomial_bootstrap(latest_diagonal(t), chain_ladder_pattern(t), 30.0, opts);
        const auto& s = d.summary;
        CHECK(s.q05 <= s.q25);
        CHECK(s.q25 <= s.q50);
        CHECK(s.q50 <= s.q75);
        CHECK(s.q75 <= s.q95);
    }
}

TEST_CASE("bit-identical across thread counts") {
    const auto t = taylor_ashe();
    BootstrapOptions opts;
    opts.B = 3001;
    opts.seed = 2026;
    const auto diag = latest_diagonal(t);
    const auto p = chain_ladder_pattern(t);
    const auto one = multinomial_bootstrap(diag, p, 107.7, opts);
    for (int threads : {2, 3, 8}) {
        opts.threads = threads;
        const auto many = multinomial_bootstrap(diag, p, 107.7, opts);
        CHECK(one.per_year == many.per_year);
        CHECK(one.summary.sd == many.summary.sd);
    }
}

TEST_CASE("excluding a row does not shift other rows' draws") {
    DiagonalSummary d;
    d.observed = Eigen::Vector2d(100.0, 100.0);
    d.dev_lag = Eigen::Vector2i(0, 1);
    const auto p = DevelopmentPattern::from_cumulative((Eigen::VectorXd(3) << 0.1, 0.6, 1.0).finished());
    BootstrapOptions opts;
    opts.B = 50;
    opts.inclusion_threshold = 0.0;
    const auto all = multinomial_bootstrap(d, p, 20.0, opts);
    opts.inclusion_threshold = 5.0;
    const auto some = multinomial_bootstrap(d, p, 20.0, opts);
    CHECK(some.rows[0].status == RowStatus::excluded);
    CHECK(all.per_year.col(1) == some.per_year.col(1));
}

TEST_CASE("large c concentrates on the CL reserve") {
    const auto t = taylor_ashe();
    BootstrapOptions opts;
    opts.B = 100000;
    opts.threads = 0;
    const auto p = chain_ladder_pattern(t);
    const auto d = multinomial_bootstrap(latest_diagonal(t), p, 1e6, opts);
    const double cl = cl_ultimates(t, p).total_reserve();
    CHECK(std::abs(*d.summary.mean - cl) / cl < 0.01);
}

TEST_CASE("BF bootstrap") {
    DiagonalSummary d;
    d.observed = Eigen::Vector2d(100.0, 10.0);
    d.dev_lag = Eigen::Vector2i(1, 0);
    const Eigen::Vector2d exposure(10.0, 20.0);
    BootstrapOptions opts;
    opts.B = 400000;
    opts.threads = 0;
    // tiny c still includes every open row: no ratio, no exclusion
    const auto r = bf_bootstrap(d, exposure, 3.0, two_lag(0.3), 0.5, opts);
    CHECK(r.rows[0].status == RowStatus::fully_developed);
    CHECK(r.rows[1].status == RowStatus::included);
    CHECK(r.point_reserve == Approx(20.0 * 3.0 * 0.7));
    CHECK(*r.summary.mean == Approx(42.0).epsilon(0.01));
    CHECK(r.total.maxCoeff() <= 60.0);
}

TEST_CASE("delta method") {
    CHECK(delta_method_variance(100.0, 0.5, 50.0) == Approx(784.31).epsilon(1e-5));
    CHECK(delta_method_variance(100.0, 1.0 - 1e-12, 50.0) < 1e-6);
    CHECK_THROWS_AS(delta_method_variance(1.0, 1.0, 5.0), std::domain_error);

    BootstrapOptions opts;
    opts.B = 400000;
    opts.threads = 0;
    const auto d = multinomial_bootstrap(single_row(1000.0, 0), two_lag(0.7), 200.0, opts);
    CHECK(d.summary.sd * d.summary.sd == Approx(delta_method_variance(1000.0, 0.7, 200.0)).epsilon(0.15));
}

TEST_CASE("IBNP moments") {
    const auto m = ibnp_exact_moments(100.0, 0.5, 50.0);
    CHECK(m.cv2 == Approx(0.04));
    CHECK(m.cv2_approx == Approx(0.04));
    CHECK(*m.mean == Approx(100.0 * 0.5 / (0.5 - 0.02)));
    CHECK(m.cl_reserve == Approx(100.0));
    CHECK_FALSE(ibnp_exact_moments(100.0, 0.5, 2.0).mean);
    CHECK(*ibnp_exact_moments(100.0, 0.25, 1e10).mean == Approx(300.0).epsilon(1e-6));
    const auto bp = beta_prime_moments(50.0, 0.5);
    CHECK(*m.cv2_beta_prime == Approx(*bp.variance / (*bp.mean * *bp.mean)));
}

TEST_CASE("negative binomial IBNR") {
    const auto lim = negbin_ibnr(50, 0.8);
    CHECK(lim.r == 50.0);
    CHECK(lim.p == 0.8);
    CHECK(lim.mean == Approx(12.5));

    const auto fr = negbin_ibnr(40, 0.5, 2.0, 100.0);
    CHECK(fr.r == 42.0);
    CHECK(fr.p == Approx(52.0 / 102.0));
    CHECK(fr.mean == Approx(40.385).epsilon(1e-4));
    CHECK(fr.variance == Approx(fr.mean / fr.p));

    const auto done = negbin_ibnr(30, 1.0);
    CHECK(done.mean == 0.0);
    RngStream rng(1, 1);
    CHECK(sample_ibnr(done, rng, 100).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(negbin_ibnr(30, 0.5, 3.0), std::invalid_argument);

    // preservation of point estimates: the predictive mean is the CL count estimate
    for (double n : {1.0, 17.0, 250.0}) {
        for (double F : {0.1, 0.45, 0.9}) {
            CHECK(negbin_ibnr(n, F).mean == Approx(n * (1 - F) / F));
        }
    }
    const auto draws = sample_ibnr(fr, rng, 400000);
    CHECK(draws.mean() == Approx(fr.mean).epsilon(0.01));
}
