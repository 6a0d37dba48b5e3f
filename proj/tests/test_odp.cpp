#include <doctest.h>

#include "dgr/odp.hpp"
#include "dgr/simlab.hpp"
#include "oracles.hpp"

using namespace dgr;
using doctest::Approx;

namespace {

void check_margins(const Triangle& t)
{
    const auto fit = odp_fit(t);
    const Eigen::MatrixXd ipf = oracle::ipf_fitted(t.dense());
    const int I = t.accident_years();
    const int J = t.lags();
    for (int r = 0; r < I; ++r) {
        double fr = 0.0;
        double xr = 0.0;
        for (int j = 0; j < J && t.observed(r, j); ++j) {
            fr += fit.fitted(r, j);
            xr += t(r, j);
            CHECK(fit.fitted(r, j) == Approx(ipf(r, j)).epsilon(1e-6));
        }
        CHECK(fr == Approx(xr).epsilon(1e-8));
    }
    for (int j = 0; j < J; ++j) {
        double fc = 0.0;
        double xc = 0.0;
        for (int r = 0; r < I && t.observed(r, j); ++r) {
            fc += fit.fitted(r, j);
            xc += t(r, j);
        }
        CHECK(fc == Approx(xc).epsilon(1e-8));
    }
}

} // namespace

TEST_CASE("ODP fitted values solve the Poisson margin equations") {
    check_margins(load_triangle(DGR_DATA_DIR "/taylor_ashe.csv", CsvLayout::long_format));
    SimConfig cfg;
    cfg.I = 8;
    for (int rep = 0; rep < 5; ++rep) {
        check_margins(generate_triangle(cfg, rep).triangle);
    }
}

TEST_CASE("ODP fit bookkeeping") {
    const auto t = load_triangle(DGR_DATA_DIR "/taylor_ashe.csv", CsvLayout::long_format);
    const auto fit = odp_fit(t);
    CHECK(fit.n == 55);
    CHECK(fit.p == 19);
    CHECK(fit.dof == 36);
    CHECK(fit.cl_reserves.sum() == Approx(cl_ultimates(t, chain_ladder_pattern(t)).total_reserve()));
    double chi2 = 0.0;
    for (int r = 0; r < 10; ++r) {
        for (int j = 0; r + j <= 9; ++j) {
            const double m = fit.fitted(r, j);
            chi2 += (t(r, j) - m) * (t(r, j) - m) / m;
        }
    }
    CHECK(fit.dispersion == Approx(chi2 / 36.0));
    CHECK(fit.residual_pool.size() == 55);
}

TEST_CASE("saturated triangle") {
    Eigen::MatrixXd m(2, 2);
    m << 100, 50, 200, 0;
    CHECK_THROWS_AS(odp_fit(Triangle(m)), OdpError);
}

TEST_CASE("noiseless triangle gives a degenerate bootstrap") {
    const Eigen::Vector4d a(100, 200, 150, 300);
    const Eigen::Vector4d b(0.5, 0.3, 0.15, 0.05);
    const Triangle t(a * b.transpose());
    const auto fit = odp_fit(t);
    CHECK(fit.dispersion == Approx(0.0).epsilon(1e-12));
    CHECK(fit.residuals.array().isNaN().count() + (fit.residuals.array().abs() < 1e-9).count() == 16);
    BootstrapOptions opts;
    opts.B = 50;
    const auto d = odp_bootstrap(fit, opts);
    const double cl = fit.cl_reserves.sum();
    CHECK(d.total.minCoeff() == Approx(cl));
    CHECK(d.total.maxCoeff() == Approx(cl));
}

TEST_CASE("ODP bootstrap is reproducible across thread counts") {
    const auto t = load_triangle(DGR_DATA_DIR "/raa.csv", CsvLayout::long_format);
    const auto fit = odp_fit(t);
    BootstrapOptions opts;
    opts.B = 997;
    const auto one = odp_bootstrap(fit, opts);
    opts.threads = 4;
    const auto four = odp_bootstrap(fit, opts);
    CHECK(one.per_year == four.per_year);
    CHECK(one.rejected == four.rejected);
    CHECK(one.summary.mean.has_value());
    CHECK(*one.summary.mean == Approx(fit.cl_reserves.sum()).epsilon(0.15));
}
