#include <doctest.h>

#include "dgr/patterns.hpp"
#include "oracles.hpp"

using namespace dgr;
using doctest::Approx;

namespace {

Triangle two_by_two()
{
    Eigen::MatrixXd m(2, 2);
    m << 100, 50, 200, 0;
    return Triangle(m);
}

Triangle taylor_ashe() { return load_triangle(DGR_DATA_DIR "/taylor_ashe.csv", CsvLayout::long_format); }

} // namespace

TEST_CASE("chain ladder on the 2x2 example") {
    const auto fit = chain_ladder(two_by_two());
    CHECK(fit.link_ratios[0] == Approx(1.5));
    CHECK(fit.pattern.F()[0] == Approx(2.0 / 3.0));
    CHECK(fit.pattern.F()[1] == 1.0);
    CHECK(fit.pattern.pi()[1] == Approx(1.0 / 3.0));

    const auto u = cl_ultimates(two_by_two(), fit.pattern);
    CHECK(u.ultimates[0] == Approx(150.0)); // fully developed
    CHECK(u.reserves[0] == 0.0);
    CHECK(u.ultimates[1] == Approx(300.0));
    CHECK(u.reserves[1] == Approx(100.0));
}

TEST_CASE("gross-up by F") {
    Eigen::MatrixXd m(2, 2);
    m << 150, 0, 150, 0;
    const auto p = DevelopmentPattern::from_cumulative((Eigen::VectorXd(2) << 2.0 / 3.0, 1.0).finished());
    const auto u = cl_ultimates(Triangle(m), p);
    CHECK(u.ultimates[1] == Approx(225.0));
    CHECK(u.reserves[1] == Approx(75.0));
}

TEST_CASE("pattern invariants") {
    const auto p = DevelopmentPattern::from_proportions((Eigen::VectorXd(4) << 3, 2, 0, 1).finished());
    CHECK(p.pi().sum() == Approx(1.0).epsilon(1e-12));
    CHECK(p.pi().minCoeff() > 0.0);
    CHECK(p.floored() == std::vector<int>{2});
    CHECK(p.F()[3] == 1.0);
    for (int j = 1; j < 4; ++j) {
        CHECK(p.F()[j] > p.F()[j - 1]);
    }
    CHECK(p.F_at(3) == 1.0);
    CHECK(p.F_at(7) == 1.0);
    CHECK_THROWS_AS(DevelopmentPattern::from_proportions(Eigen::VectorXd::Ones(1)), std::invalid_argument);
}

TEST_CASE("link ratio preconditions") {
    Eigen::MatrixXd m(2, 2);
    m << 0, 5, 0, 0;
    CHECK_THROWS_AS(link_ratios(Triangle(m)), std::domain_error);
    CHECK_THROWS_AS(link_ratios(Triangle(Eigen::MatrixXd::Ones(3, 1))), std::domain_error);
}

TEST_CASE("chain ladder matches the textbook computation") {
    const auto t = taylor_ashe();
    const auto u = cl_ultimates(t, chain_ladder_pattern(t));
    const Eigen::MatrixXd inc = t.dense();
    const auto expected = oracle::chain_ladder_ultimates(inc);
    for (int r = 0; r < t.accident_years(); ++r) {
        CHECK(u.ultimates[r] == Approx(expected[r]).epsilon(1e-12));
    }
    CHECK(std::round(u.total_reserve() / 1000.0) == 18681.0);

    for (const char* name : {"/raa.csv", "/mortgage.csv"}) {
        const auto t2 = load_triangle(std::string(DGR_DATA_DIR) + name, CsvLayout::long_format);
        const auto u2 = cl_ultimates(t2, chain_ladder_pattern(t2));
        const auto e2 = oracle::chain_ladder_ultimates(t2.dense());
        CHECK((u2.ultimates - e2).cwiseAbs().maxCoeff() < 1e-8 * e2.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("Bornhuetter-Ferguson blend") {
    Eigen::MatrixXd m(3, 3);
    m << 10, 20, 30, 60, 0, 0, 5, 0, 0;
    const auto p = DevelopmentPattern::from_cumulative((Eigen::VectorXd(3) << 0.0, 0.6, 1.0).finished());
    Eigen::VectorXd prior(3);
    prior << 999, 200, 77;
    const auto bf = bf_ultimates(Triangle(m), p, prior);
    // F = 1 row equals CL, F = 0.6 row with CL 100 and prior 200 gives 140
    CHECK(bf.ultimates[0] == Approx(60.0));
    CHECK(bf.ultimates[1] == Approx(140.0));
    CHECK(bf.ultimates[2] == Approx(5.0 + 77.0 * (1.0 - p.F()[0])));
    CHECK_THROWS_AS(bf_ultimates(Triangle(m), p, Eigen::VectorXd::Ones(2)), std::invalid_argument);
}

TEST_CASE("Cape Cod pooled loss ratio") {
    Eigen::MatrixXd m(2, 2);
    m << 20, 0, 9, 0;
    const auto p = DevelopmentPattern::from_cumulative((Eigen::VectorXd(2) << 0.5, 1.0).finished());
    const auto cc = cape_cod_ultimates(Triangle(m, TriangleKind::amounts, Eigen::Vector2d(10, 10)), p);
    REQUIRE(cc.prior_q);
    CHECK(*cc.prior_q == Approx(29.0 / 15.0));
    CHECK(cc.ultimates[0] == Approx(290.0 / 15.0));
    CHECK(cc.ultimates[1] == Approx(290.0 / 15.0));
    // the developed row has ultimate below its observed 20
    CHECK(cc.reserves[0] == 0.0);
    CHECK(cc.floored_rows == std::vector<int>{0});

    CHECK_THROWS_AS(cape_cod_ultimates(Triangle(m), p), std::invalid_argument);
}

TEST_CASE("Cape Cod with equal exposures and full development") {
    Eigen::MatrixXd m(3, 3);
    m << 10, 0, 0, 20, 0, 0, 30, 0, 0;
    const auto p = DevelopmentPattern::from_proportions((Eigen::VectorXd(3) << 1.0, 1e-12, 1e-12).finished());
    const auto cc = cape_cod_ultimates(Triangle(m, TriangleKind::amounts, Eigen::Vector3d(5, 5, 5)), p);
    CHECK(*cc.prior_q == Approx(4.0).epsilon(1e-8));
}
