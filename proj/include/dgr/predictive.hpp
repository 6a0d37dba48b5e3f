#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgr/distributions.hpp"
#include "dgr/patterns.hpp"
#include "dgr/triangle.hpp"

namespace dgr {

/// Linear-interpolation quantile (Hyndman-Fan type 7) of sorted data.
double quantile_sorted(const Eigen::Ref<const Eigen::VectorXd>& sorted, double p);
double quantile(Eigen::VectorXd draws, double p);

struct Summary {
    std::optional<double> mean; ///< absent when the predictive mean does not exist
    double sd = 0.0;
    double q05 = 0.0;
    double q25 = 0.0;
    double q50 = 0.0;
    double q75 = 0.0;
    double q95 = 0.0;
};

Summary summarize(const Eigen::Ref<const Eigen::VectorXd>& draws, bool suppress_mean = false);

enum class RowStatus {
    included,
    fully_developed, ///< F = 1, contributes 0
    mean_suppressed, ///< included, but cF <= 2 so the predictive mean is undefined
    excluded,        ///< cF below the inclusion threshold; not simulated
};

std::string to_string(RowStatus s);

struct RowResult {
    int row = 0;
    double observed = 0.0;
    double F = 1.0;
    double cF = 0.0;
    RowStatus status = RowStatus::included;
    double point_reserve = 0.0; ///< CL (or BF) point reserve of the row
};

/// Bootstrap draws of the reserve by accident year and in total.
struct ReserveDistribution {
    Eigen::MatrixXd per_year; ///< B x I; zero columns for excluded or developed rows
    Eigen::VectorXd total;    ///< B; row sums of per_year
    std::vector<RowResult> rows;
    Summary summary;
    double point_reserve = 0.0;          ///< point reserve over included rows
    double excluded_point_reserve = 0.0; ///< point reserve of excluded rows, reported separately
    std::int64_t rejected = 0;           ///< redrawn replications (ODP only)

    [[nodiscard]] Eigen::Index replications() const { return total.size(); }
    [[nodiscard]] Summary row_summary(int row) const;
};

struct BootstrapOptions {
    std::int64_t B = 5000;
    std::uint64_t seed = 2026;
    double inclusion_threshold = 5.0; ///< rows with cF below this are excluded
    int threads = 1;
};

inline constexpr double kMeanSuppressionBound = 2.0;

/// Conditional predictive bootstrap anchored at the chain-ladder reserve:
/// W* ~ Beta(cF, c(1-F)) and S* = X_obs (1 - W*)/W* per open row. Only the
/// diagonal summary, the pattern and c enter; the triangle itself is not read.
ReserveDistribution multinomial_bootstrap(const DiagonalSummary& diag, const DevelopmentPattern& pattern, double c_hat,
                                          const BootstrapOptions& options);

/// Bornhuetter-Ferguson anchor: S* = E_i q (1 - W*). Every open row takes part.
ReserveDistribution bf_bootstrap(const DiagonalSummary& diag, const Eigen::VectorXd& exposures, double q_bf,
                                 const DevelopmentPattern& pattern, double c_hat, const BootstrapOptions& options);

/// X^2 (1-F) / (F^3 (c+1)).
template <typename Scalar>
Scalar delta_method_variance(Scalar x_obs, Scalar F, Scalar c)
{
    detail::require_proportion(F, "F");
    detail::require_positive(c, "concentration");
    return x_obs * x_obs * (Scalar(1) - F) / (F * F * F * (c + Scalar(1)));
}

struct IbnpMoments {
    std::optional<double> mean; ///< X(1-F)/(F - 1/c), exists iff cF > 1
    double cv2;                 ///< (cF+1) / (cF(1-F)(c+2))
    double cv2_approx;          ///< 1 / (c(1-F))
    std::optional<double> cv2_beta_prime; ///< variance / mean^2 of the Beta-prime ratio, exists iff cF > 2
    double cl_reserve;          ///< X(1-F)/F, the point estimate
};

IbnpMoments ibnp_exact_moments(double x_obs, double F, double c);

/// Negative binomial law of the outstanding count, parameterised as failures
/// before the r-th success: mean r(1-p)/p.
struct CountPredictive {
    double r = 0.0;
    double p = 1.0;
    double mean = 0.0;
    double variance = 0.0;
    double kappa = std::numeric_limits<double>::infinity();
};

/// NegBin(N_obs + kappa, (kappa + mu F)/(kappa + mu)); kappa = infinity gives
/// NegBin(N_obs, F). A finite kappa requires mu.
CountPredictive negbin_ibnr(double n_obs, double F, double kappa = std::numeric_limits<double>::infinity(),
                            std::optional<double> mu = std::nullopt);

Eigen::VectorXd sample_ibnr(const CountPredictive& law, RngStream& rng, Eigen::Index n);

} // namespace dgr
