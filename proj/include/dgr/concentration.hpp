#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgr/distributions.hpp"
#include "dgr/triangle.hpp"

namespace dgr {

enum class VarianceDivisor { n_minus_1, n };

/// Which rows feed the horizon-k proportions.
enum class RowRule {
    through_horizon, ///< rows observed at least through lag k
    beyond_horizon,  ///< rows observed strictly past lag k
};

enum class Diagnostic { heterogeneous, stable, delta_recommended };

std::string to_string(Diagnostic d);

/// ĉ < 30 is heterogeneous, ĉ >= 100 favours the delta-method shortcut.
Diagnostic classify_concentration(double c_hat);

struct ConcentrationOptions {
    VarianceDivisor divisor = VarianceDivisor::n_minus_1;
    RowRule rows = RowRule::through_horizon;
    int min_samples = 3;
};

struct SkippedRow {
    int row;
    int horizon;
    std::string reason;
};

/// W_ij^(k) = X_ij / (X_i0 + ... + X_ik) for j < k, one matrix row per
/// qualifying accident year.
struct PartialProportions {
    int horizon = 0;
    std::vector<int> rows;
    Eigen::MatrixXd W;
    std::vector<SkippedRow> skipped;
};

PartialProportions partial_proportions(const Triangle& t, int k, RowRule rule = RowRule::through_horizon);

struct CellMoments {
    double mean;
    double variance;
    double c_hat; ///< m(1-m)/v - 1; may be non-positive or non-finite
};

/// Throws std::invalid_argument for fewer than 3 samples.
CellMoments cell_estimate(const Eigen::Ref<const Eigen::VectorXd>& w,
                          VarianceDivisor divisor = VarianceDivisor::n_minus_1);

struct CellRecord {
    int lag;
    int horizon;
    int n;
    double pi_hat;
    double c_hat;
};

struct DroppedCell {
    int lag;
    int horizon;
    int n;
    std::string reason;
};

class ConcentrationError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct ConcentrationEstimate {
    double c_hat = 0.0;
    Diagnostic diagnostic = Diagnostic::heterogeneous;
    std::vector<CellRecord> cells; ///< sorted by (horizon, lag)
    std::vector<DroppedCell> dropped;
    std::vector<SkippedRow> skipped_rows;
    ConcentrationOptions options;
};

/// Median of the positive, finite cell estimates over horizons 1..J-2.
/// Throws ConcentrationError when no cell survives.
ConcentrationEstimate estimate_c(const Triangle& t, const ConcentrationOptions& options = {});

/// Midpoint median; the input is taken by value and partially sorted.
double median(std::vector<double> values);

/// Asymptotic variance of a single-cell moment estimate of c at mean pi,
/// scaled by the sample size:
/// c(c+1)[2c(c-3)u + 3c + 1] / (u(c+2)(c+3)) with u = pi(1-pi).
template <typename Scalar>
Scalar sigma_c_squared(Scalar c, Scalar pi)
{
    detail::require_proportion(pi, "pi");
    detail::require_positive(c, "c");
    const Scalar u = pi * (Scalar(1) - pi);
    return c * (c + Scalar(1)) * (Scalar(2) * c * (c - Scalar(3)) * u + Scalar(3) * c + Scalar(1)) /
           (u * (c + Scalar(2)) * (c + Scalar(3)));
}

} // namespace dgr
