#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dgr/predictive.hpp"
#include "dgr/triangle.hpp"

namespace dgr {

/// Over-dispersed Poisson fit of an incremental triangle via the chain-ladder
/// equivalence. Cell matrices are I x J with NaN outside the observed region.
struct OdpFit {
    Eigen::MatrixXd observed;
    Eigen::MatrixXd fitted;
    Eigen::MatrixXd residuals;        ///< Pearson (X - m)/sqrt(m); NaN where m is negligible
    std::vector<double> residual_pool; ///< residuals scaled by sqrt(n/(n-p))
    Eigen::VectorXd link_ratios;
    Eigen::VectorXd cl_reserves; ///< per accident year
    double dispersion = 0.0;
    int n = 0;
    int p = 0;
    int dof = 0;
};

inline constexpr double kOdpNegligibleMean = 1e-9;
inline constexpr int kOdpMaxRedraws = 100;

class OdpError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Throws OdpError when n - p < 1 or a fitted incremental is negative.
OdpFit odp_fit(const Triangle& t);

/// England-Verrall residual bootstrap with Gamma process error. Replications
/// whose pseudo-triangle cannot be refitted are redrawn, and counted in
/// ReserveDistribution::rejected; more than kOdpMaxRedraws failures for one
/// replication abort with OdpError. inclusion_threshold is ignored.
ReserveDistribution odp_bootstrap(const OdpFit& fit, const BootstrapOptions& options);

} // namespace dgr
