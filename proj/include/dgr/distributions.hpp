#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "dgr/rng.hpp"

namespace dgr {

// ---------------------------------------------------------------------------
// Closed-form moments
// ---------------------------------------------------------------------------

/// Central moments of W ~ Beta(c*pi, c*(1-pi)).
template <typename Scalar>
struct BetaMoments {
    Scalar mu2;             ///< variance
    Scalar mu3;             ///< third central moment
    Scalar mu4_minus_mu2sq; ///< fourth central moment minus squared variance
};

namespace detail {

template <typename Scalar>
void require_proportion(Scalar pi, const char* what)
{
    if (!(pi > Scalar(0) && pi < Scalar(1))) {
        throw std::domain_error(std::string(what) + " must lie in (0, 1)");
    }
}

template <typename Scalar>
void require_positive(Scalar x, const char* what)
{
    if (!(x > Scalar(0)) || !std::isfinite(static_cast<double>(x))) {
        throw std::domain_error(std::string(what) + " must be positive and finite");
    }
}

} // namespace detail

/// Mean-proportion / concentration parameterisation of the Beta central
/// moments. The fourth-moment term uses the excess-kurtosis identity
///   mu4 - mu2^2 = 2u [u (c^2 - 10c - 12) + 3(c + 1)] / ((c+1)^2 (c+2)(c+3)),
/// u = pi (1 - pi), which equals 1/180 for the uniform law.
template <typename Scalar>
BetaMoments<Scalar> beta_central_moments(Scalar pi, Scalar c)
{
    detail::require_proportion(pi, "pi");
    detail::require_positive(c, "concentration");
    const Scalar u = pi * (Scalar(1) - pi);
    const Scalar c1 = c + Scalar(1);
    const Scalar c2 = c + Scalar(2);
    const Scalar c3 = c + Scalar(3);
    BetaMoments<Scalar> m;
    m.mu2 = u / c1;
    m.mu3 = Scalar(2) * u * (Scalar(1) - Scalar(2) * pi) / (c1 * c2);
    m.mu4_minus_mu2sq = Scalar(2) * u * (u * (c * c - Scalar(10) * c - Scalar(12)) + Scalar(3) * c1) / (c1 * c1 * c2 * c3);
    return m;
}

/// Moments of the Beta-prime ratio (1-W)/W with W ~ Beta(cF, c(1-F)).
/// A moment that does not exist is returned as std::nullopt.
template <typename Scalar>
struct BetaPrimeMoments {
    std::optional<Scalar> mean;     ///< exists iff cF > 1
    std::optional<Scalar> variance; ///< exists iff cF > 2
};

template <typename Scalar>
BetaPrimeMoments<Scalar> beta_prime_moments(Scalar c, Scalar F)
{
    detail::require_positive(c, "concentration");
    detail::require_proportion(F, "F");
    BetaPrimeMoments<Scalar> out;
    const Scalar cF = c * F;
    if (cF > Scalar(1)) {
        out.mean = c * (Scalar(1) - F) / (cF - Scalar(1));
    }
    if (cF > Scalar(2)) {
        const Scalar d = cF - Scalar(1);
        out.variance = c * (Scalar(1) - F) * (c - Scalar(1)) / (d * d * (cF - Scalar(2)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Samplers. Gamma is shape-rate throughout: Gamma(k, k/mu) has mean mu.
// ---------------------------------------------------------------------------

double sample_standard_normal(RngStream& rng);

/// Gamma(shape, rate).
double sample_gamma(double shape, double rate, RngStream& rng);

/// log of a Gamma(shape, 1) draw; accurate for very small shapes where the
/// draw itself underflows.
double sample_log_gamma(double shape, RngStream& rng);

double sample_beta(double a, double b, RngStream& rng);

/// Dirichlet(alpha). Components sum to one up to rounding.
Eigen::VectorXd sample_dirichlet(const Eigen::Ref<const Eigen::VectorXd>& alpha, RngStream& rng);

std::int64_t sample_poisson(double lambda, RngStream& rng);

std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng);

/// Number of failures before the r-th success with success probability p.
/// Mean r(1-p)/p. Real-valued r is supported through the Gamma-Poisson
/// mixture. p == 1 returns 0.
std::int64_t sample_negbin(double r, double p, RngStream& rng);

Eigen::VectorXi sample_multinomial(std::int64_t n, const Eigen::Ref<const Eigen::VectorXd>& probs, RngStream& rng);

/// Sum of N ~ Poisson(lambda) iid Gamma(severity_shape, scale severity_scale)
/// severities. Mean lambda*shape*scale, variance lambda*shape*(shape+1)*scale^2.
double sample_compound_poisson_gamma(double lambda, double severity_shape, double severity_scale, RngStream& rng);

/// Tweedie cell with mean nu, dispersion phi and power p in (1, 2), drawn via
/// the compound Poisson-Gamma representation. nu == 0 returns 0.
double sample_tweedie_cell(double nu, double phi, double p, RngStream& rng);

/// Compound representation parameters of a Tweedie(nu, phi, p) cell.
struct TweedieCompound {
    double lambda;
    double severity_shape;
    double severity_scale;
};

TweedieCompound tweedie_compound(double nu, double phi, double p);

// n-draw conveniences.
Eigen::VectorXd sample_gamma(double shape, double rate, RngStream& rng, Eigen::Index n);
Eigen::VectorXd sample_beta(double a, double b, RngStream& rng, Eigen::Index n);
Eigen::MatrixXd sample_dirichlet(const Eigen::Ref<const Eigen::VectorXd>& alpha, RngStream& rng, Eigen::Index n);
Eigen::VectorXd sample_poisson(double lambda, RngStream& rng, Eigen::Index n);
Eigen::VectorXd sample_negbin(double r, double p, RngStream& rng, Eigen::Index n);

} // namespace dgr
