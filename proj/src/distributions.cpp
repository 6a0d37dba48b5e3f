#include "dgr/distributions.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace dgr {

namespace {

void require(bool ok, const char* message)
{
    if (!ok) {
        throw std::invalid_argument(message);
    }
}

// Marsaglia-Tsang for shape >= 1, returns a Gamma(shape, 1) draw.
double gamma_unit_large(double shape, RngStream& rng)
{
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = sample_standard_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) {
            return d * v;
        }
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

} // namespace

double sample_standard_normal(RngStream& rng)
{
    // Marsaglia polar method; the second variate is discarded so the stream
    // stays stateless between calls.
    for (;;) {
        const double u = 2.0 * rng.uniform() - 1.0;
        const double v = 2.0 * rng.uniform() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

double sample_log_gamma(double shape, RngStream& rng)
{
    require(shape > 0.0 && std::isfinite(shape), "gamma shape must be positive and finite");
    if (shape >= 1.0) {
        return std::log(gamma_unit_large(shape, rng));
    }
    // Gamma(a) = Gamma(a + 1) * U^(1/a)
    const double g = gamma_unit_large(shape + 1.0, rng);
    return std::log(g) + std::log(rng.uniform()) / shape;
}

double sample_gamma(double shape, double rate, RngStream& rng)
{
    require(shape > 0.0 && std::isfinite(shape), "gamma shape must be positive and finite");
    require(rate > 0.0 && std::isfinite(rate), "gamma rate must be positive and finite");
    if (shape >= 1.0) {
        return gamma_unit_large(shape, rng) / rate;
    }
    return std::exp(sample_log_gamma(shape, rng)) / rate;
}

double sample_beta(double a, double b, RngStream& rng)
{
    require(a > 0.0 && std::isfinite(a), "beta shape a must be positive and finite");
    require(b > 0.0 && std::isfinite(b), "beta shape b must be positive and finite");
    if (a >= 1.0 && b >= 1.0) {
        const double x = gamma_unit_large(a, rng);
        const double y = gamma_unit_large(b, rng);
        return x / (x + y);
    }
    // Log-space ratio keeps tiny shapes away from 0/0.
    const double lx = sample_log_gamma(a, rng);
    const double ly = sample_log_gamma(b, rng);
    return 1.0 / (1.0 + std::exp(ly - lx));
}

Eigen::VectorXd sample_dirichlet(const Eigen::Ref<const Eigen::VectorXd>& alpha, RngStream& rng)
{
    require(alpha.size() >= 1, "dirichlet needs at least one component");
    Eigen::VectorXd logs(alpha.size());
    for (Eigen::Index k = 0; k < alpha.size(); ++k) {
        logs[k] = sample_log_gamma(alpha[k], rng);
    }
    const double top = logs.maxCoeff();
    Eigen::VectorXd w = (logs.array() - top).exp().matrix();
    return w / w.sum();
}

std::int64_t sample_poisson(double lambda, RngStream& rng)
{
    require(lambda >= 0.0 && std::isfinite(lambda), "poisson mean must be non-negative and finite");
    if (lambda == 0.0) {
        return 0;
    }
    std::poisson_distribution<std::int64_t> dist(lambda);
    return dist(rng);
}

std::int64_t sample_binomial(std::int64_t n, double p, RngStream& rng)
{
    require(n >= 0, "binomial trials must be non-negative");
    require(p >= 0.0 && p <= 1.0, "binomial probability must lie in [0, 1]");
    if (n == 0 || p == 0.0) {
        return 0;
    }
    if (p == 1.0) {
        return n;
    }
    std::binomial_distribution<std::int64_t> dist(n, p);
    return dist(rng);
}

std::int64_t sample_negbin(double r, double p, RngStream& rng)
{
    require(r > 0.0 && std::isfinite(r), "negative binomial size must be positive");
    require(p > 0.0 && p <= 1.0, "negative binomial probability must lie in (0, 1]");
    if (p == 1.0) {
        return 0;
    }
    const double lambda = sample_gamma(r, p / (1.0 - p), rng);
    return sample_poisson(lambda, rng);
}

Eigen::VectorXi sample_multinomial(std::int64_t n, const Eigen::Ref<const Eigen::VectorXd>& probs, RngStream& rng)
{
    require(n >= 0, "multinomial trials must be non-negative");
    require(probs.size() >= 1, "multinomial needs at least one cell");
    require((probs.array() >= 0.0).all(), "multinomial probabilities must be non-negative");
    const double total = probs.sum();
    require(total > 0.0, "multinomial probabilities must not all be zero");

    Eigen::VectorXi out = Eigen::VectorXi::Zero(probs.size());
    std::int64_t left = n;
    double mass = total;
    for (Eigen::Index k = 0; k + 1 < probs.size() && left > 0; ++k) {
        const double p = mass > 0.0 ? std::clamp(probs[k] / mass, 0.0, 1.0) : 0.0;
        const auto draw = sample_binomial(left, p, rng);
        out[k] = static_cast<int>(draw);
        left -= draw;
        mass -= probs[k];
    }
    out[probs.size() - 1] += static_cast<int>(left);
    return out;
}

double sample_compound_poisson_gamma(double lambda, double severity_shape, double severity_scale, RngStream& rng)
{
    require(severity_shape > 0.0 && severity_scale > 0.0, "severity parameters must be positive");
    const auto n = sample_poisson(lambda, rng);
    if (n == 0) {
        return 0.0;
    }
    // A sum of n iid Gamma(a, scale) is Gamma(n a, scale).
    return sample_gamma(static_cast<double>(n) * severity_shape, 1.0 / severity_scale, rng);
}

TweedieCompound tweedie_compound(double nu, double phi, double p)
{
    require(p > 1.0 && p < 2.0, "tweedie power must lie in (1, 2)");
    require(phi > 0.0 && std::isfinite(phi), "tweedie dispersion must be positive");
    require(nu > 0.0 && std::isfinite(nu), "tweedie mean must be positive");
    return {std::pow(nu, 2.0 - p) / (phi * (2.0 - p)), (2.0 - p) / (p - 1.0), phi * (p - 1.0) * std::pow(nu, p - 1.0)};
}

double sample_tweedie_cell(double nu, double phi, double p, RngStream& rng)
{
    require(p > 1.0 && p < 2.0, "tweedie power must lie in (1, 2)");
    require(nu >= 0.0, "tweedie mean must be non-negative");
    if (nu == 0.0) {
        return 0.0;
    }
    const auto tc = tweedie_compound(nu, phi, p);
    return sample_compound_poisson_gamma(tc.lambda, tc.severity_shape, tc.severity_scale, rng);
}

Eigen::VectorXd sample_gamma(double shape, double rate, RngStream& rng, Eigen::Index n)
{
    Eigen::VectorXd out(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out[k] = sample_gamma(shape, rate, rng);
    }
    return out;
}

Eigen::VectorXd sample_beta(double a, double b, RngStream& rng, Eigen::Index n)
{
    Eigen::VectorXd out(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out[k] = sample_beta(a, b, rng);
    }
    return out;
}

Eigen::MatrixXd sample_dirichlet(const Eigen::Ref<const Eigen::VectorXd>& alpha, RngStream& rng, Eigen::Index n)
{
    Eigen::MatrixXd out(n, alpha.size());
    for (Eigen::Index k = 0; k < n; ++k) {
        out.row(k) = sample_dirichlet(alpha, rng).transpose();
    }
    return out;
}

Eigen::VectorXd sample_poisson(double lambda, RngStream& rng, Eigen::Index n)
{
    Eigen::VectorXd out(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out[k] = static_cast<double>(sample_poisson(lambda, rng));
    }
    return out;
}

Eigen::VectorXd sample_negbin(double r, double p, RngStream& rng, Eigen::Index n)
{
    Eigen::VectorXd out(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out[k] = static_cast<double>(sample_negbin(r, p, rng));
    }
    return out;
}

} // namespace dgr
