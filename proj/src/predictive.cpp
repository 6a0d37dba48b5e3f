#include "dgr/predictive.hpp"

#include <algorithm>
#include <stdexcept>

#include "dgr/parallel.hpp"

namespace dgr {

double quantile_sorted(const Eigen::Ref<const Eigen::VectorXd>& sorted, double p)
{
    if (sorted.size() == 0) {
        throw std::invalid_argument("quantile of an empty sample");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("quantile level must lie in [0, 1]");
    }
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<Eigen::Index>(std::floor(h));
    const auto hi = std::min<Eigen::Index>(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile(Eigen::VectorXd draws, double p)
{
    std::sort(draws.begin(), draws.end());
    return quantile_sorted(draws, p);
}

Summary summarize(const Eigen::Ref<const Eigen::VectorXd>& draws, bool suppress_mean)
{
    if (draws.size() == 0) {
        throw std::invalid_argument("cannot summarise an empty sample");
    }
    Eigen::VectorXd sorted = draws;
    std::sort(sorted.begin(), sorted.end());
    Summary s;
    const double m = draws.mean();
    if (!suppress_mean) {
        s.mean = m;
    }
    if (draws.size() > 1) {
        s.sd = std::sqrt((draws.array() - m).square().sum() / static_cast<double>(draws.size() - 1));
    }
    s.q05 = quantile_sorted(sorted, 0.05);
    s.q25 = quantile_sorted(sorted, 0.25);
    s.q50 = quantile_sorted(sorted, 0.50);
    s.q75 = quantile_sorted(sorted, 0.75);
    s.q95 = quantile_sorted(sorted, 0.95);
    return s;
}

std::string to_string(RowStatus s)
{
    switch (s) {
    case RowStatus::included: return "included";
    case RowStatus::fully_developed: return "fully-developed";
    case RowStatus::mean_suppressed: return "mean-suppressed";
    case RowStatus::excluded: return "excluded";
    }
    return "unknown";
}

Summary ReserveDistribution::row_summary(int row) const
{
    const auto& r = rows.at(static_cast<std::size_t>(row));
    return summarize(per_year.col(row), r.status == RowStatus::mean_suppressed);
}

namespace {

enum class Anchor { chain_ladder, bornhuetter_ferguson };

void check_common(const DiagonalSummary& diag, double c_hat, const BootstrapOptions& options)
{
    if (options.B < 1) {
        throw std::invalid_argument("bootstrap size B must be at least 1");
    }
    if (!(c_hat > 0.0) || !std::isfinite(c_hat)) {
        throw std::invalid_argument("concentration must be positive and finite");
    }
    if (diag.observed.size() != diag.dev_lag.size()) {
        throw std::invalid_argument("diagonal summary is inconsistent");
    }
    if (!diag.observed.allFinite()) {
        throw std::invalid_argument("observed diagonal contains non-finite values");
    }
    for (Eigen::Index i = 0; i < diag.dev_lag.size(); ++i) {
        if (diag.dev_lag[i] < 0) {
            throw std::invalid_argument("negative development lag in diagonal summary");
        }
    }
}

// One Beta(cF, c(1-F)) draw per (b, row), held as the log Gamma pair so that
// both (1-W)/W and 1-W stay finite when W sits near 0 or 1.
ReserveDistribution run_beta_bootstrap(Anchor anchor, const DiagonalSummary& diag, const Eigen::VectorXd& scale,
                                       const DevelopmentPattern& pattern, double c_hat,
                                       const BootstrapOptions& options)
{
    const auto I = static_cast<int>(diag.observed.size());
    ReserveDistribution out;
    out.rows.resize(static_cast<std::size_t>(I));
    bool any_open = false;
    bool any_included = false;
    bool any_suppressed = false;
    for (int i = 0; i < I; ++i) {
        auto& r = out.rows[static_cast<std::size_t>(i)];
        r.row = i;
        r.observed = diag.observed[i];
        r.F = pattern.F_at(diag.dev_lag[i]);
        r.cF = c_hat * r.F;
        if (r.F >= 1.0) {
            r.status = RowStatus::fully_developed;
            continue;
        }
        any_open = true;
        r.point_reserve = anchor == Anchor::chain_ladder ? r.observed * (1.0 - r.F) / r.F : scale[i] * (1.0 - r.F);
        if (anchor == Anchor::chain_ladder && r.cF < options.inclusion_threshold) {
            r.status = RowStatus::excluded;
            out.excluded_point_reserve += r.point_reserve;
            continue;
        }
        if (anchor == Anchor::chain_ladder && r.observed < 0.0) {
            throw std::invalid_argument("row " + std::to_string(i + 1) + " has a negative observed total");
        }
        any_included = true;
        out.point_reserve += r.point_reserve;
        if (anchor == Anchor::chain_ladder && r.cF <= kMeanSuppressionBound) {
            r.status = RowStatus::mean_suppressed;
            any_suppressed = true;
        }
    }
    if (any_open && !any_included) {
        throw std::domain_error("every open accident year was excluded by the inclusion threshold");
    }

    const auto B = static_cast<Eigen::Index>(options.B);
    out.per_year = Eigen::MatrixXd::Zero(B, I);
    parallel_for(options.B, options.threads, [&](std::int64_t b) {
        for (int i = 0; i < I; ++i) {
            const auto& r = out.rows[static_cast<std::size_t>(i)];
            if (r.status == RowStatus::fully_developed || r.status == RowStatus::excluded) {
                continue;
            }
            RngStream rng = keyed_stream(options.seed, {static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(i)});
            const double lx = sample_log_gamma(c_hat * r.F, rng);
            const double ly = sample_log_gamma(c_hat * (1.0 - r.F), rng);
            double s;
            if (anchor == Anchor::chain_ladder) {
                s = r.observed * std::exp(ly - lx);
            } else {
                s = scale[i] / (1.0 + std::exp(lx - ly));
            }
            if (!std::isfinite(s)) {
                throw std::domain_error("non-finite reserve draw in row " + std::to_string(i + 1) +
                                        "; raise the inclusion threshold");
            }
            out.per_year(static_cast<Eigen::Index>(b), i) = s;
        }
    });
    out.total = out.per_year.rowwise().sum();
    out.summary = summarize(out.total, any_suppressed);
    return out;
}

} // namespace

ReserveDistribution multinomial_bootstrap(const DiagonalSummary& diag, const DevelopmentPattern& pattern, double c_hat,
                                          const BootstrapOptions& options)
{
    check_common(diag, c_hat, options);
    return run_beta_bootstrap(Anchor::chain_ladder, diag, Eigen::VectorXd(), pattern, c_hat, options);
}

ReserveDistribution bf_bootstrap(const DiagonalSummary& diag, const Eigen::VectorXd& exposures, double q_bf,
                                 const DevelopmentPattern& pattern, double c_hat, const BootstrapOptions& options)
{
    check_common(diag, c_hat, options);
    if (exposures.size() != diag.observed.size()) {
        throw std::invalid_argument("BF bootstrap needs one exposure per accident year");
    }
    if ((exposures.array() <= 0.0).any() || !exposures.allFinite()) {
        throw std::invalid_argument("exposures must be positive and finite");
    }
    if (!(q_bf > 0.0) || !std::isfinite(q_bf)) {
        throw std::invalid_argument("prior loss ratio must be positive and finite");
    }
    return run_beta_bootstrap(Anchor::bornhuetter_ferguson, diag, exposures * q_bf, pattern, c_hat, options);
}

IbnpMoments ibnp_exact_moments(double x_obs, double F, double c)
{
    detail::require_proportion(F, "F");
    detail::require_positive(c, "concentration");
    IbnpMoments m;
    const double cF = c * F;
    if (cF > 1.0) {
        m.mean = x_obs * (1.0 - F) / (F - 1.0 / c);
    }
    m.cv2 = (cF + 1.0) / (cF * (1.0 - F) * (c + 2.0));
    m.cv2_approx = 1.0 / (c * (1.0 - F));
    const auto bp = beta_prime_moments(c, F);
    if (bp.variance) {
        m.cv2_beta_prime = *bp.variance / (*bp.mean * *bp.mean);
    }
    m.cl_reserve = x_obs * (1.0 - F) / F;
    return m;
}

CountPredictive negbin_ibnr(double n_obs, double F, double kappa, std::optional<double> mu)
{
    if (!(n_obs >= 0.0) || std::floor(n_obs) != n_obs) {
        throw std::invalid_argument("observed count must be a non-negative integer");
    }
    if (!(F > 0.0 && F <= 1.0)) {
        throw std::invalid_argument("F must lie in (0, 1]");
    }
    if (!(kappa > 0.0)) {
        throw std::invalid_argument("frailty kappa must be positive");
    }
    CountPredictive out;
    out.kappa = kappa;
    if (std::isinf(kappa)) {
        out.r = n_obs;
        out.p = F;
    } else {
        if (!mu) {
            throw std::invalid_argument("a finite frailty kappa requires the expected ultimate count mu");
        }
        if (!(*mu > 0.0) || !std::isfinite(*mu)) {
            throw std::invalid_argument("expected ultimate count mu must be positive and finite");
        }
        out.r = n_obs + kappa;
        out.p = (kappa + *mu * F) / (kappa + *mu);
    }
    out.mean = out.r * (1.0 - out.p) / out.p;
    out.variance = out.mean / out.p;
    return out;
}

Eigen::VectorXd sample_ibnr(const CountPredictive& law, RngStream& rng, Eigen::Index n)
{
    if (law.r == 0.0 || law.p >= 1.0) {
        return Eigen::VectorXd::Zero(n);
    }
    return sample_negbin(law.r, law.p, rng, n);
}

} // namespace dgr
