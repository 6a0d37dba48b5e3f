#include "dgr/odp.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <optional>

#include "dgr/parallel.hpp"
#include "dgr/patterns.hpp"

namespace dgr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_observed(Eigen::Index I, Eigen::Index r, Eigen::Index j) { return r + j <= I - 1; }

// Volume-weighted link ratios straight from an incremental matrix; nullopt when
// a column sum is not positive or a ratio is not positive and finite.
std::optional<Eigen::VectorXd> refit_link_ratios(const Eigen::MatrixXd& x)
{
    const auto I = x.rows();
    const auto J = x.cols();
    Eigen::MatrixXd c = x;
    for (Eigen::Index r = 0; r < I; ++r) {
        for (Eigen::Index j = 1; j < J && is_observed(I, r, j); ++j) {
            c(r, j) += c(r, j - 1);
        }
    }
    Eigen::VectorXd f(J - 1);
    for (Eigen::Index j = 0; j + 1 < J; ++j) {
        double num = 0.0;
        double den = 0.0;
        for (Eigen::Index r = 0; is_observed(I, r, j + 1); ++r) {
            num += c(r, j + 1);
            den += c(r, j);
        }
        if (!(den > 0.0)) {
            return std::nullopt;
        }
        f[j] = num / den;
        if (!(f[j] > 0.0) || !std::isfinite(f[j])) {
            return std::nullopt;
        }
    }
    return f;
}

double latest_cumulative(const Eigen::MatrixXd& x, Eigen::Index r, Eigen::Index last)
{
    double s = 0.0;
    for (Eigen::Index j = 0; j <= last; ++j) {
        s += x(r, j);
    }
    return s;
}

} // namespace

OdpFit odp_fit(const Triangle& t)
{
    const int I = t.accident_years();
    const int J = t.lags();
    OdpFit fit;
    fit.observed = t.dense();
    fit.link_ratios = link_ratios(t);
    fit.n = t.observed_cell_count();
    fit.p = I + J - 1;
    fit.dof = fit.n - fit.p;
    if (fit.dof < 1) {
        throw OdpError("ODP fit is saturated: " + std::to_string(fit.n) + " cells and " + std::to_string(fit.p) +
                       " parameters leave no residual degrees of freedom");
    }

    // Backward recursion from the latest cumulative: C_{i,j} = C_{i,j+1} / f_j.
    fit.fitted = Eigen::MatrixXd::Constant(I, J, kNaN);
    fit.cl_reserves = Eigen::VectorXd::Zero(I);
    for (int r = 0; r < I; ++r) {
        const int last = t.last_lag(r);
        Eigen::VectorXd cum(last + 1);
        cum[last] = latest_cumulative(fit.observed, r, last);
        for (int j = last - 1; j >= 0; --j) {
            cum[j] = cum[j + 1] / fit.link_ratios[j];
        }
        for (int j = 0; j <= last; ++j) {
            fit.fitted(r, j) = j == 0 ? cum[0] : cum[j] - cum[j - 1];
            if (fit.fitted(r, j) < 0.0) {
                throw OdpError("negative fitted incremental at accident year " + std::to_string(r + 1) + ", lag " +
                               std::to_string(j));
            }
        }
        double c = cum[last];
        for (int j = last; j + 1 < J; ++j) {
            c *= fit.link_ratios[j];
        }
        fit.cl_reserves[r] = c - cum[last];
    }

    fit.residuals = Eigen::MatrixXd::Constant(I, J, kNaN);
    const double adjust = std::sqrt(static_cast<double>(fit.n) / static_cast<double>(fit.dof));
    double ss = 0.0;
    for (int r = 0; r < I; ++r) {
        for (int j = 0; j <= t.last_lag(r); ++j) {
            const double m = fit.fitted(r, j);
            if (m <= kOdpNegligibleMean) {
                continue;
            }
            const double res = (fit.observed(r, j) - m) / std::sqrt(m);
            fit.residuals(r, j) = res;
            ss += res * res;
            fit.residual_pool.push_back(res * adjust);
        }
    }
    fit.dispersion = ss / fit.dof;
    return fit;
}

ReserveDistribution odp_bootstrap(const OdpFit& fit, const BootstrapOptions& options)
{
    if (options.B < 1) {
        throw std::invalid_argument("bootstrap size B must be at least 1");
    }
    if (fit.residual_pool.empty()) {
        throw OdpError("no usable Pearson residuals");
    }
    const auto I = fit.observed.rows();
    const auto J = fit.observed.cols();
    const double phi = fit.dispersion;
    const auto pool_size = static_cast<std::uint64_t>(fit.residual_pool.size());

    ReserveDistribution out;
    out.rows.resize(static_cast<std::size_t>(I));
    for (Eigen::Index r = 0; r < I; ++r) {
        auto& row = out.rows[static_cast<std::size_t>(r)];
        row.row = static_cast<int>(r);
        const auto last = std::min<Eigen::Index>(I - 1 - r, J - 1);
        row.observed = latest_cumulative(fit.observed, r, last);
        row.status = last == J - 1 ? RowStatus::fully_developed : RowStatus::included;
        row.point_reserve = fit.cl_reserves[r];
        row.F = row.observed + row.point_reserve > 0.0 ? row.observed / (row.observed + row.point_reserve) : 1.0;
    }
    out.point_reserve = fit.cl_reserves.sum();
    out.per_year = Eigen::MatrixXd::Zero(options.B, I);
    std::atomic<std::int64_t> rejected{0};

    parallel_for(options.B, options.threads, [&](std::int64_t b) {
        for (int attempt = 0; attempt <= kOdpMaxRedraws; ++attempt) {
            RngStream rng = keyed_stream(options.seed, {static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(attempt)});
            Eigen::MatrixXd pseudo = Eigen::MatrixXd::Constant(I, J, kNaN);
            for (Eigen::Index r = 0; r < I; ++r) {
                for (Eigen::Index j = 0; j < J && is_observed(I, r, j); ++j) {
                    const double m = fit.fitted(r, j);
                    if (m <= kOdpNegligibleMean) {
                        pseudo(r, j) = m;
                        continue;
                    }
                    const double res = fit.residual_pool[static_cast<std::size_t>(rng() % pool_size)];
                    pseudo(r, j) = m + res * std::sqrt(m);
                }
            }
            const auto f = refit_link_ratios(pseudo);
            if (!f) {
                rejected.fetch_add(1, std::memory_order_relaxed);
                continue;
            }
            for (Eigen::Index r = 0; r < I; ++r) {
                const auto last = std::min<Eigen::Index>(I - 1 - r, J - 1);
                double c = latest_cumulative(pseudo, r, last);
                double reserve = 0.0;
                for (Eigen::Index j = last; j + 1 < J; ++j) {
                    const double mean = std::max(c * ((*f)[j] - 1.0), kOdpNegligibleMean);
                    c *= (*f)[j];
                    reserve += phi > 0.0 ? sample_gamma(mean / phi, 1.0 / phi, rng) : mean;
                }
                out.per_year(b, r) = reserve;
            }
            return;
        }
        throw OdpError("pseudo-triangle refit failed " + std::to_string(kOdpMaxRedraws + 1) +
                       " times in replication " + std::to_string(b));
    });

    out.rejected = rejected.load();
    out.total = out.per_year.rowwise().sum();
    out.summary = summarize(out.total);
    return out;
}

} // namespace dgr
