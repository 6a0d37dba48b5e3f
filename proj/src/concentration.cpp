#include "dgr/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace dgr {

std::string to_string(Diagnostic d)
{
    switch (d) {
    case Diagnostic::heterogeneous: return "heterogeneous";
    case Diagnostic::stable: return "stable";
    case Diagnostic::delta_recommended: return "delta-recommended";
    }
    return "unknown";
}

Diagnostic classify_concentration(double c_hat)
{
    if (c_hat >= 100.0) {
        return Diagnostic::delta_recommended;
    }
    return c_hat >= 30.0 ? Diagnostic::stable : Diagnostic::heterogeneous;
}

PartialProportions partial_proportions(const Triangle& t, int k, RowRule rule)
{
    if (k < 1 || k > t.lags() - 2) {
        throw std::out_of_range("horizon k must lie in [1, J-2]; got " + std::to_string(k));
    }
    PartialProportions out;
    out.horizon = k;
    std::vector<Eigen::VectorXd> kept;
    for (int r = 0; r < t.accident_years(); ++r) {
        const int last = t.accident_years() - 1 - r;
        const bool qualifies = rule == RowRule::through_horizon ? k <= last : k < last;
        if (!qualifies) {
            continue;
        }
        Eigen::VectorXd x(k + 1);
        for (int j = 0; j <= k; ++j) {
            x[j] = t(r, j);
        }
        if ((x.array() <= 0.0).any()) {
            out.skipped.push_back({r, k, "non-positive increment"});
            continue;
        }
        kept.push_back(x.head(k) / x.sum());
        out.rows.push_back(r);
    }
    out.W.resize(static_cast<Eigen::Index>(kept.size()), k);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        out.W.row(static_cast<Eigen::Index>(i)) = kept[i].transpose();
    }
    return out;
}

CellMoments cell_estimate(const Eigen::Ref<const Eigen::VectorXd>& w, VarianceDivisor divisor)
{
    const auto n = w.size();
    if (n < 3) {
        throw std::invalid_argument("a cell estimate needs at least 3 samples");
    }
    const double m = w.mean();
    const double ss = (w.array() - m).square().sum();
    const double v = ss / static_cast<double>(divisor == VarianceDivisor::n_minus_1 ? n - 1 : n);
    return {m, v, m * (1.0 - m) / v - 1.0};
}

double median(std::vector<double> values)
{
    if (values.empty()) {
        throw std::invalid_argument("median of an empty set");
    }
    const auto n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (n % 2 == 1) {
        return *mid;
    }
    const double upper = *mid;
    const double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

ConcentrationEstimate estimate_c(const Triangle& t, const ConcentrationOptions& options)
{
    ConcentrationEstimate est;
    est.options = options;
    const int min_n = std::max(options.min_samples, 3);
    std::vector<double> values;

    for (int k = 1; k <= t.lags() - 2; ++k) {
        auto pp = partial_proportions(t, k, options.rows);
        est.skipped_rows.insert(est.skipped_rows.end(), pp.skipped.begin(), pp.skipped.end());
        const int n = static_cast<int>(pp.W.rows());
        for (int j = 0; j < k; ++j) {
            if (n < min_n) {
                est.dropped.push_back({j, k, n, "fewer than " + std::to_string(min_n) + " rows"});
                continue;
            }
            const auto cm = cell_estimate(pp.W.col(j), options.divisor);
            if (!std::isfinite(cm.c_hat)) {
                est.dropped.push_back({j, k, n, "zero sample variance"});
            } else if (cm.c_hat <= 0.0) {
                est.dropped.push_back({j, k, n, "non-positive estimate"});
            } else {
                est.cells.push_back({j, k, n, cm.mean, cm.c_hat});
                values.push_back(cm.c_hat);
            }
        }
    }
    if (values.empty()) {
        throw ConcentrationError("no valid (lag, horizon) cell for the moment estimator of c; the triangle is too "
                                 "small and needs a prior-regularised estimate of c");
    }
    std::sort(est.cells.begin(), est.cells.end(), [](const CellRecord& a, const CellRecord& b) {
        return std::tie(a.horizon, a.lag) < std::tie(b.horizon, b.lag);
    });
    est.c_hat = median(std::move(values));
    est.diagnostic = classify_concentration(est.c_hat);
    return est;
}

} // namespace dgr
