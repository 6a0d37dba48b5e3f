#include "dgr/patterns.hpp"

#include <cmath>
#include <stdexcept>

namespace dgr {

std::string to_string(PatternMethod m)
{
    switch (m) {
    case PatternMethod::chain_ladder: return "CL";
    case PatternMethod::bornhuetter_ferguson: return "BF";
    case PatternMethod::cape_cod: return "CC";
    case PatternMethod::external: return "external";
    }
    return "unknown";
}

DevelopmentPattern DevelopmentPattern::from_proportions(const Eigen::VectorXd& pi, PatternMethod method)
{
    if (pi.size() < 2) {
        throw std::invalid_argument("a development pattern needs at least 2 lags");
    }
    if (!pi.allFinite()) {
        throw std::invalid_argument("development proportions must be finite");
    }
    DevelopmentPattern p;
    p.method_ = method;
    p.pi_ = pi;
    for (Eigen::Index j = 0; j < pi.size(); ++j) {
        if (p.pi_[j] <= kMinProportion) {
            p.pi_[j] = kMinProportion;
            p.floored_.push_back(static_cast<int>(j));
        }
    }
    p.pi_ /= p.pi_.sum();
    p.F_.resize(p.pi_.size());
    double acc = 0.0;
    for (Eigen::Index j = 0; j < p.pi_.size(); ++j) {
        acc += p.pi_[j];
        p.F_[j] = acc;
    }
    p.F_[p.F_.size() - 1] = 1.0;
    return p;
}

DevelopmentPattern DevelopmentPattern::from_cumulative(const Eigen::VectorXd& F, PatternMethod method)
{
    Eigen::VectorXd pi(F.size());
    double prev = 0.0;
    for (Eigen::Index j = 0; j < F.size(); ++j) {
        pi[j] = F[j] - prev;
        prev = F[j];
    }
    return from_proportions(pi, method);
}

DevelopmentPattern DevelopmentPattern::relabel(PatternMethod method) const
{
    DevelopmentPattern p = *this;
    p.method_ = method;
    return p;
}

Eigen::VectorXd link_ratios(const Triangle& t)
{
    const int I = t.accident_years();
    const int J = t.lags();
    if (J < 2) {
        throw std::domain_error("link ratios need at least 2 development lags");
    }
    const Triangle c = cumulate(t);
    Eigen::VectorXd f(J - 1);
    for (int j = 0; j + 1 < J; ++j) {
        double num = 0.0;
        double den = 0.0;
        int pairs = 0;
        for (int r = 0; r < I; ++r) {
            if (c.observed(r, j + 1)) {
                num += c(r, j + 1);
                den += c(r, j);
                ++pairs;
            }
        }
        if (pairs == 0) {
            throw std::domain_error("no accident year observes both lag " + std::to_string(j) + " and lag " +
                                    std::to_string(j + 1));
        }
        if (!(den > 0.0)) {
            throw std::domain_error("non-positive cumulative column sum at lag " + std::to_string(j));
        }
        f[j] = num / den;
    }
    return f;
}

ChainLadderFit chain_ladder(const Triangle& t)
{
    const Eigen::VectorXd f = link_ratios(t);
    const auto J = f.size() + 1;
    // F_j = 1 / (f_j ... f_{J-2})
    Eigen::VectorXd F(J);
    F[J - 1] = 1.0;
    for (auto j = J - 2; j >= 0; --j) {
        F[j] = F[j + 1] / f[j];
    }
    return {DevelopmentPattern::from_cumulative(F, PatternMethod::chain_ladder), f};
}

Eigen::VectorXd row_development(const Triangle& t, const DevelopmentPattern& p)
{
    if (p.lags() != t.lags()) {
        throw std::invalid_argument("pattern and triangle disagree on the number of lags");
    }
    Eigen::VectorXd out(t.accident_years());
    for (int r = 0; r < t.accident_years(); ++r) {
        out[r] = p.F_at(t.last_lag(r));
    }
    return out;
}

UltimateEstimates cl_ultimates(const Triangle& t, const DevelopmentPattern& p)
{
    const auto diag = latest_diagonal(t);
    const Eigen::VectorXd F = row_development(t, p);
    if ((F.array() <= 0.0).any()) {
        throw std::domain_error("cannot gross up a row with F = 0");
    }
    UltimateEstimates u;
    u.method = PatternMethod::chain_ladder;
    u.ultimates = diag.observed.cwiseQuotient(F);
    u.reserves = u.ultimates - diag.observed;
    for (Eigen::Index r = 0; r < F.size(); ++r) {
        if (F[r] == 1.0) {
            u.reserves[r] = 0.0;
        }
    }
    return u;
}

UltimateEstimates bf_ultimates(const Triangle& t, const DevelopmentPattern& p, const Eigen::VectorXd& prior)
{
    if (prior.size() != t.accident_years()) {
        throw std::invalid_argument("prior ultimates must have one entry per accident year");
    }
    const auto diag = latest_diagonal(t);
    const Eigen::VectorXd F = row_development(t, p);
    UltimateEstimates u;
    u.method = PatternMethod::bornhuetter_ferguson;
    u.ultimates.resize(F.size());
    for (Eigen::Index r = 0; r < F.size(); ++r) {
        // F * (X/F) collapses to X, so F = 0 needs no special case.
        u.ultimates[r] = diag.observed[r] + (1.0 - F[r]) * prior[r];
    }
    u.reserves = u.ultimates - diag.observed;
    return u;
}

UltimateEstimates cape_cod_ultimates(const Triangle& t, const DevelopmentPattern& p)
{
    if (!t.exposures()) {
        throw std::invalid_argument("Cape Cod requires exposures");
    }
    const Eigen::VectorXd& E = *t.exposures();
    if ((E.array() <= 0.0).any()) {
        throw std::invalid_argument("Cape Cod requires positive exposures");
    }
    const auto diag = latest_diagonal(t);
    const Eigen::VectorXd F = row_development(t, p);
    const double used = E.dot(F);
    if (!(used > 0.0)) {
        throw std::domain_error("sum of E_i F_{I-i} is zero");
    }
    UltimateEstimates u;
    u.method = PatternMethod::cape_cod;
    u.prior_q = diag.observed.sum() / used;
    u.ultimates = E * *u.prior_q;
    u.reserves = u.ultimates - diag.observed;
    for (Eigen::Index r = 0; r < F.size(); ++r) {
        if (u.reserves[r] < 0.0) {
            u.reserves[r] = 0.0;
            u.floored_rows.push_back(static_cast<int>(r));
        }
    }
    return u;
}

} // namespace dgr
