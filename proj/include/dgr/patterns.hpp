#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgr/triangle.hpp"

namespace dgr {

enum class PatternMethod { chain_ladder, bornhuetter_ferguson, cape_cod, external };

std::string to_string(PatternMethod m);

/// Incremental development proportions pi on the open simplex, with the
/// cumulative proportions F_j = pi_0 + ... + pi_j and F_{J-1} = 1 exactly.
class DevelopmentPattern {
public:
    /// Proportions at or below kMinProportion are floored there and the vector
    /// renormalised; `floored()` lists the affected lags.
    static DevelopmentPattern from_proportions(const Eigen::VectorXd& pi, PatternMethod method = PatternMethod::external);
    static DevelopmentPattern from_cumulative(const Eigen::VectorXd& F, PatternMethod method = PatternMethod::external);

    static constexpr double kMinProportion = 1e-10;

    [[nodiscard]] const Eigen::VectorXd& pi() const noexcept { return pi_; }
    [[nodiscard]] const Eigen::VectorXd& F() const noexcept { return F_; }
    [[nodiscard]] int lags() const noexcept { return static_cast<int>(pi_.size()); }
    [[nodiscard]] PatternMethod method() const noexcept { return method_; }
    [[nodiscard]] const std::vector<int>& floored() const noexcept { return floored_; }

    /// Cumulative proportion at a lag; lags past the end are fully developed.
    [[nodiscard]] double F_at(int lag) const { return lag >= lags() - 1 ? 1.0 : F_[lag]; }

    [[nodiscard]] DevelopmentPattern relabel(PatternMethod method) const;

private:
    DevelopmentPattern() = default;
    Eigen::VectorXd pi_;
    Eigen::VectorXd F_;
    PatternMethod method_ = PatternMethod::external;
    std::vector<int> floored_;
};

struct ChainLadderFit {
    DevelopmentPattern pattern;
    Eigen::VectorXd link_ratios; ///< f_0 .. f_{J-2}
};

/// Volume-weighted link ratios and the implied pattern.
ChainLadderFit chain_ladder(const Triangle& t);

inline DevelopmentPattern chain_ladder_pattern(const Triangle& t) { return chain_ladder(t).pattern; }

/// Volume-weighted link ratios of an incremental triangle. Throws on a
/// non-positive denominator or a lag pair with no common observation.
Eigen::VectorXd link_ratios(const Triangle& t);

struct UltimateEstimates {
    Eigen::VectorXd ultimates;
    Eigen::VectorXd reserves;
    PatternMethod method = PatternMethod::chain_ladder;
    std::optional<double> prior_q;
    std::vector<int> floored_rows; ///< Cape Cod rows whose negative reserve was reported as 0

    [[nodiscard]] double total_reserve() const { return reserves.sum(); }
};

/// S_i = X_obs_i / F_{I-i}.
UltimateEstimates cl_ultimates(const Triangle& t, const DevelopmentPattern& p);

/// S_i = F S_i^CL + (1 - F) S_i^prior; rows with F = 0 take the prior.
UltimateEstimates bf_ultimates(const Triangle& t, const DevelopmentPattern& p, const Eigen::VectorXd& prior);

/// q = sum X_obs / sum E_i F_{I-i}; S_i = E_i q. Negative reserves are
/// reported as 0 and listed in floored_rows.
UltimateEstimates cape_cod_ultimates(const Triangle& t, const DevelopmentPattern& p);

/// Cumulative proportion reached by each row of `t` under `p`.
Eigen::VectorXd row_development(const Triangle& t, const DevelopmentPattern& p);

} // namespace dgr
