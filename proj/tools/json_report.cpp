#include "json_report.hpp"

namespace dgr::cli {

json to_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json to_json(const DevelopmentPattern& p)
{
    return {{"method", to_string(p.method())}, {"pi", to_json(p.pi())}, {"F", to_json(p.F())}, {"floored_lags", p.floored()}};
}

json to_json(const ConcentrationEstimate& est)
{
    json cells = json::array();
    for (const auto& c : est.cells) {
        cells.push_back({{"lag", c.lag}, {"horizon", c.horizon}, {"n", c.n}, {"pi_hat", c.pi_hat}, {"c_hat", c.c_hat}});
    }
    json dropped = json::array();
    for (const auto& d : est.dropped) {
        dropped.push_back({{"lag", d.lag}, {"horizon", d.horizon}, {"n", d.n}, {"reason", d.reason}});
    }
    json skipped = json::array();
    for (const auto& s : est.skipped_rows) {
        skipped.push_back({{"accident_year", s.row + 1}, {"horizon", s.horizon}, {"reason", s.reason}});
    }
    return {{"c_hat", est.c_hat},
            {"diagnostic", to_string(est.diagnostic)},
            {"divisor", est.options.divisor == VarianceDivisor::n_minus_1 ? "n-1" : "n"},
            {"row_rule", est.options.rows == RowRule::through_horizon ? "through-horizon" : "beyond-horizon"},
            {"cells", cells},
            {"dropped_cells", dropped},
            {"skipped_rows", skipped}};
}

json to_json(const UltimateEstimates& u)
{
    json out{{"method", to_string(u.method)},
             {"total_reserve", u.total_reserve()},
             {"ultimates", to_json(u.ultimates)},
             {"reserves", to_json(u.reserves)}};
    if (u.prior_q) {
        out["q"] = *u.prior_q;
    }
    if (!u.floored_rows.empty()) {
        json rows = json::array();
        for (int r : u.floored_rows) {
            rows.push_back(r + 1);
        }
        out["negative_reserve_floored_years"] = rows;
    }
    return out;
}

json to_json(const Summary& s)
{
    return {{"mean", s.mean ? json(*s.mean) : json(nullptr)},
            {"sd", s.sd},
            {"q05", s.q05},
            {"q25", s.q25},
            {"q50", s.q50},
            {"q75", s.q75},
            {"q95", s.q95}};
}

json to_json(const ReserveDistribution& d)
{
    json rows = json::array();
    for (const auto& r : d.rows) {
        json row{{"accident_year", r.row + 1},
                 {"observed", r.observed},
                 {"F", r.F},
                 {"cF", r.cF},
                 {"status", to_string(r.status)},
                 {"point_reserve", r.point_reserve}};
        if (r.status != RowStatus::excluded && r.status != RowStatus::fully_developed) {
            row["summary"] = to_json(d.row_summary(r.row));
        }
        rows.push_back(row);
    }
    return {{"B", d.replications()},
            {"summary", to_json(d.summary)},
            {"point_reserve", d.point_reserve},
            {"excluded_point_reserve", d.excluded_point_reserve},
            {"rejected_replications", d.rejected},
            {"by_year", rows}};
}

json to_json(const SimulationRow& r)
{
    return {{"label", r.label},
            {"method", r.method},
            {"I", r.I},
            {"J", r.J},
            {"c", r.c},
            {"absent", r.absent},
            {"replications", r.replications},
            {"failures", r.failures},
            {"coverage95", r.coverage95},
            {"coverage95_se", r.coverage95_se},
            {"coverage75", r.coverage75},
            {"coverage75_se", r.coverage75_se},
            {"rel_bias", r.rel_bias},
            {"rel_bias_se", r.rel_bias_se},
            {"rel_width", r.rel_width},
            {"rel_width_se", r.rel_width_se},
            {"mean_c_hat", r.mean_c_hat},
            {"mean_c_hat_se", r.mean_c_hat_se},
            {"odp_rejections", r.odp_rejections},
            {"runtime_seconds", r.runtime_seconds}};
}

json to_json(const SimulationReport& r)
{
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back(to_json(row));
    }
    return {{"study", r.study}, {"rows", rows}};
}

json to_json(const std::vector<SigmaCRow>& rows)
{
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"c", r.c},
                       {"sigma_c2_formula", r.formula},
                       {"I_var_c_hat", r.empirical},
                       {"ratio", r.ratio},
                       {"mean_c_hat", r.mean_c_hat},
                       {"failures", r.failures}});
    }
    return out;
}

json to_json(const std::vector<ConservatismRow>& rows)
{
    json out = json::array();
    for (const auto& r : rows) {
        out.push_back({{"F", r.F},
                       {"c_implied", r.c_implied},
                       {"true_sd", r.true_sd},
                       {"bootstrap_sd", r.bootstrap_sd},
                       {"ratio", r.ratio},
                       {"target", r.target}});
    }
    return out;
}

} // namespace dgr::cli
