#pragma once

#include <json.hpp>

#include "dgr/concentration.hpp"
#include "dgr/patterns.hpp"
#include "dgr/predictive.hpp"
#include "dgr/simlab.hpp"

namespace dgr::cli {

using nlohmann::json;

json to_json(const Eigen::VectorXd& v);
json to_json(const DevelopmentPattern& p);
json to_json(const ConcentrationEstimate& est);
json to_json(const UltimateEstimates& u);
json to_json(const Summary& s);
json to_json(const ReserveDistribution& d);
json to_json(const SimulationRow& r);
json to_json(const SimulationReport& r);
json to_json(const std::vector<SigmaCRow>& rows);
json to_json(const std::vector<ConservatismRow>& rows);

} // namespace dgr::cli
