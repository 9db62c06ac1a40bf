#pragma once

#include "json.hpp"
#include "ntz/closed_form.hpp"
#include "ntz/simulator.hpp"
#include "ntz/tv_oracle.hpp"
#include "ntz/utility.hpp"

namespace ntz::cli {

/// `tau` (null when no tangent exists), `p_star`, `target0`, `utility`.
nlohmann::json to_json(const PlateauSolution& s);
/// `low`, `high`.
nlohmann::json to_json(const NoTradeZone& z);
/// `alpha`, `slippage`, `risk`, `total`.
nlohmann::json to_json(const UtilityBreakdown& b);
/// `alpha`, `slippage`, `risk`, `trade_count`, `turnover`.
nlohmann::json to_json(const SimulationTotals& t);
nlohmann::json to_json(const OracleConfig& c);

}  // namespace ntz::cli
