#include "ntz/cli/serialize.hpp"

namespace ntz::cli {

using nlohmann::json;

json to_json(const PlateauSolution& s) {
  return {{"tau", s.no_trade() ? json(nullptr) : json(s.tau)},
          {"p_star", s.p_star},
          {"target0", s.target0},
          {"utility", s.utility}};
}

json to_json(const NoTradeZone& z) { return {{"low", z.low}, {"high", z.high}}; }

json to_json(const UtilityBreakdown& b) {
  return {{"alpha", b.alpha}, {"slippage", b.slippage}, {"risk", b.risk}, {"total", b.total}};
}

json to_json(const SimulationTotals& t) {
  return {{"alpha", t.alpha},
          {"slippage", t.slippage},
          {"risk", t.risk},
          {"trade_count", t.trade_count},
          {"turnover", t.turnover}};
}

json to_json(const OracleConfig& c) {
  return {{"dt", c.dt},
          {"horizon", c.horizon},
          {"tol", c.tol},
          {"max_iter", c.max_iter},
          {"terminal_liquidation", c.terminal_liquidation}};
}

}  // namespace ntz::cli
