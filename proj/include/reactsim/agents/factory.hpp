#pragma once

#include <memory>

#include "reactsim/agents/aa.hpp"
#include "reactsim/agents/trader.hpp"
#include "reactsim/agents/zip.hpp"

namespace reactsim {

struct AgentParams {
  ZipParams zip{};
  AaParams aa{};
};

/// `init_rng` draws the per-trader learning parameters of ZIP and AA.
inline std::unique_ptr<Trader> make_trader(Strategy strategy, TraderId id, Side side, const MarketContext& market,
                                           const AgentParams& params, Rng& init_rng) {
  switch (strategy) {
    case Strategy::GVWY: return std::make_unique<GvwyTrader>(id, side, market);
    case Strategy::SHVR: return std::make_unique<ShvrTrader>(id, side, market);
    case Strategy::ZIC: return std::make_unique<ZicTrader>(id, side, market);
    case Strategy::ZIP: return std::make_unique<ZipTrader>(id, side, market, params.zip, init_rng);
    case Strategy::AA: return std::make_unique<AaTrader>(id, side, market, params.aa, init_rng);
  }
  return nullptr;
}

}  // namespace reactsim
