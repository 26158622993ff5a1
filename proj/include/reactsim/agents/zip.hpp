#pragma once

// Zero Intelligence Plus. A profit margin mu sets the quote (buyers
// L(1 - mu), sellers L(1 + mu)); after each market event the margin moves
// toward a perturbed target price by a Widrow-Hoff step with momentum.

#include <algorithm>
#include <optional>

#include "reactsim/agents/trader.hpp"

namespace reactsim {

struct ZipParams {
  double beta_lo{0.1};
  double beta_hi{0.5};
  double gamma_lo{0.0};
  double gamma_hi{0.1};
  double margin_lo{0.05};
  double margin_hi{0.35};
  double relative_perturbation{0.05};
  double absolute_perturbation_ticks{5.0};  // 0.05 currency units
};

struct ZipState {
  double margin{0.0};    ///< mu >= 0 on both sides; below 1 for buyers
  double beta{0.3};      ///< learning rate
  double gamma{0.05};    ///< momentum coefficient
  double momentum{0.0};  ///< previous price change
  std::optional<Price> last_quote;

  std::optional<Price> limit;  ///< limit of the most recent assignment
  Side side{Side::bid};
  bool active{false};  ///< holds an unfilled assignment

  bool operator==(const ZipState&) const = default;
};

inline ZipState zip_initial_state(Side side, const ZipParams& params, Rng& rng) {
  ZipState s;
  s.side = side;
  s.beta = uniform_real(rng, params.beta_lo, params.beta_hi);
  s.gamma = uniform_real(rng, params.gamma_lo, params.gamma_hi);
  s.margin = uniform_real(rng, params.margin_lo, params.margin_hi);
  return s;
}

/// Unrounded quote in ticks implied by the margin.
inline double zip_raw_price(double margin, Price limit, Side side) {
  const double l = static_cast<double>(limit.ticks);
  return side == Side::bid ? l * (1.0 - margin) : l * (1.0 + margin);
}

inline Price zip_quote(const ZipState& state, Price limit, Side side, const PriceBounds& bounds) {
  return clamp_no_loss(round_quote(zip_raw_price(state.margin, limit, side), side), limit, side, bounds);
}

namespace detail {

inline double zip_target_up(double price, const ZipParams& p, Rng& rng) {
  const double rel = price * (1.0 + p.relative_perturbation * uniform01(rng));
  return rel + p.absolute_perturbation_ticks * uniform01(rng);
}

inline double zip_target_down(double price, const ZipParams& p, Rng& rng) {
  const double rel = price * (1.0 - p.relative_perturbation * uniform01(rng));
  return rel - p.absolute_perturbation_ticks * uniform01(rng);
}

// Widrow-Hoff step with momentum toward `target`; a move that would take the
// margin negative is discarded.
inline void zip_alter_margin(ZipState& s, double target, const PriceBounds& bounds) {
  const double l = static_cast<double>(s.limit->ticks);
  const double price = zip_raw_price(s.margin, *s.limit, s.side);
  const double change = (1.0 - s.gamma) * s.beta * (target - price) + s.gamma * s.momentum;
  s.momentum = change;
  const double next = price + change;
  if (s.side == Side::bid) {
    const double mu = 1.0 - next / l;
    if (mu > 0.0) s.margin = std::min(mu, 1.0 - 1e-9);
  } else {
    const double mu = next / l - 1.0;
    const double cap = static_cast<double>(bounds.max.ticks) / l - 1.0;
    if (mu > 0.0) s.margin = std::max(0.0, std::min(mu, cap));
  }
}

}  // namespace detail

/// Margin update after one market event. Buyer rules (sellers mirrored):
///  - on a trade at p: quote >= p raises the margin toward just below p; a bid
///    that was hit above a still-working quote lowers it toward just above p;
///  - with no trade, a working buyer whose quote is at or below a newly
///    resting bid (its own included) lowers the margin toward just above it.
inline ZipState zip_respond(ZipState s, const MarketEvent& event, const LobSnapshot& /*book*/, TraderId self,
                            const ZipParams& params, const PriceBounds& bounds, Rng& rng) {
  const Trade* trade = event.trade();
  if (!s.limit || event.kind == EventKind::order_cancelled) return s;

  // comparisons use the quote as it would be posted, on the tick grid
  const double price = static_cast<double>(zip_quote(s, *s.limit, s.side, bounds).ticks);
  const bool bid_hit = trade && trade->aggressor == Side::ask;
  const bool ask_lifted = trade && trade->aggressor == Side::bid;
  // price of a newly resting order on `side` (ours included), 0 when the event is not one
  auto posted_price = [&](Side side) {
    const Order* o = event.order();
    if (event.kind != EventKind::order_posted || !o || o->side != side) return 0.0;
    return static_cast<double>(o->price.ticks);
  };

  if (s.side == Side::ask) {
    if (trade) {
      const double p = static_cast<double>(trade->price.ticks);
      if (price <= p) {
        detail::zip_alter_margin(s, detail::zip_target_up(p, params, rng), bounds);
      } else if (ask_lifted && s.active) {
        detail::zip_alter_margin(s, detail::zip_target_down(p, params, rng), bounds);
      }
    } else if (const double q = posted_price(Side::ask); s.active && q > 0.0 && price >= q) {
      detail::zip_alter_margin(s, detail::zip_target_down(q, params, rng), bounds);
    }
  } else {
    if (trade) {
      const double p = static_cast<double>(trade->price.ticks);
      if (price >= p) {
        detail::zip_alter_margin(s, detail::zip_target_down(p, params, rng), bounds);
      } else if (bid_hit && s.active) {
        detail::zip_alter_margin(s, detail::zip_target_up(p, params, rng), bounds);
      }
    } else if (const double q = posted_price(Side::bid); s.active && q > 0.0 && price <= q) {
      detail::zip_alter_margin(s, detail::zip_target_up(q, params, rng), bounds);
    }
  }

  if (trade && (trade->buyer == self || trade->seller == self)) s.active = false;
  return s;
}

class ZipTrader final : public Trader {
 public:
  ZipTrader(TraderId id, Side side, MarketContext market, ZipParams params, Rng& init_rng)
      : Trader(id, side, market), params_(params), state_(zip_initial_state(side, params, init_rng)) {}

  [[nodiscard]] Strategy strategy() const override { return Strategy::ZIP; }
  [[nodiscard]] std::unique_ptr<Trader> clone() const override { return std::make_unique<ZipTrader>(*this); }

  std::optional<Price> get_order(const Assignment& a, const LobSnapshot&, Rng&) override {
    state_.limit = a.limit;
    state_.side = a.side;
    state_.active = true;
    const Price q = zip_quote(state_, a.limit, a.side, market().bounds);
    state_.last_quote = q;
    return q;
  }

  void respond(const MarketEvent& event, const LobSnapshot& book, Rng& rng) override {
    state_ = zip_respond(std::move(state_), event, book, id(), params_, market().bounds, rng);
  }

  [[nodiscard]] const ZipState& state() const { return state_; }
  ZipState& mutable_state() { return state_; }

 private:
  ZipParams params_;
  ZipState state_;
};

}  // namespace reactsim
