#pragma once

// Adaptive-Aggressive trader.
//
// Long-term learning: an exponential moving average of transaction prices
// estimates the equilibrium p_hat; the RMS deviation of a bounded window of
// prices around p_hat gives the volatility sigma_hat, which steers the
// target-curve shape theta. Short-term learning: aggressiveness r in [-1, 1]
// moves toward the aggressiveness that would have matched each observed
// price. The target price tau(r) is p_hat at r = 0 for intra-marginal
// traders and approaches the limit as r -> 1; quotes step a fraction 1/eta
// of the way from the current best price toward tau.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "reactsim/agents/trader.hpp"

namespace reactsim {

struct AaParams {
  double ema_alpha{1.0 / 3.0};
  std::size_t window{30};  ///< trade prices kept for sigma_hat
  double lambda_r{0.05};
  double lambda_a{0.05};
  double eta{3.0};
  double theta_init{-2.0};
  double theta_min{-8.0};
  double theta_max{2.0};
  double theta_gamma{2.0};
  double beta1_lo{0.1}, beta1_hi{0.5};  ///< short-term learning rate range
  double beta2_lo{0.1}, beta2_hi{0.5};  ///< long-term learning rate range
  double r_init_lo{-0.3}, r_init_hi{0.0};
  bool update_on_quotes{true};  ///< also learn from posted orders that did not trade
  /// Consecutive actions without any transaction in the market after which
  /// each further action nudges r toward aggression. Breaks the stall where
  /// every bid target sits below every ask target. 0 disables.
  int impatience{2};
  /// Ceiling used by the seller's passive target branch, in ticks; 0 means
  /// the system maximum. Quotes are still clamped to the system bounds.
  Ticks target_ceiling{0};
};

inline Price aa_ceiling(const AaParams& params, const PriceBounds& bounds) {
  return params.target_ceiling > 0 ? Price{params.target_ceiling} : bounds.max;
}

struct AaState {
  std::optional<double> p_hat;  ///< equilibrium estimate, ticks
  double sigma{0.0};            ///< RMS deviation around p_hat, ticks
  double r{0.0};
  double theta{-2.0};
  double beta1{0.3};
  double beta2{0.3};
  double margin{0.0};
  std::vector<double> history;  ///< ring of the last `window` trade prices
  std::size_t history_next{0};  ///< slot overwritten once the ring is full
  std::optional<double> alpha_min;
  std::optional<double> alpha_max;
  int quiet_actions{0};  ///< own actions since the last transaction seen

  std::optional<Price> limit;
  Side side{Side::bid};
  bool active{false};

  bool operator==(const AaState&) const = default;
};

inline AaState aa_initial_state(Side side, const AaParams& params, Rng& rng) {
  AaState s;
  s.side = side;
  s.theta = params.theta_init;
  s.beta1 = uniform_real(rng, params.beta1_lo, params.beta1_hi);
  s.beta2 = uniform_real(rng, params.beta2_lo, params.beta2_hi);
  s.r = uniform_real(rng, params.r_init_lo, params.r_init_hi);
  return s;
}

inline bool aa_is_intramarginal(Price limit, double p_hat, Side side) {
  const double l = static_cast<double>(limit.ticks);
  return side == Side::bid ? l >= p_hat : l <= p_hat;
}

namespace detail {

// (e^{x theta} - 1) / (e^theta - 1) on x in [0, 1]; tends to x as theta -> 0.
inline double aa_shape(double x, double theta) {
  if (std::abs(theta) < 1e-8) return x;
  return std::expm1(x * theta) / std::expm1(theta);
}

// Inverse of aa_shape on y in [0, 1].
inline double aa_shape_inverse(double y, double theta) {
  y = std::clamp(y, 0.0, 1.0);
  if (std::abs(theta) < 1e-8) return y;
  return std::log1p(y * std::expm1(theta)) / theta;
}

}  // namespace detail

/// Target price (ticks) for aggressiveness r. Buyers: non-decreasing in r;
/// sellers: non-increasing. `max_price` bounds the seller's passive branch.
inline double aa_target(double r, double theta, double p_hat, Price limit, Side side, Price max_price) {
  using detail::aa_shape;
  r = std::clamp(r, -1.0, 1.0);
  const double l = static_cast<double>(limit.ticks);
  const double mx = static_cast<double>(max_price.ticks);
  if (side == Side::bid) {
    if (aa_is_intramarginal(limit, p_hat, side)) {
      return r >= 0 ? p_hat + (l - p_hat) * aa_shape(r, theta) : p_hat * (1.0 - aa_shape(-r, theta));
    }
    return r >= 0 ? l : l * (1.0 - aa_shape(-r, theta));
  }
  if (aa_is_intramarginal(limit, p_hat, side)) {
    return r >= 0 ? p_hat - (p_hat - l) * aa_shape(r, theta) : p_hat + (mx - p_hat) * aa_shape(-r, theta);
  }
  return r >= 0 ? l : l + (mx - l) * aa_shape(-r, theta);
}

/// Aggressiveness whose target equals `price`, clamped to [-1, 1].
inline double aa_r_shout(double price, double theta, double p_hat, Price limit, Side side, Price max_price) {
  using detail::aa_shape_inverse;
  const double l = static_cast<double>(limit.ticks);
  const double mx = static_cast<double>(max_price.ticks);
  if (side == Side::bid) {
    if (aa_is_intramarginal(limit, p_hat, side)) {
      if (price >= p_hat) return l > p_hat ? aa_shape_inverse((price - p_hat) / (l - p_hat), theta) : 1.0;
      return -aa_shape_inverse(1.0 - price / p_hat, theta);
    }
    if (price >= l) return 0.0;
    return -aa_shape_inverse(1.0 - price / l, theta);
  }
  if (aa_is_intramarginal(limit, p_hat, side)) {
    if (price <= p_hat) return p_hat > l ? aa_shape_inverse((p_hat - price) / (p_hat - l), theta) : 1.0;
    return mx > p_hat ? -aa_shape_inverse((price - p_hat) / (mx - p_hat), theta) : -1.0;
  }
  if (price <= l) return 0.0;
  return mx > l ? -aa_shape_inverse((price - l) / (mx - l), theta) : -1.0;
}

/// Folds one transaction price into the equilibrium estimate and volatility.
inline AaState aa_estimate(AaState s, Price trade_price, const AaParams& params) {
  const double p = static_cast<double>(trade_price.ticks);
  s.p_hat = s.p_hat ? *s.p_hat + params.ema_alpha * (p - *s.p_hat) : p;
  const std::size_t window = std::max<std::size_t>(params.window, 1);
  if (s.history.size() < window) {
    s.history.push_back(p);
  } else {
    s.history[s.history_next] = p;
    s.history_next = (s.history_next + 1) % window;
  }
  double sq = 0.0;
  for (double h : s.history) sq += (h - *s.p_hat) * (h - *s.p_hat);
  s.sigma = std::sqrt(sq / static_cast<double>(s.history.size()));
  return s;
}

namespace detail {

// Long-term theta adaptation from normalised relative volatility.
inline void aa_update_theta(AaState& s, const AaParams& params) {
  if (!s.p_hat || *s.p_hat <= 0.0) return;
  const double alpha = s.sigma / *s.p_hat;
  s.alpha_min = s.alpha_min ? std::min(*s.alpha_min, alpha) : alpha;
  s.alpha_max = s.alpha_max ? std::max(*s.alpha_max, alpha) : alpha;
  const double span = *s.alpha_max - *s.alpha_min;
  const double a = span > 0.0 ? (alpha - *s.alpha_min) / span : 0.4;
  const double desired = params.theta_min + (params.theta_max - params.theta_min) *
                                                (1.0 - a * std::exp(params.theta_gamma * (a - 1.0)));
  s.theta += s.beta2 * (desired - s.theta);
}

inline void aa_update_aggressiveness(AaState& s, double price, bool more_aggressive, const AaParams& params,
                                     Price max_price) {
  const double shout = aa_r_shout(price, s.theta, *s.p_hat, *s.limit, s.side, max_price);
  const double delta = more_aggressive ? (1.0 + params.lambda_r) * shout + params.lambda_a
                                       : (1.0 - params.lambda_r) * shout - params.lambda_a;
  s.r = std::clamp(s.r + s.beta1 * (delta - s.r), -1.0, 1.0);
}

inline void aa_set_margin(AaState& s, double tau) {
  if (!s.limit || s.limit->ticks <= 0) return;
  const double l = static_cast<double>(s.limit->ticks);
  s.margin = s.side == Side::bid ? std::clamp(1.0 - tau / l, 0.0, 1.0 - 1e-9) : std::max(0.0, tau / l - 1.0);
}

inline void aa_refresh_margin(AaState& s, Price max_price) {
  if (!s.p_hat || !s.limit) return;
  aa_set_margin(s, aa_target(s.r, s.theta, *s.p_hat, *s.limit, s.side, max_price));
}

}  // namespace detail

/// Quote for the current book. Before any transaction has been seen the
/// trader draws uniformly within its no-loss range. Returns nothing when
/// the limit cannot improve on the best price on the trader's own side.
inline std::optional<Price> aa_quote_at(double tau, Price limit, Side side, const LobSnapshot& book,
                                        const PriceBounds& bounds, const AaParams& params) {
  const double l = static_cast<double>(limit.ticks);
  const double o_bid = book.best_bid ? static_cast<double>(book.best_bid->ticks) : 0.0;
  const double o_ask = book.best_ask ? static_cast<double>(book.best_ask->ticks) : static_cast<double>(bounds.max.ticks);
  double q;
  if (side == Side::bid) {
    if (l <= o_bid) return std::nullopt;
    q = o_ask <= tau ? o_ask : o_bid + (tau - o_bid) / params.eta;
  } else {
    if (l >= o_ask) return std::nullopt;
    q = o_bid >= tau ? o_bid : o_ask - (o_ask - tau) / params.eta;
  }
  return clamp_no_loss(round_quote(q, side), limit, side, bounds);
}

inline std::optional<Price> aa_quote(const AaState& s, Price limit, Side side, const LobSnapshot& book,
                                     const PriceBounds& bounds, const AaParams& params, Rng& rng) {
  if (!s.p_hat) return zic_quote(limit, side, bounds, rng);
  return aa_quote_at(aa_target(s.r, s.theta, *s.p_hat, limit, side, aa_ceiling(params, bounds)), limit, side, book,
                     bounds, params);
}

/// Called once per action before quoting: after `impatience` quiet actions
/// r moves one learning step toward the more aggressive shout of its own target.
inline void aa_note_action(AaState& s, const AaParams& params, Price max_price) {
  ++s.quiet_actions;
  if (params.impatience <= 0 || !s.p_hat || !s.limit || s.quiet_actions <= params.impatience) return;
  const double tau = aa_target(s.r, s.theta, *s.p_hat, *s.limit, s.side, max_price);
  detail::aa_update_aggressiveness(s, tau, true, params, max_price);
}

inline AaState aa_respond(AaState s, const MarketEvent& event, TraderId self, const AaParams& params,
                          const PriceBounds& bounds) {
  const Price ceiling = aa_ceiling(params, bounds);
  if (const Trade* trade = event.trade()) {
    s.quiet_actions = 0;
    s = aa_estimate(std::move(s), trade->price, params);
    detail::aa_update_theta(s, params);
    if (s.limit) {
      const double q = static_cast<double>(trade->price.ticks);
      const double tau = aa_target(s.r, s.theta, *s.p_hat, *s.limit, s.side, ceiling);
      const bool too_aggressive = s.side == Side::bid ? tau >= q : tau <= q;
      detail::aa_update_aggressiveness(s, q, !too_aggressive, params, ceiling);
      detail::aa_refresh_margin(s, ceiling);
    }
    if (trade->buyer == self || trade->seller == self) s.active = false;
    return s;
  }
  if (!params.update_on_quotes || !s.p_hat || !s.limit || event.kind != EventKind::order_posted) return s;
  const Order& order = *event.order();
  if (order.trader == self || order.side != s.side) return s;
  // a competing quote beyond our target on our own side: become more aggressive
  const double q = static_cast<double>(order.price.ticks);
  const double tau = aa_target(s.r, s.theta, *s.p_hat, *s.limit, s.side, ceiling);
  const bool outbid = s.side == Side::bid ? q > tau : q < tau;
  if (outbid) {
    detail::aa_update_aggressiveness(s, q, true, params, ceiling);
    detail::aa_refresh_margin(s, ceiling);
  }
  return s;
}

class AaTrader final : public Trader {
 public:
  AaTrader(TraderId id, Side side, MarketContext market, AaParams params, Rng& init_rng)
      : Trader(id, side, market), params_(params), state_(aa_initial_state(side, params, init_rng)) {}

  [[nodiscard]] Strategy strategy() const override { return Strategy::AA; }
  [[nodiscard]] std::unique_ptr<Trader> clone() const override { return std::make_unique<AaTrader>(*this); }

  std::optional<Price> get_order(const Assignment& a, const LobSnapshot& book, Rng& rng) override {
    state_.limit = a.limit;
    state_.side = a.side;
    state_.active = true;
    const Price ceiling = aa_ceiling(params_, market().bounds);
    aa_note_action(state_, params_, ceiling);
    if (!state_.p_hat) return zic_quote(a.limit, a.side, market().bounds, rng);
    const double tau = aa_target(state_.r, state_.theta, *state_.p_hat, a.limit, a.side, ceiling);
    detail::aa_set_margin(state_, tau);
    return aa_quote_at(tau, a.limit, a.side, book, market().bounds, params_);
  }

  void respond(const MarketEvent& event, const LobSnapshot&, Rng&) override {
    state_ = aa_respond(std::move(state_), event, id(), params_, market().bounds);
  }

  [[nodiscard]] const AaState& state() const { return state_; }
  AaState& mutable_state() { return state_; }

 private:
  AaParams params_;
  AaState state_;
};

}  // namespace reactsim
