#pragma once

#include <cstdint>
#include <span>

#include "mmlab/core/rng.hpp"
#include "mmlab/market/types.hpp"

namespace mmlab::dealer {

using market::Qty;
using market::Side;
using market::Ticks;

inline constexpr Ticks kStartingCash = 10'000'000;  // $100,000

struct MMQuote {
    Ticks buy_spread = 0;   // investor sells to the MM at mid - buy_spread
    Ticks sell_spread = 0;  // investor buys from the MM at mid + sell_spread
};

struct MMAccount {
    int id = 0;
    Ticks cash = kStartingCash;
    Qty inventory = 0;

    Ticks mark_to_market(Ticks mid) const { return cash + inventory * mid; }
};

struct HedgeResult {
    Qty hedged_qty = 0;
    Ticks cost = 0;
};

struct InvestorCfg {
    int count = 50;
    Qty order_size = 10;
    double arrival_prob = 0.5;
};

void validate(const InvestorCfg& cfg);

// spread = round(market_spread * (1 + eta)), clamped at zero.
MMQuote quote_from_etas(Ticks market_spread, double eta_buy, double eta_sell);

// Index of the narrowest relevant spread; ties are split uniformly with `stream`.
std::size_t route_investor_order(std::span<const MMQuote> quotes, Side investor_side, Stream& stream);

// Returns the earnings delta qty * matched spread.
Ticks execute_mm_trade(MMAccount& account, Side investor_side, Qty qty, const MMQuote& quote, Ticks mid);

// Removes round(|inventory| * eta_h) shares at mid and charges market_spread per share.
HedgeResult hedge(MMAccount& account, double eta_h, Ticks market_spread, Ticks mid);

inline Ticks mark_to_market(const MMAccount& account, Ticks mid) { return account.mark_to_market(mid); }

}  // namespace mmlab::dealer
