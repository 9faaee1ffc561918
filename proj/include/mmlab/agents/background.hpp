#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "mmlab/core/rng.hpp"
#include "mmlab/market/order_book.hpp"

namespace mmlab::agents {

using market::Qty;
using market::Side;
using market::Ticks;

struct NoiseAgentCfg {
    Qty order_size = 5;
    double arrival_prob = 0.5;
};

struct FundamentalCfg {
    double mean = 100'000.0;
    double kappa = 0.005;  // reversion per step
    double sigma = 5.0;    // ticks per step
};

struct ValueAgentCfg {
    FundamentalCfg fundamental;
    Ticks entry_threshold = 20;
    Qty order_size = 10;
    double wake_prob = 0.2;
};

struct MomentumCfg {
    int fast_window = 20;
    int slow_window = 50;
    Qty order_size = 10;
};

struct POVCfg {
    double pov_fraction = 0.35;
    int lookback = 100;
    int wake_interval = 10;
    int ladder_levels = 2;
    Ticks level_spacing = 10;
};

void validate(const NoiseAgentCfg& c);
void validate(const FundamentalCfg& c);
void validate(const ValueAgentCfg& c);
void validate(const MomentumCfg& c);
void validate(const POVCfg& c);

struct MarketIntent {
    Side side = Side::Buy;
    Qty qty = 0;
};

struct LimitIntent {
    Side side = Side::Buy;
    Qty qty = 0;
    Ticks price = 0;
};

// One market order of the configured size with probability arrival_prob.
std::optional<MarketIntent> noise_step(const NoiseAgentCfg& cfg, Stream& stream);

// x' = x + kappa (mean - x) + sigma xi, floored at one tick.
double fundamental_next(double x, const FundamentalCfg& cfg, Stream& stream);

// Crossing limit order at the opposite best price when the mid strays from the
// fundamental by more than the threshold. No order if the opposite side is empty.
std::optional<LimitIntent> value_step(const ValueAgentCfg& cfg, double fundamental, const market::Quotes& quotes,
                                      Stream& stream);

// Buy on the step the fast moving average crosses above the slow one, sell on
// the reverse cross. Needs slow_window + 1 mids so the previous step is defined.
std::optional<MarketIntent> momentum_step(const MomentumCfg& cfg, const std::deque<Ticks>& mid_history);

Qty pov_level_size(const POVCfg& cfg, Qty lookback_volume);

// Bids below and asks above mid, nearest level first on each side.
std::vector<LimitIntent> pov_ladder(const POVCfg& cfg, Ticks mid, Qty lookback_volume);

}  // namespace mmlab::agents
