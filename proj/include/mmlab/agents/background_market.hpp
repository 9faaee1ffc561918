#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "mmlab/agents/background.hpp"
#include "mmlab/core/rng.hpp"
#include "mmlab/market/event_log.hpp"
#include "mmlab/market/order_book.hpp"

namespace mmlab::agents {

struct PopulationCfg {
    int noise = 100;
    int value = 10;
    int momentum = 10;
    int pov = 1;
    double multiplier = 1.0;

    // round(n * multiplier), keeping at least one agent of every kind that is present
    int scaled(int n) const;
};

struct BackgroundCfg {
    PopulationCfg population;
    NoiseAgentCfg noise;
    ValueAgentCfg value;
    MomentumCfg momentum;
    POVCfg pov;
    Ticks opening_price = market::kOpeningPrice;
    Ticks initial_spread = 20;  // reported until the book is first two-sided
};

void validate(const BackgroundCfg& cfg);

struct MarketStep {
    std::int64_t step = 0;
    Ticks mid = 0;
    Ticks spread = 0;   // last two-sided spread if the book is one-sided now
    bool two_sided = false;
    Qty volume = 0;     // shares traded in the book during this step
    double fundamental = 0.0;
};

// The background ecology around one order book. Agent ids are assigned as
// POV agents first, then noise, value and momentum agents; every step each
// agent acts once in id order.
class BackgroundMarket {
public:
    // `session_salt` separates the streams of consecutive sessions that share a master seed.
    BackgroundMarket(const BackgroundCfg& cfg, const RngRegistry& registry, std::uint64_t session_salt);

    MarketStep step();

    const market::OrderBook& book() const { return book_; }
    const MarketStep& last() const { return last_; }
    std::int64_t current_step() const { return step_; }
    int agent_count() const { return static_cast<int>(agents_.size()); }
    market::EventLog& log() { return log_; }
    const market::EventLog& log() const { return log_; }

private:
    enum class Kind { Pov, Noise, Value, Momentum };
    struct Agent {
        market::AgentId id;
        Kind kind;
        Stream stream;
        std::vector<market::OrderId> live_orders;
    };

    void submit_market(Agent& a, const MarketIntent& m);
    void submit_limit(Agent& a, const LimitIntent& l);
    void run_pov(Agent& a);
    Qty lookback_volume() const;

    BackgroundCfg cfg_;
    market::OrderBook book_;
    market::EventLog log_;
    std::vector<Agent> agents_;
    Stream fundamental_stream_;
    double fundamental_;
    std::deque<Ticks> mid_history_;
    std::deque<Qty> volume_history_;
    Qty step_volume_ = 0;
    market::OrderId next_order_id_ = 1;
    std::int64_t step_ = 0;
    Ticks last_spread_;
    MarketStep last_;
};

// Agent id reserved for the shared fundamental process stream.
inline constexpr std::uint64_t kFundamentalStreamId = 1'000'000;

}  // namespace mmlab::agents
