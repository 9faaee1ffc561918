#include "mmlab/agents/background_market.hpp"

#include <cmath>
#include <stdexcept>

namespace mmlab::agents {

using market::Event;
using market::EventKind;

int PopulationCfg::scaled(int n) const
{
    if (n <= 0) return 0;
    const auto s = static_cast<int>(std::llround(n * multiplier));
    return s < 1 ? 1 : s;
}

void validate(const BackgroundCfg& cfg)
{
    const auto& p = cfg.population;
    if (p.noise < 0 || p.value < 0 || p.momentum < 0 || p.pov < 0) throw std::invalid_argument("population counts must be >= 0");
    if (!(p.multiplier > 0.0)) throw std::invalid_argument("population.multiplier must be positive");
    validate(cfg.noise);
    validate(cfg.value);
    validate(cfg.momentum);
    validate(cfg.pov);
    if (cfg.opening_price < 1) throw std::invalid_argument("opening_price must be >= 1 tick");
    if (cfg.initial_spread < 0) throw std::invalid_argument("initial_spread must be >= 0");
}

BackgroundMarket::BackgroundMarket(const BackgroundCfg& cfg, const RngRegistry& registry, std::uint64_t session_salt)
    : cfg_(cfg),
      book_(cfg.opening_price),
      fundamental_stream_(registry.agent_stream(kFundamentalStreamId, session_salt)),
      fundamental_(cfg.value.fundamental.mean),
      last_spread_(cfg.initial_spread)
{
    validate(cfg_);
    market::AgentId id = 0;
    auto add = [&](Kind kind, int count) {
        for (int i = 0; i < count; ++i, ++id) {
            agents_.push_back(Agent{id, kind, registry.agent_stream(static_cast<std::uint64_t>(id), session_salt), {}});
        }
    };
    const auto& p = cfg_.population;
    add(Kind::Pov, p.scaled(p.pov));
    add(Kind::Noise, p.scaled(p.noise));
    add(Kind::Value, p.scaled(p.value));
    add(Kind::Momentum, p.scaled(p.momentum));

    last_.mid = book_.best_quotes().mid;
    last_.spread = last_spread_;
    last_.fundamental = fundamental_;
}

Qty BackgroundMarket::lookback_volume() const
{
    Qty total = 0;
    for (Qty v : volume_history_) total += v;
    return total;
}

void BackgroundMarket::submit_market(Agent& a, const MarketIntent& m)
{
    log_.record(Event{step_, EventKind::Market, a.id, m.side, m.qty, 0, -1});
    const auto res = book_.submit_market_order(a.id, m.side, m.qty, step_);
    for (const auto& f : res.fills) {
        log_.record(Event{step_, EventKind::Fill, f.maker_agent_id, f.taker_side, f.qty, f.price, f.maker_order_id});
        step_volume_ += f.qty;
    }
    if (res.unfilled()) log_.record(Event{step_, EventKind::Unfilled, a.id, m.side, res.unfilled_qty, 0, -1});
}

void BackgroundMarket::submit_limit(Agent& a, const LimitIntent& l)
{
    const market::OrderId id = next_order_id_++;
    log_.record(Event{step_, EventKind::Limit, a.id, l.side, l.qty, l.price, id});
    const auto res = book_.submit_limit_order(market::Order{id, a.id, l.side, l.qty, l.price, step_});
    if (res.status == market::SubmitStatus::DuplicateId) {
        log_.record(Event{step_, EventKind::Reject, a.id, l.side, l.qty, l.price, id});
        return;
    }
    for (const auto& f : res.fills) {
        log_.record(Event{step_, EventKind::Fill, f.maker_agent_id, f.taker_side, f.qty, f.price, f.maker_order_id});
        step_volume_ += f.qty;
    }
    if (res.resting_qty > 0) a.live_orders.push_back(id);
}

void BackgroundMarket::run_pov(Agent& a)
{
    if (step_ % cfg_.pov.wake_interval != 0) return;
    for (market::OrderId id : a.live_orders) {
        const auto resting = book_.find(id);
        if (!resting) continue;
        const Qty removed = book_.cancel_order(id);
        log_.record(Event{step_, EventKind::Cancel, a.id, resting->side, removed, resting->limit_price, id});
    }
    a.live_orders.clear();
    const Ticks mid = book_.best_quotes().mid;
    for (const auto& l : pov_ladder(cfg_.pov, mid, lookback_volume())) submit_limit(a, l);
}

MarketStep BackgroundMarket::step()
{
    step_volume_ = 0;
    fundamental_ = fundamental_next(fundamental_, cfg_.value.fundamental, fundamental_stream_);

    mid_history_.push_back(book_.best_quotes().mid);
    if (mid_history_.size() > static_cast<std::size_t>(cfg_.momentum.slow_window) + 1) mid_history_.pop_front();

    for (auto& a : agents_) {
        switch (a.kind) {
        case Kind::Pov:
            run_pov(a);
            break;
        case Kind::Noise:
            if (auto m = noise_step(cfg_.noise, a.stream)) submit_market(a, *m);
            break;
        case Kind::Value:
            if (auto l = value_step(cfg_.value, fundamental_, book_.best_quotes(), a.stream)) submit_limit(a, *l);
            break;
        case Kind::Momentum:
            if (auto m = momentum_step(cfg_.momentum, mid_history_)) submit_market(a, *m);
            break;
        }
    }

    volume_history_.push_back(step_volume_);
    if (volume_history_.size() > static_cast<std::size_t>(cfg_.pov.lookback)) volume_history_.pop_front();

    const auto q = book_.best_quotes();
    if (q.spread) last_spread_ = *q.spread;
    last_ = MarketStep{step_, q.mid, last_spread_, q.spread.has_value(), step_volume_, fundamental_};
    ++step_;
    return last_;
}

}  // namespace mmlab::agents
