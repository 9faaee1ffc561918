#include "mmlab/harness/session.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "mmlab/agents/background_market.hpp"

namespace mmlab::harness {

using market::Qty;
using market::Ticks;

std::string format_double(double v)
{
    char buf[40];
    if (v == 0.0) v = 0.0;  // no "-0"
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json to_json(const MMSessionSummary& s)
{
    return {{"mm_id", s.mm_id},
            {"kind", s.kind},
            {"steps", s.steps},
            {"mean_reward", s.mean_reward},
            {"mean_r1", s.mean_r1},
            {"mean_r2", s.mean_r2},
            {"terminal_mtm", s.terminal_mtm},
            {"mtm_change", s.mtm_change},
            {"mean_abs_inventory", s.mean_abs_inventory},
            {"cash_inventory_ratio", s.cash_inventory_ratio ? nlohmann::json(*s.cash_inventory_ratio) : nlohmann::json(nullptr)},
            {"earnings", s.earnings},
            {"hedge_cost", s.hedge_cost},
            {"investor_trades", s.investor_trades}};
}

void write_step_header(std::ostream& os)
{
    os << "session,step,mm_id,eta_b,eta_s,eta_h,buys,sells,inventory,cash,mtm,mid,earnings,pnl,hedge_cost,penalty,r1,r2,reward\n";
}

namespace {

struct Slot {
    int id = 0;
    Participant* p = nullptr;
    dealer::MMAccount account;
    rewards::RewardCalculator rewards;
    // last step's activity
    Qty bought = 0;
    Qty sold = 0;
    std::int64_t buy_trades = 0;
    std::int64_t sell_trades = 0;
    Qty inv_prev = 0;
    // current step
    int action = 0;
    dealer::MMQuote quote;
    Ticks earnings = 0;
    Ticks hedge_cost = 0;
    Qty step_bought = 0;
    Qty step_sold = 0;
    std::int64_t step_buy_trades = 0;
    std::int64_t step_sell_trades = 0;
    // accumulators
    double sum_reward = 0.0;
    double sum_r1 = 0.0;
    double sum_r2 = 0.0;
    double sum_abs_inv = 0.0;
    double sum_ratio = 0.0;
    std::int64_t ratio_steps = 0;
    Ticks total_earnings = 0;
    Ticks total_hedge = 0;
    std::int64_t trades = 0;

    Slot(int id_, Participant* p_) : id(id_), p(p_), rewards(p_->reward) {}
};

policy::Observation observe(const Slot& s, Ticks mid, Ticks mid_prev, Ticks spread, Ticks spread_prev, Qty volume)
{
    policy::Observation o;
    o.buys_prev = static_cast<double>(s.bought);
    o.sells_prev = static_cast<double>(s.sold);
    o.buy_count = static_cast<double>(s.buy_trades);
    o.buy_volume = static_cast<double>(s.bought);
    o.sell_count = static_cast<double>(s.sell_trades);
    o.sell_volume = static_cast<double>(s.sold);
    o.inv_now = static_cast<double>(s.account.inventory);
    o.inv_prev = static_cast<double>(s.inv_prev);
    o.delta_mid = static_cast<double>(mid - mid_prev);
    o.spread_now = static_cast<double>(spread);
    o.spread_prev = static_cast<double>(spread_prev);
    o.volume_prev = static_cast<double>(volume);
    o.total_volume = static_cast<double>(volume);
    return o;
}

}  // namespace

SessionResult run_session(const ExperimentConfig& cfg, std::uint64_t master_seed, int session_index,
                          std::vector<Participant>& mms, const SessionIO& io)
{
    if (mms.empty()) throw std::invalid_argument("run_session: no market makers");
    const RngRegistry registry(master_seed);
    const auto salt = static_cast<std::uint64_t>(session_index);
    agents::BackgroundMarket market(cfg.market, registry, salt);
    market.log().set_enabled(io.event_log != nullptr);
    Stream investor_stream = registry.agent_stream(kInvestorStreamId, salt);
    Stream routing_stream = registry.agent_stream(kRoutingStreamId, salt);
    policy::EmaTracker ema(cfg.ema_preset());

    std::vector<Slot> slots;
    slots.reserve(mms.size());
    for (std::size_t i = 0; i < mms.size(); ++i) {
        if (!mms[i].controller) throw std::invalid_argument("run_session: missing controller");
        slots.emplace_back(static_cast<int>(i), &mms[i]);
        mms[i].controller->begin_session(session_index);
    }

    std::vector<dealer::MMQuote> quotes(slots.size());
    Ticks mid_prev = 0;
    Ticks spread_prev = 0;
    const std::int64_t steps = cfg.steps;

    auto settle = [&](std::int64_t t, Ticks mid_now, Ticks mid_then) {
        // reward of step t, now that the next mid is known
        for (auto& s : slots) {
            const double inv = static_cast<double>(s.account.inventory);
            rewards::RewardTerms terms{static_cast<double>(s.earnings), inv * static_cast<double>(mid_now - mid_then),
                                       static_cast<double>(s.hedge_cost)};
            const auto r = s.rewards.compute(terms, static_cast<double>(s.account.cash), static_cast<double>(mid_now), inv);
            const double scalar = s.p->scalar_w * r.r1 + (1.0 - s.p->scalar_w) * r.r2;
            s.p->controller->feedback(r, scalar);
            s.sum_reward += scalar;
            s.sum_r1 += r.r1;
            s.sum_r2 += r.r2;
            s.sum_abs_inv += std::abs(inv);
            if (s.account.inventory != 0) {
                s.sum_ratio += static_cast<double>(s.account.cash) / std::abs(inv * static_cast<double>(mid_now));
                ++s.ratio_steps;
            }
            if (io.step_log && s.p->log_steps) {
                const auto etas = policy::action_to_etas(s.action);
                auto& os = *io.step_log;
                os << session_index << ',' << t << ',' << s.id << ',' << format_double(etas.eta_buy) << ','
                   << format_double(etas.eta_sell) << ',' << format_double(etas.eta_hedge) << ',' << s.step_bought << ','
                   << s.step_sold << ',' << s.account.inventory << ',' << s.account.cash << ','
                   << s.account.mark_to_market(mid_now) << ',' << mid_now << ',' << s.earnings << ','
                   << format_double(terms.pnl) << ',' << s.hedge_cost << ',' << format_double(s.rewards.last_penalty()) << ','
                   << format_double(r.r1) << ',' << format_double(r.r2) << ',' << format_double(scalar) << '\n';
            }
        }
    };

    for (std::int64_t t = 0; t < steps; ++t) {
        const auto ms = market.step();
        ema.update(static_cast<double>(ms.mid));
        if (t == 0) {
            mid_prev = ms.mid;
            spread_prev = ms.spread;
        } else {
            settle(t - 1, ms.mid, mid_prev);
        }

        for (std::size_t i = 0; i < slots.size(); ++i) {
            auto& s = slots[i];
            const auto obs = observe(s, ms.mid, mid_prev, ms.spread, spread_prev, ms.volume);
            s.action = s.p->controller->act(obs, ema);
            s.inv_prev = s.account.inventory;
            const auto etas = policy::action_to_etas(s.action);
            s.quote = dealer::quote_from_etas(ms.spread, etas.eta_buy, etas.eta_sell);
            quotes[i] = s.quote;
            const auto h = dealer::hedge(s.account, etas.eta_hedge, ms.spread, ms.mid);
            s.hedge_cost = h.cost;
            s.earnings = 0;
            s.step_bought = s.step_sold = 0;
            s.step_buy_trades = s.step_sell_trades = 0;
        }

        for (int k = 0; k < cfg.investors.count; ++k) {
            if (!bernoulli(investor_stream, cfg.investors.arrival_prob)) continue;
            const auto side = bernoulli(investor_stream, 0.5) ? market::Side::Buy : market::Side::Sell;
            const auto idx = dealer::route_investor_order(quotes, side, routing_stream);
            auto& s = slots[idx];
            s.earnings += dealer::execute_mm_trade(s.account, side, cfg.investors.order_size, s.quote, ms.mid);
            if (side == market::Side::Buy) {
                s.step_sold += cfg.investors.order_size;
                ++s.step_sell_trades;
            } else {
                s.step_bought += cfg.investors.order_size;
                ++s.step_buy_trades;
            }
        }

        for (auto& s : slots) {
            s.bought = s.step_bought;
            s.sold = s.step_sold;
            s.buy_trades = s.step_buy_trades;
            s.sell_trades = s.step_sell_trades;
            s.total_earnings += s.earnings;
            s.total_hedge += s.hedge_cost;
            s.trades += s.step_buy_trades + s.step_sell_trades;
        }
        mid_prev = ms.mid;
        spread_prev = ms.spread;
    }

    // one more market step prices the last step's inventory
    const auto last = market.step();
    ema.update(static_cast<double>(last.mid));
    settle(steps - 1, last.mid, mid_prev);
    for (auto& s : slots) {
        const auto obs = observe(s, last.mid, mid_prev, last.spread, spread_prev, last.volume);
        s.p->controller->end_session(obs, ema);
    }

    if (io.event_log) market.log().write_csv_rows(*io.event_log);

    SessionResult res;
    res.session = session_index;
    res.final_mid = last.mid;
    const double n = static_cast<double>(steps);
    for (auto& s : slots) {
        MMSessionSummary m;
        m.mm_id = s.id;
        m.kind = s.p->controller->kind();
        m.steps = steps;
        m.mean_reward = s.sum_reward / n;
        m.mean_r1 = s.sum_r1 / n;
        m.mean_r2 = s.sum_r2 / n;
        m.terminal_mtm = s.account.mark_to_market(last.mid);
        m.mtm_change = m.terminal_mtm - dealer::kStartingCash;
        m.mean_abs_inventory = s.sum_abs_inv / n;
        if (s.ratio_steps > 0) m.cash_inventory_ratio = s.sum_ratio / static_cast<double>(s.ratio_steps);
        m.earnings = s.total_earnings;
        m.hedge_cost = s.total_hedge;
        m.investor_trades = s.trades;
        res.mms.push_back(m);
    }
    return res;
}

}  // namespace mmlab::harness
