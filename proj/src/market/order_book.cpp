#include "mmlab/market/order_book.hpp"

#include <algorithm>
#include <stdexcept>

namespace mmlab::market {

Qty MarketOrderResult::filled_qty() const
{
    Qty total = 0;
    for (const auto& f : fills) total += f.qty;
    return total;
}

OrderBook::OrderBook(Ticks opening_price) : last_trade_price_(opening_price)
{
    if (opening_price < 0) throw std::invalid_argument("OrderBook: negative opening price");
}

template <class Levels, class Acceptable>
Qty OrderBook::match_against(Levels& levels, AgentId taker, Side taker_side, Qty qty, std::int64_t step,
                             Acceptable acceptable, std::vector<Fill>& fills)
{
    while (qty > 0 && !levels.empty()) {
        auto level = levels.begin();
        if (!acceptable(level->first)) break;
        auto& queue = level->second;
        while (qty > 0 && !queue.empty()) {
            Order& maker = queue.front();
            const Qty traded = std::min(qty, maker.qty);
            fills.push_back(Fill{maker.id, maker.agent_id, taker, taker_side, traded, level->first, step});
            maker.qty -= traded;
            qty -= traded;
            if (maker.qty == 0) {
                index_.erase(maker.id);
                queue.pop_front();
            }
        }
        if (queue.empty()) levels.erase(level);
    }
    return qty;
}

template <class Levels>
void OrderBook::rest(Levels& levels, const Order& order)
{
    auto& queue = levels[order.limit_price];
    auto later = [](const Order& a, const Order& b) {
        return a.arrival_step != b.arrival_step ? a.arrival_step < b.arrival_step : a.id < b.id;
    };
    if (queue.empty() || !later(order, queue.back())) {
        queue.push_back(order);
    } else {
        queue.insert(std::upper_bound(queue.begin(), queue.end(), order, later), order);
    }
    index_[order.id] = {order.side, order.limit_price};
}

void OrderBook::record_trade(const std::vector<Fill>& fills)
{
    if (fills.empty()) return;
    std::int64_t notional = 0;
    Qty volume = 0;
    for (const auto& f : fills) {
        notional += f.price * f.qty;
        volume += f.qty;
    }
    last_trade_price_ = div_round_half_up(notional, volume);
}

SubmitResult OrderBook::submit_limit_order(const Order& order)
{
    if (order.qty <= 0) throw std::invalid_argument("submit_limit_order: qty must be positive");
    if (order.limit_price < 0) throw std::invalid_argument("submit_limit_order: negative price");

    SubmitResult result;
    if (!seen_ids_.insert(order.id).second) {
        result.status = SubmitStatus::DuplicateId;
        return result;
    }

    Qty remaining = 0;
    if (order.side == Side::Buy) {
        remaining = match_against(asks_, order.agent_id, order.side, order.qty, order.arrival_step,
                                  [&](Ticks p) { return p <= order.limit_price; }, result.fills);
    } else {
        remaining = match_against(bids_, order.agent_id, order.side, order.qty, order.arrival_step,
                                  [&](Ticks p) { return p >= order.limit_price; }, result.fills);
    }
    record_trade(result.fills);

    if (remaining > 0) {
        Order resting = order;
        resting.qty = remaining;
        if (order.side == Side::Buy) {
            rest(bids_, resting);
        } else {
            rest(asks_, resting);
        }
    }
    result.resting_qty = remaining;
    return result;
}

MarketOrderResult OrderBook::submit_market_order(AgentId agent_id, Side side, Qty qty, std::int64_t step)
{
    if (qty <= 0) throw std::invalid_argument("submit_market_order: qty must be positive");
    MarketOrderResult result;
    auto any = [](Ticks) { return true; };
    if (side == Side::Buy) {
        result.unfilled_qty = match_against(asks_, agent_id, side, qty, step, any, result.fills);
    } else {
        result.unfilled_qty = match_against(bids_, agent_id, side, qty, step, any, result.fills);
    }
    record_trade(result.fills);
    return result;
}

Qty OrderBook::cancel_order(OrderId order_id)
{
    auto it = index_.find(order_id);
    if (it == index_.end()) return 0;
    const auto [side, price] = it->second;
    index_.erase(it);

    auto remove_from = [&](auto& levels) -> Qty {
        auto level = levels.find(price);
        if (level == levels.end()) return 0;
        auto& queue = level->second;
        auto pos = std::find_if(queue.begin(), queue.end(), [&](const Order& o) { return o.id == order_id; });
        if (pos == queue.end()) return 0;
        const Qty qty = pos->qty;
        queue.erase(pos);
        if (queue.empty()) levels.erase(level);
        return qty;
    };
    return side == Side::Buy ? remove_from(bids_) : remove_from(asks_);
}

Quotes OrderBook::best_quotes() const
{
    Quotes q;
    if (!bids_.empty()) q.best_bid = bids_.begin()->first;
    if (!asks_.empty()) q.best_ask = asks_.begin()->first;
    if (q.best_bid && q.best_ask) {
        q.mid = div_round_half_up(*q.best_bid + *q.best_ask, 2);
        q.spread = *q.best_ask - *q.best_bid;
    } else {
        q.mid = last_trade_price_;
    }
    return q;
}

std::optional<Order> OrderBook::find(OrderId id) const
{
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    const auto [side, price] = it->second;
    auto search = [&](const auto& levels) -> std::optional<Order> {
        auto level = levels.find(price);
        if (level == levels.end()) return std::nullopt;
        for (const auto& o : level->second)
            if (o.id == id) return o;
        return std::nullopt;
    };
    return side == Side::Buy ? search(bids_) : search(asks_);
}

Qty OrderBook::depth(Side side) const
{
    Qty total = 0;
    auto sum = [&](const auto& levels) {
        for (const auto& [price, queue] : levels)
            for (const auto& o : queue) total += o.qty;
    };
    if (side == Side::Buy) {
        sum(bids_);
    } else {
        sum(asks_);
    }
    return total;
}

std::vector<LevelView> OrderBook::levels(Side side) const
{
    std::vector<LevelView> out;
    auto collect = [&](const auto& levels) {
        for (const auto& [price, queue] : levels) {
            LevelView view{price, 0, {queue.begin(), queue.end()}};
            for (const auto& o : queue) view.total_qty += o.qty;
            out.push_back(std::move(view));
        }
    };
    if (side == Side::Buy) {
        collect(bids_);
    } else {
        collect(asks_);
    }
    return out;
}

}  // namespace mmlab::market
