#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mmlab/market/types.hpp"

namespace mmlab::market {

enum class SubmitStatus { Accepted, DuplicateId };

struct SubmitResult {
    SubmitStatus status = SubmitStatus::Accepted;
    std::vector<Fill> fills;
    Qty resting_qty = 0;
};

struct MarketOrderResult {
    std::vector<Fill> fills;
    Qty unfilled_qty = 0;

    bool unfilled() const { return unfilled_qty > 0; }
    Qty filled_qty() const;
};

struct Quotes {
    std::optional<Ticks> best_bid;
    std::optional<Ticks> best_ask;
    Ticks mid = 0;
    std::optional<Ticks> spread;  // present only for a two-sided book
};

struct LevelView {
    Ticks price = 0;
    Qty total_qty = 0;
    std::vector<Order> orders;  // FIFO order
};

// Price-priority, FIFO-within-level limit order book for one instrument.
class OrderBook {
public:
    explicit OrderBook(Ticks opening_price = kOpeningPrice);

    // Crossing quantity is matched immediately; any remainder rests.
    SubmitResult submit_limit_order(const Order& order);
    // Walks the opposite side; the unfilled remainder is discarded.
    MarketOrderResult submit_market_order(AgentId agent_id, Side side, Qty qty, std::int64_t step);
    // Returns the remaining quantity removed, 0 if the id is not resting.
    Qty cancel_order(OrderId order_id);

    // mid = (bid + ask) / 2 rounded half-up; one-sided or empty book falls back
    // to the last trade price (the opening price before any trade).
    Quotes best_quotes() const;

    Ticks last_trade_price() const { return last_trade_price_; }
    bool contains(OrderId id) const { return index_.count(id) != 0; }
    std::optional<Order> find(OrderId id) const;
    std::size_t order_count() const { return index_.size(); }
    Qty depth(Side side) const;
    std::vector<LevelView> levels(Side side) const;

private:
    using BidLevels = std::map<Ticks, std::deque<Order>, std::greater<>>;
    using AskLevels = std::map<Ticks, std::deque<Order>, std::less<>>;

    template <class Levels, class Acceptable>
    Qty match_against(Levels& levels, AgentId taker, Side taker_side, Qty qty, std::int64_t step,
                      Acceptable acceptable, std::vector<Fill>& fills);
    template <class Levels>
    void rest(Levels& levels, const Order& order);
    void record_trade(const std::vector<Fill>& fills);

    BidLevels bids_;
    AskLevels asks_;
    std::unordered_map<OrderId, std::pair<Side, Ticks>> index_;
    std::unordered_set<OrderId> seen_ids_;
    Ticks last_trade_price_;
};

}  // namespace mmlab::market
