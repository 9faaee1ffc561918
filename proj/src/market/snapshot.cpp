#include "mmlab/market/snapshot.hpp"

namespace mmlab::market {

namespace {

nlohmann::json side_json(const OrderBook& book, Side side)
{
    auto arr = nlohmann::json::array();
    for (const auto& level : book.levels(side)) {
        auto orders = nlohmann::json::array();
        for (const auto& o : level.orders) {
            orders.push_back({{"id", o.id}, {"agent_id", o.agent_id}, {"qty", o.qty}, {"arrival_step", o.arrival_step}});
        }
        arr.push_back({{"price_ticks", level.price}, {"total_qty", level.total_qty}, {"orders", orders}});
    }
    return arr;
}

}  // namespace

nlohmann::json book_snapshot(const OrderBook& book)
{
    const auto q = book.best_quotes();
    nlohmann::json j;
    j["bids"] = side_json(book, Side::Buy);
    j["asks"] = side_json(book, Side::Sell);
    j["mid_ticks"] = q.mid;
    j["last_trade_price_ticks"] = book.last_trade_price();
    j["spread_ticks"] = q.spread ? nlohmann::json(*q.spread) : nlohmann::json(nullptr);
    return j;
}

}  // namespace mmlab::market
