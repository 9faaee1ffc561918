#pragma once

// Random order sequences replayed through both the order book and the
// reference matcher. Returns an empty string when they agree.

#include <random>
#include <string>

#include "mmlab/market/order_book.hpp"
#include "reference_book.hpp"

namespace ref {

inline std::string fuzz_compare(std::uint64_t seed, int max_orders = 200)
{
    using namespace mmlab::market;
    std::mt19937_64 g(seed);
    auto pick = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(g); };
    OrderBook book(1000);
    RefBook rb;
    rb.last_trade = 1000;
    const int n = static_cast<int>(pick(1, max_orders));
    std::int64_t next_id = 1;
    for (int i = 0; i < n; ++i) {
        const auto kind = pick(0, 9);
        const Side side = pick(0, 1) ? Side::Buy : Side::Sell;
        const std::int64_t step = i / 3;
        const std::string where = "seed " + std::to_string(seed) + " op " + std::to_string(i);
        if (kind < 6) {
            // occasionally reuse an id to exercise the duplicate check
            const std::int64_t id = (pick(0, 19) == 0 && next_id > 1) ? pick(1, next_id - 1) : next_id++;
            Order o{id, pick(0, 5), side, pick(1, 20), pick(990, 1010), step};
            std::vector<Fill> want;
            const bool ok = rb.limit(o, want);
            const auto got = book.submit_limit_order(o);
            if (ok != (got.status == SubmitStatus::Accepted)) return where + ": duplicate handling differs";
            if (got.fills != want) return where + ": limit fills differ";
        } else if (kind < 8) {
            const auto agent = pick(0, 5);
            const auto qty = pick(1, 40);
            std::int64_t unfilled = 0;
            const auto want = rb.market(agent, side, qty, step, unfilled);
            const auto got = book.submit_market_order(agent, side, qty, step);
            if (got.fills != want) return where + ": market fills differ";
            if (got.unfilled_qty != unfilled) return where + ": unfilled qty differs";
        } else {
            const auto id = pick(1, next_id);
            if (book.cancel_order(id) != rb.cancel(id)) return where + ": cancel differs";
        }
        if (book.last_trade_price() != rb.last_trade) return where + ": last trade differs";
    }
    std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>> got;
    for (auto side : {Side::Buy, Side::Sell})
        for (const auto& lvl : book.levels(side))
            for (const auto& o : lvl.orders) got.emplace_back(o.id, o.qty, o.limit_price);
    std::sort(got.begin(), got.end());
    if (got != rb.state()) return "seed " + std::to_string(seed) + ": final book differs";
    return {};
}

}  // namespace ref
