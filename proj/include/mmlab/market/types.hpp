#pragma once

#include <cstdint>
#include <string_view>

namespace mmlab::market {

// Prices are integer ticks; 1 tick = $0.01.
using Ticks = std::int64_t;
using Qty = std::int64_t;
using OrderId = std::int64_t;
using AgentId = std::int64_t;

inline constexpr Ticks kOpeningPrice = 100'000;  // $1,000.00

enum class Side { Buy, Sell };

constexpr Side opposite(Side s) { return s == Side::Buy ? Side::Sell : Side::Buy; }
constexpr std::string_view to_string(Side s) { return s == Side::Buy ? "buy" : "sell"; }

struct Order {
    OrderId id = 0;
    AgentId agent_id = 0;
    Side side = Side::Buy;
    Qty qty = 0;
    Ticks limit_price = 0;
    std::int64_t arrival_step = 0;
};

struct Fill {
    OrderId maker_order_id = 0;
    AgentId maker_agent_id = 0;
    AgentId taker_agent_id = 0;
    Side taker_side = Side::Buy;
    Qty qty = 0;
    Ticks price = 0;  // always the resting order's limit price
    std::int64_t step = 0;

    friend bool operator==(const Fill&, const Fill&) = default;
};

// Half-up rounding of num / den for den > 0.
constexpr std::int64_t div_round_half_up(std::int64_t num, std::int64_t den)
{
    const std::int64_t n2 = 2 * num + den;
    const std::int64_t d2 = 2 * den;
    // floor division for possibly negative numerators
    std::int64_t q = n2 / d2;
    if ((n2 % d2 != 0) && (n2 < 0)) --q;
    return q;
}

}  // namespace mmlab::market
