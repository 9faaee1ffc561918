#include "mmlab/dealer/dealer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mmlab::dealer {

void validate(const InvestorCfg& cfg)
{
    if (cfg.count < 0) throw std::invalid_argument("investors.count must be >= 0");
    if (cfg.order_size <= 0) throw std::invalid_argument("investors.order_size must be positive");
    if (cfg.arrival_prob < 0.0 || cfg.arrival_prob > 1.0) throw std::invalid_argument("investors.arrival_prob must be in [0, 1]");
}

namespace {

Ticks scaled_spread(Ticks market_spread, double eta)
{
    if (eta < -1.0 - 1e-9 || eta > 1.0 + 1e-9) throw std::invalid_argument("eta must be in [-1, 1]");
    const auto s = static_cast<Ticks>(std::llround(static_cast<double>(market_spread) * (1.0 + eta)));
    return s < 0 ? 0 : s;
}

}  // namespace

MMQuote quote_from_etas(Ticks market_spread, double eta_buy, double eta_sell)
{
    return MMQuote{scaled_spread(market_spread, eta_buy), scaled_spread(market_spread, eta_sell)};
}

std::size_t route_investor_order(std::span<const MMQuote> quotes, Side investor_side, Stream& stream)
{
    if (quotes.empty()) throw std::invalid_argument("route_investor_order: no quotes");
    auto relevant = [&](const MMQuote& q) { return investor_side == Side::Buy ? q.sell_spread : q.buy_spread; };
    Ticks best = std::numeric_limits<Ticks>::max();
    for (const auto& q : quotes) best = std::min(best, relevant(q));
    std::vector<std::size_t> tied;
    for (std::size_t i = 0; i < quotes.size(); ++i)
        if (relevant(quotes[i]) == best) tied.push_back(i);
    if (tied.size() == 1) return tied.front();
    return tied[uniform_index(stream, tied.size())];
}

Ticks execute_mm_trade(MMAccount& account, Side investor_side, Qty qty, const MMQuote& quote, Ticks mid)
{
    if (qty <= 0) throw std::invalid_argument("execute_mm_trade: qty must be positive");
    if (investor_side == Side::Buy) {
        account.inventory -= qty;
        account.cash += qty * (mid + quote.sell_spread);
        return qty * quote.sell_spread;
    }
    account.inventory += qty;
    account.cash -= qty * (mid - quote.buy_spread);
    return qty * quote.buy_spread;
}

HedgeResult hedge(MMAccount& account, double eta_h, Ticks market_spread, Ticks mid)
{
    if (eta_h < 0.0 || eta_h > 1.0) throw std::invalid_argument("hedge: eta_h must be in [0, 1]");
    const Qty held = account.inventory < 0 ? -account.inventory : account.inventory;
    const auto qty = static_cast<Qty>(std::llround(static_cast<double>(held) * eta_h));
    if (qty == 0) return {};
    if (account.inventory > 0) {
        account.inventory -= qty;
        account.cash += qty * mid;
    } else {
        account.inventory += qty;
        account.cash -= qty * mid;
    }
    const Ticks cost = qty * market_spread;
    account.cash -= cost;
    return HedgeResult{qty, cost};
}

}  // namespace mmlab::dealer
