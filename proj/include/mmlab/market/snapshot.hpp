#pragma once

#include "json.hpp"

#include "mmlab/market/order_book.hpp"

namespace mmlab::market {

nlohmann::json book_snapshot(const OrderBook& book);

}  // namespace mmlab::market
