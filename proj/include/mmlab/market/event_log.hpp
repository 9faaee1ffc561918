#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmlab/market/types.hpp"

namespace mmlab::market {

enum class EventKind { Limit, Market, Fill, Cancel, Reject, Unfilled };

std::string_view to_string(EventKind k);

struct Event {
    std::int64_t step = 0;
    EventKind kind = EventKind::Limit;
    AgentId agent_id = 0;
    Side side = Side::Buy;
    Qty qty = 0;
    Ticks price = 0;
    OrderId order_id = -1;  // -1 where no order id applies (market orders)
};

class EventLog {
public:
    void set_enabled(bool on) { enabled_ = on; }
    bool enabled() const { return enabled_; }
    void record(const Event& e)
    {
        if (enabled_) events_.push_back(e);
    }
    const std::vector<Event>& events() const { return events_; }
    void clear() { events_.clear(); }

    static void write_csv_header(std::ostream& os);
    void write_csv_rows(std::ostream& os) const;

private:
    bool enabled_ = false;
    std::vector<Event> events_;
};

}  // namespace mmlab::market
