#include "mmlab/market/event_log.hpp"

#include <ostream>

namespace mmlab::market {

std::string_view to_string(EventKind k)
{
    switch (k) {
    case EventKind::Limit: return "limit";
    case EventKind::Market: return "market";
    case EventKind::Fill: return "fill";
    case EventKind::Cancel: return "cancel";
    case EventKind::Reject: return "reject";
    case EventKind::Unfilled: return "unfilled";
    }
    return "unknown";
}

void EventLog::write_csv_header(std::ostream& os)
{
    os << "step,event_kind,agent_id,side,qty,price_ticks,order_id\n";
}

void EventLog::write_csv_rows(std::ostream& os) const
{
    for (const auto& e : events_) {
        os << e.step << ',' << to_string(e.kind) << ',' << e.agent_id << ',' << to_string(e.side) << ','
           << e.qty << ',' << e.price << ',' << e.order_id << '\n';
    }
}

}  // namespace mmlab::market
