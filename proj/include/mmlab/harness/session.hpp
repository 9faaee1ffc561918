#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmlab/dealer/dealer.hpp"
#include "mmlab/harness/config.hpp"
#include "mmlab/harness/controllers.hpp"

namespace mmlab::harness {

// Stream ids outside the background agent range.
inline constexpr std::uint64_t kInvestorStreamId = 2'000'000;
inline constexpr std::uint64_t kRoutingStreamId = 2'000'001;

struct Participant {
    Controller* controller = nullptr;
    rewards::RewardParams reward;
    double scalar_w = 1.0;  // report scalar = w r1 + (1 - w) r2
    bool log_steps = true;
};

struct MMSessionSummary {
    int mm_id = 0;
    std::string kind;
    std::int64_t steps = 0;
    double mean_reward = 0.0;
    double mean_r1 = 0.0;
    double mean_r2 = 0.0;
    market::Ticks terminal_mtm = 0;
    market::Ticks mtm_change = 0;
    double mean_abs_inventory = 0.0;
    std::optional<double> cash_inventory_ratio;  // mean of cash / |inventory * mid| over steps holding inventory
    market::Ticks earnings = 0;
    market::Ticks hedge_cost = 0;
    std::int64_t investor_trades = 0;
};

nlohmann::json to_json(const MMSessionSummary& s);

struct SessionResult {
    int session = 0;
    std::vector<MMSessionSummary> mms;
    market::Ticks final_mid = 0;
};

struct SessionIO {
    std::ostream* step_log = nullptr;   // rows via write_step_header layout
    std::ostream* event_log = nullptr;  // background order-book events
};

void write_step_header(std::ostream& os);
std::string format_double(double v);

// Runs one session of cfg.steps steps with the given market makers.
SessionResult run_session(const ExperimentConfig& cfg, std::uint64_t master_seed, int session_index,
                          std::vector<Participant>& mms, const SessionIO& io = {});

}  // namespace mmlab::harness
