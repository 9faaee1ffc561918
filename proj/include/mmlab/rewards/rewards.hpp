#pragma once

#include <cstddef>
#include <deque>
#include <string_view>

namespace mmlab::rewards {

// All terms are in ticks.
struct RewardTerms {
    double earnings = 0.0;      // E
    double pnl = 0.0;           // inventory revaluation
    double hedge_cost = 0.0;    // HgC
};

struct RewardVector {
    double r1 = 0.0;  // MtM objective
    double r2 = 0.0;  // inventory objective
};

struct AIIFConfig {
    double aiif = 0.0;
    double ditf = 0.5;
    std::size_t window = 20;
};

void validate(const AIIFConfig& cfg);

// Rolling windows over the last `window` steps; averages use whatever history exists.
class ThresholdState {
public:
    explicit ThresholdState(std::size_t window = 20) : window_(window) {}

    void push_mid(double mid);
    void push_threshold(double thr);
    void push_inventory(double inv);

    double mean_mid() const;
    double mean_threshold() const;
    double mean_abs_inventory() const;

    const std::deque<double>& mids() const { return mids_; }
    std::size_t window() const { return window_; }
    void clear();

private:
    void push(std::deque<double>& q, double v);

    std::size_t window_;
    std::deque<double> mids_;
    std::deque<double> thresholds_;
    std::deque<double> abs_inventories_;
};

double reward_single(const RewardTerms& t);

// thr = ditf * |cash / mean(rolling mids)|
double dynamic_threshold(double cash, const std::deque<double>& rolling_mids, double ditf);

// aiif * min(|R|, |R * mean_abs_inv / mean_thr|); a zero threshold takes the |R| branch.
double rim_penalty(double r_mtm, double mean_abs_inv, double mean_thr, double aiif);

// Pushes this step's mid, threshold and inventory into `state`, then returns
// E + PnL - HgC - Pny with the penalty computed from the updated windows.
double reward_rim(const RewardTerms& t, double cash, double mid, double inventory, ThresholdState& state,
                  const AIIFConfig& cfg);

double reward_full_inv(double earnings, double inventory, double hedge_cost, double lambda = 0.15);
double reward_asym_damp(double earnings, double pnl, double hedge_cost, double eta = 0.1);
double reward_pnl_only(double earnings, double hedge_cost);
double reward_rew(const RewardTerms& t, double inventory, double w, double alpha = 5.0);
RewardVector reward_morl_vector(const RewardTerms& t, double inventory, double alpha = 5.0);

enum class RewardKind { Single, Rim, FullInv, AsymDamp, PnlOnly, Rew, Morl };

std::string_view to_string(RewardKind k);
RewardKind parse_reward_kind(std::string_view s);

struct RewardParams {
    RewardKind kind = RewardKind::Single;
    AIIFConfig rim;
    double full_inv_lambda = 0.15;
    double asym_eta = 0.1;
    double rew_w = 0.5;
    double alpha = 5.0;  // inventory weight in RE-W and the MORL vector
};

void validate(const RewardParams& p);

// Per-agent reward computation for one step. Scalar kinds put their value in
// r1 and leave r2 at zero.
class RewardCalculator {
public:
    explicit RewardCalculator(const RewardParams& params) : params_(params), threshold_(params.rim.window) {}

    RewardVector compute(const RewardTerms& t, double cash, double mid, double inventory);
    double last_penalty() const { return last_penalty_; }
    const RewardParams& params() const { return params_; }
    void reset() { threshold_.clear(); }

private:
    RewardParams params_;
    ThresholdState threshold_;
    double last_penalty_ = 0.0;
};

}  // namespace mmlab::rewards
