#include "mmlab/harness/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mmlab::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stream ids for decision makers, above the market and investor ranges.
constexpr std::uint64_t kLearnerSeedId = 4'000'000;
constexpr std::uint64_t kRandomSeedId = 4'100'000;
constexpr std::uint64_t kPersistentSeedId = 4'200'000;
constexpr std::uint64_t kContextSeedId = 4'300'000;

// Market session salts for each phase, so phases never replay one another.
constexpr int kTestSessionOffset = 1'000'000;
constexpr int kLibrarySessionOffset = 3'000'000;
constexpr int kContextSessionOffset = 5'000'000;

std::uint64_t derived_seed(std::uint64_t master, std::uint64_t id, std::uint64_t salt = 0)
{
    return RngRegistry(master).stream_seed(id, salt);
}

std::unique_ptr<std::ostream> open_out(const fs::path& p)
{
    fs::create_directories(p.parent_path());
    auto os = std::make_unique<std::ofstream>(p, std::ios::binary);
    if (!*os) throw std::runtime_error("cannot write " + p.string());
    return os;
}

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string param_tag(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

double mean_of(const std::vector<double>& xs)
{
    if (xs.empty()) return 0.0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs)
{
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

json mean_std(const std::vector<double>& xs) { return {{"mean", mean_of(xs)}, {"std", std_of(xs)}, {"n", xs.size()}}; }

rl::EpsSchedule eps_schedule(const ExperimentConfig& cfg)
{
    return rl::EpsSchedule(cfg.learner.eps_start, cfg.learner.eps_min, cfg.eps_sessions());
}

rewards::RewardParams morl_reward(const ExperimentConfig& cfg)
{
    auto r = cfg.reward;
    r.kind = rewards::RewardKind::Morl;
    return r;
}

StepLog resolve(StepLog mode, StepLog fallback) { return mode == StepLog::Auto ? fallback : mode; }

// Controllers for one lineup. Learner controllers come first.
struct Lineup {
    std::vector<std::unique_ptr<Controller>> controllers;
    std::vector<Participant> participants;

    void add(std::unique_ptr<Controller> c, const rewards::RewardParams& r, double w, bool learner)
    {
        controllers.push_back(std::move(c));
        participants.push_back(Participant{controllers.back().get(), r, w, learner});
    }
};

void add_baselines(Lineup& lineup, const ExperimentConfig& cfg, std::uint64_t salt, bool agent_only)
{
    for (int i = 0; i < cfg.lineup.random; ++i)
        lineup.add(std::make_unique<RandomController>(derived_seed(cfg.seed, kRandomSeedId + static_cast<std::uint64_t>(i), salt)),
                   cfg.reward, 1.0, !agent_only);
    for (int i = 0; i < cfg.lineup.persistent; ++i)
        lineup.add(std::make_unique<PersistentController>(
                       derived_seed(cfg.seed, kPersistentSeedId + static_cast<std::uint64_t>(i), salt)),
                   cfg.reward, 1.0, !agent_only);
}

json aggregates_json(const std::vector<SessionResult>& sessions)
{
    json arr = json::array();
    const auto agg = aggregate(sessions);
    for (std::size_t i = 0; i < agg.size(); ++i) {
        auto j = to_json(agg[i]);
        j["mm_id"] = i;
        j["kind"] = sessions.front().mms[i].kind;
        arr.push_back(j);
    }
    return arr;
}

// Mean over test sessions of the first market maker (the agent under study).
struct AgentPoint {
    double mean_reward = 0.0;
    double mtm_change = 0.0;
    double abs_inventory = 0.0;
    std::optional<double> ratio;
};

AgentPoint agent_point(const std::vector<SessionResult>& sessions, std::size_t mm = 0)
{
    const auto agg = aggregate(sessions).at(mm);
    return AgentPoint{agg.mean_reward, agg.mean_mtm_change, agg.mean_abs_inventory, agg.cash_inventory_ratio};
}

std::vector<double> ranks(const std::vector<double>& xs)
{
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> r(xs.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length series");
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double mx = mean_of(rx);
    const double my = mean_of(ry);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

// --- RunWriter ---

RunWriter::RunWriter(std::string dir, StepLog step_log, bool event_log)
    : dir_(std::move(dir)), step_log_(step_log), event_log_(event_log)
{
    if (step_log_ == StepLog::Auto) throw std::invalid_argument("RunWriter: resolve the step log mode first");
}

std::string RunWriter::path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

SessionIO RunWriter::begin_session(const std::string& tag, int session)
{
    SessionIO io;
    if (!enabled()) return io;
    if (log_steps()) {
        if (!step_os_ || step_tag_ != tag) {
            step_os_ = open_out(path("steps_" + tag + ".csv"));
            step_tag_ = tag;
            write_step_header(*step_os_);
        }
        io.step_log = step_os_.get();
    }
    if (event_log_) {
        event_os_ = open_out(path("events/" + tag + "_" + std::to_string(session) + ".csv"));
        market::EventLog::write_csv_header(*event_os_);
        io.event_log = event_os_.get();
    }
    return io;
}

void RunWriter::end_session(const SessionResult& res, const std::string& phase, int local_index)
{
    if (event_os_) event_os_->flush();
    event_os_.reset();
    if (!enabled()) return;
    if (!sessions_os_) {
        sessions_os_ = open_out(path("sessions.csv"));
        *sessions_os_ << "phase,session,mm_id,kind,mean_reward,mean_r1,mean_r2,terminal_mtm,mtm_change,"
                         "mean_abs_inventory,cash_inventory_ratio,earnings,hedge_cost,investor_trades\n";
    }
    auto& os = *sessions_os_;
    for (const auto& m : res.mms) {
        os << phase << ',' << local_index << ',' << m.mm_id << ',' << m.kind << ',' << format_double(m.mean_reward) << ','
           << format_double(m.mean_r1) << ',' << format_double(m.mean_r2) << ',' << m.terminal_mtm << ',' << m.mtm_change
           << ',' << format_double(m.mean_abs_inventory) << ',' << opt_double(m.cash_inventory_ratio) << ',' << m.earnings
           << ',' << m.hedge_cost << ',' << m.investor_trades << '\n';
    }
    os.flush();
}

void RunWriter::write_json(const std::string& name, const json& j) const
{
    if (!enabled()) return;
    auto os = open_out(path(name));
    *os << j.dump(2) << '\n';
}

// --- aggregation ---

std::vector<AggregateStats> aggregate(const std::vector<SessionResult>& sessions)
{
    std::vector<AggregateStats> out;
    if (sessions.empty()) return out;
    const std::size_t n_mm = sessions.front().mms.size();
    out.resize(n_mm);
    std::vector<double> ratio_sum(n_mm, 0.0);
    std::vector<int> ratio_n(n_mm, 0);
    for (const auto& s : sessions) {
        if (s.mms.size() != n_mm) throw std::invalid_argument("aggregate: lineup changed between sessions");
        for (std::size_t i = 0; i < n_mm; ++i) {
            const auto& m = s.mms[i];
            auto& a = out[i];
            ++a.sessions;
            a.mean_reward += m.mean_reward;
            a.mean_r1 += m.mean_r1;
            a.mean_r2 += m.mean_r2;
            a.mean_mtm_change += static_cast<double>(m.mtm_change);
            a.mean_terminal_mtm += static_cast<double>(m.terminal_mtm);
            a.mean_abs_inventory += m.mean_abs_inventory;
            if (m.cash_inventory_ratio) {
                ratio_sum[i] += *m.cash_inventory_ratio;
                ++ratio_n[i];
            }
        }
    }
    for (std::size_t i = 0; i < n_mm; ++i) {
        auto& a = out[i];
        const double n = static_cast<double>(a.sessions);
        a.mean_reward /= n;
        a.mean_r1 /= n;
        a.mean_r2 /= n;
        a.mean_mtm_change /= n;
        a.mean_terminal_mtm /= n;
        a.mean_abs_inventory /= n;
        if (ratio_n[i] > 0) a.cash_inventory_ratio = ratio_sum[i] / ratio_n[i];
    }
    return out;
}

json to_json(const AggregateStats& a)
{
    return {{"sessions", a.sessions},
            {"mean_reward", a.mean_reward},
            {"mean_r1", a.mean_r1},
            {"mean_r2", a.mean_r2},
            {"mean_mtm_change", a.mean_mtm_change},
            {"mean_terminal_mtm", a.mean_terminal_mtm},
            {"mean_abs_inventory", a.mean_abs_inventory},
            {"cash_inventory_ratio", a.cash_inventory_ratio ? json(*a.cash_inventory_ratio) : json(nullptr)}};
}

std::uint64_t seed_for(std::uint64_t base, int replicate) { return base + static_cast<std::uint64_t>(replicate); }

// --- training and testing ---

TrainOutcome run_training(const ExperimentConfig& cfg, RunWriter& out)
{
    validate(cfg);
    TrainOutcome res;
    Lineup lineup;
    const auto eps = eps_schedule(cfg);
    std::uint64_t next_id = kLearnerSeedId;
    for (int i = 0; i < cfg.lineup.dqn; ++i)
        res.learners.push_back(std::make_unique<Learner>(cfg.state.variant, 1, cfg.learner.dqn, eps, derived_seed(cfg.seed, next_id++)));
    for (int i = 0; i < cfg.lineup.morl; ++i) {
        res.learners.push_back(std::make_unique<Learner>(cfg.state.variant, 2, cfg.learner.dqn, eps, derived_seed(cfg.seed, next_id++)));
        res.learners.back()->agent.set_weight(cfg.learner.morl_w);
    }
    for (std::size_t i = 0; i < res.learners.size(); ++i) {
        const bool morl = static_cast<int>(i) >= cfg.lineup.dqn;
        lineup.add(std::make_unique<LearnerController>(*res.learners[i], LearnMode::Train, morl ? "morl" : "dqn"),
                   morl ? morl_reward(cfg) : cfg.reward, morl ? cfg.learner.morl_w : 1.0, true);
    }
    add_baselines(lineup, cfg, 0, out.agent_only());

    std::vector<int> checkpoints = cfg.output.checkpoints;
    std::sort(checkpoints.begin(), checkpoints.end());
    json saved = json::array();
    for (int s = 0; s < cfg.sessions; ++s) {
        const auto io = out.begin_session("train", s);
        res.sessions.push_back(run_session(cfg, cfg.seed, s, lineup.participants, io));
        out.end_session(res.sessions.back(), "train", s);
        if (out.enabled() && std::binary_search(checkpoints.begin(), checkpoints.end(), s)) {
            const auto dir = fs::path(out.dir()) / "checkpoints" / ("session_" + std::to_string(s));
            fs::create_directories(dir);
            for (std::size_t i = 0; i < res.learners.size(); ++i)
                save_snapshot((dir / ("mm" + std::to_string(i))).string(), res.learners[i]->snapshot());
            saved.push_back(s);
        }
    }
    if (out.enabled() && !res.learners.empty()) {
        const auto dir = fs::path(out.dir()) / "final";
        fs::create_directories(dir);
        for (std::size_t i = 0; i < res.learners.size(); ++i)
            save_snapshot((dir / ("mm" + std::to_string(i))).string(), res.learners[i]->snapshot());
    }
    res.summary = {{"phase", "train"},
                   {"seed", cfg.seed},
                   {"sessions_expected", cfg.sessions},
                   {"steps", cfg.steps},
                   {"checkpoints", saved},
                   {"mms", res.sessions.empty() ? json::array() : aggregates_json(res.sessions)}};
    return res;
}

TestOutcome run_test(const ExperimentConfig& cfg, const std::vector<std::shared_ptr<const PolicySnapshot>>& agents, RunWriter& out)
{
    validate(cfg);
    TestOutcome res;
    Lineup lineup;
    for (const auto& snap : agents) {
        if (snap->variant != cfg.state.variant)
            throw std::invalid_argument("run_test: checkpoint state variant " + std::string(policy::to_string(snap->variant)) +
                                        " does not match config " + std::string(policy::to_string(cfg.state.variant)));
        const bool morl = snap->policy.heads.size() == 2;
        lineup.add(std::make_unique<GreedyController>(snap, morl ? "morl" : "dqn"), morl ? morl_reward(cfg) : cfg.reward,
                   morl ? snap->policy.w : 1.0, true);
    }
    add_baselines(lineup, cfg, 1, out.agent_only());
    for (int s = 0; s < cfg.test_sessions; ++s) {
        const auto io = out.begin_session("test", s);
        res.sessions.push_back(run_session(cfg, cfg.seed, kTestSessionOffset + s, lineup.participants, io));
        out.end_session(res.sessions.back(), "test", s);
    }
    res.summary = {{"phase", "test"},
                   {"seed", cfg.seed},
                   {"sessions_expected", cfg.test_sessions},
                   {"steps", cfg.steps},
                   {"mms", res.sessions.empty() ? json::array() : aggregates_json(res.sessions)}};
    return res;
}

namespace {

std::vector<std::shared_ptr<const PolicySnapshot>> snapshots_of(const TrainOutcome& t)
{
    std::vector<std::shared_ptr<const PolicySnapshot>> v;
    for (const auto& l : t.learners) v.push_back(std::make_shared<const PolicySnapshot>(l->snapshot()));
    return v;
}

// Trains and tests one arm; returns the test sessions. Multi-run commands
// only write the per-session table unless step logging is requested.
std::vector<SessionResult> train_and_test(const ExperimentConfig& cfg, const std::string& dir)
{
    RunWriter w(dir, resolve(cfg.output.step_log, StepLog::None), cfg.output.event_log);
    auto train = run_training(cfg, w);
    auto test = run_test(cfg, snapshots_of(train), w);
    w.write_json("summary.json", {{"config", config_to_json(cfg)}, {"train", train.summary}, {"test", test.summary}});
    return test.sessions;
}

std::string seed_dir(const std::string& base, const std::string& arm, int r)
{
    if (base.empty()) return {};
    return (fs::path(base) / arm / ("seed_" + std::to_string(r))).string();
}

void write_text(const std::string& dir, const std::string& name, const std::string& text)
{
    if (dir.empty()) return;
    auto os = open_out(fs::path(dir) / name);
    *os << text;
}

void write_json_file(const std::string& dir, const std::string& name, const json& j)
{
    if (dir.empty()) return;
    auto os = open_out(fs::path(dir) / name);
    *os << j.dump(2) << '\n';
}

struct ArmResult {
    std::string arm;
    std::string reward;
    double param = 0.0;
    std::vector<AgentPoint> per_seed;
};

json arm_json(const ArmResult& a)
{
    std::vector<double> rew, mtm, inv, ratio;
    for (const auto& p : a.per_seed) {
        rew.push_back(p.mean_reward);
        mtm.push_back(p.mtm_change);
        inv.push_back(p.abs_inventory);
        if (p.ratio) ratio.push_back(*p.ratio);
    }
    return {{"arm", a.arm},
            {"reward", a.reward},
            {"param", a.param},
            {"mean_reward", mean_std(rew)},
            {"mean_mtm_change", mean_std(mtm)},
            {"mean_abs_inventory", mean_std(inv)},
            {"cash_inventory_ratio", ratio.empty() ? json(nullptr) : mean_std(ratio)}};
}

std::string arms_csv(const std::vector<ArmResult>& arms)
{
    std::ostringstream os;
    os << "arm,reward,param,seed,mean_reward,mean_mtm_change,mean_abs_inventory,cash_inventory_ratio\n";
    for (const auto& a : arms)
        for (std::size_t r = 0; r < a.per_seed.size(); ++r) {
            const auto& p = a.per_seed[r];
            os << a.arm << ',' << a.reward << ',' << format_double(a.param) << ',' << r << ',' << format_double(p.mean_reward)
               << ',' << format_double(p.mtm_change) << ',' << format_double(p.abs_inventory) << ',' << opt_double(p.ratio)
               << '\n';
        }
    return os.str();
}

ArmResult run_arm(const ExperimentConfig& base, const std::string& arm, double param, const std::string& out_dir,
                  const std::function<void(ExperimentConfig&)>& tweak)
{
    ArmResult res;
    res.arm = arm;
    res.param = param;
    for (int r = 0; r < base.sweep.seeds; ++r) {
        ExperimentConfig c = base;
        c.seed = seed_for(base.seed, r);
        tweak(c);
        res.reward = std::string(rewards::to_string(c.reward.kind));
        res.per_seed.push_back(agent_point(train_and_test(c, seed_dir(out_dir, arm, r))));
    }
    return res;
}

}  // namespace

json run_aiif_sweep(const ExperimentConfig& cfg, const std::string& out_dir)
{
    std::vector<ArmResult> arms;
    for (double a : cfg.sweep.aiif) {
        arms.push_back(run_arm(cfg, "aiif_" + param_tag(a), a, out_dir, [a](ExperimentConfig& c) {
            c.reward.kind = rewards::RewardKind::Rim;
            c.reward.rim.aiif = a;
            c.lineup.dqn = 1;
            c.lineup.morl = 0;
        }));
    }
    std::vector<double> aiifs, invs;
    json table = json::array();
    bool strictly_decreasing = true;
    for (std::size_t i = 0; i < arms.size(); ++i) {
        table.push_back(arm_json(arms[i]));
        aiifs.push_back(arms[i].param);
        std::vector<double> inv;
        for (const auto& p : arms[i].per_seed) inv.push_back(p.abs_inventory);
        invs.push_back(mean_of(inv));
        if (i > 0 && !(invs[i] < invs[i - 1])) strictly_decreasing = false;
    }
    json summary = {{"experiment", "sweep-aiif"},
                    {"seeds", cfg.sweep.seeds},
                    {"arms", table},
                    {"mean_abs_inventory_by_aiif", invs},
                    {"spearman_aiif_vs_abs_inventory", arms.size() >= 2 ? json(spearman(aiifs, invs)) : json(nullptr)},
                    {"abs_inventory_strictly_decreasing", strictly_decreasing}};
    write_text(out_dir, "aiif_table.csv", arms_csv(arms));
    write_json_file(out_dir, "summary.json", summary);
    return summary;
}

json run_reward_benchmark(const ExperimentConfig& cfg, const std::string& out_dir)
{
    using rewards::RewardKind;
    std::vector<ArmResult> arms;
    auto single_dqn = [](ExperimentConfig& c, RewardKind k) {
        c.reward.kind = k;
        c.lineup.dqn = 1;
        c.lineup.morl = 0;
    };
    for (double a : cfg.sweep.aiif)
        arms.push_back(run_arm(cfg, "rim_" + param_tag(a), a, out_dir, [&](ExperimentConfig& c) {
            single_dqn(c, RewardKind::Rim);
            c.reward.rim.aiif = a;
        }));
    arms.push_back(run_arm(cfg, "full_inv", cfg.reward.full_inv_lambda, out_dir,
                           [&](ExperimentConfig& c) { single_dqn(c, RewardKind::FullInv); }));
    arms.push_back(run_arm(cfg, "asym_damp", cfg.reward.asym_eta, out_dir,
                           [&](ExperimentConfig& c) { single_dqn(c, RewardKind::AsymDamp); }));
    arms.push_back(run_arm(cfg, "pnl_only", 0.0, out_dir, [&](ExperimentConfig& c) { single_dqn(c, RewardKind::PnlOnly); }));

    json table = json::array();
    std::string largest;
    double largest_inv = -1.0;
    for (const auto& a : arms) {
        table.push_back(arm_json(a));
        std::vector<double> inv;
        for (const auto& p : a.per_seed) inv.push_back(p.abs_inventory);
        if (mean_of(inv) > largest_inv) {
            largest_inv = mean_of(inv);
            largest = a.arm;
        }
    }
    json summary = {{"experiment", "benchmark-rewards"}, {"seeds", cfg.sweep.seeds}, {"arms", table}, {"largest_abs_inventory", largest}};
    write_text(out_dir, "benchmark_table.csv", arms_csv(arms));
    write_json_file(out_dir, "summary.json", summary);
    return summary;
}

json compute_front_metrics(const std::map<std::string, std::vector<metrics::ObjectivePoint>>& sets, double margin)
{
    std::vector<metrics::ObjectivePoint> pooled;
    for (const auto& [label, pts] : sets)
        for (auto p : pts) {
            p.tag = label;
            pooled.push_back(p);
        }
    json out = {{"margin", margin}, {"pooled_points", pooled.size()}};
    if (pooled.empty()) return out;
    const auto counts = metrics::combined_front_attribution(sets);
    const auto norm = metrics::minmax_normalize(pooled, margin);
    json labels = json::object();
    std::size_t offset = 0;
    for (const auto& [label, pts] : sets) {
        std::vector<metrics::ObjectivePoint> mine(norm.points.begin() + static_cast<std::ptrdiff_t>(offset),
                                                  norm.points.begin() + static_cast<std::ptrdiff_t>(offset + pts.size()));
        offset += pts.size();
        const auto front = metrics::pareto_filter(mine).front();
        const auto it = counts.find(label);
        labels[label] = {{"points", pts.size()},
                         {"pooled_undominated", it == counts.end() ? 0 : it->second},
                         {"own_front_size", front.size()},
                         {"hypervolume", front.empty() ? 0.0 : metrics::hypervolume_2d(front, {0.0, 0.0, ""})},
                         {"sparsity", metrics::sparsity(front)}};
    }
    out["labels"] = labels;
    return out;
}

json run_morl_weight_sweep(const ExperimentConfig& cfg, const std::string& out_dir)
{
    using rewards::RewardKind;
    std::vector<ArmResult> arms;
    std::map<std::string, std::vector<metrics::ObjectivePoint>> sets;
    auto to_point = [](const ArmResult& a, const std::string& label) {
        std::vector<double> mtm, inv;
        for (const auto& p : a.per_seed) {
            mtm.push_back(p.mtm_change);
            inv.push_back(p.abs_inventory);
        }
        return metrics::ObjectivePoint{mean_of(mtm), -mean_of(inv), label + ":" + param_tag(a.param)};
    };
    for (double w : cfg.sweep.morl_weights) {
        arms.push_back(run_arm(cfg, "morl_w" + param_tag(w), w, out_dir, [w](ExperimentConfig& c) {
            c.reward.kind = RewardKind::Morl;
            c.lineup.dqn = 0;
            c.lineup.morl = 1;
            c.learner.morl_w = w;
        }));
        sets["MORL"].push_back(to_point(arms.back(), "MORL"));
        arms.push_back(run_arm(cfg, "rew_w" + param_tag(w), w, out_dir, [w](ExperimentConfig& c) {
            c.reward.kind = RewardKind::Rew;
            c.reward.rew_w = w;
            c.lineup.dqn = 1;
            c.lineup.morl = 0;
        }));
        sets["RE-W"].push_back(to_point(arms.back(), "RE-W"));
    }
    for (double a : cfg.sweep.aiif) {
        arms.push_back(run_arm(cfg, "rim_" + param_tag(a), a, out_dir, [a](ExperimentConfig& c) {
            c.reward.kind = RewardKind::Rim;
            c.reward.rim.aiif = a;
            c.lineup.dqn = 1;
            c.lineup.morl = 0;
        }));
        sets["RE-AIIF"].push_back(to_point(arms.back(), "RE-AIIF"));
    }
    const auto metrics_json = compute_front_metrics(sets);

    std::ostringstream pts;
    pts << "label,tag,mtm_score,inv_score\n";
    for (const auto& [label, v] : sets)
        for (const auto& p : v) pts << label << ',' << p.tag << ',' << format_double(p.mtm) << ',' << format_double(p.inv) << '\n';
    std::ostringstream tbl;
    tbl << "algorithm,undominated,hypervolume,sparsity\n";
    for (const auto& [label, j] : metrics_json.at("labels").items())
        tbl << label << ',' << j.at("pooled_undominated").get<int>() << ',' << format_double(j.at("hypervolume").get<double>())
            << ',' << format_double(j.at("sparsity").get<double>()) << '\n';

    json summary = {{"experiment", "sweep-morl"}, {"seeds", cfg.sweep.seeds}, {"metrics", metrics_json}};
    json arr = json::array();
    for (const auto& a : arms) arr.push_back(arm_json(a));
    summary["arms"] = arr;
    write_text(out_dir, "points.csv", pts.str());
    write_text(out_dir, "metrics_table.csv", tbl.str());
    write_json_file(out_dir, "metrics.json", metrics_json);
    write_json_file(out_dir, "summary.json", summary);
    return summary;
}

// --- context sequence ---

MethodSpec parse_method(const std::string& name)
{
    static const std::map<std::string, ContextMethod> kMethods{
        {"single-policy", ContextMethod::SinglePolicy}, {"cl-singlep", ContextMethod::ClSingleP},
        {"cl-freezing", ContextMethod::ClFreezing},     {"cl-rehearsal", ContextMethod::ClRehearsal},
        {"cl-ewc", ContextMethod::ClEwc},               {"powdts", ContextMethod::PowDts},
        {"random-blocks", ContextMethod::RandomBlocks}, {"random-timesteps", ContextMethod::RandomTimesteps},
        {"optimal-mp", ContextMethod::OptimalMp}};
    std::string base = name;
    bool exp = false;
    if (base.size() > 4 && base.compare(base.size() - 4, 4, "-exp") == 0) {
        base.resize(base.size() - 4);
        exp = true;
    }
    const auto it = kMethods.find(base);
    if (it == kMethods.end()) throw std::invalid_argument("unknown context method: " + name);
    const auto m = it->second;
    const bool learns = m == ContextMethod::ClSingleP || m == ContextMethod::ClFreezing || m == ContextMethod::ClRehearsal ||
                        m == ContextMethod::ClEwc;
    if (exp && !learns && m != ContextMethod::PowDts)
        throw std::invalid_argument("method " + base + " has no exploration variant");
    return MethodSpec{m, exp, name};
}

std::vector<std::string> all_method_names()
{
    return {"single-policy", "cl-singlep", "cl-freezing", "cl-rehearsal", "cl-ewc",     "powdts",
            "random-blocks", "random-timesteps", "optimal-mp", "cl-singlep-exp", "cl-freezing-exp",
            "cl-rehearsal-exp", "cl-ewc-exp", "powdts-exp"};
}

int ContextLibrary::index_for(int competitors) const
{
    for (std::size_t i = 0; i < competitor_counts.size(); ++i)
        if (competitor_counts[i] == competitors) return static_cast<int>(i);
    throw std::invalid_argument("library has no policy for " + std::to_string(competitors) + " competitors");
}

namespace {

ExperimentConfig context_config(const ExperimentConfig& cfg)
{
    ExperimentConfig c = cfg;
    c.state.variant = cfg.context.state_variant;
    return c;
}

// The agent under study is participant 0; competitors are greedy copies of
// the library's zero-competitor policy.
void add_competitors(Lineup& lineup, const std::shared_ptr<const PolicySnapshot>& base, int k, const ExperimentConfig& cfg)
{
    for (int i = 0; i < k; ++i) lineup.add(std::make_unique<GreedyController>(base, "competitor"), morl_reward(cfg), cfg.context.morl_w, false);
}

}  // namespace

ContextLibrary train_context_library(const ExperimentConfig& base, std::uint64_t seed, const std::string& out_dir)
{
    ExperimentConfig cfg = context_config(base);
    ContextLibrary lib;
    lib.competitor_counts = cfg.context.library;
    const int zero = [&] {
        for (std::size_t i = 0; i < lib.competitor_counts.size(); ++i)
            if (lib.competitor_counts[i] == 0) return static_cast<int>(i);
        throw std::invalid_argument("context library must contain a zero-competitor policy");
    }();
    // Zero-competitor policy first: it supplies the competitors of the others.
    std::vector<int> order{zero};
    for (int i = 0; i < static_cast<int>(lib.competitor_counts.size()); ++i)
        if (i != zero) order.push_back(i);
    lib.learners.resize(lib.competitor_counts.size());
    lib.snapshots.resize(lib.competitor_counts.size());
    const rl::EpsSchedule eps(cfg.learner.eps_start, cfg.learner.eps_min, cfg.context.library_sessions);
    json summary = json::array();
    for (int j : order) {
        const auto ju = static_cast<std::size_t>(j);
        const int k = lib.competitor_counts[ju];
        lib.learners[ju] = std::make_unique<Learner>(cfg.state.variant, 2, cfg.learner.dqn, eps,
                                                     derived_seed(seed, kContextSeedId + 100 + ju));
        lib.learners[ju]->agent.set_weight(cfg.context.morl_w);
        Lineup lineup;
        lineup.add(std::make_unique<LearnerController>(*lib.learners[ju], LearnMode::Train, "morl"), morl_reward(cfg),
                   cfg.context.morl_w, true);
        if (k > 0) add_competitors(lineup, lib.snapshots[static_cast<std::size_t>(zero)], k, cfg);
        std::vector<SessionResult> sessions;
        for (int s = 0; s < cfg.context.library_sessions; ++s)
            sessions.push_back(run_session(cfg, seed, kLibrarySessionOffset + 10'000 * j + s, lineup.participants));
        lib.snapshots[ju] = std::make_shared<const PolicySnapshot>(lib.learners[ju]->snapshot());
        const auto agg = aggregate(sessions);
        summary.push_back({{"competitors", k}, {"train", to_json(agg.at(0))}});
        if (!out_dir.empty()) {
            const auto dir = fs::path(out_dir) / "library";
            fs::create_directories(dir);
            save_snapshot((dir / ("policy_k" + std::to_string(k))).string(), *lib.snapshots[ju]);
        }
    }
    write_json_file(out_dir.empty() ? out_dir : (fs::path(out_dir) / "library").string(), "summary.json", summary);
    return lib;
}

namespace {

std::vector<nn::FisherDiag> fisher_from_buffer(const Learner& l, std::uint64_t seed)
{
    const auto& buf = l.agent.buffer();
    if (buf.empty()) throw std::logic_error("cl-ewc: library buffer is empty");
    Stream stream(seed);
    const auto batch = buf.sample(std::min<std::size_t>(buf.size(), l.agent.config().batch_size), stream);
    std::vector<nn::FisherDiag> out;
    for (int h = 0; h < l.agent.head_count(); ++h) {
        const auto& head = l.agent.head(h);
        const auto y = head.targets(batch, h, l.agent.config().gamma);
        std::vector<nn::Sample> data;
        data.reserve(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) data.push_back(nn::Sample{batch[i].s, batch[i].a, y[i]});
        out.push_back(nn::estimate_fisher_diag(head.params(), data, l.agent.config().loss));
    }
    return out;
}

json recal_json(const powdts::RecalibrationRecord& r)
{
    json coefs = json::array();
    for (const auto& c : r.coefs) coefs.push_back({c.a, c.b});
    json secs = json::array();
    for (const auto& s : r.sections) secs.push_back({s.start, s.end});
    return {{"step", r.step}, {"test_rewards", r.test_rewards}, {"winner", r.winner}, {"sampled", r.sampled},
            {"coefs", coefs},  {"weights", r.weights},           {"sections", secs}};
}

}  // namespace

ContextOutcome run_context_sequence(const ExperimentConfig& base, const MethodSpec& spec, ContextLibrary& library,
                                    std::uint64_t seed, const std::string& out_dir)
{
    const ExperimentConfig cfg = context_config(base);
    const auto& cc = cfg.context;
    const int zero = library.index_for(0);
    const auto competitor_base = library.snapshots[static_cast<std::size_t>(zero)];

    // Decision maker for participant 0.
    std::unique_ptr<Learner> learner;
    std::unique_ptr<Controller> fixed;
    LearnerController* lc = nullptr;
    PowDtsController* pc = nullptr;
    std::shared_ptr<const PolicySnapshot> single;
    Stream method_stream(derived_seed(seed, kContextSeedId + 1));
    const rl::EpsSchedule explore(cfg.learner.eps_start, cc.cl_eps, std::max(1, cc.exploration_sessions));

    switch (spec.method) {
    case ContextMethod::SinglePolicy:
        single = library.snapshots[static_cast<std::size_t>(library.index_for(cc.single_policy))];
        break;
    case ContextMethod::OptimalMp:
    case ContextMethod::RandomBlocks: break;
    case ContextMethod::RandomTimesteps:
        fixed = std::make_unique<RandomTimestepController>(library.snapshots, derived_seed(seed, kContextSeedId + 2));
        break;
    case ContextMethod::PowDts: {
        auto p = std::make_unique<PowDtsController>(library.snapshots, cfg.powdts, derived_seed(seed, kContextSeedId + 3));
        pc = p.get();
        fixed = std::move(p);
        break;
    }
    case ContextMethod::ClSingleP:
    case ContextMethod::ClFreezing:
    case ContextMethod::ClRehearsal:
    case ContextMethod::ClEwc: {
        const auto src = library.index_for(cc.single_policy);
        learner = std::make_unique<Learner>(*library.snapshots[static_cast<std::size_t>(src)], cfg.learner.dqn,
                                            rl::EpsSchedule(cc.cl_eps, cc.cl_eps, 1), derived_seed(seed, kContextSeedId + 4));
        learner->agent.set_learning_rate(cc.cl_lr);
        const auto& src_learner = *library.learners[static_cast<std::size_t>(zero)];
        if (spec.method == ContextMethod::ClFreezing)
            learner->agent.set_freeze_mask(nn::freeze_layers(learner->agent.head(0).params().spec, cc.freeze_layers));
        if (spec.method == ContextMethod::ClRehearsal) learner->agent.set_rehearsal(&src_learner.agent.buffer(), cc.rehearsal_mix);
        if (spec.method == ContextMethod::ClEwc)
            learner->agent.set_ewc(fisher_from_buffer(src_learner, derived_seed(seed, kContextSeedId + 5)), cc.ewc_lambda);
        auto c = std::make_unique<LearnerController>(*learner, LearnMode::Online, spec.label, cc.cl_eps);
        lc = c.get();
        fixed = std::move(c);
        break;
    }
    }

    RunWriter w(out_dir, resolve(cfg.output.step_log, StepLog::None), cfg.output.event_log);
    ContextOutcome res;
    res.method = spec.label;
    std::vector<SessionResult> all;
    json blocks = json::array();
    int counter = 0;
    for (std::size_t b = 0; b < cc.sequence.size(); ++b) {
        const int k = cc.sequence[b];
        std::shared_ptr<const PolicySnapshot> block_policy;
        if (spec.method == ContextMethod::SinglePolicy) block_policy = single;
        if (spec.method == ContextMethod::OptimalMp)
            block_policy = library.snapshots[static_cast<std::size_t>(library.index_for(k))];
        if (spec.method == ContextMethod::RandomBlocks)
            block_policy = library.snapshots[uniform_index(method_stream, library.snapshots.size())];
        std::unique_ptr<Controller> block_ctrl;
        Controller* agent = fixed.get();
        if (block_policy) {
            block_ctrl = std::make_unique<GreedyController>(block_policy, spec.label);
            agent = block_ctrl.get();
        }
        if (spec.exploration && pc && b > 0) pc->mutable_scheduler().force_recalibration();

        Lineup lineup;
        lineup.participants.push_back(Participant{agent, morl_reward(cfg), cc.morl_w, true});
        add_competitors(lineup, competitor_base, k, cfg);

        std::vector<SessionResult> block;
        for (int s = 0; s < cc.sessions_per_context; ++s) {
            if (lc) {
                const bool exploring = spec.exploration && s < cc.exploration_sessions;
                lc->set_mode(LearnMode::Online, exploring ? explore.at(s) : cc.cl_eps);
            }
            const auto io = w.begin_session("context", counter);
            block.push_back(run_session(cfg, seed, kContextSessionOffset + counter, lineup.participants, io));
            w.end_session(block.back(), "context", counter);
            ++counter;
        }
        const auto agg = aggregate(block).at(0);
        res.context_rewards.push_back(agg.mean_reward);
        blocks.push_back({{"block", b}, {"competitors", k}, {"agent", to_json(agg)}});
        all.insert(all.end(), block.begin(), block.end());
    }

    std::vector<double> rewards, mtm, inv;
    for (const auto& s : all) {
        rewards.push_back(s.mms[0].mean_reward);
        mtm.push_back(static_cast<double>(s.mms[0].mtm_change));
        inv.push_back(s.mms[0].mean_abs_inventory);
    }
    res.mean_reward = mean_of(rewards);
    res.summary = {{"method", spec.label},
                   {"seed", seed},
                   {"sequence", cc.sequence},
                   {"sessions_per_context", cc.sessions_per_context},
                   {"sessions_expected", counter},
                   {"includes_recalibration_steps", spec.method == ContextMethod::PowDts},
                   {"mean_reward", mean_std(rewards)},
                   {"mean_mtm_change", mean_std(mtm)},
                   {"mean_abs_inventory", mean_std(inv)},
                   {"blocks", blocks}};
    if (pc) {
        json recs = json::array();
        for (const auto& r : pc->scheduler().history()) recs.push_back(recal_json(r));
        write_json_file(out_dir, "recalibrations.json", recs);
        res.summary["recalibrations"] = pc->scheduler().history().size();
    }
    write_json_file(out_dir, "summary.json", res.summary);
    return res;
}

json run_context_experiment(const ExperimentConfig& cfg, const std::vector<std::string>& methods, const std::string& out_dir)
{
    std::vector<MethodSpec> specs;
    for (const auto& m : methods) specs.push_back(parse_method(m));
    std::map<std::string, std::vector<double>> per_method;
    json seeds = json::array();
    for (int r = 0; r < cfg.sweep.seeds; ++r) {
        const auto seed = seed_for(cfg.seed, r);
        const std::string sdir = out_dir.empty() ? std::string() : (fs::path(out_dir) / ("seed_" + std::to_string(r))).string();
        auto library = train_context_library(cfg, seed, sdir);
        json row = {{"seed", seed}};
        for (const auto& spec : specs) {
            const auto out = run_context_sequence(cfg, spec, library, seed,
                                                  sdir.empty() ? sdir : (fs::path(sdir) / spec.label).string());
            per_method[spec.label].push_back(out.mean_reward);
            row[spec.label] = out.mean_reward;
        }
        seeds.push_back(row);
    }
    json table = json::object();
    std::ostringstream csv;
    csv << "method,mean_reward,std_reward,seeds\n";
    for (const auto& spec : specs) {
        const auto& v = per_method[spec.label];
        table[spec.label] = mean_std(v);
        csv << spec.label << ',' << format_double(mean_of(v)) << ',' << format_double(std_of(v)) << ',' << v.size() << '\n';
    }
    json summary = {{"experiment", "context-seq"}, {"per_seed", seeds}, {"methods", table}};
    write_text(out_dir, "results_table.csv", csv.str());
    write_json_file(out_dir, "summary.json", summary);
    return summary;
}

// --- reports ---

std::vector<double> rolling_mean(const std::vector<double>& xs, int window)
{
    if (window < 1) throw std::invalid_argument("rolling_mean: window must be >= 1");
    std::vector<double> out(xs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        acc += xs[i];
        if (i >= static_cast<std::size_t>(window)) acc -= xs[i - static_cast<std::size_t>(window)];
        const auto n = std::min<std::size_t>(i + 1, static_cast<std::size_t>(window));
        out[i] = acc / static_cast<double>(n);
    }
    return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

struct SeriesRow {
    int session = 0;
    std::string kind;
    double reward = 0.0;
    double mtm_change = 0.0;
    double abs_inv = 0.0;
};

}  // namespace

json emit_reports(const std::string& run_dir, int window)
{
    const fs::path dir(run_dir);
    std::ifstream is(dir / "sessions.csv");
    if (!is) throw std::runtime_error("report: cannot open " + (dir / "sessions.csv").string());
    std::string line;
    std::getline(is, line);
    const auto header = split_csv(line);
    auto col = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw std::runtime_error("report: sessions.csv lacks column " + name);
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto c_phase = col("phase"), c_session = col("session"), c_mm = col("mm_id"), c_kind = col("kind"),
               c_reward = col("mean_reward"), c_mtm = col("mtm_change"), c_inv = col("mean_abs_inventory");
    std::map<std::string, std::map<int, std::vector<SeriesRow>>> series;  // phase -> mm -> rows
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != header.size()) throw std::runtime_error("report: malformed row at line " + std::to_string(lineno));
        SeriesRow r{std::stoi(f[c_session]), f[c_kind], std::stod(f[c_reward]), std::stod(f[c_mtm]), std::stod(f[c_inv])};
        series[f[c_phase]][std::stoi(f[c_mm])].push_back(r);
    }

    // Expected counts come from the summary when available.
    std::map<std::string, int> expected;
    if (std::ifstream js(dir / "summary.json"); js) {
        const auto s = json::parse(js);
        for (const auto& phase : {"train", "test"})
            if (s.contains(phase) && s[phase].contains("sessions_expected")) expected[phase] = s[phase]["sessions_expected"].get<int>();
        if (s.contains("sessions_expected") && s.contains("method")) expected["context"] = s["sessions_expected"].get<int>();
    }

    std::vector<std::string> problems;
    for (auto& [phase, mms] : series) {
        for (auto& [mm, rows] : mms) {
            std::sort(rows.begin(), rows.end(), [](const SeriesRow& a, const SeriesRow& b) { return a.session < b.session; });
            int want = rows.empty() ? 0 : rows.back().session + 1;
            if (const auto it = expected.find(phase); it != expected.end()) want = std::max(want, it->second);
            std::vector<int> missing;
            std::size_t j = 0;
            for (int s = 0; s < want; ++s) {
                if (j < rows.size() && rows[j].session == s) {
                    ++j;
                    while (j < rows.size() && rows[j].session == s) ++j;
                } else {
                    missing.push_back(s);
                }
            }
            if (!missing.empty()) {
                std::string msg = "phase " + phase + " mm " + std::to_string(mm) + " missing sessions:";
                for (int s : missing) msg += " " + std::to_string(s);
                problems.push_back(msg);
            }
        }
    }
    for (const auto& [phase, n] : expected)
        if (n > 0 && !series.count(phase)) problems.push_back("phase " + phase + " has no sessions (expected " + std::to_string(n) + ")");
    if (!problems.empty()) {
        std::string msg = "report: incomplete logs in " + run_dir;
        for (const auto& p : problems) msg += "\n  " + p;
        throw std::runtime_error(msg);
    }

    std::ostringstream csv;
    csv << "phase,mm_id,kind,session,mean_reward,rolling_reward,mtm_change,rolling_mtm_change,mean_abs_inventory,rolling_abs_inventory\n";
    json report = {{"window", window}, {"phases", json::object()}};
    for (const auto& [phase, mms] : series) {
        json pj = json::array();
        for (const auto& [mm, rows] : mms) {
            std::vector<double> rew, mtm, inv;
            for (const auto& r : rows) {
                rew.push_back(r.reward);
                mtm.push_back(r.mtm_change);
                inv.push_back(r.abs_inv);
            }
            const auto rr = rolling_mean(rew, window), rm = rolling_mean(mtm, window), ri = rolling_mean(inv, window);
            for (std::size_t i = 0; i < rows.size(); ++i)
                csv << phase << ',' << mm << ',' << rows[i].kind << ',' << rows[i].session << ',' << format_double(rew[i]) << ','
                    << format_double(rr[i]) << ',' << format_double(mtm[i]) << ',' << format_double(rm[i]) << ','
                    << format_double(inv[i]) << ',' << format_double(ri[i]) << '\n';
            pj.push_back({{"mm_id", mm},
                          {"kind", rows.front().kind},
                          {"mean_reward", mean_std(rew)},
                          {"mtm_change", mean_std(mtm)},
                          {"mean_abs_inventory", mean_std(inv)}});
        }
        report["phases"][phase] = pj;
    }
    write_text((dir / "reports").string(), "rolling.csv", csv.str());
    write_json_file((dir / "reports").string(), "report.json", report);
    return report;
}

}  // namespace mmlab::harness
