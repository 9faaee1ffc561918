#include "mmlab/harness/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <stdexcept>


namespace mmlab::harness {

using nlohmann::json;

Scale parse_scale(const std::string& s)
{
    if (s == "desk") return Scale::Desk;
    if (s == "paper") return Scale::Paper;
    throw std::invalid_argument("unknown scale: " + s + " (expected desk or paper)");
}

std::string to_string(Scale s) { return s == Scale::Desk ? "desk" : "paper"; }

namespace {

StepLog parse_step_log(const std::string& s)
{
    if (s == "auto") return StepLog::Auto;
    if (s == "all") return StepLog::All;
    if (s == "agent") return StepLog::Agent;
    if (s == "none") return StepLog::None;
    throw std::invalid_argument("output.step_log must be one of auto, all, agent, none");
}

std::string step_log_name(StepLog s)
{
    switch (s) {
    case StepLog::Auto: return "auto";
    case StepLog::All: return "all";
    case StepLog::Agent: return "agent";
    case StepLog::None: return "none";
    }
    return "auto";
}

}  // namespace

json default_config_json(Scale scale)
{
    const bool paper = scale == Scale::Paper;
    const agents::BackgroundCfg m;
    json doc = {
        {"seed", 1},
        {"out_dir", "runs/default"},
        {"scale", to_string(scale)},
        {"steps", paper ? 7200 : 1800},
        {"sessions", paper ? 250 : 30},
        {"test_sessions", paper ? 50 : 10},
        {"market",
         {{"population", {{"noise", 100}, {"value", 10}, {"momentum", 10}, {"pov", 1}, {"multiplier", paper ? 1.0 : 0.2}}},
          {"noise", {{"order_size", m.noise.order_size}, {"arrival_prob", m.noise.arrival_prob}}},
          {"value",
           {{"fundamental", {{"mean", m.value.fundamental.mean}, {"kappa", m.value.fundamental.kappa}, {"sigma", m.value.fundamental.sigma}}},
            {"entry_threshold", m.value.entry_threshold},
            {"order_size", m.value.order_size},
            {"wake_prob", m.value.wake_prob}}},
          {"momentum", {{"fast_window", m.momentum.fast_window}, {"slow_window", m.momentum.slow_window}, {"order_size", m.momentum.order_size}}},
          {"pov",
           {{"pov_fraction", m.pov.pov_fraction},
            {"lookback", m.pov.lookback},
            {"wake_interval", m.pov.wake_interval},
            {"ladder_levels", m.pov.ladder_levels},
            {"level_spacing", m.pov.level_spacing}}},
          {"opening_price", m.opening_price},
          {"initial_spread", m.initial_spread}}},
        {"investors", {{"count", 50}, {"order_size", 10}, {"arrival_prob", 0.5}}},
        {"lineup", {{"dqn", 1}, {"morl", 0}, {"random", 1}, {"persistent", 1}}},
        {"reward",
         {{"kind", "single"},
          {"aiif", 0.0},
          {"ditf", 0.5},
          {"window", 20},
          {"full_inv_lambda", 0.15},
          {"asym_eta", 0.1},
          {"rew_w", 0.5},
          {"alpha", 5.0}}},
        {"state", {{"variant", "v10"}, {"ema_long_minutes", 20}, {"ema_short_minutes", 8}, {"steps_per_minute", 60}}},
        {"learner",
         {{"gamma", 0.6},
          {"train_every", 200},
          {"batch_size", 1024},
          {"grad_steps", 1},
          {"fit_batch", 0},
          {"lr", 0.01},
          {"loss", "mae"},
          {"buffer_capacity", 1000000},
          {"hidden", 32},
          {"hidden_layers", 3},
          {"eps_start", 0.99},
          {"eps_min", 0.01},
          {"eps_sessions", nullptr},
          {"morl_w", 0.5}}},
        {"output", {{"step_log", "auto"}, {"event_log", false}, {"checkpoints", json::array()}}},
        {"sweep",
         {{"aiif", paper ? json{0, 0.2, 0.5, 1, 2, 5, 10, 20, 50, 100} : json{0, 1, 10}},
          {"morl_weights", {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}},
          {"seeds", paper ? 5 : 3}}},
        {"context",
         {{"sequence", {0, 5, 1, 7, 1, 7, 5, 0}},
          {"sessions_per_context", paper ? 150 : 30},
          {"library", {0, 1, 5, 7}},
          {"library_sessions", paper ? 250 : 30},
          {"exploration_sessions", paper ? 30 : 3},
          {"method", "powdts"},
          {"single_policy", 0},
          {"cl_lr", 0.001},
          {"rehearsal_mix", 0.5},
          {"ewc_lambda", 100.0},
          {"freeze_layers", {0}},
          {"morl_w", 0.9},
          {"cl_eps", 0.01},
          {"exploration", false},
          {"state_variant", "v8"}}},
        {"powdts",
         {{"alpha_inc", 1.0}, {"beta_inc", 1.0}, {"gamma", 0.4}, {"rounds_exp", 3}, {"rounds_recal", 150}, {"exp_ts", 750}}},
    };
    return doc;
}

void merge_strict(json& base, const json& overlay, const std::string& path)
{
    if (!overlay.is_object()) throw std::invalid_argument("config " + (path.empty() ? std::string("root") : path) + " must be an object");
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        const std::string key_path = path.empty() ? it.key() : path + "." + it.key();
        if (!base.contains(it.key())) throw std::invalid_argument("unknown config key: " + key_path);
        json& target = base[it.key()];
        if (target.is_object()) {
            merge_strict(target, it.value(), key_path);
        } else {
            target = it.value();
        }
    }
}

void apply_env_overrides(json& doc)
{
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        std::string name = "MMLAB_";
        for (char c : it.key()) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        const char* raw = std::getenv(name.c_str());
        if (!raw) continue;
        json value;
        try {
            value = json::parse(raw);
        } catch (const json::parse_error&) {
            value = std::string(raw);
        }
        if (it.value().is_object()) {
            merge_strict(it.value(), value, it.key());
        } else {
            it.value() = value;
        }
    }
}

namespace {

template <class T>
T get(const json& j, const char* key, const std::string& where)
{
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument("config " + where + "." + key + ": " + e.what());
    }
}

}  // namespace

ExperimentConfig config_from_json(const json& doc)
{
    ExperimentConfig c;
    c.seed = get<std::uint64_t>(doc, "seed", "");
    c.out_dir = get<std::string>(doc, "out_dir", "");
    c.scale = parse_scale(get<std::string>(doc, "scale", ""));
    c.steps = get<int>(doc, "steps", "");
    c.sessions = get<int>(doc, "sessions", "");
    c.test_sessions = get<int>(doc, "test_sessions", "");

    const json& mk = doc.at("market");
    const json& pop = mk.at("population");
    c.market.population = {get<int>(pop, "noise", "market.population"), get<int>(pop, "value", "market.population"),
                           get<int>(pop, "momentum", "market.population"), get<int>(pop, "pov", "market.population"),
                           get<double>(pop, "multiplier", "market.population")};
    c.market.noise = {get<market::Qty>(mk.at("noise"), "order_size", "market.noise"),
                      get<double>(mk.at("noise"), "arrival_prob", "market.noise")};
    const json& val = mk.at("value");
    const json& fund = val.at("fundamental");
    c.market.value.fundamental = {get<double>(fund, "mean", "market.value.fundamental"),
                                  get<double>(fund, "kappa", "market.value.fundamental"),
                                  get<double>(fund, "sigma", "market.value.fundamental")};
    c.market.value.entry_threshold = get<market::Ticks>(val, "entry_threshold", "market.value");
    c.market.value.order_size = get<market::Qty>(val, "order_size", "market.value");
    c.market.value.wake_prob = get<double>(val, "wake_prob", "market.value");
    const json& mom = mk.at("momentum");
    c.market.momentum = {get<int>(mom, "fast_window", "market.momentum"), get<int>(mom, "slow_window", "market.momentum"),
                         get<market::Qty>(mom, "order_size", "market.momentum")};
    const json& pov = mk.at("pov");
    c.market.pov = {get<double>(pov, "pov_fraction", "market.pov"), get<int>(pov, "lookback", "market.pov"),
                    get<int>(pov, "wake_interval", "market.pov"), get<int>(pov, "ladder_levels", "market.pov"),
                    get<market::Ticks>(pov, "level_spacing", "market.pov")};
    c.market.opening_price = get<market::Ticks>(mk, "opening_price", "market");
    c.market.initial_spread = get<market::Ticks>(mk, "initial_spread", "market");

    const json& inv = doc.at("investors");
    c.investors = {get<int>(inv, "count", "investors"), get<market::Qty>(inv, "order_size", "investors"),
                   get<double>(inv, "arrival_prob", "investors")};

    const json& lu = doc.at("lineup");
    c.lineup = {get<int>(lu, "dqn", "lineup"), get<int>(lu, "morl", "lineup"), get<int>(lu, "random", "lineup"),
                get<int>(lu, "persistent", "lineup")};

    const json& rw = doc.at("reward");
    c.reward.kind = rewards::parse_reward_kind(get<std::string>(rw, "kind", "reward"));
    c.reward.rim = {get<double>(rw, "aiif", "reward"), get<double>(rw, "ditf", "reward"), get<std::size_t>(rw, "window", "reward")};
    c.reward.full_inv_lambda = get<double>(rw, "full_inv_lambda", "reward");
    c.reward.asym_eta = get<double>(rw, "asym_eta", "reward");
    c.reward.rew_w = get<double>(rw, "rew_w", "reward");
    c.reward.alpha = get<double>(rw, "alpha", "reward");

    const json& st = doc.at("state");
    c.state.variant = policy::parse_state_variant(get<std::string>(st, "variant", "state"));
    c.state.ema_long_minutes = get<int>(st, "ema_long_minutes", "state");
    c.state.ema_short_minutes = get<int>(st, "ema_short_minutes", "state");
    c.state.steps_per_minute = get<int>(st, "steps_per_minute", "state");

    const json& ln = doc.at("learner");
    auto& d = c.learner.dqn;
    d.gamma = get<double>(ln, "gamma", "learner");
    d.train_every = get<int>(ln, "train_every", "learner");
    d.batch_size = get<std::size_t>(ln, "batch_size", "learner");
    d.grad_steps = get<int>(ln, "grad_steps", "learner");
    d.fit_batch = get<std::size_t>(ln, "fit_batch", "learner");
    d.lr = get<double>(ln, "lr", "learner");
    d.loss = nn::parse_loss_kind(get<std::string>(ln, "loss", "learner"));
    d.buffer_capacity = get<std::size_t>(ln, "buffer_capacity", "learner");
    d.hidden = get<int>(ln, "hidden", "learner");
    d.hidden_layers = get<int>(ln, "hidden_layers", "learner");
    c.learner.eps_start = get<double>(ln, "eps_start", "learner");
    c.learner.eps_min = get<double>(ln, "eps_min", "learner");
    if (!ln.at("eps_sessions").is_null()) c.learner.eps_sessions = get<int>(ln, "eps_sessions", "learner");
    c.learner.morl_w = get<double>(ln, "morl_w", "learner");

    const json& out = doc.at("output");
    c.output.step_log = parse_step_log(get<std::string>(out, "step_log", "output"));
    c.output.event_log = get<bool>(out, "event_log", "output");
    c.output.checkpoints = get<std::vector<int>>(out, "checkpoints", "output");

    const json& sw = doc.at("sweep");
    c.sweep.aiif = get<std::vector<double>>(sw, "aiif", "sweep");
    c.sweep.morl_weights = get<std::vector<double>>(sw, "morl_weights", "sweep");
    c.sweep.seeds = get<int>(sw, "seeds", "sweep");

    const json& cx = doc.at("context");
    c.context.sequence = get<std::vector<int>>(cx, "sequence", "context");
    c.context.sessions_per_context = get<int>(cx, "sessions_per_context", "context");
    c.context.library = get<std::vector<int>>(cx, "library", "context");
    c.context.library_sessions = get<int>(cx, "library_sessions", "context");
    c.context.exploration_sessions = get<int>(cx, "exploration_sessions", "context");
    c.context.method = get<std::string>(cx, "method", "context");
    c.context.single_policy = get<int>(cx, "single_policy", "context");
    c.context.cl_lr = get<double>(cx, "cl_lr", "context");
    c.context.rehearsal_mix = get<double>(cx, "rehearsal_mix", "context");
    c.context.ewc_lambda = get<double>(cx, "ewc_lambda", "context");
    c.context.freeze_layers = get<std::vector<std::size_t>>(cx, "freeze_layers", "context");
    c.context.morl_w = get<double>(cx, "morl_w", "context");
    c.context.cl_eps = get<double>(cx, "cl_eps", "context");
    c.context.exploration = get<bool>(cx, "exploration", "context");
    c.context.state_variant = policy::parse_state_variant(get<std::string>(cx, "state_variant", "context"));

    const json& pw = doc.at("powdts");
    c.powdts = {get<double>(pw, "alpha_inc", "powdts"), get<double>(pw, "beta_inc", "powdts"), get<double>(pw, "gamma", "powdts"),
                get<int>(pw, "rounds_exp", "powdts"), get<int>(pw, "rounds_recal", "powdts"), get<int>(pw, "exp_ts", "powdts")};

    validate(c);
    return c;
}

json config_to_json(const ExperimentConfig& c)
{
    json doc = default_config_json(c.scale);
    doc["seed"] = c.seed;
    doc["out_dir"] = c.out_dir;
    doc["steps"] = c.steps;
    doc["sessions"] = c.sessions;
    doc["test_sessions"] = c.test_sessions;
    auto& mk = doc["market"];
    const auto& p = c.market.population;
    mk["population"] = {{"noise", p.noise}, {"value", p.value}, {"momentum", p.momentum}, {"pov", p.pov}, {"multiplier", p.multiplier}};
    mk["noise"] = {{"order_size", c.market.noise.order_size}, {"arrival_prob", c.market.noise.arrival_prob}};
    const auto& f = c.market.value.fundamental;
    mk["value"] = {{"fundamental", {{"mean", f.mean}, {"kappa", f.kappa}, {"sigma", f.sigma}}},
                   {"entry_threshold", c.market.value.entry_threshold},
                   {"order_size", c.market.value.order_size},
                   {"wake_prob", c.market.value.wake_prob}};
    mk["momentum"] = {{"fast_window", c.market.momentum.fast_window}, {"slow_window", c.market.momentum.slow_window},
                      {"order_size", c.market.momentum.order_size}};
    mk["pov"] = {{"pov_fraction", c.market.pov.pov_fraction}, {"lookback", c.market.pov.lookback},
                 {"wake_interval", c.market.pov.wake_interval}, {"ladder_levels", c.market.pov.ladder_levels},
                 {"level_spacing", c.market.pov.level_spacing}};
    mk["opening_price"] = c.market.opening_price;
    mk["initial_spread"] = c.market.initial_spread;
    doc["investors"] = {{"count", c.investors.count}, {"order_size", c.investors.order_size}, {"arrival_prob", c.investors.arrival_prob}};
    doc["lineup"] = {{"dqn", c.lineup.dqn}, {"morl", c.lineup.morl}, {"random", c.lineup.random}, {"persistent", c.lineup.persistent}};
    doc["reward"] = {{"kind", rewards::to_string(c.reward.kind)}, {"aiif", c.reward.rim.aiif}, {"ditf", c.reward.rim.ditf},
                     {"window", c.reward.rim.window}, {"full_inv_lambda", c.reward.full_inv_lambda},
                     {"asym_eta", c.reward.asym_eta}, {"rew_w", c.reward.rew_w}, {"alpha", c.reward.alpha}};
    doc["state"] = {{"variant", policy::to_string(c.state.variant)}, {"ema_long_minutes", c.state.ema_long_minutes},
                    {"ema_short_minutes", c.state.ema_short_minutes}, {"steps_per_minute", c.state.steps_per_minute}};
    const auto& d = c.learner.dqn;
    doc["learner"] = {{"gamma", d.gamma}, {"train_every", d.train_every}, {"batch_size", d.batch_size},
                      {"grad_steps", d.grad_steps}, {"fit_batch", d.fit_batch}, {"lr", d.lr}, {"loss", nn::to_string(d.loss)},
                      {"buffer_capacity", d.buffer_capacity}, {"hidden", d.hidden}, {"hidden_layers", d.hidden_layers},
                      {"eps_start", c.learner.eps_start}, {"eps_min", c.learner.eps_min},
                      {"eps_sessions", c.learner.eps_sessions ? json(*c.learner.eps_sessions) : json(nullptr)},
                      {"morl_w", c.learner.morl_w}};
    doc["output"] = {{"step_log", step_log_name(c.output.step_log)}, {"event_log", c.output.event_log}, {"checkpoints", c.output.checkpoints}};
    doc["sweep"] = {{"aiif", c.sweep.aiif}, {"morl_weights", c.sweep.morl_weights}, {"seeds", c.sweep.seeds}};
    const auto& x = c.context;
    doc["context"] = {{"sequence", x.sequence}, {"sessions_per_context", x.sessions_per_context}, {"library", x.library},
                      {"library_sessions", x.library_sessions}, {"exploration_sessions", x.exploration_sessions},
                      {"method", x.method}, {"single_policy", x.single_policy}, {"cl_lr", x.cl_lr},
                      {"rehearsal_mix", x.rehearsal_mix}, {"ewc_lambda", x.ewc_lambda}, {"freeze_layers", x.freeze_layers},
                      {"morl_w", x.morl_w}, {"cl_eps", x.cl_eps}, {"exploration", x.exploration},
                      {"state_variant", policy::to_string(x.state_variant)}};
    doc["powdts"] = {{"alpha_inc", c.powdts.alpha_inc}, {"beta_inc", c.powdts.beta_inc}, {"gamma", c.powdts.gamma},
                     {"rounds_exp", c.powdts.rounds_exp}, {"rounds_recal", c.powdts.rounds_recal}, {"exp_ts", c.powdts.exp_ts}};
    return doc;
}

void validate(const ExperimentConfig& c)
{
    if (c.steps <= 0) throw std::invalid_argument("steps must be positive");
    if (c.sessions <= 0) throw std::invalid_argument("sessions must be positive");
    if (c.test_sessions <= 0) throw std::invalid_argument("test_sessions must be positive");
    agents::validate(c.market);
    dealer::validate(c.investors);
    const auto& l = c.lineup;
    if (l.dqn < 0 || l.morl < 0 || l.random < 0 || l.persistent < 0) throw std::invalid_argument("lineup counts must be >= 0");
    if (l.dqn + l.morl + l.random + l.persistent == 0) throw std::invalid_argument("lineup is empty");
    rewards::validate(c.reward);
    rl::validate(c.learner.dqn);
    if (c.learner.eps_sessions && *c.learner.eps_sessions < 1) throw std::invalid_argument("learner.eps_sessions must be >= 1");
    if (c.learner.morl_w < 0.0 || c.learner.morl_w > 1.0) throw std::invalid_argument("learner.morl_w must be in [0, 1]");
    (void)c.ema_preset();
    if (c.sweep.seeds <= 0) throw std::invalid_argument("sweep.seeds must be positive");
    for (int k : c.context.sequence)
        if (k < 0) throw std::invalid_argument("context.sequence counts must be >= 0");
    if (c.context.sessions_per_context <= 0) throw std::invalid_argument("context.sessions_per_context must be positive");
    if (c.context.library.empty()) throw std::invalid_argument("context.library must not be empty");
    if (c.context.rehearsal_mix < 0.0 || c.context.rehearsal_mix > 1.0) throw std::invalid_argument("context.rehearsal_mix must be in [0, 1]");
    if (c.context.morl_w < 0.0 || c.context.morl_w > 1.0) throw std::invalid_argument("context.morl_w must be in [0, 1]");
    powdts::validate(c.powdts);
}

policy::EmaPreset ExperimentConfig::ema_preset() const
{
    return policy::ema_preset(state.ema_long_minutes, state.ema_short_minutes, state.steps_per_minute);
}

ExperimentConfig load_config(const ConfigOverrides& o)
{
    json file = json::object();
    if (o.path) {
        std::ifstream is(*o.path);
        if (!is) throw std::runtime_error("cannot open config " + *o.path);
        try {
            file = json::parse(is);
        } catch (const json::parse_error& e) {
            throw std::runtime_error("config " + *o.path + ": " + e.what());
        }
    }
    Scale scale = Scale::Desk;
    if (file.contains("scale")) scale = parse_scale(file.at("scale").get<std::string>());
    if (const char* env = std::getenv("MMLAB_SCALE")) scale = parse_scale(env);
    if (o.scale) scale = *o.scale;

    json doc = default_config_json(scale);
    merge_strict(doc, file);
    apply_env_overrides(doc);
    doc["scale"] = to_string(scale);
    if (o.seed) doc["seed"] = *o.seed;
    if (o.out_dir) doc["out_dir"] = *o.out_dir;
    return config_from_json(doc);
}

}  // namespace mmlab::harness
