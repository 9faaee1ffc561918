#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mmlab/harness/config.hpp"
#include "mmlab/harness/experiments.hpp"

namespace fs = std::filesystem;
using namespace mmlab;
using namespace mmlab::harness;
using nlohmann::json;

namespace {

struct Common {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    std::string scale;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--config", c.config, "JSON config file");
    sub->add_option("--seed", c.seed, "master seed");
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--scale", c.scale, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
}

ExperimentConfig load(const CLI::App* sub, const Common& c)
{
    ConfigOverrides o;
    if (!c.config.empty()) o.path = c.config;
    if (sub->count("--seed")) o.seed = c.seed;
    if (!c.out.empty()) o.out_dir = c.out;
    if (!c.scale.empty()) o.scale = parse_scale(c.scale);
    return load_config(o);
}

void write_json(const fs::path& p, const json& j)
{
    fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << j.dump(2) << '\n';
}

std::vector<std::string> expand_methods(const std::vector<std::string>& in)
{
    std::vector<std::string> out;
    for (const auto& m : in) {
        if (m == "all") {
            const auto all = all_method_names();
            out.insert(out.end(), all.begin(), all.end());
        } else {
            out.push_back(m);
        }
    }
    return out;
}

std::map<std::string, std::vector<metrics::ObjectivePoint>> read_points(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(is, line);
    if (line.rfind("label,tag,mtm_score,inv_score", 0) != 0)
        throw std::runtime_error(path + ": expected header label,tag,mtm_score,inv_score");
    std::map<std::string, std::vector<metrics::ObjectivePoint>> sets;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string label, tag, mtm, inv;
        std::getline(ss, label, ',');
        std::getline(ss, tag, ',');
        std::getline(ss, mtm, ',');
        std::getline(ss, inv, ',');
        sets[label].push_back(metrics::ObjectivePoint{std::stod(mtm), std::stod(inv), tag});
    }
    return sets;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Market-making simulation and learning toolkit"};
    app.require_subcommand(1);

    Common train_c, test_c, aiif_c, morl_c, bench_c, ctx_c, pow_c;

    auto* train = app.add_subcommand("train", "train the configured market-maker lineup");
    add_common(train, train_c);

    auto* test = app.add_subcommand("test", "evaluate saved policies greedily");
    add_common(test, test_c);
    std::vector<std::string> checkpoints;
    test->add_option("--checkpoint", checkpoints, "checkpoint prefix, e.g. runs/x/final/mm0")->required();

    auto* aiif = app.add_subcommand("sweep-aiif", "train and test one agent per AIIF value");
    add_common(aiif, aiif_c);

    auto* morl = app.add_subcommand("sweep-morl", "weight sweep of MORL, RE-W and RE-AIIF agents with front metrics");
    add_common(morl, morl_c);

    auto* bench = app.add_subcommand("benchmark-rewards", "compare reward functions under shared seeds");
    add_common(bench, bench_c);

    auto* ctx = app.add_subcommand("context-seq", "run methods over the competitor-count context sequence");
    add_common(ctx, ctx_c);
    std::vector<std::string> methods;
    ctx->add_option("--method", methods, "method name (repeatable); 'all' runs every method");

    auto* pow = app.add_subcommand("powdts", "POW-dTS over the context sequence with recalibration records");
    add_common(pow, pow_c);

    auto* met = app.add_subcommand("metrics", "front metrics for a points CSV");
    std::string points_path, metrics_out;
    double margin = 0.05;
    met->add_option("--points", points_path, "CSV with label,tag,mtm_score,inv_score")->required();
    met->add_option("--out", metrics_out, "output directory")->required();
    met->add_option("--margin", margin, "normalization margin");

    auto* rep = app.add_subcommand("report", "rolling averages and summaries for a run directory");
    std::string run_dir;
    int window = 50;
    rep->add_option("--run", run_dir, "run directory containing sessions.csv")->required();
    rep->add_option("--window", window, "rolling window in sessions");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) {
            const auto cfg = load(train, train_c);
            RunWriter w(cfg.out_dir, cfg.output.step_log == StepLog::Auto ? StepLog::All : cfg.output.step_log, cfg.output.event_log);
            const auto res = run_training(cfg, w);
            w.write_json("summary.json", {{"config", config_to_json(cfg)}, {"train", res.summary}});
            std::cout << res.summary.dump(2) << '\n';
        } else if (*test) {
            const auto cfg = load(test, test_c);
            std::vector<std::shared_ptr<const PolicySnapshot>> snaps;
            for (const auto& c : checkpoints) snaps.push_back(std::make_shared<const PolicySnapshot>(load_snapshot(c, cfg.state.variant)));
            RunWriter w(cfg.out_dir, cfg.output.step_log == StepLog::Auto ? StepLog::All : cfg.output.step_log, cfg.output.event_log);
            const auto res = run_test(cfg, snaps, w);
            w.write_json("summary.json", {{"config", config_to_json(cfg)}, {"test", res.summary}});
            std::cout << res.summary.dump(2) << '\n';
        } else if (*aiif) {
            const auto cfg = load(aiif, aiif_c);
            std::cout << run_aiif_sweep(cfg, cfg.out_dir).dump(2) << '\n';
        } else if (*morl) {
            const auto cfg = load(morl, morl_c);
            std::cout << run_morl_weight_sweep(cfg, cfg.out_dir).dump(2) << '\n';
        } else if (*bench) {
            const auto cfg = load(bench, bench_c);
            std::cout << run_reward_benchmark(cfg, cfg.out_dir).dump(2) << '\n';
        } else if (*ctx) {
            const auto cfg = load(ctx, ctx_c);
            const auto list = methods.empty() ? std::vector<std::string>{cfg.context.method} : expand_methods(methods);
            std::cout << run_context_experiment(cfg, list, cfg.out_dir).dump(2) << '\n';
        } else if (*pow) {
            const auto cfg = load(pow, pow_c);
            std::cout << run_context_experiment(cfg, {cfg.context.exploration ? "powdts-exp" : "powdts"}, cfg.out_dir).dump(2) << '\n';
        } else if (*met) {
            const auto j = compute_front_metrics(read_points(points_path), margin);
            write_json(fs::path(metrics_out) / "metrics.json", j);
            std::cout << j.dump(2) << '\n';
        } else if (*rep) {
            std::cout << emit_reports(run_dir, window).dump(2) << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
