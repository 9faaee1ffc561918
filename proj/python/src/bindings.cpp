#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "mmlab/harness/config.hpp"
#include "mmlab/harness/experiments.hpp"
#include "mmlab/market/order_book.hpp"
#include "mmlab/metrics/pareto.hpp"
#include "mmlab/nn/network.hpp"
#include "mmlab/policy/actions.hpp"
#include "mmlab/powdts/powdts.hpp"
#include "mmlab/rewards/rewards.hpp"

namespace py = pybind11;
using namespace mmlab;
using nlohmann::json;

namespace {

// JSON crosses the boundary as text; the Python package decodes it.
harness::ExperimentConfig config_from_text(const std::string& text, const std::string& scale)
{
    auto doc = harness::default_config_json(harness::parse_scale(scale));
    if (!text.empty()) harness::merge_strict(doc, json::parse(text));
    return harness::config_from_json(doc);
}

std::vector<metrics::ObjectivePoint> to_points(const std::vector<std::pair<double, double>>& xs)
{
    std::vector<metrics::ObjectivePoint> out;
    for (const auto& [m, i] : xs) out.push_back({m, i, ""});
    return out;
}

}  // namespace

PYBIND11_MODULE(_mmlab, m)
{
    m.doc() = "Market-making simulation and learning toolkit";

    py::enum_<market::Side>(m, "Side").value("Buy", market::Side::Buy).value("Sell", market::Side::Sell);

    py::class_<market::Fill>(m, "Fill")
        .def_readonly("maker_order_id", &market::Fill::maker_order_id)
        .def_readonly("maker_agent_id", &market::Fill::maker_agent_id)
        .def_readonly("taker_agent_id", &market::Fill::taker_agent_id)
        .def_readonly("qty", &market::Fill::qty)
        .def_readonly("price", &market::Fill::price)
        .def_readonly("step", &market::Fill::step);

    py::class_<market::OrderBook>(m, "OrderBook")
        .def(py::init<market::Ticks>(), py::arg("opening_price") = market::kOpeningPrice)
        .def(
            "submit_limit_order",
            [](market::OrderBook& b, market::OrderId id, market::AgentId agent, market::Side side, market::Qty qty,
               market::Ticks price, std::int64_t step) {
                const auto r = b.submit_limit_order(market::Order{id, agent, side, qty, price, step});
                if (r.status == market::SubmitStatus::DuplicateId) throw py::value_error("duplicate order id");
                return py::make_tuple(r.fills, r.resting_qty);
            },
            py::arg("order_id"), py::arg("agent_id"), py::arg("side"), py::arg("qty"), py::arg("price"), py::arg("step") = 0)
        .def(
            "submit_market_order",
            [](market::OrderBook& b, market::AgentId agent, market::Side side, market::Qty qty, std::int64_t step) {
                const auto r = b.submit_market_order(agent, side, qty, step);
                return py::make_tuple(r.fills, r.unfilled_qty);
            },
            py::arg("agent_id"), py::arg("side"), py::arg("qty"), py::arg("step") = 0)
        .def("cancel_order", &market::OrderBook::cancel_order)
        .def("best_quotes",
             [](const market::OrderBook& b) {
                 const auto q = b.best_quotes();
                 return py::make_tuple(q.best_bid, q.best_ask, q.mid);
             })
        .def("last_trade_price", &market::OrderBook::last_trade_price)
        .def("order_count", &market::OrderBook::order_count)
        .def("depth", &market::OrderBook::depth);

    m.def("action_to_etas", [](int a) {
        const auto e = policy::action_to_etas(a);
        return py::make_tuple(e.eta_buy, e.eta_sell, e.eta_hedge);
    });
    m.def("etas_to_action", [](double b, double s, double h) { return policy::etas_to_action({b, s, h}); });
    m.attr("ACTION_COUNT") = policy::kActionCount;

    m.def("reward_single", [](double e, double pnl, double hc) { return rewards::reward_single({e, pnl, hc}); });
    m.def("rim_penalty", &rewards::rim_penalty, py::arg("r_mtm"), py::arg("mean_abs_inv"), py::arg("mean_thr"), py::arg("aiif"));

    m.def("forward", [](const std::vector<int>& layers, const std::vector<double>& values, const std::vector<double>& x) {
        const nn::ParamSet p{nn::NetSpec{layers}, values};
        if (p.values.size() != p.spec.param_count()) throw py::value_error("parameter count does not match layers");
        return nn::forward(p, x);
    });

    m.def("dominates", [](std::pair<double, double> p, std::pair<double, double> q) {
        return metrics::dominates({p.first, p.second, ""}, {q.first, q.second, ""});
    });
    m.def("pareto_mask", [](const std::vector<std::pair<double, double>>& pts) { return metrics::pareto_filter(to_points(pts)).undominated; });
    m.def(
        "hypervolume_2d",
        [](const std::vector<std::pair<double, double>>& pts, std::pair<double, double> ref) {
            return metrics::hypervolume_2d(to_points(pts), {ref.first, ref.second, ""});
        },
        py::arg("points"), py::arg("reference") = std::make_pair(0.0, 0.0));
    m.def("sparsity", [](const std::vector<std::pair<double, double>>& pts) { return metrics::sparsity(to_points(pts)); });

    m.def("weights_from_coefs", [](const std::vector<std::pair<double, double>>& c) {
        powdts::BetaCoefs coefs;
        for (const auto& [a, b] : c) coefs.push_back({a, b});
        return powdts::weights_from_coefs(coefs);
    });
    m.def("sections_from_weights", [](const std::vector<double>& w, std::int64_t exp_ts) {
        std::vector<std::pair<std::int64_t, std::int64_t>> out;
        for (const auto& s : powdts::sections_from_weights(w, exp_ts)) out.emplace_back(s.start, s.end);
        return out;
    });
    m.def(
        "powdts_weights",
        [](std::size_t n, std::uint64_t seed, std::int64_t steps, const std::function<double(int, std::int64_t)>& reward,
           double gamma) {
            powdts::PowDtsCfg cfg;
            cfg.gamma = gamma;
            std::vector<std::vector<double>> out;
            for (const auto& r : powdts::powdts_run(n, cfg, seed, steps, reward)) out.push_back(r.weights);
            return out;
        },
        py::arg("n_policies"), py::arg("seed"), py::arg("steps"), py::arg("reward"), py::arg("gamma") = 0.4,
        "Weights after each recalibration of a POW-dTS run against reward(policy, step).");

    m.def(
        "default_config_json", [](const std::string& scale) { return harness::default_config_json(harness::parse_scale(scale)).dump(); },
        py::arg("scale") = "desk");
    m.def(
        "train_json",
        [](const std::string& overrides, const std::string& scale) {
            const auto cfg = config_from_text(overrides, scale);
            py::gil_scoped_release release;
            harness::RunWriter w(cfg.out_dir, cfg.output.step_log == harness::StepLog::Auto ? harness::StepLog::None : cfg.output.step_log,
                                 cfg.output.event_log);
            const auto res = harness::run_training(cfg, w);
            w.write_json("summary.json", {{"config", harness::config_to_json(cfg)}, {"train", res.summary}});
            return res.summary.dump();
        },
        py::arg("overrides") = "", py::arg("scale") = "desk");
    m.def("spearman", &harness::spearman);
}
