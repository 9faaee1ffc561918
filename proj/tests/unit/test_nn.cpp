#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "mmlab/core/rng.hpp"
#include "mmlab/nn/network.hpp"
#include "mmlab/nn/optim.hpp"
#include "mmlab/nn/serialize.hpp"

using namespace mmlab;
using namespace mmlab::nn;

namespace {

struct Data {
    std::vector<std::vector<double>> xs;
    std::vector<Sample> batch;
};

Data make_data(Stream& s, int in, int out, int n)
{
    Data d;
    d.xs.resize(static_cast<std::size_t>(n));
    for (auto& x : d.xs) {
        x.resize(static_cast<std::size_t>(in));
        for (auto& v : x) v = standard_normal(s);
    }
    for (int i = 0; i < n; ++i)
        d.batch.push_back(Sample{d.xs[static_cast<std::size_t>(i)], static_cast<int>(uniform_index(s, out)), 3.0 * standard_normal(s)});
    return d;
}

// Loss recomputed from forward() only.
double oracle_loss(const ParamSet& p, std::span<const Sample> batch, LossKind loss)
{
    double sum = 0.0;
    for (const auto& smp : batch) {
        const double r = forward(p, smp.x)[static_cast<std::size_t>(smp.action)] - smp.target;
        sum += loss == LossKind::MSE ? r * r : std::abs(r);
    }
    return sum / static_cast<double>(batch.size());
}

double max_rel_fd_error(ParamSet p, std::span<const Sample> batch, LossKind loss)
{
    const auto g = grad(p, batch, loss);
    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        const double orig = p.values[i];
        p.values[i] = orig + h;
        const double up = oracle_loss(p, batch, loss);
        p.values[i] = orig - h;
        const double dn = oracle_loss(p, batch, loss);
        p.values[i] = orig;
        const double fd = (up - dn) / (2 * h);
        const double err = std::abs(fd - g[i]) / std::max(1.0, std::abs(fd) + std::abs(g[i]));
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace

TEST_CASE("net spec layout")
{
    const auto spec = mm_net_spec(8);
    CHECK(spec.layers == std::vector<int>{8, 32, 32, 32, 605});
    CHECK(spec.param_count() == 8 * 32 + 32 + 2 * (32 * 32 + 32) + 32 * 605 + 605);
    CHECK(spec.weight_offset(0) == 0);
    CHECK(spec.bias_offset(0) == 8 * 32);
    CHECK_THROWS(validate(NetSpec{{4, 2}}));
}

TEST_CASE("init is deterministic, He scaled, zero bias")
{
    const NetSpec spec{{200, 300, 2}};
    Stream a(1), b(1);
    const auto pa = init_params(spec, a);
    const auto pb = init_params(spec, b);
    CHECK(pa.values == pb.values);
    for (int j = 0; j < 300; ++j) CHECK(pa.values[spec.bias_offset(0) + static_cast<std::size_t>(j)] == 0.0);
    double ss = 0.0;
    const std::size_t n = 200 * 300;
    for (std::size_t i = 0; i < n; ++i) ss += pa.values[i] * pa.values[i];
    CHECK(ss / n == doctest::Approx(2.0 / 200).epsilon(0.03));
}

TEST_CASE("forward on hand-built nets")
{
    // 1 -> 1 -> 1: relu(2x - 1) * 3 + 0.5
    ParamSet p{NetSpec{{1, 1, 1}}, {2.0, -1.0, 3.0, 0.5}};
    const double x1[] = {2.0};
    CHECK(forward(p, x1)[0] == doctest::Approx(3.0 * 3.0 + 0.5));
    const double x2[] = {0.25};
    CHECK(forward(p, x2)[0] == doctest::Approx(0.5));

    // 2 -> 2 -> 1 with weights [[1, -1], [0.5, 0.5]], biases [0, 1], head [2, -1], bias 0
    ParamSet q{NetSpec{{2, 2, 1}}, {1.0, -1.0, 0.5, 0.5, 0.0, 1.0, 2.0, -1.0, 0.0}};
    const double x3[] = {3.0, 1.0};
    // hidden = relu([2, 3]) = [2, 3]; out = 4 - 3 = 1
    CHECK(forward(q, x3)[0] == doctest::Approx(1.0));
    CHECK(forward_unit(q, x3, 0) == doctest::Approx(1.0));

    ParamSet z{mm_net_spec(8), std::vector<double>(mm_net_spec(8).param_count(), 0.0)};
    const std::vector<double> x(8, 1.5);
    const auto out = forward(z, x);
    CHECK(out.size() == 605);
    CHECK(std::all_of(out.begin(), out.end(), [](double v) { return v == 0.0; }));
    const std::vector<double> bad(7, 0.0);
    CHECK_THROWS(forward(z, bad));
}

TEST_CASE("gradients match finite differences")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Stream s(seed);
        const NetSpec spec{{8, 16, 4}};
        const auto p = init_params(spec, s);
        const auto d = make_data(s, 8, 4, 16);
        CHECK(max_rel_fd_error(p, d.batch, LossKind::MSE) < 1e-4);
        // targets sit several units away from the outputs, so MAE has no kink within h
        CHECK(max_rel_fd_error(p, d.batch, LossKind::MAE) < 1e-4);
    }
    Stream s(9);
    const auto p = init_params(NetSpec{{8, 16, 16, 16, 5}}, s);
    const auto d = make_data(s, 8, 5, 10);
    CHECK(max_rel_fd_error(p, d.batch, LossKind::MSE) < 1e-4);
}

TEST_CASE("zero residual and MAE sign property")
{
    Stream s(3);
    const auto p = init_params(NetSpec{{4, 6, 3}}, s);
    std::vector<double> x{0.3, -1.0, 2.0, 0.1};
    const double y = forward(p, x)[1];
    std::vector<Sample> b{{x, 1, y}};
    for (auto kind : {LossKind::MSE, LossKind::MAE}) {
        const auto g = grad(p, b, kind);
        CHECK(std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; }));
    }
    std::vector<Sample> near{{x, 1, y - 1.0}}, far{{x, 1, y - 100.0}};
    CHECK(grad(p, near, LossKind::MAE) == grad(p, far, LossKind::MAE));
}

TEST_CASE("adam closed form at t = 1")
{
    ParamSet p{NetSpec{{1, 1, 1}}, {0.0, 0.0, 0.0, 0.0}};
    AdamState st(4, 0.01);
    const std::vector<double> g{0.5, -2.0, 0.0, 1e-3};
    adam_step(p, g, st, nullptr);
    CHECK(st.t == 1);
    for (std::size_t i = 0; i < 4; ++i) {
        // m_hat = g, v_hat = g^2 at t = 1
        const double expect = g[i] == 0.0 ? 0.0 : -0.01 * g[i] / (std::sqrt(g[i] * g[i]) + 1e-8);
        CHECK(p.values[i] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("freezing keeps parameters bit-identical")
{
    Stream s(11);
    const NetSpec spec{{5, 8, 8, 3}};
    auto p = init_params(spec, s);
    const auto d = make_data(s, 5, 3, 32);
    const std::size_t layers[] = {0, 1};
    const auto mask = freeze_layers(spec, layers);
    const auto before = p.values;
    AdamState st(p.values.size(), 0.01);
    for (int k = 0; k < 50; ++k) adam_step(p, grad(p, d.batch, LossKind::MAE), st, &mask);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        if (mask[i])
            CHECK(std::memcmp(&p.values[i], &before[i], sizeof(double)) == 0);
        else
            changed += p.values[i] != before[i];
    }
    CHECK(changed > 0);

    const std::size_t all[] = {0, 1, 2};
    const auto full = freeze_layers(spec, all);
    const auto snap = p.values;
    adam_step(p, grad(p, d.batch, LossKind::MSE), st, &full);
    CHECK(p.values == snap);
    const std::vector<double> zeros(p.values.size(), 0.0);
    AdamState fresh(p.values.size(), 0.01);
    adam_step(p, zeros, fresh, nullptr);
    CHECK(p.values == snap);
}

TEST_CASE("fisher diagonal")
{
    Stream s(5);
    const auto p = init_params(NetSpec{{3, 4, 2}}, s);
    const auto d = make_data(s, 3, 2, 12);
    const auto f = estimate_fisher_diag(p, d.batch, LossKind::MSE);
    CHECK(f.anchor == p.values);
    CHECK(std::all_of(f.fisher.begin(), f.fisher.end(), [](double v) { return v >= 0.0; }));

    // oracle: mean of squared single-sample gradients
    std::vector<double> expect(p.values.size(), 0.0);
    for (const auto& smp : d.batch) {
        const auto g = grad(p, std::span<const Sample>(&smp, 1), LossKind::MSE);
        for (std::size_t i = 0; i < g.size(); ++i) expect[i] += g[i] * g[i] / d.batch.size();
    }
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(f.fisher[i] == doctest::Approx(expect[i]).epsilon(1e-10));

    auto doubled = d.batch;
    doubled.insert(doubled.end(), d.batch.begin(), d.batch.end());
    const auto f2 = estimate_fisher_diag(p, doubled, LossKind::MSE);
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(f2.fisher[i] == doctest::Approx(f.fisher[i]).epsilon(1e-12));

    std::vector<Sample> exact;
    for (const auto& smp : d.batch) exact.push_back(Sample{smp.x, smp.action, forward(p, smp.x)[static_cast<std::size_t>(smp.action)]});
    const auto f0 = estimate_fisher_diag(p, exact, LossKind::MAE);
    CHECK(std::all_of(f0.fisher.begin(), f0.fisher.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("EWC penalty")
{
    const double th[] = {4.0}, anc[] = {1.0}, fi[] = {2.0};
    const auto t = ewc_penalty_and_grad(th, anc, fi, 1.0);
    CHECK(t.penalty == 9.0);
    CHECK(t.grad[0] == 6.0);
    CHECK(ewc_penalty_and_grad(anc, anc, fi, 1.0).penalty == 0.0);
    const auto z = ewc_penalty_and_grad(th, anc, fi, 0.0);
    CHECK(z.penalty == 0.0);
    CHECK(z.grad[0] == 0.0);

    Stream s(2);
    std::vector<double> p(20), a(20), f(20);
    for (std::size_t i = 0; i < 20; ++i) {
        p[i] = standard_normal(s);
        a[i] = standard_normal(s);
        f[i] = uniform01(s);
    }
    const auto e = ewc_penalty_and_grad(p, a, f, 0.7);
    const double h = 1e-6;
    for (std::size_t i = 0; i < 20; ++i) {
        auto up = p, dn = p;
        up[i] += h;
        dn[i] -= h;
        const double fd = (ewc_penalty_and_grad(up, a, f, 0.7).penalty - ewc_penalty_and_grad(dn, a, f, 0.7).penalty) / (2 * h);
        CHECK(std::abs(fd - e.grad[i]) < 1e-6);
    }
}

TEST_CASE("parameter file roundtrip and faults")
{
    Stream s(8);
    const auto spec = mm_net_spec(10);
    const auto p = init_params(spec, s);
    const auto dir = std::filesystem::temp_directory_path() / "mmlab_nn_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "p.txt").string();
    save_params(path, p);
    const auto q = load_params(path, spec);
    CHECK(q.spec == spec);
    CHECK(q.values == p.values);
    const std::vector<double> x(10, 0.2);
    CHECK(forward(q, x) == forward(p, x));

    CHECK_THROWS_AS(load_params(path, mm_net_spec(8)), std::runtime_error);

    std::stringstream ss;
    write_params(ss, p);
    auto text = ss.str();
    text[0] = 'x';
    std::istringstream bad(text);
    CHECK_THROWS_AS(read_params(bad), std::runtime_error);

    std::ostringstream trunc_os;
    write_params(trunc_os, p);
    std::istringstream trunc(trunc_os.str().substr(0, trunc_os.str().size() / 2));
    CHECK_THROWS_AS(read_params(trunc), std::runtime_error);
    std::filesystem::remove_all(dir);
}
