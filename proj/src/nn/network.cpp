#include "mmlab/nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mmlab::nn {

std::size_t NetSpec::param_count() const
{
    std::size_t n = 0;
    for (std::size_t l = 0; l < layer_count(); ++l)
        n += static_cast<std::size_t>(layers[l + 1]) * (static_cast<std::size_t>(layers[l]) + 1);
    return n;
}

std::size_t NetSpec::weight_offset(std::size_t l) const
{
    std::size_t off = 0;
    for (std::size_t k = 0; k < l; ++k)
        off += static_cast<std::size_t>(layers[k + 1]) * (static_cast<std::size_t>(layers[k]) + 1);
    return off;
}

std::size_t NetSpec::bias_offset(std::size_t l) const
{
    return weight_offset(l) + static_cast<std::size_t>(layers[l + 1]) * static_cast<std::size_t>(layers[l]);
}

NetSpec mm_net_spec(int input_arity, int output_arity, int hidden, int hidden_layers)
{
    NetSpec s;
    s.layers.push_back(input_arity);
    for (int i = 0; i < hidden_layers; ++i) s.layers.push_back(hidden);
    s.layers.push_back(output_arity);
    validate(s);
    return s;
}

void validate(const NetSpec& spec)
{
    if (spec.layers.size() < 3) throw std::invalid_argument("NetSpec needs at least one hidden layer");
    for (int w : spec.layers)
        if (w <= 0) throw std::invalid_argument("NetSpec layer widths must be positive");
}

std::string describe(const NetSpec& spec)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) os << (i ? "-" : "") << spec.layers[i];
    return os.str();
}

std::string_view to_string(LossKind k) { return k == LossKind::MAE ? "mae" : "mse"; }

LossKind parse_loss_kind(std::string_view s)
{
    if (s == "mae") return LossKind::MAE;
    if (s == "mse") return LossKind::MSE;
    throw std::invalid_argument("unknown loss kind: " + std::string(s));
}

ParamSet init_params(const NetSpec& spec, Stream& stream)
{
    validate(spec);
    ParamSet p{spec, std::vector<double>(spec.param_count(), 0.0)};
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        const int fan_in = spec.layers[l];
        const double sd = std::sqrt(2.0 / fan_in);
        const std::size_t w0 = spec.weight_offset(l);
        const std::size_t nw = static_cast<std::size_t>(spec.layers[l + 1]) * static_cast<std::size_t>(fan_in);
        for (std::size_t i = 0; i < nw; ++i) p.values[w0 + i] = sd * standard_normal(stream);
    }
    return p;
}

namespace {

void check_input(const ParamSet& p, std::span<const double> x)
{
    if (p.values.size() != p.spec.param_count()) throw std::invalid_argument("ParamSet length does not match its spec");
    if (x.size() != static_cast<std::size_t>(p.spec.input_arity()))
        throw std::invalid_argument("input arity " + std::to_string(x.size()) + " does not match net input " +
                                    std::to_string(p.spec.input_arity()));
}

// Dense layer: out = W in + b, optional ReLU. Returns pre-activations in `z` if given.
void dense(const ParamSet& p, std::size_t l, const double* in, double* out, double* z, bool relu)
{
    const auto& s = p.spec;
    const int n_in = s.layers[l];
    const int n_out = s.layers[l + 1];
    const double* W = p.values.data() + s.weight_offset(l);
    const double* b = p.values.data() + s.bias_offset(l);
    for (int o = 0; o < n_out; ++o) {
        const double* row = W + static_cast<std::size_t>(o) * static_cast<std::size_t>(n_in);
        double acc = b[o];
        for (int i = 0; i < n_in; ++i) acc += row[i] * in[i];
        if (z) z[o] = acc;
        out[o] = relu ? (acc > 0.0 ? acc : 0.0) : acc;
    }
}

// Runs the hidden stack, keeping each layer's activation (acts[0] = input).
void hidden_pass(const ParamSet& p, std::span<const double> x, std::vector<std::vector<double>>& acts)
{
    const auto& s = p.spec;
    const std::size_t hidden = s.layer_count() - 1;
    acts.resize(hidden + 1);
    acts[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l < hidden; ++l) {
        acts[l + 1].resize(static_cast<std::size_t>(s.layers[l + 1]));
        dense(p, l, acts[l].data(), acts[l + 1].data(), nullptr, true);
    }
}

}  // namespace

std::vector<double> forward(const ParamSet& params, std::span<const double> x)
{
    check_input(params, x);
    std::vector<std::vector<double>> acts;
    hidden_pass(params, x, acts);
    std::vector<double> out(static_cast<std::size_t>(params.spec.output_arity()));
    dense(params, params.spec.layer_count() - 1, acts.back().data(), out.data(), nullptr, false);
    return out;
}

double forward_unit(const ParamSet& params, std::span<const double> x, int unit)
{
    check_input(params, x);
    const auto& s = params.spec;
    if (unit < 0 || unit >= s.output_arity()) throw std::out_of_range("forward_unit: unit out of range");
    std::vector<std::vector<double>> acts;
    hidden_pass(params, x, acts);
    const std::size_t L = s.layer_count() - 1;
    const int n_in = s.layers[L];
    const double* row = params.values.data() + s.weight_offset(L) + static_cast<std::size_t>(unit) * n_in;
    double acc = params.values[s.bias_offset(L) + static_cast<std::size_t>(unit)];
    for (int i = 0; i < n_in; ++i) acc += row[i] * acts.back()[static_cast<std::size_t>(i)];
    return acc;
}

LossAndGrad loss_and_grad(const ParamSet& params, std::span<const Sample> batch, LossKind loss)
{
    if (batch.empty()) throw std::invalid_argument("loss_and_grad: empty batch");
    const auto& s = params.spec;
    const std::size_t L = s.layer_count();
    LossAndGrad out;
    out.grad.assign(params.values.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(batch.size());

    std::vector<std::vector<double>> acts;
    std::vector<double> delta, prev_delta;
    for (const auto& sample : batch) {
        check_input(params, sample.x);
        if (sample.action < 0 || sample.action >= s.output_arity()) throw std::out_of_range("sample action out of range");
        hidden_pass(params, sample.x, acts);

        const int n_last = s.layers[L - 1];
        const std::size_t a = static_cast<std::size_t>(sample.action);
        const double* row = params.values.data() + s.weight_offset(L - 1) + a * static_cast<std::size_t>(n_last);
        double q = params.values[s.bias_offset(L - 1) + a];
        for (int i = 0; i < n_last; ++i) q += row[i] * acts.back()[static_cast<std::size_t>(i)];

        const double r = q - sample.target;
        double g = 0.0;
        if (loss == LossKind::MAE) {
            out.loss += std::abs(r) * inv_n;
            g = (r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0)) * inv_n;
        } else {
            out.loss += r * r * inv_n;
            g = 2.0 * r * inv_n;
        }
        if (g == 0.0) continue;

        // head: only the selected row receives gradient
        double* gW = out.grad.data() + s.weight_offset(L - 1) + a * static_cast<std::size_t>(n_last);
        for (int i = 0; i < n_last; ++i) gW[i] += g * acts.back()[static_cast<std::size_t>(i)];
        out.grad[s.bias_offset(L - 1) + a] += g;
        delta.assign(static_cast<std::size_t>(n_last), 0.0);
        for (int i = 0; i < n_last; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            delta[iu] = acts.back()[iu] > 0.0 ? g * row[i] : 0.0;
        }

        for (std::size_t l = L - 1; l-- > 0;) {
            const int n_in = s.layers[l];
            const int n_out = s.layers[l + 1];
            const double* W = params.values.data() + s.weight_offset(l);
            double* GW = out.grad.data() + s.weight_offset(l);
            double* Gb = out.grad.data() + s.bias_offset(l);
            const auto& in = acts[l];
            if (l > 0) prev_delta.assign(static_cast<std::size_t>(n_in), 0.0);
            for (int o = 0; o < n_out; ++o) {
                const double d = delta[static_cast<std::size_t>(o)];
                if (d == 0.0) continue;
                const std::size_t ro = static_cast<std::size_t>(o) * static_cast<std::size_t>(n_in);
                for (int i = 0; i < n_in; ++i) GW[ro + static_cast<std::size_t>(i)] += d * in[static_cast<std::size_t>(i)];
                Gb[o] += d;
                if (l > 0)
                    for (int i = 0; i < n_in; ++i) prev_delta[static_cast<std::size_t>(i)] += d * W[ro + static_cast<std::size_t>(i)];
            }
            if (l > 0) {
                for (int i = 0; i < n_in; ++i) {
                    const auto iu = static_cast<std::size_t>(i);
                    if (!(acts[l][iu] > 0.0)) prev_delta[iu] = 0.0;
                }
                delta.swap(prev_delta);
            }
        }
    }
    return out;
}

}  // namespace mmlab::nn
