#include "mmlab/nn/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace mmlab::nn {

FreezeMask no_freeze(const NetSpec& spec) { return FreezeMask(spec.param_count(), 0); }

FreezeMask freeze_layers(const NetSpec& spec, std::span<const std::size_t> layers)
{
    FreezeMask mask = no_freeze(spec);
    for (std::size_t l : layers) {
        if (l >= spec.layer_count()) throw std::out_of_range("freeze_layers: no such layer");
        const std::size_t begin = spec.weight_offset(l);
        const std::size_t end = spec.bias_offset(l) + static_cast<std::size_t>(spec.layers[l + 1]);
        for (std::size_t i = begin; i < end; ++i) mask[i] = 1;
    }
    return mask;
}

void adam_step(ParamSet& params, std::span<const double> grads, AdamState& state, const FreezeMask* mask)
{
    const std::size_t n = params.values.size();
    if (grads.size() != n || state.m.size() != n || state.v.size() != n) throw std::invalid_argument("adam_step: shape mismatch");
    if (mask && mask->size() != n) throw std::invalid_argument("adam_step: mask shape mismatch");
    ++state.t;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < n; ++i) {
        if (mask && (*mask)[i]) continue;
        const double g = grads[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        params.values[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

FisherDiag estimate_fisher_diag(const ParamSet& params, std::span<const Sample> dataset, LossKind loss)
{
    if (dataset.empty()) throw std::invalid_argument("estimate_fisher_diag: empty dataset");
    FisherDiag out{std::vector<double>(params.values.size(), 0.0), params.values};
    const double inv_n = 1.0 / static_cast<double>(dataset.size());
    for (std::size_t k = 0; k < dataset.size(); ++k) {
        const auto g = loss_and_grad(params, dataset.subspan(k, 1), loss).grad;
        for (std::size_t i = 0; i < g.size(); ++i) out.fisher[i] += g[i] * g[i] * inv_n;
    }
    return out;
}

EwcTerm ewc_penalty_and_grad(std::span<const double> params, std::span<const double> anchor,
                             std::span<const double> fisher, double lambda)
{
    if (params.size() != anchor.size() || params.size() != fisher.size()) throw std::invalid_argument("ewc: shape mismatch");
    EwcTerm out{0.0, std::vector<double>(params.size(), 0.0)};
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double d = params[i] - anchor[i];
        out.penalty += 0.5 * lambda * fisher[i] * d * d;
        out.grad[i] = lambda * fisher[i] * d;
    }
    return out;
}

}  // namespace mmlab::nn
