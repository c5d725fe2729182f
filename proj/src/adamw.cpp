#include "rvqtok/adamw.hpp"

#include <cmath>

namespace rvqtok {

void adamw_step(Matrix& param, const Matrix& grad, AdamWState& state,
                const AdamWConfig& cfg, long step) {
    param.require_same_shape(grad, "adamw_step");
    if (state.m.size() == 0) {
        state.m = Matrix(param.rows(), param.cols());
        state.v = Matrix(param.rows(), param.cols());
    }
    param.require_same_shape(state.m, "adamw_step state");
    if (cfg.lr <= 0.0) throw NumericError("adamw_step: lr must be positive");

    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
    for (size_t k = 0; k < param.size(); ++k) {
        const double g = grad[k];
        state.m[k] = cfg.beta1 * state.m[k] + (1.0 - cfg.beta1) * g;
        state.v[k] = cfg.beta2 * state.v[k] + (1.0 - cfg.beta2) * g * g;
        const double mhat = state.m[k] / bc1;
        const double vhat = state.v[k] / bc2;
        param[k] -= cfg.lr * (mhat / (std::sqrt(vhat) + cfg.eps) + cfg.weight_decay * param[k]);
    }
}

AdamW::AdamW(std::vector<Param*> params, AdamWConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
    states_.resize(params_.size());
}

void AdamW::step() {
    ++step_;
    for (size_t i = 0; i < params_.size(); ++i)
        adamw_step(params_[i]->value, params_[i]->grad, states_[i], cfg_, step_);
}

}  // namespace rvqtok
