#include "bench500/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace bench500 {

OptKind opt_kind_from_name(const std::string& name) {
    if (name == "sgd") return OptKind::Sgd;
    if (name == "momentum") return OptKind::Momentum;
    if (name == "adagrad") return OptKind::Adagrad;
    if (name == "adam") return OptKind::Adam;
    if (name == "accelegrad") return OptKind::AcceleGrad;
    throw std::runtime_error("unknown optimizer '" + name + "'");
}

const char* opt_kind_name(OptKind k) {
    switch (k) {
        case OptKind::Sgd: return "sgd";
        case OptKind::Momentum: return "momentum";
        case OptKind::Adagrad: return "adagrad";
        case OptKind::Adam: return "adam";
        case OptKind::AcceleGrad: return "accelegrad";
    }
    return "?";
}

double OptimizerConfig::lr_at(int64_t epoch) const {
    if (schedule == LrSchedule::Constant) return lr;
    return lr * std::pow(decay_factor, double(epoch / decay_every_epochs));
}

void OptimizerConfig::validate() const {
    if (lr <= 0) throw std::runtime_error("optimizer: learning rate must be > 0");
    if (schedule == LrSchedule::StepDecay && (decay_factor <= 0 || decay_every_epochs < 1))
        throw std::runtime_error("optimizer: invalid step-decay schedule");
}

double l2_norm_squared(const Tensor& t) {
    double acc = 0;
    for (int64_t i = 0; i < t.numel(); ++i) {
        double v = t.at(i);
        acc += v * v;
    }
    return acc;
}

void begin_step(OptimizerState& state) { state.t += 1; }

namespace {

ParamSlots& slots_for(OptimizerState& state, const std::string& name, const Tensor& param,
                      OptKind kind) {
    ParamSlots& s = state.params[name];
    if (!s.initialized) {
        TensorDesc d{param.dtype(), param.shape()};
        switch (kind) {
            case OptKind::Momentum: s.velocity = Tensor::zeros(d); break;
            case OptKind::Adagrad: s.accumulator = Tensor::zeros(d); break;
            case OptKind::Adam:
                s.m = Tensor::zeros(d);
                s.v = Tensor::zeros(d);
                break;
            default: break;
        }
        s.initialized = true;
    }
    return s;
}

void check_grad(const Tensor& param, const Tensor& grad) {
    if (grad.shape() != param.shape() || grad.dtype() != param.dtype())
        throw std::runtime_error("update rule: gradient does not match parameter");
    if (!grad.all_finite()) throw std::runtime_error("update rule: non-finite gradient");
}

}  // namespace

Tensor apply_update_rule(const OptimizerConfig& cfg, OptimizerState& state,
                         const std::string& name, const Tensor& param, const Tensor& grad,
                         double lr) {
    check_grad(param, grad);
    ParamSlots& s = slots_for(state, name, param, cfg.kind);
    Tensor out(TensorDesc{param.dtype(), param.shape()});
    const int64_t n = param.numel();
    dispatch_dtype(param.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto w = param.data<T>();
        auto g = grad.data<T>();
        auto o = out.data<T>();
        switch (cfg.kind) {
            case OptKind::Sgd:
                for (int64_t i = 0; i < n; ++i) o[i] = T(double(w[i]) - lr * double(g[i]));
                break;
            case OptKind::Momentum: {
                auto v = s.velocity.data<T>();
                for (int64_t i = 0; i < n; ++i) {
                    double vi = cfg.momentum * double(v[i]) + double(g[i]);
                    v[i] = T(vi);
                    o[i] = T(double(w[i]) - lr * vi);
                }
                break;
            }
            case OptKind::Adagrad: {
                auto a = s.accumulator.data<T>();
                for (int64_t i = 0; i < n; ++i) {
                    double ai = double(a[i]) + double(g[i]) * double(g[i]);
                    a[i] = T(ai);
                    o[i] = T(double(w[i]) - lr * double(g[i]) / (std::sqrt(ai) + cfg.adagrad_eps));
                }
                break;
            }
            case OptKind::Adam: {
                auto m = s.m.data<T>();
                auto v = s.v.data<T>();
                const double bc1 = 1.0 - std::pow(cfg.beta1, double(state.t));
                const double bc2 = 1.0 - std::pow(cfg.beta2, double(state.t));
                for (int64_t i = 0; i < n; ++i) {
                    double mi = cfg.beta1 * double(m[i]) + (1.0 - cfg.beta1) * double(g[i]);
                    double vi = cfg.beta2 * double(v[i]) +
                                (1.0 - cfg.beta2) * double(g[i]) * double(g[i]);
                    m[i] = T(mi);
                    v[i] = T(vi);
                    const double mhat = mi / bc1;
                    const double vhat = vi / bc2;
                    o[i] = T(double(w[i]) - lr * mhat / (std::sqrt(vhat) + cfg.adam_eps));
                }
                break;
            }
            case OptKind::AcceleGrad:
                throw std::runtime_error("accelegrad requires the three-step protocol");
        }
    });
    return out;
}

ThreeStepOptimizer::ThreeStepOptimizer(OptimizerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void ThreeStepOptimizer::new_input() {
    state_.t += 1;
    if (cfg_.kind == OptKind::AcceleGrad) {
        const int64_t t = state_.t;
        alpha_t_ = (t >= 0 && t <= 2) ? 1.0 : 0.25 * double(t + 1);
        tau_t_ = 1.0 / alpha_t_;
    }
    phase_ = Phase::Preparing;
}

void ThreeStepOptimizer::prepare_param(const std::string& name, Tensor& param) {
    if (phase_ == Phase::Idle) throw std::runtime_error("three-step: prepare_param before new_input");
    if (cfg_.kind != OptKind::AcceleGrad) return;
    if (phase_ == Phase::Updating)
        throw std::runtime_error("three-step: prepare_param after update_rule in the same step");
    ParamSlots& s = state_.params[name];
    if (!s.initialized) {
        s.y = param;
        s.z = param;
        s.squares = 0;
        s.initialized = true;
    }
    Tensor next(TensorDesc{param.dtype(), param.shape()});
    dispatch_dtype(param.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto y = s.y.data<T>();
        auto z = s.z.data<T>();
        auto o = next.data<T>();
        for (int64_t i = 0; i < param.numel(); ++i)
            o[i] = T(tau_t_ * double(z[i]) + (1.0 - tau_t_) * double(y[i]));
    });
    param = std::move(next);
}

Tensor ThreeStepOptimizer::update_rule(const Tensor& grad, const Tensor& old_param,
                                       const std::string& name) {
    if (phase_ == Phase::Idle) throw std::runtime_error("three-step: update_rule before new_input");
    phase_ = Phase::Updating;
    if (cfg_.kind != OptKind::AcceleGrad)
        return apply_update_rule(cfg_, state_, name, old_param, grad, current_lr());

    check_grad(old_param, grad);
    ParamSlots& s = state_.params[name];
    if (!s.initialized)
        throw std::runtime_error("three-step: update_rule before prepare_param for '" + name + "'");

    s.squares += alpha_t_ * alpha_t_ * l2_norm_squared(grad);
    const double eta_t = 2.0 * cfg_.accele_D / std::sqrt(cfg_.accele_G * cfg_.accele_G + s.squares);
    const double adjusted_lr = current_lr() / (cfg_.accele_eps + std::sqrt(s.squares));
    Tensor out(TensorDesc{old_param.dtype(), old_param.shape()});
    dispatch_dtype(old_param.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto w = old_param.data<T>();
        auto g = grad.data<T>();
        auto y = s.y.data<T>();
        auto z = s.z.data<T>();
        auto o = out.data<T>();
        for (int64_t i = 0; i < old_param.numel(); ++i) {
            z[i] = T(double(z[i]) - alpha_t_ * eta_t * double(g[i]));
            y[i] = T(double(w[i]) - eta_t * double(g[i]));
            o[i] = T(double(w[i]) - adjusted_lr * double(g[i]));
        }
    });
    return out;
}

}  // namespace bench500
