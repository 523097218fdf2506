#pragma once

#include <map>

#include "bench500/tensor.hpp"

namespace bench500 {

enum class OptKind { Sgd, Momentum, Adagrad, Adam, AcceleGrad };

OptKind opt_kind_from_name(const std::string& name);
const char* opt_kind_name(OptKind k);

enum class LrSchedule { Constant, StepDecay };

struct OptimizerConfig {
    OptKind kind = OptKind::Sgd;
    double lr = 0.01;
    LrSchedule schedule = LrSchedule::Constant;
    double decay_factor = 1.0;
    int64_t decay_every_epochs = 1;

    double momentum = 0.9;
    double adagrad_eps = 1e-8;
    double beta1 = 0.9;  // Adam with bias correction
    double beta2 = 0.999;
    double adam_eps = 1e-8;

    double accele_D = 1.0;  // problem-dependent diameter / gradient bounds
    double accele_G = 1.0;
    double accele_eps = 1e-8;

    double lr_at(int64_t epoch) const;
    void validate() const;
};

// Per-parameter auxiliary tensors plus the shared step counter.
struct ParamSlots {
    Tensor velocity;     // momentum buffer
    Tensor accumulator;  // adagrad
    Tensor m, v;         // adam moments
    Tensor y, z;         // accelegrad iterates
    double squares = 0;  // accelegrad accumulated alpha_t^2 * ||g||^2
    bool initialized = false;
};

struct OptimizerState {
    int64_t t = 0;
    std::map<std::string, ParamSlots> params;
};

// Direct update-rule path (Algorithm-style U): call begin_step once per
// step, then apply per parameter. Buffers initialize to zero on first touch.
void begin_step(OptimizerState& state);
Tensor apply_update_rule(const OptimizerConfig& cfg, OptimizerState& state,
                         const std::string& name, const Tensor& param, const Tensor& grad,
                         double lr);

// Three-step protocol: new_input, prepare_param per parameter before
// inference, update_rule per parameter after backprop. For plain update
// rules prepare_param is the identity, so the trajectory is bit-identical to
// the direct path. AcceleGrad uses all three phases and enforces their order.
class ThreeStepOptimizer {
  public:
    explicit ThreeStepOptimizer(OptimizerConfig cfg);

    void new_input();
    void prepare_param(const std::string& name, Tensor& param);
    Tensor update_rule(const Tensor& grad, const Tensor& old_param, const std::string& name);

    void set_epoch(int64_t epoch) { epoch_ = epoch; }
    double current_lr() const { return cfg_.lr_at(epoch_); }
    int64_t step() const { return state_.t; }
    const OptimizerConfig& config() const { return cfg_; }
    const OptimizerState& state() const { return state_; }

    double accele_alpha() const { return alpha_t_; }
    double accele_tau() const { return tau_t_; }

  private:
    enum class Phase { Idle, Preparing, Updating };

    OptimizerConfig cfg_;
    OptimizerState state_;
    int64_t epoch_ = 0;
    double alpha_t_ = 1.0;
    double tau_t_ = 1.0;
    Phase phase_ = Phase::Idle;
};

double l2_norm_squared(const Tensor& t);

}  // namespace bench500
