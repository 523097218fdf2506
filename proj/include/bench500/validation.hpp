#pragma once

#include "bench500/dist.hpp"
#include "bench500/grad_check.hpp"

namespace bench500 {

using ReferenceFn = std::function<std::vector<Tensor>(std::span<const Tensor>)>;

struct ForwardReport {
    double l1 = 0, l2 = 0, linf = 0;  // vs the reference, worst output
    SummaryStats timing;              // forward wallclock, ms
};

// Operator correctness and performance: norms against an independent
// reference on identical inputs plus repeated-run timing.
ForwardReport test_forward(Operator& op, std::span<const Tensor> inputs,
                           const ReferenceFn& reference, int runs = 30);

struct GradientReport {
    GradCheckReport check;
    SummaryStats backward_timing;  // ms
};

GradientReport test_gradient(Operator& op, std::span<const Tensor> inputs, Rng& rng,
                             int runs = 30, double step = 1e-5);

// One optimizer lane of a divergence comparison: the update algorithm, the
// protocol used to drive it, and the arithmetic precision.
struct OptimizerLane {
    OptimizerConfig opt;
    bool three_step = true;  // false: direct update-rule path
    DType dtype = DType::F32;
};

struct DivergenceCurves {
    std::vector<std::string> params;
    std::vector<std::vector<double>> l2;    // [step][param]
    std::vector<std::vector<double>> linf;  // [step][param]

    double max_l2(int64_t step) const;
    std::vector<CsvRow> to_csv() const;
};

// Runs both lanes from identical parameters over identical batches and
// records per-step per-parameter norms of the parameter difference.
DivergenceCurves test_optimizer(const OptimizerLane& a, const OptimizerLane& b,
                                const NetworkGraph& model, const Dataset& data, int64_t batch,
                                int64_t steps, uint64_t seed);

struct TrainingOutcome {
    bool diverged = false;
    int64_t diverged_step = -1;
    double final_loss = 0;
    double final_test_accuracy = -1;
    int64_t steps = 0;
    std::vector<MetricRecord> metrics;
    NetworkGraph trained;
    CommVolumeReport comm;  // populated by the distributed overload
};

// Convergence/performance of a whole training run; a divergence abort is an
// outcome, not a crash.
TrainingOutcome test_training(const NetworkGraph& model, const Dataset& train_data,
                              const Dataset* test_data, const TrainingConfig& cfg);
TrainingOutcome test_training_distributed(const NetworkGraph& model, const Dataset& data,
                                          const DistConfig& cfg);

struct InstrumentationOverhead {
    double instrumented_median_ms = 0;
    double uninstrumented_median_ms = 0;
    double overhead = 0;  // instrumented/uninstrumented - 1
    bool outputs_identical = false;
};

// Same seed with and without metric recording: the numeric outputs must be
// bit-identical and the median per-step cost difference is the harness
// overhead.
InstrumentationOverhead measure_instrumentation_overhead(const NetworkGraph& model,
                                                         const Dataset& data,
                                                         const TrainingConfig& cfg);

}  // namespace bench500
