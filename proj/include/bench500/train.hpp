#pragma once

#include "bench500/executor.hpp"
#include "bench500/metrics.hpp"
#include "bench500/optimizer.hpp"
#include "bench500/sampler.hpp"

namespace bench500 {

enum class SamplerKind { Sequential, Shuffle };

struct TrainingConfig {
    int64_t batch = 64;
    int64_t epochs = 1;
    uint64_t seed = 1;
    OptimizerConfig opt;
    SamplerKind sampler = SamplerKind::Shuffle;
    int64_t train_acc_every = 50;  // steps; accuracy of the step's own batch
    bool record_loss = true;

    std::string x_input = "x";
    std::string y_input = "labels";
    std::string loss_edge = "loss";
    std::string probs_edge = "probs";  // empty: no accuracy metrics
};

// Non-finite loss aborts the run; carries the failing step for diagnostics.
class TrainingDiverged : public std::runtime_error {
  public:
    TrainingDiverged(int64_t step, double loss_value);
    int64_t step;
    double loss_value;
};

struct TrainResult {
    NetworkGraph graph;  // trained parameters
    int64_t steps_run = 0;
    double final_loss = 0;
};

// Minibatch SGD: sample, three-step optimizer phases around
// inference_and_backprop, parameter update, metric emission. Steps per epoch
// are exactly floor(|S|/B); a trailing partial batch is dropped.
TrainResult train(const NetworkGraph& model, const Dataset& data, const Dataset* test_data,
                  const TrainingConfig& cfg, MetricSink& sink, const EventHooks* hooks = nullptr);

// Argmax-match fraction over the full set (all batches, including a final
// partial one); argmax ties resolve to the lowest class index.
double evaluate_accuracy(const NetworkGraph& g, const Dataset& data, int64_t batch,
                         const TrainingConfig& cfg = {});

double batch_accuracy(const Tensor& probs, const Tensor& labels);

enum class LatencySource { Real, Synthetic };

// Wallclock of minibatch construction from an in-memory dataset versus
// freshly generated synthetic data, summarized over `runs` repetitions.
SummaryStats measure_dataset_latency(LatencySource source, const Dataset& data, int64_t batch,
                                     int runs, uint64_t seed = 1);

}  // namespace bench500
