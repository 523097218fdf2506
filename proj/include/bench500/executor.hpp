#pragma once

#include "bench500/graph.hpp"

namespace bench500 {

// Callbacks receive the step index and a read-only snapshot of the named
// tensors computed so far. They must not mutate graph structure.
using TensorView = std::map<std::string, Tensor>;

struct EventHooks {
    std::function<void(int64_t, const TensorView&)> before_step;
    std::function<void(int64_t, const TensorView&)> after_inference;
    std::function<void(int64_t, const TensorView&)> after_backprop;
    std::function<void(int64_t, const TensorView&)> after_update;
    std::function<bool(int64_t, const TensorView&)> early_stop_query;  // true => stop
};

struct NodeTiming {
    std::string node;
    uint64_t ns = 0;
};

struct InferenceResult {
    TensorView outputs;       // declared graph outputs
    TensorView values;        // every edge value (feeds, initializers, activations)
    std::vector<NodeTiming> node_times;
    uint64_t total_ns = 0;
};

InferenceResult inference(const NetworkGraph& g, const TensorView& feeds,
                          const EventHooks* hooks = nullptr, int64_t step = 0);

struct BackpropResult {
    TensorView outputs;
    TensorView values;
    TensorView gradients;  // keyed by gradient edge name from gradient_pairs,
                           // plus "<edge>:grad" for other touched edges
    std::vector<NodeTiming> node_times;
    uint64_t total_ns = 0;

    const Tensor& grad_for(const NetworkGraph& g, const std::string& param_edge) const;
};

BackpropResult inference_and_backprop(const NetworkGraph& g, const TensorView& feeds,
                                      const std::string& loss_edge,
                                      const EventHooks* hooks = nullptr, int64_t step = 0);

struct OverheadReport {
    double whole_graph_ms = 0;   // median over runs
    double sum_of_nodes_ms = 0;  // median over runs
    double overhead_ratio = 0;   // whole/sum - 1
    int runs = 0;
};

// Whole-graph wall time vs the summed per-node kernel times of the same
// executions; the difference is executor dispatch.
OverheadReport framework_overhead(const NetworkGraph& g, const TensorView& feeds, int runs);

}  // namespace bench500
