#pragma once

#include "bench500/graph.hpp"

namespace bench500 {

// Per-conv workspace estimate in bytes as a function of micro-batch size.
struct ConvCostModel {
    double alpha = 0;  // bytes per micro-batch row
    double beta = 0;   // fixed bytes
    double workspace_bytes(int64_t microbatch) const { return alpha * double(microbatch) + beta; }
};

struct MicrobatchChoice {
    std::string conv_node;
    int64_t batch = 0;
    int64_t microbatch = 0;  // == batch when the conv was left untouched
    int64_t parts = 1;
};

struct TransformReport {
    std::vector<MicrobatchChoice> choices;
    bool changed = false;
};

// Replaces each conv whose workspace exceeds the cap with
// Split -> per-micro-batch conv copies -> Concat along the batch axis.
// Micro-batch sizes are the largest divisor of the batch satisfying the cap
// (equivalently the smallest part count). Outputs are unchanged on all inputs.
NetworkGraph microbatch_transform(const NetworkGraph& g, double memory_cap_bytes,
                                  const ConvCostModel& cost, int64_t batch_size,
                                  TransformReport* report = nullptr);

}  // namespace bench500
