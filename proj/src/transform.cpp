#include "bench500/transform.hpp"

#include <stdexcept>

namespace bench500 {

namespace {

// Largest divisor m of batch with workspace(m) <= cap, i.e. fewest parts.
int64_t choose_microbatch(int64_t batch, double cap, const ConvCostModel& cost) {
    for (int64_t m = batch; m >= 1; --m) {
        if (batch % m != 0) continue;
        if (cost.workspace_bytes(m) <= cap) return m;
    }
    throw std::runtime_error("microbatch_transform: cap " + std::to_string(cap) +
                             " bytes is below the workspace at micro-batch 1 (" +
                             std::to_string(cost.workspace_bytes(1)) + ")");
}

}  // namespace

NetworkGraph microbatch_transform(const NetworkGraph& g, double memory_cap_bytes,
                                  const ConvCostModel& cost, int64_t batch_size,
                                  TransformReport* report) {
    if (batch_size < 1) throw std::runtime_error("microbatch_transform: batch size must be >= 1");
    bool has_conv = false;
    for (const NodeSpec& n : g.nodes()) has_conv |= (n.op == "Conv");
    if (!has_conv) throw std::runtime_error("microbatch_transform: graph has no conv node");

    NetworkGraph out;
    for (const std::string& in : g.inputs()) out.add_input(in);
    for (const auto& [name, t] : g.initializers()) out.feed(name, t);

    TransformReport local;
    for (const NodeSpec& n : g.nodes()) {
        if (n.op != "Conv" || cost.workspace_bytes(batch_size) <= memory_cap_bytes) {
            if (n.op == "Conv")
                local.choices.push_back({n.name, batch_size, batch_size, 1});
            out.add_node(n);
            continue;
        }
        const int64_t m = choose_microbatch(batch_size, memory_cap_bytes, cost);
        if (m == batch_size) {  // cap satisfied at full batch (checked above), keep as-is
            local.choices.push_back({n.name, batch_size, batch_size, 1});
            out.add_node(n);
            continue;
        }
        const int64_t k = batch_size / m;
        local.choices.push_back({n.name, batch_size, m, k});
        local.changed = true;

        NodeSpec split;
        split.name = n.name + "/split";
        split.op = "Split";
        split.attrs.set("axis", int64_t{0});
        split.attrs.set("parts", std::vector<int64_t>(size_t(k), m));
        split.inputs = {n.inputs[0]};
        for (int64_t i = 0; i < k; ++i)
            split.outputs.push_back(n.name + "/mb" + std::to_string(i));
        out.add_node(split);

        std::vector<std::string> piece_outputs;
        for (int64_t i = 0; i < k; ++i) {
            NodeSpec piece = n;
            piece.name = n.name + "/conv" + std::to_string(i);
            piece.inputs[0] = n.name + "/mb" + std::to_string(i);
            piece.outputs = {n.name + "/mby" + std::to_string(i)};
            if (n.outputs.size() != 1)
                throw std::runtime_error("microbatch_transform: conv must have one output");
            piece_outputs.push_back(piece.outputs[0]);
            out.add_node(piece);
        }

        NodeSpec cat;
        cat.name = n.name + "/concat";
        cat.op = "Concat";
        cat.attrs.set("axis", int64_t{0});
        cat.inputs = piece_outputs;
        cat.outputs = n.outputs;
        out.add_node(cat);
    }
    for (const std::string& o : g.outputs()) out.add_output(o);
    for (const auto& [p, gr] : g.gradient_pairs()) out.add_gradient_pair(p, gr);
    out.validate();
    if (report) *report = std::move(local);
    return out;
}

}  // namespace bench500
