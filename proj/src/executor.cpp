#include "bench500/executor.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <stdexcept>

namespace bench500 {

namespace {

uint64_t now_ns() {
    return uint64_t(std::chrono::duration_cast<std::chrono::nanoseconds>(
                        std::chrono::steady_clock::now().time_since_epoch())
                        .count());
}

struct ExecState {
    TensorView values;
    std::vector<NodeTiming> times;
};

ExecState run_forward(const NetworkGraph& g, const TensorView& feeds) {
    ExecState st;
    for (const auto& [name, t] : g.initializers()) st.values[name] = t;
    for (const auto& [name, t] : feeds) {
        if (g.producer_of(name))
            throw std::runtime_error("feed '" + name + "' collides with a produced edge");
        st.values[name] = t;
    }
    for (const std::string& in : g.inputs())
        if (!st.values.count(in)) throw std::runtime_error("missing feed for graph input '" + in + "'");

    for (const std::string& node_name : g.topological_order()) {
        const NodeSpec& n = g.node(node_name);
        std::vector<Tensor> ins;
        ins.reserve(n.inputs.size());
        for (const std::string& e : n.inputs) {
            auto it = st.values.find(e);
            if (it == st.values.end())
                throw std::runtime_error("node '" + n.name + "': input edge '" + e +
                                         "' has no value");
            ins.push_back(it->second);
        }
        auto op = make_operator(n.op, n.attrs);
        const uint64_t t0 = now_ns();
        std::vector<Tensor> outs;
        try {
            outs = op->forward(ins);
        } catch (const std::exception& e) {
            throw std::runtime_error("node '" + n.name + "' (" + n.op + "): " + e.what());
        }
        st.times.push_back({n.name, now_ns() - t0});
        if (outs.size() != n.outputs.size())
            throw std::runtime_error("node '" + n.name + "' produced " +
                                     std::to_string(outs.size()) + " outputs, declared " +
                                     std::to_string(n.outputs.size()));
        for (size_t i = 0; i < outs.size(); ++i) st.values[n.outputs[i]] = std::move(outs[i]);
    }
    return st;
}

}  // namespace

InferenceResult inference(const NetworkGraph& g, const TensorView& feeds, const EventHooks* hooks,
                          int64_t step) {
    const uint64_t t0 = now_ns();
    ExecState st = run_forward(g, feeds);
    InferenceResult r;
    r.values = std::move(st.values);
    r.node_times = std::move(st.times);
    for (const std::string& out : g.outputs()) {
        auto it = r.values.find(out);
        if (it == r.values.end())
            throw std::runtime_error("declared output '" + out + "' was not computed");
        r.outputs[out] = it->second;
    }
    r.total_ns = now_ns() - t0;
    if (hooks && hooks->after_inference) hooks->after_inference(step, r.values);
    return r;
}

const Tensor& BackpropResult::grad_for(const NetworkGraph& g, const std::string& param_edge) const {
    auto pit = g.gradient_pairs().find(param_edge);
    if (pit == g.gradient_pairs().end())
        throw std::runtime_error("no gradient pair declared for '" + param_edge + "'");
    auto it = gradients.find(pit->second);
    if (it == gradients.end())
        throw std::runtime_error("gradient '" + pit->second + "' was not produced");
    return it->second;
}

BackpropResult inference_and_backprop(const NetworkGraph& g, const TensorView& feeds,
                                      const std::string& loss_edge, const EventHooks* hooks,
                                      int64_t step) {
    const uint64_t t0 = now_ns();
    ExecState st = run_forward(g, feeds);
    auto lit = st.values.find(loss_edge);
    if (lit == st.values.end()) throw std::runtime_error("loss edge '" + loss_edge + "' not computed");
    if (lit->second.numel() != 1)
        throw std::runtime_error("loss edge '" + loss_edge + "' is not a scalar");
    if (hooks && hooks->after_inference) hooks->after_inference(step, st.values);

    // Gradient contributions per edge, tagged by consumer node index so the
    // final sum runs in node-insertion order.
    std::map<std::string, std::vector<std::pair<size_t, Tensor>>> contributions;
    const std::vector<NodeSpec>& nodes = g.nodes();
    std::map<std::string, size_t> node_index;
    for (size_t i = 0; i < nodes.size(); ++i) node_index[nodes[i].name] = i;

    auto grad_of = [&](const std::string& edge, const Tensor& like) -> Tensor {
        if (edge == loss_edge) {
            Tensor seed = Tensor::full({like.dtype(), like.shape()}, 0.0);
            seed.set(0, 1.0);
            // Plus any accumulated downstream contributions (loss reused as input).
            auto cit = contributions.find(edge);
            if (cit != contributions.end()) {
                std::vector<std::pair<size_t, Tensor>> sorted = cit->second;
                std::stable_sort(sorted.begin(), sorted.end(),
                                 [](const auto& a, const auto& b) { return a.first < b.first; });
                for (auto& [idx, t] : sorted) seed = add(seed, t);
            }
            return seed;
        }
        auto cit = contributions.find(edge);
        if (cit == contributions.end()) return Tensor::zeros({like.dtype(), like.shape()});
        std::vector<std::pair<size_t, Tensor>> sorted = cit->second;
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        Tensor acc = Tensor::zeros({like.dtype(), like.shape()});
        for (auto& [idx, t] : sorted) acc = add(acc, t);
        return acc;
    };

    // Only nodes that the loss depends on take part in backprop.
    std::vector<std::string> order = g.topological_order();
    std::vector<bool> on_path(nodes.size(), false);
    {
        std::set<std::string> needed{loss_edge};
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const NodeSpec& n = g.node(*it);
            bool produces_needed = std::any_of(n.outputs.begin(), n.outputs.end(),
                                               [&](const std::string& e) { return needed.count(e); });
            if (produces_needed) {
                on_path[node_index[n.name]] = true;
                for (const std::string& e : n.inputs) needed.insert(e);
            }
        }
    }

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const NodeSpec& n = g.node(*it);
        const size_t idx = node_index[n.name];
        if (!on_path[idx]) continue;
        std::vector<Tensor> fwd_in, fwd_out, grad_out;
        for (const std::string& e : n.inputs) fwd_in.push_back(st.values.at(e));
        for (const std::string& e : n.outputs) {
            fwd_out.push_back(st.values.at(e));
            grad_out.push_back(grad_of(e, st.values.at(e)));
        }
        auto op = make_operator(n.op, n.attrs);
        std::vector<Tensor> grads;
        try {
            grads = op->backward(grad_out, fwd_in, fwd_out);
        } catch (const std::exception& e) {
            throw std::runtime_error("backward of node '" + n.name + "' (" + n.op + "): " +
                                     e.what());
        }
        if (grads.size() != n.inputs.size())
            throw std::runtime_error("node '" + n.name + "' backward returned wrong grad count");
        for (size_t i = 0; i < grads.size(); ++i) {
            if (!op->input_differentiable(i)) continue;
            contributions[n.inputs[i]].push_back({idx, std::move(grads[i])});
        }
    }

    BackpropResult r;
    for (const std::string& out : g.outputs()) {
        auto vit = st.values.find(out);
        if (vit != st.values.end()) r.outputs[out] = vit->second;
    }
    // Every declared parameter gets a gradient tensor; unreachable parameters
    // get zeros.
    for (const auto& [param, grad_name] : g.gradient_pairs()) {
        auto vit = st.values.find(param);
        if (vit == st.values.end())
            throw std::runtime_error("gradient pair names unknown edge '" + param + "'");
        r.gradients[grad_name] = grad_of(param, vit->second);
    }
    r.values = std::move(st.values);
    r.node_times = std::move(st.times);
    r.total_ns = now_ns() - t0;
    if (hooks && hooks->after_backprop) hooks->after_backprop(step, r.gradients);
    return r;
}

OverheadReport framework_overhead(const NetworkGraph& g, const TensorView& feeds, int runs) {
    if (runs < 1) throw std::runtime_error("framework_overhead: runs must be >= 1");
    std::vector<double> whole_ms, sum_ms;
    inference(g, feeds);  // warmup
    for (int r = 0; r < runs; ++r) {
        InferenceResult res = inference(g, feeds);
        uint64_t node_total = 0;
        for (const NodeTiming& t : res.node_times) node_total += t.ns;
        whole_ms.push_back(double(res.total_ns) / 1e6);
        sum_ms.push_back(double(node_total) / 1e6);
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    OverheadReport rep;
    rep.runs = runs;
    rep.whole_graph_ms = median(whole_ms);
    rep.sum_of_nodes_ms = median(sum_ms);
    rep.overhead_ratio = rep.sum_of_nodes_ms > 0 ? rep.whole_graph_ms / rep.sum_of_nodes_ms - 1.0
                                                 : 0.0;
    return rep;
}

}  // namespace bench500
