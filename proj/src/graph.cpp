#include "bench500/graph.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace bench500 {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("graph: " + msg); }

}  // namespace

void NetworkGraph::check_node_insertable(const NodeSpec& node) const {
    if (node.name.empty()) fail("node name must not be empty");
    if (has_node(node.name)) fail("duplicate node name '" + node.name + "'");
    std::set<std::string> outs(node.outputs.begin(), node.outputs.end());
    if (outs.size() != node.outputs.size()) fail("node '" + node.name + "' repeats an output edge");
    for (const std::string& e : node.outputs) {
        if (producer_of(e)) fail("edge '" + e + "' already has a producer");
        if (initializers_.count(e)) fail("edge '" + e + "' is an initializer");
        if (std::find(inputs_.begin(), inputs_.end(), e) != inputs_.end())
            fail("edge '" + e + "' is a graph input");
        // A node consuming its own output is the smallest cycle.
        if (std::find(node.inputs.begin(), node.inputs.end(), e) != node.inputs.end())
            fail("cycle: node '" + node.name + "' consumes its own output '" + e + "'");
    }
}

void NetworkGraph::add_node(NodeSpec node) {
    check_node_insertable(node);
    make_operator(node.op, node.attrs);  // rejects unknown ops and bad attrs early
    nodes_.push_back(std::move(node));
    // A freshly appended node can only consume existing edges, so it cannot
    // close a cycle; edits that rewire edges re-validate via topological_order.
    topological_order();
}

void NetworkGraph::remove_node(const std::string& name) {
    auto it = std::find_if(nodes_.begin(), nodes_.end(),
                           [&](const NodeSpec& n) { return n.name == name; });
    if (it == nodes_.end()) fail("unknown node '" + name + "'");
    nodes_.erase(it);
}

void NetworkGraph::feed(const std::string& edge, Tensor value) {
    if (producer_of(edge)) fail("cannot feed edge '" + edge + "': it has a producing node");
    initializers_[edge] = std::move(value);
}

const Tensor& NetworkGraph::fetch(const std::string& edge) const {
    auto it = initializers_.find(edge);
    if (it == initializers_.end()) fail("unknown initializer edge '" + edge + "'");
    return it->second;
}

void NetworkGraph::add_input(const std::string& edge) {
    if (std::find(inputs_.begin(), inputs_.end(), edge) != inputs_.end())
        fail("duplicate graph input '" + edge + "'");
    if (producer_of(edge)) fail("graph input '" + edge + "' already has a producer");
    inputs_.push_back(edge);
}

void NetworkGraph::add_output(const std::string& edge) {
    if (std::find(outputs_.begin(), outputs_.end(), edge) != outputs_.end())
        fail("duplicate graph output '" + edge + "'");
    outputs_.push_back(edge);
}

void NetworkGraph::add_gradient_pair(const std::string& param_edge, const std::string& grad_edge) {
    gradient_pairs_[param_edge] = grad_edge;
}

bool NetworkGraph::has_node(const std::string& name) const {
    return std::any_of(nodes_.begin(), nodes_.end(),
                       [&](const NodeSpec& n) { return n.name == name; });
}

const NodeSpec& NetworkGraph::node(const std::string& name) const {
    for (const NodeSpec& n : nodes_)
        if (n.name == name) return n;
    fail("unknown node '" + name + "'");
}

std::optional<size_t> NetworkGraph::producer_of(const std::string& edge) const {
    for (size_t i = 0; i < nodes_.size(); ++i)
        for (const std::string& e : nodes_[i].outputs)
            if (e == edge) return i;
    return std::nullopt;
}

bool NetworkGraph::edge_known(const std::string& edge) const {
    return producer_of(edge).has_value() || initializers_.count(edge) ||
           std::find(inputs_.begin(), inputs_.end(), edge) != inputs_.end();
}

std::vector<std::string> NetworkGraph::topological_order() const {
    // Kahn over node-to-node dependencies; ready nodes picked in insertion
    // order, which fixes the tie-break deterministically.
    std::vector<bool> placed(nodes_.size(), false);
    std::vector<std::string> order;
    order.reserve(nodes_.size());
    while (order.size() < nodes_.size()) {
        bool progress = false;
        for (size_t i = 0; i < nodes_.size(); ++i) {
            if (placed[i]) continue;
            bool ready = true;
            for (const std::string& in : nodes_[i].inputs) {
                auto p = producer_of(in);
                if (p && !placed[*p]) {
                    ready = false;
                    break;
                }
            }
            if (ready) {
                placed[i] = true;
                order.push_back(nodes_[i].name);
                progress = true;
            }
        }
        if (!progress) fail("cycle detected among nodes");
    }
    return order;
}

void NetworkGraph::validate() const {
    topological_order();
    for (const NodeSpec& n : nodes_)
        for (const std::string& e : n.inputs)
            if (!edge_known(e)) fail("node '" + n.name + "' consumes unknown edge '" + e + "'");
    for (const std::string& e : outputs_)
        if (!edge_known(e)) fail("declared output '" + e + "' is not produced");
}

bool NetworkGraph::structurally_equal(const NetworkGraph& o) const {
    if (nodes_ != o.nodes_ || inputs_ != o.inputs_ || outputs_ != o.outputs_ ||
        gradient_pairs_ != o.gradient_pairs_)
        return false;
    if (initializers_.size() != o.initializers_.size()) return false;
    for (const auto& [name, t] : initializers_) {
        auto it = o.initializers_.find(name);
        if (it == o.initializers_.end()) return false;
        if (t.dtype() != it->second.dtype() || t.shape() != it->second.shape()) return false;
        if (t.to_bytes() != it->second.to_bytes()) return false;
    }
    return true;
}

}  // namespace bench500
