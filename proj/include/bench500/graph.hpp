#pragma once

#include <functional>
#include <map>
#include <optional>

#include "bench500/ops.hpp"

namespace bench500 {

struct NodeSpec {
    std::string name;
    std::string op;
    Attrs attrs;
    std::vector<std::string> inputs;   // edge names consumed
    std::vector<std::string> outputs;  // edge names produced
    bool operator==(const NodeSpec& o) const = default;
};

// DAG of operator nodes over named edges. Every edge has exactly one
// producer: a node output, a graph input, or an initializer.
class NetworkGraph {
  public:
    void add_node(NodeSpec node);
    void remove_node(const std::string& name);
    void feed(const std::string& edge, Tensor value);  // set/replace an initializer
    const Tensor& fetch(const std::string& edge) const;

    void add_input(const std::string& edge);
    void add_output(const std::string& edge);
    void add_gradient_pair(const std::string& param_edge, const std::string& grad_edge);

    const std::vector<NodeSpec>& nodes() const { return nodes_; }
    const std::map<std::string, Tensor>& initializers() const { return initializers_; }
    std::map<std::string, Tensor>& initializers() { return initializers_; }
    const std::vector<std::string>& inputs() const { return inputs_; }
    const std::vector<std::string>& outputs() const { return outputs_; }
    const std::map<std::string, std::string>& gradient_pairs() const { return gradient_pairs_; }

    bool has_node(const std::string& name) const;
    const NodeSpec& node(const std::string& name) const;

    // Node names in dependency order; ties broken by insertion order.
    std::vector<std::string> topological_order() const;

    // Producing node index for an edge, or nullopt for inputs/initializers.
    std::optional<size_t> producer_of(const std::string& edge) const;
    bool edge_known(const std::string& edge) const;

    // Declared outputs must be reachable, producers unique, graph acyclic.
    void validate() const;

    bool structurally_equal(const NetworkGraph& o) const;

  private:
    void check_node_insertable(const NodeSpec& node) const;

    std::vector<NodeSpec> nodes_;
    std::map<std::string, Tensor> initializers_;
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
    std::map<std::string, std::string> gradient_pairs_;
};

}  // namespace bench500
