#pragma once

#include "bench500/graph.hpp"

namespace bench500 {

// Model document walker. Loading dispatches one visit function per supported
// op; unknown op names are rejected naming the op. The default graph-building
// visitor reconstructs a NetworkGraph; custom visitors can translate models
// into other representations.
class ModelVisitor {
  public:
    virtual ~ModelVisitor() = default;

    virtual void visit_conv(const NodeSpec& n) { visit_default(n); }
    virtual void visit_gemm(const NodeSpec& n) { visit_default(n); }
    virtual void visit_relu(const NodeSpec& n) { visit_default(n); }
    virtual void visit_maxpool(const NodeSpec& n) { visit_default(n); }
    virtual void visit_medianpool(const NodeSpec& n) { visit_default(n); }
    virtual void visit_softmax(const NodeSpec& n) { visit_default(n); }
    virtual void visit_crossentropyloss(const NodeSpec& n) { visit_default(n); }
    virtual void visit_add(const NodeSpec& n) { visit_default(n); }
    virtual void visit_sub(const NodeSpec& n) { visit_default(n); }
    virtual void visit_mul(const NodeSpec& n) { visit_default(n); }
    virtual void visit_reshape(const NodeSpec& n) { visit_default(n); }
    virtual void visit_split(const NodeSpec& n) { visit_default(n); }
    virtual void visit_concat(const NodeSpec& n) { visit_default(n); }

    virtual void visit_initializer(const std::string& name, Tensor value) = 0;
    virtual void visit_input(const std::string& name) = 0;
    virtual void visit_output(const std::string& name) = 0;
    virtual void visit_gradient_pair(const std::string& param, const std::string& grad) = 0;

  protected:
    virtual void visit_default(const NodeSpec& n) = 0;
};

// Parses a version-1 model document and drives the visitor. Throws with
// JSON-path context on schema violations and byte offsets on parse errors.
void walk_model(const std::string& bytes, ModelVisitor& visitor);

NetworkGraph load_model(const std::string& bytes);
NetworkGraph load_model_file(const std::string& path);

// Canonical serialization: object keys sorted, nodes and initializers in
// insertion order, tensor data as base64 little-endian raw bytes.
std::string save_model(const NetworkGraph& g);
void save_model_file(const NetworkGraph& g, const std::string& path);

constexpr int kModelSchemaVersion = 1;

std::string base64_encode(std::span<const uint8_t> bytes);
std::vector<uint8_t> base64_decode(const std::string& text);

}  // namespace bench500
