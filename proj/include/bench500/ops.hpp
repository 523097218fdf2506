#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>

#include "bench500/kernels.hpp"
#include "bench500/tensor.hpp"

namespace bench500 {

using AttrValue = std::variant<int64_t, double, std::string, std::vector<int64_t>>;

struct Attrs {
    std::map<std::string, AttrValue> values;

    bool has(const std::string& key) const { return values.count(key) != 0; }
    int64_t get_int(const std::string& key) const;
    int64_t get_int(const std::string& key, int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::vector<int64_t> get_ints(const std::string& key) const;
    std::vector<int64_t> get_ints(const std::string& key, std::vector<int64_t> fallback) const;
    void set(const std::string& key, AttrValue v) { values[key] = std::move(v); }
    bool operator==(const Attrs& o) const = default;
};

// Level-0 operator contract: forward maps input tensors to output tensors;
// backward consumes (output gradients, forward inputs, forward outputs) and
// yields one gradient per differentiable input (empty Tensor otherwise).
class Operator {
  public:
    virtual ~Operator() = default;
    virtual const char* name() const = 0;
    virtual size_t num_outputs(size_t num_inputs) const { (void)num_inputs; return 1; }
    virtual bool input_differentiable(size_t index) const { (void)index; return true; }
    virtual std::vector<Tensor> forward(std::span<const Tensor> inputs) = 0;
    virtual std::vector<Tensor> backward(std::span<const Tensor> grad_outputs,
                                         std::span<const Tensor> fwd_inputs,
                                         std::span<const Tensor> fwd_outputs) = 0;
};

// Factory for the supported op set. File-format names; extensions beyond the
// ONNX subset carry an "x-" prefix. Throws naming the op when unknown.
std::unique_ptr<Operator> make_operator(const std::string& op_name, const Attrs& attrs);
bool is_supported_op(const std::string& op_name);
std::vector<std::string> supported_ops();

ConvAttrs conv_attrs_from(const Attrs& attrs);

}  // namespace bench500
