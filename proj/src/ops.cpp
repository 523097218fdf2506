#include "bench500/ops.hpp"

#include <functional>
#include <stdexcept>

namespace bench500 {

int64_t Attrs::get_int(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw std::runtime_error("missing attribute '" + key + "'");
    if (auto p = std::get_if<int64_t>(&it->second)) return *p;
    throw std::runtime_error("attribute '" + key + "' is not an integer");
}

int64_t Attrs::get_int(const std::string& key, int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

double Attrs::get_double(const std::string& key, double fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (auto p = std::get_if<double>(&it->second)) return *p;
    if (auto p = std::get_if<int64_t>(&it->second)) return double(*p);
    throw std::runtime_error("attribute '" + key + "' is not numeric");
}

std::vector<int64_t> Attrs::get_ints(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw std::runtime_error("missing attribute '" + key + "'");
    if (auto p = std::get_if<std::vector<int64_t>>(&it->second)) return *p;
    throw std::runtime_error("attribute '" + key + "' is not an integer list");
}

std::vector<int64_t> Attrs::get_ints(const std::string& key,
                                     std::vector<int64_t> fallback) const {
    return has(key) ? get_ints(key) : std::move(fallback);
}

ConvAttrs conv_attrs_from(const Attrs& attrs) {
    ConvAttrs c;
    c.kernel = attrs.get_ints("kernel");
    c.strides = attrs.get_ints("strides", {1, 1});
    c.pads = attrs.get_ints("pads", {0, 0, 0, 0});
    c.dilations = attrs.get_ints("dilations", {1, 1});
    c.validate();
    return c;
}

namespace {

void expect_inputs(std::span<const Tensor> inputs, size_t lo, size_t hi, const char* op) {
    if (inputs.size() < lo || inputs.size() > hi)
        throw std::runtime_error(std::string(op) + ": wrong input count " +
                                 std::to_string(inputs.size()));
}

class GemmOp final : public Operator {
  public:
    const char* name() const override { return "Gemm"; }
    std::vector<Tensor> forward(std::span<const Tensor> in) override {
        expect_inputs(in, 2, 3, "Gemm");
        return {gemm(in[0], in[1], in.size() == 3 ? &in[2] : nullptr)};
    }
    std::vector<Tensor> backward(std::span<const Tensor> go, std::span<const Tensor> fi,
                                 std::span<const Tensor>) override {
        GemmGrads g = gemm_backward(go[0], fi[0], fi[1], fi.size() == 3);
        std::vector<Tensor> out{std::move(g.da), std::move(g.db)};
        if (g.dc) out.push_back(std::move(*g.dc));
        return out;
    }
};

class ConvOp final : public Operator {
  public:
    explicit ConvOp(const Attrs& attrs) : attrs_(conv_attrs_from(attrs)) {}
    const char* name() const override { return "Conv"; }
    std::vector<Tensor> forward(std::span<const Tensor> in) override {
        expect_inputs(in, 2, 3, "Conv");
        return {conv2d(in[0], in[1], in.size() == 3 ? &in[2] : nullptr, attrs_)};
    }
    std::vector<Tensor> backward(std::span<const Tensor> go, std::span<const Tensor> fi,
                                 std::span<const Tensor>) override {
        ConvGrads g = conv2d_backward(go[0], fi[0], fi[1], fi.size() == 3, attrs_);
        std::vector<Tensor> out{std::move(g.dx), std::move(g.dw)};
        if (g.db) out.push_back(std::move(*g.db));
        return out;
    }

  private:
    ConvAttrs attrs_;
};

class ReluOp final : public Operator {
  public:
    const char* name() const override { return "Relu"; }
    std::vector<Tensor> forward(std::span<const Tensor> in) override {
        expect_inputs(in, 1, 1, "Relu");
        return {relu(in[0])};
    }
    std::vector<Tensor> backward(std::span<const Tensor> go, std::span<const Tensor> fi,
                                 std::span<const Tensor>) override {
        return {relu_backward(go[0], fi[0])};
    }
};

class PoolOp final : public Operator {
  public:
    PoolOp(PoolKind kind, const Attrs& attrs)
        : kind_(kind),
          window_(attrs.get_ints("window")),
          strides_(attrs.get_ints("strides", window_)) {}
    const char* name() const override { return kind_ == PoolKind::Max ? "MaxPool" : "x-MedianPool"; }
    std::vector<Tensor> forward(std::span<const Tensor> in) override {
        expect_inputs(in, 1, 1, "pool");
        return {pool2d(in[0], kind_, window_, strides_)};
    }
    std::vector<Tensor> backward(std::span<const Tensor> go, std::span<const Tensor> fi,
                                 std::span<const Tensor>) override {
        return {pool2d_backward(go[0], fi[0], kind_, window_, strides_)};
    }

  private:
    PoolKind kind_;
    std::vector<int64_t> window_;
    std::vector<int64_t> strides_;
};

class SoftmaxOp final : public Operator {
  public:
    const char* name() const override { return "Softmax"; }
    std::vector<Tensor> forward(std::span<const Tensor> in) override {
        expect_inputs(in, 1, 1, "Softmax");
        return {softmax(in[0])};
    }
    std::vector<Tensor> backward(std::span<const Tensor> go, std::span<const Tensor>,
                                 std::span<const Tensor> fo) override {
        return {softmax_backward(go[0], fo[0])};
    }
};

// Fused softmax + negative log likelihood over class-id labels. Outputs the
// scalar loss and the probabilities; labels are not differentiable.
class CrossEntropyLossOp final : public Operator {
  public:
    const char* name() const override { return "x-CrossEntropyLoss"; }
    size_t num_outputs(size_t) const override { return 2; }
    bool input_differentiable(size_t index) const override { return index == 0; }
    std::vector<Tensor> forward(std::span<const Tensor> in) override {
        expect_inputs(in, 2, 2, "x-CrossEntropyLoss");
        SoftmaxXentResult r = softmax_xent(in[0], in[1]);
        return {std::move(r.loss), std::move(r.probs)};
    }
    std::vector<Tensor> backward(std::span<const Tensor> go, std::span<const Tensor> fi,
                                 std::span<const Tensor> fo) override {
        // Gradient through the probs output composes with the loss-path
        // gradient; executor fixtures route loss only, but both are exact.
        Tensor dlogits = softmax_xent_backward(go[0].at(0), fo[1], fi[1]);
        if (go[1].numel() == fo[1].numel() && go[1].shape() == fo[1].shape()) {
            Tensor via_probs = softmax_backward(go[1], fo[1]);
            dlogits = add(dlogits, via_probs);
        }
        return {std::move(dlogits), Tensor()};
    }
};

class BinaryOp final : public Operator {
  public:
    explicit BinaryOp(EwOp op) : op_(op) {}
    const char* name() const override {
        switch (op_) {
            case EwOp::Add: return "Add";
            case EwOp::Sub: return "Sub";
            default: return "Mul";
        }
    }
    std::vector<Tensor> forward(std::span<const Tensor> in) override {
        expect_inputs(in, 2, 2, name());
        return {elementwise(op_, in[0], &in[1])};
    }
    std::vector<Tensor> backward(std::span<const Tensor> go, std::span<const Tensor> fi,
                                 std::span<const Tensor>) override {
        switch (op_) {
            case EwOp::Add: return {go[0], go[0]};
            case EwOp::Sub: return {go[0], scale(go[0], -1.0)};
            default: return {mul(go[0], fi[1]), mul(go[0], fi[0])};
        }
    }

  private:
    EwOp op_;
};

class ReshapeOp final : public Operator {
  public:
    explicit ReshapeOp(const Attrs& attrs) : shape_(attrs.get_ints("shape")) {
        int free_dims = 0;
        for (int64_t e : shape_) free_dims += (e == -1);
        if (free_dims > 1) throw std::runtime_error("Reshape: at most one -1 extent");
    }
    const char* name() const override { return "Reshape"; }
    std::vector<Tensor> forward(std::span<const Tensor> in) override {
        expect_inputs(in, 1, 1, "Reshape");
        std::vector<int64_t> target = shape_;
        int64_t known = 1;
        int64_t free_at = -1;
        for (size_t i = 0; i < target.size(); ++i) {
            if (target[i] == -1)
                free_at = int64_t(i);
            else
                known *= target[i];
        }
        if (free_at >= 0) {
            if (known == 0 || in[0].numel() % known != 0)
                throw std::runtime_error("Reshape: cannot infer -1 extent");
            target[size_t(free_at)] = in[0].numel() / known;
        }
        return {in[0].reshaped(target)};
    }
    std::vector<Tensor> backward(std::span<const Tensor> go, std::span<const Tensor> fi,
                                 std::span<const Tensor>) override {
        return {go[0].reshaped(fi[0].shape())};
    }

  private:
    std::vector<int64_t> shape_;
};

class SplitOp final : public Operator {
  public:
    explicit SplitOp(const Attrs& attrs)
        : axis_(attrs.get_int("axis")), parts_(attrs.get_ints("parts")) {}
    const char* name() const override { return "Split"; }
    size_t num_outputs(size_t) const override { return parts_.size(); }
    std::vector<Tensor> forward(std::span<const Tensor> in) override {
        expect_inputs(in, 1, 1, "Split");
        return split(in[0], axis_, parts_);
    }
    std::vector<Tensor> backward(std::span<const Tensor> go, std::span<const Tensor>,
                                 std::span<const Tensor>) override {
        return {concat(go, axis_)};
    }

  private:
    int64_t axis_;
    std::vector<int64_t> parts_;
};

class ConcatOp final : public Operator {
  public:
    explicit ConcatOp(const Attrs& attrs) : axis_(attrs.get_int("axis")) {}
    const char* name() const override { return "Concat"; }
    std::vector<Tensor> forward(std::span<const Tensor> in) override {
        if (in.empty()) throw std::runtime_error("Concat: no inputs");
        return {concat(in, axis_)};
    }
    std::vector<Tensor> backward(std::span<const Tensor> go, std::span<const Tensor> fi,
                                 std::span<const Tensor>) override {
        std::vector<int64_t> parts;
        for (const Tensor& t : fi) parts.push_back(t.shape()[size_t(axis_)]);
        return split(go[0], axis_, parts);
    }

  private:
    int64_t axis_;
};

using Factory = std::function<std::unique_ptr<Operator>(const Attrs&)>;

const std::map<std::string, Factory>& registry() {
    static const std::map<std::string, Factory> ops = {
        {"Gemm", [](const Attrs&) { return std::make_unique<GemmOp>(); }},
        {"Conv", [](const Attrs& a) { return std::make_unique<ConvOp>(a); }},
        {"Relu", [](const Attrs&) { return std::make_unique<ReluOp>(); }},
        {"MaxPool", [](const Attrs& a) { return std::make_unique<PoolOp>(PoolKind::Max, a); }},
        {"x-MedianPool",
         [](const Attrs& a) { return std::make_unique<PoolOp>(PoolKind::Median, a); }},
        {"Softmax", [](const Attrs&) { return std::make_unique<SoftmaxOp>(); }},
        {"x-CrossEntropyLoss", [](const Attrs&) { return std::make_unique<CrossEntropyLossOp>(); }},
        {"Add", [](const Attrs&) { return std::make_unique<BinaryOp>(EwOp::Add); }},
        {"Sub", [](const Attrs&) { return std::make_unique<BinaryOp>(EwOp::Sub); }},
        {"Mul", [](const Attrs&) { return std::make_unique<BinaryOp>(EwOp::Mul); }},
        {"Reshape", [](const Attrs& a) { return std::make_unique<ReshapeOp>(a); }},
        {"Split", [](const Attrs& a) { return std::make_unique<SplitOp>(a); }},
        {"Concat", [](const Attrs& a) { return std::make_unique<ConcatOp>(a); }},
    };
    return ops;
}

}  // namespace

std::unique_ptr<Operator> make_operator(const std::string& op_name, const Attrs& attrs) {
    auto it = registry().find(op_name);
    if (it == registry().end()) throw std::runtime_error("unknown op '" + op_name + "'");
    return it->second(attrs);
}

bool is_supported_op(const std::string& op_name) { return registry().count(op_name) != 0; }

std::vector<std::string> supported_ops() {
    std::vector<std::string> names;
    for (const auto& [k, v] : registry()) names.push_back(k);
    return names;
}

}  // namespace bench500
