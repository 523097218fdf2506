#include "bench500/fixtures.hpp"

#include <cmath>

namespace bench500 {

Tensor kaiming_uniform(TensorDesc desc, int64_t fan_in, Rng& rng) {
    const double bound = std::sqrt(6.0 / double(fan_in));
    return Tensor::uniform(std::move(desc), rng, -bound, bound);
}

namespace {

NodeSpec node(std::string name, std::string op, std::vector<std::string> ins,
              std::vector<std::string> outs, Attrs attrs = {}) {
    return NodeSpec{std::move(name), std::move(op), std::move(attrs), std::move(ins),
                    std::move(outs)};
}

}  // namespace

NetworkGraph build_mlp(int64_t in_dim, int64_t hidden, int64_t classes, uint64_t seed,
                       DType dtype) {
    NetworkGraph g;
    g.add_input("x");
    g.add_input("labels");
    Rng r1(seed, 1), r2(seed, 2);
    g.feed("w1", kaiming_uniform({dtype, {in_dim, hidden}}, in_dim, r1));
    g.feed("b1", Tensor::zeros({dtype, {hidden}}));
    g.feed("w2", kaiming_uniform({dtype, {hidden, classes}}, hidden, r2));
    g.feed("b2", Tensor::zeros({dtype, {classes}}));
    Attrs flat;
    flat.set("shape", std::vector<int64_t>{-1, in_dim});
    g.add_node(node("flatten", "Reshape", {"x"}, {"xf"}, flat));
    g.add_node(node("fc1", "Gemm", {"xf", "w1", "b1"}, {"h1"}));
    g.add_node(node("act1", "Relu", {"h1"}, {"a1"}));
    g.add_node(node("fc2", "Gemm", {"a1", "w2", "b2"}, {"logits"}));
    g.add_node(node("loss_fn", "x-CrossEntropyLoss", {"logits", "labels"}, {"loss", "probs"}));
    g.add_output("loss");
    g.add_output("probs");
    for (const char* w : {"w1", "b1", "w2", "b2"})
        g.add_gradient_pair(w, std::string(w) + "_grad");
    g.validate();
    return g;
}

NetworkGraph build_conv_net(int64_t in_channels, int64_t mid_channels, int64_t out_channels,
                            uint64_t seed, DType dtype) {
    NetworkGraph g;
    g.add_input("x");
    Rng r1(seed, 1), r2(seed, 2);
    g.feed("w1", kaiming_uniform({dtype, {mid_channels, in_channels, 3, 3}}, in_channels * 9, r1));
    g.feed("b1", Tensor::zeros({dtype, {mid_channels}}));
    g.feed("w2", kaiming_uniform({dtype, {out_channels, mid_channels, 3, 3}}, mid_channels * 9, r2));
    g.feed("b2", Tensor::zeros({dtype, {out_channels}}));
    Attrs conv_attrs;
    conv_attrs.set("kernel", std::vector<int64_t>{3, 3});
    conv_attrs.set("strides", std::vector<int64_t>{1, 1});
    conv_attrs.set("pads", std::vector<int64_t>{1, 1, 1, 1});
    g.add_node(node("conv1", "Conv", {"x", "w1", "b1"}, {"c1"}, conv_attrs));
    g.add_node(node("act1", "Relu", {"c1"}, {"a1"}));
    g.add_node(node("conv2", "Conv", {"a1", "w2", "b2"}, {"y"}, conv_attrs));
    g.add_output("y");
    g.validate();
    return g;
}

NetworkGraph build_lenet(int64_t classes, uint64_t seed, DType dtype) {
    NetworkGraph g;
    g.add_input("x");
    g.add_input("labels");
    Rng r1(seed, 1), r2(seed, 2), r3(seed, 3), r4(seed, 4);
    g.feed("w1", kaiming_uniform({dtype, {8, 1, 5, 5}}, 25, r1));
    g.feed("b1", Tensor::zeros({dtype, {8}}));
    g.feed("w2", kaiming_uniform({dtype, {16, 8, 5, 5}}, 8 * 25, r2));
    g.feed("b2", Tensor::zeros({dtype, {16}}));
    g.feed("w3", kaiming_uniform({dtype, {16 * 5 * 5, 64}}, 16 * 5 * 5, r3));
    g.feed("b3", Tensor::zeros({dtype, {64}}));
    g.feed("w4", kaiming_uniform({dtype, {64, classes}}, 64, r4));
    g.feed("b4", Tensor::zeros({dtype, {classes}}));

    Attrs c1;
    c1.set("kernel", std::vector<int64_t>{5, 5});
    c1.set("pads", std::vector<int64_t>{2, 2, 2, 2});
    Attrs c2;
    c2.set("kernel", std::vector<int64_t>{5, 5});
    Attrs pool;
    pool.set("window", std::vector<int64_t>{2, 2});
    pool.set("strides", std::vector<int64_t>{2, 2});
    Attrs flat;
    flat.set("shape", std::vector<int64_t>{-1, 16 * 5 * 5});
    Attrs expand;
    expand.set("shape", std::vector<int64_t>{-1, 1, 28, 28});

    g.add_node(node("expand", "Reshape", {"x"}, {"xi"}, expand));
    g.add_node(node("conv1", "Conv", {"xi", "w1", "b1"}, {"c1"}, c1));       // [B,8,28,28]
    g.add_node(node("act1", "Relu", {"c1"}, {"a1"}));
    g.add_node(node("pool1", "MaxPool", {"a1"}, {"p1"}, pool));              // [B,8,14,14]
    g.add_node(node("conv2", "Conv", {"p1", "w2", "b2"}, {"c2"}, c2));       // [B,16,10,10]
    g.add_node(node("act2", "Relu", {"c2"}, {"a2"}));
    g.add_node(node("pool2", "MaxPool", {"a2"}, {"p2"}, pool));              // [B,16,5,5]
    g.add_node(node("flatten", "Reshape", {"p2"}, {"flat"}, flat));
    g.add_node(node("fc1", "Gemm", {"flat", "w3", "b3"}, {"h1"}));
    g.add_node(node("act3", "Relu", {"h1"}, {"a3"}));
    g.add_node(node("fc2", "Gemm", {"a3", "w4", "b4"}, {"logits"}));
    g.add_node(node("probs_fn", "Softmax", {"logits"}, {"probs"}));
    g.add_node(node("loss_fn", "x-CrossEntropyLoss", {"logits", "labels"}, {"loss", "probs_ce"}));
    g.add_output("loss");
    g.add_output("probs");
    for (const char* w : {"w1", "b1", "w2", "b2", "w3", "b3", "w4", "b4"})
        g.add_gradient_pair(w, std::string(w) + "_grad");
    g.validate();
    return g;
}

NetworkGraph build_least_squares(int64_t batch, uint64_t seed, DType dtype) {
    NetworkGraph g;
    g.add_input("x");
    g.add_input("labels");
    Rng r(seed, 1);
    g.feed("w", Tensor::uniform({dtype, {1, 1}}, r, -1.0, 1.0));
    g.feed("avg", Tensor::full({dtype, {batch, 1}}, 1.0 / double(batch)));
    Attrs row;
    row.set("shape", std::vector<int64_t>{1, -1});
    Attrs col;
    col.set("shape", std::vector<int64_t>{-1});
    g.add_node(node("predict", "Gemm", {"x", "w"}, {"yhat2d"}));
    g.add_node(node("squeeze", "Reshape", {"yhat2d"}, {"yhat"}, col));
    g.add_node(node("residual", "Sub", {"yhat", "labels"}, {"d"}));
    g.add_node(node("square", "Mul", {"d", "d"}, {"d2"}));
    g.add_node(node("widen", "Reshape", {"d2"}, {"row"}, row));
    g.add_node(node("mean", "Gemm", {"row", "avg"}, {"loss2d"}));
    g.add_node(node("scalar", "Reshape", {"loss2d"}, {"loss"}, Attrs{{{"shape", std::vector<int64_t>{1}}}}));
    g.add_output("loss");
    g.add_gradient_pair("w", "w_grad");
    g.validate();
    return g;
}

NetworkGraph graph_astype(const NetworkGraph& g, DType dt) {
    NetworkGraph out;
    for (const std::string& in : g.inputs()) out.add_input(in);
    for (const auto& [name, t] : g.initializers()) out.feed(name, t.astype(dt));
    for (const NodeSpec& n : g.nodes()) out.add_node(n);
    for (const std::string& o : g.outputs()) out.add_output(o);
    for (const auto& [p, gr] : g.gradient_pairs()) out.add_gradient_pair(p, gr);
    return out;
}

}  // namespace bench500
