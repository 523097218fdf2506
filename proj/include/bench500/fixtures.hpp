#pragma once

#include "bench500/graph.hpp"

namespace bench500 {

// Kaiming-uniform fan-in initialization from the pinned generator:
// U(-sqrt(6/fan_in), +sqrt(6/fan_in)); biases start at zero.
Tensor kaiming_uniform(TensorDesc desc, int64_t fan_in, Rng& rng);

// Classifier MLP: x[B,in] -> Gemm+Relu -> Gemm -> x-CrossEntropyLoss.
// Inputs "x" and "labels"; outputs "loss" and "probs". Batch-size agnostic.
NetworkGraph build_mlp(int64_t in_dim, int64_t hidden, int64_t classes, uint64_t seed,
                       DType dtype = DType::F32);

// Two stacked 3x3 convolutions with a relu between them; inference fixture
// for the micro-batch transform. Input "x" [B,C,H,W], output "y".
NetworkGraph build_conv_net(int64_t in_channels, int64_t mid_channels, int64_t out_channels,
                            uint64_t seed, DType dtype = DType::F32);

// LeNet-class 28x28 classifier: two conv+relu+maxpool stages, then two
// fully-connected layers and a trailing Softmax. Input "x" [B,1,28,28].
NetworkGraph build_lenet(int64_t classes, uint64_t seed, DType dtype = DType::F32);

// Scalar least squares: yhat = w*x, loss = mean((yhat - y)^2) composed from
// Sub/Mul/Reshape/Gemm. Batch is baked into the averaging initializer.
NetworkGraph build_least_squares(int64_t batch, uint64_t seed, DType dtype = DType::F64);

NetworkGraph graph_astype(const NetworkGraph& g, DType dt);

}  // namespace bench500
