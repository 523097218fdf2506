#pragma once

#include <optional>

#include "bench500/tensor.hpp"

namespace bench500 {

struct ConvAttrs {
    std::vector<int64_t> kernel;     // [kH, kW]
    std::vector<int64_t> strides;    // [sH, sW]
    std::vector<int64_t> pads;       // [top, left, bottom, right]
    std::vector<int64_t> dilations;  // [dH, dW]

    static ConvAttrs basic(int64_t kh, int64_t kw, int64_t sh = 1, int64_t sw = 1,
                           int64_t pt = 0, int64_t pl = 0, int64_t pb = 0, int64_t pr = 0);
    void validate() const;
    // floor((H + padT + padB - dH*(kH-1) - 1)/sH) + 1, same for W; must be >= 1.
    std::pair<int64_t, int64_t> out_extents(int64_t h, int64_t w) const;
};

struct GemmGrads {
    Tensor da, db;
    std::optional<Tensor> dc;
};

// Y = A[M,K] * B[K,N] (+ bias[N] broadcast over rows). Fixed k-ascending
// summation order per output element; repeated evaluation is bit-identical.
Tensor gemm(const Tensor& a, const Tensor& b, const Tensor* bias = nullptr);
GemmGrads gemm_backward(const Tensor& dy, const Tensor& a, const Tensor& b, bool has_bias);

struct ConvGrads {
    Tensor dx, dw;
    std::optional<Tensor> db;
};

// ONNX Conv semantics (cross-correlation), reference method: im2col + gemm.
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor* bias, const ConvAttrs& attrs);
ConvGrads conv2d_backward(const Tensor& dy, const Tensor& x, const Tensor& w, bool has_bias,
                          const ConvAttrs& attrs);

// im2col lowering: X[N,C,H,W] -> [N, C*kH*kW, H'*W']; out-of-bounds taps are zero.
Tensor im2col(const Tensor& x, const ConvAttrs& attrs);

enum class PoolKind { Max, Median };

// Window pooling over NCHW, no padding. Max routes gradient to the argmax
// (first occurrence on ties); median of an even window is the mean of the two
// middle order statistics and its gradient splits equally between them.
Tensor pool2d(const Tensor& x, PoolKind kind, std::vector<int64_t> window,
              std::vector<int64_t> strides);
Tensor pool2d_backward(const Tensor& dy, const Tensor& x, PoolKind kind,
                       std::vector<int64_t> window, std::vector<int64_t> strides);

struct SoftmaxXentResult {
    Tensor loss;   // shape [1]
    Tensor probs;  // shape [N, C]
};

// loss = mean over the batch of -log softmax(logits)[label];
// dlogits = (probs - onehot) / N, scaled by the incoming loss cotangent.
SoftmaxXentResult softmax_xent(const Tensor& logits, const Tensor& labels);
Tensor softmax_xent_backward(double dloss, const Tensor& probs, const Tensor& labels);

Tensor softmax(const Tensor& logits);  // rows of [N, C]
Tensor softmax_backward(const Tensor& dprobs, const Tensor& probs);

std::vector<Tensor> split(const Tensor& x, int64_t axis, const std::vector<int64_t>& parts);
Tensor concat(std::span<const Tensor> parts, int64_t axis);

Tensor relu_backward(const Tensor& dy, const Tensor& x);

}  // namespace bench500
