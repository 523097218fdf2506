#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "bench500/grad_check.hpp"
#include "bench500/kernels.hpp"
#include "bench500/ops.hpp"

using namespace bench500;

namespace {

// Naive triple-loop oracle, independent of the library gemm path.
std::vector<double> gemm_oracle(const Tensor& a, const Tensor& b) {
    const int64_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
    std::vector<double> y(size_t(m * n), 0.0);
    for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < n; ++j) {
            double acc = 0;
            for (int64_t p = 0; p < k; ++p) acc += a.at(i * k + p) * b.at(p * n + j);
            y[size_t(i * n + j)] = acc;
        }
    return y;
}

// Direct 7-loop convolution oracle (no im2col), ONNX Conv semantics.
std::vector<double> conv_oracle(const Tensor& x, const Tensor& w, const Tensor* bias,
                                const ConvAttrs& at) {
    const auto& xs = x.shape();
    const auto& ws = w.shape();
    const int64_t n = xs[0], c = xs[1], h = xs[2], wd = xs[3];
    const int64_t f = ws[0], kh = ws[2], kw = ws[3];
    auto [oh, ow] = at.out_extents(h, wd);
    std::vector<double> y(size_t(n * f * oh * ow), 0.0);
    for (int64_t ni = 0; ni < n; ++ni)
        for (int64_t fi = 0; fi < f; ++fi)
            for (int64_t oi = 0; oi < oh; ++oi)
                for (int64_t oj = 0; oj < ow; ++oj) {
                    double acc = bias ? bias->at(fi) : 0.0;
                    for (int64_t ci = 0; ci < c; ++ci)
                        for (int64_t ki = 0; ki < kh; ++ki)
                            for (int64_t kj = 0; kj < kw; ++kj) {
                                int64_t ih = oi * at.strides[0] - at.pads[0] + ki * at.dilations[0];
                                int64_t iw = oj * at.strides[1] - at.pads[1] + kj * at.dilations[1];
                                if (ih < 0 || ih >= h || iw < 0 || iw >= wd) continue;
                                acc += x.at(((ni * c + ci) * h + ih) * wd + iw) *
                                       w.at(((fi * c + ci) * kh + ki) * kw + kj);
                            }
                    y[size_t(((ni * f + fi) * oh + oi) * ow + oj)] = acc;
                }
    return y;
}

Tensor identity_matrix(int64_t n, DType dt) {
    Tensor t = Tensor::zeros({dt, {n, n}});
    for (int64_t i = 0; i < n; ++i) t.set(i * n + i, 1.0);
    return t;
}

}  // namespace

TEST_CASE("gemm against identity and oracle") {
    Rng rng(11, 0);
    Tensor a = Tensor::uniform({DType::F64, {3, 3}}, rng, -2, 2);
    Tensor y = gemm(a, identity_matrix(3, DType::F64));
    for (int64_t i = 0; i < 9; ++i) CHECK(y.at(i) == a.at(i));

    Tensor a2 = Tensor::uniform({DType::F64, {5, 4}}, rng, -1, 1);
    Tensor b2 = Tensor::uniform({DType::F64, {4, 3}}, rng, -1, 1);
    Tensor y2 = gemm(a2, b2);
    auto oracle = gemm_oracle(a2, b2);
    for (int64_t i = 0; i < y2.numel(); ++i)
        CHECK(y2.at(i) == doctest::Approx(oracle[size_t(i)]).epsilon(1e-12));

    CHECK_THROWS(gemm(a2, Tensor::zeros({DType::F64, {5, 3}})));
}

TEST_CASE("gemm is deterministic") {
    Rng rng(12, 0);
    Tensor a = Tensor::uniform({DType::F32, {17, 9}}, rng, -1, 1);
    Tensor b = Tensor::uniform({DType::F32, {9, 13}}, rng, -1, 1);
    Tensor y1 = gemm(a, b);
    Tensor y2 = gemm(a, b);
    auto b1 = y1.to_bytes(), b2 = y2.to_bytes();
    CHECK(b1 == b2);
}

TEST_CASE("gemm bias and backward shapes") {
    Rng rng(13, 0);
    Tensor a = Tensor::uniform({DType::F64, {4, 3}}, rng, -1, 1);
    Tensor b = Tensor::uniform({DType::F64, {3, 2}}, rng, -1, 1);
    Tensor c = Tensor::uniform({DType::F64, {2}}, rng, -1, 1);
    Tensor y = gemm(a, b, &c);
    auto plain = gemm_oracle(a, b);
    for (int64_t i = 0; i < 4; ++i)
        for (int64_t j = 0; j < 2; ++j)
            CHECK(y.at(i * 2 + j) == doctest::Approx(plain[size_t(i * 2 + j)] + c.at(j)));

    Tensor dy = Tensor::uniform({DType::F64, {4, 2}}, rng, -1, 1);
    GemmGrads g = gemm_backward(dy, a, b, true);
    CHECK(g.da.shape() == std::vector<int64_t>{4, 3});
    CHECK(g.db.shape() == std::vector<int64_t>{3, 2});
    REQUIRE(g.dc.has_value());
    // dC = column sums of dY
    for (int64_t j = 0; j < 2; ++j) {
        double acc = 0;
        for (int64_t i = 0; i < 4; ++i) acc += dy.at(i * 2 + j);
        CHECK(g.dc->at(j) == doctest::Approx(acc));
    }
}

TEST_CASE("conv2d identity kernel and all-ones case") {
    // 1x1 kernel with weight 1 reproduces the input.
    Rng rng(21, 0);
    Tensor x = Tensor::uniform({DType::F64, {1, 1, 4, 5}}, rng, -2, 2);
    Tensor w = Tensor::full({DType::F64, {1, 1, 1, 1}}, 1.0);
    Tensor y = conv2d(x, w, nullptr, ConvAttrs::basic(1, 1));
    CHECK(y.shape() == x.shape());
    for (int64_t i = 0; i < x.numel(); ++i) CHECK(y.at(i) == x.at(i));

    // All-ones 3x3 kernel over all-ones input, valid padding: every output 9.
    Tensor ones = Tensor::full({DType::F64, {1, 1, 5, 5}}, 1.0);
    Tensor k3 = Tensor::full({DType::F64, {1, 1, 3, 3}}, 1.0);
    Tensor y9 = conv2d(ones, k3, nullptr, ConvAttrs::basic(3, 3));
    CHECK(y9.shape() == std::vector<int64_t>{1, 1, 3, 3});
    for (int64_t i = 0; i < y9.numel(); ++i) CHECK(y9.at(i) == 9.0);
}

TEST_CASE("conv2d against direct oracle, strides pads dilations") {
    Rng rng(22, 0);
    Tensor x = Tensor::uniform({DType::F64, {2, 3, 7, 6}}, rng, -1, 1);
    Tensor w = Tensor::uniform({DType::F64, {4, 3, 3, 2}}, rng, -1, 1);
    Tensor b = Tensor::uniform({DType::F64, {4}}, rng, -1, 1);
    ConvAttrs at{{3, 2}, {2, 1}, {1, 0, 1, 1}, {1, 2}};
    Tensor y = conv2d(x, w, &b, at);
    auto oracle = conv_oracle(x, w, &b, at);
    REQUIRE(size_t(y.numel()) == oracle.size());
    for (int64_t i = 0; i < y.numel(); ++i)
        CHECK(y.at(i) == doctest::Approx(oracle[size_t(i)]).epsilon(1e-12));
}

TEST_CASE("conv2d rejects invalid output extent") {
    Tensor x = Tensor::zeros({DType::F32, {1, 1, 2, 2}});
    Tensor w = Tensor::zeros({DType::F32, {1, 1, 3, 3}});
    CHECK_THROWS(conv2d(x, w, nullptr, ConvAttrs::basic(3, 3)));
}

TEST_CASE("pooling forward") {
    Tensor x = Tensor::from_values({DType::F64, {1, 1, 2, 2}}, std::vector<double>{1, 2, 3, 4});
    Tensor mx = pool2d(x, PoolKind::Max, {2, 2}, {2, 2});
    CHECK(mx.numel() == 1);
    CHECK(mx.at(0) == 4.0);

    Tensor md = pool2d(x, PoolKind::Median, {2, 2}, {2, 2});
    CHECK(md.at(0) == 2.5);  // mean of the two middle order statistics

    Tensor c = Tensor::full({DType::F64, {1, 1, 4, 4}}, 3.25);
    for (PoolKind k : {PoolKind::Max, PoolKind::Median}) {
        Tensor y = pool2d(c, k, {2, 2}, {2, 2});
        for (int64_t i = 0; i < y.numel(); ++i) CHECK(y.at(i) == 3.25);
    }

    Tensor odd = Tensor::from_values({DType::F64, {1, 1, 1, 3}}, std::vector<double>{5, 1, 9});
    Tensor m3 = pool2d(odd, PoolKind::Median, {1, 3}, {1, 1});
    CHECK(m3.at(0) == 5.0);

    CHECK_THROWS(pool2d(x, PoolKind::Max, {3, 3}, {1, 1}));
}

TEST_CASE("pooling backward routing") {
    Tensor x = Tensor::from_values({DType::F64, {1, 1, 2, 2}}, std::vector<double>{1, 4, 4, 2});
    Tensor dy = Tensor::full({DType::F64, {1, 1, 1, 1}}, 1.0);
    // Max ties route to the first occurrence.
    Tensor dmax = pool2d_backward(dy, x, PoolKind::Max, {2, 2}, {2, 2});
    CHECK(dmax.at(1) == 1.0);
    CHECK(dmax.at(2) == 0.0);
    // Even-window median splits the gradient between the two middle elements.
    Tensor dmed = pool2d_backward(dy, x, PoolKind::Median, {2, 2}, {2, 2});
    CHECK(dmed.at(0) == 0.0);   // value 1
    CHECK(dmed.at(3) == 0.5);   // value 2
    CHECK(dmed.at(1) + dmed.at(2) == 1.0 - 0.5);
}

TEST_CASE("softmax_xent uniform logits and normalization") {
    Tensor logits = Tensor::zeros({DType::F64, {3, 2}});
    Tensor labels = Tensor::from_values({DType::F64, {3}}, std::vector<double>{0, 1, 0});
    auto r = softmax_xent(logits, labels);
    CHECK(r.loss.at(0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    for (int64_t i = 0; i < 3; ++i) {
        double row = r.probs.at(i * 2) + r.probs.at(i * 2 + 1);
        CHECK(row == doctest::Approx(1.0).epsilon(1e-6));
    }

    Tensor bad = Tensor::from_values({DType::F64, {3}}, std::vector<double>{0, 2, 0});
    CHECK_THROWS(softmax_xent(logits, bad));
}

TEST_CASE("softmax_xent against direct formula oracle") {
    Rng rng(31, 0);
    Tensor logits = Tensor::uniform({DType::F64, {4, 3}}, rng, -3, 3);
    Tensor labels = Tensor::from_values({DType::F64, {4}}, std::vector<double>{2, 0, 1, 2});
    auto r = softmax_xent(logits, labels);

    double loss = 0;
    for (int64_t i = 0; i < 4; ++i) {
        double denom = 0;
        for (int64_t j = 0; j < 3; ++j) denom += std::exp(logits.at(i * 3 + j));
        for (int64_t j = 0; j < 3; ++j) {
            double p = std::exp(logits.at(i * 3 + j)) / denom;
            CHECK(r.probs.at(i * 3 + j) == doctest::Approx(p).epsilon(1e-10));
        }
        loss += -std::log(std::exp(logits.at(i * 3 + int64_t(labels.at(i)))) / denom);
    }
    CHECK(r.loss.at(0) == doctest::Approx(loss / 4.0).epsilon(1e-10));

    // dlogits = (probs - onehot)/N
    Tensor dz = softmax_xent_backward(1.0, r.probs, labels);
    for (int64_t i = 0; i < 4; ++i)
        for (int64_t j = 0; j < 3; ++j) {
            double onehot = (j == int64_t(labels.at(i))) ? 1.0 : 0.0;
            CHECK(dz.at(i * 3 + j) ==
                  doctest::Approx((r.probs.at(i * 3 + j) - onehot) / 4.0).epsilon(1e-10));
        }
}

TEST_CASE("split concat round trip is bit exact") {
    Rng rng(41, 0);
    Tensor x = Tensor::uniform({DType::F32, {4, 3, 2, 2}}, rng, -1, 1);
    auto parts = split(x, 0, {2, 2});
    CHECK(parts[0].shape() == std::vector<int64_t>{2, 3, 2, 2});
    Tensor back = concat(parts, 0);
    CHECK(back.to_bytes() == x.to_bytes());

    Tensor v = Tensor::from_values({DType::F64, {3}}, std::vector<double>{7, 8, 9});
    auto vp = split(v, 0, {1, 2});
    CHECK(vp[0].shape() == std::vector<int64_t>{1});
    CHECK(vp[1].shape() == std::vector<int64_t>{2});
    CHECK(vp[0].at(0) == 7.0);
    CHECK(vp[1].at(0) == 8.0);
    CHECK(vp[1].at(1) == 9.0);

    CHECK_THROWS(split(v, 0, {1, 1}));

    // Interior-axis round trip.
    auto ap = split(x, 1, {1, 2});
    Tensor aback = concat(ap, 1);
    CHECK(aback.to_bytes() == x.to_bytes());
}

TEST_CASE("grad_check on every operator") {
    Rng rng(51, 0);

    SUBCASE("gemm") {
        auto op = make_operator("Gemm", {});
        std::vector<Tensor> in{Tensor::uniform({DType::F64, {3, 3}}, rng, -1, 1),
                               Tensor::uniform({DType::F64, {3, 3}}, rng, -1, 1),
                               Tensor::uniform({DType::F64, {3}}, rng, -1, 1)};
        auto rep = grad_check(*op, in, rng);
        CHECK(rep.worst <= 1e-6);
    }

    SUBCASE("conv") {
        Attrs a;
        a.set("kernel", std::vector<int64_t>{2, 2});
        auto op = make_operator("Conv", a);
        std::vector<Tensor> in{Tensor::uniform({DType::F64, {1, 1, 4, 4}}, rng, -1, 1),
                               Tensor::uniform({DType::F64, {2, 1, 2, 2}}, rng, -1, 1),
                               Tensor::uniform({DType::F64, {2}}, rng, -1, 1)};
        auto rep = grad_check(*op, in, rng);
        CHECK(rep.worst <= 1e-6);
    }

    SUBCASE("relu away from kink") {
        auto op = make_operator("Relu", {});
        Tensor x = Tensor::uniform({DType::F64, {8}}, rng, 0.1, 2.0);
        for (int64_t i = 0; i < 8; i += 2) x.set(i, -x.at(i));  // |x| >= 0.1 either sign
        std::vector<Tensor> in{x};
        auto rep = grad_check(*op, in, rng);
        CHECK(rep.worst <= 1e-9);
    }

    SUBCASE("pools at points with unique extrema") {
        Attrs a;
        a.set("window", std::vector<int64_t>{2, 2});
        a.set("strides", std::vector<int64_t>{2, 2});
        for (const char* name : {"MaxPool", "x-MedianPool"}) {
            auto op = make_operator(name, a);
            // Distinct, well-separated values keep order statistics stable
            // under +-h perturbation.
            std::vector<double> vals(16);
            for (size_t i = 0; i < 16; ++i) vals[i] = double(i) * 0.7 - 5.0;
            std::vector<Tensor> in{Tensor::from_values({DType::F64, {1, 1, 4, 4}}, vals)};
            auto rep = grad_check(*op, in, rng);
            CHECK(rep.worst <= 1e-6);
        }
    }

    SUBCASE("cross entropy") {
        auto op = make_operator("x-CrossEntropyLoss", {});
        std::vector<Tensor> in{Tensor::uniform({DType::F64, {3, 4}}, rng, -1, 1),
                               Tensor::from_values({DType::F64, {3}}, std::vector<double>{1, 3, 0})};
        auto rep = grad_check(*op, in, rng);
        CHECK(rep.worst <= 1e-6);
    }

    SUBCASE("softmax") {
        auto op = make_operator("Softmax", {});
        std::vector<Tensor> in{Tensor::uniform({DType::F64, {2, 5}}, rng, -1, 1)};
        auto rep = grad_check(*op, in, rng);
        CHECK(rep.worst <= 1e-6);
    }

    SUBCASE("binary and structural ops") {
        std::vector<Tensor> two{Tensor::uniform({DType::F64, {6}}, rng, -1, 1),
                                Tensor::uniform({DType::F64, {6}}, rng, 0.5, 1.5)};
        for (const char* name : {"Add", "Sub", "Mul"}) {
            auto op = make_operator(name, {});
            auto rep = grad_check(*op, two, rng);
            CHECK(rep.worst <= 1e-6);
        }

        Attrs ra;
        ra.set("shape", std::vector<int64_t>{2, 3});
        auto reshape = make_operator("Reshape", ra);
        std::vector<Tensor> one{Tensor::uniform({DType::F64, {6}}, rng, -1, 1)};
        CHECK(grad_check(*reshape, one, rng).worst <= 1e-9);

        Attrs sa;
        sa.set("axis", int64_t{0});
        sa.set("parts", std::vector<int64_t>{2, 4});
        auto sp = make_operator("Split", sa);
        CHECK(grad_check(*sp, one, rng).worst <= 1e-9);

        Attrs ca;
        ca.set("axis", int64_t{0});
        auto cc = make_operator("Concat", ca);
        CHECK(grad_check(*cc, two, rng).worst <= 1e-9);
    }
}

TEST_CASE("grad_check uses random cotangents for large outputs") {
    Rng rng(52, 0);
    auto op = make_operator("Relu", {});
    Tensor x = Tensor::uniform({DType::F64, {100}}, rng, 0.2, 2.0);
    std::vector<Tensor> in{x};
    auto rep = grad_check(*op, in, rng);
    CHECK_FALSE(rep.full_jacobian);
    CHECK(rep.worst <= 1e-8);
}

TEST_CASE("operator registry") {
    CHECK(is_supported_op("Gemm"));
    CHECK_FALSE(is_supported_op("FancyAttention"));
    CHECK_THROWS_WITH_AS(make_operator("FancyAttention", {}), "unknown op 'FancyAttention'",
                         std::runtime_error);
    CHECK(supported_ops().size() == 13);
}

TEST_CASE("benchmark-class shapes are accepted as configs") {
    // DeepBench-class shapes must validate; execution happens in opbench.
    Tensor a = Tensor::zeros({DType::F32, {2560, 2560}});
    Tensor b = Tensor::zeros({DType::F32, {2560, 64}});
    CHECK(a.shape()[1] == b.shape()[0]);

    ConvAttrs at = ConvAttrs::basic(3, 3, 1, 1, 1, 1, 1, 1);
    auto [oh, ow] = at.out_extents(224, 224);
    CHECK(oh == 224);
    CHECK(ow == 224);
}
