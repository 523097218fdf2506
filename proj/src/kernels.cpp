#include "bench500/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bench500 {

ConvAttrs ConvAttrs::basic(int64_t kh, int64_t kw, int64_t sh, int64_t sw, int64_t pt, int64_t pl,
                           int64_t pb, int64_t pr) {
    return ConvAttrs{{kh, kw}, {sh, sw}, {pt, pl, pb, pr}, {1, 1}};
}

void ConvAttrs::validate() const {
    if (kernel.size() != 2 || strides.size() != 2 || pads.size() != 4 || dilations.size() != 2)
        throw std::runtime_error("conv attrs: kernel/strides need 2 entries, pads needs 4");
    for (int64_t v : kernel)
        if (v < 1) throw std::runtime_error("conv attrs: kernel extents must be >= 1");
    for (int64_t v : strides)
        if (v < 1) throw std::runtime_error("conv attrs: strides must be >= 1");
    for (int64_t v : dilations)
        if (v < 1) throw std::runtime_error("conv attrs: dilations must be >= 1");
    for (int64_t v : pads)
        if (v < 0) throw std::runtime_error("conv attrs: pads must be >= 0");
}

std::pair<int64_t, int64_t> ConvAttrs::out_extents(int64_t h, int64_t w) const {
    validate();
    int64_t oh = (h + pads[0] + pads[2] - dilations[0] * (kernel[0] - 1) - 1) / strides[0] + 1;
    int64_t ow = (w + pads[1] + pads[3] - dilations[1] * (kernel[1] - 1) - 1) / strides[1] + 1;
    if (oh < 1 || ow < 1)
        throw std::runtime_error("conv attrs: output spatial extent < 1 for input " +
                                 std::to_string(h) + "x" + std::to_string(w));
    return {oh, ow};
}

namespace {

void require_rank(const Tensor& t, size_t rank, const char* what) {
    if (t.shape().size() != rank)
        throw std::runtime_error(std::string(what) + ": expected rank " + std::to_string(rank) +
                                 ", got shape " + shape_to_string(t.shape()));
}

void require_same_dtype(const Tensor& a, const Tensor& b, const char* what) {
    if (a.dtype() != b.dtype()) throw std::runtime_error(std::string(what) + ": dtype mismatch");
}

template <class T>
void gemm_impl(const T* a, const T* b, const T* bias, T* y, int64_t m, int64_t k, int64_t n) {
    for (int64_t i = 0; i < m; ++i) {
        T* yrow = y + i * n;
        for (int64_t j = 0; j < n; ++j) yrow[j] = bias ? bias[j] : T(0);
        for (int64_t p = 0; p < k; ++p) {
            const T av = a[i * k + p];
            const T* brow = b + p * n;
            for (int64_t j = 0; j < n; ++j) yrow[j] += av * brow[j];
        }
    }
}

}  // namespace

Tensor gemm(const Tensor& a, const Tensor& b, const Tensor* bias) {
    require_rank(a, 2, "gemm A");
    require_rank(b, 2, "gemm B");
    require_same_dtype(a, b, "gemm");
    const int64_t m = a.shape()[0], k = a.shape()[1];
    if (b.shape()[0] != k)
        throw std::runtime_error("gemm: inner dims disagree, A " + shape_to_string(a.shape()) +
                                 " vs B " + shape_to_string(b.shape()));
    const int64_t n = b.shape()[1];
    if (bias) {
        require_rank(*bias, 1, "gemm bias");
        if (bias->shape()[0] != n) throw std::runtime_error("gemm: bias extent must equal N");
    }
    Tensor y(TensorDesc{a.dtype(), {m, n}});
    dispatch_dtype(a.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        gemm_impl<T>(a.data<T>().data(), b.data<T>().data(),
                     bias ? bias->data<T>().data() : nullptr, y.data<T>().data(), m, k, n);
    });
    return y;
}

GemmGrads gemm_backward(const Tensor& dy, const Tensor& a, const Tensor& b, bool has_bias) {
    const int64_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
    if (dy.shape() != std::vector<int64_t>{m, n})
        throw std::runtime_error("gemm backward: dY shape mismatch");
    GemmGrads g;
    g.da = Tensor(TensorDesc{a.dtype(), {m, k}});
    g.db = Tensor(TensorDesc{a.dtype(), {k, n}});
    dispatch_dtype(a.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto A = a.data<T>();
        auto B = b.data<T>();
        auto dY = dy.data<T>();
        auto dA = g.da.data<T>();
        auto dB = g.db.data<T>();
        // dA = dY * B^T
        for (int64_t i = 0; i < m; ++i)
            for (int64_t p = 0; p < k; ++p) {
                T acc = 0;
                for (int64_t j = 0; j < n; ++j) acc += dY[i * n + j] * B[p * n + j];
                dA[i * k + p] = acc;
            }
        // dB = A^T * dY
        for (int64_t p = 0; p < k; ++p)
            for (int64_t j = 0; j < n; ++j) {
                T acc = 0;
                for (int64_t i = 0; i < m; ++i) acc += A[i * k + p] * dY[i * n + j];
                dB[p * n + j] = acc;
            }
        if (has_bias) {
            g.dc = Tensor(TensorDesc{a.dtype(), {n}});
            auto dC = g.dc->data<T>();
            for (int64_t j = 0; j < n; ++j) {
                T acc = 0;
                for (int64_t i = 0; i < m; ++i) acc += dY[i * n + j];
                dC[j] = acc;
            }
        }
    });
    return g;
}

Tensor im2col(const Tensor& x, const ConvAttrs& attrs) {
    require_rank(x, 4, "im2col input");
    const auto& s = x.shape();
    const int64_t n = s[0], c = s[1], h = s[2], w = s[3];
    auto [oh, ow] = attrs.out_extents(h, w);
    const int64_t kh = attrs.kernel[0], kw = attrs.kernel[1];
    Tensor cols(TensorDesc{x.dtype(), {n, c * kh * kw, oh * ow}});
    dispatch_dtype(x.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto X = x.data<T>();
        auto C = cols.data<T>();
        const int64_t patch = c * kh * kw, spatial = oh * ow;
        for (int64_t ni = 0; ni < n; ++ni)
            for (int64_t ci = 0; ci < c; ++ci)
                for (int64_t ki = 0; ki < kh; ++ki)
                    for (int64_t kj = 0; kj < kw; ++kj) {
                        const int64_t row = (ci * kh + ki) * kw + kj;
                        for (int64_t oi = 0; oi < oh; ++oi) {
                            const int64_t ih = oi * attrs.strides[0] - attrs.pads[0] +
                                               ki * attrs.dilations[0];
                            for (int64_t oj = 0; oj < ow; ++oj) {
                                const int64_t iw = oj * attrs.strides[1] - attrs.pads[1] +
                                                   kj * attrs.dilations[1];
                                T v = 0;
                                if (ih >= 0 && ih < h && iw >= 0 && iw < w)
                                    v = X[((ni * c + ci) * h + ih) * w + iw];
                                C[(ni * patch + row) * spatial + oi * ow + oj] = v;
                            }
                        }
                    }
    });
    return cols;
}

namespace {

// Scatter-add of column gradients back into the input layout.
template <class T>
void col2im_accumulate(std::span<const T> dcols, std::span<T> dx, int64_t n, int64_t c, int64_t h,
                       int64_t w, int64_t oh, int64_t ow, const ConvAttrs& attrs) {
    const int64_t kh = attrs.kernel[0], kw = attrs.kernel[1];
    const int64_t patch = c * kh * kw, spatial = oh * ow;
    for (int64_t ni = 0; ni < n; ++ni)
        for (int64_t ci = 0; ci < c; ++ci)
            for (int64_t ki = 0; ki < kh; ++ki)
                for (int64_t kj = 0; kj < kw; ++kj) {
                    const int64_t row = (ci * kh + ki) * kw + kj;
                    for (int64_t oi = 0; oi < oh; ++oi) {
                        const int64_t ih = oi * attrs.strides[0] - attrs.pads[0] +
                                           ki * attrs.dilations[0];
                        if (ih < 0 || ih >= h) continue;
                        for (int64_t oj = 0; oj < ow; ++oj) {
                            const int64_t iw = oj * attrs.strides[1] - attrs.pads[1] +
                                               kj * attrs.dilations[1];
                            if (iw < 0 || iw >= w) continue;
                            dx[((ni * c + ci) * h + ih) * w + iw] +=
                                dcols[(ni * patch + row) * spatial + oi * ow + oj];
                        }
                    }
                }
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor* bias, const ConvAttrs& attrs) {
    require_rank(x, 4, "conv2d input");
    require_rank(w, 4, "conv2d weight");
    require_same_dtype(x, w, "conv2d");
    const auto& xs = x.shape();
    const auto& ws = w.shape();
    if (ws[1] != xs[1])
        throw std::runtime_error("conv2d: weight channel extent must match input channels");
    if (ws[2] != attrs.kernel[0] || ws[3] != attrs.kernel[1])
        throw std::runtime_error("conv2d: weight spatial extents must match kernel attrs");
    const int64_t n = xs[0], f = ws[0];
    auto [oh, ow] = attrs.out_extents(xs[2], xs[3]);
    if (bias) {
        require_rank(*bias, 1, "conv2d bias");
        if (bias->shape()[0] != f) throw std::runtime_error("conv2d: bias extent must equal F");
    }

    Tensor cols = im2col(x, attrs);
    const int64_t patch = ws[1] * ws[2] * ws[3], spatial = oh * ow;
    Tensor y(TensorDesc{x.dtype(), {n, f, oh, ow}});
    dispatch_dtype(x.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto W = w.data<T>();
        auto C = cols.data<T>();
        auto Y = y.data<T>();
        const T* B = bias ? bias->data<T>().data() : nullptr;
        for (int64_t ni = 0; ni < n; ++ni)
            gemm_impl<T>(W.data(), C.data() + ni * patch * spatial, nullptr,
                         Y.data() + ni * f * spatial, f, patch, spatial);
        if (B)
            for (int64_t ni = 0; ni < n; ++ni)
                for (int64_t fi = 0; fi < f; ++fi)
                    for (int64_t si = 0; si < spatial; ++si)
                        Y[(ni * f + fi) * spatial + si] += B[fi];
    });
    return y;
}

ConvGrads conv2d_backward(const Tensor& dy, const Tensor& x, const Tensor& w, bool has_bias,
                          const ConvAttrs& attrs) {
    const auto& xs = x.shape();
    const auto& ws = w.shape();
    const int64_t n = xs[0], c = xs[1], h = xs[2], wd = xs[3], f = ws[0];
    auto [oh, ow] = attrs.out_extents(h, wd);
    if (dy.shape() != std::vector<int64_t>{n, f, oh, ow})
        throw std::runtime_error("conv2d backward: dY shape mismatch");

    Tensor cols = im2col(x, attrs);
    const int64_t patch = c * ws[2] * ws[3], spatial = oh * ow;
    ConvGrads g;
    g.dx = Tensor(TensorDesc{x.dtype(), xs});
    g.dw = Tensor(TensorDesc{x.dtype(), ws});
    dispatch_dtype(x.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto dY = dy.data<T>();
        auto C = cols.data<T>();
        auto W = w.data<T>();
        auto dW = g.dw.data<T>();
        auto dX = g.dx.data<T>();
        std::vector<T> dcols(size_t(n) * patch * spatial, T(0));
        // dW += dY_n * cols_n^T, n ascending
        for (int64_t ni = 0; ni < n; ++ni) {
            const T* dyn = dY.data() + ni * f * spatial;
            const T* cn = C.data() + ni * patch * spatial;
            for (int64_t fi = 0; fi < f; ++fi)
                for (int64_t p = 0; p < patch; ++p) {
                    T acc = 0;
                    for (int64_t si = 0; si < spatial; ++si)
                        acc += dyn[fi * spatial + si] * cn[p * spatial + si];
                    dW[fi * patch + p] += acc;
                }
            // dcols_n = W^T * dY_n
            T* dcn = dcols.data() + ni * patch * spatial;
            for (int64_t p = 0; p < patch; ++p)
                for (int64_t si = 0; si < spatial; ++si) {
                    T acc = 0;
                    for (int64_t fi = 0; fi < f; ++fi)
                        acc += W[fi * patch + p] * dyn[fi * spatial + si];
                    dcn[p * spatial + si] = acc;
                }
        }
        col2im_accumulate<T>(dcols, dX, n, c, h, wd, oh, ow, attrs);
        if (has_bias) {
            g.db = Tensor(TensorDesc{x.dtype(), {f}});
            auto dB = g.db->data<T>();
            for (int64_t fi = 0; fi < f; ++fi) {
                T acc = 0;
                for (int64_t ni = 0; ni < n; ++ni)
                    for (int64_t si = 0; si < spatial; ++si)
                        acc += dY[(ni * f + fi) * spatial + si];
                dB[fi] = acc;
            }
        }
    });
    return g;
}

namespace {

struct PoolDims {
    int64_t n, c, h, w, kh, kw, sh, sw, oh, ow;
};

PoolDims pool_dims(const Tensor& x, const std::vector<int64_t>& window,
                   const std::vector<int64_t>& strides) {
    require_rank(x, 4, "pool2d input");
    if (window.size() != 2 || strides.size() != 2)
        throw std::runtime_error("pool2d: window and strides need 2 entries");
    if (window[0] < 1 || window[1] < 1 || strides[0] < 1 || strides[1] < 1)
        throw std::runtime_error("pool2d: window and strides must be >= 1");
    PoolDims d{x.shape()[0], x.shape()[1], x.shape()[2], x.shape()[3],
               window[0],    window[1],    strides[0],   strides[1],
               0,            0};
    if (d.kh > d.h || d.kw > d.w)
        throw std::runtime_error("pool2d: window does not fit within input extents");
    d.oh = (d.h - d.kh) / d.sh + 1;
    d.ow = (d.w - d.kw) / d.sw + 1;
    return d;
}

}  // namespace

Tensor pool2d(const Tensor& x, PoolKind kind, std::vector<int64_t> window,
              std::vector<int64_t> strides) {
    PoolDims d = pool_dims(x, window, strides);
    Tensor y(TensorDesc{x.dtype(), {d.n, d.c, d.oh, d.ow}});
    dispatch_dtype(x.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto X = x.data<T>();
        auto Y = y.data<T>();
        std::vector<T> win(size_t(d.kh * d.kw));
        for (int64_t ni = 0; ni < d.n; ++ni)
            for (int64_t ci = 0; ci < d.c; ++ci)
                for (int64_t oi = 0; oi < d.oh; ++oi)
                    for (int64_t oj = 0; oj < d.ow; ++oj) {
                        const int64_t base = ((ni * d.c + ci) * d.h + oi * d.sh) * d.w + oj * d.sw;
                        T out;
                        if (kind == PoolKind::Max) {
                            out = X[base];
                            for (int64_t ki = 0; ki < d.kh; ++ki)
                                for (int64_t kj = 0; kj < d.kw; ++kj)
                                    out = std::max(out, X[base + ki * d.w + kj]);
                        } else {
                            size_t idx = 0;
                            for (int64_t ki = 0; ki < d.kh; ++ki)
                                for (int64_t kj = 0; kj < d.kw; ++kj)
                                    win[idx++] = X[base + ki * d.w + kj];
                            std::sort(win.begin(), win.end());
                            const size_t m = win.size();
                            out = (m % 2 == 1) ? win[m / 2]
                                               : T((double(win[m / 2 - 1]) + double(win[m / 2])) / 2.0);
                        }
                        Y[((ni * d.c + ci) * d.oh + oi) * d.ow + oj] = out;
                    }
    });
    return y;
}

Tensor pool2d_backward(const Tensor& dy, const Tensor& x, PoolKind kind,
                       std::vector<int64_t> window, std::vector<int64_t> strides) {
    PoolDims d = pool_dims(x, window, strides);
    if (dy.shape() != std::vector<int64_t>{d.n, d.c, d.oh, d.ow})
        throw std::runtime_error("pool2d backward: dY shape mismatch");
    Tensor dx(TensorDesc{x.dtype(), x.shape()});
    dispatch_dtype(x.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto X = x.data<T>();
        auto dY = dy.data<T>();
        auto dX = dx.data<T>();
        std::vector<std::pair<T, int64_t>> win(size_t(d.kh * d.kw));
        for (int64_t ni = 0; ni < d.n; ++ni)
            for (int64_t ci = 0; ci < d.c; ++ci)
                for (int64_t oi = 0; oi < d.oh; ++oi)
                    for (int64_t oj = 0; oj < d.ow; ++oj) {
                        const int64_t base = ((ni * d.c + ci) * d.h + oi * d.sh) * d.w + oj * d.sw;
                        const T g = dY[((ni * d.c + ci) * d.oh + oi) * d.ow + oj];
                        if (kind == PoolKind::Max) {
                            int64_t best = base;
                            T bv = X[base];
                            for (int64_t ki = 0; ki < d.kh; ++ki)
                                for (int64_t kj = 0; kj < d.kw; ++kj) {
                                    const int64_t at = base + ki * d.w + kj;
                                    if (X[at] > bv) {  // first occurrence wins on ties
                                        bv = X[at];
                                        best = at;
                                    }
                                }
                            dX[best] += g;
                        } else {
                            size_t idx = 0;
                            for (int64_t ki = 0; ki < d.kh; ++ki)
                                for (int64_t kj = 0; kj < d.kw; ++kj) {
                                    const int64_t at = base + ki * d.w + kj;
                                    win[idx++] = {X[at], at};
                                }
                            std::sort(win.begin(), win.end());
                            const size_t m = win.size();
                            if (m % 2 == 1) {
                                dX[win[m / 2].second] += g;
                            } else {
                                dX[win[m / 2 - 1].second] += g / T(2);
                                dX[win[m / 2].second] += g / T(2);
                            }
                        }
                    }
    });
    return dx;
}

namespace {

void require_labels(const Tensor& logits, const Tensor& labels) {
    require_rank(logits, 2, "softmax_xent logits");
    require_rank(labels, 1, "softmax_xent labels");
    if (labels.shape()[0] != logits.shape()[0])
        throw std::runtime_error("softmax_xent: label count must match batch");
    const int64_t c = logits.shape()[1];
    for (int64_t i = 0; i < labels.numel(); ++i) {
        const double l = labels.at(i);
        if (l < 0 || l >= double(c) || l != std::floor(l))
            throw std::runtime_error("softmax_xent: label out of range [0," + std::to_string(c) +
                                     ") at row " + std::to_string(i));
    }
}

}  // namespace

Tensor softmax(const Tensor& logits) {
    require_rank(logits, 2, "softmax input");
    const int64_t n = logits.shape()[0], c = logits.shape()[1];
    Tensor probs(TensorDesc{logits.dtype(), {n, c}});
    dispatch_dtype(logits.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto Z = logits.data<T>();
        auto P = probs.data<T>();
        for (int64_t i = 0; i < n; ++i) {
            T mx = Z[i * c];
            for (int64_t j = 1; j < c; ++j) mx = std::max(mx, Z[i * c + j]);
            T sum = 0;
            for (int64_t j = 0; j < c; ++j) {
                P[i * c + j] = std::exp(Z[i * c + j] - mx);
                sum += P[i * c + j];
            }
            for (int64_t j = 0; j < c; ++j) P[i * c + j] /= sum;
        }
    });
    return probs;
}

Tensor softmax_backward(const Tensor& dprobs, const Tensor& probs) {
    const int64_t n = probs.shape()[0], c = probs.shape()[1];
    Tensor dz(TensorDesc{probs.dtype(), {n, c}});
    dispatch_dtype(probs.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto dP = dprobs.data<T>();
        auto P = probs.data<T>();
        auto dZ = dz.data<T>();
        for (int64_t i = 0; i < n; ++i) {
            T dot = 0;
            for (int64_t j = 0; j < c; ++j) dot += dP[i * c + j] * P[i * c + j];
            for (int64_t j = 0; j < c; ++j) dZ[i * c + j] = P[i * c + j] * (dP[i * c + j] - dot);
        }
    });
    return dz;
}

SoftmaxXentResult softmax_xent(const Tensor& logits, const Tensor& labels) {
    require_labels(logits, labels);
    const int64_t n = logits.shape()[0], c = logits.shape()[1];
    SoftmaxXentResult r;
    r.probs = softmax(logits);
    r.loss = Tensor(TensorDesc{logits.dtype(), {1}});
    double loss = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        const int64_t y = int64_t(labels.at(i));
        loss += -std::log(r.probs.at(i * c + y));
    }
    r.loss.set(0, loss / double(n));
    return r;
}

Tensor softmax_xent_backward(double dloss, const Tensor& probs, const Tensor& labels) {
    const int64_t n = probs.shape()[0], c = probs.shape()[1];
    Tensor dz(TensorDesc{probs.dtype(), {n, c}});
    const double s = dloss / double(n);
    dispatch_dtype(probs.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto P = probs.data<T>();
        auto dZ = dz.data<T>();
        for (int64_t i = 0; i < n; ++i) {
            const int64_t y = int64_t(labels.at(i));
            for (int64_t j = 0; j < c; ++j) {
                T onehot = (j == y) ? T(1) : T(0);
                dZ[i * c + j] = T((double(P[i * c + j]) - double(onehot)) * s);
            }
        }
    });
    return dz;
}

std::vector<Tensor> split(const Tensor& x, int64_t axis, const std::vector<int64_t>& parts) {
    const auto& s = x.shape();
    if (axis < 0 || axis >= int64_t(s.size())) throw std::runtime_error("split: axis out of range");
    int64_t total = 0;
    for (int64_t p : parts) {
        if (p < 1) throw std::runtime_error("split: parts must be >= 1");
        total += p;
    }
    if (total != s[size_t(axis)])
        throw std::runtime_error("split: parts sum " + std::to_string(total) +
                                 " does not equal extent " + std::to_string(s[size_t(axis)]));
    int64_t outer = 1, inner = 1;
    for (int64_t i = 0; i < axis; ++i) outer *= s[size_t(i)];
    for (size_t i = size_t(axis) + 1; i < s.size(); ++i) inner *= s[i];
    const int64_t extent = s[size_t(axis)];

    std::vector<Tensor> out;
    int64_t offset = 0;
    for (int64_t p : parts) {
        std::vector<int64_t> shape = s;
        shape[size_t(axis)] = p;
        Tensor t(TensorDesc{x.dtype(), shape});
        dispatch_dtype(x.dtype(), [&](auto tag) {
            using T = typename decltype(tag)::type;
            auto X = x.data<T>();
            auto Y = t.data<T>();
            for (int64_t o = 0; o < outer; ++o)
                for (int64_t a = 0; a < p; ++a)
                    std::copy_n(X.data() + (o * extent + offset + a) * inner, inner,
                                Y.data() + (o * p + a) * inner);
        });
        offset += p;
        out.push_back(std::move(t));
    }
    return out;
}

Tensor concat(std::span<const Tensor> parts, int64_t axis) {
    if (parts.empty()) throw std::runtime_error("concat: no inputs");
    const auto& s0 = parts[0].shape();
    if (axis < 0 || axis >= int64_t(s0.size()))
        throw std::runtime_error("concat: axis out of range");
    int64_t extent = 0;
    for (const Tensor& t : parts) {
        if (t.dtype() != parts[0].dtype()) throw std::runtime_error("concat: dtype mismatch");
        if (t.shape().size() != s0.size()) throw std::runtime_error("concat: rank mismatch");
        for (size_t i = 0; i < s0.size(); ++i)
            if (int64_t(i) != axis && t.shape()[i] != s0[i])
                throw std::runtime_error("concat: non-axis extents must match");
        extent += t.shape()[size_t(axis)];
    }
    std::vector<int64_t> shape = s0;
    shape[size_t(axis)] = extent;
    Tensor out(TensorDesc{parts[0].dtype(), shape});
    int64_t outer = 1, inner = 1;
    for (int64_t i = 0; i < axis; ++i) outer *= s0[size_t(i)];
    for (size_t i = size_t(axis) + 1; i < s0.size(); ++i) inner *= s0[i];
    dispatch_dtype(out.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto Y = out.data<T>();
        int64_t offset = 0;
        for (const Tensor& t : parts) {
            auto X = t.data<T>();
            const int64_t p = t.shape()[size_t(axis)];
            for (int64_t o = 0; o < outer; ++o)
                for (int64_t a = 0; a < p; ++a)
                    std::copy_n(X.data() + (o * p + a) * inner, inner,
                                Y.data() + (o * extent + offset + a) * inner);
            offset += p;
        }
    });
    return out;
}

Tensor relu_backward(const Tensor& dy, const Tensor& x) {
    if (dy.shape() != x.shape()) throw std::runtime_error("relu backward: shape mismatch");
    Tensor dx(TensorDesc{x.dtype(), x.shape()});
    dispatch_dtype(x.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto X = x.data<T>();
        auto dY = dy.data<T>();
        auto dX = dx.data<T>();
        for (size_t i = 0; i < X.size(); ++i) dX[i] = X[i] > T(0) ? dY[i] : T(0);
    });
    return dx;
}

}  // namespace bench500
