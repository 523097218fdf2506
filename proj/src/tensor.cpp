#include "bench500/tensor.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bench500 {

const char* dtype_name(DType dt) { return dt == DType::F32 ? "f32" : "f64"; }

DType dtype_from_name(const std::string& name) {
    if (name == "f32") return DType::F32;
    if (name == "f64") return DType::F64;
    throw std::runtime_error("unknown dtype '" + name + "' (expected f32 or f64)");
}

size_t dtype_size(DType dt) { return dt == DType::F32 ? 4 : 8; }

int64_t TensorDesc::numel() const {
    int64_t n = 1;
    for (int64_t e : shape) n *= e;
    return n;
}

void TensorDesc::validate() const {
    int64_t n = 1;
    for (int64_t e : shape) {
        if (e < 0) throw std::runtime_error("negative extent in shape " + shape_to_string(shape));
        if (e > 0 && n > std::numeric_limits<int64_t>::max() / e)
            throw std::runtime_error("element count overflows index range for shape " +
                                     shape_to_string(shape));
        n *= e;
    }
}

void TensorDesc::validate_positive() const {
    validate();
    for (int64_t e : shape)
        if (e < 1) throw std::runtime_error("extent must be >= 1 in shape " + shape_to_string(shape));
}

std::string shape_to_string(const std::vector<int64_t>& shape) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << "]";
    return os.str();
}

namespace {

constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;

uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {
    key_ = mix64(seed + kGamma) ^ mix64(stream * 0xD2B74407B1CE6E93ull + kGamma);
}

uint64_t Rng::next_u64() {
    counter_ += 1;
    return mix64(key_ + counter_ * kGamma);
}

double Rng::next_uniform() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }

double Rng::normal(double mean, double stddev) {
    // Box-Muller; u1 nudged away from 0 so log stays finite.
    double u1 = next_uniform();
    double u2 = next_uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

Tensor::Tensor(TensorDesc desc) : desc_(std::move(desc)) {
    desc_.validate();
    dispatch_dtype(desc_.dtype, [&](auto tag) {
        using T = typename decltype(tag)::type;
        storage_ = std::vector<T>(size_t(desc_.numel()), T(0));
    });
}

Tensor Tensor::zeros(TensorDesc desc) { return Tensor(std::move(desc)); }

Tensor Tensor::full(TensorDesc desc, double value) {
    Tensor t(std::move(desc));
    dispatch_dtype(t.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        for (auto& v : t.data<T>()) v = T(value);
    });
    return t;
}

Tensor Tensor::uniform(TensorDesc desc, Rng& rng, double lo, double hi) {
    Tensor t(std::move(desc));
    dispatch_dtype(t.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        for (auto& v : t.data<T>()) v = T(rng.uniform(lo, hi));
    });
    return t;
}

Tensor Tensor::normal(TensorDesc desc, Rng& rng, double mean, double stddev) {
    Tensor t(std::move(desc));
    dispatch_dtype(t.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        for (auto& v : t.data<T>()) v = T(rng.normal(mean, stddev));
    });
    return t;
}

Tensor Tensor::from_values(TensorDesc desc, std::span<const double> values) {
    Tensor t(std::move(desc));
    if (int64_t(values.size()) != t.numel())
        throw std::runtime_error("from_values: value count does not match shape");
    dispatch_dtype(t.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto dst = t.data<T>();
        for (size_t i = 0; i < values.size(); ++i) dst[i] = T(values[i]);
    });
    return t;
}

double Tensor::at(int64_t i) const {
    return dispatch_dtype(dtype(), [&](auto tag) -> double {
        using T = typename decltype(tag)::type;
        return double(data<T>()[size_t(i)]);
    });
}

void Tensor::set(int64_t i, double v) {
    dispatch_dtype(dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        data<T>()[size_t(i)] = T(v);
    });
}

Tensor Tensor::astype(DType dt) const {
    if (dt == dtype()) return *this;
    Tensor out(TensorDesc{dt, desc_.shape});
    for (int64_t i = 0; i < numel(); ++i) out.set(i, at(i));
    return out;
}

Tensor Tensor::reshaped(std::vector<int64_t> new_shape) const {
    TensorDesc nd{dtype(), std::move(new_shape)};
    if (nd.numel() != numel())
        throw std::runtime_error("reshape: element count mismatch " + shape_to_string(desc_.shape) +
                                 " -> " + shape_to_string(nd.shape));
    Tensor out = *this;
    out.desc_ = std::move(nd);
    return out;
}

bool Tensor::all_finite() const {
    return dispatch_dtype(dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        for (T v : data<T>())
            if (!std::isfinite(double(v))) return false;
        return true;
    });
}

std::vector<uint8_t> Tensor::to_bytes() const {
    std::vector<uint8_t> out(desc_.byte_size());
    dispatch_dtype(dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto src = data<T>();
        for (size_t i = 0; i < src.size(); ++i) {
            uint64_t bits;
            if constexpr (sizeof(T) == 4) {
                uint32_t b;
                std::memcpy(&b, &src[i], 4);
                bits = b;
            } else {
                std::memcpy(&bits, &src[i], 8);
            }
            for (size_t k = 0; k < sizeof(T); ++k)
                out[i * sizeof(T) + k] = uint8_t((bits >> (8 * k)) & 0xFF);
        }
    });
    return out;
}

Tensor Tensor::from_bytes(TensorDesc desc, const std::vector<uint8_t>& bytes) {
    Tensor t(std::move(desc));
    if (bytes.size() != t.desc().byte_size())
        throw std::runtime_error("tensor byte payload has wrong length");
    dispatch_dtype(t.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto dst = t.data<T>();
        for (size_t i = 0; i < dst.size(); ++i) {
            uint64_t bits = 0;
            for (size_t k = 0; k < sizeof(T); ++k)
                bits |= uint64_t(bytes[i * sizeof(T) + k]) << (8 * k);
            if constexpr (sizeof(T) == 4) {
                uint32_t b = uint32_t(bits);
                std::memcpy(&dst[i], &b, 4);
            } else {
                std::memcpy(&dst[i], &bits, 8);
            }
        }
    });
    return t;
}

namespace {

void require_binary(const Tensor& a, const Tensor* b, const char* op) {
    if (!b) throw std::runtime_error(std::string(op) + ": second operand required");
    if (a.dtype() != b->dtype())
        throw std::runtime_error(std::string(op) + ": dtype mismatch");
    if (a.shape() != b->shape())
        throw std::runtime_error(std::string(op) + ": shape mismatch " +
                                 shape_to_string(a.shape()) + " vs " + shape_to_string(b->shape()));
}

}  // namespace

Tensor elementwise(EwOp op, const Tensor& a, const Tensor* b, double s) {
    switch (op) {
        case EwOp::Add:
        case EwOp::Sub:
        case EwOp::Mul:
        case EwOp::Div:
            require_binary(a, b, "elementwise");
            break;
        default:
            break;
    }
    Tensor out(TensorDesc{a.dtype(), a.shape()});
    dispatch_dtype(a.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto x = a.data<T>();
        auto y = out.data<T>();
        switch (op) {
            case EwOp::Add: {
                auto z = b->data<T>();
                for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] + z[i];
                break;
            }
            case EwOp::Sub: {
                auto z = b->data<T>();
                for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] - z[i];
                break;
            }
            case EwOp::Mul: {
                auto z = b->data<T>();
                for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] * z[i];
                break;
            }
            case EwOp::Div: {
                auto z = b->data<T>();
                for (size_t i = 0; i < x.size(); ++i) {
                    if (z[i] == T(0)) throw std::runtime_error("elementwise div: division by zero");
                    y[i] = x[i] / z[i];
                }
                break;
            }
            case EwOp::Scale:
                for (size_t i = 0; i < x.size(); ++i) y[i] = T(double(x[i]) * s);
                break;
            case EwOp::Relu:
                for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
                break;
            case EwOp::Exp:
                for (size_t i = 0; i < x.size(); ++i) y[i] = std::exp(x[i]);
                break;
        }
    });
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) { return elementwise(EwOp::Add, a, &b); }
Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(EwOp::Sub, a, &b); }
Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(EwOp::Mul, a, &b); }
Tensor div(const Tensor& a, const Tensor& b) { return elementwise(EwOp::Div, a, &b); }
Tensor scale(const Tensor& a, double s) { return elementwise(EwOp::Scale, a, nullptr, s); }
Tensor relu(const Tensor& a) { return elementwise(EwOp::Relu, a); }
Tensor exp(const Tensor& a) { return elementwise(EwOp::Exp, a); }

NormKind norm_from_name(const std::string& name) {
    if (name == "l1") return NormKind::L1;
    if (name == "l2") return NormKind::L2;
    if (name == "linf") return NormKind::Linf;
    throw std::runtime_error("unknown norm '" + name + "'");
}

double reduce_norm(const Tensor& a, const Tensor& b, NormKind kind) {
    if (a.shape() != b.shape())
        throw std::runtime_error("reduce_norm: shape mismatch " + shape_to_string(a.shape()) +
                                 " vs " + shape_to_string(b.shape()));
    double acc = 0.0;
    for (int64_t i = 0; i < a.numel(); ++i) {
        double d = std::abs(a.at(i) - b.at(i));
        switch (kind) {
            case NormKind::L1: acc += d; break;
            case NormKind::L2: acc += d * d; break;
            case NormKind::Linf: acc = std::max(acc, d); break;
        }
    }
    return kind == NormKind::L2 ? std::sqrt(acc) : acc;
}

Tensor variance_map(std::span<const Tensor> runs) {
    if (runs.size() < 2) throw std::runtime_error("variance_map: need at least 2 runs");
    for (const Tensor& t : runs)
        if (t.shape() != runs[0].shape())
            throw std::runtime_error("variance_map: shape mismatch across runs");
    const int64_t n = runs[0].numel();
    const double count = double(runs.size());
    Tensor out(TensorDesc{runs[0].dtype(), runs[0].shape()});
    for (int64_t i = 0; i < n; ++i) {
        double mean = 0.0;
        for (const Tensor& t : runs) mean += t.at(i);
        mean /= count;
        double ss = 0.0;
        for (const Tensor& t : runs) {
            double d = t.at(i) - mean;
            ss += d * d;
        }
        out.set(i, ss / (count - 1.0));
    }
    return out;
}

}  // namespace bench500
