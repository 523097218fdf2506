#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace bench500 {

enum class DType : uint8_t { F32 = 0, F64 = 1 };

const char* dtype_name(DType dt);
DType dtype_from_name(const std::string& name);
size_t dtype_size(DType dt);

// Dense row-major descriptor. 4-D image tensors are NCHW (batch first).
struct TensorDesc {
    DType dtype = DType::F32;
    std::vector<int64_t> shape;

    int64_t numel() const;
    size_t byte_size() const { return size_t(numel()) * dtype_size(dtype); }
    // Rejects negative extents and element-count overflow. Zero extents are
    // tolerated structurally (degenerate parsers produce them); callers that
    // require positive extents use validate_positive().
    void validate() const;
    void validate_positive() const;
    bool operator==(const TensorDesc& o) const = default;
};

std::string shape_to_string(const std::vector<int64_t>& shape);

// Counter-based splittable PRNG (splitmix64 output function over a keyed
// counter). Identical (seed, stream) gives an identical value sequence on
// every platform; pure 64-bit integer arithmetic, no libm in the core path.
class Rng {
  public:
    explicit Rng(uint64_t seed, uint64_t stream = 0);

    uint64_t next_u64();
    double next_uniform();  // [0, 1)
    double uniform(double lo, double hi);
    double normal(double mean, double stddev);  // Box-Muller, 2 draws per call

    Rng split(uint64_t stream) const { return Rng(seed_, stream); }
    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

  private:
    uint64_t seed_;
    uint64_t stream_;
    uint64_t key_;
    uint64_t counter_ = 0;
};

// Dense numeric array. Storage dtype is f32 or f64; immutable by convention
// once built except for explicitly exclusive parameter updates.
class Tensor {
  public:
    Tensor() = default;
    explicit Tensor(TensorDesc desc);  // zero-filled

    static Tensor zeros(TensorDesc desc);
    static Tensor full(TensorDesc desc, double value);
    static Tensor uniform(TensorDesc desc, Rng& rng, double lo, double hi);
    static Tensor normal(TensorDesc desc, Rng& rng, double mean, double stddev);
    static Tensor from_values(TensorDesc desc, std::span<const double> values);

    const TensorDesc& desc() const { return desc_; }
    DType dtype() const { return desc_.dtype; }
    const std::vector<int64_t>& shape() const { return desc_.shape; }
    int64_t numel() const { return desc_.numel(); }

    template <class T> std::span<const T> data() const {
        return std::span<const T>(std::get<std::vector<T>>(storage_));
    }
    template <class T> std::span<T> data() {
        return std::span<T>(std::get<std::vector<T>>(storage_));
    }

    // dtype-erased element access, used by metrics/tests; hot loops use data<T>().
    double at(int64_t i) const;
    void set(int64_t i, double v);

    Tensor astype(DType dt) const;
    Tensor reshaped(std::vector<int64_t> new_shape) const;  // same element count

    bool same_shape(const Tensor& o) const { return desc_.shape == o.desc_.shape; }
    bool all_finite() const;

    // Raw little-endian element bytes (serialization).
    std::vector<uint8_t> to_bytes() const;
    static Tensor from_bytes(TensorDesc desc, const std::vector<uint8_t>& bytes);

  private:
    TensorDesc desc_;
    std::variant<std::vector<float>, std::vector<double>> storage_;
};

// Calls f with a std::type_identity tag for the runtime dtype.
template <class F> decltype(auto) dispatch_dtype(DType dt, F&& f) {
    if (dt == DType::F32) return f(std::type_identity<float>{});
    return f(std::type_identity<double>{});
}

enum class EwOp { Add, Sub, Mul, Div, Scale, Relu, Exp };

// Binary ops need identical shapes and dtypes; no broadcasting. Div by zero
// throws rather than producing inf.
Tensor elementwise(EwOp op, const Tensor& a, const Tensor* b = nullptr, double scale = 1.0);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor relu(const Tensor& a);
Tensor exp(const Tensor& a);

enum class NormKind { L1, L2, Linf };
NormKind norm_from_name(const std::string& name);

// Norm of (a - b); the flattened difference for L2.
double reduce_norm(const Tensor& a, const Tensor& b, NormKind kind);

// Per-element unbiased sample variance across >= 2 same-shaped tensors.
Tensor variance_map(std::span<const Tensor> runs);

}  // namespace bench500
