#include "bench500/sampler.hpp"

#include <numeric>
#include <stdexcept>

namespace bench500 {

SequentialSampler::SequentialSampler(int64_t n) : n_(n) {
    if (n < 1) throw std::runtime_error("sampler: empty dataset");
}

void SequentialSampler::start_epoch(int64_t) { cursor_ = 0; }

bool SequentialSampler::next_indices(int64_t batch, std::vector<int64_t>& indices) {
    if (batch < 1 || batch > n_) throw std::runtime_error("sampler: invalid batch size");
    if (cursor_ + batch > n_) return false;  // partial batch dropped
    indices.resize(size_t(batch));
    std::iota(indices.begin(), indices.end(), cursor_);
    cursor_ += batch;
    return true;
}

std::vector<int64_t> seeded_permutation(int64_t n, Rng& rng) {
    std::vector<int64_t> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), int64_t{0});
    // Fisher-Yates with the pinned generator; rejection-free index draw.
    for (int64_t i = n - 1; i > 0; --i) {
        int64_t j = int64_t(rng.next_u64() % uint64_t(i + 1));
        std::swap(perm[size_t(i)], perm[size_t(j)]);
    }
    return perm;
}

ShuffleSampler::ShuffleSampler(int64_t n, uint64_t seed) : seed_(seed), perm_(size_t(n)) {
    if (n < 1) throw std::runtime_error("sampler: empty dataset");
    std::iota(perm_.begin(), perm_.end(), int64_t{0});
}

void ShuffleSampler::start_epoch(int64_t epoch) {
    Rng rng(seed_, uint64_t(epoch));
    perm_ = seeded_permutation(int64_t(perm_.size()), rng);
    cursor_ = 0;
}

bool ShuffleSampler::next_indices(int64_t batch, std::vector<int64_t>& indices) {
    const int64_t n = int64_t(perm_.size());
    if (batch < 1 || batch > n) throw std::runtime_error("sampler: invalid batch size");
    if (cursor_ + batch > n) return false;
    indices.assign(perm_.begin() + cursor_, perm_.begin() + cursor_ + batch);
    cursor_ += batch;
    return true;
}

Minibatch gather_minibatch(const Dataset& d, std::span<const int64_t> indices) {
    if (d.size() < 1) throw std::runtime_error("gather_minibatch: empty dataset");
    const int64_t dim = d.features.numel() / d.size();
    std::vector<int64_t> xshape = d.features.shape();
    xshape[0] = int64_t(indices.size());
    Minibatch mb;
    mb.x = Tensor(TensorDesc{d.features.dtype(), xshape});
    mb.y = Tensor(TensorDesc{d.labels.dtype(), {int64_t(indices.size())}});
    dispatch_dtype(d.features.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        auto src = d.features.data<T>();
        auto dst = mb.x.data<T>();
        for (size_t i = 0; i < indices.size(); ++i)
            std::copy_n(src.data() + indices[i] * dim, dim, dst.data() + int64_t(i) * dim);
    });
    for (size_t i = 0; i < indices.size(); ++i) mb.y.set(int64_t(i), d.labels.at(indices[i]));
    return mb;
}

bool sample_minibatch(Sampler& sampler, const Dataset& d, int64_t batch, Minibatch& out) {
    std::vector<int64_t> idx;
    if (!sampler.next_indices(batch, idx)) return false;
    out = gather_minibatch(d, idx);
    return true;
}

std::vector<int64_t> dataset_bias(Sampler& sampler, const Dataset& d, int64_t batch,
                                  int64_t epochs) {
    std::vector<int64_t> hist(size_t(d.class_count), 0);
    std::vector<int64_t> idx;
    for (int64_t e = 0; e < epochs; ++e) {
        sampler.start_epoch(e);
        while (sampler.next_indices(batch, idx))
            for (int64_t i : idx) hist[size_t(d.labels.at(i))] += 1;
    }
    return hist;
}

}  // namespace bench500
