#pragma once

#include <memory>

#include "bench500/data_io.hpp"

namespace bench500 {

struct Minibatch {
    Tensor x;
    Tensor y;
};

// Minibatch policy over a dataset. One epoch yields floor(n/B) batches; the
// final partial batch is dropped.
class Sampler {
  public:
    virtual ~Sampler() = default;
    virtual void start_epoch(int64_t epoch) = 0;
    // Fills `indices` with the next B dataset rows, or returns false at epoch end.
    virtual bool next_indices(int64_t batch, std::vector<int64_t>& indices) = 0;
    virtual int64_t dataset_size() const = 0;
};

class SequentialSampler final : public Sampler {
  public:
    explicit SequentialSampler(int64_t n);
    void start_epoch(int64_t epoch) override;
    bool next_indices(int64_t batch, std::vector<int64_t>& indices) override;
    int64_t dataset_size() const override { return n_; }

  private:
    int64_t n_;
    int64_t cursor_ = 0;
};

// One seeded permutation per epoch; every sample visited exactly once.
class ShuffleSampler final : public Sampler {
  public:
    ShuffleSampler(int64_t n, uint64_t seed);
    void start_epoch(int64_t epoch) override;
    bool next_indices(int64_t batch, std::vector<int64_t>& indices) override;
    int64_t dataset_size() const override { return int64_t(perm_.size()); }

  private:
    uint64_t seed_;
    std::vector<int64_t> perm_;
    int64_t cursor_ = 0;
};

std::vector<int64_t> seeded_permutation(int64_t n, Rng& rng);

// Gathers dataset rows into (x, y) batch tensors.
Minibatch gather_minibatch(const Dataset& d, std::span<const int64_t> indices);

// Samples the next minibatch under the sampler's policy; throws on an empty
// dataset or invalid batch size. Returns false at epoch end.
bool sample_minibatch(Sampler& sampler, const Dataset& d, int64_t batch, Minibatch& out);

// Label histogram of everything the sampler yields over `epochs` epochs.
std::vector<int64_t> dataset_bias(Sampler& sampler, const Dataset& d, int64_t batch,
                                  int64_t epochs);

}  // namespace bench500
