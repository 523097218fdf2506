#pragma once

#include "bench500/tensor.hpp"

namespace bench500 {

struct Dataset {
    std::string name;
    Tensor features;  // first extent = sample count
    Tensor labels;    // [n], integral class ids stored as the features dtype
    int64_t class_count = 0;

    int64_t size() const { return features.shape().empty() ? 0 : features.shape()[0]; }
    void validate() const;
};

// IDX container: big-endian header (u16 zero, u8 dtype code, u8 ndims,
// ndims x u32 extents), then payload. Only dtype code 0x08 (u8) is supported.
// Rank >= 2 payloads are pixel data and scale to f32 in [0,1]; rank-1
// payloads are labels and stay integral. Trailing bytes are rejected.
Tensor parse_idx(std::span<const uint8_t> bytes);
Tensor parse_idx_file(const std::string& path);

// Inverse of parse_idx for u8 data: rank >= 2 tensors are descaled by 255.
std::vector<uint8_t> serialize_idx(const Tensor& t);
void write_idx_file(const Tensor& t, const std::string& path);

enum class SyntheticKind { GaussianBlobs, Constant };

// gaussian-blobs places class means on coordinate axes at distance 4 sigma,
// so the classes are linearly separable by construction. Labels cycle
// round-robin; everything is a pure function of the seed.
Dataset synthetic_dataset(const std::vector<int64_t>& sample_shape, int64_t samples,
                          int64_t classes, SyntheticKind kind, uint64_t seed,
                          DType dtype = DType::F32);

// Manifest: JSON {name, images_path, labels_path, classes}; paths relative
// to the manifest's directory.
Dataset load_dataset_manifest(const std::string& manifest_path);

Dataset take_subset(const Dataset& d, int64_t offset, int64_t count);

}  // namespace bench500
