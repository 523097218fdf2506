#include "bench500/data_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bench500 {

void Dataset::validate() const {
    if (features.shape().empty() || labels.shape().size() != 1)
        throw std::runtime_error("dataset: features need rank >= 1, labels rank 1");
    if (features.shape()[0] != labels.shape()[0])
        throw std::runtime_error("dataset: sample counts of features and labels differ");
    for (int64_t i = 0; i < labels.numel(); ++i) {
        double l = labels.at(i);
        if (l < 0 || l >= double(class_count) || l != std::floor(l))
            throw std::runtime_error("dataset: label out of range at row " + std::to_string(i));
    }
}

Tensor parse_idx(std::span<const uint8_t> bytes) {
    if (bytes.size() < 4) throw std::runtime_error("idx: truncated header");
    if (bytes[0] != 0 || bytes[1] != 0)
        throw std::runtime_error("idx: bad magic (first two bytes must be zero)");
    const uint8_t dtype_code = bytes[2];
    if (dtype_code != 0x08)
        throw std::runtime_error("idx: unsupported dtype code " + std::to_string(dtype_code));
    const uint8_t ndims = bytes[3];
    const size_t header = 4 + size_t(ndims) * 4;
    if (bytes.size() < header) throw std::runtime_error("idx: truncated extent list");

    std::vector<int64_t> shape;
    int64_t count = 1;
    for (uint8_t d = 0; d < ndims; ++d) {
        uint32_t e = (uint32_t(bytes[4 + d * 4]) << 24) | (uint32_t(bytes[5 + d * 4]) << 16) |
                     (uint32_t(bytes[6 + d * 4]) << 8) | uint32_t(bytes[7 + d * 4]);
        shape.push_back(int64_t(e));
        count *= int64_t(e);
    }
    if (bytes.size() != header + size_t(count))
        throw std::runtime_error("idx: payload length mismatch, expected " +
                                 std::to_string(count) + " data bytes, got " +
                                 std::to_string(bytes.size() - header));

    Tensor t(TensorDesc{DType::F32, shape});
    auto out = t.data<float>();
    const bool scale = ndims >= 2;  // pixel data; rank-1 files hold labels
    for (int64_t i = 0; i < count; ++i) {
        const uint8_t v = bytes[header + size_t(i)];
        out[size_t(i)] = scale ? float(v) / 255.0f : float(v);
    }
    return t;
}

Tensor parse_idx_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open idx file '" + path + "'");
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                               std::istreambuf_iterator<char>());
    try {
        return parse_idx(bytes);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(e.what()) + " (file '" + path + "')");
    }
}

std::vector<uint8_t> serialize_idx(const Tensor& t) {
    const auto& shape = t.shape();
    if (shape.empty() || shape.size() > 255) throw std::runtime_error("idx: unsupported rank");
    std::vector<uint8_t> out{0, 0, 0x08, uint8_t(shape.size())};
    for (int64_t e : shape) {
        if (e < 0 || e > int64_t(UINT32_MAX)) throw std::runtime_error("idx: extent out of range");
        out.push_back(uint8_t((e >> 24) & 0xFF));
        out.push_back(uint8_t((e >> 16) & 0xFF));
        out.push_back(uint8_t((e >> 8) & 0xFF));
        out.push_back(uint8_t(e & 0xFF));
    }
    const bool scaled = shape.size() >= 2;
    for (int64_t i = 0; i < t.numel(); ++i) {
        double v = t.at(i);
        if (scaled) v = v * 255.0;
        long r = std::lround(v);
        if (r < 0 || r > 255)
            throw std::runtime_error("idx: value out of u8 range at index " + std::to_string(i));
        out.push_back(uint8_t(r));
    }
    return out;
}

void write_idx_file(const Tensor& t, const std::string& path) {
    auto bytes = serialize_idx(t);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

Dataset synthetic_dataset(const std::vector<int64_t>& sample_shape, int64_t samples,
                          int64_t classes, SyntheticKind kind, uint64_t seed, DType dtype) {
    if (samples < 1) throw std::runtime_error("synthetic_dataset: need at least one sample");
    if (kind == SyntheticKind::GaussianBlobs && classes < 2)
        throw std::runtime_error("synthetic_dataset: blobs need at least 2 classes");
    if (classes < 1) throw std::runtime_error("synthetic_dataset: classes must be >= 1");
    TensorDesc fdesc{dtype, {}};
    fdesc.shape.push_back(samples);
    int64_t dim = 1;
    for (int64_t e : sample_shape) {
        fdesc.shape.push_back(e);
        dim *= e;
    }
    fdesc.validate_positive();

    Dataset d;
    d.name = kind == SyntheticKind::GaussianBlobs ? "synthetic-blobs" : "synthetic-constant";
    d.class_count = classes;
    d.features = Tensor(fdesc);
    d.labels = Tensor(TensorDesc{dtype, {samples}});

    Rng rng(seed, 0);
    for (int64_t i = 0; i < samples; ++i) {
        const int64_t label = i % classes;
        d.labels.set(i, double(label));
        if (kind == SyntheticKind::Constant) {
            for (int64_t j = 0; j < dim; ++j) d.features.set(i * dim + j, 0.5);
        } else {
            const int64_t axis = label % dim;
            for (int64_t j = 0; j < dim; ++j) {
                double mean = (j == axis) ? 4.0 : 0.0;
                d.features.set(i * dim + j, rng.normal(mean, 1.0));
            }
        }
    }
    return d;
}

Dataset load_dataset_manifest(const std::string& manifest_path) {
    std::ifstream f(manifest_path);
    if (!f) throw std::runtime_error("cannot open dataset manifest '" + manifest_path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("manifest parse error in '" + manifest_path + "': " + e.what());
    }
    for (const char* key : {"name", "images_path", "labels_path", "classes"})
        if (!doc.contains(key))
            throw std::runtime_error("manifest '" + manifest_path + "' missing '" + key + "'");

    const auto base = std::filesystem::path(manifest_path).parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    Dataset d;
    d.name = doc.at("name").get<std::string>();
    d.class_count = doc.at("classes").get<int64_t>();
    d.features = parse_idx_file(resolve(doc.at("images_path").get<std::string>()));
    d.labels = parse_idx_file(resolve(doc.at("labels_path").get<std::string>()));
    d.validate();
    return d;
}

Dataset take_subset(const Dataset& d, int64_t offset, int64_t count) {
    if (offset < 0 || count < 1 || offset + count > d.size())
        throw std::runtime_error("take_subset: range out of bounds");
    const int64_t dim = d.features.numel() / d.size();
    std::vector<int64_t> fshape = d.features.shape();
    fshape[0] = count;
    Dataset out;
    out.name = d.name;
    out.class_count = d.class_count;
    out.features = Tensor(TensorDesc{d.features.dtype(), fshape});
    out.labels = Tensor(TensorDesc{d.labels.dtype(), {count}});
    for (int64_t i = 0; i < count; ++i) {
        for (int64_t j = 0; j < dim; ++j)
            out.features.set(i * dim + j, d.features.at((offset + i) * dim + j));
        out.labels.set(i, d.labels.at(offset + i));
    }
    return out;
}

}  // namespace bench500
