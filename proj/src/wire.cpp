#include "bench500/wire.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace bench500 {

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(uint8_t((v >> (8 * k)) & 0xFF));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int k = 0; k < 8; ++k) out.push_back(uint8_t((v >> (8 * k)) & 0xFF));
}

uint32_t get_u32(std::span<const uint8_t> b, size_t at) {
    uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= uint32_t(b[at + size_t(k)]) << (8 * k);
    return v;
}

uint64_t get_u64(std::span<const uint8_t> b, size_t at) {
    uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= uint64_t(b[at + size_t(k)]) << (8 * k);
    return v;
}

}  // namespace

std::vector<uint8_t> encode_frame(const Message& msg) {
    std::vector<uint8_t> out;
    out.reserve(kFrameHeaderBytes + msg.payload.size());
    put_u32(out, uint32_t(msg.payload.size()));
    out.push_back(uint8_t(msg.type));
    put_u32(out, msg.sender);
    put_u64(out, msg.step_tag);
    put_u32(out, msg.tensor_id);
    out.insert(out.end(), msg.payload.begin(), msg.payload.end());
    return out;
}

Message decode_frame(std::span<const uint8_t> bytes) {
    if (bytes.size() < kFrameHeaderBytes) throw std::runtime_error("frame: truncated header");
    Message m;
    const uint32_t len = get_u32(bytes, 0);
    if (bytes[4] > uint8_t(MsgType::Shutdown)) throw std::runtime_error("frame: unknown msg type");
    m.type = MsgType(bytes[4]);
    m.sender = get_u32(bytes, 5);
    m.step_tag = get_u64(bytes, 9);
    m.tensor_id = get_u32(bytes, 17);
    if (bytes.size() != kFrameHeaderBytes + len)
        throw std::runtime_error("frame: payload length mismatch");
    m.payload.assign(bytes.begin() + kFrameHeaderBytes, bytes.end());
    return m;
}

std::vector<uint8_t> encode_dense(const Tensor& t) { return t.to_bytes(); }

Tensor decode_dense(std::span<const uint8_t> payload, const TensorDesc& desc) {
    return Tensor::from_bytes(desc, std::vector<uint8_t>(payload.begin(), payload.end()));
}

std::vector<uint8_t> encode_sparse(const SparseEntries& e) {
    if (e.indices.size() != e.values.size())
        throw std::runtime_error("sparse: index/value count mismatch");
    std::vector<uint8_t> out;
    const size_t vsize = dtype_size(e.value_dtype);
    out.reserve(4 + e.indices.size() * (4 + vsize) + 4 + e.counts.size() * 4);
    put_u32(out, uint32_t(e.indices.size()));
    for (size_t i = 0; i < e.indices.size(); ++i) {
        put_u32(out, e.indices[i]);
        if (e.value_dtype == DType::F32) {
            float f = float(e.values[i]);
            uint32_t bits;
            std::memcpy(&bits, &f, 4);
            put_u32(out, bits);
        } else {
            uint64_t bits;
            double d = e.values[i];
            std::memcpy(&bits, &d, 8);
            put_u64(out, bits);
        }
    }
    const bool has_counts = !e.counts.empty();
    put_u32(out, has_counts ? 1 : 0);
    if (has_counts) {
        if (e.counts.size() != e.indices.size())
            throw std::runtime_error("sparse: count list must match entries");
        for (uint32_t c : e.counts) put_u32(out, c);
    }
    return out;
}

SparseEntries decode_sparse(std::span<const uint8_t> payload, DType value_dtype) {
    SparseEntries e;
    e.value_dtype = value_dtype;
    const size_t vsize = dtype_size(value_dtype);
    if (payload.size() < 4) throw std::runtime_error("sparse: truncated");
    const uint32_t nnz = get_u32(payload, 0);
    size_t at = 4;
    if (payload.size() < at + size_t(nnz) * (4 + vsize) + 4)
        throw std::runtime_error("sparse: truncated entries");
    for (uint32_t i = 0; i < nnz; ++i) {
        e.indices.push_back(get_u32(payload, at));
        at += 4;
        if (value_dtype == DType::F32) {
            uint32_t bits = get_u32(payload, at);
            float f;
            std::memcpy(&f, &bits, 4);
            e.values.push_back(double(f));
            at += 4;
        } else {
            uint64_t bits = get_u64(payload, at);
            double d;
            std::memcpy(&d, &bits, 8);
            e.values.push_back(d);
            at += 8;
        }
    }
    const uint32_t flag = get_u32(payload, at);
    at += 4;
    if (flag) {
        if (payload.size() < at + size_t(nnz) * 4) throw std::runtime_error("sparse: truncated counts");
        for (uint32_t i = 0; i < nnz; ++i) {
            e.counts.push_back(get_u32(payload, at));
            at += 4;
        }
    }
    if (at != payload.size()) throw std::runtime_error("sparse: trailing bytes");
    return e;
}

void CommStats::resize(size_t endpoints) {
    sent_.resize(endpoints);
    received_.resize(endpoints);
    node_step_bytes_.resize(endpoints);
}

void CommStats::record_send(uint32_t src, uint32_t dst, const Message& msg, bool cross_node,
                            uint32_t src_node) {
    (void)dst;
    sent_[src].bytes += msg.payload.size();
    sent_[src].msgs += 1;
    if (cross_node) node_step_bytes_[src_node][msg.step_tag] += msg.payload.size();
}

void CommStats::record_recv(uint32_t dst, const Message& msg) {
    received_[dst].bytes += msg.payload.size();
    received_[dst].msgs += 1;
}

uint64_t CommStats::total_sent_bytes() const {
    uint64_t v = 0;
    for (const Counter& c : sent_) v += c.bytes;
    return v;
}

uint64_t CommStats::total_received_bytes() const {
    uint64_t v = 0;
    for (const Counter& c : received_) v += c.bytes;
    return v;
}

uint64_t CommStats::total_sent_msgs() const {
    uint64_t v = 0;
    for (const Counter& c : sent_) v += c.msgs;
    return v;
}

uint64_t CommStats::node_training_bytes(uint32_t node) const {
    uint64_t v = 0;
    for (const auto& [step, bytes] : node_step_bytes_[node])
        if (step >= 1) v += bytes;
    return v;
}

uint64_t CommStats::node_step_bytes(uint32_t node, uint64_t step) const {
    auto it = node_step_bytes_[node].find(step);
    return it == node_step_bytes_[node].end() ? 0 : it->second;
}

uint64_t CommStats::max_node_training_bytes() const {
    uint64_t best = 0;
    for (size_t n = 0; n < node_step_bytes_.size(); ++n)
        best = std::max(best, node_training_bytes(uint32_t(n)));
    return best;
}

void CommStats::merge_from(const CommStats& other) {
    if (endpoints() < other.endpoints()) resize(other.endpoints());
    for (size_t i = 0; i < other.endpoints(); ++i) {
        sent_[i].bytes += other.sent_[i].bytes;
        sent_[i].msgs += other.sent_[i].msgs;
        received_[i].bytes += other.received_[i].bytes;
        received_[i].msgs += other.received_[i].msgs;
        for (const auto& [step, bytes] : other.node_step_bytes_[i])
            node_step_bytes_[i][step] += bytes;
    }
}

}  // namespace bench500
