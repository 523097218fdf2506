#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "bench500/tensor.hpp"

namespace bench500 {

enum class MsgType : uint8_t {
    GradPush = 0,
    ParamBcast = 1,
    ArChunk = 2,
    Barrier = 3,
    Shutdown = 4,
};

// Framed payload exchanged between workers. The frame layout is identical on
// the TCP transport and the in-process simulator:
//   u32 LE payload_len | u8 msg_type | u32 LE sender | u64 LE step_tag |
//   u32 LE tensor_id | payload
struct Message {
    MsgType type = MsgType::Barrier;
    uint32_t sender = 0;
    uint64_t step_tag = 0;
    uint32_t tensor_id = 0;
    std::vector<uint8_t> payload;
};

constexpr size_t kFrameHeaderBytes = 4 + 1 + 4 + 8 + 4;

std::vector<uint8_t> encode_frame(const Message& msg);
// Parses one frame; throws if bytes do not hold exactly one whole frame.
Message decode_frame(std::span<const uint8_t> bytes);

// Dense payload: raw little-endian elements in the tensor's dtype.
std::vector<uint8_t> encode_dense(const Tensor& t);
Tensor decode_dense(std::span<const uint8_t> payload, const TensorDesc& desc);

// Sparse payload: u32 LE nnz | nnz x (u32 LE index, value) | u32 LE
// count-weights flag | [nnz x u32 LE count]. Values are f32 for f32 runs and
// f64 for f64 oracle runs.
struct SparseEntries {
    std::vector<uint32_t> indices;
    std::vector<double> values;
    std::vector<uint32_t> counts;  // empty unless the flag is set
    DType value_dtype = DType::F32;
};
std::vector<uint8_t> encode_sparse(const SparseEntries& entries);
SparseEntries decode_sparse(std::span<const uint8_t> payload, DType value_dtype);

// Per-endpoint traffic accounting. Raw counters include node-local messages
// (in-process totals balance exactly); node_sent_bytes counts only payload
// bytes that cross nodes, keyed by step tag, which is what the
// communication-volume metric reports.
class CommStats {
  public:
    explicit CommStats(size_t endpoints = 0) { resize(endpoints); }
    void resize(size_t endpoints);

    void record_send(uint32_t src, uint32_t dst, const Message& msg, bool cross_node,
                     uint32_t src_node);
    void record_recv(uint32_t dst, const Message& msg);

    struct Counter {
        uint64_t bytes = 0;
        uint64_t msgs = 0;
    };

    const Counter& sent(uint32_t endpoint) const { return sent_[endpoint]; }
    const Counter& received(uint32_t endpoint) const { return received_[endpoint]; }
    size_t endpoints() const { return sent_.size(); }

    uint64_t total_sent_bytes() const;
    uint64_t total_received_bytes() const;
    uint64_t total_sent_msgs() const;

    // Cross-node payload bytes by (node, step_tag) and the per-node totals
    // over training steps (step_tag >= 1; tag 0 is the initial replica sync).
    uint64_t node_training_bytes(uint32_t node) const;
    uint64_t node_step_bytes(uint32_t node, uint64_t step) const;
    uint64_t max_node_training_bytes() const;

    void merge_from(const CommStats& other);

  private:
    std::vector<Counter> sent_, received_;
    std::vector<std::map<uint64_t, uint64_t>> node_step_bytes_;
};

}  // namespace bench500
