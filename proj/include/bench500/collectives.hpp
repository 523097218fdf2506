#pragma once

#include "bench500/transport.hpp"

namespace bench500 {

// Ring allreduce over worker endpoints 0..p-1: p-1 reduce-scatter rounds,
// p-1 allgather rounds. Each finalized chunk is produced at one owner
// (summed hop by hop in rank-ring order, averaged once) and copied verbatim,
// so all replicas end bit-identical. Per-node payload sent is
// 2*(p-1)/p * tensor bytes.
void allreduce_average(Transport& t, Tensor& tensor, uint64_t step_tag, uint32_t tensor_id);

// Star broadcast of root's tensor bytes to all other workers.
void broadcast_tensor(Transport& t, Tensor& tensor, uint32_t root, uint64_t step_tag,
                      uint32_t tensor_id);

// Zero-payload rendezvous: gather to worker 0, then release.
void barrier(Transport& t, uint64_t step_tag);

// Top-k magnitude sparsified allreduce. Sends ceil(density*n) entries as
// (index, value) pairs, merges by recursive pairwise exchange (hypercube;
// rank-0 gather for non-power-of-two worlds), and divides index sums by the
// world size, so the dense limit matches allreduce_average. The unsent mass
// stays in `residual` and joins the next step's gradient: sent + retained
// equals the input exactly.
void topk_sparse_allreduce(Transport& t, Tensor& tensor, double density, Tensor& residual,
                           uint64_t step_tag, uint32_t tensor_id);

// Chunk [begin, end) of an n-element ring split, sizes differing by <= 1.
std::pair<int64_t, int64_t> ring_chunk_bounds(int64_t n, uint32_t p, uint32_t chunk);

// Accounting oracle helper: payload bytes one rank sends in a full ring
// allreduce of an n-element tensor.
uint64_t ring_allreduce_sent_bytes(int64_t n, uint32_t p, uint32_t rank, size_t elem_size);

}  // namespace bench500
