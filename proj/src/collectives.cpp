#include "bench500/collectives.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <stdexcept>

namespace bench500 {

std::pair<int64_t, int64_t> ring_chunk_bounds(int64_t n, uint32_t p, uint32_t chunk) {
    const int64_t begin = n * int64_t(chunk) / int64_t(p);
    const int64_t end = n * int64_t(chunk + 1) / int64_t(p);
    return {begin, end};
}

uint64_t ring_allreduce_sent_bytes(int64_t n, uint32_t p, uint32_t rank, size_t elem_size) {
    if (p < 2) return 0;
    uint64_t elems = 0;
    for (uint32_t round = 0; round < p - 1; ++round) {
        const uint32_t rs_chunk = (rank + p - round) % p;
        auto [b1, e1] = ring_chunk_bounds(n, p, rs_chunk);
        elems += uint64_t(e1 - b1);
        const uint32_t ag_chunk = (rank + 1 + p - round) % p;
        auto [b2, e2] = ring_chunk_bounds(n, p, ag_chunk);
        elems += uint64_t(e2 - b2);
    }
    return elems * elem_size;
}

namespace {

template <class T>
std::vector<uint8_t> chunk_bytes(std::span<const T> data, int64_t begin, int64_t end) {
    std::vector<uint8_t> out(size_t(end - begin) * sizeof(T));
    std::memcpy(out.data(), data.data() + begin, out.size());
    return out;
}

template <class T>
void chunk_from_bytes(std::span<const uint8_t> bytes, std::span<T> data, int64_t begin,
                      int64_t end) {
    if (bytes.size() != size_t(end - begin) * sizeof(T))
        throw std::runtime_error("allreduce: chunk payload size mismatch");
    std::memcpy(data.data() + begin, bytes.data(), bytes.size());
}

template <class T>
void run_ring(Transport& t, std::span<T> data, uint64_t step_tag, uint32_t tensor_id) {
    const uint32_t p = t.world_size();
    const uint32_t r = t.endpoint();
    if (p == 1) return;
    const uint32_t right = (r + 1) % p;
    const uint32_t left = (r + p - 1) % p;
    const int64_t n = int64_t(data.size());

    // Reduce-scatter: after p-1 rounds rank r holds the full sum of chunk
    // (r+1) mod p. Hops accumulate in f64 and round to T per hop.
    for (uint32_t round = 0; round + 1 < p; ++round) {
        const uint32_t out_chunk = (r + p - round) % p;
        auto [ob, oe] = ring_chunk_bounds(n, p, out_chunk);
        Message m;
        m.type = MsgType::ArChunk;
        m.step_tag = step_tag;
        m.tensor_id = tensor_id;
        m.payload = chunk_bytes(std::span<const T>(data), ob, oe);
        t.send(right, std::move(m));

        const uint32_t in_chunk = (r + p - round - 1 + p) % p;
        auto [ib, ie] = ring_chunk_bounds(n, p, in_chunk);
        Message in = t.recv(left);
        if (in.step_tag != step_tag || in.tensor_id != tensor_id)
            throw std::runtime_error("allreduce: step/tensor tag mismatch across workers");
        if (in.payload.size() != size_t(ie - ib) * sizeof(T))
            throw std::runtime_error("allreduce: reduce-scatter chunk size mismatch");
        const T* incoming = reinterpret_cast<const T*>(in.payload.data());
        for (int64_t i = 0; i < ie - ib; ++i)
            data[size_t(ib + i)] = T(double(data[size_t(ib + i)]) + double(incoming[i]));
    }

    // Average the owned chunk once; it is final from here on.
    const uint32_t own = (r + 1) % p;
    auto [sb, se] = ring_chunk_bounds(n, p, own);
    for (int64_t i = sb; i < se; ++i) data[size_t(i)] = T(double(data[size_t(i)]) / double(p));

    // Allgather: circulate finalized chunks verbatim.
    for (uint32_t round = 0; round + 1 < p; ++round) {
        const uint32_t out_chunk = (r + 1 + p - round) % p;
        auto [ob, oe] = ring_chunk_bounds(n, p, out_chunk);
        Message m;
        m.type = MsgType::ArChunk;
        m.step_tag = step_tag;
        m.tensor_id = tensor_id;
        m.payload = chunk_bytes(std::span<const T>(data), ob, oe);
        t.send(right, std::move(m));

        const uint32_t in_chunk = (r + p - round) % p;
        auto [ib, ie] = ring_chunk_bounds(n, p, in_chunk);
        Message in = t.recv(left);
        chunk_from_bytes<T>(in.payload, data, ib, ie);
    }
}

}  // namespace

void allreduce_average(Transport& t, Tensor& tensor, uint64_t step_tag, uint32_t tensor_id) {
    dispatch_dtype(tensor.dtype(), [&](auto tag) {
        using T = typename decltype(tag)::type;
        run_ring<T>(t, tensor.data<T>(), step_tag, tensor_id);
    });
}

void broadcast_tensor(Transport& t, Tensor& tensor, uint32_t root, uint64_t step_tag,
                      uint32_t tensor_id) {
    const uint32_t p = t.world_size();
    if (p == 1) return;
    if (t.endpoint() == root) {
        for (uint32_t w = 0; w < p; ++w) {
            if (w == root) continue;
            Message m;
            m.type = MsgType::ParamBcast;
            m.step_tag = step_tag;
            m.tensor_id = tensor_id;
            m.payload = encode_dense(tensor);
            t.send(w, std::move(m));
        }
    } else {
        Message m = t.recv(root);
        tensor = decode_dense(m.payload, tensor.desc());
    }
}

void barrier(Transport& t, uint64_t step_tag) {
    const uint32_t p = t.world_size();
    if (p == 1) return;
    Message m;
    m.type = MsgType::Barrier;
    m.step_tag = step_tag;
    if (t.endpoint() == 0) {
        for (uint32_t w = 1; w < p; ++w) t.recv(w);
        for (uint32_t w = 1; w < p; ++w) {
            Message out = m;
            t.send(w, std::move(out));
        }
    } else {
        Message out = m;
        t.send(0, std::move(out));
        t.recv(0);
    }
}

namespace {

SparseEntries top_k_entries(const Tensor& work, int64_t k, DType dtype) {
    const int64_t n = work.numel();
    std::vector<int64_t> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), int64_t{0});
    std::stable_sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
        const double ma = std::abs(work.at(a)), mb = std::abs(work.at(b));
        if (ma != mb) return ma > mb;
        return a < b;  // deterministic tie-break
    });
    order.resize(size_t(std::min(k, n)));
    std::sort(order.begin(), order.end());
    SparseEntries e;
    e.value_dtype = dtype;
    for (int64_t i : order) {
        e.indices.push_back(uint32_t(i));
        e.values.push_back(work.at(i));
    }
    return e;
}

// Union of indices; shared indices sum values and counts.
SparseEntries merge_sparse(const SparseEntries& a, const SparseEntries& b) {
    SparseEntries out;
    out.value_dtype = a.value_dtype;
    std::map<uint32_t, std::pair<double, uint32_t>> merged;
    for (size_t i = 0; i < a.indices.size(); ++i) {
        uint32_t c = a.counts.empty() ? 1 : a.counts[i];
        auto& slot = merged[a.indices[i]];
        slot.first += a.values[i];
        slot.second += c;
    }
    for (size_t i = 0; i < b.indices.size(); ++i) {
        uint32_t c = b.counts.empty() ? 1 : b.counts[i];
        auto& slot = merged[b.indices[i]];
        slot.first += b.values[i];
        slot.second += c;
    }
    for (const auto& [idx, slot] : merged) {
        out.indices.push_back(idx);
        out.values.push_back(slot.first);
        out.counts.push_back(slot.second);
    }
    return out;
}

bool is_power_of_two(uint32_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace

void topk_sparse_allreduce(Transport& t, Tensor& tensor, double density, Tensor& residual,
                           uint64_t step_tag, uint32_t tensor_id) {
    if (density <= 0.0 || density > 1.0)
        throw std::runtime_error("sparse allreduce: density must be in (0, 1]");
    if (residual.shape() != tensor.shape())
        throw std::runtime_error("sparse allreduce: residual shape mismatch");
    const uint32_t p = t.world_size();
    const uint32_t r = t.endpoint();
    const int64_t n = tensor.numel();
    const int64_t k = std::min<int64_t>(n, int64_t(std::ceil(density * double(n))));

    // Residual feedback: select from gradient + carried mass.
    Tensor work = add(tensor, residual);
    SparseEntries mine = top_k_entries(work, k, tensor.dtype());

    // Retained = work minus the sent entries, exactly.
    residual = work;
    for (uint32_t idx : mine.indices) residual.set(int64_t(idx), 0.0);

    if (p == 1) {
        Tensor out = Tensor::zeros({tensor.dtype(), tensor.shape()});
        for (size_t i = 0; i < mine.indices.size(); ++i)
            out.set(int64_t(mine.indices[i]), mine.values[i]);
        tensor = std::move(out);
        return;
    }

    mine.counts.assign(mine.indices.size(), 1);
    SparseEntries merged = mine;

    auto exchange = [&](uint32_t partner, const SparseEntries& current) {
        Message m;
        m.type = MsgType::ArChunk;
        m.step_tag = step_tag;
        m.tensor_id = tensor_id;
        m.payload = encode_sparse(current);
        t.send(partner, std::move(m));
        Message in = t.recv(partner);
        return decode_sparse(in.payload, tensor.dtype());
    };

    if (is_power_of_two(p)) {
        // Recursive pairwise merge: after log2(p) exchanges every worker
        // holds the identical union.
        for (uint32_t bit = 1; bit < p; bit <<= 1) {
            const uint32_t partner = r ^ bit;
            SparseEntries theirs = exchange(partner, merged);
            merged = merge_sparse(merged, theirs);
        }
    } else {
        // Gather to rank 0 in rank order, then broadcast the merged list.
        if (r == 0) {
            for (uint32_t w = 1; w < p; ++w) {
                Message in = t.recv(w);
                merged = merge_sparse(merged, decode_sparse(in.payload, tensor.dtype()));
            }
            for (uint32_t w = 1; w < p; ++w) {
                Message m;
                m.type = MsgType::ArChunk;
                m.step_tag = step_tag;
                m.tensor_id = tensor_id;
                m.payload = encode_sparse(merged);
                t.send(w, std::move(m));
            }
        } else {
            Message m;
            m.type = MsgType::ArChunk;
            m.step_tag = step_tag;
            m.tensor_id = tensor_id;
            m.payload = encode_sparse(mine);
            t.send(0, std::move(m));
            Message in = t.recv(0);
            merged = decode_sparse(in.payload, tensor.dtype());
        }
    }

    // Averaged with the world size as the divisor: the dense limit matches
    // allreduce_average and absent contributions count as zero.
    Tensor out = Tensor::zeros({tensor.dtype(), tensor.shape()});
    for (size_t i = 0; i < merged.indices.size(); ++i)
        out.set(int64_t(merged.indices[i]), merged.values[i] / double(p));
    tensor = std::move(out);
}

}  // namespace bench500
