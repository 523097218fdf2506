#pragma once

#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <thread>

#include "bench500/wire.hpp"

namespace bench500 {

// Message transport between endpoints. Endpoints 0..p-1 are workers; a
// centralized scheme adds one server endpoint with id p, co-located on node
// 0. Delivery is FIFO per (sender, receiver) channel; send never blocks.
class Transport {
  public:
    virtual ~Transport() = default;
    virtual uint32_t endpoint() const = 0;
    virtual uint32_t world_size() const = 0;  // worker endpoints only
    virtual void send(uint32_t dst, Message msg) = 0;
    virtual Message recv(uint32_t src) = 0;
    // Next message from any sender; deterministic on the simulator (smallest
    // virtual arrival time), real arrival order over TCP.
    virtual Message recv_any() = 0;
    // Advance this endpoint's virtual clock (simulated compute); no-op on TCP.
    virtual void tick(uint64_t ns) = 0;
    // Marks this endpoint finished so recv_any waiters stop considering it.
    virtual void finish() = 0;
};

struct SimOptions {
    uint64_t seed = 1;
    uint64_t base_latency_ns = 1000;
    uint64_t jitter_ns = 0;  // 0: lockstep; ties break by (time, src, seq)
};

// Deterministic in-process world: arrival stamps derive from seeded virtual
// time only, so results are independent of real thread scheduling. recv_any
// is conservative: it dispatches only when every other live endpoint is
// blocked or finished, at which point the candidate set is complete.
class SimWorld {
  public:
    SimWorld(uint32_t workers, bool with_server, SimOptions options);
    ~SimWorld();

    std::unique_ptr<Transport> endpoint_transport(uint32_t endpoint);
    uint32_t endpoints() const { return endpoints_; }
    uint32_t workers() const { return workers_; }
    uint32_t server_endpoint() const { return workers_; }  // valid if with_server
    uint32_t node_of(uint32_t endpoint) const { return endpoint == workers_ ? 0 : endpoint; }

    CommStats& stats() { return stats_; }

    struct Pending {
        uint64_t arrival = 0;
        uint32_t src = 0;
        uint64_t seq = 0;  // per-channel sequence
        Message msg;
        bool operator<(const Pending& o) const {
            return std::tie(arrival, src, seq) < std::tie(o.arrival, o.src, o.seq);
        }
    };

    enum class EpState { Running, BlockedRecv, BlockedRecvAny, Done };

    // Endpoint-facing operations; Transport handles forward here.
    void do_send(uint32_t src, uint32_t dst, Message msg);
    Message do_recv(uint32_t me, uint32_t src);
    Message do_recv_any(uint32_t me);
    void do_tick(uint32_t me, uint64_t ns);
    void do_finish(uint32_t me);

  private:
    bool all_others_parked(uint32_t me) const;

    uint32_t workers_;
    uint32_t endpoints_;
    SimOptions opts_;

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::vector<uint64_t> vtime_;
    std::vector<EpState> state_;
    std::vector<uint32_t> wait_src_;  // channel a BlockedRecv endpoint waits on
    // inbox_[dst]: pending messages ordered by (arrival, src, seq)
    std::vector<std::vector<Pending>> inbox_;
    std::vector<std::vector<uint64_t>> send_seq_;       // [src][dst]
    std::vector<std::vector<uint64_t>> last_arrival_;   // FIFO high-water per channel
    CommStats stats_;
};

struct TcpOptions {
    uint16_t base_port = 47500;
    int connect_timeout_ms = 10000;
};

// Loopback TCP mesh with the frozen frame layout. Each connection has a
// writer thread (send never blocks the caller) and a reader thread that
// routes frames into per-channel queues plus an arrival queue for recv_any.
class TcpWorld {
  public:
    TcpWorld(uint32_t workers, bool with_server, uint32_t my_endpoint, TcpOptions options);
    ~TcpWorld();

    std::unique_ptr<Transport> endpoint_transport();
    uint32_t node_of(uint32_t endpoint) const { return endpoint == workers_ ? 0 : endpoint; }
    CommStats& stats() { return stats_; }

    struct Conn {
        int fd = -1;
        std::thread reader;
        std::thread writer;
        std::mutex out_mu;
        std::condition_variable out_cv;
        std::deque<std::vector<uint8_t>> outbox;
        bool closing = false;
    };

    void do_send(uint32_t dst, Message msg);
    Message do_recv(uint32_t src);
    Message do_recv_any();

  private:
    void reader_loop(uint32_t peer);
    void writer_loop(uint32_t peer);

    uint32_t workers_;
    uint32_t endpoints_;
    uint32_t me_;
    TcpOptions opts_;

    std::vector<std::unique_ptr<Conn>> conns_;  // indexed by peer endpoint

    std::mutex mu_;
    std::condition_variable cv_;
    std::vector<std::deque<Message>> channel_;            // per-src queues
    std::deque<std::pair<uint32_t, uint64_t>> arrivals_;  // (src, index in channel order)
    CommStats stats_;
};

}  // namespace bench500
