#include "bench500/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>

namespace bench500 {

namespace {

uint64_t mix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

uint64_t latency_draw(uint64_t seed, uint32_t src, uint32_t dst, uint64_t seq, uint64_t base,
                      uint64_t jitter) {
    if (jitter == 0) return base;
    const uint64_t key = mix64(seed) ^ mix64((uint64_t(src) << 32) | dst);
    return base + mix64(key + seq) % (jitter + 1);
}

class SimTransport final : public Transport {
  public:
    SimTransport(SimWorld* world, uint32_t endpoint) : world_(world), me_(endpoint) {}
    uint32_t endpoint() const override { return me_; }
    uint32_t world_size() const override { return world_->workers(); }
    void send(uint32_t dst, Message msg) override { world_->do_send(me_, dst, std::move(msg)); }
    Message recv(uint32_t src) override { return world_->do_recv(me_, src); }
    Message recv_any() override { return world_->do_recv_any(me_); }
    void tick(uint64_t ns) override { world_->do_tick(me_, ns); }
    void finish() override { world_->do_finish(me_); }

  private:
    SimWorld* world_;
    uint32_t me_;
};

}  // namespace

SimWorld::SimWorld(uint32_t workers, bool with_server, SimOptions options)
    : workers_(workers), endpoints_(workers + (with_server ? 1 : 0)), opts_(options) {
    vtime_.assign(endpoints_, 0);
    state_.assign(endpoints_, EpState::Running);
    wait_src_.assign(endpoints_, 0);
    inbox_.resize(endpoints_);
    send_seq_.assign(endpoints_, std::vector<uint64_t>(endpoints_, 0));
    last_arrival_.assign(endpoints_, std::vector<uint64_t>(endpoints_, 0));
    stats_.resize(endpoints_);
}

SimWorld::~SimWorld() = default;

std::unique_ptr<Transport> SimWorld::endpoint_transport(uint32_t endpoint) {
    if (endpoint >= endpoints_) throw std::runtime_error("sim: endpoint out of range");
    return std::make_unique<SimTransport>(this, endpoint);
}

void SimWorld::do_send(uint32_t src, uint32_t dst, Message msg) {
    std::lock_guard<std::mutex> lock(mu_);
    if (dst >= endpoints_) throw std::runtime_error("sim: send to unknown endpoint");
    msg.sender = src;
    const uint64_t seq = send_seq_[src][dst]++;
    uint64_t arrival = vtime_[src] + latency_draw(opts_.seed, src, dst, seq,
                                                  opts_.base_latency_ns, opts_.jitter_ns);
    // FIFO per channel: arrival stamps never reorder within (src, dst). The
    // high-water mark is persistent so stamps do not depend on whether
    // earlier messages happen to have been consumed already.
    arrival = std::max(arrival, last_arrival_[src][dst]);
    last_arrival_[src][dst] = arrival;
    stats_.record_send(src, dst, msg, node_of(src) != node_of(dst), node_of(src));
    inbox_[dst].push_back(Pending{arrival, src, seq, std::move(msg)});
    cv_.notify_all();
}

Message SimWorld::do_recv(uint32_t me, uint32_t src) {
    std::unique_lock<std::mutex> lock(mu_);
    auto channel_front = [&]() -> std::vector<Pending>::iterator {
        auto best = inbox_[me].end();
        for (auto it = inbox_[me].begin(); it != inbox_[me].end(); ++it)
            if (it->src == src && (best == inbox_[me].end() || it->seq < best->seq)) best = it;
        return best;
    };
    state_[me] = EpState::BlockedRecv;
    wait_src_[me] = src;
    cv_.notify_all();
    cv_.wait(lock, [&] {
        if (channel_front() != inbox_[me].end()) return true;
        if (state_[src] == EpState::Done) return true;  // dropout surfaces below
        return false;
    });
    auto it = channel_front();
    if (it == inbox_[me].end())
        throw std::runtime_error("sim transport: endpoint " + std::to_string(src) +
                                 " finished without sending (worker dropout)");
    Message msg = std::move(it->msg);
    vtime_[me] = std::max(vtime_[me], it->arrival);
    stats_.record_recv(me, msg);
    inbox_[me].erase(it);
    state_[me] = EpState::Running;
    cv_.notify_all();
    return msg;
}

bool SimWorld::all_others_parked(uint32_t me) const {
    for (uint32_t e = 0; e < endpoints_; ++e) {
        if (e == me) continue;
        if (state_[e] == EpState::Running) return false;
        if (state_[e] == EpState::BlockedRecv) {
            // A blocked receiver whose awaited channel already has a message
            // is logically runnable; it just has not been scheduled yet.
            for (const Pending& p : inbox_[e])
                if (p.src == wait_src_[e]) return false;
            if (state_[wait_src_[e]] == EpState::Done) return false;  // about to throw
        }
    }
    return true;
}

Message SimWorld::do_recv_any(uint32_t me) {
    // Conservative dispatch: wait until no other endpoint can still produce
    // an earlier message, then take the smallest (arrival, src, seq). Only a
    // single endpoint (the parameter server) may use recv_any at a time.
    std::unique_lock<std::mutex> lock(mu_);
    state_[me] = EpState::BlockedRecvAny;
    cv_.notify_all();
    cv_.wait(lock, [&] { return all_others_parked(me); });
    if (inbox_[me].empty())
        throw std::runtime_error("sim transport: recv_any with no pending messages");
    auto best = inbox_[me].begin();
    for (auto it = inbox_[me].begin(); it != inbox_[me].end(); ++it)
        if (*it < *best) best = it;
    Message msg = std::move(best->msg);
    vtime_[me] = std::max(vtime_[me], best->arrival);
    stats_.record_recv(me, msg);
    inbox_[me].erase(best);
    state_[me] = EpState::Running;
    cv_.notify_all();
    return msg;
}

void SimWorld::do_tick(uint32_t me, uint64_t ns) {
    std::lock_guard<std::mutex> lock(mu_);
    vtime_[me] += ns;
}

void SimWorld::do_finish(uint32_t me) {
    std::lock_guard<std::mutex> lock(mu_);
    state_[me] = EpState::Done;
    cv_.notify_all();
}

namespace {

class TcpTransport final : public Transport {
  public:
    TcpTransport(TcpWorld* world, uint32_t endpoint, uint32_t workers)
        : world_(world), me_(endpoint), workers_(workers) {}
    uint32_t endpoint() const override { return me_; }
    uint32_t world_size() const override { return workers_; }
    void send(uint32_t dst, Message msg) override { world_->do_send(dst, std::move(msg)); }
    Message recv(uint32_t src) override { return world_->do_recv(src); }
    Message recv_any() override { return world_->do_recv_any(); }
    void tick(uint64_t) override {}
    void finish() override {}

  private:
    TcpWorld* world_;
    uint32_t me_;
    uint32_t workers_;
};

void write_all(int fd, const uint8_t* data, size_t len) {
    size_t done = 0;
    while (done < len) {
        ssize_t n = ::send(fd, data + done, len - done, MSG_NOSIGNAL);
        if (n <= 0) {
            if (n < 0 && (errno == EINTR)) continue;
            throw std::runtime_error("tcp: send failed");
        }
        done += size_t(n);
    }
}

bool read_all(int fd, uint8_t* data, size_t len) {
    size_t done = 0;
    while (done < len) {
        ssize_t n = ::recv(fd, data + done, len - done, 0);
        if (n == 0) return false;
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        done += size_t(n);
    }
    return true;
}

}  // namespace

TcpWorld::TcpWorld(uint32_t workers, bool with_server, uint32_t my_endpoint, TcpOptions options)
    : workers_(workers),
      endpoints_(workers + (with_server ? 1 : 0)),
      me_(my_endpoint),
      opts_(options) {
    conns_.resize(endpoints_);
    channel_.resize(endpoints_);
    stats_.resize(endpoints_);

    int listener = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listener < 0) throw std::runtime_error("tcp: cannot create socket");
    int one = 1;
    ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(uint16_t(opts_.base_port + me_));
    if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(listener);
        throw std::runtime_error("tcp: port " + std::to_string(opts_.base_port + me_) +
                                 " unavailable (port conflict)");
    }
    if (::listen(listener, int(endpoints_)) != 0) {
        ::close(listener);
        throw std::runtime_error("tcp: listen failed");
    }

    // Lower-numbered endpoints are dialed; higher ones dial us.
    for (uint32_t peer = 0; peer < me_; ++peer) {
        int fd = -1;
        const auto deadline = std::chrono::steady_clock::now() +
                              std::chrono::milliseconds(opts_.connect_timeout_ms);
        for (;;) {
            fd = ::socket(AF_INET, SOCK_STREAM, 0);
            sockaddr_in peer_addr{};
            peer_addr.sin_family = AF_INET;
            peer_addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
            peer_addr.sin_port = htons(uint16_t(opts_.base_port + peer));
            if (::connect(fd, reinterpret_cast<sockaddr*>(&peer_addr), sizeof(peer_addr)) == 0)
                break;
            ::close(fd);
            fd = -1;
            if (std::chrono::steady_clock::now() > deadline) {
                ::close(listener);
                throw std::runtime_error("tcp: cannot reach endpoint " + std::to_string(peer));
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        uint32_t hello = htonl(me_);
        write_all(fd, reinterpret_cast<const uint8_t*>(&hello), 4);
        conns_[peer] = std::make_unique<Conn>();
        conns_[peer]->fd = fd;
    }
    for (uint32_t k = me_ + 1; k < endpoints_; ++k) {
        int fd = ::accept(listener, nullptr, nullptr);
        if (fd < 0) {
            ::close(listener);
            throw std::runtime_error("tcp: accept failed");
        }
        uint32_t hello = 0;
        if (!read_all(fd, reinterpret_cast<uint8_t*>(&hello), 4)) {
            ::close(listener);
            throw std::runtime_error("tcp: peer handshake failed");
        }
        const uint32_t peer = ntohl(hello);
        if (peer >= endpoints_ || conns_[peer]) {
            ::close(listener);
            throw std::runtime_error("tcp: bad peer id in handshake");
        }
        conns_[peer] = std::make_unique<Conn>();
        conns_[peer]->fd = fd;
    }
    ::close(listener);

    for (uint32_t peer = 0; peer < endpoints_; ++peer) {
        if (!conns_[peer]) continue;
        int nd = 1;
        ::setsockopt(conns_[peer]->fd, IPPROTO_TCP, TCP_NODELAY, &nd, sizeof(nd));
        conns_[peer]->reader = std::thread([this, peer] { reader_loop(peer); });
        conns_[peer]->writer = std::thread([this, peer] { writer_loop(peer); });
    }
}

TcpWorld::~TcpWorld() {
    for (auto& conn : conns_) {
        if (!conn) continue;
        {
            std::lock_guard<std::mutex> lock(conn->out_mu);
            conn->closing = true;
        }
        conn->out_cv.notify_all();
    }
    for (auto& conn : conns_) {
        if (!conn) continue;
        if (conn->writer.joinable()) conn->writer.join();
        ::shutdown(conn->fd, SHUT_RDWR);
        if (conn->reader.joinable()) conn->reader.join();
        ::close(conn->fd);
    }
}

std::unique_ptr<Transport> TcpWorld::endpoint_transport() {
    return std::make_unique<TcpTransport>(this, me_, workers_);
}

void TcpWorld::do_send(uint32_t dst, Message msg) {
    if (dst >= endpoints_ || !conns_[dst]) throw std::runtime_error("tcp: unknown destination");
    msg.sender = me_;
    {
        std::lock_guard<std::mutex> lock(mu_);
        stats_.record_send(me_, dst, msg, node_of(me_) != node_of(dst), node_of(me_));
    }
    auto frame = encode_frame(msg);
    Conn& c = *conns_[dst];
    {
        std::lock_guard<std::mutex> lock(c.out_mu);
        c.outbox.push_back(std::move(frame));
    }
    c.out_cv.notify_all();
}

void TcpWorld::reader_loop(uint32_t peer) {
    Conn& c = *conns_[peer];
    for (;;) {
        uint8_t head[kFrameHeaderBytes];
        if (!read_all(c.fd, head, sizeof(head))) return;
        uint32_t len = 0;
        for (int k = 0; k < 4; ++k) len |= uint32_t(head[k]) << (8 * k);
        std::vector<uint8_t> frame(head, head + sizeof(head));
        frame.resize(kFrameHeaderBytes + len);
        if (len > 0 && !read_all(c.fd, frame.data() + kFrameHeaderBytes, len)) return;
        Message msg = decode_frame(frame);
        {
            std::lock_guard<std::mutex> lock(mu_);
            stats_.record_recv(me_, msg);
            channel_[msg.sender].push_back(std::move(msg));
        }
        cv_.notify_all();
    }
}

void TcpWorld::writer_loop(uint32_t peer) {
    Conn& c = *conns_[peer];
    for (;;) {
        std::vector<uint8_t> frame;
        {
            std::unique_lock<std::mutex> lock(c.out_mu);
            c.out_cv.wait(lock, [&] { return c.closing || !c.outbox.empty(); });
            if (c.outbox.empty()) return;  // closing with nothing left
            frame = std::move(c.outbox.front());
            c.outbox.pop_front();
        }
        try {
            write_all(c.fd, frame.data(), frame.size());
        } catch (const std::exception&) {
            return;
        }
    }
}

Message TcpWorld::do_recv(uint32_t src) {
    std::unique_lock<std::mutex> lock(mu_);
    if (!cv_.wait_for(lock, std::chrono::milliseconds(60000),
                      [&] { return !channel_[src].empty(); }))
        throw std::runtime_error("tcp: timeout waiting for endpoint " + std::to_string(src) +
                                 " (worker dropout)");
    Message msg = std::move(channel_[src].front());
    channel_[src].pop_front();
    return msg;
}

Message TcpWorld::do_recv_any() {
    std::unique_lock<std::mutex> lock(mu_);
    auto any = [&]() -> int64_t {
        for (size_t s = 0; s < channel_.size(); ++s)
            if (!channel_[s].empty()) return int64_t(s);
        return -1;
    };
    if (!cv_.wait_for(lock, std::chrono::milliseconds(60000), [&] { return any() >= 0; }))
        throw std::runtime_error("tcp: timeout in recv_any (worker dropout)");
    const auto src = size_t(any());
    Message msg = std::move(channel_[src].front());
    channel_[src].pop_front();
    return msg;
}

}  // namespace bench500
