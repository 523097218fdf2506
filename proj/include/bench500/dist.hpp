#pragma once

#include "bench500/collectives.hpp"
#include "bench500/train.hpp"

namespace bench500 {

enum class Scheme { Dsgd, Dpsgd, Mavg, Pssgd, Asgd, Ssp };
Scheme scheme_from_name(const std::string& name);
const char* scheme_name(Scheme s);
bool scheme_is_centralized(Scheme s);

enum class TransportKind { Sim, Tcp };
enum class ShardMode { Shard, GlobalSlice };

struct DistConfig {
    Scheme scheme = Scheme::Dsgd;
    uint32_t workers = 2;
    TransportKind transport = TransportKind::Sim;
    ShardMode sharding = ShardMode::Shard;
    int64_t local_batch = 16;
    int64_t steps = 50;  // optimizer steps per worker
    uint64_t seed = 1;
    OptimizerConfig opt;
    double density = 1.0;    // < 1 enables top-k sparse allreduce under dsgd
    int64_t mavg_every = 10;
    int64_t staleness = 3;   // ssp bound; >= 0
    SimOptions sim;
    TcpOptions tcp;
    bool record_loss = true;

    std::string x_input = "x";
    std::string y_input = "labels";
    std::string loss_edge = "loss";
};

struct DistResult {
    std::vector<NetworkGraph> worker_graphs;  // final replica per worker
    CommStats stats;                          // merged over endpoints
    std::vector<MetricRecord> metrics;        // per-worker loss + step log
    int64_t steps = 0;
    uint32_t workers = 0;
    uint64_t model_bytes = 0;

    const NetworkGraph& final_graph() const { return worker_graphs.at(0); }
};

// Seeded permutation split into p near-equal contiguous shards
// (sizes differ by at most one).
std::vector<Dataset> partition_dataset(const Dataset& data, uint32_t parts, uint64_t seed);

// Shared global sample schedule: one slab of global_batch dataset rows per
// step, drawn from seeded per-epoch permutations. Under ShardMode::GlobalSlice
// worker m consumes rows [m*B_local, (m+1)*B_local) of each slab, and a
// sequential run over whole slabs consumes identical data, which is the
// synchronous-SGD consistency oracle.
std::vector<std::vector<int64_t>> global_schedule(int64_t dataset_size, int64_t global_batch,
                                                  int64_t steps, uint64_t seed);

DistResult run_distributed(const NetworkGraph& model, const Dataset& data, const DistConfig& cfg);

// Scheme-family entry points over the same engine.
DistResult run_decentralized(const NetworkGraph& model, const Dataset& data, DistConfig cfg);
DistResult run_centralized(const NetworkGraph& model, const Dataset& data, DistConfig cfg);

struct CommVolumeReport {
    uint32_t workers = 0;
    int64_t steps = 0;
    std::string scheme;
    uint64_t total_payload_bytes = 0;
    uint64_t total_messages = 0;
    std::vector<uint64_t> node_bytes;       // cross-node payload per node, training steps
    uint64_t per_node_bytes = 0;            // max over nodes (bottleneck link)
    double per_node_bytes_per_step = 0;
};

CommVolumeReport record_comm_volume(const DistResult& run, Scheme scheme);

// Enforced stale-synchronous invariant from the step log: max over time of
// (fastest worker step - slowest worker step).
int64_t max_step_spread(const std::vector<MetricRecord>& metrics, uint32_t workers);

}  // namespace bench500
