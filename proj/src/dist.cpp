#include "bench500/dist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace bench500 {

Scheme scheme_from_name(const std::string& name) {
    if (name == "dsgd") return Scheme::Dsgd;
    if (name == "dpsgd") return Scheme::Dpsgd;
    if (name == "mavg") return Scheme::Mavg;
    if (name == "pssgd") return Scheme::Pssgd;
    if (name == "asgd") return Scheme::Asgd;
    if (name == "ssp") return Scheme::Ssp;
    throw std::runtime_error("unknown scheme '" + name +
                             "' (expected dsgd|dpsgd|mavg|pssgd|asgd|ssp)");
}

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Dsgd: return "dsgd";
        case Scheme::Dpsgd: return "dpsgd";
        case Scheme::Mavg: return "mavg";
        case Scheme::Pssgd: return "pssgd";
        case Scheme::Asgd: return "asgd";
        case Scheme::Ssp: return "ssp";
    }
    return "?";
}

bool scheme_is_centralized(Scheme s) {
    return s == Scheme::Pssgd || s == Scheme::Asgd || s == Scheme::Ssp;
}

std::vector<Dataset> partition_dataset(const Dataset& data, uint32_t parts, uint64_t seed) {
    const int64_t n = data.size();
    if (int64_t(parts) > n)
        throw std::runtime_error("partition_dataset: more shards than samples");
    if (parts == 0) throw std::runtime_error("partition_dataset: parts must be >= 1");
    Rng rng(seed, 0);
    std::vector<int64_t> perm = seeded_permutation(n, rng);
    std::vector<Dataset> shards;
    const int64_t base = n / int64_t(parts);
    const int64_t rem = n % int64_t(parts);
    int64_t at = 0;
    for (uint32_t k = 0; k < parts; ++k) {
        const int64_t take = base + (int64_t(k) < rem ? 1 : 0);
        std::vector<int64_t> idx(perm.begin() + at, perm.begin() + at + take);
        at += take;
        Minibatch rows = gather_minibatch(data, idx);
        Dataset shard;
        shard.name = data.name + "/shard" + std::to_string(k);
        shard.class_count = data.class_count;
        shard.features = std::move(rows.x);
        shard.labels = std::move(rows.y);
        shards.push_back(std::move(shard));
    }
    return shards;
}

std::vector<std::vector<int64_t>> global_schedule(int64_t dataset_size, int64_t global_batch,
                                                  int64_t steps, uint64_t seed) {
    if (global_batch < 1 || global_batch > dataset_size)
        throw std::runtime_error("global_schedule: invalid global batch");
    std::vector<std::vector<int64_t>> slabs;
    ShuffleSampler sampler(dataset_size, seed);
    int64_t epoch = 0;
    sampler.start_epoch(epoch);
    std::vector<int64_t> idx;
    while (int64_t(slabs.size()) < steps) {
        if (!sampler.next_indices(global_batch, idx)) {
            sampler.start_epoch(++epoch);
            continue;
        }
        slabs.push_back(idx);
    }
    return slabs;
}

namespace {

struct ParamInfo {
    std::string name;
    std::string grad_name;
};

std::vector<ParamInfo> param_list(const NetworkGraph& g) {
    std::vector<ParamInfo> params;
    for (const auto& [p, gr] : g.gradient_pairs()) params.push_back({p, gr});
    return params;  // map order: deterministic by name
}

uint64_t compute_tick_ns(const DistConfig& cfg, uint32_t rank, int64_t step) {
    if (cfg.sim.jitter_ns == 0) return 1000;
    Rng rng(cfg.seed ^ 0x7473ull, (uint64_t(rank) << 32) | uint64_t(step));
    return 1000 + rng.next_u64() % (cfg.sim.jitter_ns + 1);
}

struct WorkerEnv {
    const DistConfig* cfg = nullptr;
    const Dataset* shard = nullptr;                            // Shard mode
    const std::vector<std::vector<int64_t>>* schedule = nullptr;  // GlobalSlice mode
    const Dataset* full_data = nullptr;
};

Minibatch next_batch(const WorkerEnv& env, uint32_t rank, int64_t step, Sampler* shard_sampler,
                     int64_t& epoch) {
    const DistConfig& cfg = *env.cfg;
    if (cfg.sharding == ShardMode::GlobalSlice) {
        const auto& slab = (*env.schedule)[size_t(step - 1)];
        std::vector<int64_t> mine(slab.begin() + int64_t(rank) * cfg.local_batch,
                                  slab.begin() + (int64_t(rank) + 1) * cfg.local_batch);
        return gather_minibatch(*env.full_data, mine);
    }
    std::vector<int64_t> idx;
    if (!shard_sampler->next_indices(cfg.local_batch, idx)) {
        shard_sampler->start_epoch(++epoch);
        if (!shard_sampler->next_indices(cfg.local_batch, idx))
            throw std::runtime_error("distributed: shard smaller than local batch");
    }
    return gather_minibatch(*env.shard, idx);
}

// Parameter averaging helper: f64 accumulation, one rounding at the end.
Tensor average_tensors(std::span<const Tensor> parts) {
    Tensor out(TensorDesc{parts[0].dtype(), parts[0].shape()});
    const double inv = 1.0 / double(parts.size());
    for (int64_t i = 0; i < out.numel(); ++i) {
        double acc = 0;
        for (const Tensor& t : parts) acc += t.at(i);
        out.set(i, acc * inv);
    }
    return out;
}

struct WorkerOutcome {
    NetworkGraph graph;
    std::vector<MetricRecord> metrics;
};

void emit_step(std::vector<MetricRecord>& out, uint32_t rank, int64_t step, double loss,
               bool record_loss) {
    if (record_loss)
        out.push_back({step, 0, "loss", loss, monotonic_ns(), int(rank)});
    out.push_back({step, 0, "worker_step", double(step), monotonic_ns(), int(rank)});
}

WorkerOutcome worker_decentralized(Transport& tr, const WorkerEnv& env, uint32_t rank,
                                   NetworkGraph g) {
    const DistConfig& cfg = *env.cfg;
    auto params = param_list(g);
    WorkerOutcome out;

    // Replica sync from worker 0 (step tag 0).
    for (size_t i = 0; i < params.size(); ++i) {
        Tensor p = g.fetch(params[i].name);
        broadcast_tensor(tr, p, 0, 0, uint32_t(i));
        g.feed(params[i].name, std::move(p));
    }

    ThreeStepOptimizer opt(cfg.opt);
    std::map<std::string, Tensor> residuals;
    if (cfg.density < 1.0)
        for (const auto& pi : params) {
            const Tensor& p = g.fetch(pi.name);
            residuals[pi.name] = Tensor::zeros({p.dtype(), p.shape()});
        }

    std::unique_ptr<Sampler> shard_sampler;
    int64_t epoch = 0;
    if (cfg.sharding == ShardMode::Shard) {
        shard_sampler = std::make_unique<ShuffleSampler>(env.shard->size(),
                                                         cfg.seed + 7919 * (rank + 1));
        shard_sampler->start_epoch(0);
    }

    const uint32_t left = (rank + cfg.workers - 1) % cfg.workers;
    const uint32_t right = (rank + 1) % cfg.workers;

    for (int64_t step = 1; step <= cfg.steps; ++step) {
        Minibatch mb = next_batch(env, rank, step, shard_sampler.get(), epoch);
        opt.new_input();
        for (const auto& pi : params) {
            Tensor p = g.fetch(pi.name);
            opt.prepare_param(pi.name, p);
            g.feed(pi.name, std::move(p));
        }
        tr.tick(compute_tick_ns(cfg, rank, step));
        BackpropResult bp = inference_and_backprop(
            g, {{cfg.x_input, mb.x}, {cfg.y_input, mb.y}}, cfg.loss_edge);
        const double loss = bp.values.at(cfg.loss_edge).at(0);
        if (!std::isfinite(loss)) throw TrainingDiverged(step, loss);

        switch (cfg.scheme) {
            case Scheme::Dsgd: {
                for (size_t i = 0; i < params.size(); ++i) {
                    Tensor grad = bp.gradients.at(params[i].grad_name);
                    if (cfg.density < 1.0)
                        topk_sparse_allreduce(tr, grad, cfg.density, residuals[params[i].name],
                                              uint64_t(step), uint32_t(i));
                    else
                        allreduce_average(tr, grad, uint64_t(step), uint32_t(i));
                    g.feed(params[i].name, opt.update_rule(grad, g.fetch(params[i].name),
                                                           params[i].name));
                }
                break;
            }
            case Scheme::Dpsgd: {
                for (size_t i = 0; i < params.size(); ++i)
                    g.feed(params[i].name,
                           opt.update_rule(bp.gradients.at(params[i].grad_name),
                                           g.fetch(params[i].name), params[i].name));
                // Average parameters with the two ring neighbors.
                for (size_t i = 0; i < params.size(); ++i) {
                    const Tensor& mine = g.fetch(params[i].name);
                    Message to_left{MsgType::ParamBcast, 0, uint64_t(step), uint32_t(i),
                                    encode_dense(mine)};
                    Message to_right = to_left;
                    tr.send(left, std::move(to_left));
                    tr.send(right, std::move(to_right));
                    Message from_left = tr.recv(left);
                    Message from_right = tr.recv(right);
                    std::vector<Tensor> parts{
                        decode_dense(from_left.payload, mine.desc()), mine,
                        decode_dense(from_right.payload, mine.desc())};
                    g.feed(params[i].name, average_tensors(parts));
                }
                break;
            }
            case Scheme::Mavg: {
                for (size_t i = 0; i < params.size(); ++i)
                    g.feed(params[i].name,
                           opt.update_rule(bp.gradients.at(params[i].grad_name),
                                           g.fetch(params[i].name), params[i].name));
                if (step % cfg.mavg_every == 0)
                    for (size_t i = 0; i < params.size(); ++i) {
                        Tensor p = g.fetch(params[i].name);
                        allreduce_average(tr, p, uint64_t(step), uint32_t(i));
                        g.feed(params[i].name, std::move(p));
                    }
                break;
            }
            default:
                throw std::runtime_error("decentralized worker got a centralized scheme");
        }
        emit_step(out.metrics, rank, step, loss, cfg.record_loss);
    }
    tr.finish();
    out.graph = std::move(g);
    return out;
}

WorkerOutcome worker_centralized(Transport& tr, const WorkerEnv& env, uint32_t rank,
                                 NetworkGraph g) {
    const DistConfig& cfg = *env.cfg;
    const uint32_t server = cfg.workers;  // extra endpoint id
    auto params = param_list(g);
    WorkerOutcome out;

    // Initial parameters arrive from the server (step tag 0).
    for (size_t i = 0; i < params.size(); ++i) {
        Message m = tr.recv(server);
        g.feed(params[size_t(m.tensor_id)].name,
               decode_dense(m.payload, g.fetch(params[size_t(m.tensor_id)].name).desc()));
    }

    std::unique_ptr<Sampler> shard_sampler;
    int64_t epoch = 0;
    if (cfg.sharding == ShardMode::Shard) {
        shard_sampler = std::make_unique<ShuffleSampler>(env.shard->size(),
                                                         cfg.seed + 7919 * (rank + 1));
        shard_sampler->start_epoch(0);
    }

    for (int64_t step = 1; step <= cfg.steps; ++step) {
        Minibatch mb = next_batch(env, rank, step, shard_sampler.get(), epoch);
        tr.tick(compute_tick_ns(cfg, rank, step));
        BackpropResult bp = inference_and_backprop(
            g, {{cfg.x_input, mb.x}, {cfg.y_input, mb.y}}, cfg.loss_edge);
        const double loss = bp.values.at(cfg.loss_edge).at(0);
        if (!std::isfinite(loss)) throw TrainingDiverged(step, loss);

        for (size_t i = 0; i < params.size(); ++i) {
            Message m{MsgType::GradPush, 0, uint64_t(step), uint32_t(i),
                      encode_dense(bp.gradients.at(params[i].grad_name))};
            tr.send(server, std::move(m));
        }
        for (size_t i = 0; i < params.size(); ++i) {
            Message m = tr.recv(server);
            g.feed(params[size_t(m.tensor_id)].name,
                   decode_dense(m.payload, g.fetch(params[size_t(m.tensor_id)].name).desc()));
        }
        emit_step(out.metrics, rank, step, loss, cfg.record_loss);
    }
    tr.finish();
    out.graph = std::move(g);
    return out;
}

void server_send_params(Transport& tr, const NetworkGraph& g, const std::vector<ParamInfo>& params,
                        uint32_t dst, uint64_t step_tag) {
    for (size_t i = 0; i < params.size(); ++i) {
        Message m{MsgType::ParamBcast, 0, step_tag, uint32_t(i),
                  encode_dense(g.fetch(params[i].name))};
        tr.send(dst, std::move(m));
    }
}

// Rank-ordered f64 average of one round of gradients, rounded once.
Tensor average_round(const std::vector<Tensor>& grads) {
    Tensor out(TensorDesc{grads[0].dtype(), grads[0].shape()});
    const double inv = 1.0 / double(grads.size());
    for (int64_t i = 0; i < out.numel(); ++i) {
        double acc = 0;
        for (const Tensor& gr : grads) acc += gr.at(i);
        out.set(i, acc * inv);
    }
    return out;
}

NetworkGraph server_centralized(Transport& tr, const DistConfig& cfg, NetworkGraph g) {
    const uint32_t p = cfg.workers;
    auto params = param_list(g);
    ThreeStepOptimizer opt(cfg.opt);

    for (uint32_t w = 0; w < p; ++w) server_send_params(tr, g, params, w, 0);

    auto apply_round = [&](const std::vector<std::vector<Tensor>>& per_rank) {
        opt.new_input();
        for (const auto& pi : params) {
            Tensor pt = g.fetch(pi.name);
            opt.prepare_param(pi.name, pt);
            g.feed(pi.name, std::move(pt));
        }
        for (size_t i = 0; i < params.size(); ++i) {
            std::vector<Tensor> grads;
            for (uint32_t r = 0; r < p; ++r) grads.push_back(per_rank[r][i]);
            Tensor avg = average_round(grads);
            g.feed(params[i].name, opt.update_rule(avg, g.fetch(params[i].name), params[i].name));
        }
    };

    if (cfg.scheme == Scheme::Pssgd) {
        for (int64_t step = 1; step <= cfg.steps; ++step) {
            std::vector<std::vector<Tensor>> per_rank(p);
            for (uint32_t r = 0; r < p; ++r)
                for (size_t i = 0; i < params.size(); ++i) {
                    Message m = tr.recv(r);
                    per_rank[r].push_back(
                        decode_dense(m.payload, g.fetch(params[size_t(m.tensor_id)].name).desc()));
                }
            apply_round(per_rank);
            for (uint32_t r = 0; r < p; ++r) server_send_params(tr, g, params, r, uint64_t(step));
        }
        tr.finish();
        return g;
    }

    if (cfg.scheme == Scheme::Asgd) {
        // Apply each worker's gradient set immediately, scaled by 1/p so a
        // full round of pushes moves the model like one averaged step.
        int64_t replies = 0;
        const int64_t expected = cfg.steps * int64_t(p);
        while (replies < expected) {
            Message first = tr.recv_any();
            const uint32_t src = first.sender;
            std::vector<Tensor> set(params.size());
            auto put = [&](const Message& m) {
                set[size_t(m.tensor_id)] =
                    decode_dense(m.payload, g.fetch(params[size_t(m.tensor_id)].name).desc());
            };
            put(first);
            for (size_t i = 1; i < params.size(); ++i) put(tr.recv(src));
            opt.new_input();
            for (const auto& pi : params) {
                Tensor pt = g.fetch(pi.name);
                opt.prepare_param(pi.name, pt);
                g.feed(pi.name, std::move(pt));
            }
            for (size_t i = 0; i < params.size(); ++i)
                g.feed(params[i].name, opt.update_rule(scale(set[i], 1.0 / double(p)),
                                                       g.fetch(params[i].name), params[i].name));
            server_send_params(tr, g, params, src, first.step_tag);
            ++replies;
        }
        tr.finish();
        return g;
    }

    // Stale-synchronous: gradients join per-step rounds; rounds apply in
    // order once complete; a worker that finished step t gets its reply only
    // after every round up to t - s has been applied.
    std::map<uint64_t, std::vector<std::vector<Tensor>>> rounds;
    std::map<uint64_t, uint32_t> round_count;
    std::vector<std::pair<uint32_t, uint64_t>> held;  // (worker, finished step)
    int64_t applied = 0;
    int64_t replies = 0;
    const int64_t expected = cfg.steps * int64_t(p);
    while (replies < expected) {
        Message first = tr.recv_any();
        const uint32_t src = first.sender;
        const uint64_t step = first.step_tag;
        auto& bucket = rounds[step];
        if (bucket.empty()) bucket.resize(p);
        bucket[src].resize(params.size());
        bucket[src][size_t(first.tensor_id)] =
            decode_dense(first.payload, g.fetch(params[size_t(first.tensor_id)].name).desc());
        for (size_t i = 1; i < params.size(); ++i) {
            Message m = tr.recv(src);
            bucket[src][size_t(m.tensor_id)] =
                decode_dense(m.payload, g.fetch(params[size_t(m.tensor_id)].name).desc());
        }
        round_count[step] += 1;
        held.push_back({src, step});

        while (round_count.count(uint64_t(applied + 1)) &&
               round_count[uint64_t(applied + 1)] == p) {
            apply_round(rounds[uint64_t(applied + 1)]);
            rounds.erase(uint64_t(applied + 1));
            round_count.erase(uint64_t(applied + 1));
            ++applied;
        }
        // Release replies whose staleness condition is met, in worker order.
        std::vector<std::pair<uint32_t, uint64_t>> still_held;
        std::sort(held.begin(), held.end());
        for (const auto& [w, t] : held) {
            if (applied >= int64_t(t) - cfg.staleness) {
                server_send_params(tr, g, params, w, t);
                ++replies;
            } else {
                still_held.push_back({w, t});
            }
        }
        held = std::move(still_held);
    }
    tr.finish();
    return g;
}

}  // namespace

DistResult run_distributed(const NetworkGraph& model, const Dataset& data, const DistConfig& cfg) {
    if (cfg.workers < 1) throw std::runtime_error("distributed: workers must be >= 1");
    if (cfg.staleness < 0) throw std::runtime_error("distributed: staleness must be >= 0");
    if (cfg.sharding == ShardMode::GlobalSlice &&
        cfg.local_batch * int64_t(cfg.workers) > data.size())
        throw std::runtime_error("distributed: global batch exceeds dataset");
    cfg.opt.validate();

    const bool centralized = scheme_is_centralized(cfg.scheme);
    const uint32_t endpoints = cfg.workers + (centralized ? 1 : 0);

    WorkerEnv env;
    env.cfg = &cfg;
    env.full_data = &data;
    std::vector<Dataset> shards;
    std::vector<std::vector<int64_t>> schedule;
    if (cfg.sharding == ShardMode::Shard) {
        shards = partition_dataset(data, cfg.workers, cfg.seed);
    } else {
        schedule = global_schedule(data.size(), cfg.local_batch * int64_t(cfg.workers), cfg.steps,
                                   cfg.seed);
        env.schedule = &schedule;
    }

    std::vector<WorkerOutcome> outcomes(cfg.workers);
    NetworkGraph server_graph;
    std::vector<std::exception_ptr> errors(endpoints);

    auto run_worker = [&](Transport& tr, uint32_t rank) {
        WorkerEnv wenv = env;
        if (cfg.sharding == ShardMode::Shard) wenv.shard = &shards[rank];
        outcomes[rank] = centralized ? worker_centralized(tr, wenv, rank, model)
                                     : worker_decentralized(tr, wenv, rank, model);
    };

    CommStats merged(endpoints);
    if (cfg.transport == TransportKind::Sim) {
        SimWorld world(cfg.workers, centralized, cfg.sim);
        std::vector<std::thread> threads;
        for (uint32_t r = 0; r < cfg.workers; ++r)
            threads.emplace_back([&, r] {
                try {
                    auto tr = world.endpoint_transport(r);
                    run_worker(*tr, r);
                } catch (...) {
                    errors[r] = std::current_exception();
                    world.endpoint_transport(r)->finish();
                }
            });
        if (centralized)
            threads.emplace_back([&] {
                try {
                    auto tr = world.endpoint_transport(world.server_endpoint());
                    server_graph = server_centralized(*tr, cfg, model);
                } catch (...) {
                    errors[endpoints - 1] = std::current_exception();
                    world.endpoint_transport(world.server_endpoint())->finish();
                }
            });
        for (auto& t : threads) t.join();
        merged.merge_from(world.stats());
    } else {
        std::vector<std::unique_ptr<TcpWorld>> worlds(endpoints);
        std::vector<std::thread> threads;
        for (uint32_t r = 0; r < cfg.workers; ++r)
            threads.emplace_back([&, r] {
                try {
                    worlds[r] = std::make_unique<TcpWorld>(cfg.workers, centralized, r, cfg.tcp);
                    auto tr = worlds[r]->endpoint_transport();
                    run_worker(*tr, r);
                } catch (...) {
                    errors[r] = std::current_exception();
                }
            });
        if (centralized)
            threads.emplace_back([&] {
                try {
                    worlds[endpoints - 1] =
                        std::make_unique<TcpWorld>(cfg.workers, true, endpoints - 1, cfg.tcp);
                    auto tr = worlds[endpoints - 1]->endpoint_transport();
                    server_graph = server_centralized(*tr, cfg, model);
                } catch (...) {
                    errors[endpoints - 1] = std::current_exception();
                }
            });
        for (auto& t : threads) t.join();
        for (auto& w : worlds)
            if (w) merged.merge_from(w->stats());
    }

    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    DistResult result;
    result.workers = cfg.workers;
    result.steps = cfg.steps;
    result.stats = std::move(merged);
    uint64_t model_bytes = 0;
    for (const auto& [name, gr] : model.gradient_pairs())
        model_bytes += model.fetch(name).desc().byte_size();
    result.model_bytes = model_bytes;
    for (uint32_t r = 0; r < cfg.workers; ++r) {
        result.worker_graphs.push_back(std::move(outcomes[r].graph));
        for (auto& m : outcomes[r].metrics) result.metrics.push_back(std::move(m));
    }
    std::stable_sort(result.metrics.begin(), result.metrics.end(),
                     [](const MetricRecord& a, const MetricRecord& b) {
                         return std::tie(a.step, a.worker, a.metric) <
                                std::tie(b.step, b.worker, b.metric);
                     });
    return result;
}

DistResult run_decentralized(const NetworkGraph& model, const Dataset& data, DistConfig cfg) {
    if (scheme_is_centralized(cfg.scheme)) cfg.scheme = Scheme::Dsgd;
    return run_distributed(model, data, cfg);
}

DistResult run_centralized(const NetworkGraph& model, const Dataset& data, DistConfig cfg) {
    if (!scheme_is_centralized(cfg.scheme)) cfg.scheme = Scheme::Pssgd;
    return run_distributed(model, data, cfg);
}

CommVolumeReport record_comm_volume(const DistResult& run, Scheme scheme) {
    CommVolumeReport rep;
    rep.workers = run.workers;
    rep.steps = run.steps;
    rep.scheme = scheme_name(scheme);
    rep.total_payload_bytes = run.stats.total_sent_bytes();
    rep.total_messages = run.stats.total_sent_msgs();
    for (uint32_t n = 0; n < run.workers; ++n)
        rep.node_bytes.push_back(run.stats.node_training_bytes(n));
    rep.per_node_bytes = run.stats.max_node_training_bytes();
    rep.per_node_bytes_per_step = run.steps > 0 ? double(rep.per_node_bytes) / double(run.steps)
                                                : 0.0;
    return rep;
}

int64_t max_step_spread(const std::vector<MetricRecord>& metrics, uint32_t workers) {
    // Replay worker_step completions in wallclock order and track the spread.
    std::vector<const MetricRecord*> events;
    for (const MetricRecord& m : metrics)
        if (m.metric == "worker_step") events.push_back(&m);
    std::sort(events.begin(), events.end(),
              [](const MetricRecord* a, const MetricRecord* b) { return a->wall_ns < b->wall_ns; });
    std::vector<int64_t> done(workers, 0);
    int64_t spread = 0;
    for (const MetricRecord* e : events) {
        done[size_t(e->worker)] = e->step;
        const int64_t fastest = *std::max_element(done.begin(), done.end());
        const int64_t slowest = *std::min_element(done.begin(), done.end());
        spread = std::max(spread, fastest - slowest);
    }
    return spread;
}

}  // namespace bench500
