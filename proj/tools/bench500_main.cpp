#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "bench500/fixtures.hpp"
#include "bench500/model_io.hpp"
#include "bench500/transform.hpp"
#include "bench500/validation.hpp"

using namespace bench500;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "bench500 0.1.0 (model schema 1, wire frame v1)";

// JSON config file carries the same keys as the long flags; explicitly
// passed flags win.
class ConfigMerge {
  public:
    template <class T> void bind(CLI::Option* opt, T& var) {
        entries_.push_back({opt, [&var](const json& j) { var = j.get<T>(); }});
    }
    void apply(const json& cfg) {
        for (auto& [opt, fn] : entries_) {
            if (opt->count() > 0) continue;
            const auto& names = opt->get_lnames();
            if (names.empty()) continue;
            if (cfg.contains(names[0])) fn(cfg.at(names[0]));
        }
    }

  private:
    std::vector<std::pair<CLI::Option*, std::function<void(const json&)>>> entries_;
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
    json cfg = json::parse(f);
    if (!cfg.is_object()) throw std::runtime_error("config file must hold a JSON object");
    return cfg;
}

struct DataFlags {
    std::string dataset = "synthetic-blobs";
    int64_t samples = 1024;
    int64_t dim = 16;
    int64_t classes = 10;
    uint64_t data_seed = 7;
};

void add_data_flags(CLI::App* cmd, DataFlags& df, ConfigMerge& merge) {
    merge.bind(cmd->add_option("--dataset", df.dataset,
                               "manifest .json path, synthetic-blobs, or synthetic-constant"),
               df.dataset);
    merge.bind(cmd->add_option("--samples", df.samples, "synthetic sample count"), df.samples);
    merge.bind(cmd->add_option("--dim", df.dim, "synthetic feature dimension"), df.dim);
    merge.bind(cmd->add_option("--classes", df.classes, "synthetic class count"), df.classes);
    merge.bind(cmd->add_option("--data-seed", df.data_seed, "synthetic data seed"), df.data_seed);
}

Dataset resolve_dataset(const DataFlags& df, DType dtype) {
    if (df.dataset == "synthetic-blobs")
        return synthetic_dataset({df.dim}, df.samples, df.classes, SyntheticKind::GaussianBlobs,
                                 df.data_seed, dtype);
    if (df.dataset == "synthetic-constant")
        return synthetic_dataset({df.dim}, df.samples, df.classes, SyntheticKind::Constant,
                                 df.data_seed, dtype);
    Dataset d = load_dataset_manifest(df.dataset);
    if (dtype != d.features.dtype()) {
        d.features = d.features.astype(dtype);
        d.labels = d.labels.astype(dtype);
    }
    return d;
}

int64_t feature_dim(const Dataset& d) {
    int64_t dim = 1;
    for (size_t i = 1; i < d.features.shape().size(); ++i) dim *= d.features.shape()[i];
    return dim;
}

NetworkGraph resolve_model(const std::string& model, const Dataset& d, uint64_t seed,
                           DType dtype) {
    if (model == "mlp") return build_mlp(feature_dim(d), 256, d.class_count, seed, dtype);
    if (model.rfind("mlp:", 0) == 0)
        return build_mlp(feature_dim(d), std::stoll(model.substr(4)), d.class_count, seed, dtype);
    if (model == "lenet") return build_lenet(d.class_count, seed, dtype);
    NetworkGraph g = load_model_file(model);
    return graph_astype(g, dtype);
}

OptimizerConfig make_opt(const std::string& name, double lr) {
    OptimizerConfig opt;
    opt.kind = opt_kind_from_name(name);
    opt.lr = lr;
    return opt;
}

uint64_t fnv1a(std::span<const uint8_t> bytes) {
    uint64_t h = 1469598103934665603ull;
    for (uint8_t b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

uint64_t params_digest(const NetworkGraph& g) {
    uint64_t h = 0;
    for (const auto& [p, gr] : g.gradient_pairs()) {
        auto bytes = g.fetch(p).to_bytes();
        h = fnv1a(bytes) ^ (h * 31);
    }
    return h;
}

// ---------------------------------------------------------------- opbench

struct OpbenchFlags {
    std::string op;  // optional filter
    std::string shapes;
    std::string out = "-";
    std::string json_out;
    std::string dtype = "f32";
    int runs = 30;
    bool gradient = true;
};

struct ShapeRow {
    std::string op;
    std::vector<int64_t> params;
    std::string label;
};

std::vector<ShapeRow> parse_shape_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open shapes file '" + path + "'");
    std::vector<ShapeRow> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tok;
        ShapeRow row;
        if (!std::getline(ss, row.op, ',')) continue;
        try {
            while (std::getline(ss, tok, ',')) row.params.push_back(std::stoll(tok));
        } catch (const std::exception&) {
            throw std::runtime_error("bad shape row " + std::to_string(lineno) + ": '" + line +
                                     "'");
        }
        row.label = line;
        rows.push_back(std::move(row));
    }
    return rows;
}

const std::vector<std::string> kBenchOps = {"gemm", "conv", "maxpool", "medianpool",
                                            "softmaxxent", "relu"};

struct BenchCase {
    std::unique_ptr<Operator> op;
    std::vector<Tensor> inputs;
};

BenchCase make_bench_case(const ShapeRow& row, DType dtype, Rng& rng) {
    auto need = [&](size_t n) {
        if (row.params.size() != n)
            throw std::runtime_error("bad shape row '" + row.label + "': expected " +
                                     std::to_string(n) + " parameters");
    };
    BenchCase c;
    if (row.op == "gemm") {
        need(3);
        const int64_t m = row.params[0], k = row.params[1], n = row.params[2];
        c.op = make_operator("Gemm", {});
        c.inputs.push_back(Tensor::uniform({dtype, {m, k}}, rng, -1, 1));
        c.inputs.push_back(Tensor::uniform({dtype, {k, n}}, rng, -1, 1));
    } else if (row.op == "conv") {
        if (row.params.size() != 7 && row.params.size() != 13)
            throw std::runtime_error("bad shape row '" + row.label +
                                     "': conv,N,C,H,W,F,kH,kW[,sH,sW,padT,padL,padB,padR]");
        const auto& p = row.params;
        Attrs attrs;
        attrs.set("kernel", std::vector<int64_t>{p[5], p[6]});
        if (row.params.size() == 13) {
            attrs.set("strides", std::vector<int64_t>{p[7], p[8]});
            attrs.set("pads", std::vector<int64_t>{p[9], p[10], p[11], p[12]});
        }
        c.op = make_operator("Conv", attrs);
        c.inputs.push_back(Tensor::uniform({dtype, {p[0], p[1], p[2], p[3]}}, rng, -1, 1));
        c.inputs.push_back(Tensor::uniform({dtype, {p[4], p[1], p[5], p[6]}}, rng, -1, 1));
        c.inputs.push_back(Tensor::uniform({dtype, {p[4]}}, rng, -1, 1));
    } else if (row.op == "maxpool" || row.op == "medianpool") {
        need(8);
        const auto& p = row.params;
        Attrs attrs;
        attrs.set("window", std::vector<int64_t>{p[4], p[5]});
        attrs.set("strides", std::vector<int64_t>{p[6], p[7]});
        c.op = make_operator(row.op == "maxpool" ? "MaxPool" : "x-MedianPool", attrs);
        c.inputs.push_back(Tensor::uniform({dtype, {p[0], p[1], p[2], p[3]}}, rng, -1, 1));
    } else if (row.op == "softmaxxent") {
        need(2);
        const int64_t n = row.params[0], cls = row.params[1];
        c.op = make_operator("x-CrossEntropyLoss", {});
        c.inputs.push_back(Tensor::uniform({dtype, {n, cls}}, rng, -1, 1));
        Tensor labels(TensorDesc{dtype, {n}});
        for (int64_t i = 0; i < n; ++i) labels.set(i, double(i % cls));
        c.inputs.push_back(std::move(labels));
    } else if (row.op == "relu") {
        need(1);
        c.op = make_operator("Relu", {});
        c.inputs.push_back(Tensor::uniform({dtype, {row.params[0]}}, rng, -1, 1));
    } else {
        throw std::runtime_error("unknown op '" + row.op + "' in shape row '" + row.label + "'");
    }
    return c;
}

int run_opbench(const OpbenchFlags& flags) {
    if (!flags.op.empty() &&
        std::find(kBenchOps.begin(), kBenchOps.end(), flags.op) == kBenchOps.end()) {
        std::ostringstream msg;
        msg << "unknown --op '" << flags.op << "'; supported:";
        for (const auto& o : kBenchOps) msg << " " << o;
        throw CLI::ValidationError(msg.str());
    }
    const DType dtype = dtype_from_name(flags.dtype);
    std::vector<ShapeRow> rows = parse_shape_csv(flags.shapes);
    std::vector<CsvRow> report;
    json summary = json::array();
    int64_t run_index = 0;
    for (const ShapeRow& row : rows) {
        if (!flags.op.empty() && row.op != flags.op) continue;
        Rng rng(90210, uint64_t(run_index));
        BenchCase c = make_bench_case(row, dtype, rng);
        // Reference: the same operator evaluated in f64 on identical inputs.
        Rng ref_rng(90210, uint64_t(run_index));
        BenchCase ref = make_bench_case(row, DType::F64, ref_rng);
        for (size_t i = 0; i < c.inputs.size(); ++i) ref.inputs[i] = c.inputs[i].astype(DType::F64);
        ForwardReport fr = test_forward(
            *c.op, c.inputs,
            [&](std::span<const Tensor>) { return ref.op->forward(ref.inputs); }, flags.runs);

        // Repeatability: per-element variance over repeated executions, which
        // is exactly zero for these deterministic kernels.
        double variance_max = 0;
        {
            std::vector<Tensor> outs;
            for (int k = 0; k < 3; ++k) outs.push_back(c.op->forward(c.inputs)[0]);
            Tensor vm = variance_map(outs);
            for (int64_t i = 0; i < vm.numel(); ++i)
                variance_max = std::max(variance_max, vm.at(i));
        }

        const std::string base = row.label;
        report.push_back({base + "/forward_ms_median", run_index, 0, fr.timing.median, "ms"});
        report.push_back({base + "/forward_ms_ci_low", run_index, 0, fr.timing.ci_low, "ms"});
        report.push_back({base + "/forward_ms_ci_high", run_index, 0, fr.timing.ci_high, "ms"});
        report.push_back({base + "/l1_vs_f64", run_index, 0, fr.l1, "norm"});
        report.push_back({base + "/l2_vs_f64", run_index, 0, fr.l2, "norm"});
        report.push_back({base + "/linf_vs_f64", run_index, 0, fr.linf, "norm"});
        report.push_back({base + "/output_variance_max", run_index, 0, variance_max, "var"});
        json entry{{"shape", base},
                   {"device", device_name(DeviceKind::Cpu)},
                   {"runs", fr.timing.n},
                   {"forward_ms", {{"median", fr.timing.median},
                                   {"ci_low", fr.timing.ci_low},
                                   {"ci_high", fr.timing.ci_high},
                                   {"min", fr.timing.min},
                                   {"max", fr.timing.max}}},
                   {"l1_vs_f64", fr.l1},
                   {"l2_vs_f64", fr.l2},
                   {"linf_vs_f64", fr.linf},
                   {"output_variance_max", variance_max}};
        if (flags.gradient) {
            Rng grng(777, uint64_t(run_index));
            GradientReport gr = test_gradient(*c.op, c.inputs, grng, flags.runs);
            report.push_back({base + "/grad_max_rel_err", run_index, 0, gr.check.worst, "rel"});
            report.push_back(
                {base + "/backward_ms_median", run_index, 0, gr.backward_timing.median, "ms"});
            entry["grad_max_rel_err"] = gr.check.worst;
            entry["backward_ms_median"] = gr.backward_timing.median;
        }
        summary.push_back(std::move(entry));
        ++run_index;
    }
    write_csv_report(report, flags.out);
    if (!flags.json_out.empty()) {
        if (flags.json_out == "-") {
            std::cout << summary.dump(2) << "\n";
        } else {
            std::ofstream f(flags.json_out);
            if (!f) throw std::runtime_error("cannot open '" + flags.json_out + "'");
            f << summary.dump(2) << "\n";
        }
    }
    return 0;
}

// ---------------------------------------------------------------- train

struct TrainFlags {
    std::string model = "mlp";
    DataFlags data;
    std::string test_dataset;
    std::string optimizer = "adam";
    double lr = 1e-3;
    int64_t batch = 64;
    int64_t epochs = 1;
    uint64_t seed = 1;
    std::string dtype = "f32";
    std::string out = "-";
};

int run_train(const TrainFlags& flags) {
    const DType dtype = dtype_from_name(flags.dtype);
    Dataset data = resolve_dataset(flags.data, dtype);
    NetworkGraph model = resolve_model(flags.model, data, flags.seed, dtype);

    TrainingConfig cfg;
    cfg.batch = flags.batch;
    cfg.epochs = flags.epochs;
    cfg.seed = flags.seed;
    cfg.opt = make_opt(flags.optimizer, flags.lr);

    Dataset test;
    const Dataset* test_ptr = nullptr;
    if (!flags.test_dataset.empty()) {
        DataFlags tf = flags.data;
        tf.dataset = flags.test_dataset;
        test = resolve_dataset(tf, dtype);
        test_ptr = &test;
    }

    MemorySink sink;
    TrainResult result = train(model, data, test_ptr, cfg, sink);
    write_metric_stream(sink.records, flags.out);
    std::cerr << "trained " << result.steps_run << " steps, final loss " << result.final_loss
              << ", params fnv64 " << std::hex << params_digest(result.graph) << std::dec << "\n";
    return 0;
}

// ---------------------------------------------------------------- disttrain

struct DistFlags {
    std::string model = "mlp:32";
    DataFlags data;
    std::string scheme = "dsgd";
    uint32_t workers = 2;
    std::string transport = "sim";
    std::string sharding = "shard";
    int64_t staleness = 3;
    double density = 1.0;
    int64_t local_batch = 16;
    int64_t steps = 50;
    int64_t mavg_every = 10;
    uint64_t seed = 1;
    uint64_t sim_jitter = 0;
    uint16_t tcp_port = 47500;
    std::string optimizer = "sgd";
    double lr = 0.05;
    std::string dtype = "f32";
    std::string out = "-";
};

int run_disttrain(const DistFlags& flags) {
    const DType dtype = dtype_from_name(flags.dtype);
    Dataset data = resolve_dataset(flags.data, dtype);
    NetworkGraph model = resolve_model(flags.model, data, flags.seed, dtype);

    DistConfig cfg;
    cfg.scheme = scheme_from_name(flags.scheme);
    cfg.workers = flags.workers;
    if (flags.transport == "sim")
        cfg.transport = TransportKind::Sim;
    else if (flags.transport == "tcp")
        cfg.transport = TransportKind::Tcp;
    else
        throw CLI::ValidationError("--transport must be sim or tcp");
    if (flags.sharding == "shard")
        cfg.sharding = ShardMode::Shard;
    else if (flags.sharding == "global")
        cfg.sharding = ShardMode::GlobalSlice;
    else
        throw CLI::ValidationError("--sharding must be shard or global");
    cfg.staleness = flags.staleness;
    cfg.density = flags.density;
    cfg.local_batch = flags.local_batch;
    cfg.steps = flags.steps;
    cfg.mavg_every = flags.mavg_every;
    cfg.seed = flags.seed;
    cfg.sim.jitter_ns = flags.sim_jitter;
    cfg.tcp.base_port = flags.tcp_port;
    cfg.opt = make_opt(flags.optimizer, flags.lr);

    DistResult result = run_distributed(model, data, cfg);
    CommVolumeReport comm = record_comm_volume(result, cfg.scheme);

    json workers_json = json::array();
    for (uint32_t w = 0; w < result.workers; ++w) {
        workers_json.push_back({{"worker", w},
                                {"sent_bytes", result.stats.sent(w).bytes},
                                {"sent_msgs", result.stats.sent(w).msgs},
                                {"recv_bytes", result.stats.received(w).bytes},
                                {"node_training_bytes", result.stats.node_training_bytes(w)},
                                {"params_fnv64", params_digest(result.worker_graphs[w])}});
    }
    json losses = json::array();
    for (const MetricRecord& m : result.metrics)
        if (m.metric == "loss")
            losses.push_back({{"step", m.step}, {"worker", m.worker}, {"value", m.value}});
    json doc = {{"device", device_name(DeviceKind::Cpu)},
                {"scheme", comm.scheme},
                {"workers", comm.workers},
                {"steps", comm.steps},
                {"model_bytes", result.model_bytes},
                {"total_payload_bytes", comm.total_payload_bytes},
                {"total_messages", comm.total_messages},
                {"per_node_bytes", comm.per_node_bytes},
                {"per_node_bytes_per_step", comm.per_node_bytes_per_step},
                {"per_worker", workers_json},
                {"loss", losses}};
    if (flags.out == "-") {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::ofstream f(flags.out);
        if (!f) throw std::runtime_error("cannot open '" + flags.out + "'");
        f << doc.dump(2) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- transform

struct TransformFlags {
    std::string model;
    double memory_cap = 0;
    double alpha = 0;
    double beta = 0;
    int64_t batch = 0;
    std::string out;
};

int run_transform(const TransformFlags& flags) {
    NetworkGraph g = load_model_file(flags.model);
    TransformReport report;
    NetworkGraph out = microbatch_transform(g, flags.memory_cap, {flags.alpha, flags.beta},
                                            flags.batch, &report);
    save_model_file(out, flags.out);
    for (const auto& c : report.choices)
        std::cout << c.conv_node << ": batch " << c.batch << " -> micro-batch " << c.microbatch
                  << " (" << c.parts << " parts)\n";
    if (!report.changed) std::cout << "no conv exceeded the cap; model unchanged\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bench500: four-level deep learning benchmark harness"};
    app.require_subcommand(0, 1);
    ConfigMerge merge;
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; explicit flags win");
    bool show_version = false;
    app.add_flag("--version", show_version, "print tool and format versions");

    OpbenchFlags ob;
    CLI::App* opbench = app.add_subcommand("opbench", "operator micro-benchmarks over a shape list");
    merge.bind(opbench->add_option("--op", ob.op, "filter rows to one op"), ob.op);
    merge.bind(opbench->add_option("--shapes", ob.shapes, "CSV: op,params... per row")
                   ->required(),
               ob.shapes);
    merge.bind(opbench->add_option("--runs", ob.runs, "timed repetitions (default 30)"), ob.runs);
    merge.bind(opbench->add_option("--dtype", ob.dtype, "f32|f64"), ob.dtype);
    merge.bind(opbench->add_option("--out", ob.out, "CSV report path, - for stdout"), ob.out);
    merge.bind(opbench->add_option("--json-out", ob.json_out, "JSON summary path, - for stdout"),
               ob.json_out);
    merge.bind(opbench->add_flag("--gradient,!--no-gradient", ob.gradient,
                                 "also run gradient checks"),
               ob.gradient);

    TrainFlags tf;
    CLI::App* train_cmd = app.add_subcommand("train", "single-worker training run");
    merge.bind(train_cmd->add_option("--model", tf.model, "mlp | mlp:<hidden> | lenet | model.json"),
               tf.model);
    add_data_flags(train_cmd, tf.data, merge);
    merge.bind(train_cmd->add_option("--test-dataset", tf.test_dataset,
                                     "held-out dataset (manifest or synthetic-*)"),
               tf.test_dataset);
    merge.bind(train_cmd->add_option("--optimizer", tf.optimizer,
                                     "sgd|momentum|adagrad|adam|accelegrad"),
               tf.optimizer);
    merge.bind(train_cmd->add_option("--lr", tf.lr, "learning rate"), tf.lr);
    merge.bind(train_cmd->add_option("--batch", tf.batch, "minibatch size"), tf.batch);
    merge.bind(train_cmd->add_option("--epochs", tf.epochs, "epochs"), tf.epochs);
    merge.bind(train_cmd->add_option("--seed", tf.seed, "run seed"), tf.seed);
    merge.bind(train_cmd->add_option("--dtype", tf.dtype, "f32|f64"), tf.dtype);
    merge.bind(train_cmd->add_option("--out", tf.out, "metric stream (JSON lines), - for stdout"),
               tf.out);

    DistFlags df;
    CLI::App* dist_cmd = app.add_subcommand("disttrain", "distributed training run");
    merge.bind(dist_cmd->add_option("--model", df.model, "mlp | mlp:<hidden> | lenet | model.json"),
               df.model);
    add_data_flags(dist_cmd, df.data, merge);
    merge.bind(dist_cmd->add_option("--workers", df.workers, "worker count"), df.workers);
    merge.bind(dist_cmd->add_option("--scheme", df.scheme, "dsgd|dpsgd|mavg|pssgd|asgd|ssp"),
               df.scheme);
    merge.bind(dist_cmd->add_option("--transport", df.transport, "sim|tcp"), df.transport);
    merge.bind(dist_cmd->add_option("--sharding", df.sharding, "shard|global"), df.sharding);
    merge.bind(dist_cmd->add_option("--staleness", df.staleness, "ssp staleness bound"),
               df.staleness);
    merge.bind(dist_cmd->add_option("--density", df.density,
                                    "top-k density for sparse dsgd allreduce"),
               df.density);
    merge.bind(dist_cmd->add_option("--local-batch", df.local_batch, "per-worker batch"),
               df.local_batch);
    merge.bind(dist_cmd->add_option("--steps", df.steps, "steps per worker"), df.steps);
    merge.bind(dist_cmd->add_option("--mavg-every", df.mavg_every, "model averaging period"),
               df.mavg_every);
    merge.bind(dist_cmd->add_option("--seed", df.seed, "run seed"), df.seed);
    merge.bind(dist_cmd->add_option("--sim-jitter", df.sim_jitter,
                                    "synthetic compute jitter (ns) on the simulator"),
               df.sim_jitter);
    merge.bind(dist_cmd->add_option("--tcp-port", df.tcp_port, "tcp base port"), df.tcp_port);
    merge.bind(dist_cmd->add_option("--optimizer", df.optimizer, "update rule"), df.optimizer);
    merge.bind(dist_cmd->add_option("--lr", df.lr, "learning rate"), df.lr);
    merge.bind(dist_cmd->add_option("--dtype", df.dtype, "f32|f64"), df.dtype);
    merge.bind(dist_cmd->add_option("--out", df.out, "JSON report path, - for stdout"), df.out);

    TransformFlags xf;
    CLI::App* transform_cmd =
        app.add_subcommand("transform", "micro-batch split transform for conv workspaces");
    merge.bind(transform_cmd->add_option("--model", xf.model, "input model.json")->required(),
               xf.model);
    merge.bind(transform_cmd->add_option("--memory-cap", xf.memory_cap, "workspace cap in bytes")
                   ->required(),
               xf.memory_cap);
    merge.bind(transform_cmd->add_option("--alpha", xf.alpha, "workspace bytes per batch row")
                   ->required(),
               xf.alpha);
    merge.bind(transform_cmd->add_option("--beta", xf.beta, "fixed workspace bytes"), xf.beta);
    merge.bind(transform_cmd->add_option("--batch", xf.batch, "batch size entering each conv")
                   ->required(),
               xf.batch);
    merge.bind(transform_cmd->add_option("--out", xf.out, "output model.json")->required(),
               xf.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        merge.apply(load_config(config_path));
        if (show_version) {
            std::cout << kVersion << "\n";
            return 0;
        }
        if (opbench->parsed()) return run_opbench(ob);
        if (train_cmd->parsed()) return run_train(tf);
        if (dist_cmd->parsed()) return run_disttrain(df);
        if (transform_cmd->parsed()) return run_transform(xf);
        std::cout << app.help() << "\n";
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
