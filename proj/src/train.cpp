#include "bench500/train.hpp"

#include <cmath>

namespace bench500 {

TrainingDiverged::TrainingDiverged(int64_t step_, double loss_)
    : std::runtime_error("training diverged at step " + std::to_string(step_) +
                         " with non-finite loss"),
      step(step_),
      loss_value(loss_) {}

double batch_accuracy(const Tensor& probs, const Tensor& labels) {
    const int64_t n = probs.shape()[0], c = probs.shape()[1];
    int64_t hits = 0;
    for (int64_t i = 0; i < n; ++i) {
        int64_t best = 0;
        double bv = probs.at(i * c);
        for (int64_t j = 1; j < c; ++j) {
            const double v = probs.at(i * c + j);
            if (v > bv) {  // strict: ties keep the lowest class index
                bv = v;
                best = j;
            }
        }
        hits += (best == int64_t(labels.at(i)));
    }
    return double(hits) / double(n);
}

namespace {

std::unique_ptr<Sampler> make_sampler(SamplerKind kind, int64_t n, uint64_t seed) {
    if (kind == SamplerKind::Sequential) return std::make_unique<SequentialSampler>(n);
    return std::make_unique<ShuffleSampler>(n, seed);
}

}  // namespace

TrainResult train(const NetworkGraph& model, const Dataset& data, const Dataset* test_data,
                  const TrainingConfig& cfg, MetricSink& sink, const EventHooks* hooks) {
    if (cfg.batch < 1 || cfg.batch > data.size())
        throw std::runtime_error("train: batch size must be in [1, dataset size]");
    if (cfg.epochs < 0) throw std::runtime_error("train: epochs must be >= 0");
    if (model.gradient_pairs().empty())
        throw std::runtime_error("train: graph declares no gradient pairs");

    NetworkGraph g = model;
    ThreeStepOptimizer opt(cfg.opt);
    auto sampler = make_sampler(cfg.sampler, data.size(), cfg.seed);

    TrainResult result;
    int64_t step = 0;
    for (int64_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        opt.set_epoch(epoch);
        sampler->start_epoch(epoch);
        Minibatch mb;
        while (sample_minibatch(*sampler, data, cfg.batch, mb)) {
            TensorView feeds{{cfg.x_input, mb.x}, {cfg.y_input, mb.y}};
            if (hooks && hooks->before_step) hooks->before_step(step, feeds);

            opt.new_input();
            for (const auto& [pname, gname] : g.gradient_pairs()) {
                Tensor param = g.fetch(pname);
                opt.prepare_param(pname, param);
                g.feed(pname, std::move(param));
            }

            BackpropResult bp = inference_and_backprop(g, feeds, cfg.loss_edge, hooks, step);
            const double loss = bp.outputs.count(cfg.loss_edge)
                                    ? bp.outputs.at(cfg.loss_edge).at(0)
                                    : bp.values.at(cfg.loss_edge).at(0);
            if (!std::isfinite(loss)) throw TrainingDiverged(step, loss);

            for (const auto& [pname, gname] : g.gradient_pairs()) {
                Tensor updated = opt.update_rule(bp.gradients.at(gname), g.fetch(pname), pname);
                g.feed(pname, std::move(updated));
            }
            if (hooks && hooks->after_update) hooks->after_update(step, bp.values);

            if (cfg.record_loss)
                sink.emit({step, epoch, "loss", loss, monotonic_ns()});
            if (!cfg.probs_edge.empty() && cfg.train_acc_every > 0 &&
                step % cfg.train_acc_every == 0) {
                const double acc = batch_accuracy(bp.values.at(cfg.probs_edge), mb.y);
                sink.emit({step, epoch, "training_accuracy", acc, monotonic_ns()});
            }
            result.final_loss = loss;
            ++step;

            if (hooks && hooks->early_stop_query && hooks->early_stop_query(step, bp.values)) {
                result.steps_run = step;
                result.graph = std::move(g);
                return result;
            }
        }
        if (test_data && !cfg.probs_edge.empty()) {
            const double acc = evaluate_accuracy(g, *test_data, cfg.batch, cfg);
            sink.emit({step, epoch, "test_accuracy", acc, monotonic_ns()});
        }
    }
    result.steps_run = step;
    result.graph = std::move(g);
    return result;
}

double evaluate_accuracy(const NetworkGraph& g, const Dataset& data, int64_t batch,
                         const TrainingConfig& cfg) {
    const int64_t n = data.size();
    if (n < 1) throw std::runtime_error("evaluate_accuracy: empty dataset");
    int64_t hits = 0;
    for (int64_t at = 0; at < n; at += batch) {
        const int64_t take = std::min(batch, n - at);
        std::vector<int64_t> idx(static_cast<size_t>(take));
        for (int64_t i = 0; i < take; ++i) idx[size_t(i)] = at + i;
        Minibatch mb = gather_minibatch(data, idx);
        TensorView feeds{{cfg.x_input, mb.x}, {cfg.y_input, mb.y}};
        InferenceResult r = inference(g, feeds);
        const Tensor& probs = r.values.at(cfg.probs_edge);
        const int64_t c = probs.shape()[1];
        for (int64_t i = 0; i < take; ++i) {
            int64_t best = 0;
            double bv = probs.at(i * c);
            for (int64_t j = 1; j < c; ++j)
                if (probs.at(i * c + j) > bv) {
                    bv = probs.at(i * c + j);
                    best = j;
                }
            hits += (best == int64_t(mb.y.at(i)));
        }
    }
    return double(hits) / double(n);
}

SummaryStats measure_dataset_latency(LatencySource source, const Dataset& data, int64_t batch,
                                     int runs, uint64_t seed) {
    std::vector<int64_t> idx(static_cast<size_t>(batch));
    ShuffleSampler sampler(data.size(), seed);
    sampler.start_epoch(0);
    int64_t counter = 0;
    auto task = [&]() {
        if (source == LatencySource::Real) {
            if (!sampler.next_indices(batch, idx)) {
                sampler.start_epoch(++counter);
                sampler.next_indices(batch, idx);
            }
            Minibatch mb = gather_minibatch(data, idx);
            (void)mb;
        } else {
            std::vector<int64_t> shape(data.features.shape().begin() + 1,
                                       data.features.shape().end());
            Dataset synth = synthetic_dataset(shape, batch, std::max<int64_t>(data.class_count, 2),
                                              SyntheticKind::GaussianBlobs,
                                              seed + uint64_t(counter++), data.features.dtype());
            (void)synth;
        }
    };
    return run_repeated(task, runs).stats;
}

}  // namespace bench500
