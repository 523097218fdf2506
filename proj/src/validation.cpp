#include "bench500/validation.hpp"

#include "bench500/fixtures.hpp"

#include <algorithm>
#include <cmath>

namespace bench500 {

ForwardReport test_forward(Operator& op, std::span<const Tensor> inputs,
                           const ReferenceFn& reference, int runs) {
    std::vector<Tensor> got = op.forward(inputs);
    std::vector<Tensor> want = reference(inputs);
    if (got.size() != want.size())
        throw std::runtime_error("test_forward: reference output count mismatch");
    ForwardReport rep;
    for (size_t i = 0; i < got.size(); ++i) {
        if (got[i].shape() != want[i].shape())
            throw std::runtime_error("test_forward: reference output shape mismatch");
        Tensor a = got[i].astype(DType::F64);
        Tensor b = want[i].astype(DType::F64);
        rep.l1 = std::max(rep.l1, reduce_norm(a, b, NormKind::L1));
        rep.l2 = std::max(rep.l2, reduce_norm(a, b, NormKind::L2));
        rep.linf = std::max(rep.linf, reduce_norm(a, b, NormKind::Linf));
    }
    std::vector<Tensor> in(inputs.begin(), inputs.end());
    rep.timing = run_repeated([&] { op.forward(in); }, runs).stats;
    return rep;
}

GradientReport test_gradient(Operator& op, std::span<const Tensor> inputs, Rng& rng, int runs,
                             double step) {
    GradientReport rep;
    rep.check = grad_check(op, inputs, rng, step);
    std::vector<Tensor> in(inputs.begin(), inputs.end());
    std::vector<Tensor> fwd = op.forward(in);
    std::vector<Tensor> cot;
    for (const Tensor& t : fwd) cot.push_back(Tensor::full({t.dtype(), t.shape()}, 1.0));
    rep.backward_timing = run_repeated([&] { op.backward(cot, in, fwd); }, runs).stats;
    return rep;
}

double DivergenceCurves::max_l2(int64_t step) const {
    double best = 0;
    for (double v : l2[size_t(step)]) best = std::max(best, v);
    return best;
}

std::vector<CsvRow> DivergenceCurves::to_csv() const {
    std::vector<CsvRow> rows;
    for (size_t s = 0; s < l2.size(); ++s)
        for (size_t p = 0; p < params.size(); ++p) {
            rows.push_back({"divergence_l2/" + params[p], 0, int64_t(s), l2[s][p], "norm"});
            rows.push_back({"divergence_linf/" + params[p], 0, int64_t(s), linf[s][p], "norm"});
        }
    return rows;
}

namespace {

struct Lane {
    NetworkGraph g;
    ThreeStepOptimizer opt;
    OptimizerState direct_state;
    const OptimizerLane* spec;

    Lane(const NetworkGraph& model, const OptimizerLane& lane)
        : g(graph_astype(model, lane.dtype)), opt(lane.opt), spec(&lane) {}

    void step(const Minibatch& mb, const TrainingConfig& names) {
        Minibatch local{mb.x.astype(g.initializers().begin()->second.dtype()),
                        mb.y.astype(g.initializers().begin()->second.dtype())};
        if (spec->three_step) {
            opt.new_input();
            for (const auto& [pname, gname] : g.gradient_pairs()) {
                Tensor p = g.fetch(pname);
                opt.prepare_param(pname, p);
                g.feed(pname, std::move(p));
            }
        } else {
            begin_step(direct_state);
        }
        BackpropResult bp = inference_and_backprop(
            g, {{names.x_input, local.x}, {names.y_input, local.y}}, names.loss_edge);
        for (const auto& [pname, gname] : g.gradient_pairs()) {
            const Tensor& grad = bp.gradients.at(gname);
            Tensor updated = spec->three_step
                                 ? opt.update_rule(grad, g.fetch(pname), pname)
                                 : apply_update_rule(spec->opt, direct_state, pname,
                                                     g.fetch(pname), grad, spec->opt.lr);
            g.feed(pname, std::move(updated));
        }
    }
};

}  // namespace

DivergenceCurves test_optimizer(const OptimizerLane& a, const OptimizerLane& b,
                                const NetworkGraph& model, const Dataset& data, int64_t batch,
                                int64_t steps, uint64_t seed) {
    TrainingConfig names;
    Lane lane_a(model, a);
    Lane lane_b(model, b);
    DivergenceCurves curves;
    for (const auto& [pname, gname] : model.gradient_pairs()) curves.params.push_back(pname);

    ShuffleSampler sampler(data.size(), seed);
    int64_t epoch = 0;
    sampler.start_epoch(epoch);
    std::vector<int64_t> idx;
    for (int64_t s = 0; s < steps; ++s) {
        if (!sampler.next_indices(batch, idx)) {
            sampler.start_epoch(++epoch);
            sampler.next_indices(batch, idx);
        }
        Minibatch mb = gather_minibatch(data, idx);
        lane_a.step(mb, names);
        lane_b.step(mb, names);
        std::vector<double> l2_row, linf_row;
        for (const std::string& pname : curves.params) {
            Tensor pa = lane_a.g.fetch(pname).astype(DType::F64);
            Tensor pb = lane_b.g.fetch(pname).astype(DType::F64);
            l2_row.push_back(reduce_norm(pa, pb, NormKind::L2));
            linf_row.push_back(reduce_norm(pa, pb, NormKind::Linf));
        }
        curves.l2.push_back(std::move(l2_row));
        curves.linf.push_back(std::move(linf_row));
    }
    return curves;
}

TrainingOutcome test_training(const NetworkGraph& model, const Dataset& train_data,
                              const Dataset* test_data, const TrainingConfig& cfg) {
    TrainingOutcome out;
    MemorySink sink;
    try {
        TrainResult r = train(model, train_data, test_data, cfg, sink);
        out.trained = std::move(r.graph);
        out.final_loss = r.final_loss;
        out.steps = r.steps_run;
        if (test_data && !cfg.probs_edge.empty())
            out.final_test_accuracy = evaluate_accuracy(out.trained, *test_data, cfg.batch, cfg);
    } catch (const TrainingDiverged& e) {
        out.diverged = true;
        out.diverged_step = e.step;
    }
    out.metrics = std::move(sink.records);
    return out;
}

TrainingOutcome test_training_distributed(const NetworkGraph& model, const Dataset& data,
                                          const DistConfig& cfg) {
    TrainingOutcome out;
    try {
        DistResult r = run_distributed(model, data, cfg);
        out.steps = r.steps;
        out.metrics = r.metrics;
        out.comm = record_comm_volume(r, cfg.scheme);
        for (const MetricRecord& m : r.metrics)
            if (m.metric == "loss") out.final_loss = m.value;
        out.trained = r.worker_graphs.at(0);
    } catch (const TrainingDiverged& e) {
        out.diverged = true;
        out.diverged_step = e.step;
    }
    return out;
}

InstrumentationOverhead measure_instrumentation_overhead(const NetworkGraph& model,
                                                         const Dataset& data,
                                                         const TrainingConfig& cfg) {
    auto run_once = [&](MetricSink& sink, std::vector<double>& step_ms, NetworkGraph& out_graph) {
        std::vector<uint64_t> marks;
        EventHooks hooks;
        hooks.before_step = [&](int64_t, const TensorView&) { marks.push_back(monotonic_ns()); };
        TrainResult r = train(model, data, nullptr, cfg, sink, &hooks);
        marks.push_back(monotonic_ns());
        for (size_t i = 0; i + 1 < marks.size(); ++i)
            step_ms.push_back(double(marks[i + 1] - marks[i]) / 1e6);
        out_graph = std::move(r.graph);
    };

    InstrumentationOverhead rep;
    NullSink null;
    std::vector<double> warmup_ms;
    NetworkGraph g_plain, g_inst, g_warm;
    run_once(null, warmup_ms, g_warm);  // discarded: first-touch noise
    // Paired rounds: each round runs both configurations back to back and
    // contributes one overhead ratio, so slow machine drift (frequency
    // scaling, background load) cancels; the median across rounds is robust
    // to an outlier round.
    bool same = true;
    std::vector<double> ratios;
    double last_plain = 0, last_inst = 0;
    for (int round = 0; round < 9; ++round) {
        std::vector<double> plain_ms, instrumented_ms;
        run_once(null, plain_ms, g_plain);
        MemorySink mem;
        run_once(mem, instrumented_ms, g_inst);
        last_plain = summarize(plain_ms).median;
        last_inst = summarize(instrumented_ms).median;
        ratios.push_back(last_inst / last_plain);
        for (const auto& [name, t] : g_plain.initializers())
            same = same && (t.to_bytes() == g_inst.initializers().at(name).to_bytes());
    }
    rep.uninstrumented_median_ms = last_plain;
    rep.instrumented_median_ms = last_inst;
    rep.overhead = summarize(ratios).median - 1.0;
    rep.outputs_identical = same;
    return rep;
}

}  // namespace bench500
