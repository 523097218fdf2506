#include "bench500/grad_check.hpp"

#include <cmath>
#include <stdexcept>

namespace bench500 {

namespace {

double contract(std::span<const Tensor> outputs, std::span<const Tensor> cotangents) {
    double acc = 0.0;
    for (size_t k = 0; k < outputs.size(); ++k)
        for (int64_t i = 0; i < outputs[k].numel(); ++i)
            acc += outputs[k].at(i) * cotangents[k].at(i);
    return acc;
}

}  // namespace

GradCheckReport grad_check(Operator& op, std::span<const Tensor> inputs, Rng& rng, double step) {
    std::vector<Tensor> x;
    for (const Tensor& t : inputs) x.push_back(t.astype(DType::F64));

    std::vector<Tensor> fwd = op.forward(x);
    int64_t out_elems = 0;
    for (const Tensor& t : fwd) out_elems += t.numel();

    GradCheckReport report;
    report.full_jacobian = out_elems <= 64;
    report.max_rel_error.assign(x.size(), 0.0);

    // Each pass fixes one cotangent u and checks d<u, f(x)>/dx against the
    // analytic vector-Jacobian product. Full-Jacobian mode enumerates unit
    // cotangents; otherwise a single random u covers the whole map.
    std::vector<std::vector<Tensor>> cotangent_sets;
    if (report.full_jacobian) {
        for (size_t k = 0; k < fwd.size(); ++k)
            for (int64_t j = 0; j < fwd[k].numel(); ++j) {
                std::vector<Tensor> u;
                for (const Tensor& t : fwd) u.push_back(Tensor::zeros({DType::F64, t.shape()}));
                u[k].set(j, 1.0);
                cotangent_sets.push_back(std::move(u));
            }
    } else {
        std::vector<Tensor> u;
        for (const Tensor& t : fwd)
            u.push_back(Tensor::uniform({DType::F64, t.shape()}, rng, -1.0, 1.0));
        cotangent_sets.push_back(std::move(u));
    }

    for (const auto& u : cotangent_sets) {
        std::vector<Tensor> analytic = op.backward(u, x, fwd);
        if (analytic.size() != x.size())
            throw std::runtime_error("grad_check: backward returned wrong gradient count");
        for (size_t k = 0; k < x.size(); ++k) {
            if (!op.input_differentiable(k)) continue;
            auto xv = x[k].data<double>();
            for (int64_t i = 0; i < x[k].numel(); ++i) {
                const double orig = xv[i];
                xv[i] = orig + step;
                std::vector<Tensor> fp = op.forward(x);
                xv[i] = orig - step;
                std::vector<Tensor> fm = op.forward(x);
                xv[i] = orig;
                const double numeric = (contract(fp, u) - contract(fm, u)) / (2.0 * step);
                const double ana = analytic[k].at(i);
                if (!std::isfinite(numeric) || !std::isfinite(ana))
                    throw std::runtime_error("grad_check: non-finite value encountered");
                const double rel = std::abs(ana - numeric) / std::max(1.0, std::abs(ana));
                report.max_rel_error[k] = std::max(report.max_rel_error[k], rel);
            }
        }
    }
    for (double e : report.max_rel_error) report.worst = std::max(report.worst, e);
    return report;
}

}  // namespace bench500
