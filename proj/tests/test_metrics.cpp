#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "bench500/metrics.hpp"
#include "bench500/tensor.hpp"

using namespace bench500;

namespace {

// Independent binomial-quantile oracle over exact pmf values via Pascal's
// triangle in long double.
std::pair<int64_t, int64_t> ci_oracle(int64_t n, double target) {
    std::vector<long double> pmf(size_t(n) + 1);
    pmf[0] = std::pow(0.5L, (long double)n);
    for (int64_t k = 0; k < n; ++k)
        pmf[size_t(k) + 1] = pmf[size_t(k)] * (long double)(n - k) / (long double)(k + 1);
    int64_t best = 1;
    for (int64_t l = 1; n + 1 - l >= l; ++l) {
        long double cov = 0;
        for (int64_t k = l; k <= n - l; ++k) cov += pmf[size_t(k)];
        if (cov >= (long double)target)
            best = l;
        else
            break;
    }
    return {best, n + 1 - best};
}

}  // namespace

TEST_CASE("median and CI for samples 1..30") {
    std::vector<double> xs;
    for (int i = 1; i <= 30; ++i) xs.push_back(double(i));
    SummaryStats s = summarize(xs);
    CHECK(s.median == 15.5);
    // n=30: the 10th and 21st order statistics.
    CHECK(s.ci_low == 10.0);
    CHECK(s.ci_high == 21.0);
    CHECK(s.min == 1.0);
    CHECK(s.max == 30.0);

    auto [l, u] = median_ci_order_indices(30);
    auto [lo, uo] = ci_oracle(30, 0.95);
    CHECK(l == lo);
    CHECK(u == uo);
    CHECK(l == 10);
    CHECK(u == 21);
}

TEST_CASE("ci indices match the oracle across sample sizes") {
    for (int64_t n : {1, 2, 3, 5, 6, 10, 15, 29, 30, 31, 50, 100}) {
        auto got = median_ci_order_indices(n);
        auto want = ci_oracle(n, 0.95);
        CHECK(got == want);
    }
}

TEST_CASE("ci bounds are observed samples, never interpolated") {
    Rng rng(66, 0);
    std::vector<double> xs;
    for (int i = 0; i < 41; ++i) xs.push_back(rng.uniform(0, 100));
    SummaryStats s = summarize(xs);
    CHECK(std::count(xs.begin(), xs.end(), s.ci_low) >= 1);
    CHECK(std::count(xs.begin(), xs.end(), s.ci_high) >= 1);
    CHECK(s.ci_low <= s.median);
    CHECK(s.median <= s.ci_high);
}

TEST_CASE("run_repeated") {
    // Constant-duration task: the CI collapses to timer noise.
    RepeatResult r = run_repeated([] {}, 30);
    CHECK(r.stats.n == 30);
    CHECK(r.stats.ci_high - r.stats.ci_low < 1.0);  // well under a millisecond

    // runs=1 degenerates to a single timed execution.
    RepeatResult one = run_repeated([] {}, 1);
    CHECK(one.stats.n == 1);
    CHECK(one.stats.median == one.samples_ms[0]);
    CHECK(one.stats.ci_low == one.samples_ms[0]);
    CHECK(one.stats.ci_high == one.samples_ms[0]);

    // Warmup runs once before the timed runs.
    int calls = 0;
    run_repeated([&] { ++calls; }, 3);
    CHECK(calls == 4);

    // Failure keeps partial sample information in the message.
    int n = 0;
    try {
        run_repeated(
            [&] {
                if (++n >= 3) throw std::runtime_error("boom");
            },
            30);
        FAIL("expected failure");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("samples collected") != std::string::npos);
    }
}

TEST_CASE("metric json lines") {
    MetricRecord rec{12, 2, "loss", 0.5, 999, -1};
    std::string line = metric_record_to_json(rec);
    CHECK(line.find("\"step\":12") != std::string::npos);
    CHECK(line.find("\"metric\":\"loss\"") != std::string::npos);
    CHECK(line.find("\"wall_ns\":999") != std::string::npos);
    CHECK(line.find("worker") == std::string::npos);

    MetricRecord wrec{1, 0, "comm", 1.0, 5, 3};
    CHECK(metric_record_to_json(wrec).find("\"worker\":3") != std::string::npos);
}

TEST_CASE("timed task ordering sanity") {
    using namespace std::chrono_literals;
    RepeatResult slow = run_repeated([] { std::this_thread::sleep_for(2ms); }, 5);
    CHECK(slow.stats.median >= 1.5);
    CHECK(slow.stats.ci_low <= slow.stats.median);
    CHECK(slow.stats.ci_high >= slow.stats.median);
}
