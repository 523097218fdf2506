#include "bench500/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bench500 {

uint64_t monotonic_ns() {
    return uint64_t(std::chrono::duration_cast<std::chrono::nanoseconds>(
                        std::chrono::steady_clock::now().time_since_epoch())
                        .count());
}

std::string metric_record_to_json(const MetricRecord& rec) {
    nlohmann::json j{{"step", rec.step},
                     {"epoch", rec.epoch},
                     {"metric", rec.metric},
                     {"value", rec.value},
                     {"wall_ns", rec.wall_ns}};
    if (rec.worker >= 0) j["worker"] = rec.worker;
    return j.dump();
}

void write_metric_stream(const std::vector<MetricRecord>& records, const std::string& path) {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (path != "-") {
        file.open(path);
        if (!file) throw std::runtime_error("cannot open metric stream '" + path + "'");
        out = &file;
    }
    for (const MetricRecord& r : records) *out << metric_record_to_json(r) << "\n";
}

double binomial_cdf(int64_t n, double p, int64_t k) {
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    double cdf = 0.0;
    double pmf = std::pow(1.0 - p, double(n));  // P[X = 0]
    for (int64_t i = 0;; ++i) {
        cdf += pmf;
        if (i == k) break;
        pmf *= double(n - i) / double(i + 1) * (p / (1.0 - p));
    }
    return std::min(cdf, 1.0);
}

std::pair<int64_t, int64_t> median_ci_order_indices(int64_t n, double coverage) {
    if (n < 1) throw std::runtime_error("median_ci_order_indices: empty sample");
    // Coverage of (x_(l), x_(n+1-l)) for the median is P[l <= X <= n-l],
    // X ~ Bin(n, 1/2). Largest l keeping coverage above the target wins.
    int64_t best = 1;
    for (int64_t l = 1; 2 * l <= n + 1; ++l) {
        const int64_t u = n + 1 - l;
        if (l > u) break;
        const double cov = binomial_cdf(n, 0.5, u - 1) - binomial_cdf(n, 0.5, l - 1);
        if (cov >= coverage)
            best = l;
        else
            break;
    }
    return {best, n + 1 - best};
}

SummaryStats summarize(std::vector<double> samples) {
    if (samples.empty()) throw std::runtime_error("summarize: no samples");
    std::sort(samples.begin(), samples.end());
    SummaryStats s;
    s.n = int64_t(samples.size());
    const size_t n = samples.size();
    s.median = (n % 2 == 1) ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
    auto [l, u] = median_ci_order_indices(s.n);
    s.ci_low = samples[size_t(l - 1)];
    s.ci_high = samples[size_t(u - 1)];
    s.min = samples.front();
    s.max = samples.back();
    return s;
}

RepeatResult run_repeated(const std::function<void()>& task, int runs) {
    if (runs < 1) throw std::runtime_error("run_repeated: runs must be >= 1");
    RepeatResult r;
    task();  // untimed warmup, removes first-touch noise
    for (int i = 0; i < runs; ++i) {
        const uint64_t t0 = monotonic_ns();
        try {
            task();
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "run_repeated: task failed on run " << (i + 1) << " of " << runs << ": "
                << e.what() << " (" << r.samples_ms.size() << " samples collected)";
            throw std::runtime_error(msg.str());
        }
        r.samples_ms.push_back(double(monotonic_ns() - t0) / 1e6);
    }
    r.stats = summarize(r.samples_ms);
    return r;
}

const char* device_name(DeviceKind d) {
    (void)d;
    return "cpu";
}

void write_csv_report(const std::vector<CsvRow>& rows, const std::string& out_path) {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (out_path != "-") {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot open report '" + out_path + "'");
        out = &file;
    }
    *out << "metric,run,step,value,unit\n";
    for (const CsvRow& r : rows) {
        std::ostringstream line;
        line.precision(12);
        line << r.metric << "," << r.run << "," << r.step << "," << r.value << "," << r.unit;
        *out << line.str() << "\n";
    }
}

}  // namespace bench500
