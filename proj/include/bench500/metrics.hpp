#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bench500 {

struct MetricRecord {
    int64_t step = 0;
    int64_t epoch = 0;
    std::string metric;
    double value = 0;
    uint64_t wall_ns = 0;
    int worker = -1;  // set for distributed runs
};

// Append-only metric stream. Sinks observe; they never feed back into the
// computation, so enabling them cannot change numeric results.
class MetricSink {
  public:
    virtual ~MetricSink() = default;
    virtual void emit(const MetricRecord& rec) = 0;
};

class MemorySink final : public MetricSink {
  public:
    void emit(const MetricRecord& rec) override { records.push_back(rec); }
    std::vector<MetricRecord> records;
};

class NullSink final : public MetricSink {
  public:
    void emit(const MetricRecord&) override {}
};

// JSON-lines: {"step":..,"epoch":..,"metric":"..","value":..,"wall_ns":..}
std::string metric_record_to_json(const MetricRecord& rec);
void write_metric_stream(const std::vector<MetricRecord>& records, const std::string& path);

struct SummaryStats {
    int64_t n = 0;
    double median = 0;
    double ci_low = 0;   // order statistics of the sample, never interpolated
    double ci_high = 0;
    double min = 0;
    double max = 0;
};

// Nonparametric 95% CI of the median: the smallest symmetric order-statistic
// interval (x_(l), x_(n+1-l)) whose binomial(n, 1/2) coverage is >= 0.95.
// Returns 1-based (l, u); falls back to (1, n) when no interval reaches 95%.
std::pair<int64_t, int64_t> median_ci_order_indices(int64_t n, double coverage = 0.95);

SummaryStats summarize(std::vector<double> samples);

struct RepeatResult {
    SummaryStats stats;
    std::vector<double> samples_ms;  // per timed run, warmup excluded
};

// Runs the task `runs` times after one untimed warmup and summarizes the
// wallclock. Partial samples are preserved in the exception message when the
// task fails mid-way.
RepeatResult run_repeated(const std::function<void()>& task, int runs = 30);

uint64_t monotonic_ns();

// Informational device tag carried on benchmark reports; only the CPU
// reference path exists here.
enum class DeviceKind { Cpu };
const char* device_name(DeviceKind d);

// Report rows: metric,run,step,value,unit. "-" writes to stdout.
struct CsvRow {
    std::string metric;
    int64_t run = 0;
    int64_t step = 0;
    double value = 0;
    std::string unit;
};
void write_csv_report(const std::vector<CsvRow>& rows, const std::string& out_path);

double binomial_cdf(int64_t n, double p, int64_t k);  // P[X <= k]

}  // namespace bench500
