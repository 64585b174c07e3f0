#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "manetsim/scenario.hpp"
#include "manetsim/world.hpp"

namespace manetsim {

struct SweepSpec {
    std::vector<double> pause_times;
    int seeds_per_point = 1;
    std::vector<Variant> variants; // defaults to all four when empty
    unsigned jobs = 1;             // worlds run concurrently; results are order-independent
};

struct DetailRow {
    Variant variant;
    double pause_time = 0;
    std::uint64_t seed = 0;
    std::optional<MetricsReport> report; // absent when the run failed
    std::string error;
};

struct SummaryRow {
    Variant variant;
    double pause_time = 0;
    int runs = 0; // successful runs averaged
    MetricsReport mean;
    double mean_overhead = 0;
};

struct SweepResult {
    std::vector<DetailRow> detail;   // ordered by (variant, pause_time, seed)
    std::vector<SummaryRow> summary; // ordered by (variant, pause_time)
    bool any_failed = false;
};

/// Run every (variant, pause_time, seed) combination of the spec on top of
/// the base scenario. Individual run failures land in the row's error column
/// and the sweep continues.
SweepResult run_sweep(const ScenarioConfig& base, const SweepSpec& spec);

void write_detail_csv(std::ostream& os, const SweepResult& result);
void write_summary_csv(std::ostream& os, const SweepResult& result);

} // namespace manetsim
