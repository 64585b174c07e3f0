#include "manetsim/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <ostream>
#include <thread>

#include "manetsim/error.hpp"

namespace manetsim {

namespace {

std::string csv_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? csv_num(*v) : ""; }

void accumulate(MetricsReport& acc, const MetricsReport& r, int& pdr_n, int& delay_n, int& plr_n,
                int& dpr_n) {
    auto add = [](std::optional<double>& dst, const std::optional<double>& src, int& n) {
        if (src) {
            dst = dst.value_or(0.0) + *src;
            ++n;
        }
    };
    add(acc.pdr, r.pdr, pdr_n);
    add(acc.avg_delay_ms, r.avg_delay_ms, delay_n);
    add(acc.plr_percent, r.plr_percent, plr_n);
    add(acc.dpr_percent, r.dpr_percent, dpr_n);
    acc.throughput_bps = acc.throughput_bps.value_or(0.0) + r.throughput_bps.value_or(0.0);
    acc.control_overhead_packets += r.control_overhead_packets;
    acc.originated += r.originated;
    acc.received += r.received;
}

} // namespace

SweepResult run_sweep(const ScenarioConfig& base, const SweepSpec& spec) {
    if (spec.pause_times.empty()) {
        throw ConfigError("sweep: pause time list is empty");
    }
    if (spec.seeds_per_point < 1) {
        throw ConfigError("sweep: seeds must be >= 1");
    }
    std::vector<Variant> variants = spec.variants;
    if (variants.empty()) {
        variants = {Variant::DsrBaseline, Variant::DsrUnderAttack, Variant::AisDsrUnderAttack,
                    Variant::AisDsrClean};
    }

    SweepResult result;
    // fixed (variant, pause, seed) order regardless of execution interleaving
    for (Variant v : variants) {
        for (double pause : spec.pause_times) {
            for (int s = 0; s < spec.seeds_per_point; ++s) {
                DetailRow row;
                row.variant = v;
                row.pause_time = pause;
                row.seed = base.seed + static_cast<std::uint64_t>(s);
                result.detail.push_back(std::move(row));
            }
        }
    }

    const unsigned jobs = std::max(1u, spec.jobs);
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= result.detail.size()) {
                return;
            }
            DetailRow& row = result.detail[i];
            ScenarioConfig cfg = base;
            cfg.variant = row.variant;
            cfg.pause_time_s = row.pause_time;
            cfg.seed = row.seed;
            try {
                row.report = run_experiment(cfg).metrics;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    for (const auto& row : result.detail) {
        if (!row.report) {
            result.any_failed = true;
        }
    }

    // per-(variant, pause) means over successful seeds
    for (Variant v : variants) {
        for (double pause : spec.pause_times) {
            SummaryRow sum;
            sum.variant = v;
            sum.pause_time = pause;
            MetricsReport acc;
            int pdr_n = 0, delay_n = 0, plr_n = 0, dpr_n = 0;
            for (const auto& row : result.detail) {
                if (row.variant != v || row.pause_time != pause || !row.report) {
                    continue;
                }
                accumulate(acc, *row.report, pdr_n, delay_n, plr_n, dpr_n);
                ++sum.runs;
            }
            if (sum.runs > 0) {
                const double n = sum.runs;
                if (pdr_n) acc.pdr = *acc.pdr / pdr_n;
                else acc.pdr.reset();
                if (delay_n) acc.avg_delay_ms = *acc.avg_delay_ms / delay_n;
                else acc.avg_delay_ms.reset();
                if (plr_n) acc.plr_percent = *acc.plr_percent / plr_n;
                else acc.plr_percent.reset();
                if (dpr_n) acc.dpr_percent = *acc.dpr_percent / dpr_n;
                else acc.dpr_percent.reset();
                acc.throughput_bps = *acc.throughput_bps / n;
                sum.mean_overhead = static_cast<double>(acc.control_overhead_packets) / n;
                sum.mean = acc;
            }
            result.summary.push_back(std::move(sum));
        }
    }
    return result;
}

void write_detail_csv(std::ostream& os, const SweepResult& result) {
    os << "variant,pause_time,seed,pdr,throughput_bps,delay_ms,plr_percent,dpr_percent,overhead,error\n";
    for (const auto& row : result.detail) {
        os << to_string(row.variant) << "," << csv_num(row.pause_time) << "," << row.seed << ",";
        if (row.report) {
            const auto& r = *row.report;
            os << opt_num(r.pdr) << "," << opt_num(r.throughput_bps) << "," << opt_num(r.avg_delay_ms)
               << "," << opt_num(r.plr_percent) << "," << opt_num(r.dpr_percent) << ","
               << r.control_overhead_packets << ",";
        } else {
            os << ",,,,,,";
        }
        os << row.error << "\n";
    }
}

void write_summary_csv(std::ostream& os, const SweepResult& result) {
    os << "variant,pause_time,runs,pdr,throughput_bps,delay_ms,plr_percent,dpr_percent,overhead\n";
    for (const auto& row : result.summary) {
        os << to_string(row.variant) << "," << csv_num(row.pause_time) << "," << row.runs << ","
           << opt_num(row.mean.pdr) << "," << opt_num(row.mean.throughput_bps) << ","
           << opt_num(row.mean.avg_delay_ms) << "," << opt_num(row.mean.plr_percent) << ","
           << opt_num(row.mean.dpr_percent) << "," << csv_num(row.mean_overhead) << "\n";
    }
}

} // namespace manetsim
