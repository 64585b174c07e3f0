// manetsim command line: run a single scenario or sweep pause times across
// protocol variants, writing report.txt / detail.csv / summary.csv and
// optional JSON-lines traces.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "manetsim/error.hpp"
#include "manetsim/scenario.hpp"
#include "manetsim/sweep.hpp"
#include "manetsim/world.hpp"

namespace {

using namespace manetsim;

constexpr int kExitOk = 0;
constexpr int kExitRunFault = 1;
constexpr int kExitConfigError = 2;

struct CommonOpts {
    std::string scenario_path;
    std::string out_dir = ".";
    std::vector<std::string> traces;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> variant;
    bool strict_loss = false;
};

ScenarioConfig load_with_overrides(const CommonOpts& opts) {
    ScenarioConfig cfg = load_scenario(opts.scenario_path);
    if (opts.seed) {
        cfg.seed = *opts.seed;
    }
    if (opts.variant) {
        auto v = variant_from_string(*opts.variant);
        if (!v) {
            throw ConfigError("unknown variant '" + *opts.variant + "'");
        }
        cfg.variant = *v;
    }
    if (opts.strict_loss) {
        cfg.strict_loss = true;
    }
    cfg.validate();
    return cfg;
}

std::ofstream open_out(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / name);
    if (!os) {
        throw Error("cannot write " + (dir / name).string());
    }
    return os;
}

int cmd_run(const CommonOpts& opts) {
    ScenarioConfig cfg = load_with_overrides(opts);
    const std::filesystem::path out_dir(opts.out_dir);
    const std::set<std::string> traces(opts.traces.begin(), opts.traces.end());

    World world(cfg);
    std::ofstream events_os, packets_os, defense_os, mobility_os;
    if (traces.count("events")) {
        events_os = open_out(out_dir, "events.jsonl");
        world.trace_events_to(events_os);
    }
    if (traces.count("packets")) {
        packets_os = open_out(out_dir, "packets.jsonl");
        world.trace_packets_to(packets_os);
    }
    if (traces.count("defense")) {
        defense_os = open_out(out_dir, "defense.jsonl");
        world.trace_defense_to(defense_os);
    }
    if (traces.count("mobility")) {
        mobility_os = open_out(out_dir, "mobility.jsonl");
        world.trace_mobility_to(mobility_os);
    }

    world.run();

    RunResult result;
    result.metrics = world.report();
    result.attackers = world.attackers();
    result.sunk_data = world.sunk_data();
    result.sunk_probes = world.sunk_probes();

    const std::string report = run_report_text(cfg, result);
    auto report_os = open_out(out_dir, "report.txt");
    report_os << report;
    report_os.close();

    // single-row detail.csv so run and sweep outputs stay schema-compatible
    SweepResult single;
    DetailRow row;
    row.variant = cfg.variant;
    row.pause_time = cfg.pause_time_s;
    row.seed = cfg.seed;
    row.report = result.metrics;
    single.detail.push_back(row);
    auto detail_os = open_out(out_dir, "detail.csv");
    write_detail_csv(detail_os, single);
    detail_os.close();

    auto ledger_os = open_out(out_dir, "ledger.jsonl");
    world.ledger().export_jsonl(ledger_os);
    ledger_os.close();

    std::cout << report;
    return kExitOk;
}

int cmd_sweep(const CommonOpts& opts, const std::string& pause_times_arg, int seeds,
              const std::vector<std::string>& variant_names, unsigned jobs) {
    ScenarioConfig base = load_with_overrides(opts);

    SweepSpec spec;
    spec.seeds_per_point = seeds;
    spec.jobs = jobs;
    std::stringstream ss(pause_times_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) {
            continue;
        }
        try {
            spec.pause_times.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("bad pause time '" + tok + "'");
        }
    }
    for (const auto& name : variant_names) {
        auto v = variant_from_string(name);
        if (!v) {
            throw ConfigError("unknown variant '" + name + "'");
        }
        spec.variants.push_back(*v);
    }

    const SweepResult result = run_sweep(base, spec);

    const std::filesystem::path out_dir(opts.out_dir);
    auto detail_os = open_out(out_dir, "detail.csv");
    write_detail_csv(detail_os, result);
    detail_os.close();
    auto summary_os = open_out(out_dir, "summary.csv");
    write_summary_csv(summary_os, result);
    summary_os.close();

    std::cout << "sweep: " << result.detail.size() << " runs, "
              << (result.any_failed ? "with failures" : "all succeeded") << "\n";
    if (result.any_failed) {
        for (const auto& row : result.detail) {
            if (!row.report) {
                std::cerr << to_string(row.variant) << " pause=" << row.pause_time
                          << " seed=" << row.seed << ": " << row.error << "\n";
            }
        }
        return kExitRunFault;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"manetsim: deterministic MANET simulator with a DSR-style protocol,\n"
                 "black-hole adversaries and an immune-inspired route-vetting defense"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string pause_times_arg;
    int seeds = 1;
    std::vector<std::string> variant_names;
    unsigned jobs = 1;

    auto add_common = [&opts](CLI::App* cmd) {
        cmd->add_option("--scenario", opts.scenario_path, "scenario file")->required();
        cmd->add_option("--seed", opts.seed, "override the scenario seed");
        cmd->add_option("--variant", opts.variant,
                        "dsr-baseline | dsr-under-attack | ais-dsr-under-attack | ais-dsr-clean");
        cmd->add_option("--out", opts.out_dir, "output directory (default .)");
        cmd->add_option("--trace", opts.traces, "events, packets, defense, mobility")
            ->delimiter(',');
        cmd->add_flag("--strict-loss", opts.strict_loss,
                      "count packets still buffered at the end as lost");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "run one scenario and write report.txt");
    add_common(run_cmd);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "sweep pause times across variants");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--pause-times", pause_times_arg, "comma-separated seconds, e.g. 0,50,100")
        ->required();
    sweep_cmd->add_option("--seeds", seeds, "seeds per sweep point (default 1)");
    sweep_cmd->add_option("--variants", variant_names, "subset of variants (default: all four)")
        ->delimiter(',');
    sweep_cmd->add_option("--jobs", jobs, "parallel worlds (default 1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            return cmd_run(opts);
        }
        return cmd_sweep(opts, pause_times_arg, seeds, variant_names, jobs);
    } catch (const manetsim::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return kExitRunFault;
    }
}
