#include <doctest.h>

#include "manetsim/world.hpp"
#include "support/test_util.hpp"

using namespace manetsim;
using namespace manetsim::testutil;

TEST_CASE("the black hole forges a reply claiming adjacency to the target") {
    ScenarioConfig cfg = line_attack_scenario();
    cfg.variant = Variant::DsrUnderAttack;
    World world(cfg);
    PacketLog log;
    log.attach(world);
    world.node(0).start_discovery(3);
    world.engine().run_until(SimTime::from_seconds(1));

    bool saw_forged = false;
    for (const auto& ev : log.filter("send", "RREP")) {
        if (ev.from == 4) {
            CHECK(ev.route.hops() == std::vector<NodeId>{0, 4, 3}); // record [0] + [M, target]
            saw_forged = true;
        }
    }
    CHECK(saw_forged);
}

// oracle: compare scheduled arrival times of the competing replies at the origin
TEST_CASE("with zero reply delay the forged reply lands strictly first") {
    ScenarioConfig cfg = line_attack_scenario();
    cfg.variant = Variant::DsrUnderAttack;
    World world(cfg);
    PacketLog log;
    log.attach(world);
    world.node(0).start_discovery(3);
    world.engine().run_until(SimTime::from_seconds(1));

    std::optional<SimTime> forged_at, honest_at;
    for (const auto& ev : log.filter("recv", "RREP")) {
        if (ev.from != 0) {
            continue; // recv is traced at the consuming origin
        }
        if (ev.route.contains(4)) {
            if (!forged_at) forged_at = ev.t;
        } else {
            if (!honest_at) honest_at = ev.t;
        }
    }
    REQUIRE(forged_at.has_value());
    REQUIRE(honest_at.has_value());
    CHECK(*forged_at < *honest_at);

    // and plain DSR therefore adopted the forgery: the vulnerability under test
    const RouteRecord* adopted = world.node(0).cache().best(3);
    REQUIRE(adopted != nullptr);
    CHECK(adopted->contains(4));
}

TEST_CASE("an attacker that is the true destination answers honestly") {
    ScenarioConfig cfg = static_scenario({{0, 0}, {200, 0}, {200, 100}});
    cfg.traffic.flows = 0;
    cfg.attack.attackers = 1;
    cfg.attack.explicit_ids = {2};
    cfg.attack.allow_attacker_endpoints = true;
    cfg.variant = Variant::DsrUnderAttack;
    World world(cfg);
    PacketLog log;
    log.attach(world);
    world.node(0).start_discovery(2);
    world.engine().run_until(SimTime::from_seconds(1));
    const auto sends = log.filter("send", "RREP");
    REQUIRE(!sends.empty());
    for (const auto& ev : sends) {
        CHECK(ev.from == 2);
        CHECK(ev.route.hops() == std::vector<NodeId>{0, 2}); // honest reply, no forged tail
    }
}

TEST_CASE("every data packet routed into the black hole is sunk") {
    ScenarioConfig cfg = line_attack_scenario(30.0);
    cfg.variant = Variant::DsrUnderAttack;
    World world(cfg);
    PacketLog log;
    log.attach(world);
    world.run();

    const auto report = world.report();
    REQUIRE(report.pdr.has_value());
    CHECK(*report.pdr == doctest::Approx(0.0)); // total sink for the poisoned flow
    CHECK(world.node(4).sink_counter().data > 0);
    CHECK(world.node(4).sink_counter().data == world.ledger().dropped_by_cause(DropCause::Blackhole));

    // no delivered packet ever traversed the attacker
    for (const auto& ev : log.filter("recv", "DATA")) {
        CHECK_FALSE(ev.route.contains(4));
    }
}

TEST_CASE("sink counters equal the ledger's blackhole drops including probes") {
    ScenarioConfig cfg = line_attack_scenario(30.0);
    cfg.variant = Variant::AisDsrUnderAttack; // probes flow through the black hole too
    World world(cfg);
    world.run();
    const std::uint64_t ledger_blackhole =
        world.ledger().dropped_by_cause(DropCause::Blackhole) +
        world.ledger().control_drops_by_cause(DropCause::Blackhole);
    std::uint64_t counters = 0;
    for (NodeId id : world.attackers()) {
        counters += world.node(id).sink_counter().total();
    }
    CHECK(counters == ledger_blackhole);
    CHECK(world.node(4).sink_counter().probes > 0);
}

TEST_CASE("a probe into the black hole times out and counts as a failure") {
    ScenarioConfig cfg = line_attack_scenario(30.0);
    cfg.variant = Variant::AisDsrUnderAttack;
    World world(cfg);
    DefenseLog defense;
    defense.attach(world);
    world.run();

    REQUIRE(!defense.events.empty());
    bool saw_forged_candidate = false;
    for (const auto& ev : defense.events) {
        for (const auto& cand : ev.candidates) {
            if (cand.route.contains(4)) {
                saw_forged_candidate = true;
                CHECK(cand.probe_failures == kProbeCount);
                CHECK(cand.p_bh == doctest::Approx(1.0));
            }
        }
    }
    CHECK(saw_forged_candidate);
}

TEST_CASE("a slow attacker loses the reply race and the baseline stays honest") {
    ScenarioConfig cfg = line_attack_scenario();
    cfg.variant = Variant::DsrUnderAttack;
    cfg.attack.reply_delay_s = 0.5; // forged reply now arrives long after the honest one
    World world(cfg);
    world.node(0).start_discovery(3);
    world.engine().run_until(SimTime::from_seconds(1));
    const RouteRecord* adopted = world.node(0).cache().best(3);
    REQUIRE(adopted != nullptr);
    CHECK_FALSE(adopted->contains(4));
    CHECK(adopted->hops() == std::vector<NodeId>{0, 1, 2, 3});
}
