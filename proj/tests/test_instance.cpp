#include <string>

#include "doctest.h"
#include "rsched/core/instance.hpp"

using namespace rsched::core;

namespace {

std::string fx(const char* name) {
    return std::string(RSCHED_FIXTURE_DIR "/") + name;
}

// minimal valid document the error tests mutate
const char* kTiny = R"({
  "network": {
    "nominal_voltage_v": 4160, "voltage_min_v": 3900, "voltage_max_v": 4400,
    "nodes": [
      {"id": "a", "x_m": 0, "y_m": 0},
      {"id": "b", "x_m": 100, "y_m": 0, "load_kw": 10}
    ],
    "lines": [
      {"id": "ab", "from": "a", "to": "b", "resistance_ohm": 0.1,
       "reactance_ohm": 0.2, "capacity_kw": 100, "capacity_kvar": 80}
    ],
    "sources": [
      {"id": "s", "kind": "substation", "node": "a",
       "p_max_kw": 100, "q_max_kvar": 80}
    ]
  },
  "crews": {"travel_speed_kmh": 5, "repair_crews": [],
            "operating_crews": []},
  "horizon": {"slot_minutes": 30, "slots": 4},
  "costs": {"default_penalty_per_kwh": 1}
})";

std::string replaced(const std::string& doc, const std::string& from,
                     const std::string& to) {
    std::string out = doc;
    const auto pos = out.find(from);
    REQUIRE(pos != std::string::npos);
    out.replace(pos, from.size(), to);
    return out;
}

}  // namespace

TEST_CASE("reference network loads with canonical units and defaults") {
    const Instance ins = load_instance_file(fx("fig5.json"));

    CHECK(ins.nodes.size() == 10);
    CHECK(ins.lines.size() == 9);
    CHECK(ins.sources.size() == 1);
    CHECK(ins.repair_crews.size() == 1);
    CHECK(ins.operating_crews.size() == 1);
    CHECK(ins.horizon.slots == 12);
    CHECK(ins.horizon.slot_min == 30.0);
    CHECK(ins.horizon.epsilon_min == doctest::Approx(0.03));
    CHECK(ins.horizon.t_max_min == doctest::Approx(720.0));

    // derived sets
    REQUIRE(ins.fault_lines.size() == 2);
    CHECK(ins.lines[ins.fault_lines[0]].id == "l34");
    CHECK(ins.lines[ins.fault_lines[1]].id == "l78");
    CHECK(ins.ms_lines.size() == 2);
    CHECK(ins.rcs_lines.size() == 1);
    CHECK(ins.lines[ins.rcs_lines[0]].switch_id == "s2");
    CHECK(ins.switch_line("s3") == ins.line_index("l59"));
    CHECK(ins.switch_line("nope") == -1);
    CHECK(ins.line_of_switch("s1").id == "l23");

    // loads expand to per-slot series; reactive defaults to pf-derived
    const Node& n2 = ins.nodes[ins.node_index("n2")];
    REQUIRE(n2.load_kw.size() == 12);
    CHECK(n2.load_kw[0] == 50.0);
    CHECK(n2.load_kw[11] == 50.0);
    CHECK(n2.qload_kvar[0] == doctest::Approx(50.0 * 0.3286841));
    CHECK(ins.power_factor == 0.95);

    // penalties fall back to the costs section
    CHECK(ins.nodes[ins.node_index("n4")].critical);
    CHECK(ins.nodes[ins.node_index("n4")].penalty_per_kwh == 10.0);
    CHECK(n2.penalty_per_kwh == 2.0);

    // voltage defaults propagate
    CHECK(n2.vmin == 3900.0);
    CHECK(n2.vmax == 4400.0);

    // cyber: a direct link to the centre is derived
    REQUIRE(ins.routers.size() == 2);
    CHECK(ins.control_centre == 0);
    const Router& ftu = ins.routers[1];
    CHECK(ftu.role == RouterRole::RcsFtu);
    CHECK(ftu.rcs_line == ins.line_index("l67"));
    CHECK(ftu.power_node == ins.node_index("n7"));
    REQUIRE(ftu.links.size() == 1);
    CHECK(ftu.links[0] == std::vector<int>{1, 0});
    CHECK(ins.warnings.empty());
}

TEST_CASE("crew timing fixture loads with complete duration tables") {
    const Instance ins = load_instance_file(fx("spotcheck.json"));
    CHECK(ins.travel_speed_kmh == 6.0);
    CHECK(ins.fault_lines.size() == 3);
    CHECK(ins.repair_crews.size() == 2);
    CHECK(ins.operating_crews.size() == 2);
    CHECK(ins.remote_min.at("sr") == 2.0);
    CHECK(ins.repair_crews[0].repair_min.at("f1") == 53.0);
    CHECK(ins.repair_crews[1].repair_min.at("f3") == 120.0);
    CHECK(ins.warnings.empty());
    REQUIRE(ins.routers.size() == 2);
    CHECK(ins.routers[1].ups_min == 300.0);
    CHECK(ins.routers[1].links.size() == 1);
}

TEST_CASE("an unreachable router is reported") {
    const Instance ins = load_instance_file(fx("ups.json"));
    REQUIRE(ins.routers.size() == 2);
    CHECK(ins.routers[1].links.empty());
    REQUIRE(ins.warnings.size() == 1);
    CHECK(ins.warnings[0].find("permanently unreachable") !=
          std::string::npos);
}

TEST_CASE("alternative units convert to kW, minutes, meters") {
    const std::string doc = R"({
      "units": {"power": "MW", "time": "h", "distance": "km"},
      "network": {
        "nominal_voltage_v": 4160, "voltage_min_v": 3900,
        "voltage_max_v": 4400,
        "nodes": [
          {"id": "a", "x_m": 0, "y_m": 0},
          {"id": "b", "x_m": 0.1, "y_m": 0, "load_kw": 0.05}
        ],
        "lines": [
          {"id": "ab", "from": "a", "to": "b", "resistance_ohm": 0.1,
           "reactance_ohm": 0.2, "capacity_kw": 0.1, "capacity_kvar": 0.08,
           "damaged": true}
        ],
        "sources": [
          {"id": "s", "kind": "substation", "node": "a",
           "p_max_kw": 0.1, "q_max_kvar": 0.08}
        ]
      },
      "crews": {
        "travel_speed_kmh": 5,
        "repair_crews": [
          {"id": "rc", "depot_x_m": 0, "depot_y_m": 0,
           "repair_durations_min": {"ab": 0.75}}
        ],
        "operating_crews": []
      },
      "horizon": {"slot_minutes": 0.5, "slots": 4},
      "costs": {"default_penalty_per_kwh": 1}
    })";
    const Instance ins = load_instance(doc);
    CHECK(ins.nodes[1].x == doctest::Approx(100.0));
    CHECK(ins.nodes[1].load_kw[0] == doctest::Approx(50.0));
    CHECK(ins.lines[0].p_cap_kw == doctest::Approx(100.0));
    CHECK(ins.sources[0].p_max_kw[0] == doctest::Approx(100.0));
    CHECK(ins.repair_crews[0].repair_min.at("ab") == doctest::Approx(45.0));
    CHECK(ins.horizon.slot_min == doctest::Approx(30.0));
}

TEST_CASE("per-slot series must match the horizon length") {
    const Instance ok = load_instance(
        replaced(kTiny, "\"load_kw\": 10", "\"load_kw\": [10, 20, 30, 40]"));
    CHECK(ok.nodes[1].load_kw == std::vector<double>{10, 20, 30, 40});
    CHECK_THROWS_AS(
        load_instance(
            replaced(kTiny, "\"load_kw\": 10", "\"load_kw\": [10, 20]")),
        InstanceError);
}

TEST_CASE("malformed documents are rejected with the offending path") {
    auto path_of = [](const std::string& doc) {
        try {
            load_instance(doc);
        } catch (const InstanceError& e) {
            return e.path();
        }
        return std::string("(no error)");
    };

    CHECK(path_of(replaced(kTiny, "\"to\": \"b\"", "\"to\": \"zz\"")) ==
          "network.lines[0].to");
    CHECK(path_of(replaced(kTiny, "\"id\": \"b\"", "\"id\": \"a\"")) ==
          "network.nodes[1].id");
    CHECK(path_of(replaced(kTiny, "\"slots\": 4", "\"slots\": 0")) ==
          "horizon.slots");
    CHECK(path_of(replaced(kTiny, "\"crews\"", "\"brigades\"")) ==
          "$.brigades");
    CHECK(path_of(replaced(kTiny, "\"x_m\": 100", "\"x_km\": 100")) ==
          "network.nodes[1].x_km");
    // a damaged line without a repair duration for every crew
    CHECK(path_of(replaced(kTiny, "\"capacity_kvar\": 80}",
                           "\"capacity_kvar\": 80, \"damaged\": true}")) ==
          "crews.repair_crews");
    // shedding penalty required for nodes that carry load
    CHECK(path_of(replaced(kTiny, ",\n  \"costs\": {\"default_penalty_per_kwh\": 1}",
                           "")) == "network.nodes[1].penalty_per_kwh");
    CHECK(path_of(replaced(kTiny, "\"horizon\": {\"slot_minutes\": 30, \"slots\": 4}",
                           "\"horizon\": {\"slot_minutes\": 30, \"slots\": 4, "
                           "\"epsilon_min\": 30}")) == "horizon.epsilon_min");
    CHECK(path_of("{") == "$");
}

TEST_CASE("uncertainty settings attach only to renewable sources") {
    const std::string base = replaced(
        kTiny, "\"sources\": [",
        R"("sources": [
          {"id": "pv", "kind": "res", "node": "b",
           "p_max_kw": [40, 40, 20, 20], "q_max_kvar": 10},
    )");

    SUBCASE("valid settings land on the source") {
        const std::string doc = replaced(
            base, "\"horizon\"",
            R"("uncertainty": {"max_error": {"pv": 0.3},
                              "budget": {"pv": 4}, "bits": 5},
               "horizon")");
        const Instance ins = load_instance(doc);
        const Source& pv = ins.sources[0];
        CHECK(pv.kind == SourceKind::RES);
        CHECK(pv.max_error == 0.3);
        CHECK(pv.budget == 4.0);
        CHECK(ins.sigma_bits == 5);
    }
    SUBCASE("a budget beyond twice the slot count is clamped") {
        const std::string doc = replaced(
            base, "\"horizon\"",
            R"("uncertainty": {"max_error": {"pv": 0.3}, "budget": {"pv": 99}},
               "horizon")");
        const Instance ins = load_instance(doc);
        CHECK(ins.sources[0].budget == 8.0);
        REQUIRE(ins.warnings.size() == 1);
        CHECK(ins.warnings[0].find("clamped") != std::string::npos);
    }
    SUBCASE("non-renewable references are rejected") {
        const std::string doc = replaced(
            base, "\"horizon\"",
            R"("uncertainty": {"max_error": {"s": 0.3}}, "horizon")");
        CHECK_THROWS_AS(load_instance(doc), InstanceError);
    }
}

TEST_CASE("initially energized nodes resolve to sorted indices") {
    const std::string doc = replaced(
        kTiny, "\"sources\": [",
        R"("initially_energized_nodes": ["b", "a"], "sources": [)");
    const Instance ins = load_instance(doc);
    CHECK(ins.initially_energized_nodes == std::vector<int>{0, 1});

    CHECK_THROWS_AS(
        load_instance(replaced(doc, "\"b\", \"a\"", "\"b\", \"zz\"")),
        InstanceError);
    CHECK_THROWS_AS(
        load_instance(replaced(doc, "\"b\", \"a\"", "\"b\", \"b\"")),
        InstanceError);
}

TEST_CASE("a non-positive reserve factor is rejected") {
    const std::string doc = replaced(
        kTiny, "\"q_max_kvar\": 80}", "\"q_max_kvar\": 80, \"reserve_factor\": 0}");
    CHECK_THROWS_AS(load_instance(doc), InstanceError);
    const Instance ok = load_instance(
        replaced(doc, "\"reserve_factor\": 0", "\"reserve_factor\": 0.5"));
    CHECK(ok.sources[0].reserve_factor == 0.5);
}

TEST_CASE("task times touching a slot boundary are perturbed away") {
    // travel 24 min (2000 m midpoint at speed 5) + repair 36 = 60 exactly
    const std::string doc = R"({
      "network": {
        "nominal_voltage_v": 4160, "voltage_min_v": 3900,
        "voltage_max_v": 4400,
        "nodes": [
          {"id": "a", "x_m": 0, "y_m": 0},
          {"id": "b", "x_m": 900, "y_m": 0, "load_kw": 10},
          {"id": "c", "x_m": 1100, "y_m": 0}
        ],
        "lines": [
          {"id": "ab", "from": "a", "to": "b", "resistance_ohm": 0.1,
           "reactance_ohm": 0.2, "capacity_kw": 100, "capacity_kvar": 80},
          {"id": "bc", "from": "b", "to": "c", "resistance_ohm": 0.1,
           "reactance_ohm": 0.2, "capacity_kw": 100, "capacity_kvar": 80,
           "damaged": true}
        ],
        "sources": [
          {"id": "s", "kind": "substation", "node": "a",
           "p_max_kw": 100, "q_max_kvar": 80}
        ]
      },
      "crews": {
        "travel_speed_kmh": 5,
        "repair_crews": [
          {"id": "rc", "depot_x_m": 0, "depot_y_m": 0,
           "repair_durations_min": {"bc": 36}}
        ],
        "operating_crews": []
      },
      "horizon": {"slot_minutes": 30, "slots": 4},
      "costs": {"default_penalty_per_kwh": 1}
    })";
    const Instance ins = load_instance(doc);
    REQUIRE(ins.warnings.size() == 1);
    CHECK(ins.warnings[0].find("perturbed") != std::string::npos);
    CHECK(ins.repair_crews[0].repair_min.at("bc") ==
          doctest::Approx(36.06));
}
