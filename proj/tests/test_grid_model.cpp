#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "rsched/core/instance.hpp"
#include "rsched/core/reduction.hpp"
#include "rsched/model/builder.hpp"
#include "rsched/model/emit_crew.hpp"
#include "rsched/model/emit_grid.hpp"
#include "rsched/model/translate.hpp"
#include "rsched/opt/backend.hpp"

using namespace rsched;
using model::GridRefs;
using model::ModelBuilder;

namespace {

std::string fx(const char* name) {
    return std::string(RSCHED_FIXTURE_DIR "/") + name;
}

struct Built {
    core::Instance ins;
    core::NodeCellGraph cells;
    ModelBuilder mb;
    model::CrewRefs crew;
    GridRefs grid;
};

Built build(core::Instance loaded) {
    Built b;
    b.ins = std::move(loaded);
    b.cells = core::reduce_network(b.ins);
    b.crew = model::emit_crew_dispatch(b.ins, b.cells, b.mb);
    b.grid = model::emit_grid_operation(b.ins, b.cells, b.crew, b.mb);
    return b;
}

opt::MipSolution solve(Built& b) {
    b.mb.finalize();
    auto lp = model::to_lp(b.mb);
    return opt::make_backend("builtin")->solve_mip(lp, {});
}

const model::Row& row_named(const ModelBuilder& mb, const std::string& name) {
    for (const model::Row& r : mb.rows())
        if (r.name == name) return r;
    static model::Row dummy;
    REQUIRE_MESSAGE(false, ("missing row " + name));
    return dummy;
}

double coef_on(const model::Row& r, int var) {
    for (const model::Term& t : r.terms)
        if (t.var == var) return t.coef;
    return 0.0;
}

// A small island whose only source is a renewable with a deviation budget:
// forecast 300 kW, error band 30%, at most 2 deviating slot-sides.
const char* kResIsland = R"({
  "network": {
    "nominal_voltage_v": 4160,
    "voltage_min_v": 3900, "voltage_max_v": 4400,
    "nodes": [
      {"id": "r0", "x_m": 0, "y_m": 0},
      {"id": "r1", "x_m": 50, "y_m": 0, "load_kw": 250,
       "reactive_load_kvar": 0}
    ],
    "lines": [
      {"id": "rl", "from": "r0", "to": "r1", "resistance_ohm": 0.05,
       "reactance_ohm": 0.05, "capacity_kw": 500, "capacity_kvar": 300}
    ],
    "sources": [
      {"id": "pv", "kind": "res", "node": "r0",
       "p_max_kw": 300, "q_max_kvar": 150}
    ]
  },
  "crews": {"travel_speed_kmh": 5, "repair_crews": [],
            "operating_crews": []},
  "horizon": {"slot_minutes": 30, "slots": 3},
  "costs": {"default_penalty_per_kwh": 1},
  "uncertainty": {"max_error": {"pv": 0.3}, "budget": {"pv": 2}}
})";

// Four single-node cells on a ring of manual switches plus one spur; each
// test case pins the switch states directly.
const char* kRing = R"({
  "network": {
    "nominal_voltage_v": 4160,
    "voltage_min_v": 3900, "voltage_max_v": 4400,
    "nodes": [
      {"id": "n1", "x_m": 0, "y_m": 0},
      {"id": "n2", "x_m": 100, "y_m": 0},
      {"id": "n3", "x_m": 100, "y_m": 100},
      {"id": "n4", "x_m": 0, "y_m": 100}
    ],
    "lines": [
      {"id": "e12", "from": "n1", "to": "n2", "resistance_ohm": 0.1,
       "reactance_ohm": 0.1, "capacity_kw": 100, "capacity_kvar": 100,
       "switch": {"id": "s12", "kind": "MS"}},
      {"id": "e23", "from": "n2", "to": "n3", "resistance_ohm": 0.1,
       "reactance_ohm": 0.1, "capacity_kw": 100, "capacity_kvar": 100,
       "switch": {"id": "s23", "kind": "MS"}},
      {"id": "e31", "from": "n3", "to": "n1", "resistance_ohm": 0.1,
       "reactance_ohm": 0.1, "capacity_kw": 100, "capacity_kvar": 100,
       "switch": {"id": "s31", "kind": "MS"}},
      {"id": "e34", "from": "n3", "to": "n4", "resistance_ohm": 0.1,
       "reactance_ohm": 0.1, "capacity_kw": 100, "capacity_kvar": 100,
       "switch": {"id": "s34", "kind": "MS"}}
    ],
    "sources": [
      {"id": "sub", "kind": "substation", "node": "n1",
       "p_max_kw": 100, "q_max_kvar": 100}
    ]
  },
  "crews": {"travel_speed_kmh": 5, "repair_crews": [],
            "operating_crews": [
        {"id": "oc1", "depot_x_m": 0, "depot_y_m": 0,
         "manual_switch_durations_min":
             {"s12": 10, "s23": 10, "s31": 10, "s34": 10}}]},
  "horizon": {"slot_minutes": 30, "slots": 2},
  "costs": {"default_penalty_per_kwh": 1}
})";

// states[k][t]: pinned closing status of switch position k at slot t+1
void pin_switches(Built& b, const std::vector<std::vector<double>>& states) {
    for (std::size_t k = 0; k < states.size(); ++k)
        for (std::size_t t = 0; t < states[k].size(); ++t)
            b.mb.fix(b.crew.w[k][t], states[k][t]);
}

}  // namespace

TEST_CASE("a healthy two-bus feeder serves its load and shows the "
          "hand-computed voltage drop") {
    Built b = build(core::load_instance_file(fx("twobus.json")));
    auto sol = solve(b);
    REQUIRE(sol.status == opt::SolveStatus::Optimal);
    CHECK(sol.obj <= 1e-7);  // nothing shed

    // drop = (0.5 ohm * 80 kW + 1.0 ohm * 10 kvar) * 1000 / 4160 V
    const double drop = (0.5 * 80.0 + 1.0 * 10.0) * 1000.0 / 4160.0;
    for (int t = 0; t < 2; ++t) {
        CHECK(sol.x[std::size_t(b.grid.shed[1][std::size_t(t)])] ==
              doctest::Approx(0.0).scale(1.0));
        const double va = sol.x[std::size_t(b.grid.volt[0][std::size_t(t)])];
        const double vb = sol.x[std::size_t(b.grid.volt[1][std::size_t(t)])];
        CHECK(va - vb == doctest::Approx(drop).epsilon(1e-9));
        CHECK(sol.x[std::size_t(b.grid.flow_p[0][std::size_t(t)])] ==
              doctest::Approx(80.0));
        CHECK(sol.x[std::size_t(b.grid.flow_q[0][std::size_t(t)])] ==
              doctest::Approx(10.0));
        // the single cell is its own root every slot
        CHECK(sol.x[std::size_t(b.grid.root[0][std::size_t(t)])] ==
              doctest::Approx(1.0));
    }
}

TEST_CASE("renewable capacity follows pinned deviations and the budget "
          "limits how many may deviate") {
    auto fresh = [] { return build(core::load_instance(kResIsland)); };

    SUBCASE("forecast output serves the island exactly") {
        Built b = fresh();
        for (int t = 0; t < 3; ++t) {
            b.mb.fix(b.grid.sig_up[0][std::size_t(t)], 0.0);
            b.mb.fix(b.grid.sig_dn[0][std::size_t(t)], 0.0);
        }
        auto sol = solve(b);
        REQUIRE(sol.status == opt::SolveStatus::Optimal);
        CHECK(sol.obj <= 1e-7);
        for (int t = 0; t < 3; ++t)
            CHECK(sol.x[std::size_t(b.grid.res_cap[0][std::size_t(t)])] ==
                  doctest::Approx(300.0));
    }

    SUBCASE("an upward slot raises available capacity, a downward slot "
            "forces shedding") {
        Built b = fresh();
        b.mb.fix(b.grid.sig_up[0][0], 1.0);
        b.mb.fix(b.grid.sig_dn[0][0], 0.0);
        b.mb.fix(b.grid.sig_up[0][1], 0.0);
        b.mb.fix(b.grid.sig_dn[0][1], 1.0);
        b.mb.fix(b.grid.sig_up[0][2], 0.0);
        b.mb.fix(b.grid.sig_dn[0][2], 0.0);
        auto sol = solve(b);
        REQUIRE(sol.status == opt::SolveStatus::Optimal);
        // slot 2 capacity 300*(1-0.3)=210 < 250 load: shed 40 kW for half
        // an hour at 1 $/kWh
        CHECK(sol.obj == doctest::Approx(20.0).epsilon(1e-9));
        CHECK(sol.x[std::size_t(b.grid.res_cap[0][0])] ==
              doctest::Approx(390.0));
        // cleared cell makes the whole deviated capacity available
        CHECK(sol.x[std::size_t(b.grid.res_avail[0][0])] ==
              doctest::Approx(390.0));
        CHECK(sol.x[std::size_t(b.grid.res_cap[0][1])] ==
              doctest::Approx(210.0));
        CHECK(sol.x[std::size_t(b.grid.shed[1][1])] ==
              doctest::Approx(40.0));
        CHECK(sol.x[std::size_t(b.grid.shed[1][2])] ==
              doctest::Approx(0.0).scale(1.0));
    }

    SUBCASE("deviating in more slots than the budget permits is rejected") {
        Built b = fresh();
        for (int t = 0; t < 3; ++t) {
            b.mb.fix(b.grid.sig_up[0][std::size_t(t)], 0.0);
            b.mb.fix(b.grid.sig_dn[0][std::size_t(t)], 1.0);
        }
        auto sol = solve(b);
        CHECK(sol.status == opt::SolveStatus::Infeasible);
    }
}

TEST_CASE("spanning forests pass radiality while a rootless cycle is "
          "rejected") {
    SUBCASE("all-open islands then a closing tree") {
        Built b = build(core::load_instance(kRing));
        // slot 1: everything open; slot 2: tree n1-n2-n3-n4
        pin_switches(b, {{0, 1}, {0, 1}, {0, 0}, {0, 1}});
        auto sol = solve(b);
        REQUIRE(sol.status == opt::SolveStatus::Optimal);
        double roots1 = 0.0, roots2 = 0.0;
        for (int c = 0; c < 4; ++c) {
            roots1 += sol.x[std::size_t(b.grid.root[std::size_t(c)][0])];
            roots2 += sol.x[std::size_t(b.grid.root[std::size_t(c)][1])];
        }
        // every island is its own root, then one root for the joined tree
        CHECK(roots1 == doctest::Approx(4.0));
        CHECK(roots2 == doctest::Approx(1.0));
        for (int e = 0; e < 4; ++e)  // open edges carry no commodity
            CHECK(sol.x[std::size_t(b.grid.tree_flow[std::size_t(e)][0])] ==
                  doctest::Approx(0.0).scale(1.0));
    }

    SUBCASE("a closed 3-cycle beside an isolated cell has no root to spare") {
        Built b = build(core::load_instance(kRing));
        pin_switches(b, {{1, 1}, {1, 1}, {1, 1}, {0, 0}});
        auto sol = solve(b);
        CHECK(sol.status == opt::SolveStatus::Infeasible);
    }
}

TEST_CASE("per-slot pickup headroom counts cleared distributed sources "
          "only") {
    // three 200 kW gas turbines and three 300 kW renewables at 5%
    // response, plus a substation that must not enter the sum
    const char* text = R"({
      "network": {
        "nominal_voltage_v": 4160,
        "voltage_min_v": 3900, "voltage_max_v": 4400,
        "nodes": [{"id": "g1", "x_m": 0, "y_m": 0, "load_kw": 10}],
        "lines": [],
        "sources": [
          {"id": "sub", "kind": "substation", "node": "g1",
           "p_max_kw": 500, "q_max_kvar": 100},
          {"id": "gta", "kind": "gt", "node": "g1", "p_max_kw": 200,
           "q_max_kvar": 50, "freq_response_rate": 0.05},
          {"id": "gtb", "kind": "gt", "node": "g1", "p_max_kw": 200,
           "q_max_kvar": 50, "freq_response_rate": 0.05},
          {"id": "gtc", "kind": "gt", "node": "g1", "p_max_kw": 200,
           "q_max_kvar": 50, "freq_response_rate": 0.05},
          {"id": "pva", "kind": "res", "node": "g1", "p_max_kw": 300,
           "q_max_kvar": 50, "freq_response_rate": 0.05},
          {"id": "pvb", "kind": "res", "node": "g1", "p_max_kw": 300,
           "q_max_kvar": 50, "freq_response_rate": 0.05},
          {"id": "pvc", "kind": "res", "node": "g1", "p_max_kw": 300,
           "q_max_kvar": 50, "freq_response_rate": 0.05}
        ]
      },
      "crews": {"travel_speed_kmh": 5, "repair_crews": [],
                "operating_crews": []},
      "horizon": {"slot_minutes": 30, "slots": 1},
      "costs": {"default_penalty_per_kwh": 1}
    })";
    Built b = build(core::load_instance(text));
    const model::Row& r = row_named(b.mb, "pickup[1]");
    CHECK(r.sense == model::RowSense::LE);
    CHECK(r.rhs == doctest::Approx(-10.0));
    CHECK(coef_on(r, b.grid.shed[0][0]) == doctest::Approx(-1.0));
    // 0.05 * (3*200 + 3*300) = 75 kW of headroom hangs on the cell flag
    CHECK(coef_on(r, b.crew.uNC[0][0]) == doctest::Approx(-75.0));
}
