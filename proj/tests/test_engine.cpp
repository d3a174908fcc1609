#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "rsched/core/instance.hpp"
#include "rsched/engine/ccg.hpp"
#include "rsched/model/translate.hpp"
#include "rsched/opt/backend.hpp"

using namespace rsched;
using engine::CcgOptions;
using engine::CcgResult;
using engine::CompactModel;

namespace {

std::string fx(const char* name) {
    return std::string(RSCHED_FIXTURE_DIR "/") + name;
}

CcgOptions fast_opts() {
    CcgOptions o;
    o.bits = 2;  // the worst cases in these tests sit at grid endpoints
    return o;
}

// Renewable island with a deviation budget (same shape as the grid-layer
// fixture): forecast 300 kW against a 250 kW load, 30% error band.
std::string res_island(int budget) {
    std::string s = R"({
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
  "uncertainty": {"max_error": {"pv": 0.3}, "budget": {"pv": %B%}}
})";
    s.replace(s.find("%B%"), 3, std::to_string(budget));
    return s;
}

// Two nodes fed only by a renewable; the far node sits behind a remote
// switch whose controller draws more than the renewable can guarantee, so
// relying on remote closing breaks under the worst case and the plan must
// fall back to the manual crew.
const char* kFragile = R"({
  "network": {
    "nominal_voltage_v": 4160,
    "voltage_min_v": 3900, "voltage_max_v": 4400,
    "nodes": [
      {"id": "r0", "x_m": 0, "y_m": 0, "load_kw": 25,
       "reactive_load_kvar": 2},
      {"id": "r1", "x_m": 100, "y_m": 0, "load_kw": 5,
       "reactive_load_kvar": 1}
    ],
    "lines": [
      {"id": "lr", "from": "r0", "to": "r1", "resistance_ohm": 0.05,
       "reactance_ohm": 0.05, "capacity_kw": 500, "capacity_kvar": 300,
       "switch": {"id": "sr", "kind": "RCS"}}
    ],
    "sources": [
      {"id": "pv", "kind": "res", "node": "r0",
       "p_max_kw": 30, "q_max_kvar": 20}
    ]
  },
  "crews": {
    "travel_speed_kmh": 5,
    "repair_crews": [],
    "operating_crews": [
      {"id": "oc1", "depot_x_m": 0, "depot_y_m": 0,
       "manual_switch_durations_min": {"sr": 10}}
    ],
    "remote_switch_durations_min": {"sr": 2}
  },
  "cyber": {
    "comm_radius_m": 100,
    "routers": [
      {"id": "cc", "role": "control-centre", "x_m": 0, "y_m": 30,
       "rated_power_kw": 0},
      {"id": "f0", "role": "rcs-ftu", "x_m": 0, "y_m": 10,
       "rated_power_kw": 20, "power_node": "r0", "rcs": "sr"}
    ]
  },
  "horizon": {"slot_minutes": 30, "slots": 2},
  "costs": {"default_penalty_per_kwh": 1},
  "uncertainty": {"max_error": {"pv": 0.5}, "budget": {"pv": 1}}
})";

}  // namespace

TEST_CASE("stage partition and family split cover the assembled model") {
    SUBCASE("no renewables: the adversary has nothing to vary") {
        const CompactModel cm =
            engine::assemble_compact(core::load_instance_file(fx("fig5.json")));
        CHECK(cm.ix.s_vars.empty());
        CHECK(cm.ix.scen_mixed_rows.empty());
        CHECK(cm.ix.scen_sigma_rows.empty());
        CHECK(!cm.ix.x_vars.empty());
        CHECK(!cm.ix.y_vars.empty());
        CHECK(cm.ix.x_vars.size() + cm.ix.y_vars.size() ==
              std::size_t(cm.mb.num_variables()));
        CHECK(cm.ix.sched_rows.size() + cm.ix.recourse_rows.size() ==
              std::size_t(cm.mb.num_rows()));
    }
    SUBCASE("an uncertain renewable populates all three families") {
        const CompactModel cm =
            engine::assemble_compact(core::load_instance(res_island(2)));
        CHECK(cm.ix.s_vars.size() == 6);        // up/down per slot
        CHECK(cm.ix.scen_mixed_rows.size() == 3);  // capacity tie per slot
        CHECK(cm.ix.scen_sigma_rows.size() == 1);  // the budget
        CHECK(!cm.ix.sched_rows.empty());
        CHECK(!cm.ix.recourse_rows.empty());
        int downs = 0;
        for (std::size_t j = 0; j < cm.ix.s_vars.size(); ++j) {
            CHECK(cm.smeta.source[j] == 0);
            CHECK(cm.smeta.slot[j] >= 0);
            if (cm.smeta.down[j]) ++downs;
        }
        CHECK(downs == 3);
    }
}

TEST_CASE("an empty scenario pool leaves only the epigraph floor") {
    const CompactModel cm =
        engine::assemble_compact(core::load_instance(res_island(2)));
    auto be = opt::make_backend("builtin");
    const engine::MasterResult mp =
        engine::solve_master(cm.mb, cm.ix, {}, *be, fast_opts());
    REQUIRE(mp.status == opt::SolveStatus::Optimal);
    CHECK(mp.mu == doctest::Approx(0.0));
    CHECK(mp.x.size() == cm.ix.x_vars.size());
}

TEST_CASE(
    "on a certain instance the alternation reproduces the monolithic "
    "optimum in one round") {
    // Deterministic remote-switch fixture: the monolithic mixed-integer
    // solve and the decomposition must agree exactly (cost 25: the far
    // node's first half hour).
    const char* text = R"({
  "network": {
    "nominal_voltage_v": 4160,
    "voltage_min_v": 3900, "voltage_max_v": 4400,
    "nodes": [
      {"id": "na", "x_m": 0, "y_m": 0, "load_kw": 100},
      {"id": "nb", "x_m": 200, "y_m": 0, "load_kw": 50}
    ],
    "lines": [
      {"id": "lab", "from": "na", "to": "nb", "resistance_ohm": 0.1,
       "reactance_ohm": 0.1, "capacity_kw": 300, "capacity_kvar": 200,
       "switch": {"id": "sr", "kind": "RCS"}}
    ],
    "sources": [
      {"id": "g1", "kind": "gt", "node": "na", "p_max_kw": 200,
       "q_max_kvar": 100, "ramp_up_kw_per_slot": 200,
       "ramp_down_kw_per_slot": 200}
    ]
  },
  "crews": {"travel_speed_kmh": 5, "repair_crews": [],
            "operating_crews": [],
            "remote_switch_durations_min": {"sr": 2}},
  "cyber": {
    "comm_radius_m": 1000,
    "routers": [
      {"id": "cc", "role": "control-centre", "x_m": 0, "y_m": 0,
       "rated_power_kw": 0},
      {"id": "f1", "role": "rcs-ftu", "x_m": 100, "y_m": 0,
       "rated_power_kw": 0.075, "power_node": "na", "rcs": "sr"}
    ]
  },
  "horizon": {"slot_minutes": 30, "slots": 3},
  "costs": {"default_penalty_per_kwh": 1}
})";
    core::Instance ins = core::load_instance(text);
    CompactModel cm = engine::assemble_compact(ins);

    auto be = opt::make_backend("builtin");
    const auto mono = be->solve_mip(model::to_lp(cm.mb), {});
    REQUIRE(mono.status == opt::SolveStatus::Optimal);
    CHECK(mono.obj == doctest::Approx(25.0));

    const CcgResult res = engine::ccg_solve(ins, cm, fast_opts(), nullptr);
    REQUIRE(res.status == opt::SolveStatus::Optimal);
    CHECK(res.converged);
    CHECK(res.iterations <= 2);
    CHECK(res.objective == doctest::Approx(25.0));
    CHECK(res.lb == doctest::Approx(res.ub));
    CHECK(!res.feasibility_cuts_used);
    CHECK(!res.duality_warning);
    CHECK(res.x.size() == cm.ix.x_vars.size());
}

TEST_CASE("a zero-cost instance converges immediately at the zero bound") {
    core::Instance ins = core::load_instance_file(fx("twobus.json"));
    const CompactModel cm = engine::assemble_compact(ins);
    const CcgResult res = engine::ccg_solve(ins, cm, fast_opts(), nullptr);
    REQUIRE(res.status == opt::SolveStatus::Optimal);
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    CHECK(res.objective == doctest::Approx(0.0));
}

TEST_CASE(
    "the adversary saturates its deviation budget and the robust cost "
    "grows with it") {
    // Each budgeted slot-deviation cuts the renewable to 210 kW against a
    // 250 kW load: 40 kW shed for half an hour per deviating slot.
    const std::vector<double> expect{20.0, 40.0, 60.0};
    double previous = -1.0;
    for (int budget = 1; budget <= 3; ++budget) {
        CAPTURE(budget);
        core::Instance ins = core::load_instance(res_island(budget));
        const CompactModel cm = engine::assemble_compact(ins);
        const CcgResult res =
            engine::ccg_solve(ins, cm, fast_opts(), nullptr);
        REQUIRE(res.status == opt::SolveStatus::Optimal);
        CHECK(res.converged);
        CHECK(res.objective ==
              doctest::Approx(expect[std::size_t(budget - 1)]));
        CHECK(res.objective >= previous);
        previous = res.objective;

        // bound traces stay monotone and ordered
        for (std::size_t i = 1; i < res.trace.size(); ++i) {
            CHECK(res.trace[i].lb >= res.trace[i - 1].lb - 1e-9);
            CHECK(res.trace[i].ub <= res.trace[i - 1].ub + 1e-9);
        }
        CHECK(res.lb <= res.ub + 1e-6);

        // the worst case uses whole deviations only, spends the entire
        // budget on capacity cuts, and never wastes it raising capacity
        double spent = 0.0;
        for (std::size_t j = 0; j < res.worst_sigma.size(); ++j) {
            const double v = res.worst_sigma[j];
            CHECK(std::fabs(v - std::round(v)) < 1e-12);
            if (cm.smeta.down[j]) spent += v;
            else CHECK(v == 0.0);
        }
        CHECK(spent == doctest::Approx(std::min(budget, 3)));
        CHECK(!res.duality_warning);
    }
}

TEST_CASE(
    "a plan leaning on an unpowerable controller is repaired through "
    "feasibility scenarios") {
    // Remote closing needs the controller's 20 kW guaranteed at r0, but the
    // worst case drops the renewable to 15 kW: the only robust plan closes
    // the switch manually and accepts the rated-power service ceiling.
    core::Instance ins = core::load_instance(kFragile);
    const CompactModel cm = engine::assemble_compact(ins);
    const CcgResult res = engine::ccg_solve(ins, cm, fast_opts(), nullptr);
    REQUIRE(res.status == opt::SolveStatus::Optimal);
    CHECK(res.converged);
    CHECK(res.feasibility_cuts_used);
    CHECK(res.objective == doctest::Approx(12.5));
    CHECK(res.iterations <= 6);
}

TEST_CASE("the robust solve is deterministic end to end") {
    core::Instance ins = core::load_instance(res_island(2));
    const CompactModel cm = engine::assemble_compact(ins);
    const CcgResult a = engine::ccg_solve(ins, cm, fast_opts(), nullptr);
    const CcgResult b = engine::ccg_solve(ins, cm, fast_opts(), nullptr);
    REQUIRE(a.status == opt::SolveStatus::Optimal);
    REQUIRE(b.status == opt::SolveStatus::Optimal);
    CHECK(a.objective == b.objective);
    CHECK(a.iterations == b.iterations);
    REQUIRE(a.x.size() == b.x.size());
    for (std::size_t i = 0; i < a.x.size(); ++i) CHECK(a.x[i] == b.x[i]);
    REQUIRE(a.worst_sigma.size() == b.worst_sigma.size());
    for (std::size_t i = 0; i < a.worst_sigma.size(); ++i)
        CHECK(a.worst_sigma[i] == b.worst_sigma[i]);
}
