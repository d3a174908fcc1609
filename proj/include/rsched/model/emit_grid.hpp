#pragma once

#include <vector>

#include "rsched/core/instance.hpp"
#include "rsched/core/reduction.hpp"
#include "rsched/model/builder.hpp"
#include "rsched/model/emit_crew.hpp"

// Grid operation layer: per-slot linearized power flow (sheddable loads,
// status-gated sources and line flows, voltage drops along closed lines),
// generator ramping, the frequency-response limit on how much load can be
// picked up per slot, spanning-forest radiality over the cell graph, and
// the renewable-capacity deviation domain for the adversary.

namespace rsched::model {

// Variable ids registered by emit_grid_operation.  Outer index follows the
// owning Instance vector; inner index is the 0-based slot.  -1 marks a
// combination with no variable (see each field).
struct GridRefs {
    // per line: closing-status variable gating flow and voltage coupling;
    // -1 when the line is always closed (undamaged, no switch)
    std::vector<std::vector<int>> line_status;
    std::vector<std::vector<int>> shed;      // per node; -1 if never loaded
    std::vector<std::vector<int>> volt;      // per node
    std::vector<std::vector<int>> flow_p;    // per line, kW (from -> to)
    std::vector<std::vector<int>> flow_q;    // per line, kvar
    std::vector<std::vector<int>> src_p;     // per source, kW
    std::vector<std::vector<int>> src_q;     // per source, kvar
    std::vector<std::vector<int>> res_cap;   // per source; -1 unless RES:
                                             // deviation-adjusted capacity
    std::vector<std::vector<int>> res_avail; // per source; -1 unless RES:
                                             // capacity made available once
                                             // the cell is cleared
    std::vector<std::vector<int>> sig_up;    // per source; -1 unless the RES
    std::vector<std::vector<int>> sig_dn;    // carries deviation variables
    std::vector<std::vector<int>> root;      // per cell: forest-root flag
    std::vector<std::vector<int>> tree_flow; // per cell edge: connectivity
                                             // commodity between cells
};

// Emit the grid layer on top of the crew layer's status timelines and add
// the shed-energy cost (penalty * kWh) to the objective.  Must run after
// emit_crew_dispatch (uses its repair / closing / clearance variables).
GridRefs emit_grid_operation(const core::Instance& ins,
                             const core::NodeCellGraph& cells,
                             const CrewRefs& crew, ModelBuilder& mb);

}  // namespace rsched::model
