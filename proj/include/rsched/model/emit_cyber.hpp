#pragma once

#include <vector>

#include "rsched/core/instance.hpp"
#include "rsched/core/reduction.hpp"
#include "rsched/model/builder.hpp"
#include "rsched/model/emit_crew.hpp"
#include "rsched/model/emit_grid.hpp"

// Communication layer: router availability chained through multi-hop links
// to the control centre, the UPS-or-grid power prerequisite tying routers
// to load service at their supply node, remote-close windows for remotely
// switchable lines, and the merge of manual and remote closing status into
// the per-switch closing variable used by the grid layer.

namespace rsched::model {

// Variable ids registered by emit_cyber_coupling; inner index is the
// 0-based slot.
struct CyberRefs {
    std::vector<std::vector<int>> uc;    // per router: available
    std::vector<std::vector<int>> ups;   // per router: backup alive (fixed)
    // per router x candidate path x slot: path usable end to end
    std::vector<std::vector<std::vector<int>>> ulink;
    // per switch position (CrewRefs ordering): remotely closed; -1 for
    // manual-only switches
    std::vector<std::vector<int>> wrcs;
};

// Emit the communication layer.  Must run after emit_crew_dispatch and
// emit_grid_operation (consumes clearance, switch and shedding variables);
// completes the closing-status variables the grid layer already gated on.
CyberRefs emit_cyber_coupling(const core::Instance& ins,
                              const core::NodeCellGraph& cells,
                              const CrewRefs& crew, const GridRefs& grid,
                              ModelBuilder& mb);

// Name helper: candidate path k of a router at a slot.
std::string link_var(const std::string& router, int k, int t);

}  // namespace rsched::model
