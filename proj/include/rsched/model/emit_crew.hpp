#pragma once

#include <string>
#include <vector>

#include "rsched/core/instance.hpp"
#include "rsched/core/reduction.hpp"
#include "rsched/model/builder.hpp"

// Crew scheduling layer: task clustering, crew routing, arrival/completion
// timing, and the per-slot repair / manual-close / cell-clearance status
// timelines that the grid and communication layers build on.

namespace rsched::model {

// Which crew may serve which task.  Tasks are clustered greedily by
// ascending (depot distance, task position, crew position) with per-crew
// capacity ceil(tasks/crews); the resulting clusters partition the tasks.
// Repair tasks are positions into Instance::fault_lines; switching tasks
// are positions into `switch_lines` (every switch-carrying line, ascending,
// since a remote switch can also be closed manually on site).
struct Clusters {
    std::vector<int> switch_lines;               // line indices, ascending
    std::vector<std::vector<int>> repair_tasks;  // repair crew -> positions
    std::vector<std::vector<int>> switch_tasks;  // operating crew -> positions
};

Clusters cluster_tasks(const core::Instance& ins);

// Variable ids registered by emit_crew_dispatch, for downstream emitters,
// extractors and tests.  Time-slot vectors are 0-based (slot t = index+1).
struct CrewRefs {
    Clusters clusters;
    std::vector<int> te_fault;    // per fault position: repair completion
    std::vector<int> te_switch;   // per switch position: manual-close done
    std::vector<int> tncr_cell;   // per cell: clearance time (0 if no fault)
    std::vector<int> tncr_sw;     // per switch position: both-sides-cleared
    std::vector<std::vector<int>> uL;   // per fault position x slot
    std::vector<std::vector<int>> wMS;  // per switch position x slot
    std::vector<std::vector<int>> w;    // per switch position x slot (merged
                                        // closing status; rows added by the
                                        // communication layer)
    std::vector<std::vector<int>> uNC;  // per cell x slot (cleared flag)
};

CrewRefs emit_crew_dispatch(const core::Instance& ins,
                            const core::NodeCellGraph& cells,
                            ModelBuilder& mb);

// Shared name helpers so tests and the schedule extractor spell variables
// exactly as the emitter does.  `crew` is a crew id; `task` is a line id
// (repairs) or a switch id (switch operations); "depot" is the virtual
// route endpoint.
std::string route_var(const std::string& crew, const std::string& from,
                      const std::string& to);
std::string arrival_var(const std::string& crew, const std::string& task);
std::string safe_start_var(const std::string& crew, const std::string& task);
std::string slot_var(const std::string& prefix, const std::string& entity,
                     int t);

}  // namespace rsched::model
