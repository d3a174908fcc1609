#pragma once

#include <vector>

#include "rsched/core/instance.hpp"

// Reduced network: node cells (maximal blocks containing no switchable
// line) connected by switchable edges.  Restoration reasons about cells:
// a cell is energizable only once every damaged line assigned to it has
// been repaired, and switches toggle connectivity between cells.

namespace rsched::core {

struct CellEdge {
    int line = -1;            // index into Instance::lines (switchable)
    int cell_a = -1, cell_b = -1;
};

struct Cell {
    std::vector<int> nodes;   // node indices, ascending
    std::vector<int> faults;  // damaged-line indices assigned to this cell
};

struct NodeCellGraph {
    std::vector<Cell> cells;
    std::vector<CellEdge> edges;   // one per switchable line
    std::vector<int> cell_of_node; // node index -> cell index

    int cell_count() const { return static_cast<int>(cells.size()); }
};

// Contract the network over its non-switchable lines.  Throws
// InstanceError if a switchable line ends up internal to one cell (it
// could then never isolate anything).  A damaged switchable line stays an
// edge and is additionally recorded as a fault of both adjacent cells.
NodeCellGraph reduce_network(const Instance& ins);

}  // namespace rsched::core
