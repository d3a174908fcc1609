#include "rsched/core/reduction.hpp"

#include <algorithm>
#include <numeric>

namespace rsched::core {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

NodeCellGraph reduce_network(const Instance& ins) {
    const int n = static_cast<int>(ins.nodes.size());
    UnionFind uf(n);
    for (const Line& l : ins.lines)
        if (l.sw == SwitchKind::None) uf.unite(l.from, l.to);

    NodeCellGraph g;
    g.cell_of_node.assign(static_cast<std::size_t>(n), -1);
    // cells numbered by first (lowest-index) member node
    for (int v = 0; v < n; ++v) {
        const int root = uf.find(v);
        if (g.cell_of_node[root] < 0) {
            g.cell_of_node[root] = g.cell_count();
            g.cells.emplace_back();
        }
        const int c = g.cell_of_node[root];
        g.cell_of_node[v] = c;
        g.cells[c].nodes.push_back(v);
    }

    for (std::size_t li = 0; li < ins.lines.size(); ++li) {
        const Line& l = ins.lines[li];
        if (l.sw == SwitchKind::None) {
            if (l.damaged)
                g.cells[g.cell_of_node[l.from]].faults.push_back(
                    static_cast<int>(li));
            continue;
        }
        const int ca = g.cell_of_node[l.from];
        const int cb = g.cell_of_node[l.to];
        if (ca == cb)
            throw InstanceError(
                "network.lines." + l.id,
                "switchable line is internal to one node cell (a parallel "
                "unswitched path connects its endpoints), so operating the "
                "switch could never isolate or connect anything");
        g.edges.push_back({static_cast<int>(li), ca, cb});
        if (l.damaged) {
            g.cells[ca].faults.push_back(static_cast<int>(li));
            g.cells[cb].faults.push_back(static_cast<int>(li));
        }
    }
    return g;
}

}  // namespace rsched::core
