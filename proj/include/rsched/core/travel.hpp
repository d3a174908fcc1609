#pragma once

#include <vector>

#include "rsched/core/instance.hpp"

// Crew travel times.  Sites are depot locations and task locations (fault
// sites and switch sites sit at the midpoint of their line).  Travel time
// doubles the straight-line distance to approximate street routing.

namespace rsched::core {

struct Site {
    double x = 0.0, y = 0.0;
};

inline Site line_site(const Instance& ins, int line) {
    const Line& l = ins.lines[static_cast<std::size_t>(line)];
    const Node& a = ins.nodes[static_cast<std::size_t>(l.from)];
    const Node& b = ins.nodes[static_cast<std::size_t>(l.to)];
    return {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
}

// minutes = 2 * distance[m] / (speed[km/h] * 1000 / 60) = 0.12 * d / speed
double travel_minutes(const Site& a, const Site& b, double speed_kmh);

// Symmetric zero-diagonal matrix of travel minutes between sites.
std::vector<std::vector<double>> build_travel_matrix(
    const std::vector<Site>& sites, double speed_kmh);

}  // namespace rsched::core
