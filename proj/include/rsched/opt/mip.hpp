#pragma once

#include <cstdint>
#include <vector>

#include "rsched/opt/lp_model.hpp"

// Depth-first branch and bound over the bounded-variable simplex with
// warm-started dual re-solves.  Fully deterministic: branching picks the
// highest-priority most-fractional column (ties toward smaller indices),
// exploring the nearer integer side first.

namespace rsched::opt {

struct MipOptions {
    double int_tol = 1e-6;
    double gap_abs = 1e-9;
    double gap_rel = 1e-9;
    std::int64_t node_limit = 2000000;
    std::int64_t iter_limit = 400000;       // simplex pivots per node
    std::vector<int> priority;              // per column; empty = uniform
};

MipSolution solve_mip(const LpProblem& p, const MipOptions& opt = {});

}  // namespace rsched::opt
