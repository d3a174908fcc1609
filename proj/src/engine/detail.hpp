#pragma once

#include <utility>
#include <vector>

#include "rsched/engine/ccg.hpp"

// Internal machinery shared by the master, recourse and subproblem
// builders.  Everything works in list positions (x_pos / y_pos / s_pos),
// not model variable ids.

namespace rsched::engine::detail {

// One response-LP row in canonical "<=" form with the schedule part
// already moved to the right-hand side: sum(y) + sum(s) <= b0.
struct CanonRow {
    double b0 = 0.0;
    std::vector<std::pair<int, double>> y;  // (y position, coefficient)
    std::vector<std::pair<int, double>> s;  // (s position, coefficient)
};

// Response rows (recourse + mixed scenario, equalities split, ">=" rows
// negated) followed by the finite bounds of every response variable as
// explicit rows, so the response variables themselves are free.
std::vector<CanonRow> canonical_rows(const model::ModelBuilder& mb,
                                     const StageIndex& ix,
                                     const std::vector<double>& x);

// Objective coefficients by y position, and the constant offset.
std::vector<double> y_costs(const model::ModelBuilder& mb,
                            const StageIndex& ix);

// Split one model row into per-stage parts evaluated at x.
struct SplitRow {
    double rhs = 0.0;  // original rhs minus the schedule contribution
    std::vector<std::pair<int, double>> y;
    std::vector<std::pair<int, double>> s;
};
SplitRow split_row(const model::Row& row, const StageIndex& ix,
                   const std::vector<double>& x);

}  // namespace rsched::engine::detail
