#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rsched/opt/lp_model.hpp"
#include "rsched/opt/mip.hpp"

namespace rsched::opt {

// Result of reducing an LpProblem before handing it to the simplex/B&B core.
// `problem` is the reduced instance; the maps recover a solution of the
// original from a solution of the reduced one.
struct Presolved {
    LpProblem problem;
    std::vector<int> orig_col_of;   // reduced col -> original col
    std::vector<int> orig_row_of;   // reduced row -> original row
    std::vector<double> fixed_val;  // original col -> value (only meaningful
                                    // where `col_fixed` is true)
    std::vector<char> col_fixed;    // original col -> removed as fixed?
    SolveStatus status = SolveStatus::Optimal;  // Infeasible/Unbounded if
                                                // detected during reduction
};

// Reduce the problem: substitute fixed columns, fix empty columns at their
// cheapest bound, round integer bounds inward, and (unless
// `keep_rows_for_duals`) turn singleton rows into bounds and drop rows that
// can never bind.  With `keep_rows_for_duals` every row of the original is
// kept, in order, so row duals of the reduced problem are row duals of the
// original.
Presolved presolve(const LpProblem& p, bool keep_rows_for_duals);

// Expand a reduced-space primal point to original space.
std::vector<double> postsolve_x(const Presolved& ps, const std::vector<double>& xr);

class SolverBackend {
  public:
    virtual ~SolverBackend() = default;
    virtual std::string name() const = 0;
    // `want_duals` requests row duals and reduced costs in original row/col
    // order (and restricts the reductions applied so that they are exact).
    virtual LpSolution solve_lp(const LpProblem& p, bool want_duals) = 0;
    virtual MipSolution solve_mip(const LpProblem& p, const MipOptions& opt) = 0;
};

// Known backends: "builtin".  Returns nullptr for an unknown name.
std::unique_ptr<SolverBackend> make_backend(const std::string& name);

}  // namespace rsched::opt
