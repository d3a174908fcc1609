#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rsched/core/instance.hpp"
#include "rsched/core/reduction.hpp"
#include "rsched/model/builder.hpp"
#include "rsched/model/emit_crew.hpp"
#include "rsched/model/emit_cyber.hpp"
#include "rsched/model/emit_grid.hpp"
#include "rsched/opt/backend.hpp"

// Two-stage robust engine: a master problem over the restoration schedule
// (first stage) is alternated with an adversarial subproblem that searches
// the deviation budget polytope for the worst renewable forecast error, and
// each worst case found is added back to the master as a fresh recourse
// copy with its own cut.  Everything is driven off the finalized symbolic
// model; the stage/family tags decide which rows go where.

namespace rsched::engine {

// Variable/row partition of a finalized model, in registration order.
struct StageIndex {
    std::vector<int> x_vars;  // schedule variables (binaries + timings)
    std::vector<int> y_vars;  // operational response variables
    std::vector<int> s_vars;  // adversarial deviation variables
    // model var id -> position in the list above (-1 when other stage)
    std::vector<int> x_pos, y_pos, s_pos;
    std::vector<int> sched_rows;       // rows over x only
    std::vector<int> recourse_rows;    // rows over x and y
    std::vector<int> scen_mixed_rows;  // rows over y and sigma
    std::vector<int> scen_sigma_rows;  // rows over sigma only (the budget)
};

StageIndex index_stages(const model::ModelBuilder& mb);

// What each deviation variable means, for the worst-case saturation pass:
// which source it belongs to, whether it pushes capacity down, and its slot.
struct SigmaMeta {
    std::vector<int> source;   // per s_vars entry
    std::vector<int> slot;     // per s_vars entry (0-based)
    std::vector<bool> down;    // true: capacity-reducing deviation
    std::vector<double> budget_of_source;  // per instance source, 0 if exact
};

// Fully emitted and finalized model plus the reference maps of every layer.
struct CompactModel {
    core::NodeCellGraph cells;
    model::ModelBuilder mb;
    model::CrewRefs crew;
    model::GridRefs grid;
    model::CyberRefs cyb;
    StageIndex ix;
    SigmaMeta smeta;
};

CompactModel assemble_compact(const core::Instance& ins);

// One pooled worst case.  `optimality` scenarios carry a cost link to the
// master's epigraph variable; feasibility scenarios only force the master
// to keep a feasible response for them.
struct Scenario {
    std::vector<double> sigma;  // by s_vars order
    bool optimality = true;
};

struct CcgOptions {
    double tol = 1e-3;       // relative gap: stop when 1 - LB/UB < tol
    int max_iter = 25;
    int bits = 6;            // deviation grid: n+1 bits, eta = 1/(2^(n+1)-1)
    std::string backend = "builtin";
    double dedup_eps = 1e-6;      // pool duplicate threshold (max-norm)
    double duality_tol = 1e-4;    // relative primal/dual agreement in the SP
    double tie_tol = 1e-6;        // epigraph slack for the timing polish
    std::int64_t node_limit = 2000000;
};

struct MasterResult {
    opt::SolveStatus status = opt::SolveStatus::NumFail;
    double mu = 0.0;
    std::vector<double> x;  // by x_vars order
};

// Master over the schedule with one recourse copy per pooled scenario.
// An empty pool yields mu = 0 (the epigraph's own floor).
MasterResult solve_master(const model::ModelBuilder& mb, const StageIndex& ix,
                          const std::vector<Scenario>& pool,
                          opt::SolverBackend& be, const CcgOptions& opt);

// Same matrix, epigraph pinned near `mu_bound`, binaries pinned to `x0`,
// objective replaced by the sum of schedule timing variables: picks the
// earliest schedule among cost ties so output is reproducible.
MasterResult polish_timings(const model::ModelBuilder& mb, const StageIndex& ix,
                            const std::vector<Scenario>& pool,
                            const std::vector<double>& x0, double mu_bound,
                            opt::SolverBackend& be, const CcgOptions& opt);

struct RecourseEval {
    opt::SolveStatus status = opt::SolveStatus::NumFail;
    double value = 0.0;      // objective including constant offset
    std::vector<double> y;   // by y_vars order
};

// Operational response cost for a fixed schedule and fixed deviations.
RecourseEval evaluate_recourse(const model::ModelBuilder& mb,
                               const StageIndex& ix,
                               const std::vector<double>& x,
                               const std::vector<double>& sigma,
                               opt::SolverBackend& be);

struct SubproblemResult {
    opt::SolveStatus status = opt::SolveStatus::NumFail;
    std::vector<double> sigma;     // worst deviations found (by s_vars)
    double value = 0.0;            // honest re-solved recourse cost at sigma
    double dual_value = 0.0;       // adversarial MILP bound
    bool feasibility_branch = false;  // recourse infeasible at sigma
    bool duality_ok = true;        // primal/dual agreement within tolerance
    int escalations = 0;           // dual-box enlargements used
};

// Worst-case search at a fixed schedule: dualize the response LP, expand
// each deviation on a binary grid, bound the bilinear products, and solve
// the resulting MILP.  The returned value is always the honest primal
// recourse cost at the reconstructed deviations.
SubproblemResult solve_subproblem(const model::ModelBuilder& mb,
                                  const StageIndex& ix,
                                  const std::vector<double>& x,
                                  opt::SolverBackend& be,
                                  const CcgOptions& opt, std::ostream* log);

struct IterTrace {
    int iter = 0;
    double lb = 0.0;
    double ub = 0.0;
    double master_sec = 0.0;
    double sub_sec = 0.0;
};

struct CcgResult {
    opt::SolveStatus status = opt::SolveStatus::NumFail;
    bool converged = false;
    bool stalled = false;            // duplicate worst case before gap closed
    bool feasibility_cuts_used = false;
    bool duality_warning = false;
    double objective = 0.0;          // final upper bound
    double lb = 0.0;
    double ub = 0.0;
    int iterations = 0;
    std::vector<IterTrace> trace;
    std::vector<double> x;           // final schedule (by x_vars)
    std::vector<double> worst_sigma; // deviations that set the bound
    std::vector<Scenario> pool;
};

// Full alternation loop.  The pool is seeded with the zero-deviation
// forecast so the first master already prices nominal operation.
CcgResult ccg_solve(const core::Instance& ins, const CompactModel& cm,
                    const CcgOptions& opt, std::ostream* log);

}  // namespace rsched::engine
