#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "detail.hpp"
#include "rsched/engine/ccg.hpp"
#include "rsched/model/translate.hpp"
#include "rsched/opt/mip.hpp"

namespace rsched::engine {

namespace {

struct MasterMatrix {
    opt::LpProblem lp;
    int mu_col = -1;
    // columns 0..x_vars-1 are the schedule in x_vars order
};

// min mu over the schedule polytope, one fresh response copy per pooled
// scenario; cost-linked copies get "mu >= response cost" rows.
MasterMatrix build_master(const model::ModelBuilder& mb, const StageIndex& ix,
                          const std::vector<Scenario>& pool) {
    MasterMatrix m;
    opt::LpProblem& lp = m.lp;
    for (const int v : ix.x_vars) {
        const model::Variable& var = mb.var(v);
        lp.add_col(0.0, var.lb, var.ub,
                   var.kind == model::VarKind::Binary, var.name);
    }
    m.mu_col = lp.add_col(1.0, 0.0, opt::kInf, false, "mu");

    for (const int r : ix.sched_rows) {
        const model::Row& row = mb.rows()[std::size_t(r)];
        std::vector<std::pair<int, double>> terms;
        terms.reserve(row.terms.size());
        for (const model::Term& t : row.terms)
            terms.emplace_back(ix.x_pos[std::size_t(t.var)], t.coef);
        lp.add_row(model::to_opt(row.sense), row.rhs, terms, row.name);
    }

    const std::vector<double> c = detail::y_costs(mb, ix);
    for (std::size_t r = 0; r < pool.size(); ++r) {
        const Scenario& sc = pool[r];
        const std::string tag = "#" + std::to_string(r);
        std::vector<int> ycol(ix.y_vars.size());
        for (std::size_t j = 0; j < ix.y_vars.size(); ++j) {
            const model::Variable& v = mb.var(ix.y_vars[j]);
            ycol[j] = lp.add_col(0.0, v.lb, v.ub, false, v.name + tag);
        }
        auto add_rows = [&](const std::vector<int>& which) {
            for (const int ri : which) {
                const model::Row& row = mb.rows()[std::size_t(ri)];
                double rhs = row.rhs;
                std::vector<std::pair<int, double>> terms;
                terms.reserve(row.terms.size());
                for (const model::Term& t : row.terms) {
                    const std::size_t v = std::size_t(t.var);
                    if (ix.x_pos[v] >= 0)
                        terms.emplace_back(ix.x_pos[v], t.coef);
                    else if (ix.y_pos[v] >= 0)
                        terms.emplace_back(ycol[std::size_t(ix.y_pos[v])],
                                           t.coef);
                    else
                        rhs -= t.coef *
                               sc.sigma[std::size_t(ix.s_pos[v])];
                }
                lp.add_row(model::to_opt(row.sense), rhs, terms,
                           row.name + tag);
            }
        };
        add_rows(ix.recourse_rows);
        add_rows(ix.scen_mixed_rows);
        if (sc.optimality) {
            std::vector<std::pair<int, double>> cut{{m.mu_col, 1.0}};
            for (std::size_t j = 0; j < ix.y_vars.size(); ++j)
                if (c[j] != 0.0) cut.emplace_back(ycol[j], -c[j]);
            lp.add_row(opt::Sense::GE, mb.objective_offset(), cut,
                       "cost_link" + tag);
        }
    }
    return m;
}

MasterResult run(const MasterMatrix& m, const StageIndex& ix,
                 opt::SolverBackend& be, const CcgOptions& opt) {
    opt::MipOptions mo;
    mo.node_limit = opt.node_limit;
    opt::MipSolution sol = be.solve_mip(m.lp, mo);
    MasterResult out;
    out.status = sol.status;
    if (sol.status != opt::SolveStatus::Optimal) return out;
    out.mu = sol.x[std::size_t(m.mu_col)];
    out.x.assign(sol.x.begin(),
                 sol.x.begin() + static_cast<long>(ix.x_vars.size()));
    return out;
}

}  // namespace

MasterResult solve_master(const model::ModelBuilder& mb, const StageIndex& ix,
                          const std::vector<Scenario>& pool,
                          opt::SolverBackend& be, const CcgOptions& opt) {
    const MasterMatrix m = build_master(mb, ix, pool);
    return run(m, ix, be, opt);
}

MasterResult polish_timings(const model::ModelBuilder& mb,
                            const StageIndex& ix,
                            const std::vector<Scenario>& pool,
                            const std::vector<double>& x0, double mu_bound,
                            opt::SolverBackend& be, const CcgOptions& opt) {
    MasterMatrix m = build_master(mb, ix, pool);
    opt::LpProblem& lp = m.lp;
    // keep the proven worst-case cost, pin the discrete schedule, and pull
    // every schedule timing as early as it can go
    lp.add_row(opt::Sense::LE,
               mu_bound + opt.tie_tol * std::max(1.0, std::fabs(mu_bound)),
               {{m.mu_col, 1.0}}, "cost_ceiling");
    for (std::size_t i = 0; i < ix.x_vars.size(); ++i) {
        const model::Variable& v = mb.var(ix.x_vars[i]);
        if (v.kind != model::VarKind::Binary) {
            lp.obj[i] = 1.0;
            continue;
        }
        const double b = std::round(x0[i]);
        lp.lb[i] = b;
        lp.ub[i] = b;
    }
    lp.obj[std::size_t(m.mu_col)] = 0.0;
    return run(m, ix, be, opt);
}

}  // namespace rsched::engine
