#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <vector>

#include "detail.hpp"
#include "rsched/engine/ccg.hpp"

namespace rsched::engine {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
}

double linf(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
}

bool sigma_in_domain(const model::ModelBuilder& mb, const StageIndex& ix,
                     const std::vector<double>& sigma) {
    for (const int r : ix.scen_sigma_rows) {
        const model::Row& row = mb.rows()[std::size_t(r)];
        double act = 0.0;
        for (const model::Term& t : row.terms)
            act += t.coef * sigma[std::size_t(ix.s_pos[std::size_t(t.var)])];
        switch (row.sense) {
            case model::RowSense::LE:
                if (act > row.rhs + 1e-9) return false;
                break;
            case model::RowSense::GE:
                if (act < row.rhs - 1e-9) return false;
                break;
            case model::RowSense::EQ:
                if (std::fabs(act - row.rhs) > 1e-9) return false;
                break;
        }
    }
    return true;
}

// Deterministic worsening pass on a worst case found by the subproblem:
// drop every capacity-raising deviation to zero, then push the
// capacity-reducing ones to their ceiling slot by slot while the deviation
// domain still holds.  Response cost is nonincreasing in available
// capacity, so this can only push the scenario's cost up; the honest
// re-solve guards the exchange.
void saturate_worst_case(const CompactModel& cm, const std::vector<double>& x,
                         std::vector<double>& sigma, double& value,
                         opt::SolverBackend& be, std::ostream* log) {
    const StageIndex& ix = cm.ix;
    if (ix.s_vars.empty()) return;
    std::vector<double> cand = sigma;
    for (std::size_t j = 0; j < cand.size(); ++j)
        if (!cm.smeta.down[j]) cand[j] = 0.0;
    for (std::size_t j = 0; j < cand.size(); ++j) {
        if (!cm.smeta.down[j]) continue;
        const double ceiling = cm.mb.var(ix.s_vars[j]).ub;
        if (cand[j] >= ceiling - 1e-12) continue;
        const double saved = cand[j];
        cand[j] = ceiling;
        if (!sigma_in_domain(cm.mb, ix, cand)) cand[j] = saved;
    }
    if (linf(cand, sigma) <= 1e-12) return;
    const RecourseEval ev = evaluate_recourse(cm.mb, ix, x, cand, be);
    if (ev.status != opt::SolveStatus::Optimal || ev.value < value - 1e-9) {
        if (log)
            *log << "saturation pass rejected (status "
                 << opt::to_string(ev.status) << ", value " << ev.value
                 << " vs " << value << ")\n";
        return;
    }
    sigma = std::move(cand);
    value = ev.value;
}

}  // namespace

CcgResult ccg_solve(const core::Instance& ins, const CompactModel& cm,
                    const CcgOptions& opt, std::ostream* log) {
    (void)ins;
    CcgResult res;
    auto be = opt::make_backend(opt.backend);
    if (!be) {
        if (log) *log << "unknown backend '" << opt.backend << "'\n";
        return res;
    }
    const model::ModelBuilder& mb = cm.mb;
    const StageIndex& ix = cm.ix;

    // seed: the forecast itself, so the first master prices nominal
    // operation instead of returning an empty schedule
    res.pool.push_back({std::vector<double>(ix.s_vars.size(), 0.0), true});

    double lb = 0.0;
    double ub = opt::kInf;
    std::vector<double> x_best, sigma_best;

    auto find_pooled = [&](const std::vector<double>& s) -> Scenario* {
        for (Scenario& sc : res.pool)
            if (linf(sc.sigma, s) <= opt.dedup_eps) return &sc;
        return nullptr;
    };

    for (int it = 1; it <= opt.max_iter; ++it) {
        res.iterations = it;
        auto t0 = std::chrono::steady_clock::now();
        const MasterResult mp = solve_master(mb, ix, res.pool, *be, opt);
        const double mp_sec = seconds_since(t0);
        if (mp.status != opt::SolveStatus::Optimal) {
            res.status = mp.status;
            if (log)
                *log << "master failed at iteration " << it << ": "
                     << opt::to_string(mp.status)
                     << (mp.status == opt::SolveStatus::Infeasible
                             ? " (the schedule constraints admit no plan)"
                             : "")
                     << "\n";
            res.lb = lb;
            res.ub = ub;
            return res;
        }
        lb = std::max(lb, mp.mu);

        t0 = std::chrono::steady_clock::now();
        SubproblemResult sp = solve_subproblem(mb, ix, mp.x, *be, opt, log);
        const double sp_sec = seconds_since(t0);
        if (sp.status != opt::SolveStatus::Optimal) {
            res.status = sp.status;
            res.lb = lb;
            res.ub = ub;
            return res;
        }

        if (sp.feasibility_branch) {
            res.feasibility_cuts_used = true;
            if (log)
                *log << "iteration " << it
                     << ": NO FEASIBLE RESPONSE under the worst case found "
                        "- adding a feasibility scenario. This should not "
                        "happen on well-posed instances; check the "
                        "communication power prerequisites.\n";
            res.trace.push_back({it, lb, ub, mp_sec, sp_sec});
            if (find_pooled(sp.sigma) != nullptr) {
                res.stalled = true;
                break;
            }
            res.pool.push_back({sp.sigma, false});
            continue;
        }

        res.duality_warning = res.duality_warning || !sp.duality_ok;
        saturate_worst_case(cm, mp.x, sp.sigma, sp.value, *be, log);

        if (sp.value < ub) {
            ub = sp.value;
            x_best = mp.x;
            sigma_best = sp.sigma;
        }
        res.trace.push_back({it, lb, ub, mp_sec, sp_sec});
        if (log)
            *log << "iteration " << it << ": lb=" << lb << " ub=" << ub
                 << " (master " << mp_sec << "s, worst-case " << sp_sec
                 << "s)\n";

        if (ub <= 1e-12 || 1.0 - lb / ub < opt.tol) {
            res.converged = true;
            break;
        }
        if (Scenario* hit = find_pooled(sp.sigma)) {
            if (!hit->optimality) {
                // the vertex entered the pool as a feasibility scenario;
                // promote it so the next master also prices its cost
                hit->optimality = true;
                continue;
            }
            res.stalled = true;
            if (log)
                *log << "worst case repeats an already pooled scenario "
                        "before the gap closed; stopping with the "
                        "incumbent\n";
            break;
        }
        res.pool.push_back({sp.sigma, true});
    }

    res.lb = lb;
    res.ub = ub;
    if (x_best.empty()) {
        // every iteration took the feasibility branch or the cap was hit
        // before any honest bound existed
        res.status = opt::SolveStatus::Limit;
        return res;
    }
    res.objective = ub;
    res.worst_sigma = sigma_best;

    const MasterResult pol =
        polish_timings(mb, ix, res.pool, x_best, ub, *be, opt);
    if (pol.status == opt::SolveStatus::Optimal) {
        res.x = pol.x;
    } else {
        if (log)
            *log << "timing polish failed (" << opt::to_string(pol.status)
                 << "); keeping the raw schedule\n";
        res.x = x_best;
    }
    res.status = res.converged ? opt::SolveStatus::Optimal
                               : opt::SolveStatus::Limit;
    return res;
}

}  // namespace rsched::engine
