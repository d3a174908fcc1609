#include "rsched/opt/mip.hpp"

#include <algorithm>
#include <cmath>

#include "rsched/opt/simplex.hpp"

namespace rsched::opt {

namespace {

struct Frame {
    int col;
    double saved_lo, saved_hi;
    double branch_val;
    int next_side;  // 0 = none tried, 1 = one tried, 2 = both tried
    bool down_first;
    double parent_bound;
};

}  // namespace

MipSolution solve_mip(const LpProblem& p, const MipOptions& opt) {
    MipSolution out;
    Simplex::Options sopt;
    sopt.iter_limit = opt.iter_limit;
    Simplex spx(sopt);
    spx.load(p);

    std::vector<int> int_cols;
    for (int j = 0; j < p.num_cols(); ++j)
        if (p.integer[j]) int_cols.push_back(j);

    SolveStatus st = spx.solve_primal();
    out.iterations = spx.iterations();
    if (st != SolveStatus::Optimal) {
        out.status = st;
        return out;
    }
    const double root_bound = spx.objective();

    double inc_obj = kInf;
    bool have_inc = false;
    std::vector<double> inc_x;
    std::vector<Frame> stack;
    bool limit_hit = false;
    bool cur_infeasible = false;  // current node LP infeasible
    bool cur_failed = false;      // current node LP unsolved (numerics/limit)

    auto cutoff = [&]() {
        if (!have_inc) return kInf;
        return inc_obj - std::max(opt.gap_abs, opt.gap_rel * std::fabs(inc_obj));
    };

    auto pick_branch = [&](const std::vector<double>& x) {
        int best = -1, best_pri = 0;
        double best_frac = 0.0;
        for (const int j : int_cols) {
            const double f = x[j] - std::floor(x[j]);
            const double dist = std::min(f, 1.0 - f);
            if (dist <= opt.int_tol) continue;
            const int pri =
                opt.priority.empty() ? 0 : opt.priority[static_cast<std::size_t>(j)];
            if (best < 0 || pri > best_pri ||
                (pri == best_pri && dist > best_frac + 1e-12)) {
                best = j;
                best_pri = pri;
                best_frac = dist;
            }
        }
        return best;
    };

    auto apply_side = [&](Frame& fr, bool first) {
        const bool down = first ? fr.down_first : !fr.down_first;
        if (down)
            spx.set_col_bounds(fr.col, fr.saved_lo, std::floor(fr.branch_val));
        else
            spx.set_col_bounds(fr.col, std::floor(fr.branch_val) + 1.0, fr.saved_hi);
    };

    while (true) {
        ++out.nodes;
        if (out.nodes > opt.node_limit) {
            limit_hit = true;
            break;
        }

        bool prune = cur_infeasible || cur_failed;
        if (cur_failed) limit_hit = true;

        if (!prune) {
            const double node_obj = spx.objective();
            if (node_obj >= cutoff()) {
                prune = true;
            } else {
                std::vector<double> x = spx.primal_values();
                const int j = pick_branch(x);
                if (j < 0) {
                    if (node_obj < inc_obj) {
                        inc_obj = node_obj;
                        have_inc = true;
                        inc_x = std::move(x);
                        for (const int ic : int_cols)
                            inc_x[ic] = std::round(inc_x[ic]);
                    }
                    prune = true;
                } else {
                    Frame fr;
                    fr.col = j;
                    fr.saved_lo = spx.col_lb(j);
                    fr.saved_hi = spx.col_ub(j);
                    fr.branch_val = x[j];
                    fr.next_side = 1;
                    fr.down_first = (x[j] - std::floor(x[j])) <= 0.5;
                    fr.parent_bound = node_obj;
                    stack.push_back(fr);
                    apply_side(stack.back(), true);
                }
            }
        }

        if (prune) {
            bool descended = false;
            while (!stack.empty()) {
                Frame& fr = stack.back();
                if (fr.next_side == 1 && fr.parent_bound < cutoff()) {
                    fr.next_side = 2;
                    apply_side(fr, false);
                    descended = true;
                    break;
                }
                spx.set_col_bounds(fr.col, fr.saved_lo, fr.saved_hi);
                stack.pop_back();
            }
            if (!descended) break;  // tree exhausted
        }

        st = spx.solve_dual();
        if (st == SolveStatus::NumFail || st == SolveStatus::Limit) {
            spx.reset_basis();
            st = spx.solve_primal();
        }
        out.iterations = spx.iterations();
        cur_infeasible = st == SolveStatus::Infeasible;
        cur_failed = st != SolveStatus::Optimal && st != SolveStatus::Infeasible;
    }

    // best proven bound: exhaustive search proves the incumbent; otherwise
    // the weakest open parent bound (or the root) limits what we know.
    if (limit_hit) {
        double open = inc_obj;
        for (const Frame& fr : stack)
            if (fr.next_side == 1) open = std::min(open, fr.parent_bound);
        out.bound = std::min(open, root_bound);
    }
    if (have_inc) {
        out.status = limit_hit ? SolveStatus::Limit : SolveStatus::Optimal;
        out.obj = inc_obj;
        out.x = std::move(inc_x);
        if (!limit_hit) out.bound = inc_obj;
    } else {
        out.status = limit_hit ? SolveStatus::Limit : SolveStatus::Infeasible;
        if (!limit_hit) out.bound = kInf;
    }
    return out;
}

}  // namespace rsched::opt
