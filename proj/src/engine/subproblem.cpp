#include <cmath>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "detail.hpp"
#include "rsched/engine/ccg.hpp"
#include "rsched/model/translate.hpp"
#include "rsched/opt/mip.hpp"

namespace rsched::engine {

namespace {

using detail::CanonRow;

// One adversarial MILP at a given dual box size M.  Returns the bound and
// the deviations reconstructed from the grid bits, or NumFail status.
struct DualAttempt {
    opt::SolveStatus status = opt::SolveStatus::NumFail;
    double bound = 0.0;
    std::vector<double> sigma;
};

DualAttempt run_dual(const model::ModelBuilder& mb, const StageIndex& ix,
                     const std::vector<CanonRow>& rows,
                     const std::vector<double>& c, double M, int nbits,
                     opt::SolverBackend& be, std::int64_t node_limit) {
    DualAttempt out;
    opt::LpProblem lp;
    const std::size_t ns = ix.s_vars.size();

    // deviation grid: sigma_j = lb_j + eta_j * sum_k 2^k zeta_jk
    std::vector<double> slb(ns), eta(ns);
    std::vector<int> bits(ns);
    for (std::size_t j = 0; j < ns; ++j) {
        const model::Variable& v = mb.var(ix.s_vars[j]);
        slb[j] = v.lb;
        const double span = v.ub - v.lb;
        bits[j] = span > 1e-12 ? nbits : 0;
        eta[j] = bits[j] > 0 ? span / (std::pow(2.0, bits[j]) - 1.0) : 0.0;
    }

    // multiplier per canonical row; objective carries the constant part of
    // the row's right-hand side at sigma = lb
    std::vector<int> picol(rows.size(), -1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const CanonRow& cr = rows[i];
        if (cr.y.empty()) {
            // constant row: nothing to price, but it must hold at x
            if (cr.b0 < -1e-7)
                throw model::ModelError(
                    "schedule violates a response-free row");
            continue;
        }
        double b_at_lb = cr.b0;
        for (const auto& [j, a] : cr.s) b_at_lb -= a * slb[std::size_t(j)];
        picol[i] = lp.add_col(-b_at_lb, -M, 0.0, false,
                              "pi" + std::to_string(i));
    }
    std::vector<int> zcol(ns * std::size_t(nbits > 0 ? nbits : 1), -1);
    auto z_at = [&](std::size_t j, int k) -> int& {
        return zcol[j * std::size_t(nbits) + std::size_t(k)];
    };
    std::vector<int> priority;
    if (nbits > 0) {
        for (std::size_t j = 0; j < ns; ++j)
            for (int k = 0; k < bits[j]; ++k) {
                priority.resize(std::size_t(lp.num_cols()), 0);
                z_at(j, k) = lp.add_col(
                    0.0, 0.0, 1.0, true,
                    "zeta[" + mb.var(ix.s_vars[j]).name + ":" +
                        std::to_string(k) + "]");
                priority.push_back(1 + k);  // high bits branch first
            }
    }

    // bilinear products nu = zeta * pi, one per (row, deviation, bit)
    struct Nu {
        int col;
        std::size_t row;
        std::size_t j;
        int k;
    };
    std::vector<Nu> nus;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (picol[i] < 0) continue;
        for (const auto& [j, a] : rows[i].s)
            for (int k = 0; k < bits[std::size_t(j)]; ++k) {
                const int col = lp.add_col(
                    a * eta[std::size_t(j)] * std::pow(2.0, k), -M, 0.0,
                    false, "nu" + std::to_string(nus.size()));
                nus.push_back({col, i, std::size_t(j), k});
            }
    }
    priority.resize(std::size_t(lp.num_cols()), 0);

    // pricing balance: every response variable's column of multipliers
    // must add up to its cost
    std::vector<std::vector<std::pair<int, double>>> bycol(ix.y_vars.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (picol[i] < 0) continue;
        for (const auto& [j, a] : rows[i].y)
            bycol[std::size_t(j)].emplace_back(picol[i], a);
    }
    for (std::size_t j = 0; j < ix.y_vars.size(); ++j)
        lp.add_row(opt::Sense::EQ, c[j], bycol[j],
                   "price[" + mb.var(ix.y_vars[j]).name + "]");

    // envelope keeping nu exact at binary zeta
    for (const Nu& nu : nus) {
        const int z = z_at(nu.j, nu.k);
        const int pi = picol[nu.row];
        lp.add_row(opt::Sense::GE, 0.0, {{nu.col, 1.0}, {z, M}});
        lp.add_row(opt::Sense::LE, M, {{nu.col, 1.0}, {pi, -1.0}, {z, M}});
        lp.add_row(opt::Sense::GE, 0.0, {{nu.col, 1.0}, {pi, -1.0}});
    }

    // the deviation domain itself, expressed on the grid bits
    for (const int r : ix.scen_sigma_rows) {
        const model::Row& row = mb.rows()[std::size_t(r)];
        double rhs = row.rhs;
        std::vector<std::pair<int, double>> terms;
        for (const model::Term& t : row.terms) {
            const std::size_t j =
                std::size_t(ix.s_pos[std::size_t(t.var)]);
            rhs -= t.coef * slb[j];
            for (int k = 0; k < bits[j]; ++k)
                terms.emplace_back(z_at(j, k),
                                   t.coef * eta[j] * std::pow(2.0, k));
        }
        lp.add_row(model::to_opt(row.sense), rhs, terms, row.name);
    }

    opt::MipOptions mo;
    mo.priority = std::move(priority);
    mo.node_limit = node_limit;
    const opt::MipSolution sol = be.solve_mip(lp, mo);
    out.status = sol.status;
    if (sol.status != opt::SolveStatus::Optimal) return out;
    out.bound = -sol.obj + mb.objective_offset();
    out.sigma.assign(ns, 0.0);
    for (std::size_t j = 0; j < ns; ++j) {
        double v = slb[j];
        for (int k = 0; k < bits[j]; ++k)
            if (sol.x[std::size_t(z_at(j, k))] > 0.5)
                v += eta[j] * std::pow(2.0, k);
        const model::Variable& sv = mb.var(ix.s_vars[j]);
        out.sigma[j] = std::min(sv.ub, std::max(sv.lb, v));
        if (std::fabs(out.sigma[j]) < 1e-12) out.sigma[j] = 0.0;
        if (std::fabs(out.sigma[j] - 1.0) < 1e-12) out.sigma[j] = 1.0;
    }
    return out;
}

}  // namespace

SubproblemResult solve_subproblem(const model::ModelBuilder& mb,
                                  const StageIndex& ix,
                                  const std::vector<double>& x,
                                  opt::SolverBackend& be,
                                  const CcgOptions& opt, std::ostream* log) {
    SubproblemResult out;
    const std::vector<CanonRow> rows = detail::canonical_rows(mb, ix, x);
    const std::vector<double> c = detail::y_costs(mb, ix);

    double cmax = 1.0;
    for (const double v : c) cmax = std::max(cmax, std::fabs(v));
    double bmax = 1.0;
    for (const CanonRow& r : rows) bmax = std::max(bmax, std::fabs(r.b0));
    // multiplier box: the response costs bound the active multipliers,
    // scaled up generously; enlarged and retried if the box ever clips
    double M = 1000.0 * cmax * std::max(1.0, std::log10(bmax));

    const int nbits = opt.bits + 1;
    for (int attempt = 0;; ++attempt) {
        const DualAttempt da =
            run_dual(mb, ix, rows, c, M, nbits, be, opt.node_limit);
        if (da.status != opt::SolveStatus::Optimal) {
            out.status = da.status;
            if (log)
                *log << "subproblem: adversarial solve failed ("
                     << opt::to_string(da.status) << ")\n";
            return out;
        }
        out.dual_value = da.bound;
        out.sigma = da.sigma;

        const RecourseEval ev = evaluate_recourse(mb, ix, x, da.sigma, be);
        if (ev.status == opt::SolveStatus::Infeasible) {
            // the schedule admits no feasible response under these
            // deviations: hand back a feasibility scenario
            out.status = opt::SolveStatus::Optimal;
            out.feasibility_branch = true;
            return out;
        }
        if (ev.status != opt::SolveStatus::Optimal) {
            out.status = ev.status;
            if (log)
                *log << "subproblem: response re-solve failed ("
                     << opt::to_string(ev.status) << ")\n";
            return out;
        }
        out.value = ev.value;
        out.status = opt::SolveStatus::Optimal;

        const double mismatch = std::fabs(out.dual_value - out.value);
        if (mismatch <= opt.duality_tol * std::max(1.0, std::fabs(out.value)))
            return out;
        if (attempt >= 3) {
            out.duality_ok = false;
            if (log)
                *log << "subproblem: duality mismatch " << mismatch
                     << " persists after " << attempt
                     << " box enlargements (M=" << M
                     << "); keeping the honest primal value\n";
            return out;
        }
        M *= 8.0;
        ++out.escalations;
        if (log)
            *log << "subproblem: duality mismatch " << mismatch
                 << "; enlarging multiplier box to M=" << M << "\n";
    }
}

}  // namespace rsched::engine
