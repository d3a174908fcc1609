#include <cmath>
#include <utility>
#include <vector>

#include "detail.hpp"
#include "rsched/engine/ccg.hpp"
#include "rsched/model/translate.hpp"

namespace rsched::engine {

namespace detail {

SplitRow split_row(const model::Row& row, const StageIndex& ix,
                   const std::vector<double>& x) {
    SplitRow out;
    out.rhs = row.rhs;
    for (const model::Term& t : row.terms) {
        const std::size_t v = std::size_t(t.var);
        if (ix.x_pos[v] >= 0)
            out.rhs -= t.coef * x[std::size_t(ix.x_pos[v])];
        else if (ix.y_pos[v] >= 0)
            out.y.emplace_back(ix.y_pos[v], t.coef);
        else
            out.s.emplace_back(ix.s_pos[v], t.coef);
    }
    return out;
}

std::vector<double> y_costs(const model::ModelBuilder& mb,
                            const StageIndex& ix) {
    std::vector<double> c(ix.y_vars.size(), 0.0);
    for (const model::Term& t : mb.objective())
        c[std::size_t(ix.y_pos[std::size_t(t.var)])] += t.coef;
    return c;
}

std::vector<CanonRow> canonical_rows(const model::ModelBuilder& mb,
                                     const StageIndex& ix,
                                     const std::vector<double>& x) {
    std::vector<CanonRow> rows;
    auto push = [&](const SplitRow& sr, double sign) {
        CanonRow cr;
        cr.b0 = sign * sr.rhs;
        cr.y.reserve(sr.y.size());
        for (const auto& [p, a] : sr.y) cr.y.emplace_back(p, sign * a);
        for (const auto& [p, a] : sr.s) cr.s.emplace_back(p, sign * a);
        rows.push_back(std::move(cr));
    };
    auto add = [&](int r) {
        const model::Row& row = mb.rows()[std::size_t(r)];
        const SplitRow sr = split_row(row, ix, x);
        switch (row.sense) {
            case model::RowSense::LE: push(sr, 1.0); break;
            case model::RowSense::GE: push(sr, -1.0); break;
            case model::RowSense::EQ:
                push(sr, 1.0);
                push(sr, -1.0);
                break;
        }
    };
    for (const int r : ix.recourse_rows) add(r);
    for (const int r : ix.scen_mixed_rows) add(r);
    for (std::size_t j = 0; j < ix.y_vars.size(); ++j) {
        const model::Variable& v = mb.var(ix.y_vars[j]);
        if (std::isfinite(v.ub)) {
            CanonRow cr;
            cr.b0 = v.ub;
            cr.y.emplace_back(static_cast<int>(j), 1.0);
            rows.push_back(std::move(cr));
        }
        if (std::isfinite(v.lb)) {
            CanonRow cr;
            cr.b0 = -v.lb;
            cr.y.emplace_back(static_cast<int>(j), -1.0);
            rows.push_back(std::move(cr));
        }
    }
    return rows;
}

}  // namespace detail

RecourseEval evaluate_recourse(const model::ModelBuilder& mb,
                               const StageIndex& ix,
                               const std::vector<double>& x,
                               const std::vector<double>& sigma,
                               opt::SolverBackend& be) {
    RecourseEval out;
    opt::LpProblem lp;
    const std::vector<double> c = detail::y_costs(mb, ix);
    for (std::size_t j = 0; j < ix.y_vars.size(); ++j) {
        const model::Variable& v = mb.var(ix.y_vars[j]);
        lp.add_col(c[j], v.lb, v.ub, false, v.name);
    }
    auto add_rows = [&](const std::vector<int>& which) {
        for (const int r : which) {
            const model::Row& row = mb.rows()[std::size_t(r)];
            detail::SplitRow sr = detail::split_row(row, ix, x);
            for (const auto& [p, a] : sr.s) sr.rhs -= a * sigma[std::size_t(p)];
            std::vector<std::pair<int, double>> terms(sr.y.begin(),
                                                      sr.y.end());
            lp.add_row(model::to_opt(row.sense), sr.rhs, terms, row.name);
        }
    };
    add_rows(ix.recourse_rows);
    add_rows(ix.scen_mixed_rows);

    // the deviation-domain rows contain no response variables; a violation
    // here means the caller passed deviations outside the budget
    for (const int r : ix.scen_sigma_rows) {
        const model::Row& row = mb.rows()[std::size_t(r)];
        double act = 0.0;
        for (const model::Term& t : row.terms)
            act += t.coef *
                   sigma[std::size_t(ix.s_pos[std::size_t(t.var)])];
        const double viol = row.sense == model::RowSense::LE
                                ? act - row.rhs
                                : row.sense == model::RowSense::GE
                                      ? row.rhs - act
                                      : std::fabs(act - row.rhs);
        if (viol > 1e-7)
            throw model::ModelError("deviations violate their domain row " +
                                    row.name);
    }

    opt::LpSolution sol = be.solve_lp(lp, false);
    out.status = sol.status;
    if (sol.status == opt::SolveStatus::Optimal) {
        out.value = sol.obj + mb.objective_offset();
        out.y = std::move(sol.x);
    }
    return out;
}

}  // namespace rsched::engine
