#include "rsched/opt/backend.hpp"

#include <algorithm>
#include <cmath>

#include "rsched/opt/simplex.hpp"

namespace rsched::opt {

namespace {

constexpr int kMaxPasses = 10;

double row_tol(double rhs) { return 1e-9 * (1.0 + std::fabs(rhs)); }

}  // namespace

Presolved presolve(const LpProblem& p, bool keep_rows_for_duals) {
    const int n = p.num_cols();
    const int m = p.num_rows();

    Presolved ps;
    ps.col_fixed.assign(static_cast<std::size_t>(n), 0);
    ps.fixed_val.assign(static_cast<std::size_t>(n), 0.0);

    std::vector<double> lb = p.lb, ub = p.ub, rhs = p.rhs;
    std::vector<char> row_alive(static_cast<std::size_t>(m), 1);
    double obj_off = p.obj_offset;

    // column-wise view of the (static) original matrix
    std::vector<std::vector<std::pair<int, double>>> col_rows(
        static_cast<std::size_t>(n));
    for (int i = 0; i < m; ++i)
        for (int k = p.row_begin[i]; k < p.row_begin[i + 1]; ++k)
            col_rows[static_cast<std::size_t>(p.cols[k])].push_back(
                {i, p.vals[k]});

    auto fix_col = [&](int j, double v) {
        ps.col_fixed[static_cast<std::size_t>(j)] = 1;
        ps.fixed_val[static_cast<std::size_t>(j)] = v;
        obj_off += p.obj[j] * v;
        if (v != 0.0)
            for (const auto& [i, a] : col_rows[static_cast<std::size_t>(j)])
                rhs[i] -= a * v;
    };

    bool changed = true;
    for (int pass = 0; pass < kMaxPasses && changed &&
                       ps.status == SolveStatus::Optimal;
         ++pass) {
        changed = false;

        // --- column reductions ---
        std::vector<int> alive_nnz(static_cast<std::size_t>(n), 0);
        for (int j = 0; j < n; ++j) {
            if (ps.col_fixed[static_cast<std::size_t>(j)]) continue;
            for (const auto& [i, a] : col_rows[static_cast<std::size_t>(j)]) {
                (void)a;
                if (row_alive[i]) ++alive_nnz[static_cast<std::size_t>(j)];
            }
        }
        for (int j = 0; j < n; ++j) {
            if (ps.col_fixed[static_cast<std::size_t>(j)]) continue;
            if (p.integer[j]) {
                const double l2 = std::ceil(lb[j] - 1e-9);
                const double u2 = std::floor(ub[j] + 1e-9);
                if (l2 != lb[j] || u2 != ub[j]) {
                    lb[j] = l2;
                    ub[j] = u2;
                    changed = true;
                }
            }
            if (lb[j] > ub[j] + 1e-9) {
                ps.status = SolveStatus::Infeasible;
                break;
            }
            if (ub[j] - lb[j] <= 1e-12 * (1.0 + std::fabs(lb[j]))) {
                fix_col(j, lb[j]);
                changed = true;
                continue;
            }
            if (alive_nnz[static_cast<std::size_t>(j)] == 0) {
                const double c = p.obj[j];
                double v;
                if (c > 0.0)
                    v = lb[j];
                else if (c < 0.0)
                    v = ub[j];
                else
                    v = std::min(std::max(0.0, lb[j]), ub[j]);
                if (v == kInf || v == -kInf) {
                    ps.status = SolveStatus::Unbounded;
                    break;
                }
                fix_col(j, v);
                changed = true;
            }
        }
        if (ps.status != SolveStatus::Optimal) break;
        if (keep_rows_for_duals) continue;

        // --- row reductions ---
        for (int i = 0; i < m; ++i) {
            if (!row_alive[i]) continue;
            int cnt = 0, last_k = -1;
            double min_act = 0.0, max_act = 0.0;
            for (int k = p.row_begin[i]; k < p.row_begin[i + 1]; ++k) {
                const int j = p.cols[k];
                if (ps.col_fixed[static_cast<std::size_t>(j)]) continue;
                ++cnt;
                last_k = k;
                const double a = p.vals[k];
                const double at_l = a * (a > 0.0 ? lb[j] : ub[j]);
                const double at_u = a * (a > 0.0 ? ub[j] : lb[j]);
                min_act = (std::isinf(min_act) || std::isinf(at_l))
                              ? -kInf
                              : min_act + at_l;
                max_act = (std::isinf(max_act) || std::isinf(at_u))
                              ? kInf
                              : max_act + at_u;
            }
            const double ft = row_tol(rhs[i]);
            if (cnt == 0) {
                const bool bad =
                    (p.sense[i] == Sense::LE && 0.0 > rhs[i] + ft) ||
                    (p.sense[i] == Sense::GE && 0.0 < rhs[i] - ft) ||
                    (p.sense[i] == Sense::EQ && std::fabs(rhs[i]) > ft);
                if (bad) {
                    ps.status = SolveStatus::Infeasible;
                    break;
                }
                row_alive[i] = 0;
                changed = true;
                continue;
            }
            if (cnt == 1) {
                const int j = p.cols[last_k];
                const double a = p.vals[last_k];
                const double v = rhs[i] / a;
                if (p.sense[i] == Sense::EQ) {
                    lb[j] = std::max(lb[j], v);
                    ub[j] = std::min(ub[j], v);
                } else {
                    const bool upper =
                        (p.sense[i] == Sense::LE) == (a > 0.0);
                    if (upper)
                        ub[j] = std::min(ub[j], v);
                    else
                        lb[j] = std::max(lb[j], v);
                }
                row_alive[i] = 0;
                changed = true;
                continue;
            }
            // redundancy / infeasibility from activity bounds
            if (p.sense[i] == Sense::LE) {
                if (min_act > rhs[i] + ft) {
                    ps.status = SolveStatus::Infeasible;
                    break;
                }
                if (max_act <= rhs[i] + ft) {
                    row_alive[i] = 0;
                    changed = true;
                }
            } else if (p.sense[i] == Sense::GE) {
                if (max_act < rhs[i] - ft) {
                    ps.status = SolveStatus::Infeasible;
                    break;
                }
                if (min_act >= rhs[i] - ft) {
                    row_alive[i] = 0;
                    changed = true;
                }
            } else {
                if (min_act > rhs[i] + ft || max_act < rhs[i] - ft) {
                    ps.status = SolveStatus::Infeasible;
                    break;
                }
            }
        }
    }
    if (ps.status != SolveStatus::Optimal) return ps;

    // --- assemble the reduced problem ---
    std::vector<int> new_col(static_cast<std::size_t>(n), -1);
    for (int j = 0; j < n; ++j) {
        if (ps.col_fixed[static_cast<std::size_t>(j)]) continue;
        new_col[static_cast<std::size_t>(j)] =
            static_cast<int>(ps.orig_col_of.size());
        ps.orig_col_of.push_back(j);
        ps.problem.add_col(p.obj[j], lb[j], ub[j], p.integer[j] != 0,
                           p.col_name[static_cast<std::size_t>(j)]);
    }
    ps.problem.obj_offset = obj_off;
    std::vector<std::pair<int, double>> terms;
    for (int i = 0; i < m; ++i) {
        if (!row_alive[i]) continue;
        terms.clear();
        for (int k = p.row_begin[i]; k < p.row_begin[i + 1]; ++k) {
            const int j = new_col[static_cast<std::size_t>(p.cols[k])];
            if (j >= 0) terms.push_back({j, p.vals[k]});
        }
        ps.orig_row_of.push_back(i);
        ps.problem.add_row(p.sense[i], rhs[i], terms,
                           p.row_name[static_cast<std::size_t>(i)]);
    }
    return ps;
}

std::vector<double> postsolve_x(const Presolved& ps,
                                const std::vector<double>& xr) {
    std::vector<double> x = ps.fixed_val;
    for (std::size_t k = 0; k < ps.orig_col_of.size(); ++k)
        x[static_cast<std::size_t>(ps.orig_col_of[k])] = xr[k];
    return x;
}

namespace {

class BuiltinBackend final : public SolverBackend {
  public:
    std::string name() const override { return "builtin"; }

    LpSolution solve_lp(const LpProblem& p, bool want_duals) override {
        LpSolution out;
        Presolved ps = presolve(p, /*keep_rows_for_duals=*/want_duals);
        if (ps.status != SolveStatus::Optimal) {
            out.status = ps.status;
            return out;
        }
        Simplex spx;
        spx.load(ps.problem);
        out.status = spx.solve_primal();
        out.iterations = spx.iterations();
        if (out.status != SolveStatus::Optimal) return out;
        out.obj = spx.objective();
        out.x = postsolve_x(ps, spx.primal_values());
        if (want_duals) {
            // all rows kept in original order
            out.dual = spx.row_duals();
            const std::vector<double> djr = spx.reduced_costs();
            out.dj.assign(static_cast<std::size_t>(p.num_cols()), 0.0);
            for (std::size_t k = 0; k < ps.orig_col_of.size(); ++k)
                out.dj[static_cast<std::size_t>(ps.orig_col_of[k])] = djr[k];
            for (int j = 0; j < p.num_cols(); ++j) {
                if (!ps.col_fixed[static_cast<std::size_t>(j)]) continue;
                out.dj[static_cast<std::size_t>(j)] = p.obj[j];
            }
            for (int i = 0; i < p.num_rows(); ++i)
                for (int k = p.row_begin[i]; k < p.row_begin[i + 1]; ++k) {
                    const int j = p.cols[k];
                    if (ps.col_fixed[static_cast<std::size_t>(j)])
                        out.dj[static_cast<std::size_t>(j)] -=
                            p.vals[k] * out.dual[static_cast<std::size_t>(i)];
                }
        }
        return out;
    }

    MipSolution solve_mip(const LpProblem& p, const MipOptions& opt) override {
        MipSolution out;
        Presolved ps = presolve(p, /*keep_rows_for_duals=*/false);
        if (ps.status != SolveStatus::Optimal) {
            out.status = ps.status;
            out.bound = ps.status == SolveStatus::Infeasible ? kInf : -kInf;
            return out;
        }
        MipOptions ropt = opt;
        if (!opt.priority.empty()) {
            ropt.priority.assign(ps.orig_col_of.size(), 0);
            for (std::size_t k = 0; k < ps.orig_col_of.size(); ++k)
                ropt.priority[k] =
                    opt.priority[static_cast<std::size_t>(ps.orig_col_of[k])];
        }
        out = rsched::opt::solve_mip(ps.problem, ropt);
        if (out.status == SolveStatus::Optimal ||
            (out.status == SolveStatus::Limit && !out.x.empty()))
            out.x = postsolve_x(ps, out.x);
        return out;
    }
};

}  // namespace

std::unique_ptr<SolverBackend> make_backend(const std::string& name) {
    if (name == "builtin") return std::make_unique<BuiltinBackend>();
    return nullptr;
}

}  // namespace rsched::opt
