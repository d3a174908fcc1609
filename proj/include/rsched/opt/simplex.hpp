#pragma once

#include <cstdint>
#include <vector>

#include "rsched/opt/lp_model.hpp"
#include "rsched/opt/lu.hpp"

// Bounded-variable revised simplex (primal with long-step phase 1, plus a
// dual simplex for warm restarts after bound changes) over a sparse LU with
// product-form eta updates and power-of-two equilibration scaling.
// Deterministic: entering/leaving ties always break towards smaller indices.

namespace rsched::opt {

class Simplex {
public:
    struct Options {
        double feas_tol = 1e-7;     // primal feasibility (scaled space)
        double dual_tol = 1e-9;     // dual feasibility / pricing threshold
        double pivot_tol = 1e-8;    // smallest acceptable pivot magnitude
        std::int64_t iter_limit = 400000;
        int refactor_interval = 80;
        bool scale = true;
    };

    Simplex() = default;
    explicit Simplex(const Options& opt) : opt_(opt) {}

    // Loads the problem; integrality marks are ignored here (the MIP driver
    // owns them).  Resets the basis to all-logical.
    void load(const LpProblem& p);

    // Solve from the current basis state (primal phase 1 + 2).
    SolveStatus solve_primal();
    // Warm re-solve after bound changes; assumes reduced costs kept their
    // signs (true for pure bound tightenings).  Falls back to primal when
    // dual feasibility does not hold.
    SolveStatus solve_dual();

    // Structural column bound updates in original (unscaled) units.
    void set_col_bounds(int j, double lo, double hi);
    double col_lb(int j) const;
    double col_ub(int j) const;

    // Results (original units).
    double objective() const;
    std::vector<double> primal_values() const;
    std::vector<double> row_duals() const;
    std::vector<double> reduced_costs() const;
    std::int64_t iterations() const { return iters_; }

    void reset_basis();  // back to all-logical

private:
    enum class VStat : std::uint8_t { AtLower, AtUpper, Free, Basic };

    Options opt_;
    int n_ = 0, m_ = 0;  // structural cols, rows
    // scaled structural columns (CSC)
    std::vector<std::int64_t> cbeg_;
    std::vector<std::int32_t> cidx_;
    std::vector<double> cval_;
    std::vector<double> cost_, lo_, hi_;  // length n_+m_ (scaled)
    std::vector<double> rhs_;             // scaled
    std::vector<double> rscale_, cscale_;
    std::vector<double> camax_;       // per column: max |a_ij| (scaled space)
    mutable double ynorm_ = 0.0;      // inf-norm of last dual vector
    double obj_offset_ = 0.0;

    std::vector<int> basis_;          // position -> column id
    std::vector<VStat> vstat_;        // column id -> status
    std::vector<double> xval_;        // nonbasic values (scaled); basics stale
    std::vector<double> xb_;          // basic values by position
    std::vector<int> pos_of_;         // column id -> basis position or -1

    LuFactors lu_;
    // product-form etas
    std::vector<int> eta_pivot_;
    std::vector<std::int64_t> eta_begin_{0};
    std::vector<std::int32_t> eta_idx_;
    std::vector<double> eta_val_;
    int pivots_since_factor_ = 0;
    std::int64_t iters_ = 0;
    bool basics_valid_ = false;

    // scratch
    std::vector<double> work_, work2_, dwork_;

    void apply_scaling(const LpProblem& p);
    void col_entries(int j, std::vector<std::int32_t>& idx,
                     std::vector<double>& val) const;
    double col_dot(int j, const std::vector<double>& dense) const;
    bool refactorize();
    void ftran(std::vector<double>& v) const;
    void btran(std::vector<double>& v) const;
    void compute_basics();
    void compute_duals(bool phase1, std::vector<double>& y,
                       std::vector<double>& d) const;
    double infeasibility() const;
    int price(const std::vector<double>& d, bool bland) const;
    SolveStatus primal_loop();
    SolveStatus dual_loop();
    void push_eta(int pivot_pos, const std::vector<double>& w);
    void apply_pivot(int enter, int leave_pos, double enter_delta,
                     VStat leave_stat, const std::vector<double>& w);
};

}  // namespace rsched::opt
