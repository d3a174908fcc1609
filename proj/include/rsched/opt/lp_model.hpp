#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

// Plain linear/mixed-integer program container: minimize c'x subject to
// row senses <= / >= / = and variable bounds, with optional integrality
// marks.  Rows are stored CSR-style in insertion order; construction order
// is the canonical (deterministic) order everywhere downstream.

namespace rsched::opt {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense : std::uint8_t { LE, GE, EQ };

struct LpProblem {
    // columns
    std::vector<double> obj, lb, ub;
    std::vector<std::uint8_t> integer;  // 1 = integral
    std::vector<std::string> col_name;  // optional; empty allowed
    // rows (CSR)
    std::vector<Sense> sense;
    std::vector<double> rhs;
    std::vector<std::int64_t> row_begin{0};
    std::vector<std::int32_t> cols;
    std::vector<double> vals;
    std::vector<std::string> row_name;  // optional
    double obj_offset = 0.0;

    int num_cols() const { return static_cast<int>(obj.size()); }
    int num_rows() const { return static_cast<int>(rhs.size()); }

    int add_col(double cost, double lo, double hi, bool is_int = false,
                std::string name = {});
    // terms may contain repeated columns; they are summed.
    int add_row(Sense s, double b,
                const std::vector<std::pair<int, double>>& terms,
                std::string name = {});

    // row activity for a full point
    double row_activity(int r, const std::vector<double>& x) const;
    double objective(const std::vector<double>& x) const;

    // max violation of rows+bounds at x (for checks/tests)
    double max_violation(const std::vector<double>& x) const;
};

enum class SolveStatus : std::uint8_t {
    Optimal,
    Infeasible,
    Unbounded,
    Limit,      // iteration/node limit hit
    NumFail,    // numerical failure
};

const char* to_string(SolveStatus s);

struct LpSolution {
    SolveStatus status = SolveStatus::NumFail;
    double obj = 0.0;
    std::vector<double> x;    // primal values
    std::vector<double> dual; // row duals (sign: lagrangian min c'x + y'(b-Ax))
    std::vector<double> dj;   // reduced costs
    std::int64_t iterations = 0;
};

struct MipSolution {
    SolveStatus status = SolveStatus::NumFail;
    double obj = 0.0;
    double bound = -kInf;  // best proven lower bound (minimization)
    std::vector<double> x;
    std::int64_t nodes = 0;
    std::int64_t iterations = 0;
};

// CPLEX-LP-format text export.  Groups may be annotated with comment lines.
void write_lp_format(std::ostream& os, const LpProblem& p,
                     const std::vector<std::string>& header_comments = {});

}  // namespace rsched::opt
