#pragma once

#include <cstdint>
#include <utility>
#include <vector>

// Sparse LU factorization of a simplex basis matrix with Markowitz-style
// pivot selection and threshold partial pivoting.  Columns are addressed by
// basis position (0..m-1), rows by row id (0..m-1).
//
//   B = L' U'   with  L'[row, k] unit-lower in pivot order k,
//                     U'[k, pos] upper in pivot order.
//
// ftran solves B x = v (v over rows -> x over positions);
// btran solves B'y = v (v over positions -> y over rows).

namespace rsched::opt {

class LuFactors {
public:
    bool ok = false;
    std::vector<int> unpivoted_rows;  // row ids left uncovered (singular basis)
    std::vector<int> unpivoted_cols;  // basis positions left unused

    void ftran(std::vector<double>& v) const;
    void btran(std::vector<double>& v) const;

    int dim() const { return m_; }
    std::int64_t nnz() const { return static_cast<std::int64_t>(l_val_.size() + u_val_.size()); }

private:
    friend LuFactors lu_factor(int m,
                               const std::vector<std::vector<std::pair<int, double>>>& cols,
                               double pivot_tol);
    int m_ = 0;
    std::vector<int> pr_, pc_;          // pivot row id / pivot position per step
    std::vector<double> piv_;           // pivot values
    // L columns per step: rows affected + multipliers
    std::vector<std::int64_t> l_begin_{0};
    std::vector<std::int32_t> l_idx_;
    std::vector<double> l_val_;
    // U rows per step: positions + values (pivot entry excluded)
    std::vector<std::int64_t> u_begin_{0};
    std::vector<std::int32_t> u_idx_;
    std::vector<double> u_val_;
    mutable std::vector<double> scratch_;
};

// cols[pos] lists (row id, value) for the basis column at that position.
LuFactors lu_factor(int m,
                    const std::vector<std::vector<std::pair<int, double>>>& cols,
                    double pivot_tol = 0.1);

}  // namespace rsched::opt
