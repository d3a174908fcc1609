#include "rsched/opt/lp_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace rsched::opt {

int LpProblem::add_col(double cost, double lo, double hi, bool is_int,
                       std::string name) {
    if (lo > hi) throw std::invalid_argument("column bounds crossed: " + name);
    obj.push_back(cost);
    lb.push_back(lo);
    ub.push_back(hi);
    integer.push_back(is_int ? 1 : 0);
    col_name.push_back(std::move(name));
    return num_cols() - 1;
}

int LpProblem::add_row(Sense s, double b,
                       const std::vector<std::pair<int, double>>& terms,
                       std::string name) {
    // merge duplicate columns, keep first-occurrence order deterministic
    std::map<int, double> merged;
    for (const auto& [c, v] : terms) {
        if (c < 0 || c >= num_cols())
            throw std::out_of_range("row term references unknown column");
        merged[c] += v;
    }
    for (const auto& [c, v] : merged) {
        if (v == 0.0) continue;
        cols.push_back(c);
        vals.push_back(v);
    }
    sense.push_back(s);
    rhs.push_back(b);
    row_begin.push_back(static_cast<std::int64_t>(cols.size()));
    row_name.push_back(std::move(name));
    return num_rows() - 1;
}

double LpProblem::row_activity(int r, const std::vector<double>& x) const {
    double a = 0.0;
    for (std::int64_t k = row_begin[r]; k < row_begin[r + 1]; ++k)
        a += vals[k] * x[cols[k]];
    return a;
}

double LpProblem::objective(const std::vector<double>& x) const {
    double z = obj_offset;
    for (int j = 0; j < num_cols(); ++j) z += obj[j] * x[j];
    return z;
}

double LpProblem::max_violation(const std::vector<double>& x) const {
    double v = 0.0;
    for (int j = 0; j < num_cols(); ++j) {
        v = std::max(v, lb[j] - x[j]);
        v = std::max(v, x[j] - ub[j]);
    }
    for (int r = 0; r < num_rows(); ++r) {
        const double a = row_activity(r, x);
        switch (sense[r]) {
            case Sense::LE: v = std::max(v, a - rhs[r]); break;
            case Sense::GE: v = std::max(v, rhs[r] - a); break;
            case Sense::EQ: v = std::max(v, std::fabs(a - rhs[r])); break;
        }
    }
    return v;
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::Limit: return "limit";
        case SolveStatus::NumFail: return "numerical-failure";
    }
    return "?";
}

namespace {

std::string lp_name(const std::string& given, const char* prefix, int i) {
    if (given.empty()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s%d", prefix, i);
        return buf;
    }
    // LP format forbids several characters; replace them conservatively.
    std::string s = given;
    for (char& c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
              c == '.' || c == '(' || c == ')' || c == '[' || c == ']' ||
              c == ','))
            c = '_';
    return s;
}

void write_num(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

void write_terms(std::ostream& os, const LpProblem& p, std::int64_t b,
                 std::int64_t e, const std::vector<std::string>& names) {
    int on_line = 0;
    for (std::int64_t k = b; k < e; ++k) {
        const double v = p.vals[k];
        if (v >= 0)
            os << (k == b ? "" : " +") << ' ';
        else
            os << (k == b ? "-" : " -") << ' ';
        write_num(os, std::fabs(v));
        os << ' ' << names[p.cols[k]];
        if (++on_line == 6 && k + 1 < e) {
            os << "\n      ";
            on_line = 0;
        }
    }
    if (b == e) os << "0 " << names[0];
}

}  // namespace

void write_lp_format(std::ostream& os, const LpProblem& p,
                     const std::vector<std::string>& header_comments) {
    for (const auto& c : header_comments) os << "\\ " << c << "\n";
    std::vector<std::string> cn(p.num_cols());
    for (int j = 0; j < p.num_cols(); ++j) cn[j] = lp_name(p.col_name[j], "x", j);

    os << "Minimize\n obj:";
    bool any = false;
    for (int j = 0; j < p.num_cols(); ++j) {
        const double v = p.obj[j];
        if (v == 0.0) continue;
        os << (v >= 0 ? (any ? " + " : " ") : (any ? " - " : " - "));
        write_num(os, std::fabs(v));
        os << ' ' << cn[j];
        any = true;
    }
    if (!any) os << " 0 " << (p.num_cols() ? cn[0] : "x0");
    os << "\nSubject To\n";
    for (int r = 0; r < p.num_rows(); ++r) {
        os << ' ' << lp_name(p.row_name[r], "c", r) << ": ";
        write_terms(os, p, p.row_begin[r], p.row_begin[r + 1], cn);
        switch (p.sense[r]) {
            case Sense::LE: os << " <= "; break;
            case Sense::GE: os << " >= "; break;
            case Sense::EQ: os << " = "; break;
        }
        write_num(os, p.rhs[r]);
        os << "\n";
    }
    os << "Bounds\n";
    for (int j = 0; j < p.num_cols(); ++j) {
        const double lo = p.lb[j], hi = p.ub[j];
        if (lo == 0.0 && hi == kInf) continue;  // LP-format default
        os << ' ';
        if (lo == hi) {
            os << cn[j] << " = ";
            write_num(os, lo);
        } else {
            if (lo == -kInf)
                os << "-inf";
            else
                write_num(os, lo);
            os << " <= " << cn[j] << " <= ";
            if (hi == kInf)
                os << "+inf";
            else
                write_num(os, hi);
        }
        os << "\n";
    }
    bool any_bin = false, any_gen = false;
    for (int j = 0; j < p.num_cols(); ++j)
        if (p.integer[j]) {
            if (p.lb[j] >= 0.0 && p.ub[j] <= 1.0)
                any_bin = true;
            else
                any_gen = true;
        }
    if (any_bin) {
        os << "Binaries\n";
        int on_line = 0;
        for (int j = 0; j < p.num_cols(); ++j)
            if (p.integer[j] && p.lb[j] >= 0.0 && p.ub[j] <= 1.0) {
                os << ' ' << cn[j];
                if (++on_line == 8) {
                    os << "\n";
                    on_line = 0;
                }
            }
        if (on_line) os << "\n";
    }
    if (any_gen) {
        os << "Generals\n";
        for (int j = 0; j < p.num_cols(); ++j)
            if (p.integer[j] && !(p.lb[j] >= 0.0 && p.ub[j] <= 1.0))
                os << ' ' << cn[j] << "\n";
    }
    os << "End\n";
}

}  // namespace rsched::opt
