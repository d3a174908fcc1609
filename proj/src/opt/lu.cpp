#include "rsched/opt/lu.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "rsched/simd/kernels.hpp"

namespace rsched::opt {

namespace {

struct Entry {
    std::int32_t col;  // basis position
    double val;
};

}  // namespace

LuFactors lu_factor(int m,
                    const std::vector<std::vector<std::pair<int, double>>>& cols,
                    double pivot_tol) {
    LuFactors f;
    f.m_ = m;
    f.pr_.reserve(m);
    f.pc_.reserve(m);
    f.piv_.reserve(m);
    f.scratch_.assign(m, 0.0);

    // Active matrix held by rows; col_rows is a lazy column index that may
    // contain stale row ids (filtered against the row contents on use).
    std::vector<std::vector<Entry>> rows(m);
    std::vector<std::vector<std::int32_t>> col_rows(m);
    std::vector<int> col_count(m, 0), row_active(m, 1), col_active(m, 1);

    for (int pos = 0; pos < m; ++pos) {
        for (const auto& [r, v] : cols[pos]) {
            if (v == 0.0) continue;
            rows[r].push_back({pos, v});
            col_rows[pos].push_back(r);
        }
        col_count[pos] = static_cast<int>(col_rows[pos].size());
    }

    // count buckets over columns (intrusive doubly-linked lists)
    const int nb = m + 1;
    std::vector<int> bucket_head(nb + 1, -1), nxt(m, -1), prv(m, -1);
    auto bucket_of = [&](int cnt) { return std::min(cnt, nb); };
    auto unlink = [&](int c, int cnt) {
        const int b = bucket_of(cnt);
        if (prv[c] >= 0)
            nxt[prv[c]] = nxt[c];
        else if (bucket_head[b] == c)
            bucket_head[b] = nxt[c];
        if (nxt[c] >= 0) prv[nxt[c]] = prv[c];
        nxt[c] = prv[c] = -1;
    };
    auto link = [&](int c, int cnt) {
        const int b = bucket_of(cnt);
        nxt[c] = bucket_head[b];
        prv[c] = -1;
        if (bucket_head[b] >= 0) prv[bucket_head[b]] = c;
        bucket_head[b] = c;
    };
    auto move_bucket = [&](int c, int oldc, int newc) {
        if (bucket_of(oldc) == bucket_of(newc)) return;
        unlink(c, oldc);
        link(c, newc);
    };
    for (int c = 0; c < m; ++c) link(c, col_count[c]);

    auto row_find = [&](int r, int c) -> double {
        for (const auto& e : rows[r])
            if (e.col == c) return e.val;
        return 0.0;
    };

    // dense accumulator for row merges
    std::vector<double> acc(m, 0.0);
    std::vector<std::int8_t> in_acc(m, 0);
    std::vector<std::int32_t> touched;
    touched.reserve(64);

    const double tiny = 1e-30;

    for (int step = 0; step < m; ++step) {
        // ---- pivot selection: scan lowest-count buckets, few candidates
        int best_c = -1, best_r = -1;
        double best_v = 0.0;
        std::int64_t best_mark = std::numeric_limits<std::int64_t>::max();
        int examined = 0;
        for (int b = 1; b <= nb && best_c < 0; ++b) {
            int c = bucket_head[b];
            while (c >= 0) {
                const int c_next = nxt[c];  // bucket moves invalidate nxt[c]
                if (!col_active[c]) {
                    c = c_next;
                    continue;
                }
                // filter stale ids, find column max and candidates
                double cmax = 0.0;
                auto& cr = col_rows[c];
                std::size_t w = 0;
                for (std::size_t k = 0; k < cr.size(); ++k) {
                    const int r = cr[k];
                    if (!row_active[r]) continue;
                    const double v = row_find(r, c);
                    if (std::fabs(v) <= tiny) continue;
                    cr[w++] = r;
                    cmax = std::max(cmax, std::fabs(v));
                }
                cr.resize(w);
                bool stays = true;
                if (static_cast<int>(w) != col_count[c]) {
                    move_bucket(c, col_count[c], static_cast<int>(w));
                    stays = bucket_of(static_cast<int>(w)) == b;
                    col_count[c] = static_cast<int>(w);
                }
                if (w > 0 && stays) {
                    for (const int r : cr) {
                        const double v = row_find(r, c);
                        if (std::fabs(v) < pivot_tol * cmax) continue;
                        const std::int64_t mark =
                            static_cast<std::int64_t>(rows[r].size() - 1) *
                            static_cast<std::int64_t>(w - 1);
                        if (mark < best_mark ||
                            (mark == best_mark &&
                             (best_c < 0 || c < best_c || (c == best_c && r < best_r)))) {
                            best_mark = mark;
                            best_c = c;
                            best_r = r;
                            best_v = v;
                        }
                    }
                    if (best_c >= 0 && ++examined >= 4) break;
                }
                c = c_next;
            }
        }
        if (best_c < 0) break;  // singular remainder

        const int pc = best_c, pr = best_r;
        const double piv = best_v;
        f.pr_.push_back(pr);
        f.pc_.push_back(pc);
        f.piv_.push_back(piv);

        // deactivate pivot row/col; decrement col counts along pivot row
        row_active[pr] = 0;
        col_active[pc] = 0;
        unlink(pc, col_count[pc]);
        for (const auto& e : rows[pr])
            if (e.col != pc && col_active[e.col]) {
                move_bucket(e.col, col_count[e.col], col_count[e.col] - 1);
                --col_count[e.col];
            }

        // record U row (positions other than pivot), keep pivot row contents
        for (const auto& e : rows[pr])
            if (e.col != pc) {
                f.u_idx_.push_back(e.col);
                f.u_val_.push_back(e.val);
            }
        f.u_begin_.push_back(static_cast<std::int64_t>(f.u_idx_.size()));

        // eliminate pivot column from remaining active rows
        for (const int r : col_rows[pc]) {
            if (!row_active[r]) continue;
            const double a = row_find(r, pc);
            if (std::fabs(a) <= tiny) continue;
            const double mult = a / piv;
            f.l_idx_.push_back(r);
            f.l_val_.push_back(mult);

            // acc = row_r - mult * row_pr  (dropping the pivot column)
            touched.clear();
            for (const auto& e : rows[r]) {
                if (e.col == pc) continue;
                acc[e.col] = e.val;
                in_acc[e.col] = 1;
                touched.push_back(e.col);
            }
            for (const auto& e : rows[pr]) {
                if (e.col == pc) continue;
                if (!in_acc[e.col]) {
                    acc[e.col] = 0.0;
                    in_acc[e.col] = 1;
                    touched.push_back(e.col);
                }
                acc[e.col] -= mult * e.val;
            }
            double rmax = 0.0;
            for (const int c : touched) rmax = std::max(rmax, std::fabs(acc[c]));
            const double drop = rmax * 1e-15;
            auto& out = rows[r];
            // old column set for count updates
            std::vector<std::int32_t> old_cols;
            old_cols.reserve(out.size());
            for (const auto& e : out)
                if (e.col != pc) old_cols.push_back(e.col);
            out.clear();
            std::sort(touched.begin(), touched.end());
            for (const int c : touched) {
                const double v = acc[c];
                if (std::fabs(v) > drop && std::fabs(v) > tiny)
                    out.push_back({c, v});
                in_acc[c] = 0;
            }
            // update column counts/index for gained & lost entries
            std::size_t oi = 0;
            std::sort(old_cols.begin(), old_cols.end());
            std::size_t ni = 0;
            while (oi < old_cols.size() || ni < out.size()) {
                const int oc = oi < old_cols.size() ? old_cols[oi]
                                                    : std::numeric_limits<int>::max();
                const int nc = ni < out.size() ? out[ni].col
                                               : std::numeric_limits<int>::max();
                if (oc == nc) {
                    ++oi;
                    ++ni;
                } else if (nc < oc) {  // gained entry at nc
                    if (col_active[nc]) {
                        move_bucket(nc, col_count[nc], col_count[nc] + 1);
                        ++col_count[nc];
                        col_rows[nc].push_back(r);
                    }
                    ++ni;
                } else {  // lost entry at oc (cancellation)
                    if (col_active[oc]) {
                        move_bucket(oc, col_count[oc], col_count[oc] - 1);
                        --col_count[oc];
                    }
                    ++oi;
                }
            }
        }
        f.l_begin_.push_back(static_cast<std::int64_t>(f.l_idx_.size()));
        rows[pr].clear();
        col_rows[pc].clear();
    }

    if (static_cast<int>(f.pr_.size()) == m) {
        f.ok = true;
    } else {
        f.ok = false;
        std::vector<std::int8_t> rdone(m, 0), cdone(m, 0);
        for (const int r : f.pr_) rdone[r] = 1;
        for (const int c : f.pc_) cdone[c] = 1;
        for (int i = 0; i < m; ++i) {
            if (!rdone[i]) f.unpivoted_rows.push_back(i);
            if (!cdone[i]) f.unpivoted_cols.push_back(i);
        }
    }
    return f;
}

void LuFactors::ftran(std::vector<double>& v) const {
    const auto& K = simd::active();
    const int n = static_cast<int>(pr_.size());
    // forward: apply L multipliers in pivot order (v indexed by row id)
    for (int k = 0; k < n; ++k) {
        const double t = v[pr_[k]];
        if (t == 0.0) continue;
        const std::int64_t b = l_begin_[k], e = l_begin_[k + 1];
        K.sparse_axpy(-t, l_idx_.data() + b, l_val_.data() + b,
                      static_cast<std::size_t>(e - b), v.data());
    }
    // backward: U solve into scratch (indexed by basis position)
    std::fill(scratch_.begin(), scratch_.end(), 0.0);
    for (int k = n - 1; k >= 0; --k) {
        const std::int64_t b = u_begin_[k], e = u_begin_[k + 1];
        double t = v[pr_[k]];
        t -= K.sparse_dot(u_idx_.data() + b, u_val_.data() + b,
                          static_cast<std::size_t>(e - b), scratch_.data());
        scratch_[pc_[k]] = t / piv_[k];
    }
    v.swap(scratch_);
}

void LuFactors::btran(std::vector<double>& v) const {
    const auto& K = simd::active();
    const int n = static_cast<int>(pr_.size());
    // forward through U' (v indexed by basis position); s over pivot steps
    std::fill(scratch_.begin(), scratch_.end(), 0.0);
    for (int k = 0; k < n; ++k) {
        const double s = v[pc_[k]] / piv_[k];
        scratch_[k] = s;
        if (s == 0.0) continue;
        const std::int64_t b = u_begin_[k], e = u_begin_[k + 1];
        K.sparse_axpy(-s, u_idx_.data() + b, u_val_.data() + b,
                      static_cast<std::size_t>(e - b), v.data());
    }
    // backward through L' (result indexed by row id)
    std::fill(v.begin(), v.end(), 0.0);
    for (int k = n - 1; k >= 0; --k) {
        const std::int64_t b = l_begin_[k], e = l_begin_[k + 1];
        double t = scratch_[k];
        t -= K.sparse_dot(l_idx_.data() + b, l_val_.data() + b,
                          static_cast<std::size_t>(e - b), v.data());
        v[pr_[k]] = t;
    }
}

}  // namespace rsched::opt
