#include "rsched/opt/simplex.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <tuple>

#include "rsched/simd/kernels.hpp"

namespace rsched::opt {

namespace {
constexpr double kZeroTol = 1e-11;

double pow2_round(double v) {
    if (v <= 0.0 || !std::isfinite(v)) return 1.0;
    return std::exp2(std::round(std::log2(v)));
}
}  // namespace

void Simplex::load(const LpProblem& p) {
    n_ = p.num_cols();
    m_ = p.num_rows();
    const int N = n_ + m_;
    obj_offset_ = p.obj_offset;

    // transpose CSR rows -> CSC cols
    cbeg_.assign(n_ + 1, 0);
    std::vector<std::int64_t> cnt(n_, 0);
    for (std::size_t k = 0; k < p.cols.size(); ++k) ++cnt[p.cols[k]];
    for (int j = 0; j < n_; ++j) cbeg_[j + 1] = cbeg_[j] + cnt[j];
    cidx_.assign(p.cols.size(), 0);
    cval_.assign(p.cols.size(), 0.0);
    std::vector<std::int64_t> fill(cbeg_.begin(), cbeg_.end() - 1);
    for (int r = 0; r < m_; ++r)
        for (std::int64_t k = p.row_begin[r]; k < p.row_begin[r + 1]; ++k) {
            const int j = p.cols[k];
            cidx_[fill[j]] = r;
            cval_[fill[j]] = p.vals[k];
            ++fill[j];
        }

    cost_.assign(N, 0.0);
    lo_.assign(N, 0.0);
    hi_.assign(N, 0.0);
    rhs_ = p.rhs;
    for (int j = 0; j < n_; ++j) {
        cost_[j] = p.obj[j];
        lo_[j] = p.lb[j];
        hi_[j] = p.ub[j];
    }
    for (int i = 0; i < m_; ++i) {
        const int j = n_ + i;
        switch (p.sense[i]) {
            case Sense::LE: lo_[j] = 0.0;   hi_[j] = kInf; break;
            case Sense::GE: lo_[j] = -kInf; hi_[j] = 0.0;  break;
            case Sense::EQ: lo_[j] = 0.0;   hi_[j] = 0.0;  break;
        }
    }

    rscale_.assign(m_, 1.0);
    cscale_.assign(n_, 1.0);
    if (opt_.scale) apply_scaling(p);

    camax_.assign(N, 1.0);
    for (int j = 0; j < n_; ++j) {
        double mx = 0.0;
        for (std::int64_t k = cbeg_[j]; k < cbeg_[j + 1]; ++k)
            mx = std::max(mx, std::fabs(cval_[k]));
        camax_[j] = std::max(mx, 1.0);
    }

    reset_basis();
    iters_ = 0;
}

void Simplex::apply_scaling(const LpProblem& p) {
    // geometric-mean equilibration rounded to powers of two; integer columns
    // keep unit scale so branching bounds stay exact.
    for (int pass = 0; pass < 4; ++pass) {
        std::vector<double> rmin(m_, kInf), rmax(m_, 0.0);
        for (int j = 0; j < n_; ++j)
            for (std::int64_t k = cbeg_[j]; k < cbeg_[j + 1]; ++k) {
                const double a = std::fabs(cval_[k]);
                if (a == 0.0) continue;
                rmin[cidx_[k]] = std::min(rmin[cidx_[k]], a);
                rmax[cidx_[k]] = std::max(rmax[cidx_[k]], a);
            }
        std::vector<double> rs(m_, 1.0);
        for (int i = 0; i < m_; ++i)
            if (rmax[i] > 0.0) rs[i] = pow2_round(1.0 / std::sqrt(rmin[i] * rmax[i]));
        for (int j = 0; j < n_; ++j)
            for (std::int64_t k = cbeg_[j]; k < cbeg_[j + 1]; ++k)
                cval_[k] *= rs[cidx_[k]];
        for (int i = 0; i < m_; ++i) {
            rhs_[i] *= rs[i];
            rscale_[i] *= rs[i];
        }
        std::vector<double> cs(n_, 1.0);
        for (int j = 0; j < n_; ++j) {
            if (p.integer[j]) continue;
            double cmin = kInf, cmax = 0.0;
            for (std::int64_t k = cbeg_[j]; k < cbeg_[j + 1]; ++k) {
                const double a = std::fabs(cval_[k]);
                if (a == 0.0) continue;
                cmin = std::min(cmin, a);
                cmax = std::max(cmax, a);
            }
            if (cmax > 0.0) cs[j] = pow2_round(1.0 / std::sqrt(cmin * cmax));
        }
        for (int j = 0; j < n_; ++j) {
            if (cs[j] == 1.0) continue;
            for (std::int64_t k = cbeg_[j]; k < cbeg_[j + 1]; ++k) cval_[k] *= cs[j];
            cost_[j] *= cs[j];
            if (std::isfinite(lo_[j])) lo_[j] /= cs[j];
            if (std::isfinite(hi_[j])) hi_[j] /= cs[j];
            cscale_[j] *= cs[j];
        }
    }
    // logical bounds are sign-only; row scaling (positive) preserves them.
}

void Simplex::reset_basis() {
    const int N = n_ + m_;
    basis_.resize(m_);
    pos_of_.assign(N, -1);
    vstat_.assign(N, VStat::AtLower);
    xval_.assign(N, 0.0);
    for (int j = 0; j < n_; ++j) {
        if (std::isfinite(lo_[j])) {
            vstat_[j] = VStat::AtLower;
            xval_[j] = lo_[j];
        } else if (std::isfinite(hi_[j])) {
            vstat_[j] = VStat::AtUpper;
            xval_[j] = hi_[j];
        } else {
            vstat_[j] = VStat::Free;
            xval_[j] = 0.0;
        }
    }
    for (int i = 0; i < m_; ++i) {
        basis_[i] = n_ + i;
        vstat_[n_ + i] = VStat::Basic;
        pos_of_[n_ + i] = i;
    }
    eta_pivot_.clear();
    eta_begin_.assign(1, 0);
    eta_idx_.clear();
    eta_val_.clear();
    pivots_since_factor_ = 0;
    basics_valid_ = false;
    work_.assign(m_, 0.0);
    work2_.assign(m_, 0.0);
    dwork_.assign(N, 0.0);
    refactorize();
}

void Simplex::col_entries(int j, std::vector<std::int32_t>& idx,
                          std::vector<double>& val) const {
    idx.clear();
    val.clear();
    if (j < n_) {
        for (std::int64_t k = cbeg_[j]; k < cbeg_[j + 1]; ++k) {
            idx.push_back(cidx_[k]);
            val.push_back(cval_[k]);
        }
    } else {
        idx.push_back(j - n_);
        val.push_back(1.0);
    }
}

double Simplex::col_dot(int j, const std::vector<double>& dense) const {
    if (j >= n_) return dense[j - n_];
    const std::int64_t b = cbeg_[j], e = cbeg_[j + 1];
    return simd::active().sparse_dot(cidx_.data() + b, cval_.data() + b,
                                     static_cast<std::size_t>(e - b), dense.data());
}

bool Simplex::refactorize() {
    for (int attempt = 0; attempt < 4; ++attempt) {
        std::vector<std::vector<std::pair<int, double>>> cols(m_);
        for (int pos = 0; pos < m_; ++pos) {
            const int j = basis_[pos];
            if (j < n_) {
                for (std::int64_t k = cbeg_[j]; k < cbeg_[j + 1]; ++k)
                    cols[pos].push_back({cidx_[k], cval_[k]});
            } else {
                cols[pos].push_back({j - n_, 1.0});
            }
        }
        lu_ = lu_factor(m_, cols, 0.1);
        if (lu_.ok) {
            eta_pivot_.clear();
            eta_begin_.assign(1, 0);
            eta_idx_.clear();
            eta_val_.clear();
            pivots_since_factor_ = 0;
            compute_basics();
            return true;
        }
        // basis repair: cover unpivoted rows with their logicals
        std::vector<int> rows_left;
        std::vector<std::int8_t> pos_free(m_, 0);
        for (const int cp : lu_.unpivoted_cols) pos_free[cp] = 1;
        for (const int r : lu_.unpivoted_rows) {
            const int lg = n_ + r;
            if (pos_of_[lg] >= 0 && pos_free[pos_of_[lg]]) {
                pos_free[pos_of_[lg]] = 0;  // already sits at a free position
                continue;
            }
            rows_left.push_back(r);
        }
        std::size_t ri = 0;
        for (const int cp : lu_.unpivoted_cols) {
            if (!pos_free[cp] || ri >= rows_left.size()) continue;
            const int out = basis_[cp];
            const int r = rows_left[ri++];
            vstat_[out] = std::isfinite(lo_[out]) ? VStat::AtLower
                          : std::isfinite(hi_[out]) ? VStat::AtUpper
                                                    : VStat::Free;
            xval_[out] = vstat_[out] == VStat::AtLower   ? lo_[out]
                         : vstat_[out] == VStat::AtUpper ? hi_[out]
                                                         : 0.0;
            pos_of_[out] = -1;
            basis_[cp] = n_ + r;
            vstat_[n_ + r] = VStat::Basic;
            pos_of_[n_ + r] = cp;
        }
    }
    return false;
}

void Simplex::ftran(std::vector<double>& v) const {
    lu_.ftran(v);
    const auto& K = simd::active();
    const int ne = static_cast<int>(eta_pivot_.size());
    for (int k = 0; k < ne; ++k) {
        const int q = eta_pivot_[k];
        const std::int64_t b = eta_begin_[k], e = eta_begin_[k + 1];
        const double t = v[q] / eta_val_[b];  // entry 0 is the pivot
        if (t != 0.0)
            K.sparse_axpy(-t, eta_idx_.data() + b + 1, eta_val_.data() + b + 1,
                          static_cast<std::size_t>(e - b - 1), v.data());
        v[q] = t;
    }
}

void Simplex::btran(std::vector<double>& v) const {
    const auto& K = simd::active();
    for (int k = static_cast<int>(eta_pivot_.size()) - 1; k >= 0; --k) {
        const int q = eta_pivot_[k];
        const std::int64_t b = eta_begin_[k], e = eta_begin_[k + 1];
        const double s =
            K.sparse_dot(eta_idx_.data() + b + 1, eta_val_.data() + b + 1,
                         static_cast<std::size_t>(e - b - 1), v.data());
        v[q] = (v[q] - s) / eta_val_[b];
    }
    lu_.btran(v);
}

void Simplex::compute_basics() {
    work_ = rhs_;
    for (int j = 0; j < n_ + m_; ++j) {
        if (vstat_[j] == VStat::Basic) continue;
        const double xv = xval_[j];
        if (xv == 0.0) continue;
        if (j < n_) {
            for (std::int64_t k = cbeg_[j]; k < cbeg_[j + 1]; ++k)
                work_[cidx_[k]] -= cval_[k] * xv;
        } else {
            work_[j - n_] -= xv;
        }
    }
    ftran(work_);
    xb_ = work_;
    work_.assign(m_, 0.0);
    basics_valid_ = true;
}

void Simplex::compute_duals(bool phase1, std::vector<double>& y,
                            std::vector<double>& d) const {
    y.assign(m_, 0.0);
    const double ft = opt_.feas_tol;
    for (int pos = 0; pos < m_; ++pos) {
        const int j = basis_[pos];
        if (phase1) {
            if (xb_[pos] < lo_[j] - ft)
                y[pos] = -1.0;
            else if (xb_[pos] > hi_[j] + ft)
                y[pos] = 1.0;
        } else {
            y[pos] = cost_[j];
        }
    }
    btran(y);
    // dual rounding noise scales with both the dual vector and the basic
    // costs pushed through an ill-conditioned basis
    ynorm_ = 0.0;
    for (int i = 0; i < m_; ++i) ynorm_ = std::max(ynorm_, std::fabs(y[i]));
    for (int pos = 0; pos < m_; ++pos)
        ynorm_ = std::max(ynorm_, phase1 ? 1.0 : std::fabs(cost_[basis_[pos]]));
    d.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_ + m_; ++j) {
        if (vstat_[j] == VStat::Basic) continue;
        const double c = phase1 ? 0.0 : cost_[j];
        d[j] = c - col_dot(j, y);
    }
}

double Simplex::infeasibility() const {
    double s = 0.0;
    for (int pos = 0; pos < m_; ++pos) {
        const int j = basis_[pos];
        s += std::max(0.0, lo_[j] - xb_[pos]);
        s += std::max(0.0, xb_[pos] - hi_[j]);
    }
    return s;
}

int Simplex::price(const std::vector<double>& d, bool bland) const {
    const double dt = opt_.dual_tol;
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < n_ + m_; ++j) {
        double score = 0.0;
        switch (vstat_[j]) {
            case VStat::Basic: continue;
            case VStat::AtLower: score = -d[j]; break;
            case VStat::AtUpper: score = d[j]; break;
            case VStat::Free: score = std::fabs(d[j]); break;
        }
        // backward-error threshold: d[j] carries rounding noise on the order
        // of eps * (|c_j| + ||y||_inf * max|a_.j|)
        const double tol =
            dt * (1.0 + std::fabs(cost_[j]) + ynorm_ * camax_[j]);
        if (score <= tol) continue;
        if (bland) return j;
        if (score - tol > best_score) {
            best_score = score - tol;
            best = j;
        }
    }
    return best;
}

void Simplex::push_eta(int pivot_pos, const std::vector<double>& w) {
    double wmax = 0.0;
    for (const double v : w) wmax = std::max(wmax, std::fabs(v));
    const double drop = wmax * 1e-15;
    eta_pivot_.push_back(pivot_pos);
    eta_idx_.push_back(pivot_pos);
    eta_val_.push_back(w[pivot_pos]);
    for (int i = 0; i < m_; ++i) {
        if (i == pivot_pos) continue;
        const double v = w[i];
        if (std::fabs(v) > drop && v != 0.0) {
            eta_idx_.push_back(i);
            eta_val_.push_back(v);
        }
    }
    eta_begin_.push_back(static_cast<std::int64_t>(eta_idx_.size()));
}

void Simplex::apply_pivot(int enter, int leave_pos, double enter_delta,
                          VStat leave_stat, const std::vector<double>& w) {
    const int leave = basis_[leave_pos];
    if (enter_delta != 0.0)
        simd::active().axpy(-enter_delta, w.data(), xb_.data(), m_);
    const double enter_val = xval_[enter] + enter_delta;
    vstat_[leave] = leave_stat;
    xval_[leave] = leave_stat == VStat::AtLower   ? lo_[leave]
                   : leave_stat == VStat::AtUpper ? hi_[leave]
                                                  : 0.0;
    pos_of_[leave] = -1;
    basis_[leave_pos] = enter;
    vstat_[enter] = VStat::Basic;
    pos_of_[enter] = leave_pos;
    xb_[leave_pos] = enter_val;
    push_eta(leave_pos, w);
    ++pivots_since_factor_;
    if (pivots_since_factor_ >= opt_.refactor_interval ||
        static_cast<std::int64_t>(eta_val_.size()) > 4 * std::max<std::int64_t>(lu_.nnz(), 1000))
        refactorize();
}

SolveStatus Simplex::solve_primal() {
    if (!basics_valid_) compute_basics();
    return primal_loop();
}

SolveStatus Simplex::primal_loop() {
    std::vector<double> y, d, w;
    bool bland = false;
    int degen_run = 0;
    const double ft = opt_.feas_tol;
    const std::int64_t start = iters_;

    while (true) {
        if (iters_ - start >= opt_.iter_limit) return SolveStatus::Limit;
        ++iters_;

        bool phase1 = false;
        for (int pos = 0; pos < m_ && !phase1; ++pos) {
            const int j = basis_[pos];
            if (xb_[pos] < lo_[j] - ft || xb_[pos] > hi_[j] + ft) phase1 = true;
        }

        compute_duals(phase1, y, d);
        const int enter = price(d, bland);
        if (enter < 0) {
            if (phase1) {
                // confirm on a fresh factorization before declaring infeasible
                if (pivots_since_factor_ > 0) {
                    if (!refactorize()) return SolveStatus::NumFail;
                    continue;
                }
                return SolveStatus::Infeasible;
            }
            if (pivots_since_factor_ > 0) {
                if (!refactorize()) return SolveStatus::NumFail;
                compute_duals(false, y, d);
                const int again = price(d, bland);
                if (again < 0) return SolveStatus::Optimal;
                continue;
            }
            return SolveStatus::Optimal;
        }

        const double dir =
            vstat_[enter] == VStat::AtLower ? 1.0
            : vstat_[enter] == VStat::AtUpper ? -1.0
                                              : (d[enter] < 0.0 ? 1.0 : -1.0);

        // w = B^-1 a_enter
        work_.assign(m_, 0.0);
        if (enter < n_) {
            for (std::int64_t k = cbeg_[enter]; k < cbeg_[enter + 1]; ++k)
                work_[cidx_[k]] += cval_[k];
        } else {
            work_[enter - n_] += 1.0;
        }
        ftran(work_);
        w = work_;

        const double range =
            (std::isfinite(lo_[enter]) && std::isfinite(hi_[enter]))
                ? hi_[enter] - lo_[enter]
                : kInf;

        double theta = kInf;
        int leave_pos = -1;
        VStat leave_stat = VStat::AtLower;
        bool flip = false;

        if (phase1) {
            struct Ev {
                double th;
                int pos;  // -1 marks the entering variable's own bound flip
                double aw;
                VStat stat;
            };
            std::vector<Ev> evs;
            for (int pos = 0; pos < m_; ++pos) {
                const double wt = dir * w[pos];
                if (std::fabs(wt) <= kZeroTol) continue;
                const int j = basis_[pos];
                const double xv = xb_[pos];
                if (wt > 0) {  // moving down
                    if (std::isfinite(lo_[j]) && xv > lo_[j] - ft)
                        evs.push_back({std::max(0.0, (xv - lo_[j]) / wt), pos,
                                       std::fabs(wt), VStat::AtLower});
                    if (std::isfinite(hi_[j]) && xv > hi_[j] + ft)
                        evs.push_back({std::max(0.0, (xv - hi_[j]) / wt), pos,
                                       std::fabs(wt), VStat::AtUpper});
                } else {  // moving up
                    if (std::isfinite(hi_[j]) && xv < hi_[j] + ft)
                        evs.push_back({std::max(0.0, (hi_[j] - xv) / -wt), pos,
                                       std::fabs(wt), VStat::AtUpper});
                    if (std::isfinite(lo_[j]) && xv < lo_[j] - ft)
                        evs.push_back({std::max(0.0, (lo_[j] - xv) / -wt), pos,
                                       std::fabs(wt), VStat::AtLower});
                }
            }
            if (std::isfinite(range))
                evs.push_back({range, -1, kInf, VStat::AtLower});
            std::sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) {
                return std::tie(a.th, b.aw, a.pos) < std::tie(b.th, a.aw, b.pos);
            });
            double slope = -std::fabs(d[enter]);
            bool stopped = false;
            for (const Ev& ev : evs) {
                theta = ev.th;
                if (ev.pos < 0) {
                    flip = true;
                    stopped = true;
                    break;
                }
                leave_pos = ev.pos;
                leave_stat = ev.stat;
                slope += ev.aw;
                stopped = true;
                if (slope >= -opt_.dual_tol) break;
            }
            if (!stopped || (!flip && slope < -opt_.dual_tol && leave_pos < 0))
                return SolveStatus::NumFail;  // infeasibility descent unbounded
        } else {
            // Harris two-pass
            double tmax = range + ft;
            for (int pos = 0; pos < m_; ++pos) {
                const double wt = dir * w[pos];
                if (std::fabs(wt) <= kZeroTol) continue;
                const int j = basis_[pos];
                if (wt > 0 && std::isfinite(lo_[j]))
                    tmax = std::min(tmax, (xb_[pos] - lo_[j] + ft) / wt);
                else if (wt < 0 && std::isfinite(hi_[j]))
                    tmax = std::min(tmax, (hi_[j] - xb_[pos] + ft) / -wt);
            }
            double best_aw = 0.0;
            for (int pos = 0; pos < m_; ++pos) {
                const double wt = dir * w[pos];
                if (std::fabs(wt) <= kZeroTol) continue;
                const int j = basis_[pos];
                double th, aw = std::fabs(wt);
                VStat st;
                if (wt > 0 && std::isfinite(lo_[j])) {
                    th = (xb_[pos] - lo_[j]) / wt;
                    st = VStat::AtLower;
                } else if (wt < 0 && std::isfinite(hi_[j])) {
                    th = (hi_[j] - xb_[pos]) / -wt;
                    st = VStat::AtUpper;
                } else {
                    continue;
                }
                if (th <= tmax &&
                    (leave_pos < 0 || aw > best_aw ||
                     (aw == best_aw && pos < leave_pos))) {
                    best_aw = aw;
                    theta = std::max(0.0, th);
                    leave_pos = pos;
                    leave_stat = st;
                }
            }
            if (leave_pos < 0) {
                if (std::isfinite(range)) {
                    flip = true;
                    theta = range;
                } else {
                    // confirm on a fresh factorization before declaring
                    if (pivots_since_factor_ > 0) {
                        if (!refactorize()) return SolveStatus::NumFail;
                        continue;
                    }
                    return SolveStatus::Unbounded;
                }
            } else if (std::isfinite(range) && range < theta) {
                flip = true;
                theta = range;
                leave_pos = -1;
            }
        }

        const double delta = dir * theta;
        if (flip) {
            if (delta != 0.0) simd::active().axpy(-delta, w.data(), xb_.data(), m_);
            xval_[enter] += delta;
            vstat_[enter] =
                vstat_[enter] == VStat::AtLower ? VStat::AtUpper : VStat::AtLower;
        } else {
            if (std::fabs(w[leave_pos]) < opt_.pivot_tol) {
                if (pivots_since_factor_ > 0) {
                    if (!refactorize()) return SolveStatus::NumFail;
                    continue;  // retry from refreshed factors
                }
                bland = true;  // try a different entering next time
                continue;
            }
            apply_pivot(enter, leave_pos, delta, leave_stat, w);
        }

        if (theta <= 1e-11) {
            if (++degen_run > 500) bland = true;
            if (degen_run > 5000) return SolveStatus::NumFail;
        } else {
            degen_run = 0;
            bland = false;
        }
    }
}

SolveStatus Simplex::solve_dual() {
    if (!basics_valid_) compute_basics();
    const SolveStatus st = dual_loop();
    if (st == SolveStatus::NumFail) {
        // dual start unavailable or stalled: recover with primal
        if (!refactorize()) return SolveStatus::NumFail;
        return primal_loop();
    }
    return st;
}

SolveStatus Simplex::dual_loop() {
    std::vector<double> y, d, rho, w;
    const double ft = opt_.feas_tol;
    const double dt = opt_.dual_tol;
    int stall = 0;
    const std::int64_t start = iters_;

    while (true) {
        if (iters_ - start >= opt_.iter_limit) return SolveStatus::Limit;
        ++iters_;

        int p = -1;
        double worst = ft;
        for (int pos = 0; pos < m_; ++pos) {
            const int j = basis_[pos];
            const double v1 = lo_[j] - xb_[pos];
            const double v2 = xb_[pos] - hi_[j];
            const double v = std::max(v1, v2);
            if (v > worst) {
                worst = v;
                p = pos;
            }
        }
        if (p < 0) {
            if (pivots_since_factor_ > 0) {
                if (!refactorize()) return SolveStatus::NumFail;
                continue;  // re-check on clean factors
            }
            // verify dual feasibility; a stray sign means we must clean up
            compute_duals(false, y, d);
            if (price(d, false) >= 0) return primal_loop();
            return SolveStatus::Optimal;
        }

        const int jl = basis_[p];
        const bool below = xb_[p] < lo_[jl];
        const double vd = below ? 1.0 : -1.0;
        const double target = below ? lo_[jl] : hi_[jl];
        const VStat leave_stat = below ? VStat::AtLower : VStat::AtUpper;

        work_.assign(m_, 0.0);
        work_[p] = 1.0;
        btran(work_);
        rho = work_;
        compute_duals(false, y, d);

        struct Cand {
            double ratio, aw;
            int j;
        };
        std::vector<Cand> cands;
        double rel_min = kInf;
        for (int j = 0; j < n_ + m_; ++j) {
            if (vstat_[j] == VStat::Basic) continue;
            const double a = col_dot(j, rho);
            if (std::fabs(a) <= kZeroTol) continue;
            bool ok = false;
            double dval = 0.0;
            switch (vstat_[j]) {
                case VStat::AtLower:
                    ok = a * vd < 0;
                    dval = std::max(d[j], 0.0);
                    break;
                case VStat::AtUpper:
                    ok = a * vd > 0;
                    dval = std::max(-d[j], 0.0);
                    break;
                case VStat::Free:
                    ok = true;
                    dval = std::fabs(d[j]);
                    break;
                default: break;
            }
            if (!ok) continue;
            cands.push_back({dval / std::fabs(a), std::fabs(a), j});
            rel_min = std::min(rel_min, (dval + dt) / std::fabs(a));
        }
        if (cands.empty()) {
            if (pivots_since_factor_ > 0) {
                if (!refactorize()) return SolveStatus::NumFail;
                continue;
            }
            return SolveStatus::Infeasible;
        }
        // Harris pass 2: biggest |alpha| within the relaxed ratio bound
        int enter = -1;
        double best_aw = 0.0;
        for (const Cand& c : cands)
            if (c.ratio <= rel_min && (enter < 0 || c.aw > best_aw ||
                                       (c.aw == best_aw && c.j < enter))) {
                best_aw = c.aw;
                enter = c.j;
            }

        work_.assign(m_, 0.0);
        if (enter < n_) {
            for (std::int64_t k = cbeg_[enter]; k < cbeg_[enter + 1]; ++k)
                work_[cidx_[k]] += cval_[k];
        } else {
            work_[enter - n_] += 1.0;
        }
        ftran(work_);
        w = work_;
        if (std::fabs(w[p]) < opt_.pivot_tol) {
            if (pivots_since_factor_ > 0) {
                if (!refactorize()) return SolveStatus::NumFail;
                continue;
            }
            if (++stall > 50) return SolveStatus::NumFail;
            continue;
        }
        stall = 0;
        const double delta = (xb_[p] - target) / w[p];
        apply_pivot(enter, p, delta, leave_stat, w);
    }
}

void Simplex::set_col_bounds(int j, double lo, double hi) {
    lo_[j] = std::isfinite(lo) ? lo / cscale_[j] : lo;
    hi_[j] = std::isfinite(hi) ? hi / cscale_[j] : hi;
    if (vstat_[j] == VStat::AtLower) {
        if (std::isfinite(lo_[j])) {
            xval_[j] = lo_[j];
        } else if (std::isfinite(hi_[j])) {
            vstat_[j] = VStat::AtUpper;
            xval_[j] = hi_[j];
        } else {
            vstat_[j] = VStat::Free;
            xval_[j] = 0.0;
        }
    } else if (vstat_[j] == VStat::AtUpper) {
        if (std::isfinite(hi_[j])) {
            xval_[j] = hi_[j];
        } else if (std::isfinite(lo_[j])) {
            vstat_[j] = VStat::AtLower;
            xval_[j] = lo_[j];
        } else {
            vstat_[j] = VStat::Free;
            xval_[j] = 0.0;
        }
    }
    basics_valid_ = false;
}

double Simplex::col_lb(int j) const {
    return std::isfinite(lo_[j]) ? lo_[j] * cscale_[j] : lo_[j];
}
double Simplex::col_ub(int j) const {
    return std::isfinite(hi_[j]) ? hi_[j] * cscale_[j] : hi_[j];
}

double Simplex::objective() const {
    double z = obj_offset_;
    for (int j = 0; j < n_; ++j) {
        const double xv = vstat_[j] == VStat::Basic ? xb_[pos_of_[j]] : xval_[j];
        z += cost_[j] * xv;
    }
    return z;
}

std::vector<double> Simplex::primal_values() const {
    std::vector<double> x(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
        const double xv = vstat_[j] == VStat::Basic ? xb_[pos_of_[j]] : xval_[j];
        x[j] = xv * cscale_[j];
    }
    return x;
}

std::vector<double> Simplex::row_duals() const {
    std::vector<double> y, d;
    compute_duals(false, y, d);
    std::vector<double> out(m_);
    for (int i = 0; i < m_; ++i) out[i] = y[i] * rscale_[i];
    return out;
}

std::vector<double> Simplex::reduced_costs() const {
    std::vector<double> y, d;
    compute_duals(false, y, d);
    std::vector<double> out(n_);
    for (int j = 0; j < n_; ++j) out[j] = d[j] / cscale_[j];
    return out;
}

}  // namespace rsched::opt
