#include "rass/detail/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rass/errors.hpp"

namespace rass::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotEps = 1e-7;
constexpr double kRatioTie = 1e-9;
constexpr int kRefactorEvery = 60;
constexpr int kStallLimit = 60;

enum State : signed char { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFreeNonbasic = 3 };

class Simplex {
public:
    Simplex(const LpForm& form, const std::vector<double>& lower, const std::vector<double>& upper,
            double feas_tol)
        : form_(form), m_(form.nrows), n_(form.ncols + form.nrows), ftol_(feas_tol) {
        lo_.assign(lower.begin(), lower.end());
        hi_.assign(upper.begin(), upper.end());
        lo_.resize(static_cast<std::size_t>(n_), 0.0); // artificial slots, fixed unless used
        hi_.resize(static_cast<std::size_t>(n_), 0.0);
    }

    LpOutcome run() {
        for (int j = 0; j < form_.ncols; ++j)
            if (lo_[j] > hi_[j] + ftol_)
                return {LpStatus::Infeasible, {}, 0.0, 0};

        init_state();
        if (!phase_one())
            return {LpStatus::Infeasible, {}, 0.0, iters_};

        std::vector<double> cost(static_cast<std::size_t>(n_), 0.0);
        std::copy(form_.cost.begin(), form_.cost.end(), cost.begin());
        if (run_primal(cost) == RunResult::Unbounded)
            return {LpStatus::Unbounded, {}, 0.0, iters_};

        refactorize();
        compute_basic_values();
        LpOutcome out;
        out.status = LpStatus::Optimal;
        out.iterations = iters_;
        out.x.resize(static_cast<std::size_t>(form_.ncols));
        std::vector<int> row_of(static_cast<std::size_t>(n_), -1);
        for (int r = 0; r < m_; ++r)
            row_of[basis_[r]] = r;
        for (int j = 0; j < form_.ncols; ++j)
            out.x[j] = state_[j] == kBasic ? xb_[row_of[j]] : xn_[j];
        out.objective = 0.0;
        for (int j = 0; j < form_.nstruct; ++j)
            out.objective += form_.cost[j] * out.x[j];
        return out;
    }

private:
    enum class RunResult { Optimal, Unbounded };

    const LpForm& form_;
    int m_, n_;
    double ftol_;
    std::vector<double> lo_, hi_;
    std::vector<int> basis_;          // row -> column
    std::vector<signed char> state_;  // per column
    std::vector<double> xn_;          // nonbasic value per column
    std::vector<double> xb_;          // basic value per row
    std::vector<double> binv_;        // m x m, column-major: binv_[i*m_ + r] = (B^-1)[r][i]
    std::vector<double> work_w_, work_y_, work_cb_;
    long iters_ = 0;
    int pivots_since_refactor_ = 0;
    int stall_ = 0;
    bool bland_ = false;

    template <class Fn> void for_entries(int j, Fn&& fn) const {
        if (j < form_.ncols) {
            for (const auto& [row, val] : form_.cols[j])
                fn(row, val);
        } else {
            fn(j - form_.ncols, 1.0);
        }
    }

    // w = B^-1 a_j
    void ftran(int j, std::vector<double>& w) const {
        std::fill(w.begin(), w.end(), 0.0);
        for_entries(j, [&](int row, double val) {
            const double* col = binv_.data() + static_cast<std::size_t>(row) * m_;
            for (int r = 0; r < m_; ++r)
                w[r] += col[r] * val;
        });
    }

    // y_i = sum_r d_r (B^-1)[r][i]
    void btran(const std::vector<double>& d, std::vector<double>& y) const {
        for (int i = 0; i < m_; ++i) {
            const double* col = binv_.data() + static_cast<std::size_t>(i) * m_;
            double acc = 0.0;
            for (int r = 0; r < m_; ++r)
                acc += d[r] * col[r];
            y[i] = acc;
        }
    }

    double dot_column(const std::vector<double>& y, int j) const {
        double acc = 0.0;
        for_entries(j, [&](int row, double val) { acc += y[row] * val; });
        return acc;
    }

    void init_state() {
        basis_.assign(static_cast<std::size_t>(m_), -1);
        state_.assign(static_cast<std::size_t>(n_), kAtLower);
        xn_.assign(static_cast<std::size_t>(n_), 0.0);
        xb_.assign(static_cast<std::size_t>(m_), 0.0);
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i)
            binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
        work_w_.resize(static_cast<std::size_t>(m_));
        work_y_.resize(static_cast<std::size_t>(m_));
        work_cb_.resize(static_cast<std::size_t>(m_));

        for (int j = 0; j < form_.nstruct; ++j) {
            if (lo_[j] > -kInf) {
                state_[j] = kAtLower;
                xn_[j] = lo_[j];
            } else if (hi_[j] < kInf) {
                state_[j] = kAtUpper;
                xn_[j] = hi_[j];
            } else {
                state_[j] = kFreeNonbasic;
                xn_[j] = 0.0;
            }
        }
    }

    // Slack basis where the slack value fits its bounds; otherwise the slack
    // parks at the nearest bound and a signed artificial absorbs the gap.
    // Phase 1 is then an ordinary LP that drives the artificials to zero.
    bool phase_one() {
        std::vector<double> residual(form_.rhs);
        for (int j = 0; j < form_.nstruct; ++j) {
            if (xn_[j] != 0.0) {
                const double v = xn_[j];
                for_entries(j, [&](int row, double val) { residual[row] -= val * v; });
            }
        }

        std::vector<double> cost(static_cast<std::size_t>(n_), 0.0);
        bool need_phase_one = false;
        for (int i = 0; i < m_; ++i) {
            const int slack = form_.nstruct + i;
            const int artificial = form_.ncols + i;
            if (residual[i] >= lo_[slack] - ftol_ && residual[i] <= hi_[slack] + ftol_) {
                basis_[i] = slack;
                state_[slack] = kBasic;
                xb_[i] = residual[i];
            } else {
                const double parked = residual[i] < lo_[slack] ? lo_[slack] : hi_[slack];
                state_[slack] = residual[i] < lo_[slack] ? kAtLower : kAtUpper;
                xn_[slack] = parked;
                const double gap = residual[i] - parked;
                basis_[i] = artificial;
                state_[artificial] = kBasic;
                xb_[i] = gap;
                if (gap > 0.0) {
                    lo_[artificial] = 0.0;
                    hi_[artificial] = kInf;
                    cost[artificial] = 1.0;
                } else {
                    lo_[artificial] = -kInf;
                    hi_[artificial] = 0.0;
                    cost[artificial] = -1.0;
                }
                need_phase_one = true;
            }
        }
        if (!need_phase_one)
            return true;

        if (run_primal(cost) == RunResult::Unbounded)
            throw SolverError("phase-1 LP reported unbounded");

        double infeasibility = 0.0;
        for (int r = 0; r < m_; ++r)
            if (basis_[r] >= form_.ncols)
                infeasibility += std::abs(xb_[r]);
        if (infeasibility > ftol_ * 10.0 * (1.0 + max_abs_rhs()))
            return false;

        // pivot leftover artificials out where a usable column exists; truly
        // redundant rows keep an inert artificial fixed at zero
        for (int r = 0; r < m_; ++r) {
            if (basis_[r] < form_.ncols)
                continue;
            int replacement = -1;
            for (int j = 0; j < form_.ncols && replacement < 0; ++j) {
                if (state_[j] == kBasic || lo_[j] >= hi_[j])
                    continue;
                ftran(j, work_w_);
                if (std::abs(work_w_[r]) > 1e-7)
                    replacement = j;
            }
            if (replacement >= 0) {
                ftran(replacement, work_w_);
                const int artificial = basis_[r];
                basis_[r] = replacement;
                state_[replacement] = kBasic;
                const double entering_value = xn_[replacement];
                state_[artificial] = kAtLower;
                xn_[artificial] = 0.0;
                lo_[artificial] = hi_[artificial] = 0.0;
                update_inverse(r, work_w_);
                xb_[r] = entering_value;
                ++pivots_since_refactor_;
                maybe_refactorize();
            } else {
                const int artificial = basis_[r];
                lo_[artificial] = hi_[artificial] = 0.0;
                xb_[r] = 0.0;
            }
        }
        for (int i = 0; i < m_; ++i) {
            const int artificial = form_.ncols + i;
            if (state_[artificial] != kBasic)
                lo_[artificial] = hi_[artificial] = 0.0;
        }
        return true;
    }

    RunResult run_primal(const std::vector<double>& cost) {
        double max_cost = 0.0;
        for (int j = 0; j < n_; ++j)
            max_cost = std::max(max_cost, std::abs(cost[j]));
        const double dtol = 1e-9 * (1.0 + max_cost);
        const long iter_cap = 50'000 + 200L * (m_ + n_);
        bland_ = false;
        stall_ = 0;
        if (pivots_since_refactor_ > 0) {
            refactorize();
            compute_basic_values();
        }

        while (true) {
            if (++iters_ > iter_cap)
                throw SolverError("simplex iteration limit exceeded");

            for (int r = 0; r < m_; ++r)
                work_cb_[r] = cost[basis_[r]];
            btran(work_cb_, work_y_);

            int enter = -1, dir = 0;
            double best_score = dtol;
            for (int j = 0; j < n_; ++j) {
                if (state_[j] == kBasic || lo_[j] >= hi_[j])
                    continue;
                const double d = cost[j] - dot_column(work_y_, j);
                int cand_dir = 0;
                if ((state_[j] == kAtLower || state_[j] == kFreeNonbasic) && d < -best_score)
                    cand_dir = 1;
                else if ((state_[j] == kAtUpper || state_[j] == kFreeNonbasic) && d > best_score)
                    cand_dir = -1;
                if (cand_dir != 0) {
                    enter = j;
                    dir = cand_dir;
                    if (bland_)
                        break;
                    best_score = std::abs(d);
                }
            }
            if (enter < 0)
                return RunResult::Optimal;

            ftran(enter, work_w_);

            // two-pass ratio test: find the tightest blocking bound, then
            // pick the numerically strongest pivot inside the tie window
            const bool can_flip = lo_[enter] > -kInf && hi_[enter] < kInf;
            const double flip_step = can_flip ? hi_[enter] - lo_[enter] : kInf;
            double min_ratio = kInf;
            for (int r = 0; r < m_; ++r) {
                const double delta = -static_cast<double>(dir) * work_w_[r];
                if (std::abs(delta) <= kPivotEps)
                    continue;
                const int bcol = basis_[r];
                double ratio;
                if (delta > 0.0) {
                    if (hi_[bcol] >= kInf)
                        continue;
                    ratio = (hi_[bcol] - xb_[r]) / delta;
                } else {
                    if (lo_[bcol] <= -kInf)
                        continue;
                    ratio = (lo_[bcol] - xb_[r]) / delta;
                }
                min_ratio = std::min(min_ratio, std::max(ratio, 0.0));
            }
            if (min_ratio >= kInf && flip_step >= kInf)
                return RunResult::Unbounded;

            int leave_row = -1;
            signed char leave_state = kAtLower;
            double step = flip_step;
            if (min_ratio <= flip_step) {
                double best_pivot = 0.0;
                for (int r = 0; r < m_; ++r) {
                    const double delta = -static_cast<double>(dir) * work_w_[r];
                    if (std::abs(delta) <= kPivotEps)
                        continue;
                    const int bcol = basis_[r];
                    double ratio;
                    signed char hit;
                    if (delta > 0.0) {
                        if (hi_[bcol] >= kInf)
                            continue;
                        ratio = (hi_[bcol] - xb_[r]) / delta;
                        hit = kAtUpper;
                    } else {
                        if (lo_[bcol] <= -kInf)
                            continue;
                        ratio = (lo_[bcol] - xb_[r]) / delta;
                        hit = kAtLower;
                    }
                    if (std::max(ratio, 0.0) > min_ratio + kRatioTie)
                        continue;
                    const bool take =
                        leave_row < 0 ||
                        (bland_ ? bcol < basis_[leave_row]
                                : std::abs(work_w_[r]) > std::abs(best_pivot));
                    if (take) {
                        leave_row = r;
                        leave_state = hit;
                        best_pivot = work_w_[r];
                    }
                }
                step = min_ratio;
            }

            if (leave_row < 0) {
                // bound flip: entering travels to its opposite bound
                apply_basic_step(dir, step);
                if (state_[enter] == kAtLower) {
                    state_[enter] = kAtUpper;
                    xn_[enter] = hi_[enter];
                } else {
                    state_[enter] = kAtLower;
                    xn_[enter] = lo_[enter];
                }
            } else {
                apply_basic_step(dir, step);
                const int leaving = basis_[leave_row];
                const double entering_value =
                    (state_[enter] == kFreeNonbasic ? 0.0 : xn_[enter]) +
                    static_cast<double>(dir) * step;
                state_[leaving] = leave_state;
                xn_[leaving] = leave_state == kAtLower ? lo_[leaving] : hi_[leaving];
                basis_[leave_row] = enter;
                state_[enter] = kBasic;
                update_inverse(leave_row, work_w_);
                xb_[leave_row] = entering_value;
                ++pivots_since_refactor_;
                maybe_refactorize();
            }

            if (step <= 1e-11) {
                if (++stall_ > kStallLimit)
                    bland_ = true;
            } else {
                stall_ = 0;
            }
        }
    }

    void apply_basic_step(int dir, double step) {
        if (step == 0.0)
            return;
        for (int r = 0; r < m_; ++r)
            xb_[r] -= static_cast<double>(dir) * work_w_[r] * step;
    }

    // rank-1 update of the explicit inverse after the pivot (w, leave_row)
    void update_inverse(int leave_row, const std::vector<double>& w) {
        const double pivot = w[leave_row];
        for (int i = 0; i < m_; ++i) {
            double* col = binv_.data() + static_cast<std::size_t>(i) * m_;
            const double scaled = col[leave_row] / pivot;
            if (scaled == 0.0)
                continue;
            for (int r = 0; r < m_; ++r)
                col[r] -= w[r] * scaled;
            col[leave_row] = scaled;
        }
    }

    void maybe_refactorize() {
        if (pivots_since_refactor_ < kRefactorEvery)
            return;
        refactorize();
        compute_basic_values();
    }

    // rebuild the inverse from scratch: Gauss-Jordan with partial pivoting
    void refactorize() {
        pivots_since_refactor_ = 0;
        if (m_ == 0)
            return;
        std::vector<double> mat(static_cast<std::size_t>(m_) * m_, 0.0); // row-major basis matrix
        for (int c = 0; c < m_; ++c)
            for_entries(basis_[c], [&](int row, double val) {
                mat[static_cast<std::size_t>(row) * m_ + c] += val;
            });
        std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i)
            inv[static_cast<std::size_t>(i) * m_ + i] = 1.0;

        std::vector<double> col_scale(static_cast<std::size_t>(m_), 0.0);
        for (int c = 0; c < m_; ++c)
            for (int r = 0; r < m_; ++r)
                col_scale[c] =
                    std::max(col_scale[c], std::abs(mat[static_cast<std::size_t>(r) * m_ + c]));

        for (int k = 0; k < m_; ++k) {
            int pivot_row = k;
            double best = std::abs(mat[static_cast<std::size_t>(k) * m_ + k]);
            for (int r = k + 1; r < m_; ++r) {
                const double v = std::abs(mat[static_cast<std::size_t>(r) * m_ + k]);
                if (v > best) {
                    best = v;
                    pivot_row = r;
                }
            }
            if (best < 1e-11 * std::max(1.0, col_scale[k]))
                throw SolverError("singular basis during refactorization");
            if (pivot_row != k) {
                for (int c = 0; c < m_; ++c) {
                    std::swap(mat[static_cast<std::size_t>(k) * m_ + c],
                              mat[static_cast<std::size_t>(pivot_row) * m_ + c]);
                    std::swap(inv[static_cast<std::size_t>(k) * m_ + c],
                              inv[static_cast<std::size_t>(pivot_row) * m_ + c]);
                }
            }
            const double pivot = mat[static_cast<std::size_t>(k) * m_ + k];
            for (int c = 0; c < m_; ++c) {
                mat[static_cast<std::size_t>(k) * m_ + c] /= pivot;
                inv[static_cast<std::size_t>(k) * m_ + c] /= pivot;
            }
            for (int r = 0; r < m_; ++r) {
                if (r == k)
                    continue;
                const double factor = mat[static_cast<std::size_t>(r) * m_ + k];
                if (factor == 0.0)
                    continue;
                for (int c = 0; c < m_; ++c) {
                    mat[static_cast<std::size_t>(r) * m_ + c] -=
                        factor * mat[static_cast<std::size_t>(k) * m_ + c];
                    inv[static_cast<std::size_t>(r) * m_ + c] -=
                        factor * inv[static_cast<std::size_t>(k) * m_ + c];
                }
            }
        }
        // store column-major
        for (int r = 0; r < m_; ++r)
            for (int i = 0; i < m_; ++i)
                binv_[static_cast<std::size_t>(i) * m_ + r] = inv[static_cast<std::size_t>(r) * m_ + i];
    }

    void compute_basic_values() {
        std::vector<double> residual(form_.rhs);
        for (int j = 0; j < n_; ++j) {
            if (state_[j] == kBasic || xn_[j] == 0.0)
                continue;
            const double v = xn_[j];
            for_entries(j, [&](int row, double val) { residual[row] -= val * v; });
        }
        std::fill(xb_.begin(), xb_.end(), 0.0);
        for (int i = 0; i < m_; ++i) {
            const double t = residual[i];
            if (t == 0.0)
                continue;
            const double* col = binv_.data() + static_cast<std::size_t>(i) * m_;
            for (int r = 0; r < m_; ++r)
                xb_[r] += col[r] * t;
        }
    }

    double max_abs_rhs() const {
        double v = 0.0;
        for (double b : form_.rhs)
            v = std::max(v, std::abs(b));
        return v;
    }
};

} // namespace

LpForm standardize(const MilpInstance& instance) {
    LpForm form;
    form.nrows = instance.num_rows();
    form.nstruct = instance.num_cols();
    form.ncols = form.nstruct + form.nrows;
    form.cols.resize(static_cast<std::size_t>(form.ncols));
    form.lower.resize(static_cast<std::size_t>(form.ncols));
    form.upper.resize(static_cast<std::size_t>(form.ncols));
    form.cost.assign(static_cast<std::size_t>(form.ncols), 0.0);
    form.rhs.resize(static_cast<std::size_t>(form.nrows));

    for (int j = 0; j < form.nstruct; ++j) {
        form.lower[j] = instance.cols[j].lower;
        form.upper[j] = instance.cols[j].upper;
        form.cost[j] = instance.cols[j].objective;
    }
    for (int i = 0; i < form.nrows; ++i) {
        const Row& row = instance.rows[i];
        for (const auto& [col, val] : row.coeffs) {
            if (col < 0 || col >= form.nstruct)
                throw std::invalid_argument("standardize: row references unknown column");
            form.cols[col].push_back({i, val});
        }
        const int slack = form.nstruct + i;
        form.cols[slack].push_back({i, 1.0});
        form.rhs[i] = row.rhs;
        switch (row.sense) {
        case RowSense::LessEqual:
            form.lower[slack] = 0.0;
            form.upper[slack] = std::numeric_limits<double>::infinity();
            break;
        case RowSense::Equal:
            form.lower[slack] = 0.0;
            form.upper[slack] = 0.0;
            break;
        case RowSense::GreaterEqual:
            form.lower[slack] = -std::numeric_limits<double>::infinity();
            form.upper[slack] = 0.0;
            break;
        }
    }
    return form;
}

LpOutcome solve_bounded_lp(const LpForm& form, const std::vector<double>& lower,
                           const std::vector<double>& upper, double feas_tol) {
    Simplex simplex(form, lower, upper, feas_tol);
    return simplex.run();
}

} // namespace rass::detail
