#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "oblivkand/rational.hpp"

namespace oblivkand {

/// Minimization LP over nonnegative variables with equality and <= rows.
struct LPRow {
    std::vector<std::pair<int, double>> coeffs;  // (variable index, coefficient)
    double rhs = 0;
};

struct StandardFormLP {
    int num_vars = 0;
    std::vector<double> objective;
    std::vector<LPRow> eq_rows;
    std::vector<LPRow> le_rows;

    explicit StandardFormLP(int vars = 0) : num_vars(vars), objective(static_cast<size_t>(vars), 0.0) {}

    void set_objective(int j, double c) { objective[static_cast<size_t>(j)] = c; }

    LPRow& add_eq(double rhs) {
        eq_rows.push_back({{}, rhs});
        return eq_rows.back();
    }
    LPRow& add_le(double rhs) {
        le_rows.push_back({{}, rhs});
        return le_rows.back();
    }
    // dense-row convenience for tests and small models
    void add_eq_dense(const std::vector<double>& row, double rhs) {
        LPRow& r = add_eq(rhs);
        for (int j = 0; j < num_vars; ++j)
            if (row[static_cast<size_t>(j)] != 0) r.coeffs.push_back({j, row[static_cast<size_t>(j)]});
    }
    void add_le_dense(const std::vector<double>& row, double rhs) {
        LPRow& r = add_le(rhs);
        for (int j = 0; j < num_vars; ++j)
            if (row[static_cast<size_t>(j)] != 0) r.coeffs.push_back({j, row[static_cast<size_t>(j)]});
    }
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LPStatus s) {
    switch (s) {
        case LPStatus::Optimal: return "optimal";
        case LPStatus::Infeasible: return "infeasible";
        case LPStatus::Unbounded: return "unbounded";
    }
    return "?";
}

struct LPResult {
    LPStatus status = LPStatus::Optimal;
    double value = 0;
    std::vector<double> solution;  // structural variables, when Optimal
    long iterations = 0;
};

struct SolveOptions {
    double tol = 1e-9;
    int bland_threshold = 50;  // consecutive degenerate pivots before Bland's rule engages
    long max_iterations = 0;   // 0 = automatic
    // Degenerate models (zero right-hand sides) stall the plain simplex.
    // When set, inequality rhs values get a tiny deterministic positive
    // offset during the solve; the returned basis is then re-evaluated at
    // the exact rhs, so the reported solution and value carry no
    // perturbation error. Falls back to an unperturbed solve if the basis
    // does not survive the restoration.
    bool perturb = true;
};

namespace detail {

/// Revised simplex with a dense explicit basis inverse. Geared to the
/// factor-revealing primal (a handful of rows, very many sparse columns);
/// also handles the row-heavy dual since those solves stay short.
class SimplexSolver {
public:
    SimplexSolver(const StandardFormLP& lp, SolveOptions opt) : lp_(lp), opt_(opt) {
        m_ = static_cast<int>(lp.eq_rows.size() + lp.le_rows.size());
        n_struct_ = lp.num_vars;
        n_slack_ = static_cast<int>(lp.le_rows.size());
        build_columns();
    }

    LPResult run() {
        LPResult res;
        if (m_ == 0) {
            // unconstrained: x = 0 optimal unless some cost is negative
            for (int j = 0; j < n_struct_; ++j)
                if (lp_.objective[static_cast<size_t>(j)] < -opt_.tol) {
                    res.status = LPStatus::Unbounded;
                    return res;
                }
            res.solution.assign(static_cast<size_t>(n_struct_), 0.0);
            return res;
        }
        init_basis();
        bool perturbed = false;
        std::vector<double> true_rhs;
        if (opt_.perturb) {
            // relax (never tighten) inequality rows by tiny distinct amounts:
            // sign-flipped rows are skipped, so an infeasible verdict on the
            // perturbed model is still valid for the original
            true_rhs = rhs_;
            uint64_t h = 0x9e3779b97f4a7c15ULL;
            for (int r = num_eq(); r < m_; ++r) {
                h = (h ^ static_cast<uint64_t>(r)) * 0xbf58476d1ce4e5b9ULL;
                h ^= h >> 29;
                if (row_sign_[static_cast<size_t>(r)] < 0) continue;
                double u = static_cast<double>(h >> 11) * 0x1.0p-53;
                rhs_[static_cast<size_t>(r)] += 1e-8 * (1.0 + u);
                perturbed = true;
            }
            xb_ = rhs_;
        }
        if (have_artificials_) {
            phase_ = 1;
            LPStatus s = iterate();
            if (s != LPStatus::Optimal) throw SolverError("phase 1 did not terminate cleanly");
            double art_sum = 0;
            for (int i = 0; i < m_; ++i)
                if (basis_[static_cast<size_t>(i)] >= art_base_) art_sum += xb_[static_cast<size_t>(i)];
            if (art_sum > std::max(opt_.tol, 1e-7)) {
                res.status = LPStatus::Infeasible;
                res.iterations = iterations_;
                return res;
            }
            expel_artificials();
        }
        phase_ = 2;
        LPStatus s = iterate();
        res.status = s;
        res.iterations = iterations_;
        if (s != LPStatus::Optimal) return res;

        if (perturbed) {
            // restore the exact rhs under the final basis; reduced costs are
            // rhs-independent, so the basis stays optimal if still feasible
            rhs_ = true_rhs;
            refactorize();
            double worst = 0;
            for (int i = 0; i < m_; ++i) worst = std::min(worst, xb_[static_cast<size_t>(i)]);
            if (worst < -1e-9) {
                SolveOptions retry = opt_;
                retry.perturb = false;
                SimplexSolver fallback(lp_, retry);
                return fallback.run();
            }
        }

        res.solution.assign(static_cast<size_t>(n_struct_), 0.0);
        for (int i = 0; i < m_; ++i) {
            int j = basis_[static_cast<size_t>(i)];
            if (j < n_struct_) res.solution[static_cast<size_t>(j)] = std::max(0.0, xb_[static_cast<size_t>(i)]);
        }
        double v = 0;
        for (int j = 0; j < n_struct_; ++j)
            v += lp_.objective[static_cast<size_t>(j)] * res.solution[static_cast<size_t>(j)];
        res.value = v;
        return res;
    }

private:
    // column index layout: [0, n_struct) structural, [n_struct, n_struct+n_slack)
    // slacks, [art_base_, ...) artificials
    const StandardFormLP& lp_;
    SolveOptions opt_;
    int m_ = 0, n_struct_ = 0, n_slack_ = 0, n_total_ = 0, art_base_ = 0;
    bool have_artificials_ = false;
    int phase_ = 2;
    long iterations_ = 0;

    std::vector<int> col_start_;  // CSC over structural columns
    std::vector<int> col_row_;
    std::vector<double> col_val_;
    std::vector<double> rhs_;        // all rows, sign-normalized to rhs >= 0
    std::vector<double> row_sign_;   // +1 or -1 applied to original row
    std::vector<int> slack_row_;     // slack j sits in row slack_row_[j]
    std::vector<int> art_row_;

    std::vector<int> basis_;      // size m_: column index basic in each row
    std::vector<char> in_basis_;  // size n_total_
    std::vector<double> binv_;    // row-major m_ x m_
    std::vector<double> xb_;      // basic variable values

    std::vector<double> cost_;  // phase-2 cost per column
    std::vector<double> y_;     // simplex multipliers
    std::vector<double> w_;     // FTRAN result

    void build_columns() {
        std::vector<std::vector<std::pair<int, double>>> cols(static_cast<size_t>(n_struct_));
        rhs_.resize(static_cast<size_t>(m_));
        row_sign_.assign(static_cast<size_t>(m_), 1.0);
        int r = 0;
        auto add_rows = [&](const std::vector<LPRow>& rows) {
            for (const LPRow& row : rows) {
                double sign = row.rhs < 0 ? -1.0 : 1.0;
                row_sign_[static_cast<size_t>(r)] = sign;
                rhs_[static_cast<size_t>(r)] = sign * row.rhs;
                for (auto [j, v] : row.coeffs) {
                    if (j < 0 || j >= n_struct_) throw SolverError("row coefficient index out of range");
                    if (v != 0) cols[static_cast<size_t>(j)].push_back({r, sign * v});
                }
                ++r;
            }
        };
        add_rows(lp_.eq_rows);
        add_rows(lp_.le_rows);
        col_start_.assign(static_cast<size_t>(n_struct_) + 1, 0);
        size_t nnz = 0;
        for (int j = 0; j < n_struct_; ++j) {
            col_start_[static_cast<size_t>(j)] = static_cast<int>(nnz);
            nnz += cols[static_cast<size_t>(j)].size();
        }
        col_start_[static_cast<size_t>(n_struct_)] = static_cast<int>(nnz);
        col_row_.resize(nnz);
        col_val_.resize(nnz);
        size_t pos = 0;
        for (int j = 0; j < n_struct_; ++j) {
            // merge duplicate row entries within a column
            auto& entries = cols[static_cast<size_t>(j)];
            std::sort(entries.begin(), entries.end());
            size_t start = pos;
            for (auto [row, v] : entries) {
                if (pos > start && col_row_[pos - 1] == row) {
                    col_val_[pos - 1] += v;
                } else {
                    col_row_[pos] = row;
                    col_val_[pos] = v;
                    ++pos;
                }
            }
            col_start_[static_cast<size_t>(j) + 1] = static_cast<int>(pos);
        }
        col_row_.resize(pos);
        col_val_.resize(pos);
    }

    int num_eq() const { return static_cast<int>(lp_.eq_rows.size()); }

    void init_basis() {
        // slack j (0-based among le rows) lives at row num_eq()+j with
        // coefficient row_sign of that row; usable as initial basic only if +1
        slack_row_.resize(static_cast<size_t>(n_slack_));
        for (int j = 0; j < n_slack_; ++j) slack_row_[static_cast<size_t>(j)] = num_eq() + j;

        std::vector<int> art_rows;
        for (int r = 0; r < m_; ++r) {
            bool eq = r < num_eq();
            bool flipped = row_sign_[static_cast<size_t>(r)] < 0;
            if (eq || flipped) art_rows.push_back(r);
        }
        have_artificials_ = !art_rows.empty();
        art_base_ = n_struct_ + n_slack_;
        n_total_ = art_base_ + static_cast<int>(art_rows.size());
        art_row_ = art_rows;

        basis_.assign(static_cast<size_t>(m_), -1);
        in_basis_.assign(static_cast<size_t>(n_total_), 0);
        for (int j = 0; j < n_slack_; ++j) {
            int r = slack_row_[static_cast<size_t>(j)];
            if (row_sign_[static_cast<size_t>(r)] > 0) {
                basis_[static_cast<size_t>(r)] = n_struct_ + j;
                in_basis_[static_cast<size_t>(n_struct_ + j)] = 1;
            }
        }
        for (size_t a = 0; a < art_rows.size(); ++a) {
            int r = art_rows[a];
            basis_[static_cast<size_t>(r)] = art_base_ + static_cast<int>(a);
            in_basis_[static_cast<size_t>(art_base_ + static_cast<int>(a))] = 1;
        }
        for (int r = 0; r < m_; ++r)
            if (basis_[static_cast<size_t>(r)] < 0) throw SolverError("internal: uncovered row at start");

        binv_.assign(static_cast<size_t>(m_) * static_cast<size_t>(m_), 0.0);
        for (int i = 0; i < m_; ++i) binv_[static_cast<size_t>(i) * m_ + i] = 1.0;
        xb_ = rhs_;

        cost_.assign(static_cast<size_t>(n_total_), 0.0);
        for (int j = 0; j < n_struct_; ++j) cost_[static_cast<size_t>(j)] = lp_.objective[static_cast<size_t>(j)];
        y_.resize(static_cast<size_t>(m_));
        w_.resize(static_cast<size_t>(m_));
    }

    double column_cost(int j) const {
        if (phase_ == 1) return j >= art_base_ ? 1.0 : 0.0;
        return j < static_cast<int>(cost_.size()) && j < art_base_ ? cost_[static_cast<size_t>(j)] : 0.0;
    }

    // w = Binv * A_j for any column index
    void ftran(int j) {
        if (j < n_struct_) {
            int t0 = col_start_[static_cast<size_t>(j)], t1 = col_start_[static_cast<size_t>(j) + 1];
            for (int i = 0; i < m_; ++i) {
                const double* row = &binv_[static_cast<size_t>(i) * m_];
                double s = 0;
                for (int t = t0; t < t1; ++t)
                    s += row[col_row_[static_cast<size_t>(t)]] * col_val_[static_cast<size_t>(t)];
                w_[static_cast<size_t>(i)] = s;
            }
        } else if (j < art_base_) {
            int r = slack_row_[static_cast<size_t>(j - n_struct_)];
            double v = row_sign_[static_cast<size_t>(r)];
            for (int i = 0; i < m_; ++i) w_[static_cast<size_t>(i)] = binv_[static_cast<size_t>(i) * m_ + r] * v;
        } else {
            int r = art_row_[static_cast<size_t>(j - art_base_)];
            for (int i = 0; i < m_; ++i) w_[static_cast<size_t>(i)] = binv_[static_cast<size_t>(i) * m_ + r];
        }
    }

    void compute_multipliers() {
        // y = c_B^T * Binv
        std::fill(y_.begin(), y_.end(), 0.0);
        for (int i = 0; i < m_; ++i) {
            double cb = column_cost(basis_[static_cast<size_t>(i)]);
            if (cb == 0) continue;
            const double* row = &binv_[static_cast<size_t>(i) * m_];
            for (int r = 0; r < m_; ++r) y_[static_cast<size_t>(r)] += cb * row[r];
        }
    }

    double reduced_cost(int j) const {
        double d = column_cost(j);
        if (j < n_struct_) {
            for (int t = col_start_[static_cast<size_t>(j)]; t < col_start_[static_cast<size_t>(j) + 1]; ++t)
                d -= y_[static_cast<size_t>(col_row_[static_cast<size_t>(t)])] * col_val_[static_cast<size_t>(t)];
        } else if (j < art_base_) {
            int r = slack_row_[static_cast<size_t>(j - n_struct_)];
            d -= y_[static_cast<size_t>(r)] * row_sign_[static_cast<size_t>(r)];
        } else {
            d -= y_[static_cast<size_t>(art_row_[static_cast<size_t>(j - art_base_)])];
        }
        return d;
    }

    bool column_allowed(int j) const {
        if (in_basis_[static_cast<size_t>(j)]) return false;
        if (j >= art_base_) return false;  // artificials never re-enter
        return true;
    }

    LPStatus iterate() {
        long limit = opt_.max_iterations > 0
                         ? opt_.max_iterations
                         : 200000 + 200L * m_;
        int degenerate_streak = 0;
        bool bland = false;
        int enter_limit = phase_ == 1 ? n_total_ : art_base_;
        long refactor_every = m_ <= 2000 ? 128 : 4096;
        long since_refactor = 0;

        for (;;) {
            if (++iterations_ > limit)
                throw SolverError("simplex iteration limit exceeded (" + std::to_string(limit) + ")");
            compute_multipliers();
            int entering = -1;
            double best = -opt_.tol;
            for (int j = 0; j < enter_limit; ++j) {
                if (!column_allowed(j)) continue;
                double d = reduced_cost(j);
                if (bland) {
                    if (d < -opt_.tol) { entering = j; break; }
                } else if (d < best) {
                    best = d;
                    entering = j;
                }
            }
            if (entering < 0) return LPStatus::Optimal;

            ftran(entering);
            int leave = -1;
            double theta = std::numeric_limits<double>::infinity();
            const double pivot_tol = 1e-10;
            const double tie_tol = 1e-12;
            for (int i = 0; i < m_; ++i) {
                double wi = w_[static_cast<size_t>(i)];
                if (wi <= pivot_tol) continue;
                double ratio = std::max(0.0, xb_[static_cast<size_t>(i)]) / wi;
                if (leave < 0 || ratio < theta - tie_tol) {
                    leave = i;
                    theta = ratio;
                } else if (ratio <= theta + tie_tol) {
                    bool take;
                    if (bland) {
                        take = basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leave)];
                    } else {
                        // prefer kicking artificials, then the stablest pivot
                        bool cand_art = basis_[static_cast<size_t>(i)] >= art_base_;
                        bool cur_art = basis_[static_cast<size_t>(leave)] >= art_base_;
                        take = cand_art != cur_art ? cand_art : wi > w_[static_cast<size_t>(leave)];
                    }
                    if (take) {
                        leave = i;
                        theta = std::min(theta, ratio);
                    }
                }
            }
            if (leave < 0) {
                if (phase_ == 1) throw SolverError("phase 1 unbounded: numerical failure");
                return LPStatus::Unbounded;
            }

            pivot(entering, leave, theta);
            if (++since_refactor >= refactor_every) {
                refactorize();
                since_refactor = 0;
            }

            if (theta <= 1e-12) {
                if (++degenerate_streak >= opt_.bland_threshold) bland = true;
            } else {
                degenerate_streak = 0;
                bland = false;
            }
        }
    }

    void pivot(int entering, int leave, double theta) {
        double piv = w_[static_cast<size_t>(leave)];
        for (int i = 0; i < m_; ++i) {
            if (i == leave) continue;
            xb_[static_cast<size_t>(i)] -= theta * w_[static_cast<size_t>(i)];
            if (xb_[static_cast<size_t>(i)] < 0 && xb_[static_cast<size_t>(i)] > -1e-12)
                xb_[static_cast<size_t>(i)] = 0;
        }
        xb_[static_cast<size_t>(leave)] = theta;

        double* prow = &binv_[static_cast<size_t>(leave) * m_];
        double inv = 1.0 / piv;
        for (int r = 0; r < m_; ++r) prow[r] *= inv;
        for (int i = 0; i < m_; ++i) {
            if (i == leave) continue;
            double f = w_[static_cast<size_t>(i)];
            if (f == 0) continue;
            double* row = &binv_[static_cast<size_t>(i) * m_];
            for (int r = 0; r < m_; ++r) row[r] -= f * prow[r];
        }
        in_basis_[static_cast<size_t>(basis_[static_cast<size_t>(leave)])] = 0;
        in_basis_[static_cast<size_t>(entering)] = 1;
        basis_[static_cast<size_t>(leave)] = entering;
    }

    /// Rebuild Binv from the basis columns by Gauss-Jordan; refreshes xb.
    void refactorize() {
        std::vector<double> mat(static_cast<size_t>(m_) * static_cast<size_t>(m_), 0.0);
        for (int i = 0; i < m_; ++i) {
            int j = basis_[static_cast<size_t>(i)];
            if (j < n_struct_) {
                for (int t = col_start_[static_cast<size_t>(j)]; t < col_start_[static_cast<size_t>(j) + 1]; ++t)
                    mat[static_cast<size_t>(col_row_[static_cast<size_t>(t)]) * m_ + i] = col_val_[static_cast<size_t>(t)];
            } else if (j < art_base_) {
                int r = slack_row_[static_cast<size_t>(j - n_struct_)];
                mat[static_cast<size_t>(r) * m_ + i] = row_sign_[static_cast<size_t>(r)];
            } else {
                mat[static_cast<size_t>(art_row_[static_cast<size_t>(j - art_base_)]) * m_ + i] = 1.0;
            }
        }
        std::vector<double> inv(static_cast<size_t>(m_) * static_cast<size_t>(m_), 0.0);
        for (int i = 0; i < m_; ++i) inv[static_cast<size_t>(i) * m_ + i] = 1.0;
        for (int col = 0; col < m_; ++col) {
            int piv = -1;
            double best = 1e-12;
            for (int r = col; r < m_; ++r) {
                double v = std::fabs(mat[static_cast<size_t>(r) * m_ + col]);
                if (v > best) { best = v; piv = r; }
            }
            if (piv < 0) throw SolverError("singular basis during refactorization");
            if (piv != col) {
                for (int c = 0; c < m_; ++c) {
                    std::swap(mat[static_cast<size_t>(piv) * m_ + c], mat[static_cast<size_t>(col) * m_ + c]);
                    std::swap(inv[static_cast<size_t>(piv) * m_ + c], inv[static_cast<size_t>(col) * m_ + c]);
                }
            }
            double d = 1.0 / mat[static_cast<size_t>(col) * m_ + col];
            for (int c = 0; c < m_; ++c) {
                mat[static_cast<size_t>(col) * m_ + c] *= d;
                inv[static_cast<size_t>(col) * m_ + c] *= d;
            }
            for (int r = 0; r < m_; ++r) {
                if (r == col) continue;
                double f = mat[static_cast<size_t>(r) * m_ + col];
                if (f == 0) continue;
                for (int c = 0; c < m_; ++c) {
                    mat[static_cast<size_t>(r) * m_ + c] -= f * mat[static_cast<size_t>(col) * m_ + c];
                    inv[static_cast<size_t>(r) * m_ + c] -= f * inv[static_cast<size_t>(col) * m_ + c];
                }
            }
        }
        binv_ = std::move(inv);
        // refresh basic values: xb = Binv * rhs
        for (int i = 0; i < m_; ++i) {
            double s = 0;
            const double* row = &binv_[static_cast<size_t>(i) * m_];
            for (int r = 0; r < m_; ++r) s += row[r] * rhs_[static_cast<size_t>(r)];
            xb_[static_cast<size_t>(i)] = s < 0 && s > -1e-11 ? 0.0 : s;
        }
    }

    /// After phase 1: pivot zero-valued artificials out of the basis.
    void expel_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[static_cast<size_t>(i)] < art_base_) continue;
            bool swapped = false;
            for (int j = 0; j < art_base_ && !swapped; ++j) {
                if (in_basis_[static_cast<size_t>(j)]) continue;
                ftran(j);
                if (std::fabs(w_[static_cast<size_t>(i)]) > 1e-8) {
                    pivot(j, i, 0.0);
                    swapped = true;
                }
            }
            if (!swapped)
                throw SolverError("dependent equality row: cannot remove artificial from basis");
        }
    }
};

}  // namespace detail

/// Solves the LP. Optimal results carry a basic feasible optimum; residuals
/// of the returned point stay within tol. Numerical trouble raises
/// SolverError rather than returning a bogus answer.
inline LPResult solve(const StandardFormLP& lp, const SolveOptions& opt) {
    detail::SimplexSolver solver(lp, opt);
    return solver.run();
}

inline LPResult solve(const StandardFormLP& lp, double tol = 1e-9) {
    SolveOptions opt;
    opt.tol = tol;
    return solve(lp, opt);
}

struct RowViolation {
    enum class Kind { Eq, Le, Bound } kind;
    int index;
    double residual;
};

struct FeasibilityReport {
    bool pass = true;
    double worst = 0;
    std::vector<RowViolation> violations;
};

/// Evaluates every row at x and reports violations; passes iff the worst one
/// is within tol.
inline FeasibilityReport check_feasible(const StandardFormLP& lp, const std::vector<double>& x,
                                        double tol = 1e-9) {
    if (static_cast<int>(x.size()) != lp.num_vars)
        throw UserError("check_feasible: point length != num_vars");
    FeasibilityReport rep;
    auto note = [&](RowViolation::Kind kind, int idx, double resid) {
        rep.worst = std::max(rep.worst, resid);
        if (resid > tol) rep.violations.push_back({kind, idx, resid});
    };
    for (size_t r = 0; r < lp.eq_rows.size(); ++r) {
        double s = -lp.eq_rows[r].rhs;
        for (auto [j, v] : lp.eq_rows[r].coeffs) s += v * x[static_cast<size_t>(j)];
        note(RowViolation::Kind::Eq, static_cast<int>(r), std::fabs(s));
    }
    for (size_t r = 0; r < lp.le_rows.size(); ++r) {
        double s = -lp.le_rows[r].rhs;
        for (auto [j, v] : lp.le_rows[r].coeffs) s += v * x[static_cast<size_t>(j)];
        note(RowViolation::Kind::Le, static_cast<int>(r), std::max(0.0, s));
    }
    for (int j = 0; j < lp.num_vars; ++j)
        note(RowViolation::Kind::Bound, j, std::max(0.0, -x[static_cast<size_t>(j)]));
    rep.pass = rep.worst <= tol;
    return rep;
}

/// Plain-text dump: objective line `min <idx:coef ...>`, then one line per
/// row `eq|le <rhs> <idx:coef ...>`.
inline std::string dump_lp(const StandardFormLP& lp) {
    std::ostringstream out;
    out.precision(17);
    out << "min";
    for (int j = 0; j < lp.num_vars; ++j)
        if (lp.objective[static_cast<size_t>(j)] != 0) out << " " << j << ":" << lp.objective[static_cast<size_t>(j)];
    out << "\n";
    auto emit = [&](const char* tag, const std::vector<LPRow>& rows) {
        for (const LPRow& r : rows) {
            out << tag << " " << r.rhs;
            for (auto [j, v] : r.coeffs) out << " " << j << ":" << v;
            out << "\n";
        }
    };
    emit("eq", lp.eq_rows);
    emit("le", lp.le_rows);
    return out.str();
}

inline StandardFormLP parse_lp_dump(const std::string& text) {
    StandardFormLP lp;
    std::istringstream in(text);
    std::string line;
    int max_idx = -1;
    std::vector<std::pair<int, double>> obj;
    auto parse_terms = [&](std::istringstream& ls, std::vector<std::pair<int, double>>& into) {
        std::string tok;
        while (ls >> tok) {
            auto colon = tok.find(':');
            if (colon == std::string::npos) throw UserError("lp dump: bad term '" + tok + "'");
            int j = std::stoi(tok.substr(0, colon));
            double v = std::stod(tok.substr(colon + 1));
            max_idx = std::max(max_idx, j);
            into.push_back({j, v});
        }
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "min") {
            parse_terms(ls, obj);
        } else if (tag == "eq" || tag == "le") {
            double rhs;
            if (!(ls >> rhs)) throw UserError("lp dump: missing rhs");
            LPRow row;
            row.rhs = rhs;
            parse_terms(ls, row.coeffs);
            (tag == "eq" ? lp.eq_rows : lp.le_rows).push_back(std::move(row));
        } else {
            throw UserError("lp dump: unknown line tag '" + tag + "'");
        }
    }
    lp.num_vars = max_idx + 1;
    lp.objective.assign(static_cast<size_t>(lp.num_vars), 0.0);
    for (auto [j, v] : obj) lp.objective[static_cast<size_t>(j)] = v;
    return lp;
}

/// Runs `<solver_path> <dumpfile>`; expects stdout "optimal <value>\n<x...>",
/// or "infeasible" / "unbounded".
inline LPResult solve_external(const StandardFormLP& lp, const std::string& solver_path) {
    char tmpl[] = "/tmp/oblivkand_lp_XXXXXX";
    int fd = mkstemp(tmpl);
    if (fd < 0) throw SolverError("external solver: cannot create temp file");
    std::string dump = dump_lp(lp);
    FILE* f = fdopen(fd, "w");
    fwrite(dump.data(), 1, dump.size(), f);
    fclose(f);
    std::string cmd = solver_path + " " + tmpl + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        std::remove(tmpl);
        throw SolverError("external solver: failed to launch " + solver_path);
    }
    std::string output;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, got);
    int rc = pclose(pipe);
    std::remove(tmpl);
    if (rc != 0) throw SolverError("external solver exited with status " + std::to_string(rc));
    std::istringstream in(output);
    std::string status;
    if (!(in >> status)) throw SolverError("external solver: empty output");
    LPResult res;
    if (status == "infeasible") {
        res.status = LPStatus::Infeasible;
        return res;
    }
    if (status == "unbounded") {
        res.status = LPStatus::Unbounded;
        return res;
    }
    if (status != "optimal") throw SolverError("external solver: bad status '" + status + "'");
    if (!(in >> res.value)) throw SolverError("external solver: missing objective value");
    res.solution.resize(static_cast<size_t>(lp.num_vars));
    for (int j = 0; j < lp.num_vars; ++j)
        if (!(in >> res.solution[static_cast<size_t>(j)]))
            throw SolverError("external solver: truncated solution vector");
    return res;
}

/// Honors OBLIV_KAND_SOLVER=external:<path>; otherwise the built-in simplex.
inline LPResult solve_auto(const StandardFormLP& lp, double tol = 1e-9) {
    const char* env = std::getenv("OBLIV_KAND_SOLVER");
    if (env && *env) {
        std::string s(env);
        if (s.rfind("external:", 0) == 0) return solve_external(lp, s.substr(9));
        if (s != "internal") throw UserError("OBLIV_KAND_SOLVER: unrecognized value '" + s + "'");
    }
    return solve(lp, tol);
}

}  // namespace oblivkand
