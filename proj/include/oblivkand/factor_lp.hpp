#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "oblivkand/instance.hpp"
#include "oblivkand/lp.hpp"
#include "oblivkand/oblivious.hpp"

namespace oblivkand {

// Row layout of the factor-revealing primal:
//   row 0                 : sum over positive patterns of W(c) = 1
//   rows 1 .. L           : upper bias rows, class i = -l..+l
//                           (1 - t+_i) W+(i) - (1 + t+_i) W-(i) <= 0
//   rows L+1 .. 2L        : lower bias rows, class i = -l..+l
//                           (t-_i - 1) W+(i) + (t-_i + 1) W-(i) <= 0
// One variable per pattern, in canonical enumeration order.

inline uint64_t check_pattern_budget(int k, int l, uint64_t cap = 10'000'000) {
    uint64_t count = pattern_count(k, l);
    if (count > cap)
        throw UserError("factor LP would have " + std::to_string(count) +
                        " pattern columns (cap " + std::to_string(cap) + ")");
    return count;
}

inline StandardFormLP build_primal(int k, const BiasPartition& part, const RoundingVector& rv) {
    validate_partition(part);
    validate_rounding(rv, part.levels());
    int l = part.levels();
    int L = 2 * l + 1;
    uint64_t count = check_pattern_budget(k, l);
    StandardFormLP lp(static_cast<int>(count));
    lp.add_eq(1.0);
    std::vector<double> tplus(static_cast<size_t>(L)), tminus(static_cast<size_t>(L));
    for (int i = -l; i <= l; ++i) {
        tplus[static_cast<size_t>(i + l)] = to_double(class_upper(part, i));
        tminus[static_cast<size_t>(i + l)] = to_double(class_lower(part, i));
        lp.add_le(0.0);  // upper row for class i
    }
    for (int i = -l; i <= l; ++i) lp.add_le(0.0);  // lower row for class i

    std::vector<double> p = rounding_as_doubles(rv);
    int col = 0;
    for_each_pattern(k, l, [&](const Pattern& c) {
        lp.set_objective(col, sat_prob(c, p));
        if (is_positive_pattern(c)) lp.eq_rows[0].coeffs.push_back({col, 1.0});
        for (int i = -l; i <= l; ++i) {
            int cp = c.cplus(i), cm = c.cminus(i);
            if (cp == 0 && cm == 0) continue;
            double tp = tplus[static_cast<size_t>(i + l)], tm = tminus[static_cast<size_t>(i + l)];
            double upper = (1.0 - tp) * cp - (1.0 + tp) * cm;
            double lower = (tm - 1.0) * cp + (tm + 1.0) * cm;
            if (upper != 0) lp.le_rows[static_cast<size_t>(i + l)].coeffs.push_back({col, upper});
            if (lower != 0) lp.le_rows[static_cast<size_t>(L + i + l)].coeffs.push_back({col, lower});
        }
        ++col;
    });
    return lp;
}

// Dual variable layout: 0 = z+, 1 = z- (z = z+ - z- is the free bound on the
// ratio), then y+_i at 2 + (i+l) and y-_i at 2 + L + (i+l). One <= row per
// pattern with right-hand side prob(c). The standard form minimizes -z, so
// the optimal value is the negated approximation ratio.
inline int dual_var_z_pos() { return 0; }
inline int dual_var_z_neg() { return 1; }
inline int dual_var_y_plus(int i, int l) { return 2 + (i + l); }
inline int dual_var_y_minus(int i, int l) { return 2 + (2 * l + 1) + (i + l); }

inline StandardFormLP build_dual(int k, const BiasPartition& part, const RoundingVector& rv) {
    validate_partition(part);
    validate_rounding(rv, part.levels());
    int l = part.levels();
    int L = 2 * l + 1;
    check_pattern_budget(k, l);
    StandardFormLP lp(2 + 2 * L);
    lp.set_objective(dual_var_z_pos(), -1.0);
    lp.set_objective(dual_var_z_neg(), 1.0);
    std::vector<double> tplus(static_cast<size_t>(L)), tminus(static_cast<size_t>(L));
    for (int i = -l; i <= l; ++i) {
        tplus[static_cast<size_t>(i + l)] = to_double(class_upper(part, i));
        tminus[static_cast<size_t>(i + l)] = to_double(class_lower(part, i));
    }
    std::vector<double> p = rounding_as_doubles(rv);
    for_each_pattern(k, l, [&](const Pattern& c) {
        LPRow& row = lp.add_le(sat_prob(c, p));
        if (is_positive_pattern(c)) {
            row.coeffs.push_back({dual_var_z_pos(), 1.0});
            row.coeffs.push_back({dual_var_z_neg(), -1.0});
        }
        for (int i = -l; i <= l; ++i) {
            int cp = c.cplus(i), cm = c.cminus(i);
            if (cp == 0 && cm == 0) continue;
            double tp = tplus[static_cast<size_t>(i + l)], tm = tminus[static_cast<size_t>(i + l)];
            double yp = (tp - 1.0) * cp + (1.0 + tp) * cm;
            double ym = (1.0 - tm) * cp - (tm + 1.0) * cm;
            if (yp != 0) row.coeffs.push_back({dual_var_y_plus(i, l), yp});
            if (ym != 0) row.coeffs.push_back({dual_var_y_minus(i, l), ym});
        }
    });
    return lp;
}

struct RatioResult {
    double ratio = 0;
    std::map<Pattern, double> worst_weights;  // a minimizing W: the hard pattern distribution
    long iterations = 0;
};

/// Optimal value of the factor-revealing primal = the approximation ratio of
/// the oblivious algorithm defined by (part, rv).
inline RatioResult approximation_ratio(int k, const BiasPartition& part, const RoundingVector& rv,
                                       double tol = 1e-9) {
    StandardFormLP lp = build_primal(k, part, rv);
    LPResult res = solve_auto(lp, tol);
    if (res.status != LPStatus::Optimal)
        throw SolverError(std::string("factor LP not optimal: ") + to_string(res.status));
    RatioResult out;
    out.ratio = res.value;
    out.iterations = res.iterations;
    int col = 0;
    for_each_pattern(k, part.levels(), [&](const Pattern& c) {
        double w = res.solution[static_cast<size_t>(col)];
        if (w > 1e-12) out.worst_weights[c] = w;
        ++col;
    });
    return out;
}

/// Solves the dual and returns the ratio from that side (the negated
/// standard-form optimum).
inline double approximation_ratio_dual(int k, const BiasPartition& part, const RoundingVector& rv,
                                       double tol = 1e-9) {
    LPResult res = solve_auto(build_dual(k, part, rv), tol);
    if (res.status != LPStatus::Optimal)
        throw SolverError(std::string("dual factor LP not optimal: ") + to_string(res.status));
    return -res.value;
}

/// A candidate primal solution: pattern weights W(c) >= 0.
using FeasibleWeights = std::map<Pattern, Rat>;

struct WeightRowValues {
    std::vector<Rat> wplus, wminus;  // W+(i), W-(i), indexed i+l
    Rat pos_sum;                     // sum of W over positive patterns
};

inline WeightRowValues weight_row_values(const FeasibleWeights& w, int l) {
    WeightRowValues rv;
    int L = 2 * l + 1;
    rv.wplus.assign(static_cast<size_t>(L), 0);
    rv.wminus.assign(static_cast<size_t>(L), 0);
    rv.pos_sum = 0;
    for (const auto& [c, weight] : w) {
        if (c.levels() != l) throw UserError("pattern level mismatch in weights");
        if (weight < 0) throw UserError("negative pattern weight");
        if (is_positive_pattern(c)) rv.pos_sum += weight;
        for (int i = -l; i <= l; ++i) {
            if (c.cplus(i)) rv.wplus[static_cast<size_t>(i + l)] += c.cplus(i) * weight;
            if (c.cminus(i)) rv.wminus[static_cast<size_t>(i + l)] += c.cminus(i) * weight;
        }
    }
    return rv;
}

struct ExactFeasibility {
    bool feasible = true;
    Rat worst = 0;  // largest violation across all rows (0 when feasible)
};

/// Exact-rational feasibility of W against the primal rows.
inline ExactFeasibility check_weights_feasible_exact(const FeasibleWeights& w, int k,
                                                     const BiasPartition& part) {
    validate_partition(part);
    int l = part.levels();
    ExactFeasibility out;
    auto note = [&](const Rat& violation) {
        if (violation > out.worst) out.worst = violation;
        if (violation > 0) out.feasible = false;
    };
    for (const auto& [c, weight] : w) {
        if (c.total() != k) throw UserError("pattern count sum != k in weights");
        if (weight < 0) note(-weight);
    }
    WeightRowValues rows = weight_row_values(w, l);
    note(abs(rows.pos_sum - 1));
    for (int i = -l; i <= l; ++i) {
        Rat wp = rows.wplus[static_cast<size_t>(i + l)], wm = rows.wminus[static_cast<size_t>(i + l)];
        Rat tp = class_upper(part, i), tm = class_lower(part, i);
        note((wp - wm) - tp * (wp + wm));  // upper row
        note(tm * (wp + wm) - (wp - wm));  // lower row
    }
    return out;
}

/// Exact objective sum prob(c) W(c).
inline Rat objective_value_exact(const FeasibleWeights& w, const RoundingVector& rv) {
    Rat s = 0;
    for (const auto& [c, weight] : w) s += sat_prob_exact(c, rv) * weight;
    return s;
}

/// Turns any instance into a feasible primal point whose objective is exactly
/// oblivious value / optimum value: flip so the all-(+1) assignment is
/// optimal, rescale the total weight to 1/val, then aggregate clause weights
/// by pattern.
inline FeasibleWeights witness_solution_from_instance(const Instance& inst,
                                                      const BiasPartition& part,
                                                      int brute_force_cap = 24) {
    validate_partition(part);
    BruteForceResult opt = brute_force_optimum(inst, brute_force_cap);
    Instance flipped = flip(inst, opt.assignment);
    Rat scale = 1 / (opt.value * total_weight(flipped));
    std::vector<int> cls = bias_classes(flipped, part);
    FeasibleWeights w;
    for (size_t j = 0; j < flipped.clauses.size(); ++j)
        w[pattern_of_clause(flipped, cls, part.levels(), j)] += flipped.clauses[j].weight * scale;
    return w;
}

/// Makes the non-central bias rows strictly slack: wherever a class i != 0
/// row is tight, adds eps mass split between the all-positive and
/// all-negative patterns of that class so the added mass has bias at the
/// interval midpoint (both rows then gain slack), and renormalizes.
inline FeasibleWeights nice_solution(const FeasibleWeights& w, int k, const BiasPartition& part,
                                     const Rat& eps = Rat(1, 1000000)) {
    validate_partition(part);
    ExactFeasibility feas = check_weights_feasible_exact(w, k, part);
    if (!feas.feasible) throw UserError("nice_solution: input weights are infeasible");
    int l = part.levels();
    WeightRowValues rows = weight_row_values(w, l);
    FeasibleWeights out = w;
    for (int i = -l; i <= l; ++i) {
        if (i == 0) continue;
        Rat wp = rows.wplus[static_cast<size_t>(i + l)], wm = rows.wminus[static_cast<size_t>(i + l)];
        Rat tp = class_upper(part, i), tm = class_lower(part, i);
        bool upper_tight = (wp - wm) == tp * (wp + wm);
        bool lower_tight = tm * (wp + wm) == (wp - wm);
        if (!upper_tight && !lower_tight) continue;
        Rat mid = (tp + tm) / 2;
        Pattern all_pos = Pattern::zero(l);
        all_pos.cplus(i) = k;
        Pattern all_neg = Pattern::zero(l);
        all_neg.cminus(i) = k;
        out[all_pos] += eps * (1 + mid) / 2;
        out[all_neg] += eps * (1 - mid) / 2;
    }
    Rat pos_sum = weight_row_values(out, l).pos_sum;
    for (auto& [c, weight] : out) weight /= pos_sum;
    return out;
}

inline bool is_nice(const FeasibleWeights& w, const BiasPartition& part) {
    int l = part.levels();
    WeightRowValues rows = weight_row_values(w, l);
    for (int i = -l; i <= l; ++i) {
        if (i == 0) continue;
        Rat wp = rows.wplus[static_cast<size_t>(i + l)], wm = rows.wminus[static_cast<size_t>(i + l)];
        if (!(class_lower(part, i) * (wp + wm) < (wp - wm) &&
              (wp - wm) < class_upper(part, i) * (wp + wm)))
            return false;
    }
    return true;
}

/// Synthesizes an instance realizing a nice feasible solution: k variables
/// per bias class carrying mass, and for each supported pattern c one clause
/// per admissible placement tuple, each of weight W(c)/|placements|. Every
/// synthesized variable lands in its intended bias class, every clause
/// recovers its source pattern, and obl/val is at most the objective of W.
/// Classes with zero mass (possible only for class 0) are dropped and the
/// variables renumbered.
inline Instance instance_from_solution(const FeasibleWeights& w, int k, const BiasPartition& part,
                                       uint64_t clause_cap = 1'000'000) {
    validate_partition(part);
    ExactFeasibility feas = check_weights_feasible_exact(w, k, part);
    if (!feas.feasible) throw UserError("instance_from_solution: weights are infeasible");
    if (!is_nice(w, part)) throw UserError("instance_from_solution: weights are not nice");
    int l = part.levels();
    WeightRowValues rows = weight_row_values(w, l);

    // variable ids for (class, copy): classes carrying mass, ascending
    std::vector<int> class_base(static_cast<size_t>(2 * l + 1), -1);
    int n = 0;
    for (int i = -l; i <= l; ++i) {
        Rat mass = rows.wplus[static_cast<size_t>(i + l)] + rows.wminus[static_cast<size_t>(i + l)];
        if (mass > 0) {
            class_base[static_cast<size_t>(i + l)] = n;
            n += k;
        }
    }

    uint64_t total_clauses = 0;
    for (const auto& [c, weight] : w) {
        if (weight == 0) continue;
        uint64_t count = 1;
        for (int i = -l; i <= l; ++i)
            count *= binomial(k, c.cplus(i)) * binomial(k - c.cplus(i), c.cminus(i));
        total_clauses += count;
        if (total_clauses > clause_cap)
            throw UserError("instance_from_solution: clause count exceeds cap " +
                            std::to_string(clause_cap));
    }

    Instance inst;
    inst.k = k;
    inst.n = n;
    std::vector<std::vector<int>> subset_scratch;
    for (const auto& [c, weight] : w) {
        if (weight == 0) continue;
        uint64_t count = 1;
        for (int i = -l; i <= l; ++i)
            count *= binomial(k, c.cplus(i)) * binomial(k - c.cplus(i), c.cminus(i));
        Rat clause_weight = weight / Rat(static_cast<unsigned long>(count));

        // enumerate, per class, the ordered pairs (J+, J-) of disjoint subsets
        struct ClassChoice {
            int cls;
            std::vector<std::pair<std::vector<int>, std::vector<int>>> pairs;
        };
        std::vector<ClassChoice> choices;
        for (int i = -l; i <= l; ++i) {
            int cp = c.cplus(i), cm = c.cminus(i);
            if (cp == 0 && cm == 0) continue;
            ClassChoice ch;
            ch.cls = i;
            std::vector<int> idx(static_cast<size_t>(k));
            for (int a = 0; a < k; ++a) idx[static_cast<size_t>(a)] = a;
            std::vector<int> pos_sel, neg_sel;
            std::function<void(int, int)> pick_neg = [&](int start, int need) {
                if (need == 0) {
                    ch.pairs.push_back({pos_sel, neg_sel});
                    return;
                }
                for (int a = start; a < k; ++a) {
                    if (std::find(pos_sel.begin(), pos_sel.end(), a) != pos_sel.end()) continue;
                    neg_sel.push_back(a);
                    pick_neg(a + 1, need - 1);
                    neg_sel.pop_back();
                }
            };
            std::function<void(int, int)> pick_pos = [&](int start, int need) {
                if (need == 0) {
                    pick_neg(0, cm);
                    return;
                }
                for (int a = start; a < k; ++a) {
                    pos_sel.push_back(a);
                    pick_pos(a + 1, need - 1);
                    pos_sel.pop_back();
                }
            };
            pick_pos(0, cp);
            choices.push_back(std::move(ch));
        }

        // cartesian product over classes
        std::vector<size_t> cursor(choices.size(), 0);
        for (;;) {
            Clause clause;
            clause.weight = clause_weight;
            for (size_t ci = 0; ci < choices.size(); ++ci) {
                const auto& [pos_sel, neg_sel] = choices[ci].pairs[cursor[ci]];
                int base = class_base[static_cast<size_t>(choices[ci].cls + l)];
                for (int a : pos_sel) clause.positive.push_back(base + a + 1);
                for (int a : neg_sel) clause.negative.push_back(base + a + 1);
            }
            std::sort(clause.positive.begin(), clause.positive.end());
            std::sort(clause.negative.begin(), clause.negative.end());
            inst.clauses.push_back(std::move(clause));
            size_t ci = 0;
            while (ci < choices.size() && ++cursor[ci] == choices[ci].pairs.size()) {
                cursor[ci] = 0;
                ++ci;
            }
            if (ci == choices.size()) break;
        }
    }
    validate_instance(inst);
    return inst;
}

/// The sparse hard solutions whose objective is r_k(p) (normalized): they
/// bound every single-threshold algorithm by alpha*_k, with equality exactly
/// at p = p*_k.
inline FeasibleWeights superoblivious_hard_solution(int k) {
    if (k < 2) throw UserError("superoblivious_hard_solution: k must be >= 2");
    FeasibleWeights w;
    if (k % 2 == 1) {
        Pattern a = Pattern::zero(1);
        a.cplus(-1) = (k - 1) / 2;
        a.cplus(+1) = (k + 1) / 2;
        Pattern b = Pattern::zero(1);
        b.cminus(-1) = (k + 1) / 2;
        b.cminus(+1) = (k - 1) / 2;
        w[a] = 1;
        w[b] = make_rat(k - 1, k + 1);
    } else {
        // all-positive balanced, all-positive bare majority in class +1,
        // all-negative balanced
        Pattern a = Pattern::zero(1);
        a.cplus(-1) = k / 2;
        a.cplus(+1) = k / 2;
        Pattern b = Pattern::zero(1);
        b.cplus(-1) = k / 2 - 1;
        b.cplus(+1) = k / 2 + 1;
        Pattern d = Pattern::zero(1);
        d.cminus(-1) = k / 2;
        d.cminus(+1) = k / 2;
        Rat denom = Rat(k + 1) * Rat(k + 2);
        w[a] = Rat(3 * k + 2) / denom;
        w[b] = Rat(k) * Rat(k) / denom;
        w[d] = (Rat(k) * Rat(k) + k + 2) / denom;
    }
    return w;
}

/// sum_c prob^(p)(c) W(c) over a grid of single-threshold rounding
/// probabilities (l = 1 solutions only).
inline std::vector<std::pair<double, double>> objective_curve(const FeasibleWeights& w,
                                                              const std::vector<double>& p_grid) {
    for (const auto& [c, weight] : w)
        if (c.levels() != 1) throw UserError("objective_curve: expects l = 1 weights");
    std::vector<std::pair<double, double>> out;
    out.reserve(p_grid.size());
    for (double p : p_grid) {
        double s = 0;
        for (const auto& [c, weight] : w) s += sat_prob(c, {p}) * to_double(weight);
        out.push_back({p, s});
    }
    return out;
}

/// The single-threshold objective polynomial of the hard solutions. Uniquely
/// maximized over [0,1] at p*_k; r_k(p*_k) divided by the normalizer below
/// equals alpha*_k.
inline Rat r_k_exact(int k, const Rat& p) {
    if (p < 0 || p > 1) throw UserError("r_k: p outside [0,1]");
    if (k % 2 == 1)
        return rat_pow(p, (k + 1) / 2) * rat_pow(1 - p, (k - 1) / 2);
    Rat k2 = Rat(k) * Rat(k);
    Rat kp2 = Rat(k + 2) * Rat(k + 2);
    return (k2 * rat_pow(p, k / 2 + 1) * rat_pow(1 - p, k / 2 - 1) +
            kp2 * rat_pow(p, k / 2) * rat_pow(1 - p, k / 2)) /
           (k2 + kp2);
}

inline double r_k(int k, double p) {
    if (k % 2 == 1) return std::pow(p, (k + 1) / 2) * std::pow(1 - p, (k - 1) / 2);
    double k2 = static_cast<double>(k) * k;
    double kp2 = static_cast<double>(k + 2) * (k + 2);
    return (k2 * std::pow(p, k / 2 + 1) * std::pow(1 - p, k / 2 - 1) +
            kp2 * std::pow(p, k / 2) * std::pow(1 - p, k / 2)) /
           (k2 + kp2);
}

/// r_k(p*_k) / r_k_normalizer(k) = alpha*_k.
inline Rat r_k_normalizer(int k) {
    if (k % 2 == 1) return Rat(1, 2) * (1 + make_rat(1, k));
    return Rat(k + 1) * Rat(k + 2) / (Rat(k) * Rat(k) + Rat(k + 2) * Rat(k + 2));
}

struct GridRange {
    double lo = 0, hi = 0, step = 1;

    std::vector<double> values() const {
        if (step <= 0) throw UserError("grid range: step must be positive");
        long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
        std::vector<double> v;
        for (long i = 0; i < count; ++i) v.push_back(lo + static_cast<double>(i) * step);
        return v;
    }
};

struct GridCell {
    double x = 0, y = 0, ratio = 0;
    long iterations = 0;
    double seconds = 0;
    bool ok = false;
    std::string error;
};

struct GridResult {
    GridCell best;
    std::vector<GridCell> cells;
};

/// Evaluates approximation_ratio(k, piecewise_linear_params(l, x, y)) over
/// the grid. Cells run in parallel; failed cells are reported and skipped;
/// ties break to the lexicographically smallest (x, y).
inline GridResult grid_search(int k, int l, const GridRange& x_range, const GridRange& y_range,
                              int threads = 0, double tol = 1e-9) {
    std::vector<double> xs = x_range.values(), ys = y_range.values();
    std::vector<GridCell> cells;
    for (double x : xs)
        for (double y : ys) cells.push_back({x, y, 0, 0, 0, false, ""});
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t idx = next.fetch_add(1);
            if (idx >= cells.size()) return;
            GridCell& cell = cells[idx];
            auto t0 = std::chrono::steady_clock::now();
            try {
                auto [part, rv] = piecewise_linear_params(l, rat_from_double(cell.x),
                                                          rat_from_double(cell.y));
                RatioResult rr = approximation_ratio(k, part, rv, tol);
                cell.ratio = rr.ratio;
                cell.iterations = rr.iterations;
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    GridResult out;
    out.cells = cells;
    bool found = false;
    for (const GridCell& cell : cells) {
        if (!cell.ok) continue;
        if (!found || cell.ratio > out.best.ratio + 1e-15 ||
            (std::fabs(cell.ratio - out.best.ratio) <= 1e-15 &&
             std::make_pair(cell.x, cell.y) < std::make_pair(out.best.x, out.best.y))) {
            out.best = cell;
            found = true;
        }
    }
    if (!found) throw SolverError("grid search: every cell failed");
    return out;
}

}  // namespace oblivkand
