#pragma once

#include <string>
#include <vector>

#include "oblivkand/factor_lp.hpp"
#include "oblivkand/lp.hpp"
#include "oblivkand/oblivious.hpp"
#include "oblivkand/rational.hpp"

namespace oblivkand {

/// The closed-form constants of the single-threshold theory:
/// gamma_k = 1/k (odd) or 1/(k+1) (even), p*_k = (1+gamma_k)/2, and
/// alpha*_k = 2^-(k-1) (1-gamma_k)^fl(k/2) (1+gamma_k)^fl(k/2).
struct KandConstants {
    int k;
    Rat gamma;
    Rat p_star;
    Rat alpha_star;
};

inline KandConstants constants(int k) {
    if (k < 2) throw UserError("constants: k must be >= 2");
    KandConstants c;
    c.k = k;
    c.gamma = k % 2 == 1 ? make_rat(1, k) : make_rat(1, k + 1);
    c.p_star = (1 + c.gamma) / 2;
    c.alpha_star = rat_pow(Rat(2), -(k - 1)) * rat_pow(1 - c.gamma, k / 2) * rat_pow(1 + c.gamma, k / 2);
    return c;
}

struct TightPair {
    int i, j;
    bool operator==(const TightPair& o) const { return i == o.i && j == o.j; }
};

struct BernoulliMargin {
    int i, j;
    Rat margin;  // RHS - LHS, exact
};

struct BernoulliReport {
    int k = 0;
    bool holds = true;                  // every margin >= 0
    std::vector<TightPair> tight;       // margins exactly zero
    std::vector<BernoulliMargin> margins;
};

/// Exhaustive exact check of the two-sided Bernoulli inequality
///   1 + (j-i)/k <= (1-gamma_k)^(i-fl(k/2)) (1+gamma_k)^(j-fl(k/2))
/// over all i,j >= 0 with i+j <= k. Exactly three tight pairs per k.
inline BernoulliReport check_bernoulli(int k) {
    KandConstants kc = constants(k);
    int f = k / 2;
    BernoulliReport rep;
    rep.k = k;
    for (int i = 0; i + 0 <= k; ++i) {
        for (int j = 0; i + j <= k; ++j) {
            Rat lhs = 1 + make_rat(j - i, k);
            Rat rhs = rat_pow(1 - kc.gamma, i - f) * rat_pow(1 + kc.gamma, j - f);
            Rat margin = rhs - lhs;
            rep.margins.push_back({i, j, margin});
            if (margin < 0) rep.holds = false;
            if (margin == 0) rep.tight.push_back({i, j});
        }
    }
    return rep;
}

/// The predicted tight set of the inequality above.
inline std::vector<TightPair> bernoulli_tight_set(int k) {
    if (k % 2 == 0) return {{k / 2, k / 2}, {k / 2 - 1, k / 2}, {k / 2 - 1, k / 2 + 1}};
    return {{(k - 1) / 2, (k - 1) / 2}, {(k - 1) / 2, (k + 1) / 2}, {(k + 1) / 2, (k - 1) / 2}};
}

struct SuffCondRow {
    int i, j;
    int family;  // 1: all-negative-side family, 2: positive-pattern family
    Rat lhs, rhs;
};

struct SuffCondReport {
    bool pass = true;        // every row has lhs <= rhs
    bool strict = true;      // every row has lhs < rhs
    Rat min_slack;           // min over rows of rhs - lhs
    int arg_i = 0, arg_j = 0, arg_family = 0;
    std::vector<SuffCondRow> rows;
};

/// The sufficient condition for ratio >= 2^-(k-1) beta at t=(delta,1),
/// p=((1+gamma)/2): for all i,j >= 0 with i+j <= k,
///   (1+delta)(1-(i+j)/k) Y + (1-delta)(j/k) X <= beta^-1 (1-gamma)^i (1+gamma)^j
///   2 - (1-delta)(1-(i+j)/k) Y - (1+delta)(i/k) X <= beta^-1 (1-gamma)^i (1+gamma)^j
/// Evaluated in exact rationals.
inline SuffCondReport check_suff_cond(int k, const Rat& delta, const Rat& gamma, const Rat& beta,
                                      const Rat& X, const Rat& Y) {
    if (k < 2) throw UserError("check_suff_cond: k must be >= 2");
    if (delta < 0 || delta > 1 || gamma < 0 || gamma > 1)
        throw UserError("check_suff_cond: need 0 <= delta, gamma <= 1");
    if (X < 0 || Y < 0) throw UserError("check_suff_cond: need X, Y >= 0");
    if (beta <= 0) throw UserError("check_suff_cond: need beta > 0");
    SuffCondReport rep;
    bool first = true;
    for (int i = 0; i <= k; ++i) {
        for (int j = 0; i + j <= k; ++j) {
            Rat rhs = (1 / beta) * rat_pow(1 - gamma, i) * rat_pow(1 + gamma, j);
            Rat rest = 1 - make_rat(i + j, k);
            Rat lhs1 = (1 + delta) * rest * Y + (1 - delta) * make_rat(j, k) * X;
            Rat lhs2 = 2 - (1 - delta) * rest * Y - (1 + delta) * make_rat(i, k) * X;
            for (int family = 1; family <= 2; ++family) {
                Rat lhs = family == 1 ? lhs1 : lhs2;
                rep.rows.push_back({i, j, family, lhs, rhs});
                Rat slack = rhs - lhs;
                if (slack < 0) rep.pass = false;
                if (slack <= 0) rep.strict = false;
                if (first || slack < rep.min_slack) {
                    rep.min_slack = slack;
                    rep.arg_i = i;
                    rep.arg_j = j;
                    rep.arg_family = family;
                    first = false;
                }
            }
        }
    }
    return rep;
}

/// The sparse dual point induced by (delta, gamma, beta, X, Y):
/// z = 2 beta / 2^k, y+_{-1} = X beta/(k 2^k), y+_0 = Y beta/(k 2^k),
/// all other entries zero. Feasible for the dual factor LP at t=(delta,1),
/// p=((1+gamma)/2) whenever the sufficient condition holds; then the ratio
/// is at least z = 2^-(k-1) beta.
struct DualCertificate {
    int k;
    Rat delta, gamma, beta, X, Y;
    Rat z, y_plus_m1, y_plus_0;
    Rat certified_ratio;  // = z
    bool feasible = false;
    FeasibilityReport lp_report;
};

inline DualCertificate dual_certificate(int k, const Rat& delta, const Rat& gamma, const Rat& beta,
                                        const Rat& X, const Rat& Y, double tol = 1e-9) {
    if (k < 2) throw UserError("dual_certificate: k must be >= 2");
    DualCertificate cert;
    cert.k = k;
    cert.delta = delta;
    cert.gamma = gamma;
    cert.beta = beta;
    cert.X = X;
    cert.Y = Y;
    Rat pow2k = rat_pow(Rat(2), k);
    cert.z = 2 * beta / pow2k;
    cert.y_plus_m1 = X * beta / (k * pow2k);
    cert.y_plus_0 = Y * beta / (k * pow2k);
    cert.certified_ratio = cert.z;

    BiasPartition part{{delta, Rat(1)}};
    RoundingVector rv{{(1 + gamma) / 2}};
    StandardFormLP dual = build_dual(k, part, rv);
    std::vector<double> x(static_cast<size_t>(dual.num_vars), 0.0);
    x[static_cast<size_t>(dual_var_z_pos())] = to_double(cert.z);
    x[static_cast<size_t>(dual_var_y_plus(-1, 1))] = to_double(cert.y_plus_m1);
    x[static_cast<size_t>(dual_var_y_plus(0, 1))] = to_double(cert.y_plus_0);
    cert.lp_report = check_feasible(dual, x, tol);
    cert.feasible = cert.lp_report.pass;
    return cert;
}

/// Parameters satisfying the six core strict inequalities (the rows that are
/// tight in the unperturbed certificate), for the perturbation argument.
struct CoreStrictSolution {
    bool ok = false;
    int k = 0;
    Rat eps;    // the accepted epsilon (input, halved until the system is strictly solvable)
    Rat delta;  // eps for k=2, 4*eta for even k >= 4, 5*eta for odd k
    Rat eta;
    Rat beta;
    Rat X, Y;
    int halvings = 0;
    std::string failure;
};

namespace detail {

struct CoreBounds {
    // interval (lo, hi) for X; Y handled after X is fixed
    bool ok = true;
    Rat x_lo, x_hi;
    std::string why;
};

inline void tighten_lower(CoreBounds& b, const Rat& v) {
    if (v > b.x_lo) b.x_lo = v;
}
inline void tighten_upper(CoreBounds& b, const Rat& v) {
    if (v < b.x_hi) b.x_hi = v;
}

}  // namespace detail

/// Attempts one epsilon: computes eta, delta, the admissible X interval from
/// the four X-only core inequalities plus the Y-interval-nonempty condition,
/// picks midpoints, and verifies all six strict inequalities. Helper for
/// solve_core_strict.
inline CoreStrictSolution try_core_strict(int k, const Rat& eps) {
    KandConstants kc = constants(k);
    int f = k / 2;
    CoreStrictSolution sol;
    sol.k = k;
    sol.eps = eps;
    sol.beta = rat_pow(1 - kc.gamma, f) * rat_pow(1 + kc.gamma, f);
    Rat lo_base = 1 - kc.gamma - eps;  // (1 - gamma_k - eps)
    Rat hi_base = 1 + kc.gamma + eps;
    if (lo_base <= 0) {
        sol.failure = "eps too large: 1 - gamma - eps <= 0";
        return sol;
    }
    sol.eta = 1 - rat_pow(lo_base, f) * rat_pow(hi_base, f) / sol.beta;
    sol.delta = k == 2 ? eps : (k % 2 == 0 ? 4 * sol.eta : 5 * sol.eta);
    const Rat& d = sol.delta;
    const Rat& eta = sol.eta;
    if (d >= 1 || d <= 0 || eta <= 0) {
        sol.failure = "degenerate delta or eta";
        return sol;
    }
    Rat one_m = 1 - d, one_p = 1 + d;
    Rat one_meta = 1 - eta;

    // the six core rows, as linear forms a*X + b*Y < rhs
    struct Row {
        Rat ax, by, rhs;
    };
    std::vector<Row> rows;
    if (k % 2 == 0) {
        Rat r0 = one_meta;                      // 1 - eta
        Rat r1 = one_meta * hi_base / lo_base;  // (1-eta)(1+g+e)/(1-g-e)
        Rat r2 = one_meta / lo_base;            // (1-eta)/(1-g-e)
        Rat half = Rat(1, 2);
        Rat hp = half + make_rat(1, k), hm = half - make_rat(1, k);
        rows = {{half * one_m, 0, r0},        {-half * one_p, 0, r0 - 2},
                {hp * one_m, 0, r1},          {-hm * one_p, 0, r1 - 2},
                {half * one_m, make_rat(1, k) * one_p, r2}, {-hm * one_p, -make_rat(1, k) * one_m, r2 - 2}};
    } else {
        Rat rA = one_meta * (1 + make_rat(1, k) + eps);
        Rat rB = one_meta * (1 - make_rat(1, k) - eps);
        Rat rC = one_meta;
        Rat hp = Rat(1, 2) + make_rat(1, 2 * k), hm = Rat(1, 2) - make_rat(1, 2 * k);
        rows = {{hp * one_m, 0, rA},          {-hm * one_p, 0, rA - 2},
                {hm * one_m, 0, rB},          {-hp * one_p, 0, rB - 2},
                {hm * one_m, make_rat(1, k) * one_p, rC}, {-hm * one_p, -make_rat(1, k) * one_m, rC - 2}};
    }

    // X interval from the Y-free rows
    detail::CoreBounds bounds;
    bounds.x_lo = 0;
    bounds.x_hi = Rat(1048576);
    for (const Row& row : rows) {
        if (row.by != 0) continue;
        if (row.ax > 0) detail::tighten_upper(bounds, row.rhs / row.ax);
        else if (row.ax < 0) detail::tighten_lower(bounds, row.rhs / row.ax);
        else if (row.rhs <= 0) {
            sol.failure = "X-free core inequality fails";
            return sol;
        }
    }
    // Y-interval-nonempty condition: rows 4 (bY > 0) and 5 (bY < 0) combine
    // to a linear condition on X. With Y < (r4 - a4 X)/b4 and
    // Y > (a5 X - r5)/(-b5), a Y exists iff
    //   X (b4 a5 + (-b5) a4) < (-b5) r4 + b4 r5.
    const Row& up = rows[4];
    const Row& down = rows[5];
    Rat xc = up.by * down.ax + (-down.by) * up.ax;
    Rat rc = (-down.by) * up.rhs + up.by * down.rhs;
    if (xc > 0) detail::tighten_upper(bounds, rc / xc);
    else if (xc < 0) detail::tighten_lower(bounds, rc / xc);
    else if (rc <= 0) {
        sol.failure = "Y interval empty for all X";
        return sol;
    }

    if (!(bounds.x_lo < bounds.x_hi)) {
        sol.failure = "empty X interval";
        return sol;
    }
    sol.X = (bounds.x_lo + bounds.x_hi) / 2;

    // Y interval at the chosen X
    Rat y_hi = (up.rhs - up.ax * sol.X) / up.by;
    Rat y_lo = (down.ax * sol.X - down.rhs) / (-down.by);
    if (y_lo < 0) y_lo = 0;
    if (!(y_lo < y_hi)) {
        sol.failure = "empty Y interval";
        return sol;
    }
    sol.Y = (y_lo + y_hi) / 2;

    for (const Row& row : rows) {
        if (!(row.ax * sol.X + row.by * sol.Y < row.rhs)) {
            sol.failure = "verification of a core inequality failed";
            return sol;
        }
    }
    sol.ok = sol.X >= 0 && sol.Y >= 0;
    if (!sol.ok) sol.failure = "negative X or Y";
    return sol;
}

/// Finds (delta, eta, X, Y) making the six core inequalities strictly
/// satisfiable, halving eps (up to 60 times) until they are.
inline CoreStrictSolution solve_core_strict(int k, Rat eps, int max_halvings = 60) {
    if (eps <= 0) throw UserError("solve_core_strict: eps must be > 0");
    CoreStrictSolution last;
    for (int h = 0; h <= max_halvings; ++h) {
        CoreStrictSolution sol = try_core_strict(k, eps);
        sol.halvings = h;
        if (sol.ok) return sol;
        last = sol;
        eps /= 2;
    }
    throw SolverError("solve_core_strict: no feasible eps found within " +
                      std::to_string(max_halvings) + " halvings (last failure: " + last.failure + ")");
}

/// approximation_ratio at the perturbed parameters t=(delta,1),
/// p=(p*_k + eps). The headline claim: strictly above alpha*_k for suitable
/// (delta, eps).
inline double perturbed_ratio(int k, double delta, double eps, double tol = 1e-9) {
    KandConstants kc = constants(k);
    BiasPartition part{{rat_from_double(delta), Rat(1)}};
    RoundingVector rv{{kc.p_star + rat_from_double(eps)}};
    return approximation_ratio(k, part, rv, tol).ratio;
}

/// Full certification pipeline for one k: core-strict parameters, the exact
/// strict check of the whole inequality family at gamma = gamma_k + eps, the
/// best certified bound (largest beta' the strict slack allows), the LP
/// feasibility cross-check, and the primal LP value.
struct CertifyResult {
    CoreStrictSolution core;
    SuffCondReport full;          // at gamma = gamma_k + eps, beta unperturbed
    Rat gamma;                    // gamma_k + eps: the certified algorithm rounds with p = (1+gamma)/2
    Rat rounding_p;
    Rat certified_lower_bound;    // 2^-(k-1) * best beta'
    Rat alpha_star;
    bool exceeds_alpha_star = false;
    DualCertificate lp_check;     // dual point at the improved beta'
    double lp_primal_value = 0;   // LP value of the certified algorithm itself
};

/// Certification pipeline for one k. Note the convention: eps perturbs
/// gamma, so the certified algorithm rounds with p = p*_k + eps/2 (the
/// bias threshold moves to delta).
inline CertifyResult certify(int k, const Rat& eps0, double tol = 1e-9, bool solve_lp = true) {
    CertifyResult out;
    out.core = solve_core_strict(k, eps0);
    KandConstants kc = constants(k);
    out.gamma = kc.gamma + out.core.eps;
    out.rounding_p = (1 + out.gamma) / 2;
    out.full = check_suff_cond(k, out.core.delta, out.gamma, out.core.beta, out.core.X, out.core.Y);
    if (!out.full.strict)
        throw SolverError("certify: core-strict parameters do not satisfy the full family strictly");
    // largest beta' still satisfying every row: beta' = min over rows with
    // lhs > 0 of (1-gamma)^i (1+gamma)^j / lhs
    Rat best_beta;
    bool first = true;
    for (const SuffCondRow& row : out.full.rows) {
        if (row.lhs <= 0) continue;
        Rat cand = row.rhs * out.core.beta / row.lhs;
        if (first || cand < best_beta) {
            best_beta = cand;
            first = false;
        }
    }
    if (first) throw SolverError("certify: no binding rows");
    out.certified_lower_bound = rat_pow(Rat(2), -(k - 1)) * best_beta;
    out.alpha_star = kc.alpha_star;
    out.exceeds_alpha_star = out.certified_lower_bound > out.alpha_star;
    out.lp_check =
        dual_certificate(k, out.core.delta, out.gamma, best_beta, out.core.X, out.core.Y, tol);
    if (solve_lp) {
        BiasPartition part{{out.core.delta, Rat(1)}};
        RoundingVector rv{{out.rounding_p}};
        out.lp_primal_value = approximation_ratio(k, part, rv, tol).ratio;
    }
    return out;
}

}  // namespace oblivkand
