#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oblivkand/combinatorics.hpp"
#include "oblivkand/instance.hpp"
#include "oblivkand/rational.hpp"
#include "oblivkand/rng.hpp"

namespace oblivkand {

/// Symmetric partition of [-1,1] into L = 2l+1 bias classes -l..+l.
/// Class 0 is [-t0, t0]; class +i is (t_{i-1}, t_i], class -i its mirror
/// [-t_i, -t_{i-1}).
struct BiasPartition {
    std::vector<Rat> t;  // (t_0, ..., t_l) with 0 <= t_0 < ... < t_l = 1

    int levels() const { return static_cast<int>(t.size()) - 1; }
};

inline void validate_partition(const BiasPartition& part) {
    if (part.t.size() < 2) throw UserError("bias partition needs at least (t0, t1=1)");
    if (part.t.front() < 0) throw UserError("bias partition: t0 must be >= 0");
    for (size_t i = 0; i + 1 < part.t.size(); ++i)
        if (!(part.t[i] < part.t[i + 1])) throw UserError("bias partition: t must be strictly increasing");
    if (part.t.back() != 1) throw UserError("bias partition: t_l must equal 1");
}

/// Rounding probabilities p_1..p_l for the positive classes; class -i uses
/// 1 - p_i and class 0 uses 1/2.
struct RoundingVector {
    std::vector<Rat> p;

    int levels() const { return static_cast<int>(p.size()); }
};

inline void validate_rounding(const RoundingVector& rv, int levels) {
    if (rv.levels() != levels) throw UserError("rounding vector length != partition levels");
    for (const Rat& q : rv.p)
        if (q < 0 || q > 1) throw UserError("rounding probability outside [0,1]");
}

/// Upper/lower endpoint of bias class i (sup and inf of its interval).
inline Rat class_upper(const BiasPartition& part, int i) {
    if (i >= 0) return part.t[static_cast<size_t>(i)];
    return -part.t[static_cast<size_t>(-i - 1)];
}
inline Rat class_lower(const BiasPartition& part, int i) {
    if (i <= 0) return -part.t[static_cast<size_t>(-i)];
    return part.t[static_cast<size_t>(i - 1)];
}

/// The unique class whose interval contains b, decided exactly.
inline int bias_class(const BiasPartition& part, const Rat& b) {
    if (b < -1 || b > 1) throw UserError("bias outside [-1,1]");
    Rat a = abs(b);
    if (a <= part.t.front()) return 0;
    int l = part.levels();
    for (int i = 1; i <= l; ++i)
        if (a <= part.t[static_cast<size_t>(i)]) return b > 0 ? i : -i;
    return b > 0 ? l : -l;  // unreachable: t_l = 1
}

/// Per-clause view of an instance: how many positive / negative literals sit
/// in each bias class. Laid out as the 2L-tuple
/// (c+_{-l},...,c+_{+l}, c-_{-l},...,c-_{+l}); entries sum to k.
struct Pattern {
    std::vector<int> counts;

    int levels() const { return (static_cast<int>(counts.size()) / 2 - 1) / 2; }
    int classes() const { return static_cast<int>(counts.size()) / 2; }  // L = 2l+1
    int& cplus(int i) { return counts[static_cast<size_t>(i + levels())]; }
    int& cminus(int i) { return counts[static_cast<size_t>(classes() + i + levels())]; }
    int cplus(int i) const { return counts[static_cast<size_t>(i + levels())]; }
    int cminus(int i) const { return counts[static_cast<size_t>(classes() + i + levels())]; }
    int total() const {
        int s = 0;
        for (int c : counts) s += c;
        return s;
    }

    bool operator<(const Pattern& o) const { return counts < o.counts; }
    bool operator==(const Pattern& o) const { return counts == o.counts; }

    static Pattern zero(int l) { return Pattern{std::vector<int>(static_cast<size_t>(2 * (2 * l + 1)), 0)}; }
};

inline bool is_positive_pattern(const Pattern& c) {
    int L = c.classes();
    for (int s = L; s < 2 * L; ++s)
        if (c.counts[static_cast<size_t>(s)] != 0) return false;
    return true;
}

inline uint64_t pattern_count(int k, int l) { return composition_count(k, 2 * (2 * l + 1)); }

/// Visits all patterns for arity k over 2l+1 classes in canonical order:
/// the first pattern puts all k counts in the c+_{-l} slot.
inline void for_each_pattern(int k, int l, const std::function<void(const Pattern&)>& visit) {
    Pattern scratch = Pattern::zero(l);
    for_each_composition(k, 2 * (2 * l + 1), [&](const std::vector<int>& counts) {
        scratch.counts = counts;
        visit(scratch);
    });
}

inline std::vector<Pattern> enumerate_patterns(int k, int l) {
    if (k < 2 || l < 1) throw UserError("enumerate_patterns: need k >= 2, l >= 1");
    std::vector<Pattern> out;
    out.reserve(pattern_count(k, l));
    for_each_pattern(k, l, [&](const Pattern& c) { out.push_back(c); });
    return out;
}

inline uint64_t pattern_rank(const Pattern& c) { return composition_rank(c.counts); }

/// "c+_{-l}:...:c+_{+l}|c-_{-l}:...:c-_{+l}"
inline std::string pattern_to_string(const Pattern& c) {
    std::ostringstream out;
    int L = c.classes();
    for (int s = 0; s < 2 * L; ++s) {
        if (s == L) out << "|";
        else if (s != 0) out << ":";
        out << c.counts[static_cast<size_t>(s)];
    }
    return out.str();
}

inline Pattern pattern_from_string(const std::string& s) {
    Pattern c;
    std::string tok;
    for (char ch : s) {
        if (ch == ':' || ch == '|') {
            c.counts.push_back(std::stoi(tok));
            tok.clear();
        } else {
            tok += ch;
        }
    }
    if (!tok.empty()) c.counts.push_back(std::stoi(tok));
    if (c.counts.size() < 6 || c.counts.size() % 2 != 0)
        throw UserError("malformed pattern: " + s);
    return c;
}

/// Pattern of clause j under partition `part`, given precomputed classes.
inline Pattern pattern_of_clause(const Instance& inst, const std::vector<int>& var_class, int l,
                                 size_t j) {
    Pattern c = Pattern::zero(l);
    const Clause& cl = inst.clauses[j];
    for (int v : cl.positive) ++c.cplus(var_class[static_cast<size_t>(v - 1)]);
    for (int v : cl.negative) ++c.cminus(var_class[static_cast<size_t>(v - 1)]);
    return c;
}

inline std::vector<int> bias_classes(const Instance& inst, const BiasPartition& part) {
    std::vector<Rat> b = all_biases(inst);
    std::vector<int> cls(b.size());
    for (size_t i = 0; i < b.size(); ++i) cls[i] = bias_class(part, b[i]);
    return cls;
}

inline Pattern pattern_of_clause(const Instance& inst, const BiasPartition& part, size_t j) {
    return pattern_of_clause(inst, bias_classes(inst, part), part.levels(), j);
}

/// Probability that a clause with pattern c is satisfied:
/// 2^-(c+_0 + c-_0) * prod_i p_i^(c+_{+i}+c-_{-i}) (1-p_i)^(c-_{+i}+c+_{-i}),
/// with the 0^0 = 1 convention.
inline double sat_prob(const Pattern& c, const std::vector<double>& p) {
    int l = c.levels();
    double r = 1.0;
    int half = c.cplus(0) + c.cminus(0);
    for (int h = 0; h < half; ++h) r *= 0.5;
    for (int i = 1; i <= l; ++i) {
        int ep = c.cplus(i) + c.cminus(-i);
        int eq = c.cminus(i) + c.cplus(-i);
        double pi = p[static_cast<size_t>(i - 1)];
        for (int e = 0; e < ep; ++e) r *= pi;
        for (int e = 0; e < eq; ++e) r *= 1.0 - pi;
    }
    return r;
}

inline Rat sat_prob_exact(const Pattern& c, const RoundingVector& rv) {
    int l = c.levels();
    if (rv.levels() != l) throw UserError("sat_prob: pattern/rounding level mismatch");
    Rat r = rat_pow(Rat(1, 2), c.cplus(0) + c.cminus(0));
    for (int i = 1; i <= l; ++i) {
        const Rat& pi = rv.p[static_cast<size_t>(i - 1)];
        int ep = c.cplus(i) + c.cminus(-i);
        int eq = c.cminus(i) + c.cplus(-i);
        if (ep > 0) r *= rat_pow(pi, ep);
        if (eq > 0) r *= rat_pow(1 - pi, eq);
    }
    return r;
}

inline std::vector<double> rounding_as_doubles(const RoundingVector& rv) {
    std::vector<double> p;
    p.reserve(rv.p.size());
    for (const Rat& q : rv.p) p.push_back(to_double(q));
    return p;
}

/// Expected value of the oblivious rounding on `inst`: the weighted average
/// of per-clause satisfaction probabilities.
inline Rat oblivious_value_exact(const Instance& inst, const BiasPartition& part,
                                 const RoundingVector& rv) {
    validate_partition(part);
    validate_rounding(rv, part.levels());
    std::vector<int> cls = bias_classes(inst, part);
    Rat acc = 0;
    for (size_t j = 0; j < inst.clauses.size(); ++j)
        acc += sat_prob_exact(pattern_of_clause(inst, cls, part.levels(), j), rv) *
               inst.clauses[j].weight;
    return acc / total_weight(inst);
}

inline double oblivious_value(const Instance& inst, const BiasPartition& part,
                              const RoundingVector& rv) {
    return to_double(oblivious_value_exact(inst, part, rv));
}

/// One sampled rounding: class 0 -> +1 w.p. 1/2, class +i -> w.p. p_i,
/// class -i -> w.p. 1-p_i, independently per variable. Deterministic per seed.
inline Assignment sample_rounding(const Instance& inst, const BiasPartition& part,
                                  const RoundingVector& rv, uint64_t seed) {
    validate_partition(part);
    validate_rounding(rv, part.levels());
    std::vector<int> cls = bias_classes(inst, part);
    std::vector<double> p = rounding_as_doubles(rv);
    SplitMix64 rng(seed);
    Assignment x(static_cast<size_t>(inst.n));
    for (int v = 1; v <= inst.n; ++v) {
        int c = cls[static_cast<size_t>(v - 1)];
        double q = c == 0 ? 0.5 : (c > 0 ? p[static_cast<size_t>(c - 1)] : 1.0 - p[static_cast<size_t>(-c - 1)]);
        x[static_cast<size_t>(v - 1)] = rng.bernoulli(q) ? +1 : -1;
    }
    return x;
}

/// Normalized weight of each pattern present in the instance. Sums to 1;
/// the sufficient statistic for the oblivious value.
struct SnapshotArray {
    int k = 0;
    int l = 0;
    std::map<Pattern, Rat> weights;
};

inline SnapshotArray snapshot(const Instance& inst, const BiasPartition& part) {
    validate_partition(part);
    SnapshotArray snap;
    snap.k = inst.k;
    snap.l = part.levels();
    std::vector<int> cls = bias_classes(inst, part);
    Rat total = total_weight(inst);
    for (size_t j = 0; j < inst.clauses.size(); ++j)
        snap.weights[pattern_of_clause(inst, cls, snap.l, j)] += inst.clauses[j].weight / total;
    return snap;
}

/// CSV with header "pattern,weight"; rows in canonical pattern order.
inline std::string snapshot_to_csv(const SnapshotArray& snap, bool exact = false) {
    std::vector<std::pair<uint64_t, const std::pair<const Pattern, Rat>*>> rows;
    for (const auto& kv : snap.weights) rows.push_back({pattern_rank(kv.first), &kv});
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::ostringstream out;
    out << "pattern,weight\n";
    for (const auto& [rank, kv] : rows) {
        out << pattern_to_string(kv->first) << ",";
        out << (exact ? rat_to_string(kv->second) : rat_to_decimal(kv->second, 12));
        out << "\n";
    }
    return out.str();
}

struct SnapshotEstimate {
    double lower;     // sum_c prob(c) Mhat(c) - eps; guaranteed <= val when ||Mhat-Snap||_1 <= eps
    double estimate;  // the raw linear combination sum_c prob(c) Mhat(c)
};

/// Value estimate from an approximate snapshot. When ||Mhat - Snap||_1 <= eps
/// and the algorithm has ratio alpha, `lower` lies in
/// [(alpha - 2^{k+1} eps) val, val].
inline SnapshotEstimate snapshot_estimate_value(const std::map<Pattern, double>& m_hat,
                                                const RoundingVector& rv, double eps) {
    std::vector<double> p = rounding_as_doubles(rv);
    double s = 0;
    for (const auto& [c, w] : m_hat) {
        if (w < 0) throw UserError("snapshot estimate entries must be >= 0");
        s += sat_prob(c, p) * w;
    }
    return {s - eps, s};
}

/// Uniform l-interval partition of [0,1] plus the two-piece piecewise-linear
/// rounding curve through (0,1/2) -> (x,y) -> (1,1), sampled at the right
/// endpoint t_i of each positive class.
inline std::pair<BiasPartition, RoundingVector> piecewise_linear_params(int l, const Rat& x,
                                                                        const Rat& y) {
    if (l < 1) throw UserError("piecewise params: l must be >= 1");
    if (!(x > 0 && x < 1)) throw UserError("piecewise params: need 0 < x < 1");
    if (!(y >= Rat(1, 2) && y <= 1)) throw UserError("piecewise params: need 1/2 <= y <= 1");
    BiasPartition part;
    for (int i = 0; i <= l; ++i) part.t.push_back(make_rat(i, l));
    auto f = [&](const Rat& b) -> Rat {
        if (b <= x) return Rat(1, 2) + (y - Rat(1, 2)) * b / x;
        return y + (1 - y) * (b - x) / (1 - x);
    };
    RoundingVector rv;
    for (int i = 1; i <= l; ++i) rv.p.push_back(f(make_rat(i, l)));
    return {part, rv};
}

/// Negating every clause (swapping V+ and V-) mirrors a pattern: positive
/// counts in class i become negative counts in class -i.
inline Pattern negate_pattern(const Pattern& c) {
    int l = c.levels();
    Pattern out = Pattern::zero(l);
    for (int i = -l; i <= l; ++i) {
        out.cminus(-i) = c.cplus(i);
        out.cplus(-i) = c.cminus(i);
    }
    return out;
}

}  // namespace oblivkand
