#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oblivkand/instance.hpp"
#include "oblivkand/oblivious.hpp"
#include "oblivkand/rng.hpp"

namespace oblivkand {

/// Unit-weight clause sequence ("input form"): the streaming input model.
struct ClauseStream {
    int k = 0;
    int n = 0;
    std::vector<Clause> clauses;
    std::string order_tag = "given";  // "given" or "shuffled(<seed>)"
};

inline ClauseStream stream_from_instance(const Instance& inst) {
    for (const Clause& c : inst.clauses)
        if (c.weight != 1) throw UserError("clause stream requires input form (unit weights)");
    return {inst.k, inst.n, inst.clauses, "given"};
}

inline Instance instance_from_stream(const ClauseStream& s) {
    Instance inst;
    inst.k = s.k;
    inst.n = s.n;
    inst.clauses = s.clauses;
    return inst;
}

/// Uniform random permutation of the clauses (Fisher-Yates), deterministic
/// per seed.
inline ClauseStream shuffle_stream(const Instance& inst, uint64_t seed) {
    ClauseStream s = stream_from_instance(inst);
    SplitMix64 rng(seed, /*stream=*/2);
    rng.shuffle(s.clauses);
    s.order_tag = "shuffled(" + std::to_string(seed) + ")";
    return s;
}

struct EstimatorOutput {
    double estimate = 0;         // sum_c prob(c) Mhat(c) - eps * |Ptn| (the one-sided estimate)
    double linear_estimate = 0;  // sum_c prob(c) Mhat(c)
    std::map<Pattern, double> m_hat;
    uint64_t stored_clauses = 0;
    uint64_t tracked_vars = 0;
    double sampling_rate = 0;
    bool full_storage = false;  // degenerate path: everything stored, Mhat exact
};

namespace detail {

/// Patterns and Mhat -> the Prop-6.1-style outputs. The per-pattern error
/// target eps is folded into the offset as eps * |Ptn|.
inline void finish_estimate(EstimatorOutput& out, const RoundingVector& rv, int k, double eps) {
    std::vector<double> p = rounding_as_doubles(rv);
    double s = 0;
    for (const auto& [c, w] : out.m_hat) s += sat_prob(c, p) * w;
    out.linear_estimate = s;
    out.estimate = s - eps * static_cast<double>(pattern_count(k, rv.levels()));
}

/// Exact biases restricted to a tracked set: per-variable positive/negative
/// occurrence counts over the whole stream (unit weights).
struct BiasTracker {
    std::vector<int64_t> pos, neg;

    explicit BiasTracker(int n) : pos(static_cast<size_t>(n), 0), neg(static_cast<size_t>(n), 0) {}

    void see(const Clause& c, const std::vector<char>& tracked) {
        for (int v : c.positive)
            if (tracked[static_cast<size_t>(v - 1)]) ++pos[static_cast<size_t>(v - 1)];
        for (int v : c.negative)
            if (tracked[static_cast<size_t>(v - 1)]) ++neg[static_cast<size_t>(v - 1)];
    }

    int bias_class_of(const BiasPartition& part, int v) const {
        int64_t wp = pos[static_cast<size_t>(v - 1)], wm = neg[static_cast<size_t>(v - 1)];
        if (wp + wm == 0) throw UserError("tracked variable appears in no clause");
        return bias_class(part, make_rat(wp - wm, wp + wm));
    }
};

}  // namespace detail

/// Random-order estimator: stores the prefix E of ceil(1/q) clauses with
/// q = eps^2 / C, tracks exact biases of every variable in E across the
/// whole stream, and reports the empirical pattern distribution of E.
/// Deterministic given the stream; randomness lives in the upstream shuffle.
inline EstimatorOutput random_order_estimate(const ClauseStream& stream, const BiasPartition& part,
                                             const RoundingVector& rv, double eps, double C) {
    validate_partition(part);
    validate_rounding(rv, part.levels());
    if (eps <= 0 || C <= 0) throw UserError("random_order_estimate: eps and C must be positive");
    double q = eps * eps / C;
    if (q > 1) q = 1;
    uint64_t target = static_cast<uint64_t>(std::ceil(1.0 / q));
    uint64_t m = stream.clauses.size();

    EstimatorOutput out;
    out.sampling_rate = q;
    uint64_t keep = std::min<uint64_t>(target, m);
    out.full_storage = keep == m;

    std::vector<char> tracked(static_cast<size_t>(stream.n), 0);
    detail::BiasTracker biases(stream.n);
    std::vector<const Clause*> stored;
    stored.reserve(keep);
    for (uint64_t j = 0; j < m; ++j) {
        const Clause& c = stream.clauses[static_cast<size_t>(j)];
        if (j < keep) {
            stored.push_back(&c);
            for (int v : c.positive) tracked[static_cast<size_t>(v - 1)] = 1;
            for (int v : c.negative) tracked[static_cast<size_t>(v - 1)] = 1;
        }
        biases.see(c, tracked);
    }
    // tracked biases are exact: every prefix clause is stored, so a stored
    // variable is tracked from its first occurrence in the stream onward
    out.stored_clauses = stored.size();
    for (char t : tracked) out.tracked_vars += t;

    int l = part.levels();
    std::map<Pattern, uint64_t> counts;
    for (const Clause* c : stored) {
        Pattern pat = Pattern::zero(l);
        for (int v : c->positive) ++pat.cplus(biases.bias_class_of(part, v));
        for (int v : c->negative) ++pat.cminus(biases.bias_class_of(part, v));
        ++counts[pat];
    }
    for (const auto& [pat, cnt] : counts)
        out.m_hat[pat] = static_cast<double>(cnt) / static_cast<double>(stored.size());
    detail::finish_estimate(out, rv, stream.k, eps);
    return out;
}

/// Bounded-degree estimator: samples S by including each variable with
/// probability q = (C D / (m eps^2))^(1/k), stores every clause fully inside
/// S, tracks biases of S, and scales counts by q^-k.
inline EstimatorOutput bounded_degree_estimate(const ClauseStream& stream, int D, uint64_t m,
                                               const BiasPartition& part, const RoundingVector& rv,
                                               double eps, double C, uint64_t seed) {
    validate_partition(part);
    validate_rounding(rv, part.levels());
    if (eps <= 0 || C <= 0 || D < 1) throw UserError("bounded_degree_estimate: bad parameters");
    if (m != stream.clauses.size())
        throw UserError("bounded_degree_estimate: declared m != stream length");
    double q = std::pow(C * D / (static_cast<double>(m) * eps * eps), 1.0 / stream.k);

    EstimatorOutput out;
    if (q >= 1) {
        q = 1;
        out.full_storage = true;
    }
    out.sampling_rate = q;

    SplitMix64 rng(seed, /*stream=*/3);
    std::vector<char> in_s(static_cast<size_t>(stream.n), 0);
    for (int v = 1; v <= stream.n; ++v)
        in_s[static_cast<size_t>(v - 1)] = q >= 1 ? 1 : (rng.bernoulli(q) ? 1 : 0);
    for (char t : in_s) out.tracked_vars += t;

    detail::BiasTracker biases(stream.n);
    std::vector<const Clause*> stored;
    for (const Clause& c : stream.clauses) {
        bool all_in = true;
        for (int v : c.positive)
            if (!in_s[static_cast<size_t>(v - 1)]) { all_in = false; break; }
        if (all_in)
            for (int v : c.negative)
                if (!in_s[static_cast<size_t>(v - 1)]) { all_in = false; break; }
        if (all_in) stored.push_back(&c);
        biases.see(c, in_s);
    }
    out.stored_clauses = stored.size();

    int l = part.levels();
    double scale = 1.0 / (std::pow(q, stream.k) * static_cast<double>(m));
    std::map<Pattern, uint64_t> counts;
    for (const Clause* c : stored) {
        Pattern pat = Pattern::zero(l);
        for (int v : c->positive) ++pat.cplus(biases.bias_class_of(part, v));
        for (int v : c->negative) ++pat.cminus(biases.bias_class_of(part, v));
        ++counts[pat];
    }
    for (const auto& [pat, cnt] : counts) out.m_hat[pat] = static_cast<double>(cnt) * scale;
    detail::finish_estimate(out, rv, stream.k, eps);
    return out;
}

enum class BiasProfileKind { Uniform, Skewed, Planted };

struct BiasProfile {
    BiasProfileKind kind = BiasProfileKind::Uniform;
    double q = 0.5;        // Skewed: P(literal negative); Planted: P(literal agrees)
    Assignment planted;    // Planted: the hidden assignment (length n)
};

/// Random unit-weight instance: m clauses of k distinct variables each.
/// Every variable appears at least once; an optional degree cap bounds
/// clause membership per variable. Deterministic per seed.
inline Instance generate_random_instance(int k, int n, uint64_t m, const BiasProfile& profile,
                                         int degree_cap, uint64_t seed) {
    if (k < 2 || n < k || m < 1) throw UserError("generator: need k >= 2, n >= k, m >= 1");
    uint64_t slots = m * static_cast<uint64_t>(k);
    if (slots < static_cast<uint64_t>(n))
        throw UserError("generator: m*k < n, some variable would appear in no clause");
    if (degree_cap > 0 && slots > static_cast<uint64_t>(n) * static_cast<uint64_t>(degree_cap))
        throw UserError("generator: infeasible degree cap (m*k > n*cap)");
    if (profile.kind == BiasProfileKind::Planted &&
        static_cast<int>(profile.planted.size()) != n)
        throw UserError("generator: planted assignment length != n");

    // Token pool: one copy of each variable (guaranteeing coverage) plus
    // extras drawn under the per-variable allowance. Each clause consumes k
    // tokens with distinct variables; tokens whose variable is already in the
    // clause are set aside and returned afterwards. A rare end-game deadlock
    // (fewer than k distinct variables left) restarts with a fresh stream.
    for (uint64_t attempt = 0; attempt < 50; ++attempt) {
        SplitMix64 rng(seed, /*stream=*/100 + attempt);
        std::vector<int> pool;
        pool.reserve(slots);
        for (int v = 1; v <= n; ++v) pool.push_back(v);
        uint64_t extras = slots - static_cast<uint64_t>(n);
        if (degree_cap > 0) {
            std::vector<int> allowance;
            allowance.reserve(static_cast<size_t>(n) * static_cast<size_t>(degree_cap - 1));
            for (int v = 1; v <= n; ++v)
                for (int d = 1; d < degree_cap; ++d) allowance.push_back(v);
            rng.shuffle(allowance);
            for (uint64_t e = 0; e < extras; ++e) pool.push_back(allowance[static_cast<size_t>(e)]);
        } else {
            for (uint64_t e = 0; e < extras; ++e)
                pool.push_back(1 + static_cast<int>(rng.below(static_cast<uint64_t>(n))));
        }

        Instance inst;
        inst.k = k;
        inst.n = n;
        inst.clauses.reserve(m);
        bool deadlock = false;
        std::vector<int> set_aside;
        for (uint64_t j = 0; j < m && !deadlock; ++j) {
            Clause c;
            c.weight = 1;
            std::vector<int> members;
            set_aside.clear();
            while (static_cast<int>(members.size()) < k) {
                if (pool.empty()) {
                    deadlock = true;
                    break;
                }
                size_t idx = static_cast<size_t>(rng.below(pool.size()));
                int v = pool[idx];
                pool[idx] = pool.back();
                pool.pop_back();
                if (std::find(members.begin(), members.end(), v) != members.end()) {
                    set_aside.push_back(v);
                    continue;
                }
                members.push_back(v);
            }
            pool.insert(pool.end(), set_aside.begin(), set_aside.end());
            if (deadlock) break;
            for (int v : members) {
                bool negative;
                switch (profile.kind) {
                    case BiasProfileKind::Uniform: negative = rng.bernoulli(0.5); break;
                    case BiasProfileKind::Skewed: negative = rng.bernoulli(profile.q); break;
                    case BiasProfileKind::Planted: {
                        bool agree = rng.bernoulli(profile.q);
                        bool plus = profile.planted[static_cast<size_t>(v - 1)] == +1;
                        negative = agree ? !plus : plus;
                        break;
                    }
                    default: negative = false;
                }
                (negative ? c.negative : c.positive).push_back(v);
            }
            std::sort(c.positive.begin(), c.positive.end());
            std::sort(c.negative.begin(), c.negative.end());
            inst.clauses.push_back(std::move(c));
        }
        if (deadlock) continue;
        validate_instance(inst);
        return inst;
    }
    throw UserError("generator: could not place clauses under the degree constraints");
}

}  // namespace oblivkand
