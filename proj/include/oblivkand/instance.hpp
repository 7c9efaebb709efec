#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oblivkand/rational.hpp"

namespace oblivkand {

/// One Max-kAND constraint: the variables it wants set to +1 (positive) and
/// to -1 (negative), plus a nonnegative weight.
struct Clause {
    std::vector<int> positive;  // sorted, 1-based variable ids
    std::vector<int> negative;  // sorted, disjoint from positive
    Rat weight = 1;

    int arity() const { return static_cast<int>(positive.size() + negative.size()); }
};

struct Instance {
    int k = 0;  // arity of every clause
    int n = 0;  // variable ids range over 1..n
    std::vector<Clause> clauses;
};

/// x[v-1] is +1 or -1.
using Assignment = std::vector<int>;

inline void validate_instance(const Instance& inst) {
    if (inst.k < 2) throw UserError("instance arity k must be >= 2");
    if (inst.n < 1) throw UserError("instance must have at least one variable");
    if (inst.clauses.empty()) throw UserError("instance must have at least one clause");
    Rat total = 0;
    std::vector<char> seen(static_cast<size_t>(inst.n) + 1, 0);
    for (size_t j = 0; j < inst.clauses.size(); ++j) {
        const Clause& c = inst.clauses[j];
        if (c.arity() != inst.k)
            throw UserError("clause " + std::to_string(j + 1) + ": literal count != k");
        if (c.weight < 0)
            throw UserError("clause " + std::to_string(j + 1) + ": negative weight");
        std::set<int> vars;
        for (int side = 0; side < 2; ++side) {
            for (int v : (side == 0 ? c.positive : c.negative)) {
                if (v < 1 || v > inst.n)
                    throw UserError("clause " + std::to_string(j + 1) + ": variable " +
                                    std::to_string(v) + " out of range 1.." + std::to_string(inst.n));
                if (!vars.insert(v).second)
                    throw UserError("clause " + std::to_string(j + 1) + ": repeated variable " +
                                    std::to_string(v));
                seen[static_cast<size_t>(v)] = 1;
            }
        }
        total += c.weight;
    }
    if (total <= 0) throw UserError("total clause weight must be positive");
    for (int v = 1; v <= inst.n; ++v)
        if (!seen[static_cast<size_t>(v)])
            throw UserError("variable " + std::to_string(v) + " appears in no clause");
}

/// Instance file format:
///   # comment lines anywhere
///   kand <k> <n> <m>
///   <w> <±v1> ... <±vk>      (m such lines; w is "p/q" or a decimal)
inline Instance parse_instance(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        size_t h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw UserError("malformed header: empty file");

    Instance inst;
    long m = 0;
    {
        std::istringstream hs(lines[0]);
        std::string tag;
        if (!(hs >> tag) || tag != "kand" || !(hs >> inst.k >> inst.n >> m))
            throw UserError("malformed header: expected 'kand <k> <n> <m>'");
        std::string extra;
        if (hs >> extra) throw UserError("malformed header: trailing tokens");
        if (inst.k < 2 || inst.n < 1 || m < 1) throw UserError("malformed header: bad dimensions");
    }
    if (static_cast<long>(lines.size()) - 1 != m)
        throw UserError("expected " + std::to_string(m) + " clause lines, found " +
                        std::to_string(lines.size() - 1));

    for (long j = 0; j < m; ++j) {
        std::istringstream cs(lines[static_cast<size_t>(j) + 1]);
        std::string wtok;
        if (!(cs >> wtok)) throw UserError("clause " + std::to_string(j + 1) + ": missing weight");
        Clause c;
        c.weight = rat_from_string(wtok);
        std::string lit;
        while (cs >> lit) {
            if (lit.size() < 2 || (lit[0] != '+' && lit[0] != '-'))
                throw UserError("clause " + std::to_string(j + 1) + ": bad literal '" + lit + "'");
            int v;
            try {
                v = std::stoi(lit.substr(1));
            } catch (...) {
                throw UserError("clause " + std::to_string(j + 1) + ": bad literal '" + lit + "'");
            }
            (lit[0] == '+' ? c.positive : c.negative).push_back(v);
        }
        std::sort(c.positive.begin(), c.positive.end());
        std::sort(c.negative.begin(), c.negative.end());
        inst.clauses.push_back(std::move(c));
    }
    validate_instance(inst);
    return inst;
}

/// Canonical serialization: clauses in input order, positive literals
/// ascending then negative ascending, weights as exact rationals.
inline std::string serialize_instance(const Instance& inst) {
    std::ostringstream out;
    out << "kand " << inst.k << " " << inst.n << " " << inst.clauses.size() << "\n";
    for (const Clause& c : inst.clauses) {
        out << rat_to_string(c.weight);
        for (int v : c.positive) out << " +" << v;
        for (int v : c.negative) out << " -" << v;
        out << "\n";
    }
    return out.str();
}

inline Rat total_weight(const Instance& inst) {
    Rat t = 0;
    for (const Clause& c : inst.clauses) t += c.weight;
    return t;
}

/// Weighted fraction of clauses fully satisfied by x.
inline Rat assignment_value(const Instance& inst, const Assignment& x) {
    if (static_cast<int>(x.size()) != inst.n)
        throw UserError("assignment length != n");
    Rat sat = 0;
    for (const Clause& c : inst.clauses) {
        bool ok = true;
        for (int v : c.positive)
            if (x[static_cast<size_t>(v - 1)] != +1) { ok = false; break; }
        if (ok)
            for (int v : c.negative)
                if (x[static_cast<size_t>(v - 1)] != -1) { ok = false; break; }
        if (ok) sat += c.weight;
    }
    return sat / total_weight(inst);
}

struct BruteForceResult {
    Assignment assignment;
    Rat value;
};

/// Exhaustive optimum over all 2^n assignments. Ties break to the
/// lexicographically smallest assignment under +1 < -1. Verification oracle,
/// hence the hard cap on n.
inline BruteForceResult brute_force_optimum(const Instance& inst, int cap = 24) {
    if (inst.n > cap || inst.n > 30)
        throw UserError("brute force: n=" + std::to_string(inst.n) + " exceeds cap " +
                        std::to_string(std::min(cap, 30)));
    // Scale weights to integers over a common denominator so the inner loop
    // stays off GMP when everything fits in 64 bits.
    mpz_class den = 1;
    for (const Clause& c : inst.clauses) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.weight.get_den_mpz_t());
    std::vector<mpz_class> wz;
    mpz_class total_z = 0;
    for (const Clause& c : inst.clauses) {
        mpz_class w = c.weight.get_num() * (den / c.weight.get_den());
        total_z += w;
        wz.push_back(w);
    }
    bool fits64 = total_z.fits_slong_p();

    size_t m = inst.clauses.size();
    std::vector<uint32_t> member_mask(m, 0), negative_mask(m, 0);
    for (size_t j = 0; j < m; ++j) {
        for (int v : inst.clauses[j].positive) member_mask[j] |= 1u << (inst.n - v);
        for (int v : inst.clauses[j].negative) {
            member_mask[j] |= 1u << (inst.n - v);
            negative_mask[j] |= 1u << (inst.n - v);
        }
    }
    // bit set in `mask` means x_v = -1; variable 1 owns the top bit so that
    // ascending masks scan assignments in lexicographic order (+1 < -1)
    uint64_t best_mask = 0;
    auto eval64 = [&](uint64_t mask) {
        int64_t s = 0;
        for (size_t j = 0; j < m; ++j)
            if ((static_cast<uint32_t>(mask) & member_mask[j]) == negative_mask[j])
                s += wz[j].get_si();
        return s;
    };
    auto eval_mpz = [&](uint64_t mask) {
        mpz_class s = 0;
        for (size_t j = 0; j < m; ++j)
            if ((static_cast<uint32_t>(mask) & member_mask[j]) == negative_mask[j]) s += wz[j];
        return s;
    };
    uint64_t limit = 1ull << inst.n;
    if (fits64) {
        int64_t best = -1;
        for (uint64_t mask = 0; mask < limit; ++mask) {
            int64_t s = eval64(mask);
            if (s > best) { best = s; best_mask = mask; }
        }
    } else {
        mpz_class best = -1;
        for (uint64_t mask = 0; mask < limit; ++mask) {
            mpz_class s = eval_mpz(mask);
            if (s > best) { best = s; best_mask = mask; }
        }
    }
    Assignment x(static_cast<size_t>(inst.n), +1);
    for (int v = 1; v <= inst.n; ++v)
        if (best_mask & (1ull << (inst.n - v))) x[static_cast<size_t>(v - 1)] = -1;
    return {x, assignment_value(inst, x)};
}

/// Positive and negative weight of a variable: total weight of clauses where
/// it appears positively / negatively.
inline std::pair<Rat, Rat> variable_weights(const Instance& inst, int v) {
    Rat wp = 0, wm = 0;
    for (const Clause& c : inst.clauses) {
        if (std::binary_search(c.positive.begin(), c.positive.end(), v)) wp += c.weight;
        if (std::binary_search(c.negative.begin(), c.negative.end(), v)) wm += c.weight;
    }
    return {wp, wm};
}

/// (w+ - w-) / (w+ + w-), exact.
inline Rat bias(const Instance& inst, int v) {
    auto [wp, wm] = variable_weights(inst, v);
    if (wp + wm == 0)
        throw UserError("bias: variable " + std::to_string(v) + " has zero total weight");
    return (wp - wm) / (wp + wm);
}

/// Biases of all variables in one pass over the clauses.
inline std::vector<Rat> all_biases(const Instance& inst) {
    std::vector<Rat> wp(static_cast<size_t>(inst.n), 0), wm(static_cast<size_t>(inst.n), 0);
    for (const Clause& c : inst.clauses) {
        for (int v : c.positive) wp[static_cast<size_t>(v - 1)] += c.weight;
        for (int v : c.negative) wm[static_cast<size_t>(v - 1)] += c.weight;
    }
    std::vector<Rat> b(static_cast<size_t>(inst.n));
    for (int v = 1; v <= inst.n; ++v) {
        size_t i = static_cast<size_t>(v - 1);
        if (wp[i] + wm[i] == 0)
            throw UserError("bias: variable " + std::to_string(v) + " has zero total weight");
        b[i] = (wp[i] - wm[i]) / (wp[i] + wm[i]);
    }
    return b;
}

/// Swaps each variable v with y_v = -1 between the positive and negative side
/// of every clause. Involution; weights unchanged.
inline Instance flip(const Instance& inst, const Assignment& y) {
    if (static_cast<int>(y.size()) != inst.n) throw UserError("flip: assignment length != n");
    Instance out;
    out.k = inst.k;
    out.n = inst.n;
    for (const Clause& c : inst.clauses) {
        Clause d;
        d.weight = c.weight;
        for (int v : c.positive)
            (y[static_cast<size_t>(v - 1)] == +1 ? d.positive : d.negative).push_back(v);
        for (int v : c.negative)
            (y[static_cast<size_t>(v - 1)] == -1 ? d.positive : d.negative).push_back(v);
        std::sort(d.positive.begin(), d.positive.end());
        std::sort(d.negative.begin(), d.negative.end());
        out.clauses.push_back(std::move(d));
    }
    return out;
}

/// Two equal-weight clauses on variables 1..k, all-positive and all-negative.
/// Every variable has bias zero; the optimum is 1/2 but any bias-only
/// rounding gets 2^-k.
inline Instance symmetric_pair_instance(int k) {
    if (k < 2) throw UserError("symmetric_pair_instance: k must be >= 2");
    Instance inst;
    inst.k = k;
    inst.n = k;
    Clause pos, neg;
    for (int v = 1; v <= k; ++v) {
        pos.positive.push_back(v);
        neg.negative.push_back(v);
    }
    pos.weight = 1;
    neg.weight = 1;
    inst.clauses = {pos, neg};
    return inst;
}

/// Maximum number of clauses any single variable appears in.
inline int max_degree(const Instance& inst) {
    std::vector<int> deg(static_cast<size_t>(inst.n), 0);
    for (const Clause& c : inst.clauses) {
        for (int v : c.positive) ++deg[static_cast<size_t>(v - 1)];
        for (int v : c.negative) ++deg[static_cast<size_t>(v - 1)];
    }
    return *std::max_element(deg.begin(), deg.end());
}

}  // namespace oblivkand
