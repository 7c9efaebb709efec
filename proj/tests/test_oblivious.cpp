#include <doctest.h>

#include "oblivkand/oblivious.hpp"
#include "oblivkand/streaming.hpp"

using namespace oblivkand;

namespace {

const BiasPartition kSign{{Rat(0), Rat(1)}};  // superoblivious split

Rat random_rat01(SplitMix64& rng) { return make_rat(static_cast<long>(rng.below(1001)), 1000); }

/// Independent oracle: expected value over all assignments weighted by the
/// product of per-variable rounding probabilities.
Rat exhaustive_expected_value(const Instance& inst, const BiasPartition& part,
                              const RoundingVector& rv) {
    std::vector<int> cls = bias_classes(inst, part);
    std::vector<Rat> p_plus(static_cast<size_t>(inst.n));
    for (int v = 1; v <= inst.n; ++v) {
        int c = cls[static_cast<size_t>(v - 1)];
        if (c == 0) p_plus[static_cast<size_t>(v - 1)] = make_rat(1, 2);
        else if (c > 0) p_plus[static_cast<size_t>(v - 1)] = rv.p[static_cast<size_t>(c - 1)];
        else p_plus[static_cast<size_t>(v - 1)] = 1 - rv.p[static_cast<size_t>(-c - 1)];
    }
    Rat total = 0;
    for (uint32_t mask = 0; mask < (1u << inst.n); ++mask) {
        Assignment x(static_cast<size_t>(inst.n));
        Rat prob = 1;
        for (int v = 1; v <= inst.n; ++v) {
            bool plus = !(mask & (1u << (v - 1)));
            x[static_cast<size_t>(v - 1)] = plus ? +1 : -1;
            prob *= plus ? p_plus[static_cast<size_t>(v - 1)] : 1 - p_plus[static_cast<size_t>(v - 1)];
        }
        total += prob * assignment_value(inst, x);
    }
    return total;
}

}  // namespace

TEST_CASE("pattern enumeration counts match stars and bars") {
    CHECK(enumerate_patterns(2, 1).size() == 21);
    CHECK(enumerate_patterns(3, 1).size() == 56);
    for (int k = 2; k <= 8; ++k)
        for (int l = 1; l <= 3; ++l) {
            uint64_t expect = binomial(k + 2 * (2 * l + 1) - 1, 2 * (2 * l + 1) - 1);
            CHECK(pattern_count(k, l) == expect);
            uint64_t visited = 0;
            for_each_pattern(k, l, [&](const Pattern& c) {
                ++visited;
                (void)c;
            });
            CHECK(visited == expect);
        }
}

TEST_CASE("first pattern and ranks") {
    for (int k : {2, 4}) {
        for (int l : {1, 2}) {
            auto pats = enumerate_patterns(k, l);
            CHECK(pats.front().cplus(-l) == k);
            CHECK(pats.front().total() == k);
            for (size_t i = 0; i < pats.size(); i += 7) CHECK(pattern_rank(pats[i]) == i);
        }
    }
}

TEST_CASE("bias_class follows the half-open interval convention") {
    CHECK(bias_class(kSign, Rat(0)) == 0);
    CHECK(bias_class(kSign, make_rat(1, 2)) == 1);
    CHECK(bias_class(kSign, make_rat(-1, 2)) == -1);
    CHECK(bias_class(kSign, Rat(1)) == 1);
    CHECK(bias_class(kSign, Rat(-1)) == -1);

    // right end of (0, 1/4] is closed
    BiasPartition fine{{Rat(0), make_rat(1, 4), make_rat(1, 2), Rat(1)}};
    CHECK(bias_class(fine, make_rat(1, 4)) == 1);
    CHECK(bias_class(fine, make_rat(-1, 4)) == -1);  // [-1/4, 0) is closed on the left
    CHECK(bias_class(fine, make_rat(26, 100)) == 2);

    // with t0 = 1/4 the central class [-1/4, 1/4] is closed on both ends
    BiasPartition wide{{make_rat(1, 4), make_rat(1, 2), Rat(1)}};
    CHECK(bias_class(wide, make_rat(1, 4)) == 0);
    CHECK(bias_class(wide, make_rat(-1, 4)) == 0);
    CHECK(bias_class(wide, make_rat(3, 10)) == 1);

    CHECK_THROWS_AS(bias_class(kSign, Rat(2)), UserError);
}

TEST_CASE("bias_class agrees with direct interval membership") {
    SplitMix64 rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        BiasPartition part{{make_rat(static_cast<long>(rng.below(3)), 10),
                            make_rat(static_cast<long>(rng.below(4)) + 4, 10), Rat(1)}};
        Rat b = random_rat01(rng) * 2 - 1;
        int cls = bias_class(part, b);
        // membership per the definition: class 0 = [-t0,t0], +i = (t_{i-1},t_i], -i mirrored
        int hits = 0;
        int l = part.levels();
        if (-part.t[0] <= b && b <= part.t[0]) { CHECK(cls == 0); ++hits; }
        for (int i = 1; i <= l; ++i) {
            if (part.t[static_cast<size_t>(i - 1)] < b && b <= part.t[static_cast<size_t>(i)]) {
                CHECK(cls == i);
                ++hits;
            }
            if (-part.t[static_cast<size_t>(i)] <= b && b < -part.t[static_cast<size_t>(i - 1)]) {
                CHECK(cls == -i);
                ++hits;
            }
        }
        CHECK(hits == 1);
    }
}

TEST_CASE("pattern_of_clause") {
    Instance pair = symmetric_pair_instance(2);
    Pattern c0 = pattern_of_clause(pair, kSign, 0);
    CHECK(c0.cplus(0) == 2);
    CHECK(c0.total() == 2);
    Pattern c1 = pattern_of_clause(pair, kSign, 1);
    CHECK(c1.cminus(0) == 2);

    Instance mixed = parse_instance("kand 2 2 1\n1 +1 -2\n");
    // bias(1) = +1, bias(2) = -1
    Pattern cm = pattern_of_clause(mixed, kSign, 0);
    CHECK(cm.cplus(1) == 1);
    CHECK(cm.cminus(-1) == 1);
}

TEST_CASE("sat_prob powers") {
    // all positive literals in class +1: q^k
    for (int k : {2, 3, 5}) {
        Pattern c = Pattern::zero(1);
        c.cplus(1) = k;
        CHECK(sat_prob_exact(c, RoundingVector{{make_rat(3, 10)}}) == rat_pow(make_rat(3, 10), k));
    }
}

TEST_CASE("sat_prob central and mixed") {
    Pattern central = Pattern::zero(1);
    central.cplus(0) = 1;
    central.cminus(0) = 2;
    CHECK(sat_prob_exact(central, RoundingVector{{make_rat(9, 10)}}) == make_rat(1, 8));

    // k=2: positive literal and negative literal both on class +1 variables,
    // p = 2/3; enumerating the four rounding outcomes gives 2/3 * 1/3 = 2/9
    Pattern c = Pattern::zero(1);
    c.cplus(1) = 1;
    c.cminus(1) = 1;
    CHECK(sat_prob_exact(c, RoundingVector{{make_rat(2, 3)}}) == make_rat(2, 9));

    // 0^0 = 1 convention: a pattern avoiding the p=0 factor entirely
    Pattern pos = Pattern::zero(1);
    pos.cplus(1) = 2;
    CHECK(sat_prob_exact(pos, RoundingVector{{Rat(1)}}) == 1);
    CHECK(sat_prob_exact(pos, RoundingVector{{Rat(0)}}) == 0);
    Pattern neg = Pattern::zero(1);
    neg.cminus(1) = 2;
    CHECK(sat_prob_exact(neg, RoundingVector{{Rat(0)}}) == 1);
    CHECK(sat_prob(neg, {0.0}) == 1.0);
}

TEST_CASE("sat_prob stays within [0,1]") {
    SplitMix64 rng(31);
    RoundingVector rv{{random_rat01(rng)}};
    for (const Pattern& c : enumerate_patterns(4, 1)) {
        Rat s = sat_prob_exact(c, rv);
        CHECK(s >= 0);
        CHECK(s <= 1);
    }
}

TEST_CASE("oblivious_value on the symmetric pair is 2^-k") {
    SplitMix64 rng(41);
    for (int k = 2; k <= 5; ++k) {
        Instance pair = symmetric_pair_instance(k);
        for (int trial = 0; trial < 5; ++trial) {
            Rat t0 = make_rat(static_cast<long>(rng.below(5)), 10);
            BiasPartition part{{t0, Rat(1)}};
            RoundingVector rv{{random_rat01(rng)}};
            CHECK(oblivious_value_exact(pair, part, rv) == rat_pow(Rat(2), -k));
        }
    }
}

TEST_CASE("oblivious_value trivial and oracle cases") {
    Instance pos = parse_instance("kand 2 2 1\n1 +1 +2\n");
    CHECK(oblivious_value_exact(pos, kSign, RoundingVector{{Rat(1)}}) == 1);

    // exhaustive expectation oracle on random n=8 instances
    BiasProfile uniform;
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        Instance inst = generate_random_instance(2, 8, 12, uniform, 0, seed);
        BiasPartition part{{make_rat(1, 5), Rat(1)}};
        RoundingVector rv{{make_rat(7, 10)}};
        CHECK(oblivious_value_exact(inst, part, rv) == exhaustive_expected_value(inst, part, rv));
    }
}

TEST_CASE("oblivious_value is flip invariant") {
    BiasProfile uniform;
    SplitMix64 rng(51);
    Instance inst = generate_random_instance(2, 6, 9, uniform, 0, 77);
    BiasPartition part{{make_rat(1, 10), make_rat(1, 2), Rat(1)}};
    RoundingVector rv{{make_rat(3, 5), make_rat(4, 5)}};
    Rat base = oblivious_value_exact(inst, part, rv);
    for (int trial = 0; trial < 8; ++trial) {
        Assignment y(6);
        for (auto& v : y) v = rng.bernoulli(0.5) ? +1 : -1;
        CHECK(oblivious_value_exact(flip(inst, y), part, rv) == base);
    }
}

TEST_CASE("negation symmetry") {
    // negating every clause mirrors patterns and preserves satisfaction
    // probability at the same rounding vector
    SplitMix64 rng(61);
    RoundingVector rv{{random_rat01(rng)}};
    for (const Pattern& c : enumerate_patterns(3, 1))
        CHECK(sat_prob_exact(negate_pattern(c), rv) == sat_prob_exact(c, rv));

    BiasProfile uniform;
    Instance inst = generate_random_instance(2, 6, 9, uniform, 0, 78);
    Assignment all_minus(6, -1);
    BiasPartition part{{make_rat(1, 10), Rat(1)}};
    CHECK(oblivious_value_exact(flip(inst, all_minus), part, rv) ==
          oblivious_value_exact(inst, part, rv));
}

TEST_CASE("sample_rounding") {
    Instance pos = parse_instance("kand 2 2 1\n1 +1 +2\n");
    Assignment x = sample_rounding(pos, kSign, RoundingVector{{Rat(1)}}, 7);
    CHECK(x == Assignment{+1, +1});

    BiasProfile uniform;
    Instance inst = generate_random_instance(2, 6, 9, uniform, 0, 79);
    CHECK(sample_rounding(inst, kSign, RoundingVector{{make_rat(2, 3)}}, 12345) ==
          sample_rounding(inst, kSign, RoundingVector{{make_rat(2, 3)}}, 12345));

    // Monte-Carlo mean of sampled values approaches the exact expectation
    RoundingVector rv{{make_rat(2, 3)}};
    Rat exact = oblivious_value_exact(inst, kSign, rv);
    double mean = 0;
    const int runs = 100000;
    for (int s = 0; s < runs; ++s)
        mean += to_double(assignment_value(inst, sample_rounding(inst, kSign, rv, static_cast<uint64_t>(s))));
    mean /= runs;
    // the value is an average of indicators in [0,1]; 3 sigma with sigma <= 0.5/sqrt(runs)
    CHECK(std::fabs(mean - to_double(exact)) < 3.0 * 0.5 / std::sqrt(static_cast<double>(runs)));
}

TEST_CASE("snapshot") {
    Instance pair = symmetric_pair_instance(2);
    SnapshotArray snap = snapshot(pair, kSign);
    REQUIRE(snap.weights.size() == 2);
    Pattern pos = Pattern::zero(1), neg = Pattern::zero(1);
    pos.cplus(0) = 2;
    neg.cminus(0) = 2;
    CHECK(snap.weights.at(pos) == make_rat(1, 2));
    CHECK(snap.weights.at(neg) == make_rat(1, 2));

    Instance one = parse_instance("kand 2 2 1\n1 +1 -2\n");
    CHECK(snapshot(one, kSign).weights.size() == 1);
}

TEST_CASE("snapshot sums to one and reproduces the oblivious value") {
    BiasProfile uniform;
    for (uint64_t seed : {4ull, 5ull}) {
        Instance inst = generate_random_instance(3, 7, 11, uniform, 0, seed);
        BiasPartition part{{make_rat(1, 4), Rat(1)}};
        RoundingVector rv{{make_rat(5, 8)}};
        SnapshotArray snap = snapshot(inst, part);
        Rat total = 0, value = 0;
        for (const auto& [c, w] : snap.weights) {
            total += w;
            value += sat_prob_exact(c, rv) * w;
        }
        CHECK(total == 1);
        CHECK(value == oblivious_value_exact(inst, part, rv));
    }
}

TEST_CASE("snapshot_estimate_value") {
    Instance pair = symmetric_pair_instance(2);
    SnapshotArray snap = snapshot(pair, kSign);
    RoundingVector rv{{make_rat(2, 3)}};
    std::map<Pattern, double> m_hat;
    for (const auto& [c, w] : snap.weights) m_hat[c] = to_double(w);

    SnapshotEstimate est = snapshot_estimate_value(m_hat, rv, 0.0);
    CHECK(est.estimate == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(est.lower == doctest::Approx(0.25).epsilon(1e-12));

    // perturbing one entry by delta moves the estimate by at most delta
    auto bumped = m_hat;
    bumped.begin()->second += 0.01;
    SnapshotEstimate est2 = snapshot_estimate_value(bumped, rv, 0.0);
    CHECK(std::fabs(est2.estimate - est.estimate) <= 0.01 + 1e-15);

    CHECK_THROWS_AS(snapshot_estimate_value({{Pattern::zero(1), -0.5}}, rv, 0.0), UserError);
}

TEST_CASE("piecewise_linear_params") {
    {
        auto [part, rv] = piecewise_linear_params(1, make_rat(1, 2), make_rat(3, 4));
        CHECK(part.t == std::vector<Rat>{Rat(0), Rat(1)});
        CHECK(rv.p == std::vector<Rat>{Rat(1)});
    }
    {
        auto [part, rv] = piecewise_linear_params(2, make_rat(1, 2), make_rat(3, 4));
        CHECK(part.t == std::vector<Rat>{Rat(0), make_rat(1, 2), Rat(1)});
        CHECK(rv.p == std::vector<Rat>{make_rat(3, 4), Rat(1)});
    }
    // f(0)=1/2 and f(1)=1 with a nondecreasing profile
    SplitMix64 rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        Rat x = make_rat(static_cast<long>(rng.below(98)) + 1, 100);
        Rat y = make_rat(static_cast<long>(rng.below(51)) + 50, 100);
        auto [part, rv] = piecewise_linear_params(4, x, y);
        Rat prev = make_rat(1, 2);
        for (const Rat& p : rv.p) {
            CHECK(p >= prev);
            prev = p;
        }
        CHECK(rv.p.back() == 1);
    }
    CHECK_THROWS_AS(piecewise_linear_params(2, Rat(0), make_rat(3, 4)), UserError);
    CHECK_THROWS_AS(piecewise_linear_params(2, make_rat(1, 2), make_rat(1, 4)), UserError);
}

TEST_CASE("pattern string round trip") {
    for (const Pattern& c : enumerate_patterns(3, 1))
        CHECK(pattern_from_string(pattern_to_string(c)) == c);
}

TEST_CASE("snapshot CSV") {
    Instance pair = symmetric_pair_instance(2);
    SnapshotArray snap = snapshot(pair, kSign);
    std::string csv = snapshot_to_csv(snap, true);
    CHECK(csv == "pattern,weight\n0:2:0|0:0:0,1/2\n0:0:0|0:2:0,1/2\n");
    std::string dec = snapshot_to_csv(snap, false);
    CHECK(dec.find("0.5") != std::string::npos);
}
