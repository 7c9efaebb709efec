#include <doctest.h>

#include "oblivkand/certificates.hpp"
#include "oblivkand/factor_lp.hpp"
#include "oblivkand/streaming.hpp"

using namespace oblivkand;

namespace {

const BiasPartition kSign{{Rat(0), Rat(1)}};
const RoundingVector kTwoThirds{{make_rat(2, 3)}};

Instance small_random(int k, int n, uint64_t m, uint64_t seed) {
    BiasProfile uniform;
    return generate_random_instance(k, n, m, uniform, 0, seed);
}

}  // namespace

TEST_CASE("build_primal shape for k=2, sign split") {
    StandardFormLP lp = build_primal(2, kSign, kTwoThirds);
    CHECK(lp.num_vars == 21);
    CHECK(lp.eq_rows.size() == 1);
    CHECK(lp.le_rows.size() == 6);

    // with t0 = 0 the two class-0 rows are exact negations:
    // W+(0) - W-(0) <= 0 and W-(0) - W+(0) <= 0
    const LPRow& upper0 = lp.le_rows[1];  // class i=0 upper row (order: -1, 0, +1)
    const LPRow& lower0 = lp.le_rows[4];
    REQUIRE(upper0.coeffs.size() == lower0.coeffs.size());
    for (size_t t = 0; t < upper0.coeffs.size(); ++t) {
        CHECK(upper0.coeffs[t].first == lower0.coeffs[t].first);
        CHECK(upper0.coeffs[t].second == doctest::Approx(-lower0.coeffs[t].second));
    }

    // objective coefficient of the all-central positive pattern is 2^-k
    Pattern central = Pattern::zero(1);
    central.cplus(0) = 2;
    CHECK(lp.objective[pattern_rank(central)] == doctest::Approx(0.25));
}

TEST_CASE("build_dual shape for k=2, sign split") {
    StandardFormLP lp = build_dual(2, kSign, kTwoThirds);
    CHECK(lp.num_vars == 8);  // z+, z-, and 2L = 6 nonnegative y's
    CHECK(lp.eq_rows.empty());
    CHECK(lp.le_rows.size() == 21);
    // all-zero point is feasible since prob >= 0
    CHECK(check_feasible(lp, std::vector<double>(8, 0.0), 1e-12).pass);
}

TEST_CASE("approximation ratios at the optimal single threshold") {
    CHECK(approximation_ratio(2, kSign, kTwoThirds).ratio == doctest::Approx(4.0 / 9).epsilon(1e-8));
    CHECK(approximation_ratio(3, kSign, kTwoThirds).ratio == doctest::Approx(2.0 / 9).epsilon(1e-8));
}

TEST_CASE("perturbed ratio reproduces the reference value") {
    BiasPartition part{{rat_from_string("0.01"), Rat(1)}};
    RoundingVector rv{{rat_from_string("0.667667")}};
    double r = approximation_ratio(2, part, rv).ratio;
    CHECK(std::fabs(r - 0.4457) < 5e-4);
    CHECK(r > 4.0 / 9);
}

TEST_CASE("strong duality on small models") {
    SplitMix64 rng(19);
    for (int k : {2, 3, 4}) {
        for (int l : {1, 2}) {
            BiasPartition part;
            if (l == 1) part = BiasPartition{{make_rat(static_cast<long>(rng.below(3)), 10), Rat(1)}};
            else
                part = BiasPartition{{make_rat(static_cast<long>(rng.below(2)), 10),
                                      make_rat(static_cast<long>(rng.below(3)) + 4, 10), Rat(1)}};
            RoundingVector rv;
            for (int i = 0; i < l; ++i)
                rv.p.push_back(make_rat(static_cast<long>(rng.below(1001)), 1000));
            double primal = approximation_ratio(k, part, rv).ratio;
            double dual = approximation_ratio_dual(k, part, rv);
            CHECK(std::fabs(primal - dual) < 1e-6);
        }
    }
}

TEST_CASE("weak duality: scaled dual points stay below witness objectives") {
    SplitMix64 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        Instance inst = small_random(2, 6, 8, 300 + trial);
        FeasibleWeights w = witness_solution_from_instance(inst, kSign);
        Rat primal_obj = objective_value_exact(w, kTwoThirds);
        StandardFormLP dual = build_dual(2, kSign, kTwoThirds);
        LPResult opt = solve(dual);
        REQUIRE(opt.status == LPStatus::Optimal);
        double scale = rng.unit();
        std::vector<double> point = opt.solution;
        for (double& x : point) x *= scale;
        CHECK(check_feasible(dual, point, 1e-7).pass);
        double dual_value = point[0] - point[1];
        CHECK(dual_value <= to_double(primal_obj) + 1e-7);
    }
}

TEST_CASE("witness solutions are exactly feasible with objective Obl/val") {
    // the symmetric pair: objective (1/4) / (1/2) = 1/2
    FeasibleWeights w = witness_solution_from_instance(symmetric_pair_instance(2), kSign);
    CHECK(check_weights_feasible_exact(w, 2, kSign).feasible);
    CHECK(objective_value_exact(w, kTwoThirds) == make_rat(1, 2));

    // single all-positive clause: all mass on one positive pattern
    Instance one = parse_instance("kand 2 2 1\n1 +1 +2\n");
    FeasibleWeights w1 = witness_solution_from_instance(one, kSign);
    REQUIRE(w1.size() == 1);
    CHECK(w1.begin()->second == 1);
    CHECK(objective_value_exact(w1, kTwoThirds) ==
          sat_prob_exact(w1.begin()->first, kTwoThirds));

    for (uint64_t seed = 0; seed < 8; ++seed) {
        int k = seed % 2 == 0 ? 2 : 3;
        Instance inst = small_random(k, 4 + static_cast<int>(seed % 5), 6 + seed % 6, 400 + seed);
        FeasibleWeights wr = witness_solution_from_instance(inst, kSign);
        CHECK(check_weights_feasible_exact(wr, k, kSign).worst == 0);
        Rat obl = oblivious_value_exact(inst, kSign, kTwoThirds);
        Rat val = brute_force_optimum(inst).value;
        CHECK(objective_value_exact(wr, kTwoThirds) == obl / val);
        double lp_value = approximation_ratio(k, kSign, kTwoThirds).ratio;
        CHECK(lp_value <= to_double(obl / val) + 1e-7);
    }
}

TEST_CASE("nice_solution leaves nice inputs alone and fixes tight rows") {
    FeasibleWeights already = superoblivious_hard_solution(2);
    // make a W that is tight only on the class +1 lower row
    FeasibleWeights w;
    Pattern pos = Pattern::zero(1), neg = Pattern::zero(1), bal = Pattern::zero(1);
    pos.cplus(0) = 2;
    neg.cminus(0) = 2;
    bal.cplus(1) = 1;
    bal.cminus(1) = 1;
    w[pos] = 1;
    w[neg] = 1;
    w[bal] = 1;
    REQUIRE(check_weights_feasible_exact(w, 2, kSign).feasible);
    REQUIRE(!is_nice(w, kSign));

    FeasibleWeights fixed = nice_solution(w, 2, kSign, make_rat(1, 1000));
    CHECK(check_weights_feasible_exact(fixed, 2, kSign).feasible);
    CHECK(is_nice(fixed, kSign));
    // class -1 untouched mass stays zero except the added repair pair
    WeightRowValues rows = weight_row_values(fixed, 1);
    CHECK(rows.wplus[2] - rows.wminus[2] > 0);  // strict slack at class +1

    // a nice input comes back unchanged (it is already normalized)
    FeasibleWeights nice_in = nice_solution(fixed, 2, kSign, make_rat(1, 1000));
    CHECK(nice_in == fixed);

    // objective drift is O(eps)
    RoundingVector rv{{make_rat(2, 3)}};
    for (long den : {1000L, 10000L}) {
        FeasibleWeights out = nice_solution(w, 2, kSign, make_rat(1, den));
        Rat drift = abs(objective_value_exact(out, rv) - objective_value_exact(w, rv));
        CHECK(drift < Rat(10) / den);
    }

    FeasibleWeights bad = w;
    bad[pos] = -1;
    CHECK_THROWS_AS(nice_solution(bad, 2, kSign, make_rat(1, 1000)), UserError);
}

TEST_CASE("instance synthesis realizes nice solutions") {
    // the symmetric-pair witness needs the niceness repair (classes +-1 are empty)
    FeasibleWeights w = witness_solution_from_instance(symmetric_pair_instance(2), kSign);
    CHECK_THROWS_AS(instance_from_solution(w, 2, kSign), UserError);
    FeasibleWeights nice = nice_solution(w, 2, kSign);
    Instance inst = instance_from_solution(nice, 2, kSign);
    CHECK(inst.n == 6);  // k variables for each of the 3 classes
    Rat obl = oblivious_value_exact(inst, kSign, kTwoThirds);
    Rat val = brute_force_optimum(inst).value;
    CHECK(std::fabs(to_double(obl / val) - 0.5) < 1e-4);

    // every synthesized clause recovers its source pattern, and the
    // per-variable weights follow the counting identity w+ = W+(i)/k
    std::vector<int> cls = bias_classes(inst, kSign);
    SnapshotArray snap = snapshot(inst, kSign);
    for (const auto& [c, weight] : snap.weights) CHECK(nice.count(c) == 1);
    WeightRowValues rows = weight_row_values(nice, 1);
    Rat scale = 0;  // synthesized total weight equals sum of W
    for (const auto& [c, weight] : nice) scale += weight;
    for (int v = 1; v <= inst.n; ++v) {
        auto [wp, wm] = variable_weights(inst, v);
        int i = cls[static_cast<size_t>(v - 1)];
        CHECK(wp == rows.wplus[static_cast<size_t>(i + 1)] / 2);
        CHECK(wm == rows.wminus[static_cast<size_t>(i + 1)] / 2);
    }
    (void)scale;
}

TEST_CASE("round trip: synthesized instance reproduces the weights up to eps") {
    // the niceness repair moves O(eps) mass, and the optimum of the
    // synthesized instance may flip a repair class, so compare the two
    // pattern distributions rather than the raw maps
    Rat eps = make_rat(1, 100000);
    FeasibleWeights nice = nice_solution(
        witness_solution_from_instance(symmetric_pair_instance(2), kSign), 2, kSign, eps);
    Instance inst = instance_from_solution(nice, 2, kSign);
    FeasibleWeights back = witness_solution_from_instance(inst, kSign);
    Rat total_nice = 0, total_back = 0;
    for (const auto& [c, weight] : nice) total_nice += weight;
    for (const auto& [c, weight] : back) total_back += weight;
    FeasibleWeights diff;
    for (const auto& [c, weight] : nice) diff[c] += weight / total_nice;
    for (const auto& [c, weight] : back) diff[c] -= weight / total_back;
    Rat l1 = 0;
    for (const auto& [c, d] : diff) l1 += abs(d);
    CHECK(l1 <= 20 * eps);
}

TEST_CASE("clause cap guards the synthesis blowup") {
    FeasibleWeights nice =
        nice_solution(witness_solution_from_instance(symmetric_pair_instance(3), kSign), 3, kSign);
    CHECK_THROWS_AS(instance_from_solution(nice, 3, kSign, 2), UserError);
}

TEST_CASE("superoblivious hard solutions") {
    // k=2: weights 2/3, 1/3, 2/3 on the balanced, majority and negated patterns
    FeasibleWeights w2 = superoblivious_hard_solution(2);
    Pattern a = Pattern::zero(1), b = Pattern::zero(1), d = Pattern::zero(1);
    a.cplus(-1) = 1;
    a.cplus(1) = 1;
    b.cplus(1) = 2;
    d.cminus(-1) = 1;
    d.cminus(1) = 1;
    CHECK(w2.at(a) == make_rat(2, 3));
    CHECK(w2.at(b) == make_rat(1, 3));
    CHECK(w2.at(d) == make_rat(2, 3));

    for (int k = 2; k <= 12; ++k)
        CHECK(check_weights_feasible_exact(superoblivious_hard_solution(k), k, kSign).worst == 0);

    // the objective as a function of p is r_k(p) normalized
    for (int k = 2; k <= 6; ++k) {
        FeasibleWeights w = superoblivious_hard_solution(k);
        for (long num = 0; num <= 10; ++num) {
            Rat p = make_rat(num, 10);
            CHECK(objective_value_exact(w, RoundingVector{{p}}) ==
                  r_k_exact(k, p) / r_k_normalizer(k));
        }
    }
}

TEST_CASE("objective curve peaks at p_star") {
    FeasibleWeights w2 = superoblivious_hard_solution(2);
    CHECK(objective_value_exact(w2, kTwoThirds) == make_rat(4, 9));

    // 0^0 convention at the p = 0 endpoint
    auto curve0 = objective_curve(w2, {0.0});
    CHECK(curve0[0].second == doctest::Approx(to_double(r_k_exact(2, Rat(0)) / r_k_normalizer(2))));

    for (int k = 2; k <= 6; ++k) {
        KandConstants kc = constants(k);
        FeasibleWeights w = superoblivious_hard_solution(k);
        std::vector<double> grid;
        for (int i = 0; i <= 100; ++i) grid.push_back(0.01 * i);
        auto curve = objective_curve(w, grid);
        size_t best = 0;
        for (size_t i = 1; i < curve.size(); ++i)
            if (curve[i].second > curve[best].second) best = i;
        CHECK(std::fabs(curve[best].first - to_double(kc.p_star)) <= 0.0100001);
    }
}

TEST_CASE("r_k formulas") {
    CHECK(r_k_exact(3, make_rat(2, 3)) == make_rat(4, 27));
    CHECK(r_k_exact(4, Rat(0)) == 0);
    CHECK(r_k(3, 2.0 / 3) == doctest::Approx(4.0 / 27));
    for (int k = 2; k <= 8; ++k) {
        KandConstants kc = constants(k);
        CHECK(r_k_exact(k, kc.p_star) / r_k_normalizer(k) == kc.alpha_star);
        // unique interior maximum at p_star
        Rat at_star = r_k_exact(k, kc.p_star);
        for (long num = 0; num <= 20; ++num) {
            Rat p = make_rat(num, 20);
            if (p == kc.p_star) continue;
            CHECK(r_k_exact(k, p) < at_star);
        }
    }
}

TEST_CASE("ratio never beats the symmetric-pair bound") {
    SplitMix64 rng(29);
    for (int k : {2, 3}) {
        // the symmetric-pair pattern weights are feasible and cap the LP at 2 * 2^-k
        FeasibleWeights w;
        Pattern pos = Pattern::zero(1), neg = Pattern::zero(1);
        pos.cplus(0) = k;
        neg.cminus(0) = k;
        w[pos] = 1;
        w[neg] = 1;
        for (int trial = 0; trial < 3; ++trial) {
            BiasPartition part{{make_rat(static_cast<long>(rng.below(4)), 10), Rat(1)}};
            RoundingVector rv{{make_rat(static_cast<long>(rng.below(1001)), 1000)}};
            CHECK(check_weights_feasible_exact(w, k, part).worst == 0);
            CHECK(objective_value_exact(w, rv) == 2 * rat_pow(Rat(2), -k));
            CHECK(approximation_ratio(k, part, rv).ratio <=
                  to_double(rat_pow(Rat(2), -(k - 1))) + 1e-9);
        }
    }
}

TEST_CASE("grid search") {
    GridRange xr{0.4, 0.6, 0.1}, yr{0.7, 0.8, 0.1};
    GridResult a = grid_search(2, 2, xr, yr, 2);
    GridResult b = grid_search(2, 2, xr, yr, 3);
    CHECK(a.cells.size() == 6);
    CHECK(a.best.x == b.best.x);
    CHECK(a.best.y == b.best.y);
    CHECK(a.best.ratio == doctest::Approx(b.best.ratio));
    for (const GridCell& cell : a.cells) {
        REQUIRE(cell.ok);
        CHECK(cell.ratio <= 0.5 + 1e-9);
        CHECK(cell.ratio >= 0.0);
    }
}
