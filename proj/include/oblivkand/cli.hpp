#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "oblivkand/certificates.hpp"
#include "oblivkand/factor_lp.hpp"
#include "oblivkand/instance.hpp"
#include "oblivkand/oblivious.hpp"
#include "oblivkand/streaming.hpp"

namespace oblivkand {
namespace cli {

using nlohmann::json;

// exit codes: 0 ok, 2 user error, 3 solver failure, 4 verification failure
constexpr int kExitOk = 0;
constexpr int kExitUser = 2;
constexpr int kExitSolver = 3;
constexpr int kExitVerify = 4;

namespace detail {

inline double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

inline std::vector<Rat> parse_rat_list(const std::string& s) {
    std::vector<Rat> out;
    std::string tok;
    std::istringstream in(s);
    while (std::getline(in, tok, ',')) out.push_back(rat_from_string(tok));
    if (out.empty()) throw UserError("empty list: " + s);
    return out;
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
    if (path.empty() || path == "-") {
        fallback << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw UserError("cannot write " + path);
    f << text;
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UserError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline json rat_json(const Rat& q) {
    return json{{"exact", rat_to_string(q)}, {"value", to_double(q)}};
}

/// Partition/rounding selection shared by several commands. Exactly one of
/// the forms must be chosen.
struct AlgoSpec {
    bool superoblivious = false;
    std::vector<double> perturbed;  // delta, eps
    std::vector<double> piecewise;  // l, x, y
    std::string t_list, p_list;

    void add_options(CLI::App* cmd) {
        cmd->add_flag("--superoblivious", superoblivious, "t=(0,1), p=(p*_k)");
        cmd->add_option("--perturbed", perturbed, "delta eps: t=(delta,1), p=(p*_k+eps)")
            ->expected(2);
        cmd->add_option("--piecewise", piecewise,
                        "l x y: uniform l-interval partition, two-piece linear rounding")
            ->expected(3);
        cmd->add_option("-t,--partition", t_list, "comma-separated t_0,...,t_l (t_l = 1)");
        cmd->add_option("-p,--rounding", p_list, "comma-separated p_1,...,p_l");
    }

    std::pair<BiasPartition, RoundingVector> resolve(int k) const {
        int forms = (superoblivious ? 1 : 0) + (perturbed.empty() ? 0 : 1) +
                    (piecewise.empty() ? 0 : 1) + (t_list.empty() && p_list.empty() ? 0 : 1);
        if (forms != 1)
            throw UserError("choose exactly one of --superoblivious, --perturbed, --piecewise, -t/-p");
        if (superoblivious) {
            KandConstants kc = constants(k);
            return {BiasPartition{{Rat(0), Rat(1)}}, RoundingVector{{kc.p_star}}};
        }
        if (!perturbed.empty()) {
            KandConstants kc = constants(k);
            return {BiasPartition{{rat_from_double(perturbed[0]), Rat(1)}},
                    RoundingVector{{kc.p_star + rat_from_double(perturbed[1])}}};
        }
        if (!piecewise.empty()) {
            int l = static_cast<int>(piecewise[0]);
            return piecewise_linear_params(l, rat_from_double(piecewise[1]),
                                           rat_from_double(piecewise[2]));
        }
        if (t_list.empty() || p_list.empty()) throw UserError("-t and -p must be given together");
        BiasPartition part{parse_rat_list(t_list)};
        RoundingVector rv{parse_rat_list(p_list)};
        validate_partition(part);
        validate_rounding(rv, part.levels());
        return {part, rv};
    }
};

inline json algo_json(const BiasPartition& part, const RoundingVector& rv) {
    json t = json::array(), p = json::array();
    for (const Rat& q : part.t) t.push_back(rat_to_string(q));
    for (const Rat& q : rv.p) p.push_back(rat_to_string(q));
    return json{{"t", t}, {"p", p}};
}

inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    double idx = q * static_cast<double>(v.size() - 1);
    size_t lo = static_cast<size_t>(idx);
    size_t hi = std::min(lo + 1, v.size() - 1);
    double frac = idx - static_cast<double>(lo);
    return v[lo] * (1 - frac) + v[hi] * frac;
}

}  // namespace detail

inline int cmd_ratio(int k, const detail::AlgoSpec& spec, double tol, const std::string& out_path,
                     const std::string& dump_path, std::ostream& out) {
    auto [part, rv] = spec.resolve(k);
    StandardFormLP lp = build_primal(k, part, rv);
    if (!dump_path.empty()) detail::write_text(dump_path, dump_lp(lp), out);
    double t0 = detail::now_seconds();
    LPResult res = solve_auto(lp, tol);
    double seconds = detail::now_seconds() - t0;
    if (res.status != LPStatus::Optimal) {
        throw SolverError(std::string("factor LP terminated with status ") + to_string(res.status));
    }
    json worst = json::array();
    int col = 0;
    for_each_pattern(k, part.levels(), [&](const Pattern& c) {
        double w = res.solution[static_cast<size_t>(col)];
        if (w > 1e-12) worst.push_back({{"pattern", pattern_to_string(c)}, {"weight", w}});
        ++col;
    });
    json doc{{"command", "ratio"},
             {"k", k},
             {"algorithm", detail::algo_json(part, rv)},
             {"ratio", res.value},
             {"iterations", res.iterations},
             {"tolerance", tol},
             {"seconds", seconds},
             {"worst_weights", worst}};
    detail::write_text(out_path, doc.dump(2) + "\n", out);
    return kExitOk;
}

inline int cmd_table(int kmin, int kmax, double delta, double eps,
                     const std::vector<double>& piecewise, double tol, const std::string& out_path,
                     std::ostream& out) {
    std::ostringstream csv;
    csv << "k,upper_bound,superoblivious,perturbed";
    if (!piecewise.empty()) csv << ",piecewise";
    csv << "\n";
    for (int k = kmin; k <= kmax; ++k) {
        KandConstants kc = constants(k);
        double pr = perturbed_ratio(k, delta, eps, tol);
        csv << k << "," << to_double(rat_pow(Rat(2), -(k - 1))) << "," << to_double(kc.alpha_star)
            << "," << pr;
        if (!piecewise.empty()) {
            auto [part, rv] =
                piecewise_linear_params(static_cast<int>(piecewise[0]),
                                        rat_from_double(piecewise[1]), rat_from_double(piecewise[2]));
            csv << "," << approximation_ratio(k, part, rv, tol).ratio;
        }
        csv << "\n";
    }
    detail::write_text(out_path, csv.str(), out);
    return kExitOk;
}

inline int cmd_grid(int k, int l, const GridRange& xr, const GridRange& yr, int threads, double tol,
                    const std::string& out_path, const std::string& meta_path, std::ostream& out,
                    std::ostream& err) {
    GridResult res = grid_search(k, l, xr, yr, threads, tol);
    std::ostringstream csv;
    csv << "k,l,x,y,ratio,lp_iterations,seconds\n";
    csv.precision(10);
    int failures = 0;
    for (const GridCell& cell : res.cells) {
        if (!cell.ok) {
            ++failures;
            err << "# cell (" << cell.x << "," << cell.y << ") failed: " << cell.error << "\n";
            continue;
        }
        csv << k << "," << l << "," << cell.x << "," << cell.y << "," << cell.ratio << ","
            << cell.iterations << "," << cell.seconds << "\n";
    }
    detail::write_text(out_path, csv.str(), out);
    if (!meta_path.empty()) {
        auto [part, rv] = piecewise_linear_params(l, rat_from_double(res.best.x),
                                                  rat_from_double(res.best.y));
        json meta{{"command", "grid"},
                  {"k", k},
                  {"l", l},
                  {"tolerance", tol},
                  {"failed_cells", failures},
                  {"best", {{"x", res.best.x}, {"y", res.best.y}, {"ratio", res.best.ratio}}},
                  {"best_algorithm", detail::algo_json(part, rv)}};
        detail::write_text(meta_path, meta.dump(2) + "\n", out);
    }
    err << "# best: x=" << res.best.x << " y=" << res.best.y << " ratio=" << res.best.ratio << "\n";
    return kExitOk;
}

inline int cmd_certify(int k, const std::string& eps_str, double tol, const std::string& out_path,
                       const std::string& margins_path, std::ostream& out) {
    CertifyResult res = certify(k, rat_from_string(eps_str), tol);
    if (!margins_path.empty()) {
        std::ostringstream csv;
        csv << "i,j,family,lhs,rhs,slack\n";
        for (const SuffCondRow& row : res.full.rows)
            csv << row.i << "," << row.j << "," << row.family << "," << to_double(row.lhs) << ","
                << to_double(row.rhs) << "," << to_double(row.rhs - row.lhs) << "\n";
        detail::write_text(margins_path, csv.str(), out);
    }
    json doc{{"command", "certify"},
             {"k", k},
             {"delta", detail::rat_json(res.core.delta)},
             {"eps", detail::rat_json(res.core.eps)},
             {"eta", detail::rat_json(res.core.eta)},
             {"X", detail::rat_json(res.core.X)},
             {"Y", detail::rat_json(res.core.Y)},
             {"beta", detail::rat_json(res.core.beta)},
             {"gamma", detail::rat_json(res.gamma)},
             {"rounding_p", detail::rat_json(res.rounding_p)},
             {"alpha_star", detail::rat_json(res.alpha_star)},
             {"certified_lower_bound", detail::rat_json(res.certified_lower_bound)},
             {"exceeds_alpha_star", res.exceeds_alpha_star},
             {"dual_point_feasible", res.lp_check.feasible},
             {"lp_primal_value", res.lp_primal_value},
             {"margin_table_path", margins_path}};
    detail::write_text(out_path, doc.dump(2) + "\n", out);
    if (!res.exceeds_alpha_star || !res.lp_check.feasible) return kExitVerify;
    return kExitOk;
}

inline int cmd_bernoulli(int kmin, int kmax, std::ostream& out) {
    bool all_ok = true;
    for (int k = kmin; k <= kmax; ++k) {
        BernoulliReport rep = check_bernoulli(k);
        auto want = bernoulli_tight_set(k);
        bool tight_ok = rep.tight.size() == want.size();
        for (const TightPair& tp : want) {
            bool found = false;
            for (const TightPair& got : rep.tight)
                if (got == tp) found = true;
            tight_ok = tight_ok && found;
        }
        bool ok = rep.holds && tight_ok;
        all_ok = all_ok && ok;
        out << "k=" << k << " " << (ok ? "pass" : "FAIL") << " tight=";
        for (size_t i = 0; i < rep.tight.size(); ++i)
            out << (i ? "," : "") << "(" << rep.tight[i].i << "," << rep.tight[i].j << ")";
        out << "\n";
    }
    return all_ok ? kExitOk : kExitVerify;
}

inline int cmd_gen(int k, int n, uint64_t m, const std::string& profile_str, double q,
                   int degree_cap, uint64_t seed, const std::string& out_path, std::ostream& out) {
    BiasProfile profile;
    std::string note;
    if (profile_str == "uniform") {
        profile.kind = BiasProfileKind::Uniform;
    } else if (profile_str == "skewed") {
        profile.kind = BiasProfileKind::Skewed;
        profile.q = q;
    } else if (profile_str == "planted") {
        profile.kind = BiasProfileKind::Planted;
        profile.q = q;
        SplitMix64 rng(seed, /*stream=*/9);
        profile.planted.resize(static_cast<size_t>(n));
        std::string bits;
        for (int v = 0; v < n; ++v) {
            profile.planted[static_cast<size_t>(v)] = rng.bernoulli(0.5) ? +1 : -1;
            bits += profile.planted[static_cast<size_t>(v)] == +1 ? '+' : '-';
        }
        note = "# planted assignment: " + bits + "\n";
    } else {
        throw UserError("unknown profile '" + profile_str + "' (uniform|skewed|planted)");
    }
    Instance inst = generate_random_instance(k, n, m, profile, degree_cap, seed);
    std::ostringstream text;
    text << "# generated: profile=" << profile_str << " q=" << q << " degree_cap=" << degree_cap
         << " seed=" << seed << "\n"
         << note << serialize_instance(inst);
    detail::write_text(out_path, text.str(), out);
    return kExitOk;
}

inline int cmd_value(const std::string& file, const detail::AlgoSpec& spec, int cap,
                     const std::string& out_path, std::ostream& out) {
    Instance inst = parse_instance(detail::read_file(file));
    auto [part, rv] = spec.resolve(inst.k);
    BruteForceResult bf = brute_force_optimum(inst, cap);
    Rat obl = oblivious_value_exact(inst, part, rv);
    json doc{{"command", "value"},
             {"k", inst.k},
             {"n", inst.n},
             {"m", inst.clauses.size()},
             {"value", detail::rat_json(bf.value)},
             {"oblivious_value", detail::rat_json(obl)},
             {"algorithm", detail::algo_json(part, rv)}};
    detail::write_text(out_path, doc.dump(2) + "\n", out);
    return kExitOk;
}

inline int cmd_snapshot(const std::string& file, const std::string& t_list, bool exact,
                        const std::string& out_path, std::ostream& out) {
    Instance inst = parse_instance(detail::read_file(file));
    BiasPartition part{detail::parse_rat_list(t_list)};
    validate_partition(part);
    SnapshotArray snap = snapshot(inst, part);
    detail::write_text(out_path, snapshot_to_csv(snap, exact), out);
    return kExitOk;
}

struct StreamConfig {
    std::string mode = "random-order";
    std::string input;
    std::vector<uint64_t> gen;  // k n m
    std::string profile = "uniform";
    double profile_q = 0.5;
    int degree_cap = 0;
    uint64_t gen_seed = 1;
    double eps = 0.05;
    double C = 32;
    int D = 0;  // bounded-degree: 0 = use true max degree
    int seeds = 1;
    uint64_t seed0 = 0;
    int threads = 0;
};

inline int cmd_stream(const StreamConfig& cfg, const detail::AlgoSpec& spec,
                      const std::string& out_path, const std::string& summary_path,
                      std::ostream& out, std::ostream& err) {
    Instance inst;
    if (!cfg.input.empty()) {
        inst = parse_instance(detail::read_file(cfg.input));
    } else if (cfg.gen.size() == 3) {
        BiasProfile profile;
        if (cfg.profile == "uniform") profile.kind = BiasProfileKind::Uniform;
        else if (cfg.profile == "skewed") { profile.kind = BiasProfileKind::Skewed; profile.q = cfg.profile_q; }
        else throw UserError("stream --gen supports uniform|skewed profiles");
        inst = generate_random_instance(static_cast<int>(cfg.gen[0]), static_cast<int>(cfg.gen[1]),
                                        cfg.gen[2], profile, cfg.degree_cap, cfg.gen_seed);
    } else {
        throw UserError("stream: give --input FILE or --gen k n m");
    }
    auto [part, rv] = spec.resolve(inst.k);
    SnapshotArray snap = snapshot(inst, part);
    Rat exact_obl = 0;
    for (const auto& [c, w] : snap.weights) exact_obl += sat_prob_exact(c, rv) * w;
    int D = cfg.D > 0 ? cfg.D : max_degree(inst);
    if (cfg.mode != "random-order" && cfg.mode != "bounded-degree")
        throw UserError("stream: mode must be random-order or bounded-degree");

    // seeds run in parallel; output is aggregated in seed order
    struct RunResult {
        EstimatorOutput est;
        double l1 = 0;
    };
    std::vector<RunResult> results(static_cast<size_t>(cfg.seeds));
    int threads = cfg.threads > 0 ? cfg.threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        for (;;) {
            int s = next.fetch_add(1);
            if (s >= cfg.seeds || failed.load()) return;
            try {
                uint64_t seed = cfg.seed0 + static_cast<uint64_t>(s);
                EstimatorOutput est;
                if (cfg.mode == "random-order") {
                    ClauseStream stream = shuffle_stream(inst, seed);
                    est = random_order_estimate(stream, part, rv, cfg.eps, cfg.C);
                } else {
                    ClauseStream stream = stream_from_instance(inst);
                    est = bounded_degree_estimate(stream, D, inst.clauses.size(), part, rv, cfg.eps,
                                                  cfg.C, seed);
                }
                double l1 = 0;
                std::map<Pattern, double> diff = est.m_hat;
                for (const auto& [c, w] : snap.weights) diff[c] -= to_double(w);
                for (const auto& [c, d] : diff) l1 += std::fabs(d);
                results[static_cast<size_t>(s)] = {std::move(est), l1};
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failure = e.what();
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(threads, cfg.seeds); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load()) throw UserError("stream run failed: " + failure);

    std::ostringstream lines;
    std::vector<double> l1s, storeds, estimates;
    for (int s = 0; s < cfg.seeds; ++s) {
        const RunResult& run = results[static_cast<size_t>(s)];
        json line{{"mode", cfg.mode},
                  {"k", inst.k},
                  {"eps", cfg.eps},
                  {"C", cfg.C},
                  {"seed", cfg.seed0 + static_cast<uint64_t>(s)},
                  {"estimate", run.est.estimate},
                  {"linear_estimate", run.est.linear_estimate},
                  {"exact_value", to_double(exact_obl)},
                  {"snapshot_l1_error", run.l1},
                  {"stored_clauses", run.est.stored_clauses},
                  {"tracked_vars", run.est.tracked_vars},
                  {"sampling_rate", run.est.sampling_rate},
                  {"full_storage", run.est.full_storage}};
        lines << line.dump() << "\n";
        l1s.push_back(run.l1);
        storeds.push_back(static_cast<double>(run.est.stored_clauses));
        estimates.push_back(run.est.estimate);
    }
    detail::write_text(out_path, lines.str(), out);
    if (!summary_path.empty()) {
        std::ostringstream csv;
        csv << "metric,q01,q25,q50,q75,q99,mean\n";
        auto emit = [&](const char* name, const std::vector<double>& v) {
            double mean = 0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            csv << name;
            for (double q : {0.01, 0.25, 0.5, 0.75, 0.99}) csv << "," << detail::quantile(v, q);
            csv << "," << mean << "\n";
        };
        emit("snapshot_l1_error", l1s);
        emit("stored_clauses", storeds);
        emit("estimate", estimates);
        detail::write_text(summary_path, csv.str(), out);
    }
    err << "# " << cfg.seeds << " runs, mode=" << cfg.mode << "\n";
    return kExitOk;
}

/// Entry point shared by the binary and the in-process CLI tests.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"oblivious Max-kAND algorithms: factor-revealing LPs, certificates, streaming"};
    app.require_subcommand(1);

    // ratio
    auto* ratio = app.add_subcommand("ratio", "approximation ratio of an oblivious algorithm");
    int r_k_arg = 0;
    double r_tol = 1e-9;
    std::string r_out, r_dump;
    detail::AlgoSpec r_spec;
    ratio->add_option("-k,--arity", r_k_arg, "clause arity")->required();
    r_spec.add_options(ratio);
    ratio->add_option("--tol", r_tol, "solver tolerance");
    ratio->add_option("-o,--output", r_out, "output JSON path (default stdout)");
    ratio->add_option("--dump-lp", r_dump, "write the LP in dump format");

    // table
    auto* table = app.add_subcommand("table", "ratio table across k");
    int t_kmin = 2, t_kmax = 5;
    double t_delta = 0.01, t_eps = 0.001, t_tol = 1e-9;
    std::vector<double> t_piecewise;
    std::string t_out;
    table->add_option("--kmin", t_kmin, "first k");
    table->add_option("--kmax", t_kmax, "last k");
    table->add_option("--delta", t_delta, "perturbation threshold");
    table->add_option("--eps", t_eps, "rounding perturbation");
    table->add_option("--piecewise", t_piecewise, "l x y: extra piecewise-linear column")->expected(3);
    table->add_option("--tol", t_tol, "solver tolerance");
    table->add_option("-o,--output", t_out, "output CSV path (default stdout)");

    // grid
    auto* grid = app.add_subcommand("grid", "grid search over piecewise-linear parameters");
    int g_k = 0, g_l = 1, g_threads = 0;
    double g_tol = 1e-9;
    std::vector<double> g_x, g_y;
    std::string g_out, g_meta;
    grid->add_option("-k,--arity", g_k, "clause arity")->required();
    grid->add_option("-l,--levels", g_l, "number of positive bias classes")->required();
    grid->add_option("--x", g_x, "x grid: lo hi step")->expected(3)->required();
    grid->add_option("--y", g_y, "y grid: lo hi step")->expected(3)->required();
    grid->add_option("--threads", g_threads, "worker threads (default: cores)");
    grid->add_option("--tol", g_tol, "solver tolerance");
    grid->add_option("-o,--output", g_out, "output CSV path (default stdout)");
    grid->add_option("--meta", g_meta, "JSON sidecar path");

    // certify
    auto* certify_cmd = app.add_subcommand("certify", "certified lower bound beating alpha*_k");
    int c_k = 0;
    std::string c_eps = "0.001", c_out, c_margins;
    double c_tol = 1e-9;
    certify_cmd->add_option("-k,--arity", c_k, "clause arity")->required();
    certify_cmd->add_option("--eps", c_eps, "starting perturbation (halved until strict)");
    certify_cmd->add_option("--tol", c_tol, "LP tolerance");
    certify_cmd->add_option("-o,--output", c_out, "output JSON path (default stdout)");
    certify_cmd->add_option("--margins", c_margins, "margin table CSV path");

    // bernoulli
    auto* bern = app.add_subcommand("bernoulli", "exact two-sided Bernoulli inequality check");
    int b_k = 0, b_kmax = 0;
    bern->add_option("-k,--arity", b_k, "single k to check");
    bern->add_option("--kmax", b_kmax, "check all k in 2..kmax");

    // stream
    auto* stream = app.add_subcommand("stream", "streaming estimator simulation");
    StreamConfig s_cfg;
    detail::AlgoSpec s_spec;
    std::string s_out, s_summary;
    stream->add_option("--mode", s_cfg.mode, "random-order | bounded-degree");
    stream->add_option("--input", s_cfg.input, "instance file (input form)");
    stream->add_option("--gen", s_cfg.gen, "k n m: generate the instance")->expected(3);
    stream->add_option("--profile", s_cfg.profile, "uniform | skewed");
    stream->add_option("--q", s_cfg.profile_q, "profile parameter");
    stream->add_option("--degree-cap", s_cfg.degree_cap, "degree cap for --gen");
    stream->add_option("--gen-seed", s_cfg.gen_seed, "generator seed");
    stream->add_option("--eps", s_cfg.eps, "per-pattern accuracy target");
    stream->add_option("-C,--confidence", s_cfg.C, "sampling constant C");
    stream->add_option("-D,--max-degree", s_cfg.D, "degree bound (default: true max degree)");
    stream->add_option("--seeds", s_cfg.seeds, "number of runs");
    stream->add_option("--seed0", s_cfg.seed0, "first seed");
    stream->add_option("--threads", s_cfg.threads, "worker threads (default: cores)");
    s_spec.add_options(stream);
    stream->add_option("-o,--output", s_out, "JSONL output path (default stdout)");
    stream->add_option("--summary", s_summary, "aggregate CSV path");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a random instance file");
    int gen_k = 2, gen_n = 0, gen_cap = 0;
    uint64_t gen_m = 0, gen_seed = 1;
    double gen_q = 0.5;
    std::string gen_profile = "uniform", gen_out;
    gen->add_option("-k,--arity", gen_k, "clause arity")->required();
    gen->add_option("-n,--vars", gen_n, "variable count")->required();
    gen->add_option("-m,--clauses", gen_m, "clause count")->required();
    gen->add_option("--profile", gen_profile, "uniform | skewed | planted");
    gen->add_option("--q", gen_q, "profile parameter");
    gen->add_option("--degree-cap", gen_cap, "max clauses per variable (0 = none)");
    gen->add_option("--seed", gen_seed, "rng seed");
    gen->add_option("-o,--output", gen_out, "instance file path (default stdout)");

    // value
    auto* value = app.add_subcommand("value", "brute-force and oblivious value of an instance");
    std::string v_file, v_out;
    int v_cap = 24;
    detail::AlgoSpec v_spec;
    value->add_option("file", v_file, "instance file")->required();
    v_spec.add_options(value);
    value->add_option("--cap", v_cap, "brute-force variable cap");
    value->add_option("-o,--output", v_out, "output JSON path (default stdout)");

    // snapshot
    auto* snap = app.add_subcommand("snapshot", "snapshot array of an instance");
    std::string sn_file, sn_t, sn_out;
    bool sn_exact = false;
    snap->add_option("file", sn_file, "instance file")->required();
    snap->add_option("-t,--partition", sn_t, "comma-separated t_0,...,t_l")->required();
    snap->add_flag("--exact", sn_exact, "emit exact p/q weights");
    snap->add_option("-o,--output", sn_out, "output CSV path (default stdout)");

    std::vector<const char*> argv;
    std::string prog = "oblivkand";
    argv.push_back(prog.c_str());
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUser;
    }

    try {
        if (ratio->parsed()) return cmd_ratio(r_k_arg, r_spec, r_tol, r_out, r_dump, out);
        if (table->parsed())
            return cmd_table(t_kmin, t_kmax, t_delta, t_eps, t_piecewise, t_tol, t_out, out);
        if (grid->parsed()) {
            GridRange xr{g_x[0], g_x[1], g_x[2]}, yr{g_y[0], g_y[1], g_y[2]};
            return cmd_grid(g_k, g_l, xr, yr, g_threads, g_tol, g_out, g_meta, out, err);
        }
        if (certify_cmd->parsed()) return cmd_certify(c_k, c_eps, c_tol, c_out, c_margins, out);
        if (bern->parsed()) {
            if (b_k == 0 && b_kmax == 0) throw UserError("bernoulli: give -k or --kmax");
            return b_kmax > 0 ? cmd_bernoulli(2, b_kmax, out) : cmd_bernoulli(b_k, b_k, out);
        }
        if (stream->parsed()) return cmd_stream(s_cfg, s_spec, s_out, s_summary, out, err);
        if (gen->parsed())
            return cmd_gen(gen_k, gen_n, gen_m, gen_profile, gen_q, gen_cap, gen_seed, gen_out, out);
        if (value->parsed()) return cmd_value(v_file, v_spec, v_cap, v_out, out);
        if (snap->parsed()) return cmd_snapshot(sn_file, sn_t, sn_exact, sn_out, out);
        err << "error: no subcommand\n";
        return kExitUser;
    } catch (const UserError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUser;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
}

}  // namespace cli
}  // namespace oblivkand
