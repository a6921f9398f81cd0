#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "branchcrit/criterion.hpp"
#include "branchcrit/errors.hpp"
#include "branchcrit/lowering.hpp"
#include "branchcrit/modoracle.hpp"
#include "sweep.hpp"

using namespace branchcrit;
using nlohmann::json;

namespace {

std::vector<long long> parse_ints(const std::string& text, const char* what) {
    std::vector<long long> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(tok, &used));
            if (used != tok.size() && tok.find_first_not_of(" ", used) != std::string::npos)
                throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ParseError(std::string("bad entry '") + tok + "' in " + what);
        }
    }
    return out;
}

// "t:h,t:h"; a repeated column is rejected.
PointSet parse_set(const std::string& text) {
    PointSet M;
    std::set<int> cols;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        auto colon = tok.find(':');
        if (colon == std::string::npos) throw ParseError("point '" + tok + "' must be t:h");
        auto t = parse_ints(tok.substr(0, colon), "--set");
        auto h = parse_ints(tok.substr(colon + 1), "--set");
        if (t.size() != 1 || h.size() != 1) throw ParseError("point '" + tok + "' must be t:h");
        if (!cols.insert(static_cast<int>(t[0])).second)
            throw InvalidSpec("two points in column " + std::to_string(t[0]));
        M.insert(Point{static_cast<int>(t[0]), static_cast<int>(h[0])});
    }
    return M;
}

json points_json(const PointSet& s) {
    json a = json::array();
    for (auto& x : s) a.push_back({x.col, x.ht});
    return a;
}

json matrix_json(const UTMatrix& N) {
    json a = json::array();
    for (int r = 1; r <= N.n(); ++r)
        for (int c = r + 1; c <= N.n(); ++c)
            if (N.at(r, c)) a.push_back({r, c, N.at(r, c)});
    return a;
}

json instance_json(const BranchingInstance& inst) {
    return {{"lambda", inst.lambda}, {"p", inst.p}, {"i", inst.i}, {"d", inst.d}};
}

json sets_json(const CriterionSets& s) {
    return {{"Y", points_json(s.Y)}, {"C", points_json(s.C)}, {"X", points_json(s.X)}, {"frakx", points_json(s.frakx)}};
}

struct InstanceFlags {
    std::string lambda;
    long long p = 2;
    int i = 1;
    int d = 1;

    void attach(CLI::App* app) {
        app->add_option("--lambda", lambda, "dominant weight, comma separated")->required();
        app->add_option("--p", p, "prime")->required();
        app->add_option("--i", i, "row index i")->required();
        app->add_option("--d", d, "lowering depth d")->required();
    }
    BranchingInstance get() const {
        BranchingInstance inst{parse_ints(lambda, "--lambda"), p, i, d};
        inst.validate();
        return inst;
    }
};

void emit(const json& j) { std::cout << j.dump() << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modular branching criterion, lowering operators and a brute-force module oracle"};
    app.require_subcommand(1);

    InstanceFlags crit_flags;
    bool verify = false;
    auto* crit = app.add_subcommand("criterion", "decide the branching criterion");
    crit_flags.attach(crit);
    crit->add_flag("--verify", verify, "also run the antichain quantification");

    InstanceFlags sets_flags;
    auto* sets_cmd = app.add_subcommand("sets", "print the congruence point sets");
    sets_flags.attach(sets_cmd);

    std::string op_lambda;
    long long op_p = 0;
    int op_i = 1;
    int op_n = 0;
    int op_d = 1;
    std::string op_set;
    std::string op_I;
    auto* op = app.add_subcommand("operator", "coefficients of the lowering operator");
    op->add_option("--lambda", op_lambda, "specialize at this weight mod p");
    op->add_option("--p", op_p, "prime (requires d < p)");
    op->add_option("--i", op_i, "row index i")->required();
    op->add_option("--n", op_n, "rank n (taken from --lambda when given)");
    op->add_option("--d", op_d, "lowering depth d")->required();
    op->add_option("--set", op_set, "points t:h, at most one per column");
    op->add_option("--I", op_I, "multiset I, comma separated");

    InstanceFlags oracle_flags;
    auto* orc = app.add_subcommand("oracle", "brute-force existence of high weight vectors");
    oracle_flags.attach(orc);

    std::string cfg_path;
    tools::SweepConfig cfg_flags;
    std::string primes_text;
    std::string mode_text;
    int n_fixed = 0;
    bool no_vectors = false;
    auto* cc = app.add_subcommand("crosscheck", "sweep instances and compare every decision path");
    cc->add_option("--config", cfg_path, "key=value configuration file");
    cc->add_option("--n", n_fixed, "rank n");
    auto* o_nmin = cc->add_option("--n-min", cfg_flags.n_min, "smallest rank");
    auto* o_nmax = cc->add_option("--n-max", cfg_flags.n_max, "largest rank");
    auto* o_height = cc->add_option("--height", cfg_flags.height, "bound on lambda_1 - lambda_n");
    cc->add_option("--primes", primes_text, "comma separated primes");
    cc->add_option("--mode", mode_text, "exhaustive or random")->check(CLI::IsMember({"exhaustive", "random"}));
    auto* o_count = cc->add_option("--count", cfg_flags.count, "instances in random mode");
    auto* o_seed = cc->add_option("--seed", cfg_flags.seed, "random seed");
    auto* o_jobs = cc->add_option("--jobs", cfg_flags.jobs, "worker threads");
    cc->add_flag("--no-vectors", no_vectors, "skip the lowering vector checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*crit) {
            BranchingInstance inst = crit_flags.get();
            Decision dec = decide(inst, verify);
            json j = sets_json(dec.sets);
            j["instance"] = instance_json(inst);
            j["decision"] = dec.decision;
            if (dec.decision) {
                json psi = json::array();
                for (auto& [y, x] : dec.psi) psi.push_back({{y.col, y.ht}, {x.col, x.ht}});
                j["witness_psi"] = psi;
                j["M"] = points_json(witness_M(inst).M);
            }
            if (verify) {
                j["verified"] = dec.verified;
                j["checked_antichains"] = dec.checked_antichains;
            }
            emit(j);
        } else if (*sets_cmd) {
            BranchingInstance inst = sets_flags.get();
            emit({{"instance", instance_json(inst)}, {"sets", sets_json(sets(inst))}});
        } else if (*op) {
            Weight lambda;
            if (!op_lambda.empty()) {
                lambda = parse_ints(op_lambda, "--lambda");
                op_n = static_cast<int>(lambda.size());
            }
            if (op_n < 2) throw InvalidSpec("operator needs --n or --lambda");
            if (op_p != 0 && op_d >= op_p)
                throw DGreaterEqualP("requires d < p (got d = " + std::to_string(op_d) + ", p = " + std::to_string(op_p) + ")");
            PointSet M = parse_set(op_set);
            Multiset I;
            if (!op_I.empty()) {
                auto e = parse_ints(op_I, "--I");
                I = Multiset(std::vector<int>(e.begin(), e.end()));
            }
            if (I.size() > op_d || !I.all_in(op_i, op_n)) throw InvalidSpec("I must have at most d entries in [i..n)");
            json j = {{"i", op_i}, {"n", op_n}, {"d", op_d}, {"M", points_json(M)}, {"I", I.csv()}};
            json terms = json::array();
            if (!lambda.empty()) {
                if (op_p == 0) throw InvalidSpec("--lambda needs --p");
                FpHypVector v = lowering_vector(BranchingInstance{lambda, op_p, op_i, op_d}, M, I);
                for (auto& [N, c] : v.coeffs) terms.push_back({{"matrix", matrix_json(N)}, {"coeff", c}});
                j["lambda"] = lambda;
                j["p"] = op_p;
            } else {
                HypElement X = scriptT(op_i, op_n, op_d, M, I);
                for (auto& [N, c] : X.terms) terms.push_back({{"matrix", matrix_json(N)}, {"coeff", c.str()}});
            }
            j["terms"] = terms;
            emit(j);
        } else if (*orc) {
            BranchingInstance inst = oracle_flags.get();
            HighWeightReport rep = oracle(inst);
            emit({{"instance", instance_json(inst)},
                  {"exists", rep.exists},
                  {"high_weight_dim", rep.dim},
                  {"weight_dim", rep.weight_dim}});
        } else if (*cc) {
            tools::SweepConfig cfg;
            if (!cfg_path.empty()) {
                std::ifstream in(cfg_path);
                if (!in) throw ParseError("cannot read " + cfg_path);
                std::stringstream buf;
                buf << in.rdbuf();
                cfg = tools::SweepConfig::from_text(buf.str());
            }
            if (n_fixed) cfg.n_min = cfg.n_max = n_fixed;
            if (*o_nmin) cfg.n_min = cfg_flags.n_min;
            if (*o_nmax) cfg.n_max = cfg_flags.n_max;
            if (*o_height) cfg.height = cfg_flags.height;
            if (!primes_text.empty()) cfg.primes = parse_ints(primes_text, "--primes");
            if (!mode_text.empty()) cfg.random = mode_text == "random";
            if (*o_count) cfg.count = cfg_flags.count;
            if (*o_seed) cfg.seed = cfg_flags.seed;
            if (*o_jobs) cfg.jobs = cfg_flags.jobs;
            if (no_vectors) cfg.check_vectors = false;
            if (const char* env = std::getenv("BRANCHCRIT_SEED")) cfg.seed = std::stoull(env);

            auto t0 = std::chrono::steady_clock::now();
            auto instances = tools::sweep_instances(cfg);
            auto rows = tools::run_sweep(instances, cfg.jobs, cfg.check_vectors);
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            for (auto& r : rows) std::cout << r.json() << "\n";
            auto s = tools::summarize(rows, secs);
            std::cerr << "mode        " << (cfg.random ? "random" : "exhaustive") << "\n"
                      << "seed        " << cfg.seed << "\n"
                      << "instances   " << s.instances << "\n"
                      << "positive    " << s.positive << "\n"
                      << "mismatches  " << s.mismatches << "\n"
                      << "seconds     " << secs << "\n";
            for (auto& r : rows)
                if (!r.ok()) std::cerr << "MISMATCH " << r.json() << "\n";
            return s.mismatches ? 1 : 0;
        }
    } catch (const InvalidInstance& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const InvalidSpec& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const DGreaterEqualP& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const NotDominant& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
    return 0;
}
