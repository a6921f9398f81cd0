#include "sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "branchcrit/errors.hpp"
#include "branchcrit/modoracle.hpp"

namespace branchcrit::tools {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ParseError("bad integer for " + key + ": '" + v + "'");
    }
}

}  // namespace

SweepConfig SweepConfig::from_text(const std::string& text) {
    SweepConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "n") {
            cfg.n_min = cfg.n_max = static_cast<int>(to_int(key, val));
        } else if (key == "n_min") {
            cfg.n_min = static_cast<int>(to_int(key, val));
        } else if (key == "n_max") {
            cfg.n_max = static_cast<int>(to_int(key, val));
        } else if (key == "height") {
            cfg.height = static_cast<int>(to_int(key, val));
        } else if (key == "primes") {
            cfg.primes.clear();
            std::istringstream ps(val);
            std::string tok;
            while (std::getline(ps, tok, ',')) cfg.primes.push_back(to_int(key, trim(tok)));
        } else if (key == "mode") {
            if (val != "exhaustive" && val != "random") throw ParseError("mode must be exhaustive or random");
            cfg.random = val == "random";
        } else if (key == "count") {
            cfg.count = static_cast<int>(to_int(key, val));
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(to_int(key, val));
        } else if (key == "jobs") {
            cfg.jobs = static_cast<int>(to_int(key, val));
        } else if (key == "vectors") {
            cfg.check_vectors = to_int(key, val) != 0;
        } else {
            throw ParseError("unknown key '" + key + "'");
        }
    }
    return cfg;
}

void SweepConfig::validate() const {
    if (n_min < 2 || n_max < n_min || n_max > 6) throw ParseError("need 2 <= n_min <= n_max <= 6");
    if (height < 0) throw ParseError("height must be nonnegative");
    if (primes.empty()) throw ParseError("primes list is empty");
    for (long long p : primes)
        if (!is_prime(p)) throw ParseError(std::to_string(p) + " is not prime");
    if (random && count <= 0) throw ParseError("count must be positive");
    if (jobs < 1) throw ParseError("jobs must be positive");
}

std::string SweepRow::json() const {
    nlohmann::json j;
    j["lambda"] = inst.lambda;
    j["p"] = inst.p;
    j["i"] = inst.i;
    j["d"] = inst.d;
    j["fast"] = fast;
    j["direct"] = direct;
    j["oracle"] = oracle;
    j["high_weight_dim"] = hw_dim;
    j["vector_ok"] = vector_ok;
    j["mr6_ok"] = mr6_ok;
    j["ok"] = ok();
    if (!error.empty()) j["error"] = error;
    return j.dump();
}

std::vector<BranchingInstance> sweep_instances(const SweepConfig& cfg) {
    cfg.validate();
    std::vector<BranchingInstance> out;
    auto add_all = [&](const Weight& lambda) {
        const int n = static_cast<int>(lambda.size());
        for (long long p : cfg.primes)
            for (int d = 1; d < p; ++d)
                for (int i = 1; i < n; ++i) out.push_back(BranchingInstance{lambda, p, i, d});
    };
    if (!cfg.random) {
        for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
            Weight lambda(static_cast<std::size_t>(n), 0);
            std::function<void(int, long long)> rec = [&](int t, long long cap) {
                if (t == n - 1) {
                    add_all(lambda);
                    return;
                }
                for (long long v = 0; v <= cap; ++v) {
                    lambda[static_cast<std::size_t>(t)] = v;
                    rec(t + 1, v);
                }
            };
            rec(0, cfg.height);
        }
        return out;
    }
    std::mt19937_64 rng(cfg.seed);
    auto uniform = [&](long long lo, long long hi) { return std::uniform_int_distribution<long long>(lo, hi)(rng); };
    for (int c = 0; c < cfg.count; ++c) {
        int n = static_cast<int>(uniform(cfg.n_min, cfg.n_max));
        Weight lambda(static_cast<std::size_t>(n), 0);
        for (int t = 0; t + 1 < n; ++t) lambda[static_cast<std::size_t>(t)] = uniform(0, cfg.height);
        std::sort(lambda.begin(), lambda.end(), std::greater<>());
        long long p = cfg.primes[static_cast<std::size_t>(uniform(0, static_cast<long long>(cfg.primes.size()) - 1))];
        int d = static_cast<int>(uniform(1, p - 1));
        int i = static_cast<int>(uniform(1, n - 1));
        out.push_back(BranchingInstance{lambda, p, i, d});
    }
    return out;
}

SweepRow check_instance(const BranchingInstance& inst, bool check_vectors) {
    SweepRow row;
    row.inst = inst;
    auto t0 = std::chrono::steady_clock::now();
    try {
        row.fast = decide_fast(inst).decision;
        row.direct = decide_direct(inst).decision;
        HighWeightReport rep = oracle(inst);
        row.oracle = rep.exists;
        row.hw_dim = rep.dim;
        if (row.fast && check_vectors) {
            Witness w = witness_M(inst);
            VectorStatus st = vector_status(lowering_vector(inst, w.M, Multiset{}), inst.lambda);
            row.vector_ok = !st.is_zero_in_L && st.is_high_weight;
            row.mr6_ok = check_mr6(inst).verified;
        }
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    row.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

std::vector<SweepRow> run_sweep(const std::vector<BranchingInstance>& instances, int jobs, bool check_vectors) {
    std::vector<SweepRow> rows(instances.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < instances.size(); k = next++) rows[k] = check_instance(instances[k], check_vectors);
    };
    const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(instances.size())));
    if (threads == 1) {
        worker();
        return rows;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return rows;
}

SweepSummary summarize(const std::vector<SweepRow>& rows, double seconds) {
    SweepSummary s;
    s.instances = rows.size();
    s.seconds = seconds;
    for (auto& r : rows) {
        if (r.fast) ++s.positive;
        if (!r.ok()) ++s.mismatches;
    }
    return s;
}

}  // namespace branchcrit::tools
