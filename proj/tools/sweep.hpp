#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "branchcrit/criterion.hpp"

namespace branchcrit::tools {

struct SweepConfig {
    int n_min = 2;
    int n_max = 3;
    int height = 6;  // bound on λ_1 - λ_n
    std::vector<long long> primes{2, 3, 5};
    bool random = false;
    int count = 200;
    std::uint64_t seed = 1;
    int jobs = 1;
    bool check_vectors = true;  // lowering vector and raising identity on true instances

    // Throws ParseError on unknown keys or bad values.
    static SweepConfig from_text(const std::string& text);
    void validate() const;
};

struct SweepRow {
    BranchingInstance inst;
    bool fast = false;
    bool direct = false;
    bool oracle = false;
    long long hw_dim = 0;
    bool vector_ok = true;  // nonzero high weight vector when the criterion holds
    bool mr6_ok = true;
    std::string error;
    double millis = 0;

    bool ok() const { return error.empty() && fast == direct && fast == oracle && vector_ok && mr6_ok; }
    std::string json() const;
};

struct SweepSummary {
    std::size_t instances = 0;
    std::size_t positive = 0;
    std::size_t mismatches = 0;
    double seconds = 0;
};

std::vector<BranchingInstance> sweep_instances(const SweepConfig& cfg);
SweepRow check_instance(const BranchingInstance& inst, bool check_vectors);
// Rows come back in instance order regardless of jobs.
std::vector<SweepRow> run_sweep(const std::vector<BranchingInstance>& instances, int jobs, bool check_vectors);
SweepSummary summarize(const std::vector<SweepRow>& rows, double seconds);

}  // namespace branchcrit::tools
