#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "branchcrit/planegeo.hpp"

namespace branchcrit {

using Weight = std::vector<long long>;  // (λ_1, ..., λ_n), 1-based in the math

bool is_dominant(const Weight& lambda);
bool is_prime(long long p);
long long mod_p(long long v, long long p);
// binomial(a, b) mod p by Lucas' theorem, a, b >= 0.
long long binom_mod_p(long long a, long long b, long long p);
std::string weight_str(const Weight& lambda);

// dist_λ(x, y) = y1 - x1 + λ_{x1} - λ_{y1} + x2 - y2
long long dist(const Weight& lambda, const Point& x, const Point& y);

struct BranchingInstance {
    Weight lambda;
    long long p = 2;
    int i = 1;
    int d = 1;

    int n() const { return static_cast<int>(lambda.size()); }
    // Throws InvalidInstance naming the first violated precondition.
    void validate() const;
    std::string str() const;
};

struct CriterionSets {
    PointSet Y;      // 𝔜
    PointSet C;      // 𝔠 × {0}
    PointSet X;      // 𝒳
    PointSet frakx;  // 𝔵
};

CriterionSets sets(const BranchingInstance& inst);

struct DirectReport {
    bool decision = false;
    std::size_t checked_antichains = 0;
    PointSet blocker;  // an antichain without injection when decision is false
};

// Quantifies over all antichains of 𝔜; also checks the one-dimensional
// reformulation on every antichain and throws IdentityFailed on disagreement.
DirectReport decide_direct(const BranchingInstance& inst);

struct FastReport {
    bool decision = false;
    Injection psi;  // strictly decreasing 𝔜 -> 𝒳 when decision is true
};

// Single matching 𝔜 -> 𝒳.
FastReport decide_fast(const BranchingInstance& inst);

struct Decision {
    bool decision = false;
    CriterionSets sets;
    Injection psi;
    bool verified = false;
    std::size_t checked_antichains = 0;
};

// Fast path; with verify the direct path runs as well and must agree.
Decision decide(const BranchingInstance& inst, bool verify);

struct Witness {
    PointSet M;     // Im ψ
    Injection phi;  // M -> 𝔜, inverse of ψ
};

// Throws CriterionFails when the decision is false.
Witness witness_M(const BranchingInstance& inst);

}  // namespace branchcrit
