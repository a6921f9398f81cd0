#pragma once

#include <gmpxx.h>

#include <vector>

#include "branchcrit/criterion.hpp"
#include "branchcrit/hyperalg.hpp"
#include "branchcrit/msets.hpp"
#include "branchcrit/planegeo.hpp"

namespace branchcrit {

struct Normalized {
    Weight lambda;        // λ - λ_n·(1,...,1)
    long long shift = 0;  // λ_n
};

// Throws NotDominant.
Normalized normalize(const Weight& lambda);

// Flows a with μ = λ - Σ a_t α_t; empty optional when μ - λ is not a
// nonpositive combination of simple roots.
std::optional<std::vector<int>> flows_between(const Weight& lambda, const Weight& mu);
// λ - Σ a_t α_t
Weight lower(const Weight& lambda, const std::vector<int>& flows);

using IntMatrix = std::vector<std::vector<mpz_class>>;
using FpMatrix = std::vector<std::vector<long long>>;

// Spanning set {F^(N) v⁺} of the μ-weight space of the Weyl lattice.
struct WeightBasis {
    Weight lambda;
    std::vector<int> flows;
    std::vector<UTMatrix> mats;

    static WeightBasis make(const Weight& lambda, const std::vector<int>& flows);
    std::size_t size() const { return mats.size(); }
    std::ptrdiff_t index_of(const UTMatrix& N) const;  // -1 when absent
};

IntMatrix gram(const WeightBasis& basis);
FpMatrix reduce_mod(const IntMatrix& m, long long p);
long long rank_mod_p(FpMatrix m, long long p);
// Fraction-free elimination over ℤ.
long long rank_rational(IntMatrix m);

long long weight_dim_L(const Weight& lambda, const Weight& mu, long long p);
long long weight_dim_Q(const Weight& lambda, const Weight& mu);

// All flows a whose weight λ - Σ a_t α_t has nonnegative entries (λ polynomial).
std::vector<std::vector<int>> polynomial_weight_flows(const Weight& lambda);
mpz_class weyl_dimension(const Weight& lambda);

struct HighWeightReport {
    long long weight_dim = 0;  // dim L_n(λ)_μ
    long long dim = 0;         // dim of the GL_{n-1}-high weight vectors in L_n(λ)_μ
    bool exists = false;
};

// Vectors of L_n(λ)_μ killed by every E_s^(r), 1 <= s < cutoff, r >= 1.
HighWeightReport high_weight_dim(const Weight& lambda, const Weight& mu, long long p, int cutoff);
// Oracle answer for a branching instance: weight μ = λ - d·α(i,n).
HighWeightReport oracle(const BranchingInstance& inst);

struct VectorStatus {
    bool is_zero_in_L = true;
    bool is_high_weight = true;
};

// Throws MixedWeights when the matrices do not share one weight.
VectorStatus vector_status(const FpHypVector& v, const Weight& lambda);

// 𝒮𝒯^{(d)}_{i,n,M}(I) v⁺ specialized at λ mod p; throws DGreaterEqualP.
FpHypVector lowering_vector(const BranchingInstance& inst, const PointSet& M, const Multiset& I);

struct Mr6Report {
    long long lhs = 0;  // d!·E_i^(d)···E_{n-1}^(d)·𝒮𝒯 v⁺ mod p
    long long rhs = 0;  // d!·Π dist_λ((i,0),x) mod p
    bool verified = false;
};

// Throws CriterionFails when the criterion is false, IdentityFailed on disagreement.
Mr6Report check_mr6(const BranchingInstance& inst);

// F_{i,n,I}-coefficient identity; throws IdentityFailed.
bool coeff_check_mr2(int i, int n, int d, const Multiset& I, const PointSet& M);

}  // namespace branchcrit
