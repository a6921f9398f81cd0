#include "branchcrit/modoracle.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "branchcrit/errors.hpp"
#include "branchcrit/lowering.hpp"

namespace branchcrit {

Normalized normalize(const Weight& lambda) {
    if (lambda.empty() || !is_dominant(lambda)) throw NotDominant(weight_str(lambda));
    Normalized out{lambda, lambda.back()};
    for (auto& x : out.lambda) x -= out.shift;
    return out;
}

std::optional<std::vector<int>> flows_between(const Weight& lambda, const Weight& mu) {
    if (lambda.size() != mu.size() || lambda.empty()) return std::nullopt;
    // a_t = Σ_{s<=t} (λ_s - μ_s); the total must vanish.
    std::vector<int> a;
    long long acc = 0;
    for (std::size_t t = 0; t < lambda.size(); ++t) {
        acc += lambda[t] - mu[t];
        if (t + 1 < lambda.size()) {
            if (acc < 0) return std::nullopt;
            a.push_back(static_cast<int>(acc));
        }
    }
    if (acc != 0) return std::nullopt;
    return a;
}

Weight lower(const Weight& lambda, const std::vector<int>& flows) {
    Weight mu = lambda;
    for (std::size_t t = 0; t < flows.size(); ++t) {
        mu[t] -= flows[t];
        mu[t + 1] += flows[t];
    }
    return mu;
}

WeightBasis WeightBasis::make(const Weight& lambda, const std::vector<int>& flows) {
    WeightBasis b{lambda, flows, {}};
    if (std::all_of(flows.begin(), flows.end(), [](int x) { return x >= 0; }))
        b.mats = enumerate_matrices(static_cast<int>(lambda.size()), flows);
    return b;
}

std::ptrdiff_t WeightBasis::index_of(const UTMatrix& N) const {
    auto it = std::lower_bound(mats.begin(), mats.end(), N);
    if (it == mats.end() || *it != N) return -1;
    return it - mats.begin();
}

IntMatrix gram(const WeightBasis& basis) {
    const std::size_t m = basis.size();
    IntMatrix G(m, std::vector<mpz_class>(m));
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b) {
            G[a][b] = straighten_pairing(basis.mats[a], basis.mats[b], basis.lambda);
            G[b][a] = G[a][b];
        }
    return G;
}

FpMatrix reduce_mod(const IntMatrix& m, long long p) {
    FpMatrix out(m.size());
    for (std::size_t r = 0; r < m.size(); ++r) {
        out[r].reserve(m[r].size());
        for (auto& x : m[r]) {
            mpz_class q = x % static_cast<long>(p);
            if (q < 0) q += static_cast<long>(p);
            out[r].push_back(q.get_si());
        }
    }
    return out;
}

namespace {

long long inv_mod(long long a, long long p) {
    long long r = 1;
    long long e = p - 2;
    a %= p;
    while (e > 0) {
        if (e & 1) r = r * a % p;
        a = a * a % p;
        e >>= 1;
    }
    return r;
}

}  // namespace

long long rank_mod_p(FpMatrix m, long long p) {
    if (m.empty()) return 0;
    const std::size_t cols = m[0].size();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
        std::size_t piv = rank;
        while (piv < m.size() && m[piv][c] % p == 0) ++piv;
        if (piv == m.size()) continue;
        std::swap(m[piv], m[rank]);
        long long inv = inv_mod(mod_p(m[rank][c], p), p);
        for (std::size_t r = rank + 1; r < m.size(); ++r) {
            long long f = mod_p(m[r][c], p) * inv % p;
            if (f == 0) continue;
            for (std::size_t k = c; k < cols; ++k) m[r][k] = mod_p(m[r][k] - f * m[rank][k], p);
        }
        ++rank;
    }
    return static_cast<long long>(rank);
}

long long rank_rational(IntMatrix m) {
    if (m.empty()) return 0;
    const std::size_t cols = m[0].size();
    std::size_t rank = 0;
    mpz_class prev = 1;
    for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
        std::size_t piv = rank;
        while (piv < m.size() && m[piv][c] == 0) ++piv;
        if (piv == m.size()) continue;
        std::swap(m[piv], m[rank]);
        for (std::size_t r = rank + 1; r < m.size(); ++r) {
            for (std::size_t k = c + 1; k < cols; ++k) {
                mpz_class v = m[rank][c] * m[r][k] - m[r][c] * m[rank][k];
                mpz_divexact(m[r][k].get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
            }
            m[r][c] = 0;
        }
        prev = m[rank][c];
        ++rank;
    }
    return static_cast<long long>(rank);
}

long long weight_dim_L(const Weight& lambda, const Weight& mu, long long p) {
    auto a = flows_between(lambda, mu);
    if (!a) return 0;
    WeightBasis b = WeightBasis::make(normalize(lambda).lambda, *a);
    return rank_mod_p(reduce_mod(gram(b), p), p);
}

long long weight_dim_Q(const Weight& lambda, const Weight& mu) {
    auto a = flows_between(lambda, mu);
    if (!a) return 0;
    WeightBasis b = WeightBasis::make(normalize(lambda).lambda, *a);
    return rank_rational(gram(b));
}

std::vector<std::vector<int>> polynomial_weight_flows(const Weight& lambda) {
    Weight lam = normalize(lambda).lambda;
    const int n = static_cast<int>(lam.size());
    std::vector<std::vector<int>> out;
    std::vector<int> a(static_cast<std::size_t>(n - 1), 0);
    std::function<void(int, long long)> rec = [&](int t, long long prefix) {
        if (t == n - 1) {
            Weight mu = lower(lam, a);
            if (std::all_of(mu.begin(), mu.end(), [](long long x) { return x >= 0; })) out.push_back(a);
            return;
        }
        prefix += lam[static_cast<std::size_t>(t)];
        for (long long v = 0; v <= prefix; ++v) {
            a[static_cast<std::size_t>(t)] = static_cast<int>(v);
            rec(t + 1, prefix);
        }
    };
    rec(0, 0);
    return out;
}

mpz_class weyl_dimension(const Weight& lambda) {
    mpz_class num = 1;
    mpz_class den = 1;
    const long long n = static_cast<long long>(lambda.size());
    for (long long a = 0; a < n; ++a)
        for (long long b = a + 1; b < n; ++b) {
            num *= static_cast<long>(lambda[static_cast<std::size_t>(a)] - lambda[static_cast<std::size_t>(b)] + b - a);
            den *= static_cast<long>(b - a);
        }
    return num / den;
}

namespace {

// F_{s,s+1}^(r)·F^(N) expanded in the divided basis, integer coefficients.
std::map<UTMatrix, mpz_class> f_power_times(int s, int r, const UTMatrix& N) {
    HypElement X = HypElement::single(N, IntPoly(1));
    for (int q = 0; q < r; ++q) {
        HypElement Y(N.n());
        for (auto& [M, c] : X.terms) Y += f_times(s, s + 1, M).scaled(c);
        X = std::move(Y);
    }
    mpz_class rf = factorial(r);
    std::map<UTMatrix, mpz_class> out;
    for (auto& [M, c] : X.terms) {
        if (!c.is_constant()) throw IdentityFailed("F-straightening produced a non-constant coefficient");
        mpz_class v = c.constant_value();
        if (!mpz_divisible_p(v.get_mpz_t(), rf.get_mpz_t()))
            throw NonIntegralResult("divided F-power coefficient at " + M.str());
        out[M] = v / rf;
    }
    return out;
}

// Rows ⟨·, F_s^(r) w'⟩ over the spanning set, for 1 <= s < cutoff.
FpMatrix raising_conditions(const WeightBasis& basis, const FpMatrix& G, long long p, int cutoff) {
    FpMatrix rows;
    const std::size_t m = basis.size();
    for (int s = 1; s < cutoff; ++s) {
        int top = basis.flows[static_cast<std::size_t>(s - 1)];
        for (int r = 1; r <= top; ++r) {
            std::vector<int> up = basis.flows;
            up[static_cast<std::size_t>(s - 1)] -= r;
            for (const auto& W : enumerate_matrices(static_cast<int>(basis.lambda.size()), up)) {
                std::vector<long long> row(m, 0);
                for (auto& [M, c] : f_power_times(s, r, W)) {
                    auto idx = basis.index_of(M);
                    if (idx < 0) throw IdentityFailed("F-straightening left the weight space");
                    long long cm = mpz_class(c % static_cast<long>(p)).get_si();
                    if (cm == 0) continue;
                    for (std::size_t b = 0; b < m; ++b)
                        row[b] = mod_p(row[b] + cm * G[static_cast<std::size_t>(idx)][b], p);
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::vector<long long> mat_vec(const FpMatrix& A, const std::vector<long long>& x, long long p) {
    std::vector<long long> y(A.size(), 0);
    for (std::size_t r = 0; r < A.size(); ++r)
        for (std::size_t c = 0; c < x.size(); ++c) y[r] = mod_p(y[r] + A[r][c] * x[c], p);
    return y;
}

bool all_zero(const std::vector<long long>& v) {
    return std::all_of(v.begin(), v.end(), [](long long x) { return x == 0; });
}

}  // namespace

HighWeightReport high_weight_dim(const Weight& lambda, const Weight& mu, long long p, int cutoff) {
    HighWeightReport rep;
    auto a = flows_between(lambda, mu);
    if (!a) return rep;
    WeightBasis b = WeightBasis::make(normalize(lambda).lambda, *a);
    if (b.size() == 0) return rep;
    FpMatrix G = reduce_mod(gram(b), p);
    rep.weight_dim = rank_mod_p(G, p);
    FpMatrix K = raising_conditions(b, G, p, cutoff);
    // Solutions of K·c = 0 contain the radical of G; the quotient has this dimension.
    rep.dim = rep.weight_dim - rank_mod_p(K, p);
    rep.exists = rep.dim > 0;
    return rep;
}

HighWeightReport oracle(const BranchingInstance& inst) {
    inst.validate();
    Weight mu = inst.lambda;
    mu[static_cast<std::size_t>(inst.i - 1)] -= inst.d;
    mu.back() += inst.d;
    return high_weight_dim(inst.lambda, mu, inst.p, inst.n() - 1);
}

VectorStatus vector_status(const FpHypVector& v, const Weight& lambda) {
    VectorStatus st;
    if (v.is_zero()) return st;
    std::vector<int> flows = v.coeffs.begin()->first.flows();
    for (auto& [N, c] : v.coeffs)
        if (N.flows() != flows) throw MixedWeights(N.str());
    WeightBasis b = WeightBasis::make(normalize(lambda).lambda, flows);
    std::vector<long long> x(b.size(), 0);
    for (auto& [N, c] : v.coeffs) x[static_cast<std::size_t>(b.index_of(N))] = mod_p(c, v.p);
    FpMatrix G = reduce_mod(gram(b), v.p);
    st.is_zero_in_L = all_zero(mat_vec(G, x, v.p));
    FpMatrix K = raising_conditions(b, G, v.p, static_cast<int>(lambda.size()) - 1);
    st.is_high_weight = all_zero(mat_vec(K, x, v.p));
    return st;
}

FpHypVector lowering_vector(const BranchingInstance& inst, const PointSet& M, const Multiset& I) {
    if (inst.d >= inst.p) throw DGreaterEqualP("d = " + std::to_string(inst.d) + ", p = " + std::to_string(inst.p));
    HypElement X = scriptT(inst.i, inst.n(), inst.d, M, I);
    return specialize_elem(X, normalize(inst.lambda).lambda, {}, inst.p);
}

Mr6Report check_mr6(const BranchingInstance& inst) {
    Witness w = witness_M(inst);
    const int n = inst.n();
    const long long p = inst.p;
    std::set<int> cols;
    std::map<int, long long> uvals;
    for (auto& x : w.M) {
        cols.insert(x.col);
        uvals[x.col] = x.ht;
    }
    HypElement X = T_eval(inst.i, n, inst.d, cols, Multiset{});
    std::vector<int> a(static_cast<std::size_t>(n - 1), 0);
    for (int t = inst.i; t < n; ++t) a[static_cast<std::size_t>(t - 1)] = inst.d;
    IntPoly P = raise_divided(a, X);
    long long df = mpz_class(factorial(inst.d) % static_cast<long>(p)).get_si();
    Mr6Report rep;
    rep.lhs = mod_p(df * specialize(P, normalize(inst.lambda).lambda, uvals, p), p);
    CriterionSets cs = sets(inst);
    long long prod = df;
    for (int t = inst.i + 1; t <= n; ++t)
        for (int h = 1; h <= inst.d; ++h) {
            Point x{t, h};
            if (cs.Y.count(x)) continue;
            prod = mod_p(prod * mod_p(dist(inst.lambda, Point{inst.i, 0}, x), p), p);
        }
    rep.rhs = prod;
    if (rep.lhs != rep.rhs)
        throw IdentityFailed("raising identity: " + std::to_string(rep.lhs) + " vs " + std::to_string(rep.rhs) +
                             " for " + inst.str());
    if (rep.lhs == 0) throw IdentityFailed("raising identity vanishes for " + inst.str());
    rep.verified = true;
    return rep;
}

bool coeff_check_mr2(int i, int n, int d, const Multiset& I, const PointSet& M) {
    PointSet Om = omega_diagram(i, n, d, I);
    for (auto& x : M)
        if (!Om.count(x)) throw InvalidSpec("point " + x.str() + " outside the interior diagram");
    UTMatrix N(n);
    for (int t = i + 1; t < n; ++t) N.set(i, t, I.count_eq(t));
    N.set(i, n, d - I.size());
    IntPoly lhs = scriptT(i, n, d, M, I).coefficient(N);
    IntPoly rhs(factorial(d));
    for (int t = i + 1; t < n; ++t) rhs *= IntPoly(factorial(I.count_eq(t)));
    Vars v{n, i};
    for (auto& x : Om)
        if (!M.count(x)) rhs *= v.C(i, x.col) - IntPoly(x.ht);
    if (!(lhs == rhs))
        throw IdentityFailed("basis coefficient for I = " + I.str() + ", M = " + to_string(M) + ": " + lhs.str() +
                             " vs " + rhs.str());
    return true;
}

}  // namespace branchcrit
