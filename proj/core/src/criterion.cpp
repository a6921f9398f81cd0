#include "branchcrit/criterion.hpp"

#include <algorithm>

#include "branchcrit/errors.hpp"

namespace branchcrit {

bool is_dominant(const Weight& lambda) {
    return std::is_sorted(lambda.begin(), lambda.end(), std::greater<>());
}

bool is_prime(long long p) {
    if (p < 2) return false;
    for (long long q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}

long long mod_p(long long v, long long p) { return ((v % p) + p) % p; }

long long binom_mod_p(long long a, long long b, long long p) {
    long long r = 1;
    while (a > 0 || b > 0) {
        long long x = a % p, y = b % p;
        if (y > x) return 0;
        long long num = 1, den = 1;
        for (long long k = 0; k < y; ++k) {
            num = num * ((x - k) % p) % p;
            den = den * ((k + 1) % p) % p;
        }
        long long inv = 1, base = den, e = p - 2;
        while (e > 0) {
            if (e & 1) inv = inv * base % p;
            base = base * base % p;
            e >>= 1;
        }
        r = r * num % p * inv % p;
        a /= p;
        b /= p;
    }
    return r;
}

std::string weight_str(const Weight& lambda) {
    std::string s = "(";
    for (size_t k = 0; k < lambda.size(); ++k) {
        if (k) s += ",";
        s += std::to_string(lambda[k]);
    }
    return s + ")";
}

long long dist(const Weight& lambda, const Point& x, const Point& y) {
    const int n = static_cast<int>(lambda.size());
    for (const Point* q : {&x, &y})
        if (q->col < 1 || q->col > n)
            throw ColumnOutOfRange("column " + std::to_string(q->col) + " not in [1.." +
                                   std::to_string(n) + "]");
    return static_cast<long long>(y.col - x.col) + lambda[static_cast<size_t>(x.col - 1)] -
           lambda[static_cast<size_t>(y.col - 1)] + x.ht - y.ht;
}

void BranchingInstance::validate() const {
    if (lambda.size() < 2) throw InvalidInstance("requires n >= 2");
    if (!is_prime(p)) throw InvalidInstance("p = " + std::to_string(p) + " is not prime");
    if (i < 1 || i >= n()) throw InvalidInstance("requires 1 <= i < n");
    if (d < 1) throw InvalidInstance("requires d >= 1");
    if (d >= p) throw InvalidInstance("requires d < p (got d = " + std::to_string(d) +
                                      ", p = " + std::to_string(p) + ")");
    if (!is_dominant(lambda)) throw InvalidInstance("lambda " + weight_str(lambda) + " is not dominant");
}

std::string BranchingInstance::str() const {
    return "lambda=" + weight_str(lambda) + " p=" + std::to_string(p) + " i=" + std::to_string(i) +
           " d=" + std::to_string(d);
}

CriterionSets sets(const BranchingInstance& inst) {
    inst.validate();
    const int n = inst.n();
    const Point origin{inst.i, 0};
    CriterionSets s;
    for (int t = inst.i + 1; t <= n; ++t) {
        for (int h = 0; h <= inst.d; ++h) {
            Point x{t, h};
            if (mod_p(dist(inst.lambda, origin, x), inst.p) != 0) continue;
            s.X.insert(x);
            if (h >= 1)
                s.Y.insert(x);
            else if (t < n)
                s.C.insert(x);
            else
                s.frakx.insert(x);
        }
    }
    return s;
}

namespace {

// Weakly decreasing injection between finite integer sets: every s maps to a
// distinct c <= s. Hall's condition on prefixes suffices.
bool one_dim_injection(std::vector<int> src, std::vector<int> dst) {
    std::sort(src.begin(), src.end());
    std::sort(dst.begin(), dst.end());
    size_t used = 0;
    for (int s : src) {
        if (used >= dst.size() || dst[used] > s) return false;
        ++used;
    }
    return true;
}

}  // namespace

DirectReport decide_direct(const BranchingInstance& inst) {
    CriterionSets s = sets(inst);
    std::vector<int> cvals;
    for (const auto& c : s.C) cvals.push_back(c.col);
    DirectReport r;
    r.decision = true;
    for (const auto& delta : enumerate_antichains(s.Y)) {
        ++r.checked_antichains;
        bool two_dim = exists_strict_dec_inj(delta, s.C).has_value();
        std::vector<int> shifted_cols;
        for (const auto& y : delta) shifted_cols.push_back(y.col - 1);
        bool one_dim = one_dim_injection(shifted_cols, cvals);
        if (two_dim != one_dim)
            throw IdentityFailed("column reformulation disagrees on " + to_string(delta) + " for " +
                                 inst.str());
        if (!two_dim && r.decision) {
            r.decision = false;
            r.blocker = delta;
        }
    }
    return r;
}

FastReport decide_fast(const BranchingInstance& inst) {
    CriterionSets s = sets(inst);
    FastReport r;
    auto psi = exists_strict_dec_inj(s.Y, s.X);
    r.decision = psi.has_value();
    if (psi) r.psi = std::move(*psi);
    return r;
}

Decision decide(const BranchingInstance& inst, bool verify) {
    Decision out;
    out.sets = sets(inst);
    FastReport fast = decide_fast(inst);
    out.decision = fast.decision;
    out.psi = std::move(fast.psi);
    if (verify) {
        DirectReport direct = decide_direct(inst);
        if (direct.decision != out.decision)
            throw IdentityFailed("fast and direct decisions differ for " + inst.str());
        out.verified = true;
        out.checked_antichains = direct.checked_antichains;
    }
    return out;
}

Witness witness_M(const BranchingInstance& inst) {
    FastReport fast = decide_fast(inst);
    if (!fast.decision) throw CriterionFails("no strictly decreasing injection for " + inst.str());
    Witness w;
    for (auto& [y, x] : fast.psi) {
        w.M.insert(x);
        w.phi[x] = y;
    }
    return w;
}

}  // namespace branchcrit
