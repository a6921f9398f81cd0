#include <gtest/gtest.h>

#include "branchcrit/errors.hpp"
#include "branchcrit/polyring.hpp"
#include "support.hpp"

using namespace branchcrit;
using bct::rint;

namespace {

// Random polynomial over the ring variables of v, small degree and coefficients.
IntPoly random_poly(const Vars& v, int max_terms = 4, int max_deg = 3) {
    std::vector<int> ids;
    for (int s = 1; s <= v.n; ++s) ids.push_back(h_id(s));
    for (int t = v.i + 1; t < v.n; ++t) ids.push_back(u_id(t));
    IntPoly f;
    int k = rint(0, max_terms);
    for (int q = 0; q < k; ++q) {
        IntPoly m(rint(-5, 5));
        int deg = rint(0, max_deg);
        for (int e = 0; e < deg; ++e) m *= IntPoly::var(ids[static_cast<size_t>(rint(0, static_cast<int>(ids.size()) - 1))]);
        f += m;
    }
    return f;
}

Vars random_vars() {
    int n = rint(3, 6);
    return {n, rint(1, n - 2)};
}

// σ by plain substitution of every variable, one term at a time.
IntPoly sigma_by_substitution(const Vars& v, int l, int m, const IntPoly& f) {
    IntPoly L = v.C(l, m) - v.u(m) + v.u(l);
    IntPoly out;
    for (const auto& t : f.terms()) {
        IntPoly term(t.c);
        for (int k = 0; k < kNumVars; ++k) {
            int e = t.m.e[static_cast<size_t>(k)];
            if (!e) continue;
            IntPoly x = IntPoly::var(k);
            if (k < kMaxN && k + 1 >= m) x += L;
            term *= pow(x, e);
        }
        out += term;
    }
    return out;
}

Weight random_weight(int n) {
    Weight w(static_cast<size_t>(n));
    for (auto& x : w) x = rint(-6, 6);
    return w;
}

}  // namespace

TEST(Polyring, CdiffExamples) {
    EXPECT_EQ(cdiff(1, 2), IntPoly(1) + IntPoly::H(1) - IntPoly::H(2));
    EXPECT_EQ(cdiff(1, 2).str(), "H1 - H2 + 1");
    for (int k = 1; k <= 6; ++k) EXPECT_TRUE(cdiff(k, k).is_zero());
    for (int k = 1; k <= 6; ++k)
        for (int l = 1; l <= 6; ++l)
            for (int m = 1; m <= 6; ++m) EXPECT_EQ(cdiff(k, l) + cdiff(l, m), cdiff(k, m));
}

TEST(Polyring, FallingFactorial) {
    IntPoly f = IntPoly::H(1) - IntPoly::H(2);
    EXPECT_EQ(falling(f, 2), f * (f - 1));
    EXPECT_EQ(falling(f, 0), IntPoly(1));
    EXPECT_THROW(falling(f, -1), NegativeExponent);
    for (int k = 0; k <= 10; ++k) EXPECT_EQ(falling(IntPoly(k), k), IntPoly(factorial(k)));
    for (int k = 0; k <= 8; ++k)
        for (long long x = -3; x <= 10; ++x) {
            mpz_class expect = 1;
            for (int q = 0; q < k; ++q) expect *= static_cast<long>(x - q);
            EXPECT_EQ(evaluate(falling(IntPoly::H(1), k), {x}), expect);
        }
}

TEST(Polyring, BinomialAndFactorial) {
    EXPECT_EQ(factorial(0), 1);
    EXPECT_EQ(factorial(6), 720);
    EXPECT_EQ(binomial(5, 2), 10);
    EXPECT_EQ(binomial(2, 5), 0);
    EXPECT_EQ(binomial(4, -1), 0);
    for (long long a = 0; a <= 30; ++a)
        for (long long b = 0; b <= a; ++b) EXPECT_EQ(binomial(a, b) * factorial(static_cast<int>(b)) * factorial(static_cast<int>(a - b)), factorial(static_cast<int>(a)));
}

TEST(Polyring, RingAxioms) {
    for (int rep = 0; rep < 300; ++rep) {
        Vars v = random_vars();
        IntPoly a = random_poly(v), b = random_poly(v), c = random_poly(v);
        EXPECT_EQ(a + b, b + a);
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ((a + b) + c, a + (b + c));
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        EXPECT_TRUE((a - a).is_zero());
        EXPECT_EQ(a * IntPoly(1), a);
        EXPECT_TRUE((a * IntPoly(0)).is_zero());
        // Evaluation is a ring homomorphism.
        Weight w = random_weight(v.n);
        IntPoly au = subst_u_int(a, {}), bu = subst_u_int(b, {});
        std::map<int, long long> zero_u;
        for (int t = v.i + 1; t < v.n; ++t) zero_u[t] = rint(-3, 3);
        IntPoly a0 = subst_u_int(a, zero_u), b0 = subst_u_int(b, zero_u);
        EXPECT_EQ(evaluate(a0 * b0, w), evaluate(a0, w) * evaluate(b0, w));
        EXPECT_EQ(evaluate(a0 + b0, w), evaluate(a0, w) + evaluate(b0, w));
        EXPECT_EQ(au, a);
        EXPECT_EQ(bu, b);
    }
}

TEST(Polyring, VarsContext) {
    Vars v{4, 1};
    EXPECT_TRUE(v.u(1).is_zero());
    EXPECT_EQ(v.u(2), IntPoly::u(2));
    EXPECT_THROW(v.u(4), BadIndices);
    EXPECT_THROW(v.H(5), BadIndices);
}

TEST(Polyring, SigmaExamples) {
    Vars v{3, 1};
    EXPECT_EQ(sigma(v, 1, 2, IntPoly::H(2)), IntPoly::H(1) + 1 - IntPoly::u(2));
    EXPECT_EQ(sigma(v, 1, 2, IntPoly::H(1)), IntPoly::H(1));
    EXPECT_EQ(sigma(v, 1, 2, IntPoly::u(2)), IntPoly::u(2));
    EXPECT_TRUE(sigma(v, 1, 2, cdiff(1, 2) - v.u(2) + v.u(1)).is_zero());
    EXPECT_THROW(sigma(v, 0, 2, IntPoly::H(1)), BadIndices);
    EXPECT_THROW(sigma(v, 2, 2, IntPoly::H(1)), BadIndices);
    EXPECT_THROW(sigma(v, 1, 3, IntPoly::H(1)), BadIndices);
}

TEST(Polyring, SigmaMatchesSubstitutionAndIsIdempotentHomomorphism) {
    for (int rep = 0; rep < 400; ++rep) {
        Vars v = random_vars();
        int l = rint(v.i, v.n - 2);
        int m = rint(l + 1, v.n - 1);
        IntPoly f = random_poly(v), g = random_poly(v);
        IntPoly sf = sigma(v, l, m, f);
        EXPECT_EQ(sf, sigma_by_substitution(v, l, m, f));
        EXPECT_EQ(sigma(v, l, m, sf), sf);
        EXPECT_EQ(sigma(v, l, m, f * g), sf * sigma(v, l, m, g));
        EXPECT_EQ(sigma(v, l, m, f + g), sf + sigma(v, l, m, g));
    }
}

// σ_{l,m}(C(q,t) + u_l) is unchanged unless q < m <= t, where it becomes
// C(m,t) + C(q,l) + u_m.
TEST(Polyring, SigmaOnShiftedDifferencesTrichotomy) {
    for (int n = 3; n <= 6; ++n)
        for (int i = 1; i <= n - 2; ++i) {
            Vars v{n, i};
            for (int l = i; l < n; ++l)
                for (int m = l + 1; m < n; ++m)
                    for (int q = 1; q <= n; ++q)
                        for (int t = q; t <= n; ++t) {
                            IntPoly got = sigma(v, l, m, cdiff(q, t) + v.u(l));
                            IntPoly expect = (q < m && m <= t) ? cdiff(m, t) + cdiff(q, l) + v.u(m)
                                                               : cdiff(q, t) + v.u(l);
                            EXPECT_EQ(got, expect) << n << i << l << m << q << t;
                        }
        }
}

TEST(Polyring, SigmaKillsOnlyItsOwnLinearForm) {
    for (int n = 3; n <= 6; ++n)
        for (int i = 1; i <= n - 2; ++i) {
            Vars v{n, i};
            for (int l = i; l < n; ++l)
                for (int m = l + 1; m < n; ++m)
                    for (int q = i; q < n; ++q)
                        for (int t = q + 1; t < n; ++t) {
                            bool zero = sigma(v, l, m, cdiff(q, t) - v.u(t) + v.u(q)).is_zero();
                            EXPECT_EQ(zero, l == q && m == t);
                        }
        }
}

TEST(Polyring, ExactDivExamples) {
    Vars v{3, 1};
    IntPoly g = cdiff(1, 2) - v.u(2);
    EXPECT_EQ(exact_div(g * (IntPoly::H(3) + 5), g), IntPoly::H(3) + 5);
    EXPECT_THROW(exact_div(IntPoly::H(1), g), NotDivisible);
    EXPECT_THROW(exact_div(IntPoly::H(1), IntPoly(0)), NotDivisible);
    EXPECT_EQ(exact_div(IntPoly(6) * IntPoly::H(1), IntPoly(3)), IntPoly(2) * IntPoly::H(1));
    EXPECT_THROW(exact_div(IntPoly(5), IntPoly(3)), NotDivisible);
}

// Divisibility by C(l,m) - u_m + u_l holds exactly when σ_{l,m} kills the element.
TEST(Polyring, DivisibilityMatchesSigmaCriterion) {
    int divisible = 0, not_divisible = 0;
    for (int rep = 0; rep < 600; ++rep) {
        Vars v = random_vars();
        int l = rint(v.i, v.n - 2);
        int m = rint(l + 1, v.n - 1);
        IntPoly L = v.C(l, m) - v.u(m) + v.u(l);
        IntPoly y = random_poly(v);
        IntPoly f = y * L;
        EXPECT_TRUE(sigma(v, l, m, f).is_zero());
        EXPECT_EQ(exact_div(f, L), y);
        IntPoly g = f + random_poly(v);
        if (sigma(v, l, m, g).is_zero()) {
            EXPECT_NO_THROW(exact_div(g, L));
            ++divisible;
        } else {
            EXPECT_THROW(exact_div(g, L), NotDivisible);
            ++not_divisible;
        }
    }
    EXPECT_GT(not_divisible, 100);
    EXPECT_GT(divisible, 10);
}

TEST(Polyring, ExactDivInvertsMultiplication) {
    for (int rep = 0; rep < 300; ++rep) {
        Vars v = random_vars();
        IntPoly f = random_poly(v), g = random_poly(v);
        if (g.is_zero()) continue;
        EXPECT_EQ(exact_div(f * g, g), f);
    }
}

TEST(Polyring, SubstitutionAndSpecialization) {
    Vars v{3, 1};
    EXPECT_EQ(specialize(cdiff(1, 3) + v.u(2), {1, 0, 0}, {{2, 0}}, 2), 1);
    EXPECT_EQ(specialize(IntPoly(0), {1, 0, 0}, {}, 5), 0);
    EXPECT_THROW(specialize(v.u(2), {1, 0, 0}, {}, 5), UnassignedVariable);
    EXPECT_THROW(evaluate(v.u(2), {1, 0, 0}), UnassignedVariable);
    // u_t -> h - C(t, c) kills C(t, c) + u_t - h.
    Vars w{5, 1};
    for (int t = 2; t <= 4; ++t)
        for (int c = 1; c <= 5; ++c)
            for (int h = 0; h <= 3; ++h) {
                IntPoly target = cdiff(t, c) + w.u(t) - h;
                EXPECT_TRUE(subst_u(target, {{t, IntPoly(h) - cdiff(t, c)}}).is_zero());
            }
}

TEST(Polyring, SpecializeMatchesExactEvaluationModP) {
    for (int rep = 0; rep < 500; ++rep) {
        Vars v = random_vars();
        IntPoly f = random_poly(v, 6, 4);
        Weight lambda = random_weight(v.n);
        std::map<int, long long> uv;
        for (int t = v.i + 1; t < v.n; ++t) uv[t] = rint(-4, 4);
        long long p = std::array<long long, 4>{2, 3, 5, 7}[static_cast<size_t>(rint(0, 3))];
        mpz_class exact = evaluate(subst_u_int(f, uv), lambda);
        mpz_class r = exact % static_cast<long>(p);
        if (r < 0) r += static_cast<long>(p);
        EXPECT_EQ(specialize(f, lambda, uv, p), r.get_si());
    }
}

TEST(Polyring, FracPolyEquivalenceAndArithmetic) {
    for (int rep = 0; rep < 300; ++rep) {
        Vars v = random_vars();
        IntPoly a = random_poly(v), b = random_poly(v), c = random_poly(v), k = random_poly(v);
        if (b.is_zero() || c.is_zero() || k.is_zero()) continue;
        FracPoly x(a, b), y(c, k);
        FracPoly x2(a * c, b * c);
        EXPECT_EQ(x, x2);
        EXPECT_EQ(x2, x);
        EXPECT_EQ(x + y, y + x);
        EXPECT_EQ((x + y) - y, x);
        EXPECT_EQ(x * y, y * x);
        if (!c.is_zero()) {
            EXPECT_EQ((x * y) / y, x);
        }
        EXPECT_EQ(x2 + y, x + y);
        EXPECT_EQ(x2 * y, x * y);
        EXPECT_EQ(FracPoly(a * b, b).to_poly(), a);
    }
    EXPECT_THROW(FracPoly(IntPoly(1), IntPoly(0)), NotDivisible);
    EXPECT_THROW(FracPoly(IntPoly::H(1), IntPoly::H(2)).to_poly(), NotDivisible);
}
