#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "branchcrit/errors.hpp"
#include "branchcrit/lowering.hpp"
#include "support.hpp"

using namespace branchcrit;
using bct::rint;

namespace {

std::vector<std::set<int>> subsets_of_open(int lo, int hi) {
    std::vector<std::set<int>> out;
    for (auto& s : bct::all_subsets(lo + 1, hi - 1)) out.push_back(s);
    return out;
}

bool uses_any_u(const HypElement& X) {
    for (auto& [N, c] : X.terms)
        for (int t = 1; t <= kMaxN; ++t)
            if (c.uses_var(u_id(t))) return true;
    return false;
}

// The spec obtained by splitting block r at m, with the cut operators on I_{r+1} and J_r.
ElemSpec split_spec(const ElemSpec& s, int r, int m) {
    ElemSpec out{s.i, s.n, s.d, {}, {}, {}};
    out.Mcal = s.Mcal;
    out.Mcal.insert(std::upper_bound(out.Mcal.begin(), out.Mcal.end(), m), m);
    for (int q = 1; q <= s.k() + 1; ++q) {
        if (q == r + 1) {
            out.I.push_back(s.Ib(q).cut_Lup(m));
            out.I.push_back(s.Ib(q).cut_Rup(m));
        } else {
            out.I.push_back(s.Ib(q));
        }
    }
    std::vector<Multiset> full;
    for (int q = 0; q <= s.k(); ++q) {
        if (q == r) {
            full.push_back(s.Jb(q).cut_L(m));
            full.push_back(s.Jb(q).cut_R(m));
        } else {
            full.push_back(s.Jb(q));
        }
    }
    EXPECT_EQ(full.front(), s.Jb(0));
    out.J.assign(full.begin() + 1, full.end());
    return out;
}

}  // namespace

TEST(Lowering, SpecWeightExamples) {
    EXPECT_EQ(weight_of_spec(ElemSpec{1, 3, 1, {}, {Multiset{}}, {}}), (std::vector<int>{-1, -1}));
    EXPECT_EQ(weight_of_spec(ElemSpec{2, 4, 2, {}, {Multiset{}}, {}}), (std::vector<int>{0, -2, -2}));
    for (int rep = 0; rep < 200; ++rep) {
        ElemSpec s = bct::random_spec(5, 3, rep % 2 == 0);
        auto c = weight_of_spec(s);
        auto a = spec_flows(s);
        ASSERT_EQ(c.size(), a.size());
        for (std::size_t t = 0; t < c.size(); ++t) EXPECT_EQ(a[t], -c[t]);
        for (auto& [N, coeff] : elementary_expression(s).terms) EXPECT_EQ(wt(N), a) << s.str();
    }
}

TEST(Lowering, SplittingPreservesWeight) {
    int split = 0;
    for (int rep = 0; rep < 400; ++rep) {
        ElemSpec s = bct::random_spec(5, 3, false);
        for (int r = 0; r <= s.k(); ++r)
            for (int m = s.m(r) + 1; m < s.m(r + 1); ++m) {
                if (m >= s.n) continue;
                ElemSpec t = split_spec(s, r, m);
                if (!t.well_formed()) continue;
                ++split;
                EXPECT_EQ(weight_of_spec(t), weight_of_spec(s)) << s.str() << " -> " << t.str();
            }
    }
    EXPECT_GT(split, 50);
}

TEST(Lowering, ElementaryExpressionExamples) {
    for (int d = 0; d <= 4; ++d) {
        ElemSpec s{1, 2, d, {}, {Multiset{}}, {}};
        UTMatrix N(2);
        N.set(1, 2, d);
        EXPECT_EQ(elementary_expression(s), HypElement::single(N, factorial(d)));
    }
    ElemSpec s{1, 3, 1, {}, {Multiset{}}, {}};
    HypElement expect(3);
    expect.add(UTMatrix::unit(3, 1, 3), cdiff(1, 2));
    expect.add(UTMatrix::unit(3, 1, 2) + UTMatrix::unit(3, 2, 3), 1);
    EXPECT_EQ(elementary_expression(s), expect);

    // Weight zero: only the zero matrix survives.
    ElemSpec zero{1, 2, 1, {}, {Multiset({1})}, {}};
    HypElement Z = elementary_expression(zero);
    ASSERT_EQ(Z.terms.size(), 1u);
    EXPECT_TRUE(Z.terms.begin()->first.is_zero());

    ElemSpec bad{1, 3, 1, {2}, {Multiset{}, Multiset{}}, {Multiset{0}}};
    EXPECT_FALSE(bad.well_formed());
    EXPECT_THROW(bad.validate(), InvalidSpec);
}

TEST(Lowering, MultiplicationRulesMatchAction) {
    std::map<RuleCase, int> hits;
    for (int rep = 0; rep < 120; ++rep) {
        ElemSpec s = bct::random_spec(4, 3, rep % 2 == 0);
        for (int l = 1; l < s.n; ++l) {
            RuleCase c = rule_case(l, s);
            ++hits[c];
            HypElement lhs = e_times_S(l, s);
            EXPECT_EQ(lhs, rule_rhs(l, s)) << s.str() << " l=" << l << " " << rule_case_name(c);
            if (l < s.i) {
                EXPECT_TRUE(lhs.is_zero());
            }
        }
    }
    for (RuleCase c : {RuleCase::Inner, RuleCase::Boundary, RuleCase::Last}) EXPECT_GE(hits[c], 5) << rule_case_name(c);
}

TEST(Lowering, RaisingCoefficientClosedForm) {
    for (int d = 0; d <= 4; ++d)
        EXPECT_EQ(P_coefficient(ElemSpec{1, 2, d, {}, {Multiset{}}, {}}), falling(IntPoly::H(1) - IntPoly::H(2), d));
    int negative = 0, nonzero = 0;
    for (int rep = 0; rep < 150; ++rep) {
        ElemSpec s = bct::random_spec(4, 3, rep % 2 == 0);
        auto a = spec_flows(s);
        IntPoly P = P_coefficient(s);
        if (std::any_of(a.begin(), a.end(), [](int x) { return x < 0; })) {
            ++negative;
            EXPECT_TRUE(P.is_zero()) << s.str();
            continue;
        }
        EXPECT_EQ(P, raise_divided(a, elementary_expression(s))) << s.str();
        nonzero += !P.is_zero();
    }
    EXPECT_GT(negative, 0);
    EXPECT_GT(nonzero, 10);
}

// σ_{m_r,m} splits block r at m, and fixes the expression when m is the next block boundary.
TEST(Lowering, CuttingSplitsElementaryExpressions) {
    int splits = 0, fixes = 0;
    for (int rep = 0; rep < 300; ++rep) {
        ElemSpec s = bct::random_spec(5, 2, false);
        Vars v{s.n, s.i};
        HypElement S = elementary_expression(s);
        for (int r = 0; r <= s.k(); ++r)
            for (int m = s.m(r) + 1; m <= s.m(r + 1) && m < s.n; ++m) {
                HypElement got = sigma_elem(v, s.m(r), m, S);
                if (m == s.m(r + 1)) {
                    ++fixes;
                    EXPECT_EQ(got, S) << s.str() << " m=" << m;
                } else {
                    ElemSpec t = split_spec(s, r, m);
                    ASSERT_TRUE(t.well_formed()) << t.str();
                    ++splits;
                    EXPECT_EQ(got, elementary_expression(t)) << s.str() << " r=" << r << " m=" << m;
                }
            }
    }
    EXPECT_GT(splits, 50);
    EXPECT_GT(fixes, 20);
}

TEST(Lowering, FormalOperatorExamples) {
    FormalCtx ctx{1, 4, 2};
    FormalPoly base = build_T_formal(ctx, 1, 4, {}, Multiset{1}, ctx.J0());
    ASSERT_EQ(base.terms().size(), 1u);
    EXPECT_EQ(base.terms().begin()->second, IntPoly(1));
    EXPECT_TRUE(base.terms().begin()->first.den.empty());

    FormalCtx c3{1, 3, 1};
    FormalPoly one = build_T_formal(c3, 1, 3, {2}, Multiset{}, c3.J0());
    EXPECT_EQ(one.terms().size(), 2u);
    for (auto& [key, num] : one.terms()) EXPECT_EQ(key.den, (Denominator{{{1, 2}, 1}}));
    EXPECT_TRUE(one.squarefree_denominators());
    EXPECT_EQ(ev_formal(one), HypElement::single(UTMatrix::unit(3, 1, 3), 1));
}

TEST(Lowering, RecursionMatchesFormalEvaluation) {
    EXPECT_EQ(T_eval(1, 3, 1, {2}, Multiset{}), HypElement::single(UTMatrix::unit(3, 1, 3), 1));
    int checked = 0;
    for (int n = 2; n <= 5; ++n)
        for (int i = 1; i < n; ++i)
            for (int d = 0; d <= 2; ++d)
                for (auto& M : subsets_of_open(i, n))
                    for (auto& I : bct::all_multisets(i, n - 1, d)) {
                        FormalCtx ctx{i, n, d};
                        HypElement a = T_eval(i, n, d, M, I);
                        EXPECT_EQ(a, ev_formal(build_T_formal(ctx, i, n, M, I, ctx.J0())));
                        if (M.empty()) {
                            EXPECT_EQ(a, elementary_expression(ElemSpec{i, n, d, {}, {I}, {}}));
                        }
                        ++checked;
                    }
    EXPECT_GT(checked, 100);
}

// E_l·ev(𝒯) equals ev of the raised formal polynomial, and of the sum of the
// three raising rules; the rules do not depend on the chosen origin.
TEST(Lowering, RaisingRulesOnFullOperators) {
    std::map<std::string, int> branches;
    for (int n = 2; n <= 5; ++n)
        for (int i = 1; i < n; ++i)
            for (int d = 0; d <= 2; ++d)
                for (auto& M : subsets_of_open(i, n))
                    for (auto& I : bct::all_multisets(i, n - 1, d)) {
                        FormalCtx ctx{i, n, d};
                        FormalPoly F = build_T_formal(ctx, i, n, M, I, ctx.J0());
                        HypElement X = T_eval(i, n, d, M, I);
                        TArgs ta{i, n, M, I, ctx.J0()};
                        for (int l = i; l < n; ++l) {
                            ++branches[rho_branch(ta, l)];
                            HypElement lhs = e_action(l, X);
                            FormalPoly raised = rho(RhoTag::All, l, F);
                            EXPECT_EQ(lhs, ev_formal(raised)) << ta.str() << " l=" << l;
                            FormalPoly rules(ctx);
                            if (l == n - 1)
                                rules = rho1_rule(ctx, ta, l) + rho2L_rule(ctx, ta, l) - rho2R_rule(ctx, ta, l) +
                                        rho3_rule(ctx, ta, l, i);
                            else
                                rules = rho1_rule(ctx, ta, l) + rho2_rule(ctx, ta, l) + rho3_rule(ctx, ta, l, i);
                            EXPECT_TRUE(rules.equals(raised)) << ta.str() << " l=" << l;
                            EXPECT_EQ(lhs, ev_formal(rules));
                            if (l < n - 1)
                                for (int o : M)
                                    if (o <= l + 1) {
                                        FormalPoly alt = rho1_rule(ctx, ta, l) + rho2_rule(ctx, ta, l) + rho3_rule(ctx, ta, l, o);
                                        EXPECT_TRUE(alt.equals(rules)) << ta.str() << " l=" << l << " origin " << o;
                                    }
                        }
                    }
    for (auto& name : {"k<=l<m-1", "l=m-1", "l>=m", "l=j-1"}) EXPECT_GT(branches[name], 0) << name;
}

// The three rules hold formally for inner operators with k > i as well.
TEST(Lowering, RaisingRulesOnInnerOperators) {
    int checked = 0;
    for (int n = 3; n <= 5; ++n)
        for (int i = 1; i < n; ++i)
            for (int d = 1; d <= 2; ++d)
                for (int k = i + 1; k < n; ++k)
                    for (int j = k + 1; j <= n; ++j) {
                        FormalCtx ctx{i, n, d};
                        for (auto& M : subsets_of_open(k, j))
                            for (auto& I : bct::all_multisets(k - 1, j - 1, d))
                                for (auto& J : bct::all_multisets(k - 1, j - 1, d)) {
                                    TArgs a{k, j, M, I, J};
                                    FormalPoly F = build_T_formal(ctx, k, j, M, I, J);
                                    for (int l = std::max(k - 1, 1); l < j; ++l) {
                                        EXPECT_TRUE(rho1_rule(ctx, a, l).equals(rho(RhoTag::One, l, F))) << a.str() << l;
                                        FormalPoly r2 = rho(RhoTag::Two, l, F);
                                        if (l == k - 1 || l == j - 1) {
                                            EXPECT_TRUE((rho2L_rule(ctx, a, l) - rho2R_rule(ctx, a, l)).equals(r2));
                                            EXPECT_TRUE(rho2L_rule(ctx, a, l).equals(rho(RhoTag::TwoL, l, F)));
                                        } else {
                                            EXPECT_TRUE(rho2_rule(ctx, a, l).equals(r2)) << a.str() << l;
                                        }
                                        if (l >= std::max(k - 1, i)) {
                                            EXPECT_TRUE(rho3_rule(ctx, a, l, k).equals(rho(RhoTag::Three, l, F)));
                                        }
                                        ++checked;
                                    }
                                }
                    }
    EXPECT_GT(checked, 500);
}

TEST(Lowering, TopRaiseAppendsToI) {
    for (int n = 3; n <= 4; ++n)
        for (int d = 1; d <= 2; ++d) {
            FormalCtx ctx{1, n, d};
            for (auto& M : subsets_of_open(1, n))
                for (auto& I : bct::all_multisets(1, n - 1, d - 1)) {
                    FormalPoly F = build_T_formal(ctx, 1, n, M, I, ctx.J0());
                    FormalPoly G = build_T_formal(ctx, 1, n, M, I.with(n - 1), ctx.J0());
                    EXPECT_TRUE(rho(RhoTag::Three, n - 1, F).equals(G)) << I.str();
                }
        }
}

TEST(Lowering, ScriptTExamples) {
    HypElement X = scriptT(1, 3, 1, {{2, 0}}, Multiset{});
    EXPECT_EQ(X, HypElement::single(UTMatrix::unit(3, 1, 3), 1));
    EXPECT_EQ(scriptT(1, 4, 2, {}, Multiset{2}), elementary_expression(ElemSpec{1, 4, 2, {}, {Multiset{2}}, {}}));
    EXPECT_THROW(scriptT(1, 4, 1, {{2, 0}, {2, 1}}, Multiset{}), InvalidSpec);
    EXPECT_THROW(scriptT(1, 4, 1, {{4, 0}}, Multiset{}), InvalidSpec);
    EXPECT_THROW(scriptT(2, 4, 1, {{2, 0}}, Multiset{}), InvalidSpec);
    for (int n = 3; n <= 5; ++n)
        for (int d = 1; d <= 2; ++d)
            for (auto& cols : subsets_of_open(1, n)) {
                PointSet M;
                for (int t : cols) M.insert({t, rint(0, d)});
                EXPECT_FALSE(uses_any_u(scriptT(1, n, d, M, Multiset{})));
            }
}

TEST(Lowering, CoefficientFunctionExample) {
    for (int d = 0; d <= 4; ++d) {
        FormalCtx ctx{1, 2, d};
        FormalPoly S = FormalPoly::op(ctx, FormalOp{1, 2, Multiset{}, ctx.J0()});
        EXPECT_EQ(cf_kappa(S, {d}), factorial(d) * falling(IntPoly::H(1) - IntPoly::H(2), d));
        for (int q = 0; q <= d + 2; ++q)
            if (q != d) {
                EXPECT_TRUE(cf_kappa(S, {q}).is_zero()) << d << " " << q;
            }
        EXPECT_EQ(cf_total(S), factorial(d) * falling(IntPoly::H(1) - IntPoly::H(2), d));
    }
}

// a_{n-1}!·E^(a)·ev(P) ≡ cf_total(P) for the full operators.
TEST(Lowering, CoefficientTotalMatchesRaising) {
    int checked = 0;
    for (int n = 2; n <= 4; ++n)
        for (int i = 1; i < n; ++i)
            for (int d = 0; d <= 3; ++d)
                for (auto& M : subsets_of_open(i, n))
                    for (auto& I : bct::all_multisets(i, n - 1, d)) {
                        FormalCtx ctx{i, n, d};
                        auto a = spec_flows(ElemSpec{i, n, d, {}, {I}, {}});
                        if (std::any_of(a.begin(), a.end(), [](int x) { return x < 0; })) continue;
                        FormalPoly F = build_T_formal(ctx, i, n, M, I, ctx.J0());
                        IntPoly lhs = raise_divided(a, ev_formal(F)) * IntPoly(factorial(a.back()));
                        EXPECT_EQ(lhs, cf_total(F)) << n << i << d << I.str();
                        ++checked;
                    }
    EXPECT_GT(checked, 100);
}

TEST(Lowering, DeltaDefinitionAndCutBookkeeping) {
    for (int rep = 0; rep < 500; ++rep) {
        int n = rint(2, 6), i = rint(1, n - 1);
        int k = rint(i - 1, n - 1), j = rint(k + 1, n);
        int d = rint(0, 3);
        Kappa kappa(static_cast<size_t>(n - i));
        for (auto& q : kappa) q = rint(0, 2);
        Multiset I = bct::random_multiset(k - 2, j + 1, 4);
        Multiset J = bct::random_multiset(k - 2, j + 1, 4);
        PointSet D = delta_kappa(k, j, kappa, i, J);
        PointSet expect;
        for (int t = k + 1; t <= j; ++t) {
            int q = t <= i ? 0 : kappa[static_cast<size_t>(t - i - 1)];
            for (int h = -5; h <= 12; ++h)
                if (J.count_ge(t) <= h && h <= J.count_ge(t - 1) + q) expect.insert({t, h});
        }
        EXPECT_EQ(D, expect);
        EXPECT_EQ(sigma_diagram(k, j, d, I.cut_Lup(j)), sigma_diagram(k, j, d, I));
        EXPECT_EQ(sigma_diagram(k, j, d, I.cut_Rup(k)), sigma_diagram(k, j, d, I));
        EXPECT_EQ(delta_kappa(k, j, kappa, i, J.cut_R(k)), D);
        PointSet grown = D;
        for (int h = 0; h < J.count_ge(j); ++h) EXPECT_TRUE(grown.insert({j, h}).second) << "not disjoint";
        EXPECT_EQ(delta_kappa(k, j, kappa, i, J.cut_L(j)), grown);
    }
}

// cf_κ(𝒯) is divisible by cf^(d) and, modulo the ideal of an injection ι, equals
// the displayed product.
TEST(Lowering, CoefficientDivisibilityAndIdealProductFormula) {
    int divisible = 0, ideal = 0;
    for (int n = 2; n <= 5; ++n)
        for (int i = 1; i < n; ++i)
            for (int d = 0; d <= 2; ++d)
                for (int k = i; k < n; ++k)
                    for (int j = k + 1; j <= n; ++j) {
                        FormalCtx ctx{i, n, d};
                        Vars v = ctx.vars();
                        auto Is = k == i ? bct::all_multisets(i, j - 1, d) : bct::all_multisets(k - 1, j - 1, d);
                        auto Js = k == i ? std::vector<Multiset>{ctx.J0()} : bct::all_multisets(k - 1, j - 1, d);
                        for (auto& M : subsets_of_open(k, j))
                            for (auto& I : Is)
                                for (auto& J : Js) {
                                    FormalPoly F = build_T_formal(ctx, k, j, M, I, J);
                                    for (auto& kap : kappa_support(ctx, k, j, I, J)) {
                                        IntPoly cf = cf_kappa(F, kap);
                                        IntPoly cd = cf_d(ctx, k, j, kap, I, J);
                                        if (cd.is_zero()) {
                                            EXPECT_TRUE(cf.is_zero());
                                            continue;
                                        }
                                        EXPECT_NO_THROW(exact_div(cf, cd)) << k << j << I.str() << J.str();
                                        ++divisible;
                                        PointSet Sig = sigma_diagram(k, j, d, I);
                                        PointSet Del = delta_kappa(k, j, kap, i, J);
                                        if (!std::includes(Sig.begin(), Sig.end(), Del.begin(), Del.end())) continue;
                                        std::vector<Point> avail;
                                        for (auto& x : Sig)
                                            if (!Del.count(x)) avail.push_back(x);
                                        std::vector<int> Mv(M.begin(), M.end());
                                        std::map<int, Point> iota;
                                        std::set<Point> used;
                                        int count = 0;
                                        std::function<void(std::size_t)> rec = [&](std::size_t q) {
                                            if (count > 20) return;
                                            if (q == Mv.size()) {
                                                ++count;
                                                std::map<int, IntPoly> sub;
                                                for (auto& [t, x] : iota) sub[t] = IntPoly(x.ht) - v.C(t, x.col);
                                                IntPoly rhs = falling(v.u(k), J.count_ge(k)) * cd;
                                                for (auto& x : avail)
                                                    if (!used.count(x)) rhs *= v.C(k, x.col) + v.u(k) - IntPoly(x.ht);
                                                EXPECT_TRUE(subst_u(cf - rhs, sub).is_zero()) << k << j << I.str() << J.str();
                                                ++ideal;
                                                return;
                                            }
                                            int t = Mv[q];
                                            for (auto& x : avail) {
                                                if (used.count(x) || x.col < t) continue;
                                                if (x.col == t && !(x.ht < J.count_ge(t))) continue;
                                                used.insert(x);
                                                iota[t] = x;
                                                rec(q + 1);
                                                used.erase(x);
                                                iota.erase(t);
                                            }
                                        };
                                        rec(0);
                                    }
                                }
                    }
    EXPECT_GT(divisible, 200);
    EXPECT_GT(ideal, 100);
}

// Coefficient of F_{i,n,I}^(d) in the specialized operator.
TEST(Lowering, BasisCoefficientProduct) {
    int checked = 0;
    for (int n = 2; n <= 5; ++n)
        for (int i = 1; i < n; ++i)
            for (int d = 0; d <= 3; ++d)
                for (auto& I : bct::all_multisets(i + 1, n - 1, d)) {
                    PointSet Om = omega_diagram(i, n, d, I);
                    std::vector<Point> pts(Om.begin(), Om.end());
                    Vars v{n, i};
                    std::function<void(std::size_t, PointSet)> rec = [&](std::size_t q, PointSet M) {
                        if (q == pts.size()) {
                            UTMatrix N(n);
                            for (int t = i + 1; t < n; ++t) N.set(i, t, I.count_eq(t));
                            N.set(i, n, d - I.size());
                            IntPoly rhs(factorial(d));
                            for (int t = i + 1; t < n; ++t) rhs *= IntPoly(factorial(I.count_eq(t)));
                            for (auto& x : Om)
                                if (!M.count(x)) rhs *= v.C(i, x.col) - IntPoly(x.ht);
                            EXPECT_EQ(scriptT(i, n, d, M, I).coefficient(N), rhs) << to_string(M) << " " << I.str();
                            ++checked;
                            return;
                        }
                        rec(q + 1, M);
                        if (std::none_of(M.begin(), M.end(), [&](const Point& x) { return x.col == pts[q].col; })) {
                            M.insert(pts[q]);
                            rec(q + 1, M);
                        }
                    };
                    rec(0, {});
                }
    EXPECT_GT(checked, 100);
}
