#include "branchcrit/lowering.hpp"

#include <algorithm>
#include <tuple>

#include "branchcrit/errors.hpp"

namespace branchcrit {

namespace {

IntPoly cnum(long long c) { return IntPoly(c); }

std::string set_str(const std::set<int>& s) {
    std::string out = "{";
    for (int x : s) {
        if (out.size() > 1) out += ",";
        out += std::to_string(x);
    }
    return out + "}";
}

}  // namespace

// ---------------------------------------------------------------------------
// ElemSpec

int ElemSpec::m(int s) const {
    if (s == 0) return i;
    if (s == k() + 1) return n;
    return Mcal.at(static_cast<size_t>(s - 1));
}

Multiset ElemSpec::Jb(int s) const {
    if (s == 0) return Multiset::repeat(i - 1, d);
    return J.at(static_cast<size_t>(s - 1));
}

const Multiset& ElemSpec::Ib(int s) const { return I.at(static_cast<size_t>(s - 1)); }

bool ElemSpec::well_formed() const {
    if (i < 1 || n <= i || n > kMaxN || d < 0) return false;
    const int kk = k();
    if (static_cast<int>(I.size()) != kk + 1 || static_cast<int>(J.size()) != kk) return false;
    for (int s = 0; s < kk; ++s) {
        int x = Mcal[static_cast<size_t>(s)];
        if (x <= i || x >= n) return false;
        if (s > 0 && x <= Mcal[static_cast<size_t>(s - 1)]) return false;
    }
    for (int s = 1; s <= kk + 1; ++s) {
        int lo = s == 1 ? i : m(s - 1) - 1;
        if (!Ib(s).all_in(lo, m(s))) return false;
    }
    for (int s = 1; s <= kk; ++s)
        if (!Jb(s).all_in(m(s) - 1, m(s + 1))) return false;
    for (int s = 1; s <= kk; ++s) {
        int ms = m(s);
        if (Ib(s + 1).count_eq(ms - 1) + Jb(s).size() != Ib(s).size() + Jb(s - 1).count_eq(ms - 1))
            return false;
    }
    return true;
}

void ElemSpec::validate() const {
    if (!well_formed()) throw InvalidSpec(str());
}

std::string ElemSpec::str() const {
    std::string s = "S[i=" + std::to_string(i) + ",n=" + std::to_string(n) + ",d=" + std::to_string(d) +
                    ",M={";
    for (size_t t = 0; t < Mcal.size(); ++t) s += (t ? "," : "") + std::to_string(Mcal[t]);
    s += "},I=(";
    for (size_t t = 0; t < I.size(); ++t) s += (t ? "," : "") + I[t].str();
    s += "),J=(";
    for (size_t t = 0; t < J.size(); ++t) s += (t ? "," : "") + J[t].str();
    return s + ")]";
}

std::vector<int> weight_of_spec(const ElemSpec& spec) {
    spec.validate();
    std::vector<int> c(static_cast<size_t>(spec.n - 1), 0);
    for (int s = 0; s <= spec.k(); ++s) {
        const Multiset& Is = spec.Ib(s + 1);
        Multiset Js = spec.Jb(s);
        for (int t = spec.m(s); t < spec.m(s + 1); ++t)
            c[static_cast<size_t>(t - 1)] = -spec.d + Is.count_le(t) + Js.count_ge(t);
        // Boundary consistency: the block formula extends one step to the left.
        int t = spec.m(s) - 1;
        int ext = -spec.d + Is.count_le(t) + Js.count_ge(t);
        int expect = t >= 1 ? c[static_cast<size_t>(t - 1)] : 0;
        if (ext != expect) throw IdentityFailed("weight boundary at t = " + std::to_string(t) + " for " + spec.str());
    }
    return c;
}

std::vector<int> spec_flows(const ElemSpec& spec) {
    auto c = weight_of_spec(spec);
    for (int& x : c) x = -x;
    return c;
}

HypElement elementary_expression(const ElemSpec& spec) {
    thread_local std::map<ElemSpec, HypElement> cache;
    if (auto it = cache.find(spec); it != cache.end()) return it->second;
    auto flows = spec_flows(spec);
    HypElement out(spec.n);
    Vars v{spec.n, spec.i};
    if (std::all_of(flows.begin(), flows.end(), [](int x) { return x >= 0; })) {
        for (const auto& N : enumerate_matrices(spec.n, flows)) {
            IntPoly coeff(1);
            for (int s = 0; s <= spec.k() && !coeff.is_zero(); ++s) {
                int ms = spec.m(s);
                Multiset Js = spec.Jb(s);
                const Multiset& Is = spec.Ib(s + 1);
                for (int t = ms; t < spec.m(s + 1); ++t) {
                    int base = N.col_sum(t) + Js.count_eq(t - 1);
                    int e = spec.d - (base + Is.count_lt(t));
                    coeff *= IntPoly(factorial(base)) * falling(v.C(ms, t) + v.u(ms), e);
                }
            }
            out.add(N, coeff);
        }
    }
    cache.emplace(spec, out);
    return out;
}

RuleCase rule_case(int l, const ElemSpec& spec) {
    if (l < spec.i) return RuleCase::Zero;
    if (l == spec.n - 1) return RuleCase::Last;
    for (int r = 1; r <= spec.k(); ++r)
        if (l == spec.m(r) - 1) return RuleCase::Boundary;
    return RuleCase::Inner;
}

std::string rule_case_name(RuleCase c) {
    switch (c) {
        case RuleCase::Zero: return "l<i";
        case RuleCase::Inner: return "inner";
        case RuleCase::Boundary: return "boundary";
        case RuleCase::Last: return "last";
    }
    return "?";
}

HypElement e_times_S(int l, const ElemSpec& spec) {
    if (l < 1 || l >= spec.n) throw BadIndices("E_l with l = " + std::to_string(l));
    return e_action(l, elementary_expression(spec));
}

namespace {

HypElement term(const ElemSpec& s, const IntPoly& c) {
    if (c.is_zero()) return HypElement(s.n);
    s.validate();
    return elementary_expression(s).scaled(c);
}

}  // namespace

HypElement rule_rhs(int l, const ElemSpec& spec) {
    spec.validate();
    const int i = spec.i;
    const int d = spec.d;
    Vars v{spec.n, i};
    HypElement out(spec.n);
    switch (rule_case(l, spec)) {
        case RuleCase::Zero: return out;
        case RuleCase::Inner: {
            int r = 0;
            while (!(spec.m(r) <= l && l < spec.m(r + 1) - 1)) ++r;
            if (r > 0 && l > i) {
                int c = spec.Jb(r).count_eq(l - 1);
                if (c > 0) {
                    ElemSpec s = spec;
                    s.J[static_cast<size_t>(r - 1)] = spec.Jb(r).replace_one(l - 1, l);
                    out -= term(s, cnum(c));
                }
            }
            const Multiset& Ir = spec.Ib(r + 1);
            int c = Ir.count_eq(l + 1);
            if (c > 0) {
                ElemSpec s = spec;
                s.I[static_cast<size_t>(r)] = Ir.replace_one(l + 1, l);
                int mr = spec.m(r);
                out += term(s, cnum(c) * (v.C(mr, l + 1) + v.u(mr) + cnum(-d + Ir.count_le(l))));
            }
            return out;
        }
        case RuleCase::Boundary: {
            int r = 1;
            while (spec.m(r) - 1 != l) ++r;
            const int mr = spec.m(r);
            const int mprev = spec.m(r - 1);
            if (r > 1 && mr - 1 > i) {
                int c = spec.Jb(r - 1).count_eq(mr - 2);
                if (c > 0) {
                    ElemSpec s = spec;
                    s.J[static_cast<size_t>(r - 2)] = spec.Jb(r - 1).replace_one(mr - 2, mr - 1);
                    s.J[static_cast<size_t>(r - 1)] = spec.Jb(r).with(mr - 1);
                    out -= term(s, cnum(c));
                }
            }
            {
                ElemSpec s = spec;
                s.I[static_cast<size_t>(r - 1)] = spec.Ib(r).with(mr - 1);
                s.J[static_cast<size_t>(r - 1)] = spec.Jb(r).with(mr - 1);
                IntPoly f = v.C(mprev, mr) + v.u(mprev) - v.u(mr) +
                            cnum(spec.Ib(r).size() - spec.Ib(r + 1).count_eq(mr - 1));
                out += term(s, f);
            }
            int c = spec.Ib(r + 1).count_eq(mr);
            if (c > 0) {
                ElemSpec s = spec;
                s.I[static_cast<size_t>(r - 1)] = spec.Ib(r).with(mr - 1);
                s.I[static_cast<size_t>(r)] = spec.Ib(r + 1).replace_one(mr, mr - 1);
                out += term(s, cnum(c) * (v.u(mr) + cnum(-d + spec.Ib(r + 1).count_eq(mr - 1))));
            }
            return out;
        }
        case RuleCase::Last: {
            const int kk = spec.k();
            const int n = spec.n;
            if (kk > 0 && n - 1 > i) {
                int c = spec.Jb(kk).count_eq(n - 2);
                if (c > 0) {
                    ElemSpec s = spec;
                    s.J[static_cast<size_t>(kk - 1)] = spec.Jb(kk).replace_one(n - 2, n - 1);
                    out -= term(s, cnum(c));
                }
            }
            ElemSpec s = spec;
            s.I[static_cast<size_t>(kk)] = spec.Ib(kk + 1).with(n - 1);
            int mk = spec.m(kk);
            out += term(s, v.C(mk, n) + v.u(mk) + cnum(-d + spec.Ib(kk + 1).size()));
            return out;
        }
    }
    return out;
}

namespace {

// Π (f - h) over h in [0..top] outside [lo..hi]; requires [lo..hi] ⊆ [0..top].
IntPoly gapped_falling(const IntPoly& f, int top, int lo, int hi) {
    if (lo < 0 || hi > top) throw NonIntegralResult("denominator range [" + std::to_string(lo) + ".." +
                                                    std::to_string(hi) + "] outside [0.." + std::to_string(top) + "]");
    IntPoly r(1);
    for (int h = 0; h <= top; ++h)
        if (h < lo || h > hi) r *= f - IntPoly(h);
    return r;
}

}  // namespace

IntPoly P_coefficient(const ElemSpec& spec) {
    auto a = spec_flows(spec);
    if (std::any_of(a.begin(), a.end(), [](int x) { return x < 0; })) return {};
    auto A = [&](int t) { return t >= 1 && t <= spec.n - 1 ? a[static_cast<size_t>(t - 1)] : 0; };
    Vars v{spec.n, spec.i};
    const int d = spec.d;
    IntPoly total(1);
    for (int s = 0; s <= spec.k(); ++s) {
        int ms = spec.m(s);
        Multiset Js = spec.Jb(s);
        const Multiset& Is = spec.Ib(s + 1);
        total *= falling(v.u(ms), Js.count_ge(ms));
        for (int t = ms + 1; t <= spec.m(s + 1); ++t) {
            IntPoly base = v.C(ms, t) + v.u(ms);
            int top = d - Is.count_le(t - 1);
            IntPoly sum;
            for (int q = 0; q <= A(t - 1); ++q) {
                mpz_class b = binomial(Is.count_eq(t - 1), A(t - 2) - A(t - 1) + q) * binomial(A(t - 1), q);
                if (b == 0) continue;
                IntPoly summand = gapped_falling(base, top, Js.count_ge(t), Js.count_ge(t - 1) + q);
                summand *= b;
                summand *= falling(v.H(t - 1) - v.H(t), q);
                sum += summand;
            }
            sum *= factorial(Js.count_eq(t - 2));
            total *= sum;
            if (total.is_zero()) return total;
        }
    }
    try {
        return exact_div(total, IntPoly(factorial(A(spec.n - 1))));
    } catch (const NotDivisible&) {
        throw NonIntegralResult("P coefficient not divisible by a_{n-1}! for " + spec.str());
    }
}

// ---------------------------------------------------------------------------
// Formal operators

std::string FormalOp::str() const {
    return "S(" + std::to_string(m) + "," + std::to_string(mp) + ";" + I.str() + "," + J.str() + ")";
}

FormalPoly FormalPoly::op(FormalCtx ctx, FormalOp o) {
    FormalPoly p(ctx);
    p.add(FormalKey{{std::move(o)}, {}}, IntPoly(1));
    return p;
}

FormalPoly FormalPoly::scalar(FormalCtx ctx, const IntPoly& c) {
    FormalPoly p(ctx);
    p.add(FormalKey{}, c);
    return p;
}

void FormalPoly::add(const FormalKey& key, const IntPoly& num) {
    if (num.is_zero()) return;
    auto [it, fresh] = terms_.try_emplace(key, IntPoly());
    it->second += num;
    if (it->second.is_zero()) terms_.erase(it);
}

FormalPoly& FormalPoly::operator+=(const FormalPoly& o) {
    for (auto& [k, c] : o.terms_) add(k, c);
    return *this;
}

FormalPoly& FormalPoly::operator-=(const FormalPoly& o) {
    for (auto& [k, c] : o.terms_) add(k, -c);
    return *this;
}

FormalPoly FormalPoly::operator+(const FormalPoly& o) const {
    FormalPoly r(*this);
    return r += o;
}

FormalPoly FormalPoly::operator-(const FormalPoly& o) const {
    FormalPoly r(*this);
    return r -= o;
}

FormalPoly FormalPoly::operator*(const FormalPoly& o) const {
    FormalPoly r(ctx_);
    for (auto& [ka, ca] : terms_)
        for (auto& [kb, cb] : o.terms_) {
            FormalKey k;
            k.ops = ka.ops;
            k.ops.insert(k.ops.end(), kb.ops.begin(), kb.ops.end());
            std::sort(k.ops.begin(), k.ops.end());
            k.den = ka.den;
            for (auto& [f, e] : kb.den) k.den[f] += e;
            r.add(k, ca * cb);
        }
    return r;
}

FormalPoly FormalPoly::scaled(const IntPoly& f) const {
    FormalPoly r(ctx_);
    if (f.is_zero()) return r;
    for (auto& [k, c] : terms_) r.add(k, c * f);
    return r;
}

FormalPoly FormalPoly::divided(int m, int mp) const {
    FormalPoly r(ctx_);
    for (auto& [k, c] : terms_) {
        FormalKey k2 = k;
        k2.den[{m, mp}] += 1;
        r.add(k2, c);
    }
    return r;
}

bool FormalPoly::squarefree_denominators() const {
    for (auto& [k, c] : terms_)
        for (auto& [f, e] : k.den)
            if (e > 1) return false;
    return true;
}

IntPoly denominator_poly(const Vars& v, const Denominator& den) {
    IntPoly r(1);
    for (auto& [f, e] : den) {
        IntPoly g = v.C(f.first, f.second) - v.u(f.second) + v.u(f.first);
        for (int s = 0; s < e; ++s) r *= g;
    }
    return r;
}

namespace {

Denominator lcm_den(const std::vector<const FormalPoly*>& polys) {
    Denominator D;
    for (auto* p : polys)
        for (auto& [k, c] : p->terms())
            for (auto& [f, e] : k.den) D[f] = std::max(D[f], e);
    return D;
}

Denominator den_quotient(const Denominator& D, const Denominator& den) {
    Denominator q = D;
    for (auto& [f, e] : den) {
        q[f] -= e;
        if (q[f] == 0) q.erase(f);
    }
    return q;
}

std::map<std::vector<FormalOp>, IntPoly> cleared(const FormalPoly& p, const Denominator& D) {
    Vars v = p.ctx().vars();
    std::map<std::vector<FormalOp>, IntPoly> out;
    for (auto& [k, c] : p.terms()) {
        IntPoly x = c * denominator_poly(v, den_quotient(D, k.den));
        auto [it, fresh] = out.try_emplace(k.ops, IntPoly());
        it->second += x;
        if (it->second.is_zero()) out.erase(it);
    }
    return out;
}

}  // namespace

bool FormalPoly::equals(const FormalPoly& o) const {
    Denominator D = lcm_den({this, &o});
    return cleared(*this, D) == cleared(o, D);
}

std::string FormalPoly::str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto& [k, c] : terms_) {
        if (!s.empty()) s += " + ";
        s += "(" + c.str() + ")";
        for (auto& o : k.ops) s += "*" + o.str();
        for (auto& [f, e] : k.den)
            s += "/(C(" + std::to_string(f.first) + "," + std::to_string(f.second) + ")-u" +
                 std::to_string(f.second) + "+u" + std::to_string(f.first) + ")" +
                 (e > 1 ? "^" + std::to_string(e) : "");
    }
    return s;
}

FormalPoly build_T_formal(FormalCtx ctx, int k, int j, const std::set<int>& Mcal, const Multiset& I,
                          const Multiset& J) {
    using Key = std::tuple<int, int, int, int, int, std::set<int>, Multiset, Multiset>;
    thread_local std::map<Key, FormalPoly> cache;
    Key key{ctx.i, ctx.n, ctx.d, k, j, Mcal, I, J};
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    if (k < ctx.i || j > ctx.n || k >= j) throw InvalidSpec("T indices k = " + std::to_string(k) + ", j = " + std::to_string(j));
    if (k == ctx.i ? (J != ctx.J0() || !I.all_in(ctx.i, j)) : (!I.all_in(k - 1, j) || !J.all_in(k - 1, j)))
        throw InvalidSpec("T arguments " + I.str() + ", " + J.str() + " for (" + std::to_string(k) + "," +
                          std::to_string(j) + ")");
    FormalPoly out(ctx);
    if (Mcal.empty()) {
        out = FormalPoly::op(ctx, FormalOp{k, j, I, J});
    } else {
        int m = *Mcal.begin();
        if (m <= k || m >= j) throw InvalidSpec("M entry " + std::to_string(m) + " outside (k..j)");
        std::set<int> rest(std::next(Mcal.begin()), Mcal.end());
        FormalPoly a = build_T_formal(ctx, k, j, rest, I, J);
        FormalPoly b = FormalPoly::op(ctx, FormalOp{k, m, I.cut_Lup(m), J.cut_L(m)}) *
                       build_T_formal(ctx, m, j, rest, I.cut_Rup(m), J.cut_R(m));
        out = (a - b).divided(k, m);
    }
    cache.emplace(key, out);
    return out;
}

namespace {

struct OpImage {
    bool zero = false;
    IntPoly coeff{1};
    FormalOp op;
};

OpImage rho_op(RhoTag tag, int l, const FormalOp& o, const FormalCtx& ctx) {
    Vars v = ctx.vars();
    const int m = o.m;
    const int mp = o.mp;
    const int d = ctx.d;
    OpImage r{false, IntPoly(1), o};
    switch (tag) {
        case RhoTag::One:
            if (m <= l && l < mp) {
                int c = o.J.count_eq(l - 1);
                if (l > ctx.i && c > 0) {
                    r.coeff = IntPoly(-c);
                    r.op.J = o.J.replace_one(l - 1, l);
                } else {
                    r.zero = true;
                }
            } else if (l == m - 1) {
                r.op.J = o.J.with(m - 1);
            }
            return r;
        case RhoTag::TwoL:
            if (m <= l && l < mp - 1) {
                r.zero = true;
            } else if (l == mp - 1) {
                r.op.I = o.I.with(mp - 1);
                r.coeff = v.C(m, mp) + v.u(m) + IntPoly(-d + o.I.size());
            } else if (l == m - 1) {
                r.op.J = o.J.with(m - 1);
            }
            return r;
        case RhoTag::TwoR:
            if (m <= l && l < mp - 1) {
                r.zero = true;
            } else if (l == mp - 1) {
                r.op.I = o.I.with(mp - 1);
            } else if (l == m - 1) {
                r.op.J = o.J.with(m - 1);
                r.coeff = v.u(m) + IntPoly(-d + o.I.count_eq(m - 1));
            }
            return r;
        case RhoTag::Three:
            if (m - 1 <= l && l < mp - 1) {
                int c = o.I.count_eq(l + 1);
                if (c > 0) {
                    r.op.I = o.I.replace_one(l + 1, l);
                    r.coeff = IntPoly(c) * (v.C(m, l + 1) + v.u(m) + IntPoly(-d + o.I.count_le(l)));
                } else {
                    r.zero = true;
                }
            } else if (l == mp - 1) {
                r.op.I = o.I.with(mp - 1);
            }
            return r;
        default: break;
    }
    throw BadIndices("rho_op needs an endomorphism tag");
}

FormalPoly rho_endo(RhoTag tag, int l, const FormalPoly& P) {
    FormalPoly out(P.ctx());
    for (auto& [k, c] : P.terms()) {
        FormalKey k2{{}, k.den};
        IntPoly coeff = c;
        bool zero = false;
        for (auto& o : k.ops) {
            OpImage im = rho_op(tag, l, o, P.ctx());
            if (im.zero) {
                zero = true;
                break;
            }
            coeff *= im.coeff;
            k2.ops.push_back(im.op);
        }
        if (zero) continue;
        std::sort(k2.ops.begin(), k2.ops.end());
        out.add(k2, coeff);
    }
    return out;
}

}  // namespace

FormalPoly rho(RhoTag tag, int l, const FormalPoly& P) {
    switch (tag) {
        case RhoTag::Two: return rho_endo(RhoTag::TwoL, l, P) - rho_endo(RhoTag::TwoR, l, P);
        case RhoTag::All:
            return rho_endo(RhoTag::One, l, P) + rho(RhoTag::Two, l, P) + rho_endo(RhoTag::Three, l, P);
        default: return rho_endo(tag, l, P);
    }
}

ElemSpec spec_of_ops(FormalCtx ctx, const std::vector<FormalOp>& ops) {
    if (ops.empty() || ops.front().m != ctx.i || ops.back().mp != ctx.n) throw NotFull("blocks do not tile [i..n)");
    for (size_t s = 0; s + 1 < ops.size(); ++s)
        if (ops[s].mp != ops[s + 1].m) throw NotFull("blocks do not tile [i..n)");
    if (ops.front().J != ctx.J0()) throw NotFull("first block must carry J_0");
    ElemSpec spec{ctx.i, ctx.n, ctx.d, {}, {}, {}};
    for (size_t s = 0; s < ops.size(); ++s) {
        if (s > 0) {
            spec.Mcal.push_back(ops[s].m);
            spec.J.push_back(ops[s].J);
        }
        spec.I.push_back(ops[s].I);
    }
    spec.validate();
    return spec;
}

HypElement ev_formal(const FormalPoly& P) {
    const FormalCtx& ctx = P.ctx();
    Vars v = ctx.vars();
    Denominator D = lcm_den({&P});
    HypElement acc(ctx.n);
    for (auto& [k, c] : P.terms()) {
        ElemSpec spec = spec_of_ops(ctx, k.ops);
        IntPoly scale = c * denominator_poly(v, den_quotient(D, k.den));
        acc += elementary_expression(spec).scaled(scale);
    }
    if (D.empty()) return acc;
    try {
        return divide_elem(acc, denominator_poly(v, D));
    } catch (const NotDivisible&) {
        throw DenominatorSurvived("ev of a formal polynomial is not in the integral form");
    }
}

HypElement T_eval(int i, int n, int d, const std::set<int>& Mcal, const Multiset& I) {
    using Key = std::tuple<int, int, int, std::set<int>, Multiset>;
    thread_local std::map<Key, HypElement> cache;
    Key key{i, n, d, Mcal, I};
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    for (int m : Mcal)
        if (m <= i || m >= n) throw InvalidSpec("M entry " + std::to_string(m) + " outside (i..n)");
    HypElement X(n);
    if (Mcal.empty()) {
        X = elementary_expression(ElemSpec{i, n, d, {}, {I}, {}});
    } else {
        int m = *Mcal.begin();
        std::set<int> rest(std::next(Mcal.begin()), Mcal.end());
        HypElement prev = T_eval(i, n, d, rest, I);
        Vars v{n, i};
        HypElement num = prev - sigma_elem(v, i, m, prev);
        X = divide_elem(num, v.C(i, m) - v.u(m));
    }
    cache.emplace(key, X);
    return X;
}

HypElement scriptT(int i, int n, int d, const PointSet& M, const Multiset& I) {
    std::set<int> cols;
    std::map<int, long long> uvals;
    for (const auto& x : M) {
        if (!cols.insert(x.col).second)
            throw InvalidSpec("two points in column " + std::to_string(x.col));
        if (x.col <= i || x.col >= n) throw InvalidSpec("column " + std::to_string(x.col) + " outside (i..n)");
        uvals[x.col] = x.ht;
    }
    return subst_u_elem(T_eval(i, n, d, cols, I), uvals);
}

// ---------------------------------------------------------------------------
// Raising coefficients

namespace {

// Column t factor of cf_κ on a formal operator, for a given q_t.
IntPoly cf_column(const FormalCtx& ctx, const FormalOp& o, int t, int q) {
    Vars v = ctx.vars();
    const int d = ctx.d;
    int A = d - o.I.count_le(t - 1) - o.J.count_ge(t - 1);
    if (A < 0) throw InvalidSpec("formal operator " + o.str() + " has positive weight");
    int it1 = o.I.count_eq(t - 1);
    int jt2 = o.J.count_eq(t - 2);
    mpz_class b = binomial(it1, it1 - jt2 + q) * binomial(A, q);
    if (b == 0) return {};
    IntPoly r = gapped_falling(v.C(o.m, t) + v.u(o.m), d - o.I.count_le(t - 1), o.J.count_ge(t),
                               o.J.count_ge(t - 1) + q);
    r *= b * factorial(jt2);
    r *= falling(v.H(t - 1) - v.H(t), q);
    return r;
}

int kappa_at(const FormalCtx& ctx, const Kappa& kappa, int t) {
    if (t <= ctx.i) return 0;
    if (static_cast<int>(kappa.size()) != ctx.n - ctx.i) throw BadIndices("kappa must have length n-i");
    return kappa[static_cast<size_t>(t - ctx.i - 1)];
}

IntPoly combine(const FormalPoly& P, const std::function<IntPoly(const std::vector<FormalOp>&)>& value) {
    Vars v = P.ctx().vars();
    Denominator D = lcm_den({&P});
    IntPoly acc;
    for (auto& [k, c] : P.terms()) {
        IntPoly x = value(k.ops);
        if (x.is_zero()) continue;
        acc += x * c * denominator_poly(v, den_quotient(D, k.den));
    }
    try {
        return exact_div(acc, denominator_poly(v, D));
    } catch (const NotDivisible&) {
        throw DenominatorSurvived("raising coefficient keeps a denominator");
    }
}

}  // namespace

IntPoly cf_kappa_op(FormalCtx ctx, const FormalOp& o, const Kappa& kappa) {
    Vars v = ctx.vars();
    IntPoly r = falling(v.u(o.m), o.J.count_ge(o.m));
    for (int t = o.m + 1; t <= o.mp && !r.is_zero(); ++t) r *= cf_column(ctx, o, t, kappa_at(ctx, kappa, t));
    return r;
}

IntPoly cf_kappa(const FormalPoly& P, const Kappa& kappa) {
    return combine(P, [&](const std::vector<FormalOp>& ops) {
        IntPoly r(1);
        for (auto& o : ops) {
            r *= cf_kappa_op(P.ctx(), o, kappa);
            if (r.is_zero()) break;
        }
        return r;
    });
}

IntPoly cf_total(const FormalPoly& P) {
    const FormalCtx& ctx = P.ctx();
    return combine(P, [&](const std::vector<FormalOp>& ops) {
        Vars v = ctx.vars();
        int covered = 0;
        IntPoly r(1);
        for (auto& o : ops) {
            covered += o.mp - o.m;
            r *= falling(v.u(o.m), o.J.count_ge(o.m));
            for (int t = o.m + 1; t <= o.mp && !r.is_zero(); ++t) {
                IntPoly col;
                for (int q = 0; q <= ctx.d; ++q) col += cf_column(ctx, o, t, q);
                r *= col;
            }
        }
        if (covered != ctx.n - ctx.i) throw NotFull("cf over all κ needs a full polynomial");
        return r;
    });
}

IntPoly cf_d(FormalCtx ctx, int k, int j, const Kappa& kappa, const Multiset& I, const Multiset& J) {
    Vars v = ctx.vars();
    IntPoly r(1);
    for (int t = k + 1; t <= j && !r.is_zero(); ++t) {
        int q = kappa_at(ctx, kappa, t);
        int it1 = I.count_eq(t - 1);
        int jt2 = J.count_eq(t - 2);
        mpz_class b = factorial(jt2) * binomial(it1, it1 - jt2 + q) *
                      binomial(ctx.d - I.count_le(t - 1) - J.count_ge(t - 1), q);
        r *= IntPoly(b) * falling(v.H(t - 1) - v.H(t), q);
    }
    return r;
}

PointSet delta_kappa(int k, int j, const Kappa& kappa, int i, const Multiset& J) {
    PointSet out;
    for (int t = k + 1; t <= j; ++t) {
        int q = t <= i ? 0 : kappa.at(static_cast<size_t>(t - i - 1));
        for (int h = J.count_ge(t); h <= J.count_ge(t - 1) + q; ++h) out.insert(Point{t, h});
    }
    return out;
}

std::vector<Kappa> kappa_support(FormalCtx ctx, int k, int j, const Multiset& I, const Multiset& J) {
    std::vector<Kappa> out{Kappa(static_cast<size_t>(ctx.n - ctx.i), 0)};
    for (int t = k + 1; t <= j; ++t) {
        int hi = std::min(ctx.d - I.count_le(t - 1) - J.count_ge(t - 1), J.count_eq(t - 2));
        int lo = std::max(0, J.count_eq(t - 2) - I.count_eq(t - 1));
        std::vector<Kappa> next;
        for (const auto& base : out)
            for (int q = lo; q <= hi; ++q) {
                Kappa x = base;
                x[static_cast<size_t>(t - ctx.i - 1)] = q;
                next.push_back(x);
            }
        out = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Raising rules on a single 𝒯 factor

std::string TArgs::str() const {
    return "T[" + std::to_string(k) + "," + std::to_string(j) + ",M=" + set_str(Mcal) + ",I=" + I.str() +
           ",J=" + J.str() + "]";
}

std::string rho_branch(const TArgs& a, int l) {
    if (l == a.j - 1) return "l=j-1";
    if (l == a.k - 1) return "l=k-1";
    int m = a.Mcal.empty() ? a.j : *a.Mcal.begin();
    if (l < m - 1) return "k<=l<m-1";
    if (l == m - 1) return "l=m-1";
    return "l>=m";
}

namespace {

FormalPoly T(const FormalCtx& ctx, int k, int j, const std::set<int>& M, const Multiset& I, const Multiset& J) {
    std::set<int> inside;
    for (int x : M)
        if (x > k && x < j) inside.insert(x);
    return build_T_formal(ctx, k, j, inside, I, J);
}

}  // namespace

FormalPoly rho1_rule(FormalCtx ctx, const TArgs& a, int l) {
    if (a.k <= l && l < a.j) {
        int c = a.J.count_eq(l - 1);
        if (l <= ctx.i || c == 0) return FormalPoly(ctx);
        return T(ctx, a.k, a.j, a.Mcal, a.I, a.J.replace_one(l - 1, l)).scaled(IntPoly(-c));
    }
    if (l == a.k - 1 && ctx.i < a.k) return T(ctx, a.k, a.j, a.Mcal, a.I, a.J.with(a.k - 1));
    return T(ctx, a.k, a.j, a.Mcal, a.I, a.J);
}

FormalPoly rho2_rule(FormalCtx ctx, const TArgs& a, int l) {
    if (!(a.k <= l && l < a.j - 1)) throw BadIndices("rho2 rule needs k <= l < j-1");
    if (!a.Mcal.count(l + 1)) return FormalPoly(ctx);
    FormalPoly left = T(ctx, a.k, l + 1, a.Mcal, a.I.cut_Lup(l + 1).with(l), a.J.cut_L(l + 1));
    FormalPoly right = T(ctx, l + 1, a.j, a.Mcal, a.I.cut_Rup(l + 1), a.J.cut_R(l + 1).with(l));
    return (left * right).scaled(IntPoly(-1));
}

FormalPoly rho2L_rule(FormalCtx ctx, const TArgs& a, int l) {
    Vars v = ctx.vars();
    if (l == a.k - 1 && ctx.i < a.k) return T(ctx, a.k, a.j, a.Mcal, a.I, a.J.with(a.k - 1));
    if (l != a.j - 1) throw BadIndices("rho2L rule needs l = k-1 or l = j-1");
    FormalPoly out = T(ctx, a.k, a.j, a.Mcal, a.I.with(a.j - 1), a.J)
                         .scaled(v.C(a.k, a.j) + v.u(a.k) + IntPoly(-ctx.d + a.I.size()));
    for (int q : a.Mcal)
        out += T(ctx, a.k, q, a.Mcal, a.I.cut_Lup(q), a.J.cut_L(q)) *
               T(ctx, q, a.j, a.Mcal, a.I.cut_Rup(q).with(a.j - 1), a.J.cut_R(q));
    return out;
}

FormalPoly rho2R_rule(FormalCtx ctx, const TArgs& a, int l) {
    Vars v = ctx.vars();
    if (l == a.k - 1 && ctx.i < a.k)
        return T(ctx, a.k, a.j, a.Mcal, a.I, a.J.with(a.k - 1))
            .scaled(v.u(a.k) + IntPoly(-ctx.d + a.I.count_eq(a.k - 1)));
    if (l != a.j - 1) throw BadIndices("rho2R rule needs l = k-1 or l = j-1");
    return T(ctx, a.k, a.j, a.Mcal, a.I.with(a.j - 1), a.J);
}

FormalPoly rho3_rule(FormalCtx ctx, const TArgs& a, int l, int origin) {
    Vars v = ctx.vars();
    if (l == a.j - 1) return T(ctx, a.k, a.j, a.Mcal, a.I.with(a.j - 1), a.J);
    if (!(std::max(a.k - 1, ctx.i) <= l && l < a.j - 1)) throw BadIndices("rho3 rule needs max(k-1,i) <= l < j-1");
    if (origin > l + 1 || (origin != a.k && !a.Mcal.count(origin)))
        throw BadIndices("origin must lie in (M ∪ {k}) ∩ (-inf..l+1]");
    int c = a.I.count_eq(l + 1);
    if (c == 0) return FormalPoly(ctx);
    Multiset Ip = a.I.replace_one(l + 1, l);
    IntPoly lin = v.C(origin, l + 1) + v.u(origin) + IntPoly(-ctx.d + a.I.count_le(l));
    FormalPoly out = T(ctx, a.k, a.j, a.Mcal, Ip, a.J).scaled(lin);
    if (origin > a.k) {
        std::set<int> rest = a.Mcal;
        rest.erase(origin);
        out += T(ctx, a.k, a.j, rest, Ip, a.J);
    }
    for (int q : a.Mcal) {
        if (q <= origin || q > l + 1) continue;
        out += T(ctx, a.k, q, a.Mcal, Ip.cut_Lup(q), a.J.cut_L(q)) *
               T(ctx, q, a.j, a.Mcal, a.I.cut_Rup(q).replace_one(l + 1, l), a.J.cut_R(q));
    }
    return out.scaled(IntPoly(c));
}

}  // namespace branchcrit
