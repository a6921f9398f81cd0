#include "branchcrit/polyring.hpp"

#include <algorithm>

#include "branchcrit/errors.hpp"

namespace branchcrit {

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial r;
    for (int k = 0; k < kNumVars; ++k) {
        int s = e[k] + o.e[k];
        if (s > 255) throw Error("monomial exponent overflow");
        r.e[k] = static_cast<std::uint8_t>(s);
    }
    return r;
}

bool Monomial::divides(const Monomial& o) const {
    for (int k = 0; k < kNumVars; ++k)
        if (e[k] > o.e[k]) return false;
    return true;
}

Monomial Monomial::operator/(const Monomial& o) const {
    Monomial r;
    for (int k = 0; k < kNumVars; ++k) r.e[k] = static_cast<std::uint8_t>(e[k] - o.e[k]);
    return r;
}

int Monomial::degree() const {
    int s = 0;
    for (auto x : e) s += x;
    return s;
}

bool Monomial::is_one() const {
    return std::all_of(e.begin(), e.end(), [](std::uint8_t x) { return x == 0; });
}

IntPoly::IntPoly(long long c) {
    if (c != 0) terms_.push_back({Monomial{}, mpz_class(static_cast<long>(c))});
}

IntPoly::IntPoly(const mpz_class& c) {
    if (c != 0) terms_.push_back({Monomial{}, c});
}

IntPoly IntPoly::var(int id) {
    if (id < 0 || id >= kNumVars) throw BadIndices("variable id out of range");
    IntPoly p;
    Monomial m;
    m.e[static_cast<size_t>(id)] = 1;
    p.terms_.push_back({m, 1});
    return p;
}

IntPoly IntPoly::from_terms(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.m < b.m; });
    IntPoly p;
    for (auto& t : terms) {
        if (!p.terms_.empty() && p.terms_.back().m == t.m) {
            p.terms_.back().c += t.c;
            if (p.terms_.back().c == 0) p.terms_.pop_back();
        } else if (t.c != 0) {
            p.terms_.push_back(std::move(t));
        }
    }
    return p;
}

mpz_class IntPoly::constant_value() const {
    if (terms_.empty()) return 0;
    if (!is_constant()) throw Error("polynomial is not constant: " + str());
    return terms_[0].c;
}

bool IntPoly::uses_var(int id) const {
    return std::any_of(terms_.begin(), terms_.end(),
                       [&](const Term& t) { return t.m.e[static_cast<size_t>(id)] != 0; });
}

int IntPoly::total_degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.m.degree());
    return d;
}

IntPoly IntPoly::operator-() const {
    IntPoly r(*this);
    for (auto& t : r.terms_) t.c = -t.c;
    return r;
}

namespace {

std::vector<Term> merge(const std::vector<Term>& a, const std::vector<Term>& b, bool negate_b) {
    std::vector<Term> out;
    out.reserve(a.size() + b.size());
    size_t x = 0, y = 0;
    while (x < a.size() || y < b.size()) {
        if (y == b.size() || (x < a.size() && a[x].m < b[y].m)) {
            out.push_back(a[x++]);
        } else if (x == a.size() || b[y].m < a[x].m) {
            out.push_back(b[y]);
            if (negate_b) out.back().c = -out.back().c;
            ++y;
        } else {
            mpz_class c = negate_b ? mpz_class(a[x].c - b[y].c) : mpz_class(a[x].c + b[y].c);
            if (c != 0) out.push_back({a[x].m, std::move(c)});
            ++x;
            ++y;
        }
    }
    return out;
}

}  // namespace

IntPoly& IntPoly::operator+=(const IntPoly& o) {
    terms_ = merge(terms_, o.terms_, false);
    return *this;
}

IntPoly& IntPoly::operator-=(const IntPoly& o) {
    terms_ = merge(terms_, o.terms_, true);
    return *this;
}

IntPoly& IntPoly::operator*=(const mpz_class& c) {
    if (c == 0) {
        terms_.clear();
    } else {
        for (auto& t : terms_) t.c *= c;
    }
    return *this;
}

IntPoly& IntPoly::operator*=(const IntPoly& o) {
    *this = *this * o;
    return *this;
}

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.is_constant()) {
        IntPoly r(b);
        return r *= a.terms_[0].c;
    }
    if (b.is_constant()) {
        IntPoly r(a);
        return r *= b.terms_[0].c;
    }
    std::vector<Term> prod;
    prod.reserve(a.size() * b.size());
    for (const auto& x : a.terms_)
        for (const auto& y : b.terms_) prod.push_back({x.m * y.m, x.c * y.c});
    return IntPoly::from_terms(std::move(prod));
}

bool operator==(const IntPoly& a, const IntPoly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (size_t k = 0; k < a.terms_.size(); ++k)
        if (a.terms_[k].m != b.terms_[k].m || a.terms_[k].c != b.terms_[k].c) return false;
    return true;
}

std::string IntPoly::str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        mpz_class c = it->c;
        bool neg = c < 0;
        if (neg) c = -c;
        if (s.empty())
            s += neg ? "-" : "";
        else
            s += neg ? " - " : " + ";
        std::string mon;
        for (int k = 0; k < kNumVars; ++k) {
            int e = it->m.e[static_cast<size_t>(k)];
            if (!e) continue;
            if (!mon.empty()) mon += "*";
            mon += k < kMaxN ? "H" + std::to_string(k + 1) : "u" + std::to_string(k - kMaxN + 1);
            if (e > 1) mon += "^" + std::to_string(e);
        }
        if (mon.empty())
            s += c.get_str();
        else if (c == 1)
            s += mon;
        else
            s += c.get_str() + "*" + mon;
    }
    return s;
}

IntPoly pow(const IntPoly& f, int k) {
    IntPoly r(1);
    for (int s = 0; s < k; ++s) r *= f;
    return r;
}

IntPoly Vars::H(int s) const {
    if (s < 1 || s > n) throw BadIndices("H_" + std::to_string(s) + " with n = " + std::to_string(n));
    return IntPoly::H(s);
}

IntPoly Vars::u(int t) const {
    if (t == i) return {};
    if (t <= i || t >= n) throw BadIndices("u_" + std::to_string(t) + " outside (i..n)");
    return IntPoly::u(t);
}

IntPoly Vars::cdiff(int k, int l) {
    if (k == l) return {};
    if (k < 1 || l < 1 || k > kMaxN || l > kMaxN) throw BadIndices("C(k,l) index out of range");
    return IntPoly(l - k) + IntPoly::H(k) - IntPoly::H(l);
}

IntPoly falling(const IntPoly& f, int k) {
    if (k < 0) throw NegativeExponent("falling factorial exponent " + std::to_string(k));
    IntPoly r(1);
    for (int s = 0; s < k; ++s) r *= f - IntPoly(s);
    return r;
}

mpz_class factorial(int k) {
    if (k < 0) throw NegativeExponent("factorial of " + std::to_string(k));
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(k));
    return r;
}

mpz_class binomial(long long a, long long b) {
    if (b < 0 || a < 0 || b > a) return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(a), static_cast<unsigned long>(b));
    return r;
}

namespace {

// Σ_{t >= m} ∂/∂H_t
IntPoly shift_derivative(const IntPoly& f, int m, int n) {
    std::vector<Term> out;
    for (const auto& t : f.terms()) {
        for (int s = m; s <= n; ++s) {
            int e = t.m.e[static_cast<size_t>(h_id(s))];
            if (!e) continue;
            Term d = t;
            d.m.e[static_cast<size_t>(h_id(s))] = static_cast<std::uint8_t>(e - 1);
            d.c *= e;
            out.push_back(std::move(d));
        }
    }
    return IntPoly::from_terms(std::move(out));
}

}  // namespace

IntPoly sigma(const Vars& v, int l, int m, const IntPoly& f) {
    if (!(v.i <= l && l < m && m < v.n))
        throw BadIndices("sigma_{" + std::to_string(l) + "," + std::to_string(m) + "} with i = " +
                         std::to_string(v.i) + ", n = " + std::to_string(v.n));
    // f(H + L·1_{t>=m}) = Σ_k L^k D^k f / k!, evaluated by Horner in L.
    const IntPoly L = v.C(l, m) - v.u(m) + v.u(l);
    std::vector<IntPoly> g{f};
    for (int k = 1;; ++k) {
        IntPoly next = shift_derivative(g.back(), m, v.n);
        if (next.is_zero()) break;
        std::vector<Term> scaled(next.terms());
        for (auto& t : scaled) {
            if (!mpz_divisible_ui_p(t.c.get_mpz_t(), static_cast<unsigned long>(k)))
                throw Error("sigma: divided derivative not integral");
            mpz_divexact_ui(t.c.get_mpz_t(), t.c.get_mpz_t(), static_cast<unsigned long>(k));
        }
        g.push_back(IntPoly::from_terms(std::move(scaled)));
    }
    IntPoly r = g.back();
    for (size_t k = g.size() - 1; k-- > 0;) r = r * L + g[k];
    return r;
}

IntPoly exact_div(const IntPoly& f, const IntPoly& g) {
    if (g.is_zero()) throw NotDivisible("division by zero polynomial");
    if (f.is_zero()) return {};
    if (g.is_constant()) {
        mpz_class c = g.constant_value();
        std::vector<Term> out(f.terms());
        for (auto& t : out) {
            if (!mpz_divisible_p(t.c.get_mpz_t(), c.get_mpz_t()))
                throw NotDivisible(f.str() + " by " + g.str());
            mpz_divexact(t.c.get_mpz_t(), t.c.get_mpz_t(), c.get_mpz_t());
        }
        return IntPoly::from_terms(std::move(out));
    }
    const Term& lg = g.leading();
    std::map<Monomial, mpz_class> rem;
    for (const auto& t : f.terms()) rem.emplace(t.m, t.c);
    std::vector<Term> q;
    while (!rem.empty()) {
        auto top = std::prev(rem.end());
        if (!lg.m.divides(top->first) || !mpz_divisible_p(top->second.get_mpz_t(), lg.c.get_mpz_t()))
            throw NotDivisible(f.str() + " by " + g.str());
        Term qt{top->first / lg.m, 0};
        mpz_divexact(qt.c.get_mpz_t(), top->second.get_mpz_t(), lg.c.get_mpz_t());
        for (const auto& gt : g.terms()) {
            Monomial m = qt.m * gt.m;
            auto [it, fresh] = rem.try_emplace(m, 0);
            it->second -= qt.c * gt.c;
            if (it->second == 0) rem.erase(it);
        }
        q.push_back(std::move(qt));
    }
    return IntPoly::from_terms(std::move(q));
}

IntPoly subst_u(const IntPoly& f, const std::map<int, IntPoly>& assignments) {
    IntPoly r;
    std::map<std::pair<int, int>, IntPoly> powers;
    auto power = [&](int t, int e) -> const IntPoly& {
        auto key = std::make_pair(t, e);
        auto it = powers.find(key);
        if (it == powers.end()) it = powers.emplace(key, pow(assignments.at(t), e)).first;
        return it->second;
    };
    std::vector<Term> plain;
    for (const auto& term : f.terms()) {
        Term base = term;
        IntPoly factor(1);
        bool touched = false;
        for (auto& [t, img] : assignments) {
            auto& e = base.m.e[static_cast<size_t>(u_id(t))];
            if (!e) continue;
            factor *= power(t, e);
            e = 0;
            touched = true;
        }
        if (!touched) {
            plain.push_back(term);
            continue;
        }
        r += factor * IntPoly::from_terms({base});
    }
    return r + IntPoly::from_terms(std::move(plain));
}

IntPoly subst_u_int(const IntPoly& f, const std::map<int, long long>& values) {
    std::vector<Term> out;
    out.reserve(f.size());
    for (const auto& term : f.terms()) {
        Term t = term;
        for (auto& [u, val] : values) {
            auto& e = t.m.e[static_cast<size_t>(u_id(u))];
            if (!e) continue;
            mpz_class pw;
            mpz_pow_ui(pw.get_mpz_t(), mpz_class(static_cast<long>(val)).get_mpz_t(), e);
            t.c *= pw;
            e = 0;
        }
        if (t.c != 0) out.push_back(std::move(t));
    }
    return IntPoly::from_terms(std::move(out));
}

long long specialize(const IntPoly& f, const Weight& lambda, const std::map<int, long long>& uvals,
                     long long p) {
    long long total = 0;
    for (const auto& t : f.terms()) {
        mpz_class cm = t.c % static_cast<long>(p);
        long long acc = mod_p(cm.get_si(), p);
        for (int k = 0; k < kNumVars && acc; ++k) {
            int e = t.m.e[static_cast<size_t>(k)];
            if (!e) continue;
            long long base = 0;
            if (k < kMaxN) {
                if (static_cast<size_t>(k) >= lambda.size())
                    throw UnassignedVariable("H_" + std::to_string(k + 1));
                base = lambda[static_cast<size_t>(k)];
            } else {
                auto it = uvals.find(k - kMaxN + 1);
                if (it == uvals.end()) throw UnassignedVariable("u_" + std::to_string(k - kMaxN + 1));
                base = it->second;
            }
            base = mod_p(base, p);
            for (int s = 0; s < e; ++s) acc = acc * base % p;
        }
        total = (total + acc) % p;
    }
    return total;
}

mpz_class evaluate(const IntPoly& f, const Weight& lambda) {
    mpz_class total = 0;
    for (const auto& t : f.terms()) {
        mpz_class acc = t.c;
        for (int k = 0; k < kNumVars; ++k) {
            int e = t.m.e[static_cast<size_t>(k)];
            if (!e) continue;
            if (k >= kMaxN || static_cast<size_t>(k) >= lambda.size())
                throw UnassignedVariable(k < kMaxN ? "H_" + std::to_string(k + 1)
                                                   : "u_" + std::to_string(k - kMaxN + 1));
            mpz_class pw;
            mpz_pow_ui(pw.get_mpz_t(), mpz_class(static_cast<long>(lambda[static_cast<size_t>(k)])).get_mpz_t(),
                       static_cast<unsigned long>(e));
            acc *= pw;
        }
        total += acc;
    }
    return total;
}

FracPoly::FracPoly(IntPoly n, IntPoly d) : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero()) throw NotDivisible("fraction with zero denominator");
}

FracPoly FracPoly::operator+(const FracPoly& o) const {
    if (den == o.den) return {num + o.num, den};
    return {num * o.den + o.num * den, den * o.den};
}

FracPoly FracPoly::operator-(const FracPoly& o) const {
    if (den == o.den) return {num - o.num, den};
    return {num * o.den - o.num * den, den * o.den};
}

FracPoly FracPoly::operator*(const FracPoly& o) const { return {num * o.num, den * o.den}; }

FracPoly FracPoly::operator/(const FracPoly& o) const { return {num * o.den, den * o.num}; }

std::string FracPoly::str() const {
    if (den == IntPoly(1)) return num.str();
    return "(" + num.str() + ")/(" + den.str() + ")";
}

}  // namespace branchcrit
