#include "branchcrit/hyperalg.hpp"

#include <algorithm>
#include <functional>

#include "branchcrit/errors.hpp"
#include "branchcrit/verma.hpp"

namespace branchcrit {

UTMatrix::UTMatrix(int n) : n_(n), v_(static_cast<size_t>(n * n), 0) {}

UTMatrix UTMatrix::unit(int n, int a, int b) {
    UTMatrix m(n);
    m.set(a, b, 1);
    return m;
}

std::size_t UTMatrix::idx(int a, int b) const {
    if (a < 1 || b > n_ || a >= b)
        throw BadIndices("matrix entry (" + std::to_string(a) + "," + std::to_string(b) +
                         ") outside the strict upper triangle");
    return static_cast<size_t>((a - 1) * n_ + (b - 1));
}

bool UTMatrix::is_zero() const {
    return std::all_of(v_.begin(), v_.end(), [](int x) { return x == 0; });
}

bool UTMatrix::nonnegative() const {
    return std::all_of(v_.begin(), v_.end(), [](int x) { return x >= 0; });
}

int UTMatrix::col_sum(int t) const {
    int s = 0;
    for (int a = 1; a < t; ++a) s += at(a, t);
    return s;
}

int UTMatrix::row_sum(int s) const {
    int r = 0;
    for (int b = s + 1; b <= n_; ++b) r += at(s, b);
    return r;
}

int UTMatrix::flow(int k) const {
    int s = 0;
    for (int a = 1; a <= k; ++a)
        for (int b = std::max(k + 1, a + 1); b <= n_; ++b) s += at(a, b);
    return s;
}

std::vector<int> UTMatrix::flows() const {
    std::vector<int> f;
    for (int k = 1; k < n_; ++k) f.push_back(flow(k));
    return f;
}

mpz_class UTMatrix::factorial_product() const {
    mpz_class r = 1;
    for (int x : v_)
        if (x > 1) r *= factorial(x);
    return r;
}

int UTMatrix::total() const {
    int s = 0;
    for (int x : v_) s += x;
    return s;
}

UTMatrix UTMatrix::operator+(const UTMatrix& o) const {
    UTMatrix r(*this);
    for (size_t k = 0; k < v_.size(); ++k) r.v_[k] += o.v_[k];
    return r;
}

UTMatrix UTMatrix::operator-(const UTMatrix& o) const {
    UTMatrix r(*this);
    for (size_t k = 0; k < v_.size(); ++k) r.v_[k] -= o.v_[k];
    return r;
}

std::string UTMatrix::str() const {
    std::string s = "[";
    for (int a = 1; a < n_; ++a) {
        if (a > 1) s += ",";
        s += "[";
        for (int b = a + 1; b <= n_; ++b) {
            if (b > a + 1) s += ",";
            s += std::to_string(at(a, b));
        }
        s += "]";
    }
    return s + "]";
}

HypElement HypElement::single(const UTMatrix& N, IntPoly coeff) {
    HypElement x(N.n());
    x.add(N, coeff);
    return x;
}

void HypElement::add(const UTMatrix& N, const IntPoly& coeff) {
    if (coeff.is_zero()) return;
    auto [it, fresh] = terms.try_emplace(N, IntPoly());
    it->second += coeff;
    if (it->second.is_zero()) terms.erase(it);
}

HypElement& HypElement::operator+=(const HypElement& o) {
    for (auto& [N, c] : o.terms) add(N, c);
    return *this;
}

HypElement& HypElement::operator-=(const HypElement& o) {
    for (auto& [N, c] : o.terms) add(N, -c);
    return *this;
}

HypElement HypElement::operator+(const HypElement& o) const {
    HypElement r(*this);
    return r += o;
}

HypElement HypElement::operator-(const HypElement& o) const {
    HypElement r(*this);
    return r -= o;
}

HypElement HypElement::scaled(const IntPoly& f) const {
    HypElement r(n);
    if (f.is_zero()) return r;
    for (auto& [N, c] : terms) r.add(N, c * f);
    return r;
}

IntPoly HypElement::coefficient(const UTMatrix& N) const {
    auto it = terms.find(N);
    return it == terms.end() ? IntPoly() : it->second;
}

std::string HypElement::str() const {
    if (terms.empty()) return "0";
    std::string s;
    for (auto& [N, c] : terms) {
        if (!s.empty()) s += " + ";
        s += "F" + N.str() + "*(" + c.str() + ")";
    }
    return s;
}

std::vector<int> wt(const UTMatrix& N) {
    // Column/row balance N(l-1) - N(l) = N_l - N^l.
    for (int l = 1; l <= N.n(); ++l) {
        int lhs = (l >= 2 ? N.flow(l - 1) : 0) - (l < N.n() ? N.flow(l) : 0);
        if (lhs != N.col_sum(l) - N.row_sum(l)) throw IdentityFailed("flow balance at " + N.str());
    }
    return N.flows();
}

std::vector<UTMatrix> enumerate_matrices(int n, const std::vector<int>& flows) {
    if (static_cast<int>(flows.size()) != n - 1) throw BadIndices("flows must have length n-1");
    std::vector<UTMatrix> out;
    if (std::any_of(flows.begin(), flows.end(), [](int x) { return x < 0; })) return out;
    std::vector<std::pair<int, int>> cells;
    for (int a = 1; a < n; ++a)
        for (int b = a + 1; b <= n; ++b) cells.emplace_back(a, b);
    std::vector<int> remaining(flows);
    UTMatrix cur(n);
    std::function<void(size_t)> rec = [&](size_t k) {
        if (k == cells.size()) {
            if (std::all_of(remaining.begin(), remaining.end(), [](int x) { return x == 0; }))
                out.push_back(cur);
            return;
        }
        auto [a, b] = cells[k];
        int cap = remaining[static_cast<size_t>(a - 1)];
        for (int t = a + 1; t < b; ++t) cap = std::min(cap, remaining[static_cast<size_t>(t - 1)]);
        for (int v = 0; v <= cap; ++v) {
            cur.set(a, b, v);
            for (int t = a; t < b; ++t) remaining[static_cast<size_t>(t - 1)] -= v;
            // After the last cell of row a, flow a can no longer grow.
            bool ok = !(b == n && remaining[static_cast<size_t>(a - 1)] != 0);
            if (ok) rec(k + 1);
            for (int t = a; t < b; ++t) remaining[static_cast<size_t>(t - 1)] += v;
        }
        cur.set(a, b, 0);
    };
    rec(0);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

int flow_or_zero(const UTMatrix& M, int k) { return (k >= 1 && k < M.n()) ? M.flow(k) : 0; }

// Divided-basis coefficient c·M!/N! with an integrality check.
IntPoly rescale(IntPoly c, const UTMatrix& M, const mpz_class& nfact) {
    c *= M.factorial_product();
    try {
        return exact_div(c, IntPoly(nfact));
    } catch (const NotDivisible&) {
        throw NonIntegralResult("divided-power rescaling at " + M.str());
    }
}

}  // namespace

HypElement e_action(int l, const HypElement& X) {
    if (l < 1 || l >= X.n) throw BadIndices("E_l with l = " + std::to_string(l));
    auto& eng = symbolic_engine(X.n);
    HypElement out(X.n);
    for (auto& [N, h] : X.terms) {
        mpz_class nf = N.factorial_product();
        const auto& img = eng.actE(l, l + 1, N);
        for (auto& [M, g] : img) out.add(M, rescale(g, M, nf) * h);
    }
    return out;
}

HypElement commutator_closed_form(int l, const UTMatrix& N) {
    const int n = N.n();
    HypElement out(n);
    auto put = [&](UTMatrix M, const IntPoly& c) {
        if (M.nonnegative()) out.add(M, c);
    };
    for (int s = 1; s < l; ++s) {
        UTMatrix M = N - UTMatrix::unit(n, s, l + 1) + UTMatrix::unit(n, s, l);
        put(M, IntPoly(N.at(s, l) + 1));
    }
    {
        int c = 1;
        for (int b = l + 1; b <= n; ++b) c -= N.at(l, b);
        for (int b = l + 2; b <= n; ++b) c += N.at(l + 1, b);
        put(N - UTMatrix::unit(n, l, l + 1), IntPoly::H(l) - IntPoly::H(l + 1) + IntPoly(c));
    }
    for (int t = l + 2; t <= n; ++t) {
        UTMatrix M = N - UTMatrix::unit(n, l, t) + UTMatrix::unit(n, l + 1, t);
        put(M, IntPoly(-(N.at(l + 1, t) + 1)));
    }
    return out;
}

HypElement e_action_closed_form(int l, const HypElement& X) {
    const int n = X.n;
    HypElement out(n);
    for (auto& [N, h] : X.terms) {
        for (int s = 1; s < l; ++s) {
            UTMatrix M = N - UTMatrix::unit(n, s, l + 1) + UTMatrix::unit(n, s, l);
            if (M.nonnegative()) out.add(M, h * IntPoly(M.at(s, l)));
        }
        UTMatrix M = N - UTMatrix::unit(n, l, l + 1);
        if (M.nonnegative()) {
            IntPoly c = IntPoly::H(l) - IntPoly::H(l + 1) +
                        IntPoly(-M.col_sum(l) + M.col_sum(l + 1) + flow_or_zero(M, l - 1) -
                                2 * flow_or_zero(M, l) + flow_or_zero(M, l + 1));
            out.add(M, c * h);
        }
        for (int t = l + 2; t <= n; ++t) {
            UTMatrix M2 = N - UTMatrix::unit(n, l, t) + UTMatrix::unit(n, l + 1, t);
            if (M2.nonnegative()) out.add(M2, h * IntPoly(-M2.at(l + 1, t)));
        }
    }
    return out;
}

HypElement f_times(int a, int b, const UTMatrix& N) {
    auto& eng = symbolic_engine(N.n());
    mpz_class nf = N.factorial_product();
    HypElement out(N.n());
    for (auto& [M, g] : eng.mulF(a, b, N)) out.add(M, rescale(g, M, nf));
    return out;
}

IntPoly raise_divided(const std::vector<int>& a, const HypElement& X) {
    if (static_cast<int>(a.size()) != X.n - 1) throw BadIndices("raise_divided needs n-1 exponents");
    HypElement Y = X;
    mpz_class denom = 1;
    for (int l = X.n - 1; l >= 1; --l) {
        int times = a[static_cast<size_t>(l - 1)];
        if (times < 0) return {};
        for (int r = 0; r < times && !Y.is_zero(); ++r) Y = e_action(l, Y);
        denom *= factorial(times);
    }
    IntPoly c = Y.coefficient(UTMatrix(X.n));
    try {
        return exact_div(c, IntPoly(denom));
    } catch (const NotDivisible&) {
        throw NonIntegralResult("raised coefficient not divisible by " + denom.get_str());
    }
}

HypElement sigma_elem(const Vars& v, int l, int m, const HypElement& X) {
    HypElement out(X.n);
    for (auto& [N, h] : X.terms) out.add(N, sigma(v, l, m, h));
    return out;
}

HypElement divide_elem(const HypElement& X, const IntPoly& g) {
    HypElement out(X.n);
    for (auto& [N, h] : X.terms) out.add(N, exact_div(h, g));
    return out;
}

FpHypVector specialize_elem(const HypElement& X, const Weight& lambda,
                            const std::map<int, long long>& uvals, long long p) {
    FpHypVector out;
    out.p = p;
    for (auto& [N, h] : X.terms) {
        long long c = specialize(h, lambda, uvals, p);
        if (c) out.coeffs[N] = c;
    }
    return out;
}

HypElement subst_u_elem(const HypElement& X, const std::map<int, long long>& uvals) {
    HypElement out(X.n);
    for (auto& [N, h] : X.terms) out.add(N, subst_u_int(h, uvals));
    return out;
}

mpz_class straighten_pairing(const UTMatrix& N, const UTMatrix& M, const Weight& lambda) {
    if (N.flows() != M.flows()) return 0;
    mpz_class raw = numeric_engine(lambda).pairing(N, M);
    mpz_class den = N.factorial_product() * M.factorial_product();
    if (!mpz_divisible_p(raw.get_mpz_t(), den.get_mpz_t()))
        throw NonIntegralResult("pairing " + N.str() + " " + M.str());
    mpz_class q;
    mpz_divexact(q.get_mpz_t(), raw.get_mpz_t(), den.get_mpz_t());
    return q;
}

VermaEngine<IntPoly>& symbolic_engine(int n) {
    thread_local std::map<int, VermaEngine<IntPoly>> engines;
    auto it = engines.find(n);
    if (it == engines.end())
        it = engines.emplace(n, VermaEngine<IntPoly>(n, [](int s) { return IntPoly::H(s); })).first;
    return it->second;
}

VermaEngine<mpz_class>& numeric_engine(const Weight& lambda) {
    thread_local std::map<Weight, VermaEngine<mpz_class>> engines;
    auto it = engines.find(lambda);
    if (it == engines.end()) {
        Weight lam = lambda;
        it = engines
                 .emplace(lambda, VermaEngine<mpz_class>(static_cast<int>(lambda.size()), [lam](int s) {
                              return mpz_class(static_cast<long>(lam[static_cast<size_t>(s - 1)]));
                          }))
                 .first;
    }
    return it->second;
}

}  // namespace branchcrit
