#pragma once

#include <functional>
#include <map>
#include <tuple>
#include <utility>

#include "branchcrit/hyperalg.hpp"

namespace branchcrit {

inline bool coeff_is_zero(const mpz_class& c) { return c == 0; }
inline bool coeff_is_zero(const IntPoly& c) { return c.is_zero(); }

// Action of gl_n on the Verma module with basis f^M v⁺ = Π f_{a,b}^{M_{a,b}} v⁺
// (ordinary powers, F-order by column then row). Coefficients live in Coeff;
// hval(s) is the value of H_s on v⁺. Results are memoized per basis vector.
template <class Coeff>
class VermaEngine {
public:
    using Vec = std::map<UTMatrix, Coeff>;

    VermaEngine(int n, std::function<Coeff(int)> hval) : n_(n), hval_(std::move(hval)) {}

    int n() const { return n_; }

    // f_{a,b}·f^M with a < b.
    const Vec& mulF(int a, int b, const UTMatrix& M) {
        auto key = std::make_tuple(a, b, M);
        if (auto it = mulF_.find(key); it != mulF_.end()) return it->second;
        Vec out;
        auto [c, d] = first_factor(M);
        if (c == 0 || order(a, b) <= order(c, d)) {
            UTMatrix R = M;
            R.add(a, b, 1);
            out.emplace(R, Coeff(1));
        } else {
            UTMatrix R = M;
            R.add(c, d, -1);
            // f_x f_y R = f_y (f_x R) + [f_x, f_y] R
            Vec inner = mulF(a, b, R);
            for (auto& [M2, k2] : inner) accumulate(out, mulF(c, d, M2), k2);
            if (a == d) accumulate(out, mulF(c, b, R), Coeff(1));
            if (c == b) accumulate(out, mulF(a, d, R), Coeff(-1));
        }
        return mulF_.emplace(key, std::move(out)).first->second;
    }

    // e_{a,b}·f^M v⁺ with a < b.
    const Vec& actE(int a, int b, const UTMatrix& M) {
        auto key = std::make_tuple(a, b, M);
        if (auto it = actE_.find(key); it != actE_.end()) return it->second;
        Vec out;
        auto [c, d] = first_factor(M);
        if (c != 0) {
            UTMatrix R = M;
            R.add(c, d, -1);
            // X_{a,b} X_{d,c} R = X_{d,c} (X_{a,b} R) + (δ_{b,d} X_{a,c} - δ_{c,a} X_{d,b}) R
            Vec inner = actE(a, b, R);
            for (auto& [M2, k2] : inner) accumulate(out, mulF(c, d, M2), k2);
            if (b == d) accumulate(out, act_basis(a, c, R), Coeff(1));
            if (c == a) accumulate(out, act_basis(d, b, R), Coeff(-1));
        }
        return actE_.emplace(key, std::move(out)).first->second;
    }

    // X_{r,s}·f^M v⁺ for any generator.
    Vec act_basis(int r, int s, const UTMatrix& M) {
        if (r > s) return mulF(s, r, M);
        if (r < s) return actE(r, s, M);
        Coeff h = hval_(r);
        h += Coeff(M.col_sum(r) - M.row_sum(r));
        Vec out;
        if (!coeff_is_zero(h)) out.emplace(M, std::move(h));
        return out;
    }

    Vec act(int r, int s, const Vec& v) {
        Vec out;
        for (auto& [M, k] : v) accumulate(out, act_basis(r, s, M), k);
        return out;
    }

    // ⟨f^N v⁺, f^M v⁺⟩ = v⁺-coefficient of τ(f^N) f^M v⁺.
    Coeff pairing(const UTMatrix& N, const UTMatrix& M) {
        if (N.flows() != M.flows()) return Coeff(0);
        if (N.is_zero()) return Coeff(1);
        auto key = std::make_pair(N, M);
        if (auto it = pair_.find(key); it != pair_.end()) return it->second;
        auto [c, d] = first_factor(N);
        UTMatrix Nr = N;
        Nr.add(c, d, -1);
        Coeff total(0);
        Vec image = actE(c, d, M);
        for (auto& [M2, k2] : image) {
            Coeff term = pairing(Nr, M2);
            term *= k2;
            total += term;
        }
        return pair_.emplace(key, total).first->second;
    }

    static void accumulate(Vec& out, const Vec& v, const Coeff& scale) {
        for (auto& [M, k] : v) {
            Coeff term = k;
            term *= scale;
            auto [it, fresh] = out.try_emplace(M, Coeff(0));
            it->second += term;
            if (coeff_is_zero(it->second)) out.erase(it);
        }
    }

private:
    // Position of f_{a,b} in the PBW order: by column b, then row a.
    static std::pair<int, int> order(int a, int b) { return {b, a}; }

    std::pair<int, int> first_factor(const UTMatrix& M) const {
        for (int b = 2; b <= n_; ++b)
            for (int a = 1; a < b; ++a)
                if (M.at(a, b) > 0) return {a, b};
        return {0, 0};
    }

    int n_;
    std::function<Coeff(int)> hval_;
    std::map<std::tuple<int, int, UTMatrix>, Vec> mulF_;
    std::map<std::tuple<int, int, UTMatrix>, Vec> actE_;
    std::map<std::pair<UTMatrix, UTMatrix>, Coeff> pair_;
};

// Per-thread engines: symbolic H for each n, numeric λ for each weight.
VermaEngine<IntPoly>& symbolic_engine(int n);
VermaEngine<mpz_class>& numeric_engine(const Weight& lambda);

}  // namespace branchcrit
