#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "branchcrit/polyring.hpp"

namespace branchcrit {

// Strictly upper triangular n×n matrix of integers, stored row-major.
class UTMatrix {
public:
    UTMatrix() = default;
    explicit UTMatrix(int n);
    static UTMatrix unit(int n, int a, int b);  // e_{a,b}

    int n() const { return n_; }
    int at(int a, int b) const { return v_[idx(a, b)]; }
    void set(int a, int b, int value) { v_[idx(a, b)] = value; }
    void add(int a, int b, int delta) { v_[idx(a, b)] += delta; }

    bool is_zero() const;
    bool nonnegative() const;
    int col_sum(int t) const;  // N_t
    int row_sum(int s) const;  // N^s
    int flow(int k) const;     // N(k) = Σ_{a <= k < b} N_{a,b}
    std::vector<int> flows() const;  // (N(1), ..., N(n-1))
    mpz_class factorial_product() const;  // Π N_{a,b}!
    int total() const;

    UTMatrix operator+(const UTMatrix& o) const;
    UTMatrix operator-(const UTMatrix& o) const;
    auto operator<=>(const UTMatrix&) const = default;
    std::string str() const;  // "[[0,1],[0,0]]" style, upper entries only

private:
    std::size_t idx(int a, int b) const;
    int n_ = 0;
    std::vector<int> v_;
};

// Σ_N F^(N)·H_N with H_N in 𝒰⁰; zero coefficients pruned.
struct HypElement {
    int n = 2;
    std::map<UTMatrix, IntPoly> terms;

    HypElement() = default;
    explicit HypElement(int n_) : n(n_) {}
    static HypElement single(const UTMatrix& N, IntPoly coeff);

    void add(const UTMatrix& N, const IntPoly& coeff);
    HypElement& operator+=(const HypElement& o);
    HypElement& operator-=(const HypElement& o);
    HypElement operator+(const HypElement& o) const;
    HypElement operator-(const HypElement& o) const;
    HypElement scaled(const IntPoly& f) const;
    IntPoly coefficient(const UTMatrix& N) const;
    bool operator==(const HypElement& o) const { return n == o.n && terms == o.terms; }
    bool is_zero() const { return terms.empty(); }
    std::string str() const;
};

// Coefficients of a homogeneous element over 𝔽_p.
struct FpHypVector {
    long long p = 2;
    std::map<UTMatrix, long long> coeffs;
    bool is_zero() const { return coeffs.empty(); }
};

// Flow vector (a_1, ..., a_{n-1}) of the weight -Σ a_t α_t of F^(N).
std::vector<int> wt(const UTMatrix& N);

// All N >= 0 with N(t) = flows[t-1], row-major order.
std::vector<UTMatrix> enumerate_matrices(int n, const std::vector<int>& flows);

// E_l·X mod U·E_l.
HypElement e_action(int l, const HypElement& X);
// Closed-form [E_l, F^(N)] (commutator formula with three sums).
HypElement commutator_closed_form(int l, const UTMatrix& N);
// Closed-form E_l·X mod U·E_l read off coefficient-wise.
HypElement e_action_closed_form(int l, const HypElement& X);
// F_{a,b}·F^(N) in the divided PBW basis.
HypElement f_times(int a, int b, const UTMatrix& N);
// P with E_1^(a_1)···E_{n-1}^(a_{n-1})·X ≡ P mod I⁺.
IntPoly raise_divided(const std::vector<int>& a, const HypElement& X);

HypElement sigma_elem(const Vars& v, int l, int m, const HypElement& X);
HypElement divide_elem(const HypElement& X, const IntPoly& g);
FpHypVector specialize_elem(const HypElement& X, const Weight& lambda,
                            const std::map<int, long long>& uvals, long long p);
HypElement subst_u_elem(const HypElement& X, const std::map<int, long long>& uvals);

// ⟨F^(N)v⁺, F^(M)v⁺⟩ for the contravariant form with highest weight λ.
mpz_class straighten_pairing(const UTMatrix& N, const UTMatrix& M, const Weight& lambda);

}  // namespace branchcrit
