#pragma once

#include <gmpxx.h>

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "branchcrit/criterion.hpp"

namespace branchcrit {

// Variables H_1..H_kMaxN and u_1..u_kMaxN. Ids: H_s -> s-1, u_t -> kMaxN+t-1.
constexpr int kMaxN = 8;
constexpr int kNumVars = 2 * kMaxN;

inline int h_id(int s) { return s - 1; }
inline int u_id(int t) { return kMaxN + t - 1; }

struct Monomial {
    std::array<std::uint8_t, kNumVars> e{};

    // Lexicographic with H_1 > H_2 > ... > u_1 > u_2 > ...
    auto operator<=>(const Monomial&) const = default;
    Monomial operator*(const Monomial& o) const;
    bool divides(const Monomial& o) const;
    Monomial operator/(const Monomial& o) const;  // requires divides
    int degree() const;
    bool is_one() const;
};

struct Term {
    Monomial m;
    mpz_class c;
};

// Sparse polynomial in 𝒰⁰ with arbitrary-precision integer coefficients.
class IntPoly {
public:
    IntPoly() = default;
    IntPoly(long long c);  // NOLINT(google-explicit-constructor)
    IntPoly(const mpz_class& c);  // NOLINT(google-explicit-constructor)

    static IntPoly var(int id);
    static IntPoly H(int s) { return var(h_id(s)); }
    static IntPoly u(int t) { return var(u_id(t)); }
    static IntPoly from_terms(std::vector<Term> terms);  // any order, duplicates merged

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].m.is_one()); }
    mpz_class constant_value() const;  // requires is_constant
    std::size_t size() const { return terms_.size(); }
    const std::vector<Term>& terms() const { return terms_; }  // ascending monomials
    const Term& leading() const { return terms_.back(); }
    bool uses_var(int id) const;
    int total_degree() const;

    IntPoly operator-() const;
    IntPoly& operator+=(const IntPoly& o);
    IntPoly& operator-=(const IntPoly& o);
    IntPoly& operator*=(const IntPoly& o);
    IntPoly& operator*=(const mpz_class& c);
    friend IntPoly operator+(IntPoly a, const IntPoly& b) { return a += b; }
    friend IntPoly operator-(IntPoly a, const IntPoly& b) { return a -= b; }
    friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
    friend bool operator==(const IntPoly& a, const IntPoly& b);

    std::string str() const;

private:
    std::vector<Term> terms_;
};

IntPoly pow(const IntPoly& f, int k);

// Index context: ring variables are H_1..H_n and u_{i+1}..u_{n-1}; u_i = 0.
struct Vars {
    int n = 2;
    int i = 1;

    IntPoly H(int s) const;
    IntPoly u(int t) const;  // zero for t == i
    IntPoly C(int k, int l) const { return cdiff(k, l); }
    static IntPoly cdiff(int k, int l);
};

// C(k, l) = l - k + H_k - H_l
inline IntPoly cdiff(int k, int l) { return Vars::cdiff(k, l); }

// f (f-1) ... (f-k+1); throws NegativeExponent for k < 0.
IntPoly falling(const IntPoly& f, int k);
mpz_class factorial(int k);
mpz_class binomial(long long a, long long b);  // 0 outside 0 <= b <= a

// σ_{l,m}: H_t -> H_t + C(l,m) - u_m + u_l for t >= m, identity otherwise.
IntPoly sigma(const Vars& v, int l, int m, const IntPoly& f);

// q with f = q g; throws NotDivisible.
IntPoly exact_div(const IntPoly& f, const IntPoly& g);

// Replace the assigned u_t by polynomials.
IntPoly subst_u(const IntPoly& f, const std::map<int, IntPoly>& assignments);
// Replace the assigned u_t by integers.
IntPoly subst_u_int(const IntPoly& f, const std::map<int, long long>& values);
// H_s -> λ_s, u_t -> uvals[t], reduced mod p; throws UnassignedVariable.
long long specialize(const IntPoly& f, const Weight& lambda, const std::map<int, long long>& uvals,
                     long long p);
// H_s -> λ_s over the integers; u's must be absent.
mpz_class evaluate(const IntPoly& f, const Weight& lambda);

// Lazy fraction num/den; equality by cross-multiplication.
struct FracPoly {
    IntPoly num{0};
    IntPoly den{1};

    FracPoly() = default;
    FracPoly(IntPoly n) : num(std::move(n)) {}  // NOLINT(google-explicit-constructor)
    FracPoly(IntPoly n, IntPoly d);

    FracPoly operator+(const FracPoly& o) const;
    FracPoly operator-(const FracPoly& o) const;
    FracPoly operator*(const FracPoly& o) const;
    FracPoly operator/(const FracPoly& o) const;
    FracPoly operator-() const { return {-num, den}; }
    bool operator==(const FracPoly& o) const { return num * o.den == o.num * den; }
    bool is_zero() const { return num.is_zero(); }
    // Exact polynomial value; throws NotDivisible.
    IntPoly to_poly() const { return exact_div(num, den); }
    std::string str() const;
};

}  // namespace branchcrit
