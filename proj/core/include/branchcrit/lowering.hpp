#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "branchcrit/hyperalg.hpp"
#include "branchcrit/msets.hpp"
#include "branchcrit/planegeo.hpp"

namespace branchcrit {

// Arguments of an elementary expression: blocks i = m_0 < m_1 < ... < m_{k+1} = n,
// multisets I_1..I_{k+1} and J_1..J_k (J_0 = ⟨(i-1)^d⟩ implicit).
struct ElemSpec {
    int i = 1;
    int n = 2;
    int d = 1;
    std::vector<int> Mcal;      // m_1 < ... < m_k
    std::vector<Multiset> I;    // I_1..I_{k+1}, stored at [0..k]
    std::vector<Multiset> J;    // J_1..J_k, stored at [0..k-1]

    int k() const { return static_cast<int>(Mcal.size()); }
    int m(int s) const;                 // m_s for s = 0..k+1
    Multiset Jb(int s) const;           // J_s for s = 0..k
    const Multiset& Ib(int s) const;    // I_s for s = 1..k+1
    bool well_formed() const;           // conditions on ranges and balance
    void validate() const;              // throws InvalidSpec
    std::string str() const;
    auto operator<=>(const ElemSpec&) const = default;
};

// α_t-coefficients c_t (t = 1..n-1, stored at [t-1]) of the ElemSpec weight.
std::vector<int> weight_of_spec(const ElemSpec& spec);
// Flows a_t = -c_t of the matrices carrying the ElemSpec weight.
std::vector<int> spec_flows(const ElemSpec& spec);

HypElement elementary_expression(const ElemSpec& spec);

// Which multiplication rule governs E_l on an elementary expression.
enum class RuleCase { Zero, Inner, Boundary, Last };
RuleCase rule_case(int l, const ElemSpec& spec);
std::string rule_case_name(RuleCase c);

HypElement e_times_S(int l, const ElemSpec& spec);
HypElement rule_rhs(int l, const ElemSpec& spec);

// Closed-form P with E_1^(a_1)···E_{n-1}^(a_{n-1})·S ≡ P mod I⁺.
IntPoly P_coefficient(const ElemSpec& spec);

// ---------------------------------------------------------------------------
// Formal operators 𝒮^{(d)}_{m,m'}(I,J) and polynomials in them.

struct FormalOp {
    int m = 0;
    int mp = 0;
    Multiset I;
    Multiset J;
    auto operator<=>(const FormalOp&) const = default;
    std::string str() const;
};

// Product of C(m,m')-u_{m'}+u_m with multiplicities.
using Denominator = std::map<std::pair<int, int>, int>;

struct FormalKey {
    std::vector<FormalOp> ops;  // sorted
    Denominator den;
    auto operator<=>(const FormalKey&) const = default;
};

// Context (i, n, d) shared by all operators of a polynomial.
struct FormalCtx {
    int i = 1;
    int n = 2;
    int d = 1;
    Vars vars() const { return Vars{n, i}; }
    Multiset J0() const { return Multiset::repeat(i - 1, d); }
};

class FormalPoly {
public:
    FormalPoly() = default;
    explicit FormalPoly(FormalCtx ctx) : ctx_(ctx) {}
    static FormalPoly op(FormalCtx ctx, FormalOp o);
    static FormalPoly scalar(FormalCtx ctx, const IntPoly& c);

    const FormalCtx& ctx() const { return ctx_; }
    const std::map<FormalKey, IntPoly>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(const FormalKey& key, const IntPoly& num);
    FormalPoly& operator+=(const FormalPoly& o);
    FormalPoly& operator-=(const FormalPoly& o);
    FormalPoly operator+(const FormalPoly& o) const;
    FormalPoly operator-(const FormalPoly& o) const;
    FormalPoly operator*(const FormalPoly& o) const;
    FormalPoly scaled(const IntPoly& f) const;
    // Division by C(m,m')-u_{m'}+u_m.
    FormalPoly divided(int m, int mp) const;
    // Every denominator factor occurs at most once.
    bool squarefree_denominators() const;

    // Equality in the fraction field over free operator variables.
    bool equals(const FormalPoly& o) const;
    std::string str() const;

private:
    FormalCtx ctx_;
    std::map<FormalKey, IntPoly> terms_;
};

IntPoly denominator_poly(const Vars& v, const Denominator& den);

// 𝒯^{(d)}_{k,j,ℳ}(I,J) by the recursive definition (minimum of ℳ first).
FormalPoly build_T_formal(FormalCtx ctx, int k, int j, const std::set<int>& Mcal, const Multiset& I,
                          const Multiset& J);

enum class RhoTag { One, TwoL, TwoR, Two, Three, All };
FormalPoly rho(RhoTag tag, int l, const FormalPoly& P);

// ev of a full polynomial; throws NotFull or DenominatorSurvived.
HypElement ev_formal(const FormalPoly& P);
// Full monomial operators -> elementary expression arguments.
ElemSpec spec_of_ops(FormalCtx ctx, const std::vector<FormalOp>& ops);

// ev(𝒯^{(d)}_{i,n,ℳ}(I,J_0)) by the σ-recursion.
HypElement T_eval(int i, int n, int d, const std::set<int>& Mcal, const Multiset& I);

// T_eval with u_t ↦ h for (t,h) ∈ M; at most one point per column.
HypElement scriptT(int i, int n, int d, const PointSet& M, const Multiset& I);

// κ = (q_{i+1}, ..., q_n) stored at [0..n-i-1].
using Kappa = std::vector<int>;
IntPoly cf_kappa_op(FormalCtx ctx, const FormalOp& o, const Kappa& kappa);
IntPoly cf_kappa(const FormalPoly& P, const Kappa& kappa);
IntPoly cf_total(const FormalPoly& P);
IntPoly cf_d(FormalCtx ctx, int k, int j, const Kappa& kappa, const Multiset& I, const Multiset& J);
// Δ^κ_{k,j}(J)
PointSet delta_kappa(int k, int j, const Kappa& kappa, int i, const Multiset& J);
// κ over the finite box |J|^{t-2} - |I|^{t-1} <= q_t <= |J|^{t-2} (clipped to 0 and to the
// remaining depth); cf_κ vanishes outside it.
std::vector<Kappa> kappa_support(FormalCtx ctx, int k, int j, const Multiset& I, const Multiset& J);

// ---------------------------------------------------------------------------
// Right-hand sides of the raising rules on a single 𝒯 factor.

struct TArgs {
    int k = 1;
    int j = 2;
    std::set<int> Mcal;
    Multiset I;
    Multiset J;
    std::string str() const;
};

// Which case branch of the three raising lemmas a given l exercises.
std::string rho_branch(const TArgs& a, int l);

FormalPoly rho1_rule(FormalCtx ctx, const TArgs& a, int l);
FormalPoly rho2_rule(FormalCtx ctx, const TArgs& a, int l);   // k <= l < j-1
FormalPoly rho2L_rule(FormalCtx ctx, const TArgs& a, int l);  // l = k-1 or l = j-1
FormalPoly rho2R_rule(FormalCtx ctx, const TArgs& a, int l);  // l = k-1 or l = j-1
FormalPoly rho3_rule(FormalCtx ctx, const TArgs& a, int l, int origin);

}  // namespace branchcrit
