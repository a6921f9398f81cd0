#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "branchcrit/msets.hpp"

namespace branchcrit {

struct Point {
    int col = 0;
    int ht = 0;
    auto operator<=>(const Point&) const = default;
    Point operator+(const Point& o) const { return {col + o.col, ht + o.ht}; }
    Point operator-(const Point& o) const { return {col - o.col, ht - o.ht}; }
    std::string str() const;
};

using PointSet = std::set<Point>;
using Injection = std::map<Point, Point>;

// x ⋖̇ y
inline bool strictly_below(const Point& x, const Point& y) { return x.col < y.col && x.ht < y.ht; }
// x ⋖̇≤ y
inline bool weakly_below(const Point& x, const Point& y) { return x.col <= y.col && x.ht <= y.ht; }

std::string to_string(const PointSet& s);
PointSet shifted(const PointSet& s, Point by);
bool is_antichain(const PointSet& s);

// U ∩ cone(G)
PointSet cone_members(const PointSet& G, const PointSet& U);
// U ∩ snake(G), snake(G) = cone(G) \ cone(G - (1,1))
PointSet snake_members(const PointSet& G, const PointSet& U);

// Injection ψ: A -> B with ψ(x) ⋖̇≤ x, found by augmenting-path matching.
std::optional<Injection> exists_weak_dec_inj(const PointSet& A, const PointSet& B);
// Injection ψ: A -> B with ψ(x) ⋖̇ x.
std::optional<Injection> exists_strict_dec_inj(const PointSet& A, const PointSet& B);

// All ⋖̇-antichains contained in Y, the empty set first.
std::vector<PointSet> enumerate_antichains(const PointSet& Y);

struct RectangleReport {
    bool injection_side = false;  // strictly decreasing ψ: Y -> X exists
    bool antichain_side = false;  // every antichain of Y injects into the bottom row
};

// Both sides of the rectangle equivalence for X ⊆ [a..b]×[c..dd].
RectangleReport rectangle_transfer(const PointSet& X, int a, int b, int c, int dd);

// Stripe {a}×[f_a..l_a] ∪ ... ∪ {b}×[f_b..l_b].
struct Stripe {
    int a = 0;
    int b = -1;
    std::vector<int> f;  // f[s - a]
    std::vector<int> l;  // l[s - a]

    int first(int s) const { return f[static_cast<size_t>(s - a)]; }
    int last(int s) const { return l[static_cast<size_t>(s - a)]; }
    bool well_formed() const;
    bool contains(const Point& x) const;
    bool below(const Point& x) const { return x.ht < first(x.col); }
    bool above(const Point& x) const { return x.ht > last(x.col); }
    PointSet points() const;
};

// Injection M -> X \ S that is the identity on points below S and phi elsewhere.
Injection phi_S(const PointSet& M, const PointSet& X, const Injection& phi, const Stripe& S);

// Σ^{(d)}_{k,j}(I) and Ω^{(d)}_{k,j}(I) as explicit point sets.
PointSet sigma_diagram(int k, int j, int d, const Multiset& I);
PointSet omega_diagram(int k, int j, int d, const Multiset& I);
PointSet interior(const PointSet& A);
PointSet boundary(const PointSet& A);

// Multiset I with G contained in the boundary of Σ^{(d)}_{i,n}(I).
Multiset antichain_cover(const PointSet& G, int d, int i, int n);

}  // namespace branchcrit
