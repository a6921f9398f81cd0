#include "branchcrit/planegeo.hpp"

#include <algorithm>
#include <functional>

#include "branchcrit/errors.hpp"

namespace branchcrit {

std::string Point::str() const { return "(" + std::to_string(col) + "," + std::to_string(ht) + ")"; }

std::string to_string(const PointSet& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& p : s) {
        if (!first) out += ",";
        out += p.str();
        first = false;
    }
    return out + "}";
}

PointSet shifted(const PointSet& s, Point by) {
    PointSet out;
    for (const auto& p : s) out.insert(p + by);
    return out;
}

bool is_antichain(const PointSet& s) {
    for (const auto& x : s)
        for (const auto& y : s)
            if (strictly_below(x, y)) return false;
    return true;
}

PointSet cone_members(const PointSet& G, const PointSet& U) {
    PointSet out;
    for (const auto& u : U)
        if (std::any_of(G.begin(), G.end(), [&](const Point& g) { return weakly_below(u, g); }))
            out.insert(u);
    return out;
}

PointSet snake_members(const PointSet& G, const PointSet& U) {
    PointSet inner = cone_members(shifted(G, {-1, -1}), U);
    PointSet out;
    for (const auto& u : cone_members(G, U))
        if (!inner.count(u)) out.insert(u);
    return out;
}

namespace {

// Kuhn's augmenting paths; edge a -> b present when accept(a, b).
std::optional<Injection> match_all(const PointSet& A, const PointSet& B,
                                   const std::function<bool(const Point&, const Point&)>& accept) {
    std::vector<Point> as(A.begin(), A.end());
    std::vector<Point> bs(B.begin(), B.end());
    if (as.size() > bs.size()) return std::nullopt;
    std::vector<std::vector<size_t>> adj(as.size());
    for (size_t x = 0; x < as.size(); ++x)
        for (size_t y = 0; y < bs.size(); ++y)
            if (accept(as[x], bs[y])) adj[x].push_back(y);

    constexpr size_t none = static_cast<size_t>(-1);
    std::vector<size_t> owner(bs.size(), none);
    std::vector<char> seen;
    std::function<bool(size_t)> augment = [&](size_t x) {
        for (size_t y : adj[x]) {
            if (seen[y]) continue;
            seen[y] = 1;
            if (owner[y] == none || augment(owner[y])) {
                owner[y] = x;
                return true;
            }
        }
        return false;
    };
    for (size_t x = 0; x < as.size(); ++x) {
        seen.assign(bs.size(), 0);
        if (!augment(x)) return std::nullopt;
    }
    Injection out;
    for (size_t y = 0; y < bs.size(); ++y)
        if (owner[y] != none) out[as[owner[y]]] = bs[y];
    return out;
}

}  // namespace

std::optional<Injection> exists_weak_dec_inj(const PointSet& A, const PointSet& B) {
    return match_all(A, B, [](const Point& a, const Point& b) { return weakly_below(b, a); });
}

std::optional<Injection> exists_strict_dec_inj(const PointSet& A, const PointSet& B) {
    // Weak injection into B + (1,1), mapped back to B.
    auto w = exists_weak_dec_inj(A, shifted(B, {1, 1}));
    if (!w) return std::nullopt;
    Injection out;
    for (auto& [a, b] : *w) out[a] = b - Point{1, 1};
    return out;
}

std::vector<PointSet> enumerate_antichains(const PointSet& Y) {
    std::vector<Point> ys(Y.begin(), Y.end());
    std::vector<PointSet> out;
    PointSet cur;
    std::function<void(size_t)> rec = [&](size_t k) {
        if (k == ys.size()) {
            out.push_back(cur);
            return;
        }
        rec(k + 1);
        const Point& y = ys[k];
        bool ok = std::none_of(cur.begin(), cur.end(), [&](const Point& x) {
            return strictly_below(x, y) || strictly_below(y, x);
        });
        if (ok) {
            cur.insert(y);
            rec(k + 1);
            cur.erase(y);
        }
    };
    rec(0);
    std::stable_sort(out.begin(), out.end(),
                     [](const PointSet& x, const PointSet& y) { return x.size() < y.size(); });
    return out;
}

RectangleReport rectangle_transfer(const PointSet& X, int a, int b, int c, int dd) {
    for (const auto& x : X)
        if (x.col < a || x.col > b || x.ht < c || x.ht > dd)
            throw BadRectangle("point " + x.str() + " outside the rectangle");
    PointSet Y, bottom;
    for (const auto& x : X) (x.ht > c ? Y : bottom).insert(x);
    RectangleReport r;
    r.injection_side = exists_strict_dec_inj(Y, X).has_value();
    r.antichain_side = true;
    for (const auto& delta : enumerate_antichains(Y))
        if (!exists_strict_dec_inj(delta, bottom)) {
            r.antichain_side = false;
            break;
        }
    return r;
}

bool Stripe::well_formed() const {
    if (a > b || f.size() != static_cast<size_t>(b - a + 1) || l.size() != f.size()) return false;
    for (int s = a; s <= b; ++s)
        if (first(s) > last(s)) return false;
    for (int s = a; s < b; ++s)
        if (!(first(s + 1) <= first(s) && first(s) <= last(s + 1) && last(s + 1) <= last(s)))
            return false;
    for (int s = a; s + 2 <= b; ++s)
        if (first(s) < last(s + 2)) return false;
    return true;
}

bool Stripe::contains(const Point& x) const {
    return x.col >= a && x.col <= b && x.ht >= first(x.col) && x.ht <= last(x.col);
}

PointSet Stripe::points() const {
    PointSet out;
    for (int s = a; s <= b; ++s)
        for (int h = first(s); h <= last(s); ++h) out.insert({s, h});
    return out;
}

Injection phi_S(const PointSet& M, const PointSet& X, const Injection& phi, const Stripe& S) {
    PointSet in_s;
    for (const auto& x : X)
        if (S.contains(x)) in_s.insert(x);
    if (!is_antichain(in_s)) throw ComparablePairInStripe(to_string(in_s));
    Injection out;
    for (const auto& x : M) {
        if (x.col >= S.a && x.col <= S.b && S.below(x)) {
            out[x] = x;
        } else {
            auto it = phi.find(x);
            if (it == phi.end()) throw AbsentEntry("phi undefined at " + x.str());
            out[x] = it->second;
        }
    }
    return out;
}

PointSet sigma_diagram(int k, int j, int d, const Multiset& I) {
    PointSet out;
    for (int t = k + 1; t <= j; ++t)
        for (int h = 0; h <= d - I.count_le(t - 1); ++h) out.insert({t, h});
    return out;
}

PointSet omega_diagram(int k, int j, int d, const Multiset& I) {
    PointSet out;
    for (int t = k + 1; t < j; ++t)
        for (int h = 0; h < d - I.count_le(t); ++h) out.insert({t, h});
    return out;
}

PointSet interior(const PointSet& A) {
    PointSet out;
    for (const auto& a : A)
        if (std::any_of(A.begin(), A.end(), [&](const Point& b) { return strictly_below(a, b); }))
            out.insert(a);
    return out;
}

PointSet boundary(const PointSet& A) {
    PointSet in = interior(A);
    PointSet out;
    for (const auto& a : A)
        if (!in.count(a)) out.insert(a);
    return out;
}

Multiset antichain_cover(const PointSet& G, int d, int i, int n) {
    if (!is_antichain(G)) throw NotAntichain(to_string(G));
    std::map<int, int> top;  // column -> max height, columns other than n
    int h_last = 0;
    for (const auto& g : G) {
        if (g.col <= i || g.col > n || g.ht < 0 || g.ht > d)
            throw NotAntichain("point " + g.str() + " outside (i..n]x[0..d]");
        if (g.col == n)
            h_last = std::max(h_last, g.ht);
        else
            top[g.col] = std::max(top.count(g.col) ? top[g.col] : 0, g.ht);
    }
    std::vector<int> cols, hs;
    for (auto& [t, h] : top) {
        cols.push_back(t);
        hs.push_back(h);
    }
    hs.push_back(h_last);
    std::vector<int> entries;
    auto put = [&](int x, int k) { entries.insert(entries.end(), static_cast<size_t>(k), x); };
    put(i, d - hs[0]);
    for (size_t k = 0; k < cols.size(); ++k) put(cols[k], hs[k] - hs[k + 1]);
    return Multiset(std::move(entries));
}

}  // namespace branchcrit
