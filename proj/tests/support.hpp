#pragma once

// Shared generators and brute-force oracles for the test suites. Nothing here
// calls the routine it is used to check.

#include <gmpxx.h>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "branchcrit/hyperalg.hpp"
#include "branchcrit/lowering.hpp"
#include "branchcrit/msets.hpp"
#include "branchcrit/planegeo.hpp"

namespace bct {

using namespace branchcrit;

inline std::mt19937_64& rng() {
    thread_local std::mt19937_64 g(20240611);
    return g;
}

inline int rint(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

inline Multiset random_multiset(int lo, int hi, int max_size) {
    std::vector<int> e;
    if (lo > hi) return Multiset(e);
    int s = rint(0, max_size);
    for (int k = 0; k < s; ++k) e.push_back(rint(lo, hi));
    return Multiset(e);
}

inline PointSet random_points(int lo, int hi, int max_size) {
    PointSet s;
    int k = rint(0, max_size);
    for (int q = 0; q < k; ++q) s.insert(Point{rint(lo, hi), rint(lo, hi)});
    return s;
}

// All multisets with entries in [lo..hi] and at most max_size entries.
inline std::vector<Multiset> all_multisets(int lo, int hi, int max_size) {
    std::vector<Multiset> out;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        out.push_back(Multiset(cur));
        if (static_cast<int>(cur.size()) == max_size) return;
        for (int x = start; x <= hi; ++x) {
            cur.push_back(x);
            rec(x);
            cur.pop_back();
        }
    };
    rec(lo);
    return out;
}

inline std::vector<std::set<int>> all_subsets(int lo, int hi) {
    std::vector<std::set<int>> out;
    int span = std::max(0, hi - lo + 1);
    for (int mask = 0; mask < (1 << span); ++mask) {
        std::set<int> s;
        for (int b = 0; b < span; ++b)
            if (mask >> b & 1) s.insert(lo + b);
        out.push_back(s);
    }
    return out;
}

// Exhaustive search over all injections A -> B with rel(image, source).
inline bool brute_injection(const PointSet& A, const PointSet& B,
                            const std::function<bool(const Point&, const Point&)>& rel) {
    std::vector<Point> a(A.begin(), A.end());
    std::vector<Point> b(B.begin(), B.end());
    std::vector<bool> used(b.size(), false);
    std::function<bool(std::size_t)> rec = [&](std::size_t k) {
        if (k == a.size()) return true;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j] || !rel(b[j], a[k])) continue;
            used[j] = true;
            if (rec(k + 1)) return true;
            used[j] = false;
        }
        return false;
    };
    return rec(0);
}

// |cone(S) ∩ A| <= |cone(S) ∩ B| for every S ⊆ A.
inline bool cone_condition(const PointSet& A, const PointSet& B) {
    std::vector<Point> a(A.begin(), A.end());
    auto in_cone = [](const std::vector<Point>& S, const Point& x) {
        for (auto& s : S)
            if (x.col <= s.col && x.ht <= s.ht) return true;
        return false;
    };
    for (std::size_t mask = 0; mask < (std::size_t{1} << a.size()); ++mask) {
        std::vector<Point> S;
        for (std::size_t q = 0; q < a.size(); ++q)
            if (mask >> q & 1) S.push_back(a[q]);
        std::size_t ca = 0;
        std::size_t cb = 0;
        for (auto& x : A) ca += in_cone(S, x);
        for (auto& x : B) cb += in_cone(S, x);
        if (ca > cb) return false;
    }
    return true;
}

// All strictly upper triangular N >= 0 with the given flows, by filtering a box.
inline std::vector<UTMatrix> brute_matrices(int n, const std::vector<int>& flows) {
    int cap = flows.empty() ? 0 : *std::max_element(flows.begin(), flows.end());
    std::vector<std::pair<int, int>> cells;
    for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b) cells.push_back({a, b});
    std::vector<UTMatrix> out;
    UTMatrix N(n);
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == cells.size()) {
            for (int t = 1; t < n; ++t) {
                int f = 0;
                for (auto [a, b] : cells)
                    if (a <= t && t < b) f += N.at(a, b);
                if (f != flows[static_cast<std::size_t>(t - 1)]) return;
            }
            out.push_back(N);
            return;
        }
        for (int v = 0; v <= cap; ++v) {
            N.set(cells[k].first, cells[k].second, v);
            rec(k + 1);
        }
        N.set(cells[k].first, cells[k].second, 0);
    };
    rec(0);
    std::sort(out.begin(), out.end());
    return out;
}

// Random spec satisfying the block conditions, by rejection.
inline ElemSpec random_spec(int max_n, int max_d, bool want_blocks) {
    for (;;) {
        int n = rint(2, max_n);
        int i = rint(1, n - 1);
        int d = rint(0, max_d);
        ElemSpec s{i, n, d, {}, {}, {}};
        for (int m = i + 1; m < n; ++m)
            if (rint(0, 1)) s.Mcal.push_back(m);
        if (want_blocks && s.Mcal.empty()) continue;
        for (int q = 1; q <= s.k() + 1; ++q) {
            int lo = q == 1 ? i : s.m(q - 1) - 1;
            s.I.push_back(random_multiset(lo, s.m(q) - 1, d));
        }
        for (int q = 1; q <= s.k(); ++q) s.J.push_back(random_multiset(s.m(q) - 1, s.m(q + 1) - 1, d));
        if (s.well_formed()) return s;
    }
}

// Exact integer value of a constant-coefficient element's N-entry.
inline mpz_class const_coeff(const HypElement& X, const UTMatrix& N) {
    IntPoly c = X.coefficient(N);
    return c.is_zero() ? mpz_class(0) : c.constant_value();
}

}  // namespace bct
