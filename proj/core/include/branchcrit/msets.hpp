#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace branchcrit {

// Finite multiset of integers kept as a weakly increasing sequence.
class Multiset {
public:
    Multiset() = default;
    Multiset(std::initializer_list<int> entries);
    explicit Multiset(std::vector<int> entries);

    // ⟨x^k⟩
    static Multiset repeat(int x, int k);

    const std::vector<int>& entries() const { return e_; }
    int size() const { return static_cast<int>(e_.size()); }
    bool empty() const { return e_.empty(); }
    bool contains(int x) const;

    // |I|^S for the interval S with the given bounds; nullopt means infinite.
    int count_in(std::optional<int> lo, std::optional<int> hi, bool lo_open = false,
                 bool hi_open = false) const;
    int count_eq(int t) const { return count_in(t, t); }      // |I|^{t}
    int count_le(int t) const { return count_in({}, t); }     // |I|^(-inf..t]
    int count_lt(int t) const { return count_le(t - 1); }     // |I|^(-inf..t)
    int count_ge(int t) const { return count_in(t, {}); }     // |I|^[t..+inf)

    // I_{x->y}; throws AbsentEntry when x does not occur.
    Multiset replace_one(int x, int y) const;
    // I ∪ ⟨x⟩
    Multiset with(int x) const;
    Multiset operator+(const Multiset& other) const;

    Multiset cut_L(int m) const;    // ℒ_m: clamp entries down to m-1
    Multiset cut_R(int m) const;    // ℛ_m: keep entries >= m-1
    Multiset cut_Lup(int m) const;  // ℒ^m: keep entries <= m-1
    Multiset cut_Rup(int m) const;  // ℛ^m: clamp entries up to m-1

    bool all_in(int lo, int hi_excl) const;

    std::string str() const;  // "⟨a,b,c⟩"
    std::string csv() const;  // "a,b,c"
    static Multiset parse(std::string_view text);

    auto operator<=>(const Multiset&) const = default;

private:
    std::vector<int> e_;
};

}  // namespace branchcrit
