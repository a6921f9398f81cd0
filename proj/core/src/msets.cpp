#include "branchcrit/msets.hpp"

#include <algorithm>
#include <charconv>

#include "branchcrit/errors.hpp"

namespace branchcrit {

Multiset::Multiset(std::initializer_list<int> entries) : e_(entries) {
    std::sort(e_.begin(), e_.end());
}

Multiset::Multiset(std::vector<int> entries) : e_(std::move(entries)) {
    std::sort(e_.begin(), e_.end());
}

Multiset Multiset::repeat(int x, int k) { return Multiset(std::vector<int>(std::max(k, 0), x)); }

bool Multiset::contains(int x) const { return std::binary_search(e_.begin(), e_.end(), x); }

int Multiset::count_in(std::optional<int> lo, std::optional<int> hi, bool lo_open,
                       bool hi_open) const {
    auto first = e_.begin();
    auto last = e_.end();
    if (lo) first = lo_open ? std::upper_bound(e_.begin(), e_.end(), *lo)
                            : std::lower_bound(e_.begin(), e_.end(), *lo);
    if (hi) last = hi_open ? std::lower_bound(e_.begin(), e_.end(), *hi)
                           : std::upper_bound(e_.begin(), e_.end(), *hi);
    return last > first ? static_cast<int>(last - first) : 0;
}

Multiset Multiset::replace_one(int x, int y) const {
    auto it = std::lower_bound(e_.begin(), e_.end(), x);
    if (it == e_.end() || *it != x)
        throw AbsentEntry("entry " + std::to_string(x) + " not in " + str());
    std::vector<int> out(e_);
    out[static_cast<size_t>(it - e_.begin())] = y;
    return Multiset(std::move(out));
}

Multiset Multiset::with(int x) const {
    std::vector<int> out(e_);
    out.insert(std::upper_bound(out.begin(), out.end(), x), x);
    Multiset r;
    r.e_ = std::move(out);
    return r;
}

Multiset Multiset::operator+(const Multiset& other) const {
    std::vector<int> out(e_);
    out.insert(out.end(), other.e_.begin(), other.e_.end());
    return Multiset(std::move(out));
}

Multiset Multiset::cut_L(int m) const {
    std::vector<int> out;
    out.reserve(e_.size());
    for (int x : e_) out.push_back(std::min(x, m - 1));
    return Multiset(std::move(out));
}

Multiset Multiset::cut_R(int m) const {
    std::vector<int> out;
    for (int x : e_)
        if (x >= m - 1) out.push_back(x);
    return Multiset(std::move(out));
}

Multiset Multiset::cut_Lup(int m) const {
    std::vector<int> out;
    for (int x : e_)
        if (x <= m - 1) out.push_back(x);
    return Multiset(std::move(out));
}

Multiset Multiset::cut_Rup(int m) const {
    std::vector<int> out;
    out.reserve(e_.size());
    for (int x : e_) out.push_back(std::max(x, m - 1));
    return Multiset(std::move(out));
}

bool Multiset::all_in(int lo, int hi_excl) const {
    return e_.empty() || (e_.front() >= lo && e_.back() < hi_excl);
}

std::string Multiset::csv() const {
    std::string s;
    for (size_t k = 0; k < e_.size(); ++k) {
        if (k) s += ',';
        s += std::to_string(e_[k]);
    }
    return s;
}

std::string Multiset::str() const { return "⟨" + csv() + "⟩"; }

Multiset Multiset::parse(std::string_view text) {
    std::vector<int> out;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t comma = text.find(',', pos);
        if (comma == std::string_view::npos) comma = text.size();
        std::string_view tok = text.substr(pos, comma - pos);
        while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
        while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
        if (!tok.empty()) {
            int v = 0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || p != tok.data() + tok.size())
                throw ParseError("bad multiset entry '" + std::string(tok) + "'");
            out.push_back(v);
        }
        pos = comma + 1;
    }
    return Multiset(std::move(out));
}

}  // namespace branchcrit
