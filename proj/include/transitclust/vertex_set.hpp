#ifndef TRANSITCLUST_VERTEX_SET_HPP
#define TRANSITCLUST_VERTEX_SET_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iterator>
#include <stdexcept>
#include <vector>

namespace transitclust {

/// Dense set of vertex indices over a fixed universe [0, universe()).
/// All binary operations require both operands to share the same universe.
class VertexSet {
public:
    VertexSet() = default;

    explicit VertexSet(std::size_t universe)
        : universe_(universe), words_((universe + 63) / 64, 0) {}

    VertexSet(std::size_t universe, std::initializer_list<int> members) : VertexSet(universe) {
        for (int v : members) set(v);
    }

    static VertexSet full(std::size_t universe) {
        VertexSet s(universe);
        for (auto& w : s.words_) w = ~std::uint64_t{0};
        s.trim();
        return s;
    }

    std::size_t universe() const { return universe_; }

    bool test(int v) const {
        check_index(v);
        return (words_[static_cast<std::size_t>(v) >> 6] >> (v & 63)) & 1u;
    }

    void set(int v) {
        check_index(v);
        words_[static_cast<std::size_t>(v) >> 6] |= std::uint64_t{1} << (v & 63);
    }

    void reset(int v) {
        check_index(v);
        words_[static_cast<std::size_t>(v) >> 6] &= ~(std::uint64_t{1} << (v & 63));
    }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
        return n;
    }

    bool empty() const {
        for (auto w : words_)
            if (w) return false;
        return true;
    }

    bool any() const { return !empty(); }

    /// Lowest member, or -1 when empty.
    int first() const { return next(-1); }

    /// Lowest member strictly greater than `after`, or -1.
    int next(int after) const {
        for (std::size_t i = after < 0 ? 0 : static_cast<std::size_t>(after + 1) >> 6;
             i < words_.size(); ++i) {
            std::uint64_t w = words_[i];
            if (static_cast<int>(i << 6) <= after)
                w &= ~std::uint64_t{0} << ((after + 1) & 63);
            if (w) return static_cast<int>((i << 6) + static_cast<std::size_t>(__builtin_ctzll(w)));
        }
        return -1;
    }

    VertexSet& operator|=(const VertexSet& o) {
        check_universe(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }

    VertexSet& operator&=(const VertexSet& o) {
        check_universe(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }

    /// Set difference.
    VertexSet& operator-=(const VertexSet& o) {
        check_universe(o);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }

    friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
    friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
    friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }

    VertexSet complement() const {
        VertexSet r = full(universe_);
        r -= *this;
        return r;
    }

    bool operator==(const VertexSet& o) const {
        return universe_ == o.universe_ && words_ == o.words_;
    }
    bool operator!=(const VertexSet& o) const { return !(*this == o); }

    bool contains(const VertexSet& o) const {
        check_universe(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (o.words_[i] & ~words_[i]) return false;
        return true;
    }

    bool is_subset_of(const VertexSet& o) const { return o.contains(*this); }

    bool intersects(const VertexSet& o) const {
        check_universe(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

    std::vector<int> to_vector() const {
        std::vector<int> out;
        out.reserve(count());
        for (int v = first(); v >= 0; v = next(v)) out.push_back(v);
        return out;
    }

    std::size_t hash() const {
        std::size_t h = universe_;
        for (auto w : words_) h = h * 1099511628211ULL + static_cast<std::size_t>(w);
        return h;
    }

    /// Order by (size, lowest differing member); gives the deterministic
    /// (cardinality, lexicographic) listing order used for inventories.
    bool before(const VertexSet& o) const {
        std::size_t ca = count(), cb = o.count();
        if (ca != cb) return ca < cb;
        int a = first(), b = o.first();
        while (a == b && a >= 0) {
            a = next(a);
            b = o.next(b);
        }
        if (a == b) return false;
        if (a < 0) return true;
        if (b < 0) return false;
        return a < b;
    }

    struct iterator {
        using iterator_category = std::input_iterator_tag;
        using value_type = int;
        using difference_type = std::ptrdiff_t;
        using pointer = const int*;
        using reference = int;

        const VertexSet* set;
        int v;
        int operator*() const { return v; }
        iterator& operator++() {
            v = set->next(v);
            return *this;
        }
        iterator operator++(int) {
            iterator old = *this;
            v = set->next(v);
            return old;
        }
        bool operator==(const iterator& o) const { return v == o.v; }
        bool operator!=(const iterator& o) const { return v != o.v; }
    };
    iterator begin() const { return {this, first()}; }
    iterator end() const { return {this, -1}; }

private:
    void check_index(int v) const {
        if (v < 0 || static_cast<std::size_t>(v) >= universe_)
            throw std::out_of_range("VertexSet: index out of range");
    }
    void check_universe(const VertexSet& o) const {
        if (universe_ != o.universe_)
            throw std::logic_error("VertexSet: universe mismatch");
    }
    void trim() {
        if (universe_ % 64 != 0 && !words_.empty())
            words_.back() &= (~std::uint64_t{0}) >> (64 - universe_ % 64);
    }

    std::size_t universe_ = 0;
    std::vector<std::uint64_t> words_;
};

struct VertexSetHash {
    std::size_t operator()(const VertexSet& s) const { return s.hash(); }
};

} // namespace transitclust

#endif
