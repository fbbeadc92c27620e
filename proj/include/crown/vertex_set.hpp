#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

#include "crown/types.hpp"

namespace crown {

// Dense vertex set over a fixed universe 0..n-1, bitset-backed.
// Cardinality is maintained incrementally.
class VertexSet {
public:
    VertexSet() = default;

    explicit VertexSet(Vertex universe)
        : n_(universe), words_((static_cast<std::size_t>(universe) + 63) / 64, 0) {}

    static VertexSet full(Vertex universe) {
        VertexSet s(universe);
        for (Vertex v = 0; v < universe; ++v) s.insert(v);
        return s;
    }

    template <class Range>
    static VertexSet of(Vertex universe, const Range& vertices) {
        VertexSet s(universe);
        for (Vertex v : vertices) s.insert(v);
        return s;
    }

    Vertex universe() const { return n_; }
    Vertex count() const { return count_; }
    bool empty() const { return count_ == 0; }

    bool contains(Vertex v) const {
        assert(v >= 0 && v < n_);
        return (words_[static_cast<std::size_t>(v) >> 6] >> (v & 63)) & 1u;
    }

    void insert(Vertex v) {
        assert(v >= 0 && v < n_);
        std::uint64_t& w = words_[static_cast<std::size_t>(v) >> 6];
        std::uint64_t bit = std::uint64_t{1} << (v & 63);
        if (!(w & bit)) {
            w |= bit;
            ++count_;
        }
    }

    void erase(Vertex v) {
        assert(v >= 0 && v < n_);
        std::uint64_t& w = words_[static_cast<std::size_t>(v) >> 6];
        std::uint64_t bit = std::uint64_t{1} << (v & 63);
        if (w & bit) {
            w &= ~bit;
            --count_;
        }
    }

    void clear() {
        std::fill(words_.begin(), words_.end(), 0);
        count_ = 0;
    }

    bool intersects(const VertexSet& other) const {
        assert(n_ == other.n_);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & other.words_[i]) return true;
        return false;
    }

    bool is_subset_of(const VertexSet& other) const {
        assert(n_ == other.n_);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~other.words_[i]) return false;
        return true;
    }

    VertexSet operator&(const VertexSet& other) const {
        return combine(other, [](std::uint64_t a, std::uint64_t b) { return a & b; });
    }

    VertexSet operator|(const VertexSet& other) const {
        return combine(other, [](std::uint64_t a, std::uint64_t b) { return a | b; });
    }

    // set difference: elements of *this not in other
    VertexSet minus(const VertexSet& other) const {
        return combine(other, [](std::uint64_t a, std::uint64_t b) { return a & ~b; });
    }

    VertexSet complement() const {
        VertexSet r(n_);
        for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = ~words_[i];
        r.trim_tail();
        r.recount();
        return r;
    }

    // visits members in ascending order
    template <class F>
    void for_each(F&& f) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            std::uint64_t w = words_[i];
            while (w) {
                int b = std::countr_zero(w);
                f(static_cast<Vertex>(i * 64 + static_cast<std::size_t>(b)));
                w &= w - 1;
            }
        }
    }

    std::vector<Vertex> to_vector() const {
        std::vector<Vertex> out;
        out.reserve(static_cast<std::size_t>(count_));
        for_each([&](Vertex v) { out.push_back(v); });
        return out;
    }

    bool operator==(const VertexSet& other) const {
        return n_ == other.n_ && words_ == other.words_;
    }

private:
    template <class Op>
    VertexSet combine(const VertexSet& other, Op op) const {
        assert(n_ == other.n_);
        VertexSet r(n_);
        for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = op(words_[i], other.words_[i]);
        r.recount();
        return r;
    }

    void trim_tail() {
        if (n_ % 64 != 0 && !words_.empty())
            words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
    }

    void recount() {
        std::int64_t c = 0;
        for (std::uint64_t w : words_) c += std::popcount(w);
        count_ = static_cast<Vertex>(c);
    }

    Vertex n_ = 0;
    std::vector<std::uint64_t> words_;
    Vertex count_ = 0;
};

}  // namespace crown
