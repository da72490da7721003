#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace prodense {

/// Fixed-length bit vector with word-level bulk operations.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::uint64_t size, bool value = false)
        : size_(size), words_((size + 63) / 64, value ? ~std::uint64_t{0} : 0) {
        trim();
    }

    std::uint64_t size() const { return size_; }
    std::span<const std::uint64_t> words() const { return words_; }

    bool test(std::uint64_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::uint64_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::uint64_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

    std::uint64_t count() const {
        std::uint64_t c = 0;
        for (auto w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
        return c;
    }

    bool none() const {
        for (auto w : words_) {
            if (w) return false;
        }
        return true;
    }

    BitVector& operator&=(const BitVector& other) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
        return *this;
    }

    BitVector& operator|=(const BitVector& other) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
        return *this;
    }

    /// |this & other| without materializing the intersection.
    std::uint64_t count_and(const BitVector& other) const {
        std::uint64_t c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i) {
            c += static_cast<std::uint64_t>(std::popcount(words_[i] & other.words_[i]));
        }
        return c;
    }

    /// this is a subset of other.
    bool subset_of(const BitVector& other) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            if (words_[i] & ~other.words_[i]) return false;
        }
        return true;
    }

    template <typename Fn>
    void for_each_set(Fn&& fn) const {
        for (std::size_t wi = 0; wi < words_.size(); ++wi) {
            std::uint64_t w = words_[wi];
            while (w) {
                const int bit = std::countr_zero(w);
                fn(static_cast<std::uint64_t>(wi) * 64 + static_cast<std::uint64_t>(bit));
                w &= w - 1;
            }
        }
    }

    /// Lowest set index at or after `from`, or size() if none.
    std::uint64_t next_set(std::uint64_t from) const {
        if (from >= size_) return size_;
        std::size_t wi = from >> 6;
        std::uint64_t w = words_[wi] & (~std::uint64_t{0} << (from & 63));
        while (true) {
            if (w) return static_cast<std::uint64_t>(wi) * 64 + static_cast<std::uint64_t>(std::countr_zero(w));
            if (++wi == words_.size()) return size_;
            w = words_[wi];
        }
    }

    /// Order of the sorted member lists, compared lexicographically.
    friend bool member_lex_less(const BitVector& a, const BitVector& b) {
        for (std::size_t i = 0; i < a.words_.size(); ++i) {
            const std::uint64_t diff = a.words_[i] ^ b.words_[i];
            if (!diff) continue;
            const std::uint64_t d = static_cast<std::uint64_t>(i) * 64 + std::countr_zero(diff);
            // The side holding d is smaller unless the other side has no later member.
            const bool a_holds = a.test(d);
            const BitVector& other = a_holds ? b : a;
            const bool other_continues = other.next_set(d + 1) < other.size_;
            return a_holds ? other_continues : !other_continues;
        }
        return false;
    }

    friend bool operator==(const BitVector&, const BitVector&) = default;

private:
    void trim() {
        if (size_ % 64 != 0 && !words_.empty()) {
            words_.back() &= (std::uint64_t{1} << (size_ % 64)) - 1;
        }
    }

    std::uint64_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace prodense
