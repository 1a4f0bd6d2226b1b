#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fillrad::detail {

/// Dense bit vector; used for Z2 columns and for closed neighborhoods.
class Bits {
public:
    explicit Bits(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    void reset(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
    void flip_with(const Bits& o)
    {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    }
    /// Highest set bit, or npos.
    std::size_t last() const
    {
        for (std::size_t w = words_.size(); w-- > 0;)
            if (words_[w]) return w * 64 + 63 - static_cast<std::size_t>(__builtin_clzll(words_[w]));
        return npos;
    }
    /// True when (*this & mask) is a subset of other.
    bool subset_of_within(const Bits& other, const Bits& mask) const
    {
        for (std::size_t w = 0; w < words_.size(); ++w)
            if (words_[w] & mask.words_[w] & ~other.words_[w]) return false;
        return true;
    }
    Bits operator&(const Bits& o) const
    {
        Bits r = *this;
        for (std::size_t w = 0; w < words_.size(); ++w) r.words_[w] &= o.words_[w];
        return r;
    }
    bool subset_of(const Bits& other) const
    {
        for (std::size_t w = 0; w < words_.size(); ++w)
            if (words_[w] & ~other.words_[w]) return false;
        return true;
    }
    template <class F>
    void each(F&& f) const
    {
        for (std::size_t w = 0; w < words_.size(); ++w)
            for (std::uint64_t bits = words_[w]; bits; bits &= bits - 1)
                f(w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits)));
    }
    std::size_t word_count() const noexcept { return words_.size(); }
    const std::uint64_t* data() const noexcept { return words_.data(); }
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::vector<std::uint64_t> words_;
};

}  // namespace fillrad::detail
