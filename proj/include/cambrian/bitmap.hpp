#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cambrian {

/// Fixed-length row-membership bitmap. Bits past size() are always zero.
class Bitmap {
public:
    using word_type = std::uint64_t;
    static constexpr std::size_t word_bits = 64;

    Bitmap() = default;
    explicit Bitmap(std::size_t size, bool value = false);

    static Bitmap all(std::size_t size) { return Bitmap(size, true); }

    std::size_t size() const noexcept { return size_; }
    std::size_t count() const noexcept;
    bool none() const noexcept { return count() == 0; }

    bool test(std::size_t row) const noexcept { return (words_[row / word_bits] >> (row % word_bits)) & 1U; }
    void set(std::size_t row) noexcept { words_[row / word_bits] |= word_type{1} << (row % word_bits); }
    void reset(std::size_t row) noexcept { words_[row / word_bits] &= ~(word_type{1} << (row % word_bits)); }

    Bitmap& operator&=(const Bitmap& other) noexcept;
    Bitmap& operator|=(const Bitmap& other) noexcept;

    std::span<const word_type> words() const noexcept { return words_; }
    std::span<word_type> words() noexcept { return words_; }

    std::vector<std::size_t> rows() const;

    friend bool operator==(const Bitmap&, const Bitmap&) = default;

private:
    void clear_tail() noexcept;

    std::size_t size_ = 0;
    std::vector<word_type> words_;
};

inline Bitmap operator&(Bitmap lhs, const Bitmap& rhs) { return lhs &= rhs; }
inline Bitmap operator|(Bitmap lhs, const Bitmap& rhs) { return lhs |= rhs; }

} // namespace cambrian
