#include "cambrian/bitmap.hpp"

#include <algorithm>

namespace cambrian {

Bitmap::Bitmap(std::size_t size, bool value)
    : size_(size), words_((size + word_bits - 1) / word_bits, value ? ~word_type{0} : word_type{0})
{
    clear_tail();
}

std::size_t Bitmap::count() const noexcept
{
    std::size_t n = 0;
    for (auto w : words_) {
        n += static_cast<std::size_t>(std::popcount(w));
    }
    return n;
}

Bitmap& Bitmap::operator&=(const Bitmap& other) noexcept
{
    const auto n = std::min(words_.size(), other.words_.size());
    for (std::size_t i = 0; i < n; ++i) {
        words_[i] &= other.words_[i];
    }
    return *this;
}

Bitmap& Bitmap::operator|=(const Bitmap& other) noexcept
{
    const auto n = std::min(words_.size(), other.words_.size());
    for (std::size_t i = 0; i < n; ++i) {
        words_[i] |= other.words_[i];
    }
    return *this;
}

std::vector<std::size_t> Bitmap::rows() const
{
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        auto bits = words_[w];
        while (bits != 0) {
            out.push_back(w * word_bits + static_cast<std::size_t>(std::countr_zero(bits)));
            bits &= bits - 1;
        }
    }
    return out;
}

void Bitmap::clear_tail() noexcept
{
    const auto rem = size_ % word_bits;
    if (rem != 0 && !words_.empty()) {
        words_.back() &= (word_type{1} << rem) - 1;
    }
}

} // namespace cambrian
